use super::{Grammar, Item, Rule};
use crate::error::Result;
use crate::term::Test;

/// Removes syntactic sugar:
/// * a top-level disjunction `b1 or ... or bn` becomes n rules with the
///   pairwise disjoint tests `b1`, `b2 and not b1`, ...;
/// * rules with test `false` are dropped;
/// * an instruction chain `B(f1; ...; fk)` becomes `B1(f1)` with fresh
///   nonterminals and rules `B1 -> B2(f2)`, ..., `B(k-1) -> B(fk)`.
///
/// `if-then-else` is already split into two rules by the parser.
pub fn desugar(g: &Grammar) -> Result<Grammar> {
    let mut out = g.clone();
    out.rules.clear();
    let mut fresh = g.fresh();
    let mut extra = Vec::new();
    for r in &g.rules {
        let mut tests = Vec::new();
        match &r.test {
            Test::Or(parts) => {
                for (i, b) in parts.iter().enumerate() {
                    let mut conj = vec![b.clone()];
                    conj.extend(parts[..i].iter().map(|p| p.clone().negate()));
                    tests.push(Test::and(conj));
                }
            }
            t => tests.push(t.clone()),
        }
        let mut rhs = Vec::with_capacity(r.rhs.len());
        for it in &r.rhs {
            match it {
                Item::Call(b, chain) if chain.len() > 1 => {
                    let mids: Vec<_> =
                        (1..chain.len()).map(|_| fresh.numbered(b.as_str())).collect();
                    rhs.push(Item::call(mids[0], chain[0].clone()));
                    for (j, f) in chain.iter().enumerate().skip(1) {
                        let target = if j + 1 < chain.len() { mids[j] } else { *b };
                        extra.push(Rule::new(mids[j - 1], Test::True, vec![Item::call(target, f.clone())]));
                    }
                    for m in mids {
                        out.add_nonterminal(m);
                    }
                }
                other => rhs.push(other.clone()),
            }
        }
        for t in tests {
            if t != Test::False {
                out.rules.push(Rule::new(r.lhs, t, rhs.clone()));
            }
        }
    }
    out.rules.extend(extra);
    Ok(out)
}
