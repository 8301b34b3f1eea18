//! Normal forms.

use super::{Class, Grammar, Item, RhsTree, Rule};
use crate::error::{Error, Result};
use crate::storage::Kind;
use crate::symbol::{sym, Symbol};
use crate::term::{Term, Test};
use std::collections::BTreeSet;

/// Every rule reads at most one terminal.
pub fn is_reg_normal(g: &Grammar) -> bool {
    g.class == Class::Reg && g.rules.iter().all(|r| r.terminals() <= 1)
}

/// Every rule is `A -> B(f)` or `A -> σ(B1(f1), ..., Bk(fk))`.
pub fn is_rt_normal(g: &Grammar) -> bool {
    g.class == Class::Rt
        && g.rules.iter().all(|r| match r.rhs.as_slice() {
            [Item::Call(..)] => true,
            [Item::T(s), rest @ ..] => {
                g.rank(*s) == Some(rest.len()) && rest.iter().all(|i| matches!(i, Item::Call(..)))
            }
            _ => false,
        })
}

/// Every rule is `A -> w B(id)`, `A -> C(f) B(id)` or `A -> w`.
pub fn is_cfext_normal(g: &Grammar) -> bool {
    g.class == Class::CfExt
        && g.rules.iter().all(|r| match r.rhs.split_last() {
            None => true,
            Some((Item::Tail(_), init)) => {
                init.iter().all(|i| matches!(i, Item::T(_))) || matches!(init, [Item::Call(..)])
            }
            Some(_) => r.rhs.iter().all(|i| matches!(i, Item::T(_))),
        })
}

fn identity(g: &Grammar, construction: &str) -> Result<Term> {
    g.storage.identity().ok_or_else(|| {
        Error::precondition(construction, format!("storage {} has no identity", g.storage))
            .at(&g.name, None)
    })
}

/// Splits terminal strings so that every rule reads at most one terminal.
pub fn normalize_reg(g: &Grammar) -> Result<Grammar> {
    const C: &str = "regular normal form";
    if g.class != Class::Reg {
        return Err(Error::precondition(C, format!("grammar is {}, not REG", g.class)).at(&g.name, None));
    }
    let id = identity(g, C)?;
    let mut out = g.clone();
    out.rules.clear();
    let mut fresh = g.fresh();
    for r in &g.rules {
        let n = r.terminals();
        if n <= 1 {
            out.rules.push(r.clone());
            continue;
        }
        let call = r.rhs.last().filter(|i| matches!(i, Item::Call(..))).cloned();
        let terms: Vec<Item> = r.rhs.iter().filter(|i| matches!(i, Item::T(_))).cloned().collect();
        let mut lhs = r.lhs;
        let mut test = r.test.clone();
        for (k, t) in terms.iter().enumerate() {
            let mut rhs = vec![t.clone()];
            if k + 1 < n {
                let x = fresh.numbered(r.lhs.as_str());
                out.add_nonterminal(x);
                rhs.push(Item::call(x, id.clone()));
                out.rules.push(Rule::new(lhs, test, rhs));
                lhs = x;
                test = Test::True;
            } else {
                rhs.extend(call.clone());
                out.rules.push(Rule::new(lhs, test.clone(), rhs));
            }
        }
    }
    Ok(out)
}

/// Rewrites tree rules into the forms `A -> B(f)` and
/// `A -> σ(B1(f1), ..., Bk(fk))`.
pub fn normalize_rt(g: &Grammar) -> Result<Grammar> {
    const C: &str = "tree normal form";
    if g.class != Class::Rt {
        return Err(Error::precondition(C, format!("grammar is {}, not RT", g.class)).at(&g.name, None));
    }
    let id = identity(g, C)?;
    let mut out = g.clone();
    out.rules.clear();
    let mut fresh = g.fresh();
    for (i, r) in g.rules.iter().enumerate() {
        let trees = g.rhs_trees(&r.rhs).filter(|t| t.len() == 1).ok_or_else(|| {
            Error::precondition(C, "right-hand side is not a single tree").at(&g.name, Some(i))
        })?;
        emit_rt(&mut out, &mut fresh, &id, r.lhs, r.test.clone(), &trees[0]);
    }
    Ok(out)
}

fn emit_rt(
    out: &mut Grammar,
    fresh: &mut crate::symbol::Fresh,
    id: &Term,
    lhs: Symbol,
    test: Test<Term>,
    t: &RhsTree,
) {
    match t {
        RhsTree::Leaf(it) => out.rules.push(Rule::new(lhs, test, vec![it.clone()])),
        RhsTree::Node(s, kids) => {
            let mut rhs = vec![Item::T(*s)];
            for k in kids {
                match k {
                    RhsTree::Leaf(it) => rhs.push(it.clone()),
                    node => {
                        let x = fresh.numbered(lhs.as_str());
                        out.add_nonterminal(x);
                        emit_rt(out, fresh, id, x, Test::True, node);
                        rhs.push(Item::call(x, id.clone()));
                    }
                }
            }
            out.rules.push(Rule::new(lhs, test, rhs));
        }
    }
}

/// Views a context-free grammar as an extended one (no rule changes).
pub fn lift_cf(g: &Grammar) -> Result<Grammar> {
    match g.class {
        Class::Cf | Class::Reg | Class::CfExt => {
            let mut out = g.clone();
            out.class = Class::CfExt;
            Ok(out)
        }
        Class::Rt => Err(Error::precondition("lift to CF_ext", "tree grammars cannot be lifted")
            .at(&g.name, None)),
    }
}

/// Rewrites an extended grammar into the forms `A -> w B(id)`,
/// `A -> C(f) B(id)` and `A -> w`. Context-free grammars are lifted first.
pub fn normalize_cfext(g: &Grammar) -> Result<Grammar> {
    let g = lift_cf(g)?;
    if is_cfext_normal(&g) {
        return Ok(g);
    }
    let mut out = g.clone();
    out.rules.clear();
    let mut fresh = g.fresh();
    let mut end: Option<Symbol> = None;
    for r in &g.rules {
        let single = Grammar { rules: vec![r.clone()], ..g.clone() };
        if is_cfext_normal(&single) {
            out.rules.push(r.clone());
            continue;
        }
        let (body, tail) = match r.rhs.split_last() {
            Some((Item::Tail(b), init)) => (init.to_vec(), Some(*b)),
            _ => (r.rhs.clone(), None),
        };
        // maximal terminal runs and single calls
        let mut pieces: Vec<Vec<Item>> = Vec::new();
        for it in body {
            match (&it, pieces.last_mut()) {
                (Item::T(_), Some(last)) if matches!(last.first(), Some(Item::T(_))) => last.push(it),
                _ => pieces.push(vec![it]),
            }
        }
        let mut lhs = r.lhs;
        let mut test = r.test.clone();
        let n = pieces.len();
        for (k, piece) in pieces.into_iter().enumerate() {
            let last = k + 1 == n;
            let is_call = matches!(piece.first(), Some(Item::Call(..)));
            let next = if !last {
                let x = fresh.numbered(r.lhs.as_str());
                out.add_nonterminal(x);
                Some(x)
            } else if let Some(t) = tail {
                Some(t)
            } else if is_call {
                let e = *end.get_or_insert_with(|| {
                    let e = fresh.named("end");
                    out.add_nonterminal(e);
                    out.rules.push(Rule::new(e, Test::True, Vec::new()));
                    e
                });
                Some(e)
            } else {
                None
            };
            let mut rhs = piece;
            if let Some(x) = next {
                rhs.push(Item::Tail(x));
            }
            out.rules.push(Rule::new(lhs, test, rhs));
            if let Some(x) = next.filter(|_| !last) {
                lhs = x;
            }
            test = Test::True;
        }
    }
    Ok(out)
}

fn pushdown_symbols(t: &Term, out: &mut BTreeSet<Symbol>) {
    match t {
        Term::Eq(h, a) if h.as_str() == "top" => {
            if let Some(s) = a.as_sym() {
                out.insert(s);
            }
        }
        Term::App(h, a) if matches!(h.as_str(), "push" | "stay") && !a.is_empty() => {
            if let Some(s) = a[0].as_sym() {
                out.insert(s);
            }
        }
        _ => {}
    }
}

/// Rewrites the tests of a grammar over a pushdown (or a pushdown of some
/// storage type) so that every test is `top=γ`, resp. `top=γ and test(b)`.
/// The `bottom` predicate is removed by marking the bottom cell's symbol.
pub fn cfp_test_normal_form(g: &Grammar) -> Result<Grammar> {
    const C: &str = "pushdown test normal form";
    let pd_of = match g.storage.kind() {
        Kind::Pushdown => false,
        Kind::PushdownOf { pure: false, .. } => true,
        _ => {
            return Err(Error::precondition(C, format!("storage {} is not a pushdown", g.storage))
                .at(&g.name, None))
        }
    };
    let mut gamma = BTreeSet::new();
    let mut uses_bottom = false;
    let bottom = Term::sym("bottom");
    for r in &g.rules {
        let mut atoms = Vec::new();
        r.test.atoms(&mut atoms);
        for a in atoms {
            pushdown_symbols(a, &mut gamma);
            uses_bottom |= *a == bottom;
        }
        for it in &r.rhs {
            if let Item::Call(_, chain) = it {
                chain.iter().for_each(|f| pushdown_symbols(f, &mut gamma));
            }
        }
    }
    let enc_bottom = match (&g.encoding, pd_of) {
        (Term::Sym(s), false) => *s,
        (Term::App(h, a), false) if h.as_str() == "unary" && a.len() == 2 => {
            gamma.insert(a[0].as_sym().unwrap_or(sym("?")));
            a[1].as_sym().unwrap_or(sym("?"))
        }
        (Term::Tuple(p), true) if !p.is_empty() => p[0].as_sym().unwrap_or(sym("?")),
        _ => return Err(Error::precondition(C, "unexpected encoding").at(&g.name, None)),
    };
    gamma.insert(enc_bottom);
    let mut fresh = crate::symbol::Fresh::new(gamma.iter().copied());
    // (symbol in the new grammar, original symbol, marked)
    let mut contexts: Vec<(Symbol, Symbol, bool)> = gamma.iter().map(|&s| (s, s, false)).collect();
    let mut out = g.clone();
    if uses_bottom {
        let marks: Vec<(Symbol, Symbol, bool)> =
            gamma.iter().map(|&s| (fresh.numbered(&format!("{s}^")), s, true)).collect();
        let mark_of = |s: Symbol| marks.iter().find(|m| m.1 == s).unwrap().0;
        out.encoding = match &g.encoding {
            Term::Sym(s) => Term::Sym(mark_of(*s)),
            Term::App(h, a) if h.as_str() == "unary" => {
                Term::App(*h, vec![a[0].clone(), Term::Sym(mark_of(enc_bottom))])
            }
            Term::Tuple(p) => {
                let mut p = p.clone();
                p[0] = Term::Sym(mark_of(enc_bottom));
                Term::Tuple(p)
            }
            e => e.clone(),
        };
        contexts.extend(marks.iter().copied());
    }
    out.rules.clear();
    for r in &g.rules {
        for &(top, orig, marked) in &contexts {
            let residual = r.test.substitute(&mut |p: &Term| match p {
                Term::Eq(h, a) if h.as_str() == "top" => {
                    if a.as_sym() == Some(orig) {
                        Test::True
                    } else {
                        Test::False
                    }
                }
                Term::Sym(h) if h.as_str() == "bottom" => {
                    if marked {
                        Test::True
                    } else {
                        Test::False
                    }
                }
                other => Test::Atom(other.clone()),
            });
            if residual == Test::False {
                continue;
            }
            let rhs = if marked {
                r.rhs
                    .iter()
                    .map(|it| match it {
                        Item::Call(b, chain) => Item::Call(
                            *b,
                            chain
                                .iter()
                                .map(|f| match f {
                                    Term::App(h, a) if h.as_str() == "stay" && !a.is_empty() => {
                                        let mut a = a.clone();
                                        let s = a[0].as_sym().unwrap();
                                        a[0] = Term::Sym(
                                            contexts.iter().find(|c| c.2 && c.1 == s).unwrap().0,
                                        );
                                        Term::App(*h, a)
                                    }
                                    f => f.clone(),
                                })
                                .collect(),
                        ),
                        it => it.clone(),
                    })
                    .collect()
            } else {
                r.rhs.clone()
            };
            let test = Test::and(vec![Test::Atom(Term::eq("top", top)), residual]);
            out.rules.push(Rule::new(r.lhs, test, rhs));
        }
    }
    Ok(out)
}
