use super::{is_cfext_normal, is_reg_normal, is_rt_normal, Class, Grammar, Item, Rule};
use crate::error::{Error, Result};
use crate::storage::{self, apply, encode, Config, Instr, Pred};
use crate::term::Test;
use std::collections::{HashSet, VecDeque};
use std::fmt;

/// Outcome of the determinism check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Determinism {
    /// Every two rules with the same left-hand side have jointly
    /// unsatisfiable tests.
    Yes,
    /// Two rules are enabled on the same configuration.
    No(String),
    /// Neither proven nor refuted.
    UnknownSyntactic,
}

impl fmt::Display for Determinism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Determinism::Yes => f.write_str("yes"),
            Determinism::No(w) => write!(f, "no ({w})"),
            Determinism::UnknownSyntactic => f.write_str("unknown"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// Declared class (or the strongest satisfied class if none declared).
    pub class: Class,
    /// All classes whose syntactic restrictions the rules satisfy.
    pub satisfied: Vec<Class>,
    pub deterministic: Determinism,
    /// Present for regular and tree grammars over a storage type with an
    /// identity and a single input.
    pub racceptor_deterministic: Option<bool>,
    pub normal_form: bool,
}

/// Whether the rules satisfy the syntactic restrictions of a class.
pub fn satisfies(g: &Grammar, class: Class) -> bool {
    let tail_ok = |r: &Rule| {
        r.rhs.iter().enumerate().all(|(i, it)| !matches!(it, Item::Tail(_)) || i + 1 == r.rhs.len())
    };
    let no_tail = |r: &Rule| !r.rhs.iter().any(|it| matches!(it, Item::Tail(_)));
    match class {
        Class::CfExt => g.rules.iter().all(tail_ok),
        Class::Cf => g.rules.iter().all(no_tail),
        Class::Reg => g.rules.iter().all(|r| {
            no_tail(r)
                && r.rhs
                    .iter()
                    .enumerate()
                    .all(|(i, it)| matches!(it, Item::T(_)) || i + 1 == r.rhs.len())
        }),
        Class::Rt => {
            g.is_ranked()
                && g.rules.iter().all(|r| {
                    no_tail(r)
                        && r.rhs.iter().all(|it| !matches!(it, Item::T(t) if g.rank(*t).is_none()))
                        && g.rhs_trees(&r.rhs).map_or(false, |ts| ts.len() == 1)
                })
        }
    }
}

/// Strongest satisfied class (tree grammars preferred when ranked) and the
/// list of all satisfied classes.
pub fn classify(g: &Grammar) -> (Class, Vec<Class>) {
    let sat: Vec<Class> = [Class::Reg, Class::Rt, Class::Cf, Class::CfExt]
        .into_iter()
        .filter(|c| satisfies(g, *c))
        .collect();
    let best = if g.is_ranked() && sat.contains(&Class::Rt) {
        Class::Rt
    } else {
        sat.first().copied().unwrap_or(Class::CfExt)
    };
    (best, sat)
}

/// Structural checks: declared names, compilable predicates, instructions
/// and encoding, and the declared class.
pub(crate) fn check(g: &Grammar) -> Result<()> {
    let nt: HashSet<_> = g.nonterminals.iter().copied().collect();
    let name = g.name.as_str();
    if !nt.contains(&g.initial) {
        return Err(Error::invalid(format!("initial nonterminal {} is not declared", g.initial)).at(name, None));
    }
    for f in &g.finals {
        if !nt.contains(f) {
            return Err(Error::invalid(format!("final state {f} is not a nonterminal")).at(name, None));
        }
    }
    for t in g.terminals.keys() {
        if nt.contains(t) {
            return Err(Error::invalid(format!("{t} is both a terminal and a nonterminal")).at(name, None));
        }
    }
    g.storage.compile_enc(&g.encoding).map_err(|e| e.at(name, None))?;
    for (i, r) in g.rules.iter().enumerate() {
        let at = |e: Error| e.at(name, Some(i));
        if !nt.contains(&r.lhs) {
            return Err(at(Error::invalid(format!("left-hand side {} is not declared", r.lhs))));
        }
        r.test.map(&mut |p| g.storage.compile_pred(p)).map_err(at)?;
        for it in &r.rhs {
            match it {
                Item::T(t) => {
                    if !g.terminals.contains_key(t) {
                        return Err(at(Error::invalid(format!("terminal {t} is not declared"))));
                    }
                }
                Item::Call(b, chain) => {
                    if !nt.contains(b) {
                        return Err(at(Error::invalid(format!("nonterminal {b} is not declared"))));
                    }
                    if chain.is_empty() {
                        return Err(at(Error::invalid(format!("call of {b} without instruction"))));
                    }
                    for f in chain {
                        g.storage.compile_instr(f).map_err(at)?;
                    }
                }
                Item::Tail(b) => {
                    if !nt.contains(b) {
                        return Err(at(Error::invalid(format!("nonterminal {b} is not declared"))));
                    }
                    if g.class != Class::CfExt {
                        return Err(at(Error::invalid(format!(
                            "identity tail {b}(id) is only allowed in CF_ext grammars"
                        ))));
                    }
                }
            }
        }
    }
    if !satisfies(g, g.class) {
        let bad = g
            .rules
            .iter()
            .enumerate()
            .find(|(_, r)| {
                let mut one = g.clone();
                one.rules = vec![(*r).clone()];
                !satisfies(&one, g.class)
            })
            .map(|(i, _)| i);
        return Err(Error::invalid(format!("rules do not fit class {}", g.class)).at(name, bad));
    }
    Ok(())
}

/// Full validation with classification and determinism analysis.
pub fn validate(g: &Grammar) -> Result<ValidationReport> {
    check(g)?;
    let (_, satisfied) = classify(g);
    let normal_form = match g.class {
        Class::Reg => is_reg_normal(g),
        Class::Rt => is_rt_normal(g),
        Class::CfExt => is_cfext_normal(g),
        Class::Cf => false,
    };
    let racceptor_deterministic = match g.class {
        Class::Reg | Class::Rt => is_racceptor_deterministic(g).ok(),
        _ => None,
    };
    Ok(ValidationReport {
        class: g.class,
        satisfied,
        deterministic: is_deterministic(g),
        racceptor_deterministic,
        normal_form,
    })
}

fn compiled_tests(g: &Grammar) -> Option<Vec<Test<Pred>>> {
    g.rules.iter().map(|r| r.test.map(&mut |p| g.storage.compile_pred(p)).ok()).collect()
}

/// Whether a test is unsatisfiable by propositional reasoning plus the
/// storage exclusivity axioms.
pub(crate) fn unsatisfiable(t: &Test<Pred>) -> bool {
    let Some(dnf) = t.dnf(4096) else { return false };
    dnf.iter().all(|conj| {
        conj.iter().enumerate().any(|(i, (p, pp))| {
            conj[i + 1..].iter().any(|(q, qp)| {
                (p == q && pp != qp) || (*pp && *qp && storage::exclusive(p, q))
            })
        })
    })
}

fn conj(a: &Test<Pred>, b: &Test<Pred>) -> Test<Pred> {
    Test::and(vec![a.clone(), b.clone()])
}

/// Checks that any two distinct rules with the same left-hand side have
/// jointly unsatisfiable tests. Pairs that cannot be settled syntactically
/// are searched for a witness configuration reachable from small inputs.
pub fn is_deterministic(g: &Grammar) -> Determinism {
    let Some(tests) = compiled_tests(g) else { return Determinism::UnknownSyntactic };
    let mut open = Vec::new();
    for i in 0..g.rules.len() {
        for j in i + 1..g.rules.len() {
            if g.rules[i].lhs != g.rules[j].lhs || g.rules[i] == g.rules[j] {
                continue;
            }
            if !unsatisfiable(&conj(&tests[i], &tests[j])) {
                open.push((i, j));
            }
        }
    }
    if open.is_empty() {
        return Determinism::Yes;
    }
    for c in sample_configs(g, 4, 3000) {
        for &(i, j) in &open {
            let both = storage::eval_test(&tests[i], &c).unwrap_or(false)
                && storage::eval_test(&tests[j], &c).unwrap_or(false);
            if both {
                return Determinism::No(format!(
                    "rules {i} and {j} of {} are both enabled on configuration {c}",
                    g.rules[i].lhs
                ));
            }
        }
    }
    Determinism::UnknownSyntactic
}

/// Configurations reachable from encodings of small inputs under the
/// instructions occurring in the grammar.
fn sample_configs(g: &Grammar, max_input: usize, cap: usize) -> Vec<Config> {
    let Ok(enc) = g.storage.compile_enc(&g.encoding) else { return Vec::new() };
    let mut instrs: Vec<Instr> = Vec::new();
    for r in &g.rules {
        for it in &r.rhs {
            if let Item::Call(_, chain) = it {
                for f in chain {
                    if let Ok(i) = g.storage.compile_instr(f) {
                        if !instrs.contains(&i) {
                            instrs.push(i);
                        }
                    }
                }
            }
        }
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    for u in enc.inputs(max_input) {
        if let Some(c) = encode(&enc, &u) {
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    let mut out = Vec::new();
    while let Some(c) = queue.pop_front() {
        for f in &instrs {
            if seen.len() >= cap {
                break;
            }
            if let Some(d) = apply(f, &c) {
                if seen.insert(d.clone()) {
                    queue.push_back(d);
                }
            }
        }
        out.push(c);
    }
    out
}

/// First symbol read by a rule of a regular or tree acceptor (`None` for λ).
fn first_symbol(r: &Rule) -> Option<crate::symbol::Symbol> {
    match r.rhs.first() {
        Some(Item::T(a)) => Some(*a),
        _ => None,
    }
}

/// Determinism of a regular or tree grammar viewed as an acceptor: rules
/// with the same left-hand side that read the same symbol, or where one
/// reads nothing, must have jointly unsatisfiable tests. Answers `true`
/// only when this is proven.
pub fn is_racceptor_deterministic(g: &Grammar) -> Result<bool> {
    let construction = "acceptor determinism";
    if g.storage.identity().is_none() {
        return Err(Error::precondition(construction, format!("storage {} has no identity", g.storage)));
    }
    let enc = g.storage.compile_enc(&g.encoding)?;
    if !enc.is_unit() {
        return Err(Error::precondition(
            construction,
            format!("encoding {} takes more than one input", g.encoding),
        ));
    }
    let normal = match g.class {
        Class::Reg => is_reg_normal(g),
        Class::Rt => is_rt_normal(g),
        _ => false,
    };
    if !normal {
        return Ok(false);
    }
    let Some(tests) = compiled_tests(g) else { return Ok(false) };
    for i in 0..g.rules.len() {
        for j in i + 1..g.rules.len() {
            let (ri, rj) = (&g.rules[i], &g.rules[j]);
            if ri.lhs != rj.lhs || ri == rj {
                continue;
            }
            let (a, b) = (first_symbol(ri), first_symbol(rj));
            let clash = a.is_none() || b.is_none() || a == b;
            if clash && !unsatisfiable(&conj(&tests[i], &tests[j])) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
