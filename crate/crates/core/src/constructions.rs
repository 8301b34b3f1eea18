//! Constructions between grammar classes: grammars and pushdown automata,
//! look-ahead determinization, acceptance-mode conversions, marked trees,
//! derivation-tree acceptors and path acceptors.

use crate::engine::LanguageSample;
use crate::error::{Error, Result};
use crate::grammar::{
    cfp_test_normal_form, desugar, is_deterministic, is_racceptor_deterministic, is_rt_normal,
    normalize_cfext, normalize_reg, normalize_rt, Class, Determinism, Grammar, Item, Rule,
};
use crate::storage::{Kind, LookaheadEntry, StorageType};
use crate::symbol::{sym, Fresh, Symbol};
use crate::term::{Term, Test};
use crate::tree::{path_symbol, RankedAlphabet, Tree};
use indexmap::{IndexMap, IndexSet};
use sha2::{Digest, Sha256};
use std::collections::{HashMap, HashSet, VecDeque};

fn pre(construction: &str, g: &Grammar, msg: impl Into<String>) -> Error {
    Error::precondition(construction, msg).at(&g.name, None)
}

fn identity(construction: &str, s: &StorageType, g: &Grammar) -> Result<Term> {
    s.identity().ok_or_else(|| pre(construction, g, format!("storage {s} has no identity")))
}

/// Wraps every atom `p` as `test(p)`.
fn lift_test(t: &Test<Term>) -> Test<Term> {
    t.substitute(&mut |p: &Term| Test::Atom(Term::app("test", vec![p.clone()])))
}

fn is_bottom(t: &Test<Term>) -> bool {
    matches!(t, Test::Atom(Term::Sym(s)) if s.as_str() == "bottom")
}

fn forces_bottom(t: &Test<Term>) -> bool {
    is_bottom(t) || matches!(t, Test::And(parts) if parts.iter().any(is_bottom))
}

/// Name of a registered look-ahead grammar: a digest of its text.
fn lookahead_key(aux: &Grammar) -> Symbol {
    let mut g = aux.clone();
    g.name = "aux".to_string();
    let digest = Sha256::digest(g.to_text().as_bytes());
    let hex: String = digest[..6].iter().map(|b| format!("{b:02x}")).collect();
    sym(&format!("la_{hex}"))
}

fn acc(key: Symbol) -> Test<Term> {
    Test::Atom(Term::App(sym("acc"), vec![Term::Sym(key)]))
}

/// Indices of the rules that take part in some complete derivation,
/// ignoring tests: every nonterminal they mention can finish, and their
/// left-hand side is reachable from the initial nonterminal.
fn useful_rules(g: &Grammar) -> Vec<usize> {
    let mut productive: HashSet<Symbol> = HashSet::new();
    loop {
        let mut changed = false;
        for r in &g.rules {
            if !productive.contains(&r.lhs)
                && r.calls().all(|i| productive.contains(&i.nonterminal().unwrap()))
            {
                productive.insert(r.lhs);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let usable = |r: &Rule| r.calls().all(|i| productive.contains(&i.nonterminal().unwrap()));
    let mut reach: HashSet<Symbol> = HashSet::from([g.initial]);
    let mut queue = VecDeque::from([g.initial]);
    while let Some(a) = queue.pop_front() {
        for (_, r) in g.rules_of(a) {
            if usable(r) {
                for b in r.calls().filter_map(Item::nonterminal) {
                    if reach.insert(b) {
                        queue.push_back(b);
                    }
                }
            }
        }
    }
    (0..g.rules.len()).filter(|&i| reach.contains(&g.rules[i].lhs) && usable(&g.rules[i])).collect()
}

/// Drops useless rules and the nonterminals no longer mentioned.
pub fn prune(g: &Grammar) -> Grammar {
    prune_tracked(g, &vec![(); g.rules.len()]).0
}

fn prune_tracked<T: Clone>(g: &Grammar, tags: &[T]) -> (Grammar, Vec<T>) {
    let keep = useful_rules(g);
    let mut out = g.clone();
    out.rules = keep.iter().map(|&i| g.rules[i].clone()).collect();
    let mut used: IndexSet<Symbol> = IndexSet::from([g.initial]);
    for r in &out.rules {
        used.insert(r.lhs);
        used.extend(r.calls().filter_map(Item::nonterminal));
    }
    out.nonterminals.retain(|a| used.contains(a));
    out.finals.retain(|a| used.contains(a));
    (out, keep.iter().map(|&i| tags[i].clone()).collect())
}

// ---------------------------------------------------------------------------
// grammars and pushdown automata

/// The pushdown automaton simulating leftmost derivations: a REG grammar
/// over a pushdown of the storage type with the single state `$`. The
/// pushdown holds the nonterminals still to be expanded.
pub fn to_pushdown_automaton(g: &Grammar) -> Result<Grammar> {
    let g = normalize_cfext(&desugar(g)?)?;
    let dollar = sym("$");
    let mut out = Grammar::new(
        &format!("{}_pda", g.name),
        StorageType::pushdown_of(&g.storage),
        Class::Reg,
        dollar,
        Term::Tuple(vec![Term::Sym(g.initial), g.encoding.clone()]),
    );
    out.terminals = g.terminals.clone();
    for r in &g.rules {
        let guard = Test::and(vec![lift_test(&r.test), Test::Atom(Term::eq("top", r.lhs))]);
        match r.rhs.split_last() {
            Some((Item::Tail(b), init)) => {
                let stay_b = Term::app("stay", vec![Term::Sym(*b)]);
                let rhs = match init {
                    [Item::Call(c, chain)] => {
                        let push = Term::app("push", vec![Term::Sym(*c), chain[0].clone()]);
                        vec![Item::Call(dollar, vec![stay_b, push])]
                    }
                    w => {
                        let mut rhs = w.to_vec();
                        rhs.push(Item::call(dollar, stay_b));
                        rhs
                    }
                };
                out.rules.push(Rule::new(dollar, guard, rhs));
            }
            _ => {
                let bottom = Test::Atom(Term::sym("bottom"));
                let mut rhs = r.rhs.clone();
                rhs.push(Item::call(dollar, Term::sym("pop")));
                out.rules.push(Rule::new(
                    dollar,
                    Test::and(vec![guard.clone(), bottom.clone().negate()]),
                    rhs,
                ));
                out.rules.push(Rule::new(dollar, Test::and(vec![guard, bottom]), r.rhs.clone()));
            }
        }
    }
    Ok(out)
}

/// What a rule of the triple construction was made from.
#[derive(Clone, Debug, PartialEq)]
enum Origin {
    Other,
    /// A push rule; the call `<B|δ|E>(f)` is at this position of the rhs.
    Push { group: (Symbol, Symbol, Term), call: usize },
}

const END: &str = "~end";

fn triple(a: Symbol, g: Symbol, b: Symbol) -> Symbol {
    sym(&format!("<{a}|{g}|{b}>"))
}

/// Rule shape of a REG grammar over a pushdown of `S` after the test normal
/// form: `top=γ`, the residual test on `S`, and the rhs.
fn split_pd_test(c: &str, g: &Grammar, t: &Test<Term>) -> Result<(Symbol, Test<Term>)> {
    let parts = match t {
        Test::And(parts) => parts.clone(),
        t => vec![t.clone()],
    };
    let top = match parts.first() {
        Some(Test::Atom(Term::Eq(h, a))) if h.as_str() == "top" => a.as_sym(),
        _ => None,
    }
    .ok_or_else(|| pre(c, g, format!("test {t:?} is not in pushdown normal form")))?;
    let residual = Test::and(parts[1..].to_vec());
    let mut bad = None;
    let residual = residual.substitute(&mut |p: &Term| match p {
        Term::App(h, a) if h.as_str() == "test" && a.len() == 1 => Test::Atom(a[0].clone()),
        other => {
            bad = Some(other.clone());
            Test::True
        }
    });
    if let Some(p) = bad {
        return Err(pre(c, g, format!("predicate {p} left after the test normal form")));
    }
    Ok((top, residual))
}

fn triple_construction(g: &Grammar, prune_useless: bool) -> Result<(Grammar, Vec<Origin>)> {
    const C: &str = "triple construction";
    if g.class != Class::Reg {
        return Err(pre(C, g, format!("grammar is {}, not REG", g.class)));
    }
    let inner = match g.storage.kind() {
        Kind::PushdownOf { inner, pure: false, .. } => inner.clone(),
        _ => return Err(pre(C, g, format!("storage {} is not a pushdown of a storage type", g.storage))),
    };
    let mut g = desugar(g)?;
    // final rules only with a one-cell pushdown: pop down first
    let mut fresh = g.fresh();
    let down = fresh.named("P");
    let mut needs_down = false;
    for r in &mut g.rules {
        if r.calls().next().is_none() && !forces_bottom(&r.test) {
            r.rhs.push(Item::call(down, Term::sym("stay")));
            needs_down = true;
        }
    }
    if needs_down {
        g.add_nonterminal(down);
        let bottom = Test::Atom(Term::sym("bottom"));
        g.rules.push(Rule::new(down, bottom.clone().negate(), vec![Item::call(down, Term::sym("pop"))]));
        g.rules.push(Rule::new(down, bottom, Vec::new()));
    }
    let h = cfp_test_normal_form(&g)?;
    let (bottom, enc) = match &h.encoding {
        Term::Tuple(p) if p.len() == 2 && p[0].as_sym().is_some() => (p[0].as_sym().unwrap(), p[1].clone()),
        e => return Err(pre(C, &h, format!("unexpected encoding {e}"))),
    };
    let end = sym(END);
    let mut targets: Vec<Symbol> = h.nonterminals.clone();
    targets.push(end);
    let initial = triple(h.initial, bottom, end);
    let mut out = Grammar::new(&format!("{}_cf", g.name), inner, Class::CfExt, initial, enc);
    out.terminals = g.terminals.clone();
    let mut origins = Vec::new();
    for r in &h.rules {
        let (gamma, b) = split_pd_test(C, &h, &r.test)?;
        let (w, call) = match r.rhs.split_last() {
            Some((Item::Call(x, chain), init)) if chain.len() == 1 => (init.to_vec(), Some((*x, &chain[0]))),
            Some((Item::Call(..) | Item::Tail(_), _)) => {
                return Err(pre(C, &h, "rule is not of the form w B(f)"));
            }
            _ => (r.rhs.clone(), None),
        };
        let Some((x, f)) = call else {
            out.rules.push(Rule::new(triple(r.lhs, gamma, end), b, w));
            origins.push(Origin::Other);
            continue;
        };
        match f {
            Term::Sym(s) if s.as_str() == "pop" => {
                out.rules.push(Rule::new(triple(r.lhs, gamma, x), b, w));
                origins.push(Origin::Other);
            }
            Term::Sym(s) if s.as_str() == "stay" => {
                for &c in &targets {
                    let mut rhs = w.clone();
                    rhs.push(Item::Tail(triple(x, gamma, c)));
                    out.rules.push(Rule::new(triple(r.lhs, gamma, c), b.clone(), rhs));
                    origins.push(Origin::Other);
                }
            }
            Term::App(s, a) if s.as_str() == "stay" && a.len() == 1 => {
                let delta = a[0].as_sym().unwrap();
                for &c in &targets {
                    let mut rhs = w.clone();
                    rhs.push(Item::Tail(triple(x, delta, c)));
                    out.rules.push(Rule::new(triple(r.lhs, gamma, c), b.clone(), rhs));
                    origins.push(Origin::Other);
                }
            }
            Term::App(s, a) if s.as_str() == "push" && a.len() == 2 => {
                let delta = a[0].as_sym().unwrap();
                let inner_f = a[1].clone();
                for &c in &targets {
                    for &e in &h.nonterminals {
                        let mut rhs = w.clone();
                        let call = rhs.len();
                        rhs.push(Item::call(triple(x, delta, e), inner_f.clone()));
                        rhs.push(Item::Tail(triple(e, gamma, c)));
                        out.rules.push(Rule::new(triple(r.lhs, gamma, c), b.clone(), rhs));
                        origins.push(Origin::Push { group: (x, delta, inner_f.clone()), call });
                    }
                }
            }
            other => return Err(pre(C, &h, format!("instruction {other} is not supported"))),
        }
    }
    let mut names = Vec::new();
    for r in &out.rules {
        names.push(r.lhs);
        names.extend(r.calls().filter_map(Item::nonterminal));
    }
    for a in names {
        out.add_nonterminal(a);
    }
    if prune_useless {
        Ok(prune_tracked(&out, &origins))
    } else {
        Ok((out, origins))
    }
}

/// The CF_ext grammar of triples `<A|γ|B>` equivalent to a REG grammar over
/// a pushdown of a storage type. `<A|γ|B>` derives what the automaton
/// outputs from state A with γ on top until that cell is popped in state
/// B; the end marker `~end` stands for finishing with the cell still there.
pub fn to_grammar(g: &Grammar, prune_useless: bool) -> Result<Grammar> {
    Ok(triple_construction(g, prune_useless)?.0)
}

/// Removes trailing `B(id)` calls by substituting the rules of B, following
/// chains of distinct nonterminals. Correct when the transduction is a
/// partial function, which the caller asserts.
pub fn collapse_ext(g: &Grammar) -> Result<Grammar> {
    const CAP: usize = 200_000;
    let g = normalize_cfext(g)?;
    let mut out = g.clone();
    out.class = Class::Cf;
    out.rules.clear();
    let mut seen = HashSet::new();
    for &a in &g.nonterminals {
        let mut stack = vec![(a, vec![a], Vec::<Test<Term>>::new(), Vec::<Item>::new())];
        while let Some((x, visited, tests, body)) = stack.pop() {
            for (_, r) in g.rules_of(x) {
                let mut tests = tests.clone();
                tests.push(r.test.clone());
                let mut body = body.clone();
                match r.rhs.split_last() {
                    Some((Item::Tail(y), init)) => {
                        if visited.contains(y) {
                            continue;
                        }
                        body.extend(init.iter().cloned());
                        let mut v = visited.clone();
                        v.push(*y);
                        stack.push((*y, v, tests, body));
                    }
                    _ => {
                        body.extend(r.rhs.iter().cloned());
                        let test = Test::and(tests);
                        if test == Test::False || unsat(&g.storage, &test) {
                            continue;
                        }
                        let rule = Rule::new(a, test, body);
                        if seen.insert(rule.clone()) {
                            out.rules.push(rule);
                            if out.rules.len() > CAP {
                                return Err(Error::Resource(format!(
                                    "collapsing {} produced more than {CAP} rules",
                                    g.name
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    // deterministic order: by nonterminal, then as found
    let order: HashMap<Symbol, usize> = g.nonterminals.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    out.rules.sort_by_key(|r| order[&r.lhs]);
    Ok(out)
}

fn unsat(s: &StorageType, t: &Test<Term>) -> bool {
    match t.map(&mut |p| s.compile_pred(p)) {
        Ok(c) => crate::grammar::unsatisfiable(&c),
        Err(_) => false,
    }
}

/// Determinizes a deterministic REG grammar over a pushdown of S into a
/// deterministic CF grammar over S with look-ahead: in the triple grammar
/// each push rule guesses the state E in which the pushed cell is popped;
/// the guess is replaced by a look-ahead test on whether the callee
/// `<B|δ|E>(f)` can finish.
pub fn determinize_via_lookahead(g: &Grammar, step_bound: usize) -> Result<Grammar> {
    const C: &str = "look-ahead determinization";
    match is_deterministic(g) {
        Determinism::Yes => {}
        Determinism::No(w) => return Err(pre(C, g, format!("grammar is not deterministic: {w}"))),
        Determinism::UnknownSyntactic => {
            return Err(pre(C, g, "determinism could not be established"));
        }
    }
    let (mut t, origins) = triple_construction(g, true)?;
    let mut entries: IndexMap<Symbol, Grammar> = IndexMap::new();
    let mut groups: IndexMap<(Symbol, Symbol, Term), Vec<Symbol>> = IndexMap::new();
    let base = t.clone();
    for (r, origin) in t.rules.iter_mut().zip(&origins) {
        let Origin::Push { group, call } = origin else { continue };
        let Item::Call(callee, chain) = &r.rhs[*call] else { unreachable!() };
        let mut aux = base.clone();
        let start = aux.fresh().named("start");
        aux.initial = start;
        aux.nonterminals.insert(0, start);
        aux.rules.insert(0, Rule::new(start, Test::True, vec![Item::Call(*callee, chain.clone())]));
        let aux = prune(&aux);
        let key = lookahead_key(&aux);
        entries.entry(key).or_insert_with(|| Grammar { name: key.to_string(), ..aux });
        let members = groups.entry(group.clone()).or_default();
        if !members.contains(&key) {
            members.push(key);
        }
        r.test = Test::and(vec![r.test.clone(), acc(key)]);
    }
    if !entries.is_empty() {
        let entries: Vec<LookaheadEntry> = entries.into_iter().map(|(k, a)| LookaheadEntry::new(k, a)).collect();
        let groups: Vec<Vec<Symbol>> = groups.into_values().filter(|v| v.len() > 1).collect();
        t.storage = StorageType::with_lookahead(&base.storage, entries, groups, step_bound)?;
    }
    let mut out = collapse_ext(&t)?;
    out.name = format!("{}_det", g.name);
    Ok(out)
}

/// Determinizes a CF grammar over a noetherian storage type whose
/// transduction is a partial function: for each nonterminal, the rule
/// applied is the first one from whose right-hand side a derivation
/// succeeds, decided by look-ahead.
pub fn determinize_pf(g: &Grammar, step_bound: usize) -> Result<Grammar> {
    const C: &str = "partial-function determinization";
    const MAX_RULES: usize = 12;
    if !g.storage.is_noetherian() {
        return Err(pre(C, g, format!("storage {} is not noetherian", g.storage)));
    }
    if g.class == Class::Rt {
        return Err(pre(C, g, "tree grammars are not supported"));
    }
    let mut keys = Vec::with_capacity(g.rules.len());
    let mut entries: IndexMap<Symbol, Grammar> = IndexMap::new();
    for r in &g.rules {
        let mut aux = g.clone();
        let start = aux.fresh().named("start");
        aux.initial = start;
        aux.nonterminals.insert(0, start);
        aux.finals.clear();
        aux.rules.insert(0, Rule::new(start, r.test.clone(), r.rhs.clone()));
        let aux = prune(&aux);
        let key = lookahead_key(&aux);
        entries.entry(key).or_insert_with(|| Grammar { name: key.to_string(), ..aux });
        keys.push(key);
    }
    let mut out = g.clone();
    out.name = format!("{}_det", g.name);
    out.rules.clear();
    for &a in &g.nonterminals {
        let rules: Vec<usize> = g.rules_of(a).map(|(i, _)| i).collect();
        let k = rules.len();
        if k > MAX_RULES {
            return Err(Error::Resource(format!("{a} has {k} rules; at most {MAX_RULES} are supported")));
        }
        for signs in 1u32..(1 << k) {
            let first = signs.trailing_zeros() as usize;
            let test = Test::and(
                (0..k)
                    .map(|j| {
                        let t = acc(keys[rules[j]]);
                        if signs & (1 << j) != 0 {
                            t
                        } else {
                            t.negate()
                        }
                    })
                    .collect(),
            );
            out.rules.push(Rule::new(a, test, g.rules[rules[first]].rhs.clone()));
        }
    }
    let entries = entries.into_iter().map(|(k, a)| LookaheadEntry::new(k, a)).collect();
    out.storage = StorageType::with_lookahead(&g.storage, entries, Vec::new(), step_bound)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// acceptance modes

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegMode {
    /// Empty-store acceptance to final-state acceptance.
    DeToDf,
    /// Final-state acceptance to a (possibly nondeterministic) grammar.
    DfToReg,
    /// Final-state acceptance of a prefix-free language to empty-store
    /// acceptance.
    DfPrefixFreeToDe,
}

/// Converts a REG acceptor between acceptance modes. The input and output
/// final states are `Grammar::finals`; empty-store acceptors have none.
pub fn convert_acceptance_reg(
    g: &Grammar,
    mode: RegMode,
    bounds: &crate::engine::Bounds,
) -> Result<Grammar> {
    const C: &str = "REG acceptance conversion";
    if g.class != Class::Reg {
        return Err(pre(C, g, format!("grammar is {}, not REG", g.class)));
    }
    let mut out = g.clone();
    match mode {
        RegMode::DeToDf => {
            let g = if crate::grammar::is_reg_normal(g) { g.clone() } else { normalize_reg(g)? };
            if !is_racceptor_deterministic(&g)? {
                return Err(pre(C, &g, "not a deterministic acceptor"));
            }
            let id = identity(C, &g.storage, &g)?;
            out = g.clone();
            let q = out.fresh().named("Q");
            out.add_nonterminal(q);
            for r in &mut out.rules {
                if r.calls().next().is_none() {
                    r.rhs.push(Item::call(q, id.clone()));
                }
            }
            out.finals = vec![q];
        }
        RegMode::DfToReg => {
            // derivations ending by a call-free rule do not end in a final
            // state, so all such rules go, not only those of final states
            out.rules.retain(|r| r.calls().next().is_some());
            for &a in &g.finals {
                out.rules.push(Rule::new(a, Test::True, Vec::new()));
            }
            out.finals.clear();
        }
        RegMode::DfPrefixFreeToDe => {
            let sample = crate::engine::generate_final_state(g, &g.finals, bounds)?;
            let words: Vec<_> = sample.sorted();
            for (i, u) in words.iter().enumerate() {
                if let Some(v) = words[i + 1..].iter().find(|v| v.starts_with(u)) {
                    return Err(pre(
                        C,
                        g,
                        format!(
                            "language is not prefix-free: {} is a prefix of {}",
                            crate::symbol::show_word(u),
                            crate::symbol::show_word(v)
                        ),
                    ));
                }
            }
            out.rules.retain(|r| !g.finals.contains(&r.lhs));
            for &a in &g.finals {
                out.rules.push(Rule::new(a, Test::True, Vec::new()));
            }
            out.finals.clear();
        }
    }
    Ok(out)
}

/// A ranked alphabet Δ and its marked version Δ#: leaves become unary and
/// the fresh nullary symbol `#` is added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedAlphabet {
    pub base: RankedAlphabet,
    pub mark: Symbol,
}

impl MarkedAlphabet {
    pub fn new(base: RankedAlphabet) -> Result<MarkedAlphabet> {
        let mark = sym("#");
        if base.contains(mark) {
            return Err(Error::invalid("'#' is already in the alphabet"));
        }
        Ok(MarkedAlphabet { base, mark })
    }

    pub fn leaves(&self) -> Vec<Symbol> {
        self.base.of_rank(0)
    }

    pub fn marked(&self) -> RankedAlphabet {
        let mut a = RankedAlphabet::new();
        for (s, k) in self.base.symbols() {
            a.insert(s, k.max(1)).expect("distinct symbols");
        }
        a.insert(self.mark, 0).expect("fresh mark");
        a
    }

    fn terminals(&self, marked: bool) -> IndexMap<Symbol, Option<usize>> {
        let a = if marked { self.marked() } else { self.base.clone() };
        a.symbols().map(|(s, k)| (s, Some(k))).collect()
    }
}

/// Replaces every leaf σ by σ(#).
pub fn mark_tree(t: &Tree, m: &MarkedAlphabet) -> Tree {
    if t.children().is_empty() {
        Tree::new(t.label(), vec![Tree::leaf(m.mark)])
    } else {
        Tree::new(t.label(), t.children().iter().map(|c| mark_tree(c, m)).collect())
    }
}

/// Inverse of `mark_tree`; an error outside its image.
pub fn unmark_tree(t: &Tree, m: &MarkedAlphabet) -> Result<Tree> {
    let not_marked = || Error::invalid(format!("{t} is not a marked tree"));
    match (m.base.rank(t.label()), t.children()) {
        (Some(0), [c]) if c.label() == m.mark && c.children().is_empty() => Ok(Tree::leaf(t.label())),
        (Some(k), kids) if k >= 1 && kids.len() == k => Ok(Tree::new(
            t.label(),
            kids.iter().map(|c| unmark_tree(c, m)).collect::<Result<_>>()?,
        )),
        _ => Err(not_marked()),
    }
}

/// Marks every tree of a sample. Marking never shrinks a tree, so the
/// completeness bound carries over.
pub fn mark_language(s: &LanguageSample<Tree>, m: &MarkedAlphabet) -> LanguageSample<Tree> {
    LanguageSample {
        items: s.items.iter().map(|t| mark_tree(t, m)).collect(),
        complete_up_to: s.complete_up_to,
        bounds: s.bounds,
        all_inputs: s.all_inputs,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RtMode {
    /// Acceptor of L over Δ to an acceptor of mark(L) over Δ#.
    DeToDf,
    /// Acceptor of mark(L) over Δ# to a grammar of L over Δ.
    DfToRt,
    /// Acceptor of mark(L) over Δ# to an acceptor of L over Δ with
    /// look-ahead.
    DfToDeLa,
}

/// Converts tree acceptors between plain and marked tree languages. For
/// `DeToDf` the base alphabet is the grammar's own; otherwise `base` is Δ
/// and the grammar is over Δ#.
pub fn convert_acceptance_rt(
    g: &Grammar,
    mode: RtMode,
    base: &RankedAlphabet,
    step_bound: usize,
) -> Result<Grammar> {
    const C: &str = "RT acceptance conversion";
    if g.class != Class::Rt {
        return Err(pre(C, g, format!("grammar is {}, not RT", g.class)));
    }
    let g = if is_rt_normal(g) { g.clone() } else { normalize_rt(g)? };
    let m = MarkedAlphabet::new(base.clone())?;
    let leaves = m.leaves();
    let mut out = g.clone();
    out.rules.clear();
    let mut fresh = g.fresh();
    match mode {
        RtMode::DeToDf => {
            let id = identity(C, &g.storage, &g)?;
            let q = fresh.named("Q");
            out.add_nonterminal(q);
            for r in &g.rules {
                let mut r = r.clone();
                if let [Item::T(s)] = r.rhs.as_slice() {
                    if leaves.contains(s) {
                        r.rhs.push(Item::call(q, id.clone()));
                    }
                }
                out.rules.push(r);
            }
            out.rules.push(Rule::new(q, Test::True, vec![Item::T(m.mark)]));
            out.terminals = m.terminals(true);
        }
        RtMode::DfToRt => {
            let mut split: IndexMap<(Symbol, Symbol), Symbol> = IndexMap::new();
            let mut named = |b: Symbol, s: Symbol, out: &mut Grammar| {
                *split.entry((b, s)).or_insert_with(|| {
                    let x = fresh.named(&format!("{b}_{s}"));
                    out.add_nonterminal(x);
                    x
                })
            };
            for r in &g.rules {
                match r.rhs.as_slice() {
                    [Item::T(s), Item::Call(b, f)] if leaves.contains(s) => {
                        let x = named(*b, *s, &mut out);
                        out.rules.push(Rule::new(r.lhs, r.test.clone(), vec![Item::Call(x, f.clone())]));
                    }
                    [Item::Call(b, f)] => {
                        out.rules.push(r.clone());
                        for &s in &leaves {
                            let x = named(r.lhs, s, &mut out);
                            let y = named(*b, s, &mut out);
                            out.rules.push(Rule::new(x, r.test.clone(), vec![Item::Call(y, f.clone())]));
                        }
                    }
                    [Item::T(s)] if *s == m.mark => {
                        for &l in &leaves {
                            let x = named(r.lhs, l, &mut out);
                            out.rules.push(Rule::new(x, r.test.clone(), vec![Item::T(l)]));
                        }
                    }
                    _ => out.rules.push(r.clone()),
                }
            }
            out.terminals = m.terminals(false);
        }
        RtMode::DfToDeLa => {
            let mut entries: IndexMap<Symbol, Grammar> = IndexMap::new();
            for r in &g.rules {
                match r.rhs.as_slice() {
                    [Item::T(s)] if *s == m.mark => {}
                    [Item::T(s), Item::Call(b, f)] if leaves.contains(s) => {
                        let mut aux = g.clone();
                        let start = aux.fresh().named("start");
                        aux.initial = start;
                        aux.nonterminals.insert(0, start);
                        aux.rules.insert(0, Rule::new(start, Test::True, vec![Item::Call(*b, f.clone())]));
                        let aux = prune(&aux);
                        let key = lookahead_key(&aux);
                        entries.entry(key).or_insert_with(|| Grammar { name: key.to_string(), ..aux });
                        out.rules.push(Rule::new(
                            r.lhs,
                            Test::and(vec![r.test.clone(), acc(key)]),
                            vec![Item::T(*s)],
                        ));
                    }
                    _ => out.rules.push(r.clone()),
                }
            }
            if !entries.is_empty() {
                let entries = entries.into_iter().map(|(k, a)| LookaheadEntry::new(k, a)).collect();
                out.storage = StorageType::with_lookahead(&g.storage, entries, Vec::new(), step_bound)?;
            }
            out.terminals = m.terminals(false);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// derivation trees, yields and paths

/// A tree acceptor for the derivation trees of a CF grammar: an inner node
/// is labelled by the rule applied, with one child per rhs item; a λ-rule
/// gets one child `eps`. The yield of a derivation tree is the string
/// derived.
pub fn derivation_tree_acceptor(g: &Grammar) -> Result<Grammar> {
    const C: &str = "derivation-tree acceptor";
    if g.class != Class::Cf && g.class != Class::Reg {
        return Err(pre(C, g, format!("grammar is {}, not CF", g.class)));
    }
    let storage = StorageType::with_identity(&g.storage);
    let id = storage.identity().expect("identity added");
    let mut fresh = g.fresh();
    let eps = sym("eps");
    fresh.reserve(eps);
    let mut out = Grammar::new(&format!("{}_dt", g.name), storage, Class::Rt, g.initial, g.encoding.clone());
    out.nonterminals = g.nonterminals.clone();
    let mut leaf_nt: IndexMap<Symbol, Symbol> = IndexMap::new();
    let mut leaf = |s: Symbol, fresh: &mut Fresh| *leaf_nt.entry(s).or_insert_with(|| fresh.named(&format!("leaf_{s}")));
    let mut rule_syms = Vec::new();
    for i in 0..g.rules.len() {
        rule_syms.push(fresh.named(&format!("r{i}")));
    }
    for (i, r) in g.rules.iter().enumerate() {
        let mut rhs = vec![Item::T(rule_syms[i])];
        if r.rhs.is_empty() {
            rhs.push(Item::call(leaf(eps, &mut fresh), id.clone()));
        }
        for it in &r.rhs {
            match it {
                Item::T(s) => rhs.push(Item::call(leaf(*s, &mut fresh), id.clone())),
                Item::Call(..) => rhs.push(it.clone()),
                Item::Tail(_) => return Err(pre(C, g, "extended rules are not supported")),
            }
        }
        out.add_terminal(rule_syms[i], Some(rhs.len() - 1));
        out.rules.push(Rule::new(r.lhs, r.test.clone(), rhs));
    }
    for (s, a) in leaf_nt {
        out.add_nonterminal(a);
        out.add_terminal(s, Some(0));
        out.rules.push(Rule::new(a, Test::True, vec![Item::T(s)]));
    }
    Ok(out)
}

/// Replaces every tree right-hand side by its yield (`eps` leaves omitted).
pub fn yield_grammar(g: &Grammar) -> Result<Grammar> {
    if g.class != Class::Rt {
        return Err(pre("yield grammar", g, format!("grammar is {}, not RT", g.class)));
    }
    let eps = sym("eps");
    let mut out = g.clone();
    out.name = format!("{}_yield", g.name);
    out.class = Class::Cf;
    out.terminals = g
        .terminals
        .iter()
        .filter(|(s, k)| **k == Some(0) && **s != eps)
        .map(|(s, _)| (*s, None))
        .collect();
    for r in &mut out.rules {
        r.rhs.retain(|it| match it {
            Item::T(s) => g.rank(*s) == Some(0) && *s != eps,
            _ => true,
        });
    }
    Ok(out)
}

/// Path alphabet of a ranked alphabet: `σ.i` for each inner symbol and
/// direction, and the leaves themselves.
pub fn path_alphabet(a: &RankedAlphabet) -> Vec<Symbol> {
    let mut out = Vec::new();
    for (s, k) in a.symbols() {
        if k == 0 {
            out.push(s);
        } else {
            out.extend((1..=k).map(|i| path_symbol(s, i)));
        }
    }
    out
}

/// A REG acceptor running a tree acceptor over Δ# along single paths. The
/// paths it accepts are those of the unmarked trees, so the tree language
/// built from them is the original one (but the path language is in
/// general larger than the paths of those trees).
pub fn path_acceptor(g: &Grammar, base: &RankedAlphabet) -> Result<Grammar> {
    const C: &str = "path acceptor";
    if g.class != Class::Rt {
        return Err(pre(C, g, format!("grammar is {}, not RT", g.class)));
    }
    let g = if is_rt_normal(g) { g.clone() } else { normalize_rt(g)? };
    let m = MarkedAlphabet::new(base.clone())?;
    let leaves = m.leaves();
    let mut fresh = g.fresh();
    let bars: IndexMap<Symbol, Symbol> =
        g.nonterminals.iter().map(|&a| (a, fresh.named(&format!("{a}_bar")))).collect();
    let mut out = g.clone();
    out.name = format!("{}_paths", g.name);
    out.class = Class::Reg;
    out.nonterminals.extend(bars.values().copied());
    out.terminals = path_alphabet(base).into_iter().map(|s| (s, None)).collect();
    out.rules.clear();
    for r in &g.rules {
        match r.rhs.as_slice() {
            [Item::T(s), Item::Call(b, f)] if leaves.contains(s) => {
                out.rules.push(Rule::new(r.lhs, r.test.clone(), vec![Item::T(*s), Item::Call(bars[b], f.clone())]));
            }
            [Item::T(s)] if *s == m.mark => {
                out.rules.push(Rule::new(bars[&r.lhs], r.test.clone(), Vec::new()));
            }
            [Item::Call(b, f)] => {
                out.rules.push(r.clone());
                out.rules.push(Rule::new(bars[&r.lhs], r.test.clone(), vec![Item::Call(bars[b], f.clone())]));
            }
            [Item::T(s), kids @ ..] => {
                for (i, k) in kids.iter().enumerate() {
                    out.rules.push(Rule::new(r.lhs, r.test.clone(), vec![Item::T(path_symbol(*s, i + 1)), k.clone()]));
                }
            }
            _ => return Err(pre(C, &g, "rule is not in tree normal form")),
        }
    }
    Ok(out)
}

/// A tree acceptor over Δ# for the marked trees all of whose paths are
/// accepted (by final state) by a deterministic REG acceptor over the path
/// alphabet of Δ.
pub fn tree_acceptor_from_paths(g: &Grammar, base: &RankedAlphabet) -> Result<Grammar> {
    const C: &str = "tree acceptor from paths";
    if g.class != Class::Reg {
        return Err(pre(C, g, format!("grammar is {}, not REG", g.class)));
    }
    let g = if crate::grammar::is_reg_normal(g) { g.clone() } else { normalize_reg(g)? };
    let m = MarkedAlphabet::new(base.clone())?;
    let leaves = m.leaves();
    let id = identity(C, &g.storage, &g)?;
    // restrict to paths of the form (inner)* leaf: second copy after a leaf,
    // and make the final states end the derivation
    let mut fresh = g.fresh();
    let after: IndexMap<Symbol, Symbol> =
        g.nonterminals.iter().map(|&a| (a, fresh.named(&format!("{a}_leaf")))).collect();
    let mut p = g.clone();
    p.finals.clear();
    p.nonterminals.extend(after.values().copied());
    p.rules.clear();
    for r in &g.rules {
        match r.rhs.as_slice() {
            [Item::T(s), Item::Call(b, f)] => {
                let target = if leaves.contains(s) { after[b] } else { *b };
                p.rules.push(Rule::new(r.lhs, r.test.clone(), vec![Item::T(*s), Item::Call(target, f.clone())]));
            }
            [Item::Call(b, f)] => {
                p.rules.push(r.clone());
                if !g.finals.contains(&r.lhs) {
                    p.rules.push(Rule::new(after[&r.lhs], r.test.clone(), vec![Item::Call(after[b], f.clone())]));
                }
            }
            _ => {}
        }
    }
    for &a in &g.finals {
        p.rules.push(Rule::new(after[&a], Test::True, Vec::new()));
    }
    // one tree rule per symbol and choice of path rules for its directions
    let mut out = p.clone();
    out.name = format!("{}_trees", g.name);
    out.class = Class::Rt;
    out.terminals = m.terminals(true);
    out.rules.clear();
    let q = fresh.named("Q");
    let mut uses_q = false;
    for &a in &p.nonterminals {
        let own: Vec<&Rule> = p.rules_of(a).map(|(_, r)| r).collect();
        for r in &own {
            match r.rhs.as_slice() {
                [] => out.rules.push(Rule::new(a, r.test.clone(), vec![Item::T(m.mark)])),
                [Item::Call(..)] => out.rules.push((*r).clone()),
                [Item::T(s), Item::Call(b, f)] if leaves.contains(s) => {
                    out.rules.push(Rule::new(a, r.test.clone(), vec![Item::T(*s), Item::Call(*b, f.clone())]));
                }
                [Item::T(s)] if leaves.contains(s) => {
                    uses_q = true;
                    out.rules.push(Rule::new(a, r.test.clone(), vec![Item::T(*s), Item::call(q, id.clone())]));
                }
                _ => {}
            }
        }
        for (s, k) in base.symbols().filter(|(_, k)| *k >= 1) {
            let per_dir: Vec<Vec<&Rule>> = (1..=k)
                .map(|i| {
                    let ps = path_symbol(s, i);
                    own.iter()
                        .copied()
                        .filter(|r| matches!(r.rhs.as_slice(), [Item::T(t), Item::Call(..)] if *t == ps))
                        .collect()
                })
                .collect();
            if per_dir.iter().any(Vec::is_empty) {
                continue;
            }
            let mut choice = vec![0usize; k];
            loop {
                let picked: Vec<&Rule> = (0..k).map(|i| per_dir[i][choice[i]]).collect();
                let test = Test::and(picked.iter().map(|r| r.test.clone()).collect());
                if test != Test::False && !unsat(&p.storage, &test) {
                    let mut rhs = vec![Item::T(s)];
                    rhs.extend(picked.iter().map(|r| r.rhs[1].clone()));
                    out.rules.push(Rule::new(a, test, rhs));
                }
                let mut i = 0;
                while i < k {
                    choice[i] += 1;
                    if choice[i] < per_dir[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
        }
    }
    if uses_q {
        out.add_nonterminal(q);
        out.rules.push(Rule::new(q, Test::True, vec![Item::T(m.mark)]));
    }
    Ok(out)
}
