//! Path languages of trees and the delta operation: the trees all of whose
//! root-to-leaf paths lie in a string language, and their yields.
//!
//! Trees are built top-down. Each frontier node carries the state of a path
//! oracle after reading the path to it; a symbol is placed only if every
//! direction leaves a live state, and a leaf only if the finished path is
//! in the language.

use crate::engine::{Bounds, Compiled, FItem, LanguageSample};
use crate::error::{Error, Result};
use crate::grammar::{Class, Grammar, Item, Rule};
use crate::seq::Seq;
use crate::storage::{Kind, StorageType};
use crate::symbol::{sym, Fresh, Symbol, Word};
use crate::term::{Term, Test};
use crate::tree::{path_symbol, RankedAlphabet, Tree};
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::rc::Rc;

pub use crate::constructions::path_alphabet;

/// Root-to-leaf path codes of a tree.
pub fn paths(t: &Tree) -> BTreeSet<Word> {
    t.paths().into_iter().collect()
}

/// Where the path language comes from.
#[derive(Clone, Debug)]
pub enum PathSource {
    Finite(BTreeSet<Word>),
    /// A grammar over the path alphabet. Acceptance is by final state when
    /// the grammar declares final states, else by empty store.
    Grammar(Grammar),
}

#[derive(Clone, Debug)]
pub struct DeltaSpec {
    pub alphabet: RankedAlphabet,
    pub source: PathSource,
    /// Largest tree size enumerated.
    pub size_bound: usize,
    /// Limits for the grammar oracle (`max_forms`, `max_steps`).
    pub bounds: Bounds,
}

impl DeltaSpec {
    pub fn finite(alphabet: RankedAlphabet, words: impl IntoIterator<Item = Word>, size_bound: usize) -> DeltaSpec {
        DeltaSpec {
            alphabet,
            source: PathSource::Finite(words.into_iter().collect()),
            size_bound,
            bounds: Bounds::default(),
        }
    }

    pub fn grammar(alphabet: RankedAlphabet, g: Grammar, size_bound: usize) -> DeltaSpec {
        DeltaSpec { alphabet, source: PathSource::Grammar(g), size_bound, bounds: Bounds::default() }
    }
}

/// Incremental membership for a string language. States are small
/// integers handed out by the oracle.
trait PathOracle {
    fn start(&mut self, budget: usize) -> Result<Option<usize>>;
    /// State after reading `a`, when at most `budget` more symbols will be
    /// read; `None` if no word of the language continues this way.
    fn step(&mut self, s: usize, a: Symbol, budget: usize) -> Result<Option<usize>>;
    fn accepts(&self, s: usize) -> bool;

    fn member(&mut self, w: &[Symbol]) -> Result<bool> {
        let Some(mut s) = self.start(w.len())? else { return Ok(false) };
        for (i, a) in w.iter().enumerate() {
            match self.step(s, *a, w.len() - i - 1)? {
                Some(t) => s = t,
                None => return Ok(false),
            }
        }
        Ok(self.accepts(s))
    }
}

/// A finite language as a trie.
struct Trie {
    nodes: Vec<(HashMap<Symbol, usize>, bool)>,
}

impl Trie {
    fn new(words: &BTreeSet<Word>) -> Trie {
        let mut t = Trie { nodes: vec![(HashMap::new(), false)] };
        for w in words {
            let mut n = 0;
            for a in w {
                n = match t.nodes[n].0.get(a) {
                    Some(&m) => m,
                    None => {
                        t.nodes.push((HashMap::new(), false));
                        let m = t.nodes.len() - 1;
                        t.nodes[n].0.insert(*a, m);
                        m
                    }
                };
            }
            t.nodes[n].1 = true;
        }
        t
    }
}

impl PathOracle for Trie {
    fn start(&mut self, _: usize) -> Result<Option<usize>> {
        Ok((self.nodes[0].1 || !self.nodes[0].0.is_empty()).then_some(0))
    }

    fn step(&mut self, s: usize, a: Symbol, _: usize) -> Result<Option<usize>> {
        Ok(self.nodes[s].0.get(&a).copied())
    }

    fn accepts(&self, s: usize) -> bool {
        self.nodes[s].1
    }
}

/// A grammar language. A state is the set of remainders of leftmost
/// sentential forms after the prefix read so far, expanded until their
/// head is a terminal; remainders with more terminals than can still be
/// read are dropped. The result is exact unless a limit is hit, which is
/// an error.
struct GrammarOracle {
    compiled: Compiled,
    finals: Option<HashSet<u32>>,
    start: Config0,
    bounds: Bounds,
    states: Vec<(Vec<Seq<FItem>>, bool)>,
    index: HashMap<(Vec<Seq<FItem>>, bool), usize>,
    steps: HashMap<(usize, Symbol, usize), Option<usize>>,
}

type Config0 = crate::storage::Config;

fn terminal_count(r: &Seq<FItem>) -> usize {
    r.iter().filter(|i| matches!(i, FItem::T(_))).count()
}

impl GrammarOracle {
    fn new(g: &Grammar, bounds: &Bounds) -> Result<GrammarOracle> {
        let compiled = Compiled::new(g)?;
        let enc = g.storage.compile_enc(&g.encoding)?;
        if !enc.is_unit() {
            return Err(Error::precondition(
                "path language",
                format!("encoding {} takes more than one input", g.encoding),
            )
            .at(&g.name, None));
        }
        let start = compiled
            .encode(&crate::storage::Input::Unit)
            .ok_or_else(|| Error::invalid("encoding is undefined"))?;
        let finals = (!g.finals.is_empty())
            .then(|| g.finals.iter().filter_map(|f| compiled.nt_index(*f)).collect());
        Ok(GrammarOracle {
            compiled,
            finals,
            start,
            bounds: *bounds,
            states: Vec::new(),
            index: HashMap::new(),
            steps: HashMap::new(),
        })
    }

    fn close(&self, seeds: Vec<Seq<FItem>>, budget: usize) -> Result<(Vec<Seq<FItem>>, bool)> {
        let mut seen: HashSet<Seq<FItem>> = HashSet::new();
        let mut queue = VecDeque::new();
        for s in seeds {
            if terminal_count(&s) <= budget && seen.insert(s.clone()) {
                queue.push_back((s, 0usize));
            }
        }
        let mut heads = Vec::new();
        let mut accept = false;
        while let Some((r, depth)) = queue.pop_front() {
            match r.first() {
                None => accept |= self.finals.is_none(),
                Some(FItem::T(_)) => heads.push(r.clone()),
                Some(FItem::N(a, _)) => {
                    if let Some(fs) = &self.finals {
                        accept |= r.len() == 1 && fs.contains(a);
                    }
                    if depth >= self.bounds.max_steps {
                        return Err(Error::Resource(format!(
                            "path oracle: more than {} steps without reading a symbol",
                            self.bounds.max_steps
                        )));
                    }
                    for (_, next, _) in self.compiled.expand(&r, true, true)? {
                        if terminal_count(&next) <= budget && seen.insert(next.clone()) {
                            if seen.len() > self.bounds.max_forms {
                                return Err(Error::Resource(format!(
                                    "path oracle: more than {} sentential forms",
                                    self.bounds.max_forms
                                )));
                            }
                            queue.push_back((next, depth + 1));
                        }
                    }
                }
            }
        }
        heads.sort();
        Ok((heads, accept))
    }

    fn intern(&mut self, st: (Vec<Seq<FItem>>, bool)) -> Option<usize> {
        if st.0.is_empty() && !st.1 {
            return None;
        }
        if let Some(&i) = self.index.get(&st) {
            return Some(i);
        }
        self.states.push(st.clone());
        self.index.insert(st, self.states.len() - 1);
        Some(self.states.len() - 1)
    }
}

impl PathOracle for GrammarOracle {
    fn start(&mut self, budget: usize) -> Result<Option<usize>> {
        let seed = Seq::empty().push(FItem::N(self.compiled.initial, self.start.clone()));
        let st = self.close(vec![seed], budget)?;
        Ok(self.intern(st))
    }

    fn step(&mut self, s: usize, a: Symbol, budget: usize) -> Result<Option<usize>> {
        if let Some(&r) = self.steps.get(&(s, a, budget)) {
            return Ok(r);
        }
        let seeds: Vec<Seq<FItem>> = self.states[s]
            .0
            .iter()
            .filter(|r| r.first() == Some(&FItem::T(a)))
            .map(|r| r.rest().cloned().unwrap_or_default())
            .collect();
        let st = self.close(seeds, budget)?;
        let r = self.intern(st);
        self.steps.insert((s, a, budget), r);
        Ok(r)
    }

    fn accepts(&self, s: usize) -> bool {
        self.states[s].1
    }
}

fn oracle(spec: &DeltaSpec) -> Result<Box<dyn PathOracle>> {
    Ok(match &spec.source {
        PathSource::Finite(words) => Box::new(Trie::new(words)),
        PathSource::Grammar(g) => Box::new(GrammarOracle::new(g, &spec.bounds)?),
    })
}

struct Builder<'a> {
    oracle: Box<dyn PathOracle>,
    alphabet: &'a RankedAlphabet,
    memo: HashMap<(usize, usize), Rc<Vec<Tree>>>,
}

impl Builder<'_> {
    /// Trees of exactly `size` nodes whose paths, read from state `s`, all
    /// end in the language.
    fn trees(&mut self, s: usize, size: usize) -> Result<Rc<Vec<Tree>>> {
        if let Some(v) = self.memo.get(&(s, size)) {
            return Ok(v.clone());
        }
        let mut out = Vec::new();
        let symbols: Vec<(Symbol, usize)> = self.alphabet.symbols().collect();
        for (sigma, k) in symbols {
            if k == 0 {
                if size == 1 {
                    if let Some(t) = self.oracle.step(s, sigma, 0)? {
                        if self.oracle.accepts(t) {
                            out.push(Tree::leaf(sigma));
                        }
                    }
                }
                continue;
            }
            if size < k + 1 {
                continue;
            }
            let budget = size - k;
            let mut kids = Vec::with_capacity(k);
            for i in 1..=k {
                match self.oracle.step(s, path_symbol(sigma, i), budget)? {
                    Some(t) => kids.push(t),
                    None => break,
                }
            }
            if kids.len() < k {
                continue;
            }
            self.forests(&kids, size - 1, &mut Vec::new(), &mut |children| {
                out.push(Tree::new(sigma, children.to_vec()))
            })?;
        }
        let v = Rc::new(out);
        self.memo.insert((s, size), v.clone());
        Ok(v)
    }

    fn forests(
        &mut self,
        states: &[usize],
        total: usize,
        prefix: &mut Vec<Tree>,
        emit: &mut dyn FnMut(&[Tree]),
    ) -> Result<()> {
        let Some((&s, rest)) = states.split_first() else {
            if total == 0 {
                emit(prefix);
            }
            return Ok(());
        };
        if total < states.len() {
            return Ok(());
        }
        for first in 1..=total - rest.len() {
            let ts = self.trees(s, first)?;
            for t in ts.iter() {
                prefix.push(t.clone());
                self.forests(rest, total - first, prefix, emit)?;
                prefix.pop();
            }
        }
        Ok(())
    }
}

/// All trees of size at most `size_bound` all of whose paths lie in the
/// language.
pub fn tree_delta(spec: &DeltaSpec) -> Result<LanguageSample<Tree>> {
    if spec.size_bound == 0 {
        return Err(Error::invalid("size bound must be positive"));
    }
    let mut b = Builder { oracle: oracle(spec)?, alphabet: &spec.alphabet, memo: HashMap::new() };
    let mut items = BTreeSet::new();
    if let Some(s0) = b.oracle.start(spec.size_bound)? {
        for n in 1..=spec.size_bound {
            items.extend(b.trees(s0, n)?.iter().cloned());
        }
    }
    Ok(LanguageSample {
        items,
        complete_up_to: Some(spec.size_bound),
        bounds: Bounds { max_len: spec.size_bound, ..spec.bounds },
        all_inputs: true,
    })
}

/// Yields of `tree_delta` (with `eps` leaves omitted). Not certified by
/// length, since a short yield may need a large tree.
pub fn delta(spec: &DeltaSpec) -> Result<LanguageSample<Word>> {
    let trees = tree_delta(spec)?;
    Ok(LanguageSample {
        items: trees.items.iter().map(crate::engine::tree_yield).collect(),
        complete_up_to: None,
        bounds: trees.bounds,
        all_inputs: true,
    })
}

/// Whether a word is in the path language described by `spec`.
pub fn path_member(spec: &DeltaSpec, w: &[Symbol]) -> Result<bool> {
    oracle(spec)?.member(w)
}

#[derive(Clone, Debug, Default)]
pub struct ContinuityReport {
    /// Each word of the delta sample with a finite subset of the language
    /// whose delta already contains it.
    pub witnesses: Vec<(Word, BTreeSet<Word>)>,
    /// Words for which the check failed.
    pub violations: Vec<Word>,
}

/// Checks on the bounded sample that every word of the delta comes from a
/// finite part of the language: the paths of a smallest tree yielding it.
pub fn continuity_check(spec: &DeltaSpec) -> Result<ContinuityReport> {
    let trees = tree_delta(spec)?;
    let mut smallest: HashMap<Word, Tree> = HashMap::new();
    for t in &trees.items {
        let w = crate::engine::tree_yield(t);
        match smallest.get(&w) {
            Some(u) if u.size() <= t.size() => {}
            _ => {
                smallest.insert(w, t.clone());
            }
        }
    }
    let mut words: Vec<Word> = smallest.keys().cloned().collect();
    words.sort_by(|a, b| crate::symbol::length_lex(a, b));
    let mut full = oracle(spec)?;
    let mut report = ContinuityReport::default();
    for w in words {
        let f = paths(&smallest[&w]);
        let mut inside = true;
        for p in &f {
            inside &= full.member(p)?;
        }
        let sub = DeltaSpec { source: PathSource::Finite(f.clone()), ..spec.clone() };
        if inside && delta(&sub)?.items.contains(&w) {
            report.witnesses.push((w, f));
        } else {
            report.violations.push(w);
        }
    }
    Ok(report)
}

fn linear(g: &Grammar, which: &str) -> Result<()> {
    const C: &str = "delta witness";
    if !matches!(g.class, Class::Cf | Class::Reg) {
        return Err(Error::precondition(C, format!("{which} is {}, not CF", g.class)).at(&g.name, None));
    }
    if !matches!(g.storage.kind(), Kind::Trivial) {
        return Err(Error::precondition(C, format!("{which} is over {}, not s0", g.storage)).at(&g.name, None));
    }
    for (i, r) in g.rules.iter().enumerate() {
        if r.calls().count() > 1 {
            return Err(Error::precondition(C, format!("{which} is not linear")).at(&g.name, Some(i)));
        }
    }
    Ok(())
}

/// For linear grammars L and M over Σ and a homomorphism h, a linear
/// grammar K over a path alphabet with δ_Δ(K) = h(L ∩ M). A tree of
/// tree_Δ(K) is a spine spelling a word of Σ* that ends in `$`; the paths
/// along the spine ending left and right of `$` must lie in L and M, and
/// each spine node carries a handle spelling the image of its letter.
///
/// Returns K and Δ. Symbols of Σ that clash with Ω or the auxiliary symbols
/// are renamed in Δ.
pub fn re_witness(l: &Grammar, m: &Grammar, h: &[(Symbol, Word)]) -> Result<(Grammar, RankedAlphabet)> {
    const C: &str = "delta witness";
    linear(l, "L")?;
    linear(m, "M")?;
    let image: HashMap<Symbol, &Word> = h.iter().map(|(a, w)| (*a, w)).collect();
    let mut sigma: Vec<Symbol> = Vec::new();
    for g in [l, m] {
        for t in g.terminals.keys() {
            if !sigma.contains(t) {
                sigma.push(*t);
            }
        }
    }
    for a in &sigma {
        if !image.contains_key(a) {
            return Err(Error::precondition(C, format!("homomorphism undefined on {a}")));
        }
    }
    for (a, _) in h {
        if !sigma.contains(a) {
            sigma.push(*a);
        }
    }
    let eps = sym("eps");
    let dollar = sym("$");
    let m_rank = h.iter().map(|(_, w)| w.len()).max().unwrap_or(0).max(2);
    let hash = |k: usize| sym(&format!("#{k}"));
    let mut omega: Vec<Symbol> = Vec::new();
    for (_, w) in h {
        for b in w {
            if !omega.contains(b) {
                omega.push(*b);
            }
        }
    }
    let mut reserved: Vec<Symbol> = omega.clone();
    reserved.extend([eps, dollar]);
    reserved.extend((1..=m_rank).map(hash));
    let mut fresh = Fresh::new(reserved.iter().copied().chain(sigma.iter().copied()));
    let spine: HashMap<Symbol, Symbol> = sigma
        .iter()
        .map(|&a| (a, if reserved.contains(&a) { fresh.numbered(a.as_str()) } else { a }))
        .collect();
    let mut delta = RankedAlphabet::new();
    for &b in &omega {
        delta.insert(b, 0)?;
    }
    delta.insert(eps, 0)?;
    delta.insert(hash(1), 1)?;
    for a in &sigma {
        delta.insert(spine[a], 2)?;
    }
    delta.insert(dollar, 2)?;
    for k in 2..=m_rank {
        delta.insert(hash(k), k)?;
    }

    let mut names = Fresh::new(std::iter::empty());
    let k0 = names.named("K");
    let r0 = names.named("R");
    let id = Term::sym("id");
    let mut out = Grammar::new("witness", StorageType::trivial(), Class::Cf, k0, Term::sym("en"));
    out.add_nonterminal(r0);
    for p in path_alphabet(&delta) {
        out.add_terminal(p, None);
    }
    for (g, side) in [(l, 1usize), (m, 2usize)] {
        let prefix = if side == 1 { "L" } else { "M" };
        let rename: HashMap<Symbol, Symbol> = g
            .nonterminals
            .iter()
            .map(|&a| (a, names.named(&format!("{prefix}.{a}"))))
            .collect();
        for &a in &g.nonterminals {
            out.add_nonterminal(rename[&a]);
        }
        for r in &g.rules {
            let rhs = r
                .rhs
                .iter()
                .map(|it| match it {
                    Item::T(a) => Item::T(path_symbol(spine[a], 2)),
                    Item::Call(b, _) | Item::Tail(b) => Item::call(rename[b], id.clone()),
                })
                .collect();
            out.rules.push(Rule::new(rename[&r.lhs], Test::True, rhs));
        }
        out.rules.push(Rule::new(
            k0,
            Test::True,
            vec![Item::call(rename[&g.initial], id.clone()), Item::T(path_symbol(dollar, side)), Item::T(eps)],
        ));
    }
    out.rules.push(Rule::new(k0, Test::True, vec![Item::call(r0, id.clone())]));
    for a in &sigma {
        out.rules.push(Rule::new(
            r0,
            Test::True,
            vec![Item::T(path_symbol(spine[a], 2)), Item::call(r0, id.clone())],
        ));
    }
    for a in &sigma {
        let head = path_symbol(spine[a], 1);
        let w = image[a];
        if w.is_empty() {
            out.rules.push(Rule::new(r0, Test::True, vec![Item::T(head), Item::T(path_symbol(hash(1), 1)), Item::T(eps)]));
        }
        for (i, b) in w.iter().enumerate() {
            out.rules.push(Rule::new(
                r0,
                Test::True,
                vec![Item::T(head), Item::T(path_symbol(hash(w.len()), i + 1)), Item::T(*b)],
            ));
        }
    }
    out.rules.dedup();
    Ok((out, delta))
}
