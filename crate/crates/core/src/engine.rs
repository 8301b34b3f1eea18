//! Derivations: bounded language generation, transduction, d-acceptance,
//! final-state acceptance, traces and single derivation steps.
//!
//! Searches explore leftmost derivations breadth first with a global visited
//! set. A sentential form is kept as the terminals already produced plus the
//! remainder starting at the leftmost nonterminal. Since terminals never
//! disappear, forms with more than `max_len` terminals are pruned. Forms cut
//! off by the step bound limit the length up to which the sample is
//! complete.

use crate::error::{Error, Result};
use crate::grammar::{is_racceptor_deterministic, Class, Grammar, Item};
use crate::seq::Seq;
use crate::storage::{apply, encode, eval_test, Config, Enc, Input, Instr, Pred};
use crate::symbol::{Symbol, Word};
use crate::term::Test;
use crate::tree::Tree;
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Maximum derivation length.
    pub max_steps: usize,
    /// Maximum output length (tree size for tree grammars).
    pub max_len: usize,
    /// Maximum number of distinct sentential forms per search.
    pub max_forms: usize,
    /// Largest input element (number, string length or tree size) tried
    /// when generating over all inputs.
    pub max_input: usize,
    /// Worker threads used when generating over several inputs.
    pub jobs: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_steps: 200, max_len: 16, max_forms: 2_000_000, max_input: 8, jobs: 1 }
    }
}

impl Bounds {
    pub fn with_len(max_len: usize) -> Bounds {
        Bounds { max_len, ..Bounds::default() }
    }
}

/// A finite sample of a language with a certificate: every item of size at
/// most `complete_up_to` that is derivable from the inputs tried is present.
#[derive(Clone, Debug)]
pub struct LanguageSample<T: Ord> {
    pub items: BTreeSet<T>,
    /// `None` when not even the empty output is certified.
    pub complete_up_to: Option<usize>,
    pub bounds: Bounds,
    /// True when every input element was tried (the input set is finite
    /// and small enough); otherwise only inputs up to `max_input`.
    pub all_inputs: bool,
}

impl<T: Ord + Clone> LanguageSample<T> {
    /// Items whose size is at most `n`.
    pub fn up_to(&self, n: usize, size: impl Fn(&T) -> usize) -> BTreeSet<T> {
        self.items.iter().filter(|x| size(x) <= n).cloned().collect()
    }
}

impl LanguageSample<Word> {
    /// Items in length-lexicographic order.
    pub fn sorted(&self) -> Vec<Word> {
        let mut v: Vec<Word> = self.items.iter().cloned().collect();
        v.sort_by(|a, b| crate::symbol::length_lex(a, b));
        v
    }

    pub fn words_up_to(&self, n: usize) -> BTreeSet<Word> {
        self.up_to(n, |w| w.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AcceptResult {
    Accepted,
    /// The whole search space was explored within the bounds.
    RejectedWithinBounds,
    /// A bound was hit before a terminal derivation was found.
    Exhausted,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FormItem {
    T(Symbol),
    N(Symbol, Config),
}

impl fmt::Display for FormItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormItem::T(t) => write!(f, "{t}"),
            FormItem::N(a, c) => write!(f, "{a}({c})"),
        }
    }
}

pub fn show_form(form: &[FormItem]) -> String {
    if form.is_empty() {
        return "λ".into();
    }
    form.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

/// A derivation: the sentential forms and the rule applied to reach each.
#[derive(Clone, Debug)]
pub struct Trace {
    pub steps: Vec<(Option<usize>, Vec<FormItem>)>,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (rule, form)) in self.steps.iter().enumerate() {
            match rule {
                None => writeln!(f, "{i:>4}     {}", show_form(form))?,
                Some(r) => writeln!(f, "{i:>4} ⇒[{r}] {}", show_form(form))?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub(crate) enum FItem {
    T(Symbol),
    N(u32, Config),
}

pub(crate) enum CItem {
    T(Symbol),
    Call(u32, Vec<Instr>),
    Tail(u32),
}

pub(crate) struct CRule {
    pub index: usize,
    pub test: Test<Pred>,
    pub rhs: Vec<CItem>,
    pub terms: usize,
    /// Calls a nonterminal from which no derivation finishes.
    pub dead: bool,
}

/// A grammar prepared for derivation: predicates, instructions and the
/// encoding compiled, rules indexed by left-hand side.
pub struct Compiled {
    pub grammar: Grammar,
    pub(crate) enc: Enc,
    pub(crate) nts: Vec<Symbol>,
    index: HashMap<Symbol, u32>,
    pub(crate) rules: Vec<Vec<CRule>>,
    pub(crate) initial: u32,
}

impl Compiled {
    pub fn new(g: &Grammar) -> Result<Compiled> {
        let s = &g.storage;
        let index: HashMap<Symbol, u32> =
            g.nonterminals.iter().enumerate().map(|(i, a)| (*a, i as u32)).collect();
        let nt = |a: &Symbol| {
            index.get(a).copied().ok_or_else(|| Error::invalid(format!("undeclared nonterminal {a}")))
        };
        // a rule calling a nonterminal that can never finish is never part of
        // a terminal derivation; declared final states finish by definition
        let mut productive: HashSet<Symbol> = g.finals.iter().copied().collect();
        loop {
            let before = productive.len();
            for r in &g.rules {
                if r.calls().all(|it| it.nonterminal().is_some_and(|b| productive.contains(&b))) {
                    productive.insert(r.lhs);
                }
            }
            if productive.len() == before {
                break;
            }
        }
        let mut rules: Vec<Vec<CRule>> = (0..g.nonterminals.len()).map(|_| Vec::new()).collect();
        for (i, r) in g.rules.iter().enumerate() {
            let dead = !r.calls().all(|it| it.nonterminal().is_some_and(|b| productive.contains(&b)));
            let at = |e: Error| e.at(&g.name, Some(i));
            let test = r.test.map(&mut |p| s.compile_pred(p)).map_err(at)?;
            let mut rhs = Vec::with_capacity(r.rhs.len());
            for it in &r.rhs {
                rhs.push(match it {
                    Item::T(t) => CItem::T(*t),
                    Item::Call(b, chain) => CItem::Call(
                        nt(b).map_err(at)?,
                        chain.iter().map(|f| s.compile_instr(f)).collect::<Result<_>>().map_err(at)?,
                    ),
                    Item::Tail(b) => CItem::Tail(nt(b).map_err(at)?),
                });
            }
            let lhs = nt(&r.lhs).map_err(at)?;
            rules[lhs as usize].push(CRule { index: i, test, rhs, terms: r.terminals(), dead });
        }
        Ok(Compiled {
            enc: s.compile_enc(&g.encoding).map_err(|e| e.at(&g.name, None))?,
            initial: nt(&g.initial)?,
            grammar: g.clone(),
            nts: g.nonterminals.clone(),
            index,
            rules,
        })
    }

    pub(crate) fn nt_index(&self, a: Symbol) -> Option<u32> {
        self.index.get(&a).copied()
    }

    pub fn encode(&self, u: &Input) -> Option<Config> {
        encode(&self.enc, u)
    }

    /// Successors of a remainder whose head is a nonterminal, one per
    /// enabled rule: (rule index, new remainder, terminals added). With
    /// `live_only`, rules that cannot reach a terminal derivation (or a
    /// declared final state) are left out.
    pub(crate) fn expand(
        &self,
        rest: &Seq<FItem>,
        keep_terminals: bool,
        live_only: bool,
    ) -> Result<Vec<(usize, Seq<FItem>, usize)>> {
        let (a, c) = match rest.first() {
            Some(FItem::N(a, c)) => (*a, c),
            _ => return Ok(Vec::new()),
        };
        let tail = rest.rest().cloned().unwrap_or_default();
        let mut out = Vec::new();
        'rules: for r in &self.rules[a as usize] {
            if live_only && r.dead {
                continue;
            }
            if !eval_test(&r.test, c)? {
                continue;
            }
            let mut next = tail.clone();
            for it in r.rhs.iter().rev() {
                next = next.push(match it {
                    CItem::T(t) => {
                        if !keep_terminals {
                            continue;
                        }
                        FItem::T(*t)
                    }
                    CItem::Call(b, chain) => {
                        let mut d = c.clone();
                        for f in chain {
                            match apply(f, &d) {
                                Some(x) => d = x,
                                None => continue 'rules,
                            }
                        }
                        FItem::N(*b, d)
                    }
                    CItem::Tail(b) => FItem::N(*b, c.clone()),
                });
            }
            out.push((r.index, next, if keep_terminals { r.terms } else { 0 }));
        }
        Ok(out)
    }

    fn inputs(&self, bounds: &Bounds) -> (Vec<Input>, bool) {
        let all = self.enc.is_unit();
        (self.enc.inputs(bounds.max_input), all)
    }

    fn start(&self, c: Config) -> Form {
        let rest = Seq::empty().push(FItem::N(self.initial, c));
        Form { out: Seq::empty(), out_len: 0, rest, rest_terms: 0 }
    }

    /// Bounded language generated over all inputs up to `max_input`.
    pub fn generate(&self, bounds: &Bounds) -> Result<LanguageSample<Word>> {
        let (inputs, all) = self.inputs(bounds);
        self.generate_from(&inputs, all, bounds, None)
    }

    /// Bounded language accepted by final state (the terminal strings `w`
    /// with `S ⇒* w A(c)` for a final state `A`).
    pub fn generate_final_state(&self, finals: &[Symbol], bounds: &Bounds) -> Result<LanguageSample<Word>> {
        let fs: HashSet<u32> = finals.iter().filter_map(|f| self.nt_index(*f)).collect();
        let (inputs, all) = self.inputs(bounds);
        self.generate_from(&inputs, all, bounds, Some(&fs))
    }

    fn generate_from(
        &self,
        inputs: &[Input],
        all: bool,
        bounds: &Bounds,
        finals: Option<&HashSet<u32>>,
    ) -> Result<LanguageSample<Word>> {
        let starts: Vec<Form> =
            inputs.iter().filter_map(|u| self.encode(u)).map(|c| self.start(c)).collect();
        let result = if bounds.jobs > 1 && starts.len() > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(bounds.jobs)
                .build()
                .map_err(|e| Error::Resource(format!("cannot start worker threads: {e}")))?;
            let parts: Vec<Result<Generated>> = pool.install(|| {
                starts.into_par_iter().map(|s| self.search_generate(vec![s], bounds, finals)).collect()
            });
            let mut acc = Generated { items: BTreeSet::new(), complete: Some(bounds.max_len) };
            for p in parts {
                let p = p?;
                acc.items.extend(p.items);
                acc.complete = min_opt(acc.complete, p.complete);
            }
            acc
        } else {
            self.search_generate(starts, bounds, finals)?
        };
        Ok(LanguageSample {
            items: result.items,
            complete_up_to: result.complete,
            bounds: *bounds,
            all_inputs: all,
        })
    }

    /// Outputs for one input element.
    pub fn transduce(&self, u: &Input, bounds: &Bounds) -> Result<LanguageSample<Word>> {
        self.generate_from(std::slice::from_ref(u), true, bounds, None)
    }

    fn search_generate(
        &self,
        starts: Vec<Form>,
        bounds: &Bounds,
        finals: Option<&HashSet<u32>>,
    ) -> Result<Generated> {
        let mut items = BTreeSet::new();
        let mut complete = Some(bounds.max_len);
        let mut seen: HashSet<Form> = HashSet::new();
        let mut queue: VecDeque<(Form, usize)> = VecDeque::new();
        for s in starts {
            if seen.insert(s.clone()) {
                queue.push_back((s, 0));
            }
        }
        while let Some((form, depth)) = queue.pop_front() {
            if let Some(fs) = finals {
                if form.rest.len() == 1 {
                    if let Some(FItem::N(a, _)) = form.rest.first() {
                        if fs.contains(a) {
                            items.insert(form.output());
                        }
                    }
                }
            }
            if form.rest.is_empty() {
                if finals.is_none() {
                    items.insert(form.output());
                }
                continue;
            }
            if depth >= bounds.max_steps {
                let t = form.out_len + form.rest_terms;
                complete = if t == 0 { None } else { min_opt(complete, Some(t - 1)) };
                continue;
            }
            for (_, rest, added) in self.expand(&form.rest, true, finals.is_none())? {
                let next = form.advance(rest, added);
                if next.out_len + next.rest_terms > bounds.max_len {
                    continue;
                }
                if seen.insert(next.clone()) {
                    if seen.len() > bounds.max_forms {
                        return Err(Error::Resource(format!(
                            "more than {} sentential forms in grammar '{}'",
                            bounds.max_forms, self.grammar.name
                        )));
                    }
                    queue.push_back((next, depth + 1));
                }
            }
        }
        Ok(Generated { items, complete })
    }

    /// Whether some terminal derivation starts from the input element.
    pub fn d_accept(&self, u: &Input, bounds: &Bounds) -> Result<AcceptResult> {
        let Some(c) = self.encode(u) else { return Ok(AcceptResult::RejectedWithinBounds) };
        self.d_accept_config(c, bounds.max_steps, bounds.max_forms)
    }

    fn d_accept_config(&self, c: Config, max_depth: usize, max_forms: usize) -> Result<AcceptResult> {
        // Deterministic prefix of the search: follow single successors
        // without bookkeeping. A cycle here runs into the step bound.
        let mut rest = Seq::empty().push(FItem::N(self.initial, c));
        let mut depth = 0usize;
        let mut branches = loop {
            if depth >= max_depth {
                return Ok(AcceptResult::Exhausted);
            }
            let mut succ = self.expand(&rest, false, false)?;
            match succ.len() {
                0 => return Ok(AcceptResult::RejectedWithinBounds),
                1 => {
                    let next = succ.pop().unwrap().1;
                    if next.is_empty() {
                        return Ok(AcceptResult::Accepted);
                    }
                    rest = next;
                    depth += 1;
                }
                _ => break succ,
            }
        };
        let mut seen: HashSet<Seq<FItem>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(rest);
        for (_, next, _) in branches.drain(..) {
            if next.is_empty() {
                return Ok(AcceptResult::Accepted);
            }
            if seen.insert(next.clone()) {
                queue.push_back((next, depth + 1));
            }
        }
        let mut cut = false;
        while let Some((rest, depth)) = queue.pop_front() {
            if depth >= max_depth {
                cut = true;
                continue;
            }
            for (_, next, _) in self.expand(&rest, false, false)? {
                if next.is_empty() {
                    return Ok(AcceptResult::Accepted);
                }
                if seen.insert(next.clone()) {
                    if seen.len() > max_forms {
                        return Ok(AcceptResult::Exhausted);
                    }
                    queue.push_back((next, depth + 1));
                }
            }
        }
        Ok(if cut { AcceptResult::Exhausted } else { AcceptResult::RejectedWithinBounds })
    }

    /// Derivation of one output (or of any output if `target` is `None`).
    pub fn trace(&self, u: &Input, target: Option<&[Symbol]>, bounds: &Bounds) -> Result<Option<Trace>> {
        let Some(c) = self.encode(u) else { return Ok(None) };
        let start = self.start(c);
        let mut parent: HashMap<Form, Option<(Form, usize)>> = HashMap::new();
        parent.insert(start.clone(), None);
        let mut queue = VecDeque::from([(start, 0usize)]);
        while let Some((form, depth)) = queue.pop_front() {
            if form.rest.is_empty() {
                if target.map_or(true, |t| form.output() == t) {
                    let mut steps = Vec::new();
                    let mut cur = form;
                    loop {
                        let p = parent[&cur].clone();
                        steps.push((p.as_ref().map(|x| x.1), self.public_form(&cur)));
                        match p {
                            Some((pf, _)) => cur = pf,
                            None => break,
                        }
                    }
                    steps.reverse();
                    return Ok(Some(Trace { steps }));
                }
                continue;
            }
            if depth >= bounds.max_steps {
                continue;
            }
            for (rule, rest, added) in self.expand(&form.rest, true, true)? {
                let next = form.advance(rest, added);
                if next.out_len + next.rest_terms > bounds.max_len || parent.contains_key(&next) {
                    continue;
                }
                if parent.len() > bounds.max_forms {
                    return Err(Error::Resource("too many sentential forms while tracing".into()));
                }
                parent.insert(next.clone(), Some((form.clone(), rule)));
                queue.push_back((next, depth + 1));
            }
        }
        Ok(None)
    }

    fn public_form(&self, f: &Form) -> Vec<FormItem> {
        let mut out: Vec<FormItem> = f.output().into_iter().map(FormItem::T).collect();
        for it in f.rest.iter() {
            out.push(match it {
                FItem::T(t) => FormItem::T(*t),
                FItem::N(a, c) => FormItem::N(self.nts[*a as usize], c.clone()),
            });
        }
        out
    }
}

struct Generated {
    items: BTreeSet<Word>,
    complete: Option<usize>,
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        _ => None,
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Form {
    /// Produced terminals, last first.
    out: Seq<Symbol>,
    out_len: usize,
    rest: Seq<FItem>,
    rest_terms: usize,
}

impl Form {
    fn output(&self) -> Word {
        let mut w: Word = self.out.iter().copied().collect();
        w.reverse();
        w
    }

    /// Replaces the remainder after an expansion and moves leading
    /// terminals to the output.
    fn advance(&self, mut rest: Seq<FItem>, added: usize) -> Form {
        let mut out = self.out.clone();
        let mut out_len = self.out_len;
        let mut rest_terms = self.rest_terms + added;
        while let Some(FItem::T(t)) = rest.first() {
            out = out.push(*t);
            out_len += 1;
            rest_terms -= 1;
            rest = rest.rest().cloned().unwrap_or_default();
        }
        Form { out, out_len, rest, rest_terms }
    }
}

/// Look-ahead: whether the grammar derives some terminal string from its
/// initial nonterminal with configuration `c`. `None` when the search was
/// cut off by the step bound.
pub(crate) fn accepts_from(g: &Compiled, c: Config, max_steps: usize) -> Result<Option<bool>> {
    match g.d_accept_config(c, max_steps, max_steps.max(1000))? {
        AcceptResult::Accepted => Ok(Some(true)),
        AcceptResult::RejectedWithinBounds => Ok(Some(false)),
        AcceptResult::Exhausted => Ok(None),
    }
}

pub fn generate(g: &Grammar, bounds: &Bounds) -> Result<LanguageSample<Word>> {
    Compiled::new(g)?.generate(bounds)
}

pub fn generate_final_state(g: &Grammar, finals: &[Symbol], bounds: &Bounds) -> Result<LanguageSample<Word>> {
    Compiled::new(g)?.generate_final_state(finals, bounds)
}

pub fn transduce(g: &Grammar, u: &Input, bounds: &Bounds) -> Result<LanguageSample<Word>> {
    Compiled::new(g)?.transduce(u, bounds)
}

pub fn d_accept(g: &Grammar, u: &Input, bounds: &Bounds) -> Result<AcceptResult> {
    Compiled::new(g)?.d_accept(u, bounds)
}

pub fn trace(g: &Grammar, u: &Input, target: Option<&[Symbol]>, bounds: &Bounds) -> Result<Option<Trace>> {
    Compiled::new(g)?.trace(u, target, bounds)
}

/// Trees generated by a tree grammar, up to `max_len` nodes.
pub fn generate_trees(g: &Grammar, bounds: &Bounds) -> Result<LanguageSample<Tree>> {
    if g.class != Class::Rt {
        return Err(Error::precondition("tree generation", format!("grammar is {}, not RT", g.class))
            .at(&g.name, None));
    }
    let s = generate(g, bounds)?;
    Ok(LanguageSample {
        items: s.items.iter().map(|w| prefix_tree(g, w)).collect::<Result<_>>()?,
        complete_up_to: s.complete_up_to,
        bounds: s.bounds,
        all_inputs: s.all_inputs,
    })
}

/// Output trees for one input element.
pub fn transduce_trees(g: &Grammar, u: &Input, bounds: &Bounds) -> Result<LanguageSample<Tree>> {
    let s = transduce(g, u, bounds)?;
    Ok(LanguageSample {
        items: s.items.iter().map(|w| prefix_tree(g, w)).collect::<Result<_>>()?,
        complete_up_to: s.complete_up_to,
        bounds: s.bounds,
        all_inputs: s.all_inputs,
    })
}

fn prefix_tree(g: &Grammar, w: &[Symbol]) -> Result<Tree> {
    Tree::from_prefix(w, |s| g.rank(s))
        .ok_or_else(|| Error::invalid(format!("output is not a tree: {}", crate::symbol::show_word(w))))
}

/// Yield of a tree with the empty-string leaf `eps` omitted.
pub fn tree_yield(t: &Tree) -> Word {
    t.yield_word(Some(crate::symbol::sym("eps")))
}

/// Applies rule `rule` at position `pos` of a sentential form. `Ok(None)`
/// when the rule does not apply there.
pub fn derive_step(g: &Grammar, form: &[FormItem], pos: usize, rule: usize) -> Result<Option<Vec<FormItem>>> {
    let r = g.rules.get(rule).ok_or_else(|| Error::invalid(format!("no rule {rule}")))?;
    let Some(FormItem::N(a, c)) = form.get(pos) else { return Ok(None) };
    if *a != r.lhs {
        return Ok(None);
    }
    if !g.storage.eval_term_test(&r.test, c)? {
        return Ok(None);
    }
    let mut repl = Vec::new();
    for it in &r.rhs {
        match it {
            Item::T(t) => repl.push(FormItem::T(*t)),
            Item::Call(b, chain) => {
                let mut d = c.clone();
                for f in chain {
                    match g.storage.apply_term(f, &d)? {
                        Some(x) => d = x,
                        None => return Ok(None),
                    }
                }
                repl.push(FormItem::N(*b, d));
            }
            Item::Tail(b) => repl.push(FormItem::N(*b, c.clone())),
        }
    }
    let mut out = form[..pos].to_vec();
    out.extend(repl);
    out.extend(form[pos + 1..].iter().cloned());
    Ok(Some(out))
}

/// Acceptance by final state for a regular acceptor in normal form:
/// whether `S(c_in) ⇒* w A(c)` with `A` final.
pub fn accept_final_state(g: &Grammar, finals: &[Symbol], w: &[Symbol], bounds: &Bounds) -> Result<bool> {
    if g.class != Class::Reg || !is_racceptor_deterministic(g)? {
        return Err(Error::precondition(
            "final-state acceptance",
            "grammar is not a deterministic regular acceptor in normal form",
        )
        .at(&g.name, None));
    }
    let cg = Compiled::new(g)?;
    let fs: HashSet<u32> = finals.iter().filter_map(|f| cg.nt_index(*f)).collect();
    let Some(c0) = cg.encode(&Input::Unit) else { return Ok(false) };
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((cg.initial, c0.clone(), 0usize));
    queue.push_back((cg.initial, c0, 0usize, 0usize));
    while let Some((a, c, pos, depth)) = queue.pop_front() {
        if pos == w.len() && fs.contains(&a) {
            return Ok(true);
        }
        if depth >= bounds.max_steps {
            return Err(Error::Resource(format!("acceptor run exceeded {} steps", bounds.max_steps)));
        }
        for r in &cg.rules[a as usize] {
            if !eval_test(&r.test, &c)? {
                continue;
            }
            let (read, call) = match r.rhs.as_slice() {
                [CItem::T(x), CItem::Call(b, f)] => (Some(*x), Some((*b, f))),
                [CItem::Call(b, f)] => (None, Some((*b, f))),
                _ => (None, None),
            };
            let Some((b, chain)) = call else { continue };
            let npos = match read {
                Some(x) if w.get(pos) == Some(&x) => pos + 1,
                Some(_) => continue,
                None => pos,
            };
            let mut d = c.clone();
            let mut ok = true;
            for f in chain {
                match apply(f, &d) {
                    Some(x) => d = x,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && seen.insert((b, d.clone(), npos)) {
                if seen.len() > bounds.max_forms {
                    return Err(Error::Resource("acceptor run visited too many configurations".into()));
                }
                queue.push_back((b, d, npos, depth + 1));
            }
        }
    }
    Ok(false)
}
