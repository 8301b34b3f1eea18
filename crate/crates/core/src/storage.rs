//! Storage types: configurations, predicates, instructions and encodings.
//!
//! Grammar text refers to predicates, instructions and encodings as
//! [`Term`]s. A storage type compiles them into [`Pred`], [`Instr`] and
//! [`Enc`], which are then interpreted structurally on [`Config`]s.

use crate::error::{Error, Result};
use crate::grammar::Grammar;
use crate::seq::Seq;
use crate::symbol::{sym, Symbol, Word};
use crate::term::{Term, Test};
use crate::tree::{RankedAlphabet, Tree};
use parking_lot::Mutex;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

pub const DEFAULT_LOOKAHEAD_STEPS: usize = 20_000;
/// Step bound for look-ahead searches over noetherian storage, where every
/// search terminates; hitting it still reports "unknown".
const NOETHERIAN_LOOKAHEAD_STEPS: usize = 2_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Config {
    /// The single configuration of the trivial storage.
    Unit,
    Int(u64),
    /// Pushdown contents (first element is the top) or remaining input.
    Str(Seq<Symbol>),
    Tree(Tree),
    /// A tree with a focused node; the path is stored last step first.
    Focus(Tree, Seq<u32>),
    Pair(Arc<(Config, Config)>),
    /// Pushdown of configurations, top cell first.
    Cells(Seq<(Symbol, Config)>),
    /// Remaining one-way input, as encoded from an input word.
    Rest(Remaining),
}

/// A suffix of a shared word. Equality, hashing and order only look at the
/// suffix itself.
#[derive(Clone)]
pub struct Remaining {
    word: Arc<[Symbol]>,
    at: usize,
}

impl Remaining {
    pub fn new(w: &[Symbol]) -> Remaining {
        Remaining { word: w.into(), at: 0 }
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.word[self.at..]
    }

    fn advance(&self) -> Option<Remaining> {
        (self.at < self.word.len()).then(|| Remaining { word: self.word.clone(), at: self.at + 1 })
    }
}

impl PartialEq for Remaining {
    fn eq(&self, other: &Self) -> bool {
        self.as_slice() == other.as_slice()
    }
}

impl Eq for Remaining {}

impl std::hash::Hash for Remaining {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.as_slice().hash(state)
    }
}

impl PartialOrd for Remaining {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Remaining {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.as_slice().cmp(other.as_slice())
    }
}

impl Config {
    pub fn pair(a: Config, b: Config) -> Config {
        Config::Pair(Arc::new((a, b)))
    }

    pub fn word(w: &[Symbol]) -> Config {
        Config::Str(Seq::from_slice(w))
    }

    /// One-way input configuration.
    pub fn input(w: &[Symbol]) -> Config {
        Config::Rest(Remaining::new(w))
    }

    fn focus_path(path: &Seq<u32>) -> Vec<u32> {
        let mut v: Vec<u32> = path.iter().copied().collect();
        v.reverse();
        v
    }
}

fn write_syms<'a>(f: &mut fmt::Formatter<'_>, s: impl Iterator<Item = &'a Symbol> + Clone) -> fmt::Result {
    if s.clone().next().is_none() {
        return f.write_str("λ");
    }
    let single = s.clone().all(|x| x.as_str().chars().count() == 1);
    for (i, x) in s.enumerate() {
        if i > 0 && !single {
            f.write_str(" ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Unit => f.write_str("c0"),
            Config::Int(n) => write!(f, "{n}"),
            Config::Str(s) => write_syms(f, s.iter()),
            Config::Rest(r) => write_syms(f, r.as_slice().iter()),
            Config::Tree(t) => write!(f, "{t}"),
            Config::Focus(t, p) => {
                let path: Vec<String> =
                    Config::focus_path(p).iter().map(|i| (i + 1).to_string()).collect();
                write!(f, "{t}@[{}]", path.join("."))
            }
            Config::Pair(p) => write!(f, "({}, {})", p.0, p.1),
            Config::Cells(cells) => {
                for (g, c) in cells.iter() {
                    write!(f, "({g},{c})")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Input elements of a storage type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Input {
    Unit,
    Int(u64),
    Str(Word),
    Tree(Tree),
    Pair(Box<Input>, Box<Input>),
}

impl Input {
    pub fn size(&self) -> usize {
        match self {
            Input::Unit => 0,
            Input::Int(n) => *n as usize,
            Input::Str(w) => w.len(),
            Input::Tree(t) => t.size(),
            Input::Pair(a, b) => a.size() + b.size(),
        }
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Input::Unit => f.write_str("u0"),
            Input::Int(n) => write!(f, "{n}"),
            Input::Str(w) => f.write_str(&crate::symbol::show_word(w)),
            Input::Tree(t) => write!(f, "{t}"),
            Input::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

/// Compiled predicate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Pred {
    Top(Symbol),
    Bottom,
    Null,
    First(Symbol),
    Empty,
    Root(Symbol),
    Label(Symbol),
    AtRoot,
    Son(u32),
    Test(Box<Pred>),
    Left(Box<Pred>),
    Right(Box<Pred>),
    Acc(AccRef),
}

/// Reference to a registered look-ahead grammar. Compared by key.
#[derive(Clone)]
pub struct AccRef {
    pub key: Symbol,
    index: usize,
    la: Arc<Lookahead>,
}

impl PartialEq for AccRef {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for AccRef {}
impl std::hash::Hash for AccRef {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state)
    }
}
impl PartialOrd for AccRef {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for AccRef {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}
impl fmt::Debug for AccRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "acc({})", self.key)
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Top(g) => write!(f, "top={g}"),
            Pred::Bottom => f.write_str("bottom"),
            Pred::Null => f.write_str("null"),
            Pred::First(a) => write!(f, "first={a}"),
            Pred::Empty => f.write_str("empty"),
            Pred::Root(s) => write!(f, "root={s}"),
            Pred::Label(s) => write!(f, "label={s}"),
            Pred::AtRoot => f.write_str("root"),
            Pred::Son(i) => write!(f, "son={i}"),
            Pred::Test(p) => write!(f, "test({p})"),
            Pred::Left(p) => write!(f, "left.{p}"),
            Pred::Right(p) => write!(f, "right.{p}"),
            Pred::Acc(r) => write!(f, "acc({})", r.key),
        }
    }
}

/// Compiled instruction.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Instr {
    Id,
    Push(Symbol),
    Pop,
    StayAs(Symbol),
    Stay,
    Dec,
    Read,
    Sel(u32),
    Down(u32),
    Up,
    Expand(Tree),
    PdPush(Symbol, Box<Instr>),
    PdStayWith(Symbol, Box<Instr>),
    Pair(Box<Instr>, Box<Instr>),
}

/// Compiled encoding.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Enc {
    Unit,
    PushSym(Symbol),
    /// Integer n encoded as `a^n` above a bottom symbol.
    Unary(Symbol, Symbol),
    Count,
    Alphabet(Vec<Symbol>),
    Ranked(RankedAlphabet, bool),
    TreeLeaf(Symbol),
    Cell(Symbol, Box<Enc>),
    Pair(Box<Enc>, Box<Enc>),
}

impl std::hash::Hash for RankedAlphabet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (s, k) in self.symbols() {
            s.hash(state);
            k.hash(state);
        }
    }
}

impl Enc {
    /// Whether the input set of this encoding is the singleton {u0}.
    pub fn is_unit(&self) -> bool {
        match self {
            Enc::Unit | Enc::PushSym(_) | Enc::TreeLeaf(_) => true,
            Enc::Cell(_, e) => e.is_unit(),
            Enc::Pair(a, b) => a.is_unit() && b.is_unit(),
            _ => false,
        }
    }

    /// Inputs of size at most `max`, smallest first.
    pub fn inputs(&self, max: usize) -> Vec<Input> {
        match self {
            Enc::Unit | Enc::PushSym(_) | Enc::TreeLeaf(_) => vec![Input::Unit],
            Enc::Count | Enc::Unary(..) => (0..=max as u64).map(Input::Int).collect(),
            Enc::Alphabet(sigma) => {
                let mut out = vec![Input::Str(Vec::new())];
                let mut layer: Vec<Word> = vec![Vec::new()];
                for _ in 0..max {
                    let mut next = Vec::new();
                    for w in &layer {
                        for a in sigma {
                            let mut v = w.clone();
                            v.push(*a);
                            next.push(v);
                        }
                    }
                    out.extend(next.iter().cloned().map(Input::Str));
                    layer = next;
                }
                out
            }
            Enc::Ranked(alpha, _) => {
                alpha.trees_by_size(max).into_iter().flatten().map(Input::Tree).collect()
            }
            Enc::Cell(_, e) => e.inputs(max),
            Enc::Pair(a, b) => {
                if a.is_unit() {
                    return b.inputs(max);
                }
                if b.is_unit() {
                    return a.inputs(max);
                }
                let mut out = Vec::new();
                let la = a.inputs(max);
                let lb = b.inputs(max);
                for x in &la {
                    for y in &lb {
                        if x.size() + y.size() <= max {
                            out.push(Input::Pair(Box::new(x.clone()), Box::new(y.clone())));
                        }
                    }
                }
                out.sort_by_key(|i| i.size());
                out
            }
        }
    }

    /// Parses an input element in the form expected by this encoding.
    pub fn parse_input(&self, text: &str) -> Result<Input> {
        let t = text.trim();
        let bad = |what: &str| Error::invalid(format!("expected {what} as input, got '{t}'"));
        match self {
            Enc::Unit | Enc::PushSym(_) | Enc::TreeLeaf(_) => {
                if t.is_empty() || t == "u0" {
                    Ok(Input::Unit)
                } else {
                    Err(bad("nothing (u0)"))
                }
            }
            Enc::Count | Enc::Unary(..) => t.parse().map(Input::Int).map_err(|_| bad("an integer")),
            Enc::Alphabet(_) => Ok(Input::Str(crate::symbol::parse_word(t))),
            Enc::Ranked(..) => Tree::parse(t).map(Input::Tree),
            Enc::Cell(_, e) => e.parse_input(t),
            Enc::Pair(a, b) => {
                if a.is_unit() {
                    return b.parse_input(t);
                }
                if b.is_unit() {
                    return a.parse_input(t);
                }
                let inner = t
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| bad("a pair '(x, y)'"))?;
                let split = top_level_comma(inner).ok_or_else(|| bad("a pair '(x, y)'"))?;
                Ok(Input::Pair(
                    Box::new(a.parse_input(&inner[..split])?),
                    Box::new(b.parse_input(&inner[split + 1..])?),
                ))
            }
        }
    }
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Applies a compiled instruction. `None` means undefined.
pub fn apply(f: &Instr, c: &Config) -> Option<Config> {
    match (f, c) {
        (Instr::Id | Instr::Stay, _) => Some(c.clone()),
        (Instr::Push(g), Config::Str(s)) => Some(Config::Str(s.push(*g))),
        (Instr::Pop, Config::Str(s)) => {
            let rest = s.rest()?;
            (!rest.is_empty()).then(|| Config::Str(rest.clone()))
        }
        (Instr::StayAs(g), Config::Str(s)) => Some(Config::Str(s.rest()?.push(*g))),
        (Instr::Dec, Config::Int(n)) => n.checked_sub(1).map(Config::Int),
        (Instr::Read, Config::Str(s)) => s.rest().map(|r| Config::Str(r.clone())),
        (Instr::Read, Config::Rest(r)) => r.advance().map(Config::Rest),
        (Instr::Sel(i), Config::Tree(t)) => {
            t.children().get(*i as usize - 1).map(|x| Config::Tree(x.clone()))
        }
        (Instr::Down(i), Config::Focus(t, p)) => {
            let node = t.at(&Config::focus_path(p))?;
            (node.rank() >= *i as usize).then(|| Config::Focus(t.clone(), p.push(*i - 1)))
        }
        (Instr::Up, Config::Focus(t, p)) => p.rest().map(|r| Config::Focus(t.clone(), r.clone())),
        (Instr::Expand(z), Config::Tree(t)) => expand(z, t).map(Config::Tree),
        (Instr::Pop, Config::Cells(s)) => {
            let rest = s.rest()?;
            (!rest.is_empty()).then(|| Config::Cells(rest.clone()))
        }
        (Instr::StayAs(g), Config::Cells(s)) => {
            let (_, top) = s.first()?;
            Some(Config::Cells(s.rest()?.push((*g, top.clone()))))
        }
        (Instr::PdPush(g, inner), Config::Cells(s)) => {
            let (_, top) = s.first()?;
            let next = apply(inner, top)?;
            Some(Config::Cells(s.push((*g, next))))
        }
        (Instr::PdStayWith(g, inner), Config::Cells(s)) => {
            let (_, top) = s.first()?;
            let next = apply(inner, top)?;
            Some(Config::Cells(s.rest()?.push((*g, next))))
        }
        (Instr::Pair(a, b), Config::Pair(p)) => Some(Config::pair(apply(a, &p.0)?, apply(b, &p.1)?)),
        _ => None,
    }
}

fn var_index(s: Symbol) -> Option<usize> {
    let n = s.as_str().strip_prefix('y')?;
    if n.is_empty() || !n.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    n.parse().ok().filter(|&i| i >= 1)
}

fn expand(z: &Tree, t: &Tree) -> Option<Tree> {
    fn go(z: &Tree, args: &[Tree]) -> Option<Tree> {
        if z.children().is_empty() {
            if let Some(i) = var_index(z.label()) {
                return args.get(i - 1).cloned();
            }
        }
        let kids = z.children().iter().map(|c| go(c, args)).collect::<Option<Vec<_>>>()?;
        Some(Tree::new(z.label(), kids))
    }
    go(z, t.children())
}

/// Evaluates a compiled predicate. Look-ahead predicates may fail with
/// [`Error::Unknown`].
pub fn eval_pred(p: &Pred, c: &Config) -> Result<bool> {
    Ok(match (p, c) {
        (Pred::Top(g), Config::Str(s)) => s.first() == Some(g),
        (Pred::Bottom, Config::Str(s)) => s.len() == 1,
        (Pred::Null, Config::Int(n)) => *n == 0,
        (Pred::First(a), Config::Str(s)) => s.first() == Some(a),
        (Pred::Empty, Config::Str(s)) => s.is_empty(),
        (Pred::First(a), Config::Rest(r)) => r.as_slice().first() == Some(a),
        (Pred::Empty, Config::Rest(r)) => r.as_slice().is_empty(),
        (Pred::Root(x), Config::Tree(t)) => t.label() == *x,
        (Pred::Label(x), Config::Focus(t, path)) => {
            t.at(&Config::focus_path(path)).map(|n| n.label()) == Some(*x)
        }
        (Pred::AtRoot, Config::Focus(_, path)) => path.is_empty(),
        (Pred::Son(i), Config::Focus(_, path)) => path.first() == Some(&(*i - 1)),
        (Pred::Top(g), Config::Cells(s)) => s.first().map(|x| x.0) == Some(*g),
        (Pred::Bottom, Config::Cells(s)) => s.len() == 1,
        (Pred::Test(q), Config::Cells(s)) => match s.first() {
            Some((_, top)) => eval_pred(q, top)?,
            None => false,
        },
        (Pred::Left(q), Config::Pair(pr)) => eval_pred(q, &pr.0)?,
        (Pred::Right(q), Config::Pair(pr)) => eval_pred(q, &pr.1)?,
        (Pred::Acc(r), _) => r.la.accepts(r.index, c)?,
        _ => false,
    })
}

pub fn eval_test(t: &Test<Pred>, c: &Config) -> Result<bool> {
    t.eval(&mut |p| eval_pred(p, c))
}

/// Encodes an input element. `None` means the encoding is undefined on it.
pub fn encode(e: &Enc, u: &Input) -> Option<Config> {
    match (e, u) {
        (Enc::Unit, Input::Unit) => Some(Config::Unit),
        (Enc::PushSym(g), Input::Unit) => Some(Config::Str(Seq::empty().push(*g))),
        (Enc::TreeLeaf(s), Input::Unit) => Some(Config::Tree(Tree::leaf(*s))),
        (Enc::Unary(a, b), Input::Int(n)) => {
            let mut s = Seq::empty().push(*b);
            for _ in 0..*n {
                s = s.push(*a);
            }
            Some(Config::Str(s))
        }
        (Enc::Count, Input::Int(n)) => Some(Config::Int(*n)),
        (Enc::Alphabet(sigma), Input::Str(w)) => {
            w.iter().all(|a| sigma.contains(a)).then(|| Config::input(w))
        }
        (Enc::Ranked(alpha, focus), Input::Tree(t)) => t.conforms(alpha).then(|| {
            if *focus {
                Config::Focus(t.clone(), Seq::empty())
            } else {
                Config::Tree(t.clone())
            }
        }),
        (Enc::Cell(g, inner), u) => {
            Some(Config::Cells(Seq::empty().push((*g, encode(inner, u)?))))
        }
        (Enc::Pair(a, b), Input::Pair(x, y)) if !a.is_unit() && !b.is_unit() => {
            Some(Config::pair(encode(a, x)?, encode(b, y)?))
        }
        (Enc::Pair(a, b), u) if a.is_unit() => {
            Some(Config::pair(encode(a, &Input::Unit)?, encode(b, u)?))
        }
        (Enc::Pair(a, b), u) if b.is_unit() => {
            Some(Config::pair(encode(a, u)?, encode(b, &Input::Unit)?))
        }
        _ => None,
    }
}

/// Whether two predicates can never hold on the same configuration, by the
/// built-in exclusivity axioms (distinct top symbols, distinct labels, ...).
pub fn exclusive(p: &Pred, q: &Pred) -> bool {
    match (p, q) {
        (Pred::Top(a), Pred::Top(b))
        | (Pred::First(a), Pred::First(b))
        | (Pred::Root(a), Pred::Root(b))
        | (Pred::Label(a), Pred::Label(b)) => a != b,
        (Pred::First(_), Pred::Empty) | (Pred::Empty, Pred::First(_)) => true,
        (Pred::Son(i), Pred::Son(j)) => i != j,
        (Pred::Son(_), Pred::AtRoot) | (Pred::AtRoot, Pred::Son(_)) => true,
        (Pred::Test(a), Pred::Test(b))
        | (Pred::Left(a), Pred::Left(b))
        | (Pred::Right(a), Pred::Right(b)) => exclusive(a, b),
        (Pred::Acc(a), Pred::Acc(b)) => a.key != b.key && a.la.are_exclusive(a.key, b.key),
        _ => false,
    }
}

/// One registered look-ahead grammar.
pub struct LookaheadEntry {
    pub key: Symbol,
    pub grammar: Arc<Grammar>,
    compiled: OnceLock<Result<Arc<crate::engine::Compiled>>>,
}

impl LookaheadEntry {
    pub fn new(key: Symbol, grammar: Grammar) -> LookaheadEntry {
        LookaheadEntry { key, grammar: Arc::new(grammar), compiled: OnceLock::new() }
    }
}

/// Registry of look-ahead grammars with a memo table of answers.
pub struct Lookahead {
    pub inner: StorageType,
    pub entries: Vec<LookaheadEntry>,
    /// Groups of keys whose predicates are pairwise exclusive.
    pub exclusive: Vec<Vec<Symbol>>,
    pub step_bound: usize,
    cache: Mutex<HashMap<(usize, Config), bool>>,
}

impl Lookahead {
    fn are_exclusive(&self, a: Symbol, b: Symbol) -> bool {
        self.exclusive.iter().any(|g| g.contains(&a) && g.contains(&b))
    }

    fn accepts(&self, index: usize, c: &Config) -> Result<bool> {
        if let Some(&v) = self.cache.lock().get(&(index, c.clone())) {
            return Ok(v);
        }
        let entry = &self.entries[index];
        let compiled = entry
            .compiled
            .get_or_init(|| crate::engine::Compiled::new(&entry.grammar).map(Arc::new))
            .clone()?;
        let bound = if self.inner.is_noetherian() {
            NOETHERIAN_LOOKAHEAD_STEPS
        } else {
            self.step_bound
        };
        match crate::engine::accepts_from(&compiled, c.clone(), bound)? {
            Some(v) => {
                self.cache.lock().insert((index, c.clone()), v);
                Ok(v)
            }
            None => Err(Error::Unknown(format!(
                "acc({}) on configuration {c} not settled within {bound} steps",
                entry.key
            ))),
        }
    }

    pub fn key_index(&self, key: Symbol) -> Option<usize> {
        self.entries.iter().position(|e| e.key == key)
    }
}

pub enum Kind {
    Trivial,
    Pushdown,
    Counter,
    Countdown,
    OneWay,
    Tree,
    TreeWalk,
    TreePushdown,
    WithIdentity { inner: StorageType, id: Symbol },
    Product(StorageType, StorageType),
    PushdownOf { inner: StorageType, pure: bool, stay_with: bool },
    Lookahead(Arc<Lookahead>),
}

/// A storage type. Cheap to clone.
#[derive(Clone)]
pub struct StorageType(Arc<Kind>);

/// Bottom symbol of the counter and pure pushdowns.
pub fn counter_symbol() -> Symbol {
    sym("g0")
}

fn bad_term(what: &str, t: &Term, s: &StorageType) -> Error {
    Error::invalid(format!("'{t}' is not {what} of storage type {s}"))
}

fn single_sym(args: &[Term]) -> Option<Symbol> {
    match args {
        [Term::Sym(s)] => Some(*s),
        _ => None,
    }
}

fn indexed(head: Symbol, prefix: &str) -> Option<u32> {
    let n = head.as_str().strip_prefix(prefix)?;
    n.parse().ok().filter(|&i: &u32| i >= 1)
}

fn term_to_tree(t: &Term) -> Option<Tree> {
    match t {
        Term::Sym(s) => Some(Tree::leaf(*s)),
        Term::App(s, args) => {
            Some(Tree::new(*s, args.iter().map(term_to_tree).collect::<Option<Vec<_>>>()?))
        }
        _ => None,
    }
}

impl StorageType {
    fn new(k: Kind) -> StorageType {
        StorageType(Arc::new(k))
    }

    pub fn trivial() -> StorageType {
        Self::new(Kind::Trivial)
    }
    pub fn pushdown() -> StorageType {
        Self::new(Kind::Pushdown)
    }
    pub fn counter() -> StorageType {
        Self::new(Kind::Counter)
    }
    pub fn countdown() -> StorageType {
        Self::new(Kind::Countdown)
    }
    pub fn one_way() -> StorageType {
        Self::new(Kind::OneWay)
    }
    pub fn tree() -> StorageType {
        Self::new(Kind::Tree)
    }
    pub fn tree_walk() -> StorageType {
        Self::new(Kind::TreeWalk)
    }
    pub fn tree_pushdown() -> StorageType {
        Self::new(Kind::TreePushdown)
    }

    /// Adds an identity instruction named `id` (or `id~n` if taken).
    pub fn with_identity(s: &StorageType) -> StorageType {
        let mut n = 0usize;
        let mut id = sym("id");
        while s.compile_instr(&Term::Sym(id)).is_ok() {
            n += 1;
            id = sym(&format!("id~{n}"));
        }
        Self::new(Kind::WithIdentity { inner: s.clone(), id })
    }

    pub fn product(a: &StorageType, b: &StorageType) -> StorageType {
        Self::new(Kind::Product(a.clone(), b.clone()))
    }

    pub fn pushdown_of(s: &StorageType) -> StorageType {
        Self::new(Kind::PushdownOf { inner: s.clone(), pure: false, stay_with: false })
    }

    /// Pushdown of `s` with the extra instructions `stay(γ, f)`.
    pub fn pushdown_of_with_stay(s: &StorageType) -> StorageType {
        Self::new(Kind::PushdownOf { inner: s.clone(), pure: false, stay_with: true })
    }

    pub fn pure_pushdown_of(s: &StorageType) -> StorageType {
        Self::new(Kind::PushdownOf { inner: s.clone(), pure: true, stay_with: false })
    }

    /// n-fold pushdown of the trivial storage type.
    pub fn iterate_pd(n: usize) -> StorageType {
        let mut s = Self::trivial();
        for _ in 0..n {
            s = Self::pushdown_of(&s);
        }
        s
    }

    /// Look-ahead extension: predicates `acc(key)` for each registered
    /// grammar, which must be over `s`.
    pub fn with_lookahead(
        s: &StorageType,
        entries: Vec<LookaheadEntry>,
        exclusive: Vec<Vec<Symbol>>,
        step_bound: usize,
    ) -> Result<StorageType> {
        for e in &entries {
            if e.grammar.storage != *s {
                return Err(Error::invalid(format!(
                    "look-ahead grammar {} is over {}, expected {s}",
                    e.key, e.grammar.storage
                )));
            }
        }
        Ok(Self::new(Kind::Lookahead(Arc::new(Lookahead {
            inner: s.clone(),
            entries,
            exclusive,
            step_bound,
            cache: Mutex::new(HashMap::new()),
        }))))
    }

    pub fn kind(&self) -> &Kind {
        &self.0
    }

    pub fn lookahead(&self) -> Option<&Arc<Lookahead>> {
        match self.kind() {
            Kind::Lookahead(l) => Some(l),
            _ => None,
        }
    }

    /// Storage underneath a pushdown, identity or look-ahead extension.
    pub fn inner(&self) -> Option<&StorageType> {
        match self.kind() {
            Kind::WithIdentity { inner, .. } | Kind::PushdownOf { inner, .. } => Some(inner),
            Kind::Lookahead(l) => Some(&l.inner),
            _ => None,
        }
    }

    pub fn is_noetherian(&self) -> bool {
        match self.kind() {
            Kind::Countdown | Kind::OneWay | Kind::Tree => true,
            Kind::Trivial
            | Kind::Pushdown
            | Kind::Counter
            | Kind::TreeWalk
            | Kind::TreePushdown
            | Kind::WithIdentity { .. }
            | Kind::PushdownOf { .. } => false,
            Kind::Product(a, b) => a.is_noetherian() || b.is_noetherian(),
            Kind::Lookahead(l) => l.inner.is_noetherian(),
        }
    }

    /// Name of the identity instruction, if the type has one.
    pub fn identity(&self) -> Option<Term> {
        match self.kind() {
            Kind::Trivial => Some(Term::sym("id")),
            Kind::Pushdown | Kind::Counter | Kind::TreeWalk | Kind::PushdownOf { .. } => {
                Some(Term::sym("stay"))
            }
            Kind::WithIdentity { id, .. } => Some(Term::Sym(*id)),
            Kind::Product(a, b) => Some(Term::Tuple(vec![a.identity()?, b.identity()?])),
            Kind::Lookahead(l) => l.inner.identity(),
            _ => None,
        }
    }

    pub fn compile_pred(&self, t: &Term) -> Result<Pred> {
        let bad = || bad_term("a predicate", t, self);
        match self.kind() {
            Kind::Trivial => Err(bad()),
            Kind::Pushdown | Kind::Counter => match t {
                Term::Eq(h, a) if h.as_str() == "top" => {
                    let g = a.as_sym().ok_or_else(bad)?;
                    if matches!(self.kind(), Kind::Counter) && g != counter_symbol() {
                        return Err(bad());
                    }
                    Ok(Pred::Top(g))
                }
                Term::Sym(h) if h.as_str() == "bottom" => Ok(Pred::Bottom),
                _ => Err(bad()),
            },
            Kind::Countdown => match t {
                Term::Sym(h) if h.as_str() == "null" => Ok(Pred::Null),
                _ => Err(bad()),
            },
            Kind::OneWay => match t {
                Term::Eq(h, a) if h.as_str() == "first" => {
                    Ok(Pred::First(a.as_sym().ok_or_else(bad)?))
                }
                Term::Sym(h) if h.as_str() == "empty" => Ok(Pred::Empty),
                _ => Err(bad()),
            },
            Kind::Tree | Kind::TreePushdown => match t {
                Term::Eq(h, a) if h.as_str() == "root" => Ok(Pred::Root(a.as_sym().ok_or_else(bad)?)),
                _ => Err(bad()),
            },
            Kind::TreeWalk => match t {
                Term::Eq(h, a) if h.as_str() == "label" => {
                    Ok(Pred::Label(a.as_sym().ok_or_else(bad)?))
                }
                Term::Sym(h) if h.as_str() == "root" => Ok(Pred::AtRoot),
                Term::Eq(h, a) if h.as_str() == "son" => {
                    let i = a.as_sym().and_then(|s| s.as_str().parse().ok()).filter(|&i| i >= 1);
                    Ok(Pred::Son(i.ok_or_else(bad)?))
                }
                _ => Err(bad()),
            },
            Kind::WithIdentity { inner, .. } => inner.compile_pred(t),
            Kind::Product(a, b) => {
                if let Some(q) = t.strip_qualifier("left") {
                    return Ok(Pred::Left(Box::new(a.compile_pred(&q)?)));
                }
                if let Some(q) = t.strip_qualifier("right") {
                    return Ok(Pred::Right(Box::new(b.compile_pred(&q)?)));
                }
                match (a.compile_pred(t), b.compile_pred(t)) {
                    (Ok(_), Ok(_)) => Err(Error::invalid(format!(
                        "predicate '{t}' exists on both sides of {self}; write left.{t} or right.{t}"
                    ))),
                    (Ok(p), Err(_)) => Ok(Pred::Left(Box::new(p))),
                    (Err(_), Ok(p)) => Ok(Pred::Right(Box::new(p))),
                    (Err(_), Err(_)) => Err(bad()),
                }
            }
            Kind::PushdownOf { inner, pure, .. } => match t {
                Term::Eq(h, a) if h.as_str() == "top" => {
                    let g = a.as_sym().ok_or_else(bad)?;
                    if *pure && g != counter_symbol() {
                        return Err(bad());
                    }
                    Ok(Pred::Top(g))
                }
                Term::Sym(h) if h.as_str() == "bottom" => Ok(Pred::Bottom),
                Term::App(h, args) if h.as_str() == "test" && args.len() == 1 => {
                    Ok(Pred::Test(Box::new(inner.compile_pred(&args[0])?)))
                }
                _ => Err(bad()),
            },
            Kind::Lookahead(l) => match t {
                Term::App(h, args) if h.as_str() == "acc" => {
                    let key = single_sym(args).ok_or_else(bad)?;
                    let index = l.key_index(key).ok_or_else(|| {
                        Error::invalid(format!("no look-ahead grammar registered as {key}"))
                    })?;
                    Ok(Pred::Acc(AccRef { key, index, la: l.clone() }))
                }
                _ => l.inner.compile_pred(t),
            },
        }
    }

    pub fn compile_instr(&self, t: &Term) -> Result<Instr> {
        let bad = || bad_term("an instruction", t, self);
        let push_sym = |args: &[Term], counter: bool| -> Result<Symbol> {
            let g = single_sym(args).ok_or_else(bad)?;
            if counter && g != counter_symbol() {
                return Err(bad());
            }
            Ok(g)
        };
        match self.kind() {
            Kind::Trivial => match t {
                Term::Sym(h) if h.as_str() == "id" => Ok(Instr::Id),
                _ => Err(bad()),
            },
            Kind::Pushdown | Kind::Counter => {
                let counter = matches!(self.kind(), Kind::Counter);
                match t {
                    Term::App(h, a) if h.as_str() == "push" => Ok(Instr::Push(push_sym(a, counter)?)),
                    Term::App(h, a) if h.as_str() == "stay" => {
                        Ok(Instr::StayAs(push_sym(a, counter)?))
                    }
                    Term::Sym(h) if h.as_str() == "pop" => Ok(Instr::Pop),
                    Term::Sym(h) if h.as_str() == "stay" => Ok(Instr::Stay),
                    _ => Err(bad()),
                }
            }
            Kind::Countdown => match t {
                Term::Sym(h) if h.as_str() == "dec" => Ok(Instr::Dec),
                _ => Err(bad()),
            },
            Kind::OneWay => match t {
                Term::Sym(h) if h.as_str() == "read" => Ok(Instr::Read),
                _ => Err(bad()),
            },
            Kind::Tree => match t {
                Term::Sym(h) => indexed(*h, "sel_").map(Instr::Sel).ok_or_else(bad),
                Term::App(h, a) if h.as_str() == "sel" => {
                    let i = single_sym(a).and_then(|s| s.as_str().parse().ok()).filter(|&i| i >= 1);
                    i.map(Instr::Sel).ok_or_else(bad)
                }
                _ => Err(bad()),
            },
            Kind::TreeWalk => match t {
                Term::Sym(h) if h.as_str() == "up" => Ok(Instr::Up),
                Term::Sym(h) if h.as_str() == "stay" => Ok(Instr::Stay),
                Term::Sym(h) => indexed(*h, "down_").map(Instr::Down).ok_or_else(bad),
                _ => Err(bad()),
            },
            Kind::TreePushdown => match t {
                Term::App(h, a) if h.as_str() == "expand" && a.len() == 1 => {
                    Ok(Instr::Expand(term_to_tree(&a[0]).ok_or_else(bad)?))
                }
                _ => Err(bad()),
            },
            Kind::WithIdentity { inner, id } => match t {
                Term::Sym(h) if h == id => Ok(Instr::Id),
                _ => inner.compile_instr(t),
            },
            Kind::Product(a, b) => match t {
                Term::Tuple(parts) if parts.len() == 2 => Ok(Instr::Pair(
                    Box::new(a.compile_instr(&parts[0])?),
                    Box::new(b.compile_instr(&parts[1])?),
                )),
                _ => Err(bad()),
            },
            Kind::PushdownOf { inner, pure, stay_with } => match t {
                Term::Sym(h) if h.as_str() == "pop" => Ok(Instr::Pop),
                Term::Sym(h) if h.as_str() == "stay" => Ok(Instr::Stay),
                Term::App(h, a) if h.as_str() == "stay" && a.len() == 1 => {
                    Ok(Instr::StayAs(push_sym(a, *pure)?))
                }
                Term::App(h, a) if h.as_str() == "push" && a.len() == 2 => {
                    let g = push_sym(&a[..1], *pure)?;
                    Ok(Instr::PdPush(g, Box::new(inner.compile_instr(&a[1])?)))
                }
                Term::App(h, a) if h.as_str() == "stay" && a.len() == 2 && *stay_with => {
                    let g = push_sym(&a[..1], *pure)?;
                    Ok(Instr::PdStayWith(g, Box::new(inner.compile_instr(&a[1])?)))
                }
                _ => Err(bad()),
            },
            Kind::Lookahead(l) => l.inner.compile_instr(t),
        }
    }

    pub fn compile_enc(&self, t: &Term) -> Result<Enc> {
        let bad = || bad_term("an encoding", t, self);
        let ranked = |items: &[(Symbol, Option<usize>)]| -> Result<RankedAlphabet> {
            let mut a = RankedAlphabet::new();
            for (s, k) in items {
                a.insert(*s, k.ok_or_else(bad)?)?;
            }
            Ok(a)
        };
        match self.kind() {
            Kind::Trivial => match t {
                Term::Sym(h) if h.as_str() == "en" => Ok(Enc::Unit),
                _ => Err(bad()),
            },
            Kind::Pushdown | Kind::Counter => {
                let counter = matches!(self.kind(), Kind::Counter);
                match t {
                    Term::Sym(g) if !counter || *g == counter_symbol() => Ok(Enc::PushSym(*g)),
                    Term::App(h, a) if h.as_str() == "unary" && a.len() == 2 => {
                        let x = a[0].as_sym().ok_or_else(bad)?;
                        let b = a[1].as_sym().ok_or_else(bad)?;
                        if counter && (x != counter_symbol() || b != counter_symbol()) {
                            return Err(bad());
                        }
                        Ok(Enc::Unary(x, b))
                    }
                    _ => Err(bad()),
                }
            }
            Kind::Countdown => match t {
                Term::Sym(h) if h.as_str() == "en" => Ok(Enc::Count),
                _ => Err(bad()),
            },
            Kind::OneWay => match t {
                Term::Set(items) if items.iter().all(|(_, k)| k.is_none()) => {
                    Ok(Enc::Alphabet(items.iter().map(|(s, _)| *s).collect()))
                }
                _ => Err(bad()),
            },
            Kind::Tree | Kind::TreeWalk => match t {
                Term::Set(items) => {
                    Ok(Enc::Ranked(ranked(items)?, matches!(self.kind(), Kind::TreeWalk)))
                }
                _ => Err(bad()),
            },
            Kind::TreePushdown => match t {
                Term::Sym(s) => Ok(Enc::TreeLeaf(*s)),
                _ => Err(bad()),
            },
            Kind::WithIdentity { inner, .. } => inner.compile_enc(t),
            Kind::Product(a, b) => match t {
                Term::Tuple(p) if p.len() == 2 => Ok(Enc::Pair(
                    Box::new(a.compile_enc(&p[0])?),
                    Box::new(b.compile_enc(&p[1])?),
                )),
                _ => Err(bad()),
            },
            Kind::PushdownOf { inner, pure, .. } => match t {
                Term::Tuple(p) if p.len() == 2 => {
                    let g = p[0].as_sym().ok_or_else(bad)?;
                    if *pure && g != counter_symbol() {
                        return Err(bad());
                    }
                    Ok(Enc::Cell(g, Box::new(inner.compile_enc(&p[1])?)))
                }
                _ => Err(bad()),
            },
            Kind::Lookahead(l) => l.inner.compile_enc(t),
        }
    }

    /// Encodes through a surface encoding term.
    pub fn encode_term(&self, e: &Term, u: &Input) -> Result<Option<Config>> {
        Ok(encode(&self.compile_enc(e)?, u))
    }

    pub fn apply_term(&self, f: &Term, c: &Config) -> Result<Option<Config>> {
        Ok(apply(&self.compile_instr(f)?, c))
    }

    pub fn eval_term_test(&self, t: &Test<Term>, c: &Config) -> Result<bool> {
        let compiled = t.map(&mut |p| self.compile_pred(p))?;
        eval_test(&compiled, c)
    }

    /// Parses a storage expression such as `pd(countdown)`,
    /// `product(oneway+id, pushdown)`, `pd^3` or `la(tree, 5000)`.
    pub fn parse(text: &str) -> Result<StorageType> {
        let mut p = StorageParser { s: text.as_bytes(), pos: 0, src: text };
        let st = p.expr()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing text"));
        }
        Ok(st)
    }
}

impl PartialEq for StorageType {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.to_string() == other.to_string()
    }
}

impl fmt::Display for StorageType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Trivial => f.write_str("s0"),
            Kind::Pushdown => f.write_str("pushdown"),
            Kind::Counter => f.write_str("counter"),
            Kind::Countdown => f.write_str("countdown"),
            Kind::OneWay => f.write_str("oneway"),
            Kind::Tree => f.write_str("tree"),
            Kind::TreeWalk => f.write_str("treewalk"),
            Kind::TreePushdown => f.write_str("treepushdown"),
            Kind::WithIdentity { inner, .. } => write!(f, "{inner}+id"),
            Kind::Product(a, b) => write!(f, "product({a}, {b})"),
            Kind::PushdownOf { inner, pure, stay_with } => {
                let name = if *pure {
                    "pdp"
                } else if *stay_with {
                    "pdx"
                } else {
                    "pd"
                };
                write!(f, "{name}({inner})")
            }
            Kind::Lookahead(l) => {
                if l.step_bound == DEFAULT_LOOKAHEAD_STEPS {
                    write!(f, "la({})", l.inner)
                } else {
                    write!(f, "la({}, {})", l.inner, l.step_bound)
                }
            }
        }
    }
}

impl fmt::Debug for StorageType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct StorageParser<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl StorageParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::invalid(format!("bad storage expression '{}': {msg}", self.src))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        self.src[start..self.pos].to_string()
    }

    fn expr(&mut self) -> Result<StorageType> {
        let name = self.word();
        let mut st = match name.as_str() {
            "s0" | "trivial" => StorageType::trivial(),
            "pushdown" => StorageType::pushdown(),
            "counter" => StorageType::counter(),
            "countdown" => StorageType::countdown(),
            "oneway" => StorageType::one_way(),
            "tree" => StorageType::tree(),
            "treewalk" => StorageType::tree_walk(),
            "treepushdown" => StorageType::tree_pushdown(),
            "pd" | "pdp" | "pdx" if self.eat(b'^') => {
                let n: usize = self.word().parse().map_err(|_| self.err("expected a number after ^"))?;
                if name != "pd" {
                    return Err(self.err("only pd can be iterated"));
                }
                if self.eat(b'(') {
                    let mut s = self.expr()?;
                    if !self.eat(b')') {
                        return Err(self.err("expected ')'"));
                    }
                    for _ in 0..n {
                        s = StorageType::pushdown_of(&s);
                    }
                    s
                } else {
                    StorageType::iterate_pd(n)
                }
            }
            "pd" | "pdp" | "pdx" | "la" | "product" => {
                if !self.eat(b'(') {
                    return Err(self.err("expected '('"));
                }
                let a = self.expr()?;
                let st = match name.as_str() {
                    "pd" => StorageType::pushdown_of(&a),
                    "pdp" => StorageType::pure_pushdown_of(&a),
                    "pdx" => StorageType::pushdown_of_with_stay(&a),
                    "product" => {
                        if !self.eat(b',') {
                            return Err(self.err("product needs two arguments"));
                        }
                        let b = self.expr()?;
                        StorageType::product(&a, &b)
                    }
                    _ => {
                        let bound = if self.eat(b',') {
                            self.word().parse().map_err(|_| self.err("expected a step bound"))?
                        } else {
                            DEFAULT_LOOKAHEAD_STEPS
                        };
                        StorageType::with_lookahead(&a, Vec::new(), Vec::new(), bound)?
                    }
                };
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                st
            }
            "" => return Err(self.err("expected a storage type")),
            other => return Err(self.err(&format!("unknown storage type '{other}'"))),
        };
        while self.eat(b'+') {
            if self.word() != "id" {
                return Err(self.err("expected 'id' after '+'"));
            }
            st = StorageType::with_identity(&st);
        }
        Ok(st)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::parse_word;

    fn pd_word(s: &str) -> Config {
        Config::word(&parse_word(s))
    }

    #[test]
    fn pushdown_instructions() {
        let s = StorageType::pushdown();
        let c = pd_word("#");
        let push = s.compile_instr(&Term::app("push", vec![Term::sym("a")])).unwrap();
        assert_eq!(apply(&push, &c), Some(pd_word("a#")));
        let pop = s.compile_instr(&Term::sym("pop")).unwrap();
        assert_eq!(apply(&pop, &c), None);
        assert_eq!(apply(&pop, &pd_word("a#")), Some(pd_word("#")));
        let stay_b = s.compile_instr(&Term::app("stay", vec![Term::sym("b")])).unwrap();
        assert_eq!(apply(&stay_b, &pd_word("a#")), Some(pd_word("b#")));
        let top = s.compile_pred(&Term::eq("top", sym("#"))).unwrap();
        assert!(eval_pred(&top, &c).unwrap());
        assert!(eval_pred(&Pred::Bottom, &c).unwrap());
    }

    #[test]
    fn countdown_and_oneway() {
        assert_eq!(apply(&Instr::Dec, &Config::Int(3)), Some(Config::Int(2)));
        assert_eq!(apply(&Instr::Dec, &Config::Int(0)), None);
        let s = StorageType::one_way();
        let e = s.compile_enc(&Term::Set(vec![(sym("a"), None), (sym("b"), None)])).unwrap();
        assert_eq!(encode(&e, &Input::Str(parse_word("abc"))), None);
        let ab = encode(&e, &Input::Str(parse_word("ab"))).unwrap();
        assert_eq!(ab, Config::input(&parse_word("ab")));
        let b = apply(&Instr::Read, &ab).unwrap();
        assert_eq!(b, Config::input(&parse_word("b")));
        assert!(eval_pred(&Pred::First(sym("b")), &b).unwrap());
        assert_eq!(apply(&Instr::Read, &apply(&Instr::Read, &b).unwrap()), None);
        assert_eq!(apply(&Instr::Read, &Config::input(&[])), None);
    }

    #[test]
    fn tree_instructions() {
        let t = Tree::parse("sigma(a, tau(b))").unwrap();
        let c = Config::Tree(t.clone());
        assert_eq!(apply(&Instr::Sel(2), &c), Some(Config::Tree(Tree::parse("tau(b)").unwrap())));
        assert_eq!(apply(&Instr::Sel(3), &c), None);
        let z = Tree::parse("f(y2, g(y1))").unwrap();
        assert_eq!(
            apply(&Instr::Expand(z), &c),
            Some(Config::Tree(Tree::parse("f(tau(b), g(a))").unwrap()))
        );
        let bad = Tree::parse("f(y3)").unwrap();
        assert_eq!(apply(&Instr::Expand(bad), &c), None);
        let w = Config::Focus(t, Seq::empty());
        let d2 = apply(&Instr::Down(2), &w).unwrap();
        assert!(eval_pred(&Pred::Son(2), &d2).unwrap());
        assert!(eval_pred(&Pred::Label(sym("tau")), &d2).unwrap());
        assert!(!eval_pred(&Pred::AtRoot, &d2).unwrap());
        assert_eq!(apply(&Instr::Up, &d2), Some(w.clone()));
        assert_eq!(apply(&Instr::Up, &w), None);
    }

    #[test]
    fn pushdown_of_storage() {
        let s = StorageType::parse("pd(countdown)").unwrap();
        let e = s.compile_enc(&Term::Tuple(vec![Term::sym("#"), Term::sym("en")])).unwrap();
        let c = encode(&e, &Input::Int(1)).unwrap();
        let f = s.compile_instr(&Term::app("push", vec![Term::sym("$"), Term::sym("dec")])).unwrap();
        let c2 = apply(&f, &c).unwrap();
        assert_eq!(c2.to_string(), "($,0)(#,1)");
        assert_eq!(apply(&f, &c2), None);
        let null = s.compile_pred(&Term::app("test", vec![Term::sym("null")])).unwrap();
        assert!(eval_pred(&null, &c2).unwrap());
        assert!(!eval_pred(&null, &c).unwrap());
    }

    #[test]
    fn product_and_identity() {
        let s = StorageType::parse("product(oneway+id, pushdown)").unwrap();
        assert_eq!(s.to_string(), "product(oneway+id, pushdown)");
        let p = s.compile_pred(&Term::eq("first", sym("a"))).unwrap();
        assert_eq!(p, Pred::Left(Box::new(Pred::First(sym("a")))));
        let f = s.compile_instr(&Term::Tuple(vec![Term::sym("id"), Term::sym("stay")])).unwrap();
        assert_eq!(f, Instr::Pair(Box::new(Instr::Id), Box::new(Instr::Stay)));
        let both = StorageType::product(&StorageType::pushdown(), &StorageType::pushdown());
        assert!(both.compile_pred(&Term::sym("bottom")).is_err());
        assert!(both.compile_pred(&Term::sym("left.bottom")).is_ok());
        assert_eq!(StorageType::with_identity(&StorageType::trivial()).identity(), Some(Term::sym("id~1")));
    }

    #[test]
    fn noetherian_flags() {
        for (s, n) in [
            ("s0", false),
            ("pushdown", false),
            ("counter", false),
            ("countdown", true),
            ("oneway", true),
            ("tree", true),
            ("treewalk", false),
            ("treepushdown", false),
            ("pd(countdown)", false),
        ] {
            assert_eq!(StorageType::parse(s).unwrap().is_noetherian(), n, "{s}");
        }
    }

    #[test]
    fn exclusivity_axioms() {
        assert!(exclusive(&Pred::Top(sym("a")), &Pred::Top(sym("b"))));
        assert!(!exclusive(&Pred::Top(sym("a")), &Pred::Top(sym("a"))));
        assert!(exclusive(&Pred::Empty, &Pred::First(sym("a"))));
        assert!(exclusive(&Pred::AtRoot, &Pred::Son(1)));
        assert!(!exclusive(&Pred::Null, &Pred::Null));
    }
}
