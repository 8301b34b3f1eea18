//! Ranked trees and ranked alphabets.

use crate::error::Error;
use crate::symbol::{sym, Symbol, Word};
use indexmap::IndexMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree(Arc<TreeNode>);

#[derive(PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeNode {
    pub label: Symbol,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn new(label: Symbol, children: Vec<Tree>) -> Tree {
        Tree(Arc::new(TreeNode { label, children }))
    }

    pub fn leaf(label: Symbol) -> Tree {
        Tree::new(label, Vec::new())
    }

    pub fn label(&self) -> Symbol {
        self.0.label
    }

    pub fn children(&self) -> &[Tree] {
        &self.0.children
    }

    pub fn rank(&self) -> usize {
        self.0.children.len()
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Tree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(Tree::depth).max().unwrap_or(0)
    }

    /// Node at a path of 0-based child indices.
    pub fn at(&self, path: &[u32]) -> Option<&Tree> {
        let mut t = self;
        for &i in path {
            t = t.children().get(i as usize)?;
        }
        Some(t)
    }

    /// Leaves left to right, omitting `skip` (the empty-string leaf).
    pub fn yield_word(&self, skip: Option<Symbol>) -> Word {
        let mut out = Vec::new();
        self.collect_yield(skip, &mut out);
        out
    }

    fn collect_yield(&self, skip: Option<Symbol>, out: &mut Word) {
        if self.children().is_empty() {
            if Some(self.label()) != skip {
                out.push(self.label());
            }
        } else {
            for c in self.children() {
                c.collect_yield(skip, out);
            }
        }
    }

    /// Prefix (Polish) notation, one symbol per node.
    pub fn prefix(&self) -> Word {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t.label());
            for c in t.children().iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Rebuilds a tree from prefix notation given a rank function.
    pub fn from_prefix(word: &[Symbol], rank: impl Fn(Symbol) -> Option<usize>) -> Option<Tree> {
        let mut pos = 0;
        let t = Self::from_prefix_at(word, &rank, &mut pos)?;
        (pos == word.len()).then_some(t)
    }

    fn from_prefix_at(
        word: &[Symbol],
        rank: &impl Fn(Symbol) -> Option<usize>,
        pos: &mut usize,
    ) -> Option<Tree> {
        let label = *word.get(*pos)?;
        *pos += 1;
        let k = rank(label)?;
        let mut children = Vec::with_capacity(k);
        for _ in 0..k {
            children.push(Self::from_prefix_at(word, rank, pos)?);
        }
        Some(Tree::new(label, children))
    }

    pub fn parse(text: &str) -> Result<Tree, Error> {
        let mut p = TreeParser { chars: text.chars().collect(), pos: 0 };
        let t = p.tree()?;
        p.ws();
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input after tree"));
        }
        Ok(t)
    }

    /// Root-to-leaf paths: an inner node with label σ entered at child i
    /// contributes `σ.i`, the leaf contributes its own label.
    pub fn paths(&self) -> Vec<Word> {
        let mut out = Vec::new();
        self.collect_paths(&mut Vec::new(), &mut out);
        out
    }

    fn collect_paths(&self, prefix: &mut Word, out: &mut Vec<Word>) {
        if self.children().is_empty() {
            let mut w = prefix.clone();
            w.push(self.label());
            out.push(w);
            return;
        }
        for (i, c) in self.children().iter().enumerate() {
            prefix.push(path_symbol(self.label(), i + 1));
            c.collect_paths(prefix, out);
            prefix.pop();
        }
    }

    /// Whether every node is labelled by a symbol of the alphabet with the
    /// matching rank.
    pub fn conforms(&self, alphabet: &RankedAlphabet) -> bool {
        alphabet.rank(self.label()) == Some(self.rank())
            && self.children().iter().all(|c| c.conforms(alphabet))
    }
}

/// The path-alphabet symbol `σ.i`.
pub fn path_symbol(s: Symbol, i: usize) -> Symbol {
    sym(&format!("{s}.{i}"))
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty()
        || s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '"'))
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.label().as_str();
        if needs_quotes(l) {
            write!(f, "{l:?}")?;
        } else {
            f.write_str(l)?;
        }
        if !self.children().is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children().iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct TreeParser {
    chars: Vec<char>,
    pos: usize,
}

impl TreeParser {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { line: 1, col: self.pos + 1, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn label(&mut self) -> Result<Symbol, Error> {
        self.ws();
        if self.chars.get(self.pos) == Some(&'"') {
            self.pos += 1;
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos] != '"' {
                self.pos += 1;
            }
            if self.pos >= self.chars.len() {
                return Err(self.err("unterminated quoted label"));
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            self.pos += 1;
            return Ok(sym(&s));
        }
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_whitespace() || matches!(c, '(' | ')' | ',') {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a node label"));
        }
        Ok(sym(&self.chars[start..self.pos].iter().collect::<String>()))
    }

    fn tree(&mut self) -> Result<Tree, Error> {
        let label = self.label()?;
        self.ws();
        let mut children = Vec::new();
        if self.chars.get(self.pos) == Some(&'(') {
            self.pos += 1;
            loop {
                children.push(self.tree()?);
                self.ws();
                match self.chars.get(self.pos) {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
        }
        Ok(Tree::new(label, children))
    }
}

/// A finite ranked alphabet. Each symbol has exactly one rank.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct RankedAlphabet {
    ranks: IndexMap<Symbol, usize>,
}

impl RankedAlphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Symbol, usize)>>(pairs: I) -> Result<Self, Error> {
        let mut a = Self::new();
        for (s, k) in pairs {
            a.insert(s, k)?;
        }
        Ok(a)
    }

    pub fn insert(&mut self, s: Symbol, k: usize) -> Result<(), Error> {
        match self.ranks.get(&s) {
            Some(&old) if old != k => Err(Error::invalid(format!(
                "symbol {s} declared with ranks {old} and {k}"
            ))),
            _ => {
                self.ranks.insert(s, k);
                Ok(())
            }
        }
    }

    pub fn rank(&self, s: Symbol) -> Option<usize> {
        self.ranks.get(&s).copied()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.ranks.contains_key(&s)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.ranks.iter().map(|(s, k)| (*s, *k))
    }

    pub fn of_rank(&self, k: usize) -> Vec<Symbol> {
        self.symbols().filter(|(_, r)| *r == k).map(|(s, _)| s).collect()
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.values().copied().max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Parses `c:3, a:0, b:0` with an optional leading `alphabet` keyword and
    /// trailing `;`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut t = text.trim();
        if let Some(r) = t.strip_prefix("alphabet") {
            t = r.trim();
        }
        let t = t.trim_end_matches(';').trim();
        let mut a = Self::new();
        if t.is_empty() {
            return Ok(a);
        }
        for part in t.split(',') {
            let part = part.trim();
            let (name, rank) = part.rsplit_once(':').ok_or_else(|| {
                Error::invalid(format!("expected name:rank in alphabet, got '{part}'"))
            })?;
            let name = name.trim().trim_matches('"');
            let rank: usize = rank
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad rank in '{part}'")))?;
            a.insert(sym(name), rank)?;
        }
        Ok(a)
    }

    /// All trees of size at most `max_size`, grouped by size (index = size).
    pub fn trees_by_size(&self, max_size: usize) -> Vec<Vec<Tree>> {
        let mut by: Vec<Vec<Tree>> = vec![Vec::new(); max_size + 1];
        for n in 1..=max_size {
            let mut out = Vec::new();
            for (s, k) in self.symbols() {
                if k == 0 {
                    if n == 1 {
                        out.push(Tree::leaf(s));
                    }
                } else if n > k {
                    for kids in forests(&by, k, n - 1) {
                        out.push(Tree::new(s, kids));
                    }
                }
            }
            by[n] = out;
        }
        by
    }
}

/// All sequences of `k` trees from `by` whose sizes sum to `total`.
fn forests(by: &[Vec<Tree>], k: usize, total: usize) -> Vec<Vec<Tree>> {
    if k == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(k - 1) {
        if first >= by.len() {
            break;
        }
        let rests = forests(by, k - 1, total - first);
        for t in &by[first] {
            for r in &rests {
                let mut v = Vec::with_capacity(k);
                v.push(t.clone());
                v.extend(r.iter().cloned());
                out.push(v);
            }
        }
    }
    out
}

impl fmt::Display for RankedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols().map(|(s, k)| format!("{s}:{k}")).collect();
        f.write_str(&parts.join(", "))
    }
}
