//! Grammars with storage: data model, text format, desugaring, validation,
//! determinism checks and normal forms.

mod analysis;
mod desugar;
mod normal;
mod parse;
mod print;

pub use analysis::{
    classify, is_deterministic, is_racceptor_deterministic, satisfies, validate, Determinism,
    ValidationReport,
};
pub(crate) use analysis::unsatisfiable;
pub use desugar::desugar;
pub use normal::{cfp_test_normal_form, is_cfext_normal, is_reg_normal, is_rt_normal, lift_cf,
    normalize_cfext, normalize_reg, normalize_rt};
pub use parse::parse_grammar;

use crate::symbol::{Fresh, Symbol};
use crate::term::{Term, Test};
use crate::tree::RankedAlphabet;
use crate::storage::StorageType;
use indexmap::IndexMap;
use std::fmt;

pub(crate) const KEYWORDS: &[&str] = &["if", "then", "else", "and", "or", "not", "true", "false"];

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Class {
    Reg,
    Rt,
    Cf,
    CfExt,
}

impl Class {
    pub fn keyword(self) -> &'static str {
        match self {
            Class::Reg => "reg",
            Class::Rt => "rt",
            Class::Cf => "cf",
            Class::CfExt => "cfext",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Class> {
        Some(match s.to_ascii_lowercase().as_str() {
            "reg" => Class::Reg,
            "rt" => Class::Rt,
            "cf" => Class::Cf,
            "cfext" | "cf_ext" => Class::CfExt,
            _ => return None,
        })
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Reg => "REG",
            Class::Rt => "RT",
            Class::Cf => "CF",
            Class::CfExt => "CF_ext",
        })
    }
}

/// One item of a right-hand side. Tree right-hand sides are stored in
/// prefix order: a terminal of rank k is followed by its k subtrees, and a
/// call is a leaf.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Item {
    T(Symbol),
    /// Nonterminal with an instruction chain `B(f1; ...; fk)`, k ≥ 1.
    Call(Symbol, Vec<Term>),
    /// Trailing `B(id)` of an extended grammar, with the adjoined identity.
    Tail(Symbol),
}

impl Item {
    pub fn call(b: Symbol, f: Term) -> Item {
        Item::Call(b, vec![f])
    }

    pub fn nonterminal(&self) -> Option<Symbol> {
        match self {
            Item::Call(b, _) | Item::Tail(b) => Some(*b),
            Item::T(_) => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rule {
    pub lhs: Symbol,
    pub test: Test<Term>,
    pub rhs: Vec<Item>,
}

impl Rule {
    pub fn new(lhs: Symbol, test: Test<Term>, rhs: Vec<Item>) -> Rule {
        Rule { lhs, test, rhs }
    }

    pub fn terminals(&self) -> usize {
        self.rhs.iter().filter(|i| matches!(i, Item::T(_))).count()
    }

    pub fn calls(&self) -> impl Iterator<Item = &Item> {
        self.rhs.iter().filter(|i| !matches!(i, Item::T(_)))
    }
}

/// A grammar (transducer or acceptor) over a storage type.
#[derive(Clone)]
pub struct Grammar {
    pub name: String,
    pub storage: StorageType,
    pub class: Class,
    pub nonterminals: Vec<Symbol>,
    /// Terminal alphabet; ranks are present for tree grammars.
    pub terminals: IndexMap<Symbol, Option<usize>>,
    pub initial: Symbol,
    pub encoding: Term,
    pub rules: Vec<Rule>,
    /// Final states, for acceptance by final state.
    pub finals: Vec<Symbol>,
}

impl Grammar {
    pub fn new(name: &str, storage: StorageType, class: Class, initial: Symbol, encoding: Term) -> Grammar {
        Grammar {
            name: name.to_string(),
            storage,
            class,
            nonterminals: vec![initial],
            terminals: IndexMap::new(),
            initial,
            encoding,
            rules: Vec::new(),
            finals: Vec::new(),
        }
    }

    pub fn add_nonterminal(&mut self, a: Symbol) {
        if !self.nonterminals.contains(&a) {
            self.nonterminals.push(a);
        }
    }

    pub fn add_terminal(&mut self, t: Symbol, rank: Option<usize>) {
        self.terminals.insert(t, rank);
    }

    pub fn rules_of(&self, a: Symbol) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules.iter().enumerate().filter(move |(_, r)| r.lhs == a)
    }

    pub fn is_ranked(&self) -> bool {
        !self.terminals.is_empty() && self.terminals.values().all(Option::is_some)
    }

    pub fn rank(&self, t: Symbol) -> Option<usize> {
        self.terminals.get(&t).copied().flatten()
    }

    pub fn ranked_alphabet(&self) -> RankedAlphabet {
        let mut a = RankedAlphabet::new();
        for (s, k) in &self.terminals {
            a.insert(*s, k.unwrap_or(0)).expect("terminal declared once");
        }
        a
    }

    /// A name generator avoiding all nonterminals and terminals.
    pub fn fresh(&self) -> Fresh {
        Fresh::new(self.nonterminals.iter().copied().chain(self.terminals.keys().copied()))
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        print::print_grammar(self)
    }

    /// Rebuilds the right-hand side of a tree rule as nested tree terms.
    pub fn rhs_trees(&self, rhs: &[Item]) -> Option<Vec<RhsTree>> {
        let mut pos = 0;
        let mut out = Vec::new();
        while pos < rhs.len() {
            out.push(self.rhs_tree_at(rhs, &mut pos)?);
        }
        Some(out)
    }

    fn rhs_tree_at(&self, rhs: &[Item], pos: &mut usize) -> Option<RhsTree> {
        let item = rhs.get(*pos)?.clone();
        *pos += 1;
        match item {
            Item::T(s) => {
                let k = self.rank(s).unwrap_or(0);
                let mut kids = Vec::new();
                for _ in 0..k {
                    kids.push(self.rhs_tree_at(rhs, pos)?);
                }
                Some(RhsTree::Node(s, kids))
            }
            other => Some(RhsTree::Leaf(other)),
        }
    }
}

/// Right-hand side of a tree rule in nested form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RhsTree {
    Node(Symbol, Vec<RhsTree>),
    Leaf(Item),
}

impl RhsTree {
    pub fn flatten(&self, out: &mut Vec<Item>) {
        match self {
            RhsTree::Node(s, kids) => {
                out.push(Item::T(*s));
                for k in kids {
                    k.flatten(out);
                }
            }
            RhsTree::Leaf(i) => out.push(i.clone()),
        }
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.to_text() == other.to_text()
    }
}
