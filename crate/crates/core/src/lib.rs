//! Grammars with storage.
//!
//! A grammar rewrites nonterminals that carry a configuration of some
//! storage type (pushdown, counter, tree, ...). Rules are guarded by tests
//! on the configuration and pass modified configurations to the
//! nonterminals they introduce. This crate provides the storage types, a
//! text format, a bounded derivation engine, the classical constructions
//! between grammar classes, and operations on path languages of trees.

pub mod constructions;
pub mod corpus;
pub mod delta;
pub mod engine;
pub mod error;
pub mod grammar;
pub mod seq;
pub mod storage;
pub mod symbol;
pub mod term;
pub mod tree;

pub use error::{Error, Result};
pub use grammar::{parse_grammar, Class, Grammar, Item, Rule};
pub use storage::{Config, Input, Remaining, StorageType};
pub use symbol::{sym, Symbol, Word};
pub use term::{Term, Test};
pub use tree::{RankedAlphabet, Tree};
