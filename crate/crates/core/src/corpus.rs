//! Worked grammars shipped with the crate.

use crate::error::{Error, Result};
use crate::grammar::{parse_grammar, Grammar};

pub const FILES: &[(&str, &str)] = &[
    ("g1", include_str!("../corpus/g1.gws")),
    ("g2", include_str!("../corpus/g2.gws")),
    ("g3", include_str!("../corpus/g3.gws")),
    ("g4", include_str!("../corpus/g4.gws")),
    ("g5", include_str!("../corpus/g5.gws")),
    ("g6", include_str!("../corpus/g6.gws")),
    ("g6_literal", include_str!("../corpus/g6_literal.gws")),
    ("g7", include_str!("../corpus/g7.gws")),
    ("g1_tree", include_str!("../corpus/g1_tree.gws")),
    ("g2_tree", include_str!("../corpus/g2_tree.gws")),
    ("ex1_paths", include_str!("../corpus/ex1_paths.gws")),
    ("ex2_paths", include_str!("../corpus/ex2_paths.gws")),
    ("ex1_marked", include_str!("../corpus/ex1_marked.gws")),
    ("tree_pd", include_str!("../corpus/tree_pd.gws")),
];

pub fn source(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a corpus grammar by name.
pub fn load(name: &str) -> Result<Grammar> {
    parse_grammar(source(name).ok_or_else(|| Error::Unknown(format!("no corpus grammar {name}")))?)
}
