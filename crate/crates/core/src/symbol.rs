//! Interned symbols.
//!
//! A symbol is a pointer to a leaked, interned string. Equality and hashing
//! use the pointer, ordering uses the text.

use parking_lot::Mutex;
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

#[derive(Clone, Copy)]
pub struct Symbol(&'static str);

fn table() -> &'static Mutex<HashSet<&'static str>> {
    static TABLE: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashSet::new()))
}

impl Symbol {
    pub fn new(text: &str) -> Symbol {
        let mut t = table().lock();
        if let Some(s) = t.get(text) {
            return Symbol(s);
        }
        let leaked: &'static str = Box::leak(text.to_owned().into_boxed_str());
        t.insert(leaked);
        Symbol(leaked)
    }

    pub fn as_str(&self) -> &'static str {
        self.0
    }
}

pub fn sym(text: &str) -> Symbol {
    Symbol::new(text)
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0.as_ptr(), other.0.as_ptr()) && self.0.len() == other.0.len()
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.as_ptr() as usize).hash(state);
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            self.0.cmp(other.0)
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A word over symbols: an output string, an input string or a path.
pub type Word = Vec<Symbol>;

/// Length-lexicographic comparison of words (shorter first, then by text).
pub fn length_lex(a: &[Symbol], b: &[Symbol]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Renders a word. Single-character alphabets are concatenated, anything
/// else is separated by spaces. The empty word renders as `λ`.
pub fn show_word(w: &[Symbol]) -> String {
    if w.is_empty() {
        return "λ".to_string();
    }
    if w.iter().all(|s| s.as_str().chars().count() == 1) {
        w.iter().map(|s| s.as_str()).collect()
    } else {
        w.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// Parses a word written either with spaces between symbols or, when there
/// is no whitespace, one symbol per character. `λ` and the empty string are
/// the empty word.
pub fn parse_word(text: &str) -> Word {
    let t = text.trim();
    if t.is_empty() || t == "λ" {
        return Vec::new();
    }
    if t.contains(char::is_whitespace) {
        t.split_whitespace().map(sym).collect()
    } else {
        t.chars().map(|c| sym(&c.to_string())).collect()
    }
}

/// Generates names that do not clash with a set of taken names.
pub struct Fresh {
    taken: HashSet<Symbol>,
}

impl Fresh {
    pub fn new<I: IntoIterator<Item = Symbol>>(taken: I) -> Fresh {
        Fresh { taken: taken.into_iter().collect() }
    }

    pub fn reserve(&mut self, s: Symbol) {
        self.taken.insert(s);
    }

    /// `base` itself if free, else `base~1`, `base~2`, ...
    pub fn named(&mut self, base: &str) -> Symbol {
        let s = sym(base);
        if self.taken.insert(s) {
            return s;
        }
        self.numbered(base)
    }

    /// Always numbered: `base~1`, `base~2`, ...
    pub fn numbered(&mut self, base: &str) -> Symbol {
        let mut i = 1usize;
        loop {
            let s = sym(&format!("{base}~{i}"));
            if self.taken.insert(s) {
                return s;
            }
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        assert_eq!(sym("abc"), sym("abc"));
        assert_ne!(sym("abc"), sym("abd"));
        assert!(sym("a") < sym("b"));
    }

    #[test]
    fn words_render_and_parse() {
        let w = parse_word("aab");
        assert_eq!(show_word(&w), "aab");
        let p = parse_word("c.2 c.1 a");
        assert_eq!(p.len(), 3);
        assert_eq!(show_word(&p), "c.2 c.1 a");
        assert_eq!(show_word(&[]), "λ");
    }

    #[test]
    fn fresh_names_avoid_taken() {
        let mut f = Fresh::new([sym("A"), sym("A~1")]);
        assert_eq!(f.named("A"), sym("A~2"));
        assert_eq!(f.named("B"), sym("B"));
        assert_eq!(f.named("B"), sym("B~1"));
    }
}
