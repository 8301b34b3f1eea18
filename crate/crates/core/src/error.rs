use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid grammar{}: {msg}", context(.grammar, .rule))]
    Invalid { grammar: Option<String>, rule: Option<usize>, msg: String },

    #[error("{construction}: precondition failed{}: {msg}", context(.grammar, .rule))]
    Precondition {
        construction: String,
        grammar: Option<String>,
        rule: Option<usize>,
        msg: String,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("look-ahead undecided: {0}")]
    Unknown(String),
}

fn context(grammar: &Option<String>, rule: &Option<usize>) -> String {
    let mut s = String::new();
    if let Some(g) = grammar {
        s.push_str(&format!(" in grammar '{g}'"));
    }
    if let Some(r) = rule {
        s.push_str(&format!(" at rule {r}"));
    }
    s
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::Invalid { grammar: None, rule: None, msg: msg.into() }
    }

    pub fn precondition(construction: &str, msg: impl Into<String>) -> Error {
        Error::Precondition {
            construction: construction.to_string(),
            grammar: None,
            rule: None,
            msg: msg.into(),
        }
    }

    /// Attaches grammar name and rule index where not already set.
    pub fn at(self, grammar: &str, rule: Option<usize>) -> Error {
        match self {
            Error::Invalid { grammar: g, rule: r, msg } => Error::Invalid {
                grammar: g.or_else(|| Some(grammar.to_string())),
                rule: r.or(rule),
                msg,
            },
            Error::Precondition { construction, grammar: g, rule: r, msg } => {
                Error::Precondition {
                    construction,
                    grammar: g.or_else(|| Some(grammar.to_string())),
                    rule: r.or(rule),
                    msg,
                }
            }
            e => e,
        }
    }

    /// Resource exhaustion and undecided look-ahead, as opposed to bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::Unknown(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
