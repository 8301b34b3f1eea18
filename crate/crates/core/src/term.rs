//! Surface syntax for predicates, instructions and encodings, and boolean
//! tests over predicates.

use crate::symbol::{sym, Symbol};
use std::fmt;

/// A predicate, instruction or encoding as written in grammar text.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Sym(Symbol),
    App(Symbol, Vec<Term>),
    Eq(Symbol, Box<Term>),
    Tuple(Vec<Term>),
    /// `{a, b}` or, with ranks, `{sigma:2, a:0}`.
    Set(Vec<(Symbol, Option<usize>)>),
}

impl Term {
    pub fn sym(s: &str) -> Term {
        Term::Sym(sym(s))
    }

    pub fn app(head: &str, args: Vec<Term>) -> Term {
        Term::App(sym(head), args)
    }

    pub fn eq(head: &str, arg: Symbol) -> Term {
        Term::Eq(sym(head), Box::new(Term::Sym(arg)))
    }

    pub fn head(&self) -> Option<Symbol> {
        match self {
            Term::Sym(s) | Term::App(s, _) | Term::Eq(s, _) => Some(*s),
            _ => None,
        }
    }

    pub fn as_sym(&self) -> Option<Symbol> {
        match self {
            Term::Sym(s) => Some(*s),
            _ => None,
        }
    }

    /// Removes a `prefix.` qualifier from the head symbol.
    pub fn strip_qualifier(&self, prefix: &str) -> Option<Term> {
        let head = self.head()?;
        let rest = head.as_str().strip_prefix(prefix)?.strip_prefix('.')?;
        if rest.is_empty() {
            return None;
        }
        let h = sym(rest);
        Some(match self {
            Term::Sym(_) => Term::Sym(h),
            Term::App(_, a) => Term::App(h, a.clone()),
            Term::Eq(_, a) => Term::Eq(h, a.clone()),
            _ => unreachable!(),
        })
    }

    /// Adds a `prefix.` qualifier to the head symbol.
    pub fn qualify(&self, prefix: &str) -> Term {
        let q = |s: &Symbol| sym(&format!("{prefix}.{s}"));
        match self {
            Term::Sym(s) => Term::Sym(q(s)),
            Term::App(s, a) => Term::App(q(s), a.clone()),
            Term::Eq(s, a) => Term::Eq(q(s), a.clone()),
            t => t.clone(),
        }
    }

    /// Every symbol occurring in the term.
    pub fn symbols(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Sym(s) => out.push(*s),
            Term::App(s, a) => {
                out.push(*s);
                for t in a {
                    t.symbols(out);
                }
            }
            Term::Eq(s, a) => {
                out.push(*s);
                a.symbols(out);
            }
            Term::Tuple(a) => {
                for t in a {
                    t.symbols(out);
                }
            }
            Term::Set(items) => out.extend(items.iter().map(|(s, _)| *s)),
        }
    }
}

pub(crate) fn is_plain_ident(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with('#')
        && !crate::grammar::KEYWORDS.contains(&s)
        && !s.contains("->")
        && s.chars().all(|c| {
            !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | ';' | '=' | '{' | '}' | ':' | '"')
        })
}

pub(crate) fn write_ident(f: &mut fmt::Formatter<'_>, s: Symbol) -> fmt::Result {
    if is_plain_ident(s.as_str()) || s.as_str() == "#" {
        f.write_str(s.as_str())
    } else {
        write!(f, "{:?}", s.as_str())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Sym(s) => write_ident(f, *s),
            Term::App(s, args) => {
                write_ident(f, *s)?;
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Eq(s, a) => {
                write_ident(f, *s)?;
                write!(f, "={a}")
            }
            Term::Tuple(args) => {
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Set(items) => {
                f.write_str("{")?;
                for (i, (s, k)) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_ident(f, *s)?;
                    if let Some(k) = k {
                        write!(f, ":{k}")?;
                    }
                }
                f.write_str("}")
            }
        }
    }
}

/// A boolean expression over atoms (predicates).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Test<P> {
    True,
    False,
    Atom(P),
    Not(Box<Test<P>>),
    And(Vec<Test<P>>),
    Or(Vec<Test<P>>),
}

impl<P> Test<P> {
    pub fn atom(p: P) -> Self {
        Test::Atom(p)
    }

    pub fn negate(self) -> Self {
        match self {
            Test::True => Test::False,
            Test::False => Test::True,
            Test::Not(b) => *b,
            t => Test::Not(Box::new(t)),
        }
    }

    /// Conjunction, flattening nested conjunctions and dropping `true`.
    pub fn and(parts: Vec<Test<P>>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Test::True => {}
                Test::False => return Test::False,
                Test::And(v) => out.extend(v),
                t => out.push(t),
            }
        }
        match out.len() {
            0 => Test::True,
            1 => out.pop().unwrap(),
            _ => Test::And(out),
        }
    }

    pub fn or(parts: Vec<Test<P>>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Test::False => {}
                Test::True => return Test::True,
                Test::Or(v) => out.extend(v),
                t => out.push(t),
            }
        }
        match out.len() {
            0 => Test::False,
            1 => out.pop().unwrap(),
            _ => Test::Or(out),
        }
    }

    pub fn map<Q, E>(&self, f: &mut impl FnMut(&P) -> Result<Q, E>) -> Result<Test<Q>, E> {
        Ok(match self {
            Test::True => Test::True,
            Test::False => Test::False,
            Test::Atom(p) => Test::Atom(f(p)?),
            Test::Not(b) => Test::Not(Box::new(b.map(f)?)),
            Test::And(v) => Test::And(v.iter().map(|t| t.map(f)).collect::<Result<_, _>>()?),
            Test::Or(v) => Test::Or(v.iter().map(|t| t.map(f)).collect::<Result<_, _>>()?),
        })
    }

    /// Replaces atoms by tests, simplifying constants.
    pub fn substitute<Q>(&self, f: &mut impl FnMut(&P) -> Test<Q>) -> Test<Q> {
        match self {
            Test::True => Test::True,
            Test::False => Test::False,
            Test::Atom(p) => f(p),
            Test::Not(b) => b.substitute(f).negate(),
            Test::And(v) => Test::and(v.iter().map(|t| t.substitute(f)).collect()),
            Test::Or(v) => Test::or(v.iter().map(|t| t.substitute(f)).collect()),
        }
    }

    pub fn atoms<'a>(&'a self, out: &mut Vec<&'a P>) {
        match self {
            Test::Atom(p) => out.push(p),
            Test::Not(b) => b.atoms(out),
            Test::And(v) | Test::Or(v) => v.iter().for_each(|t| t.atoms(out)),
            _ => {}
        }
    }

    /// Evaluation with short-circuiting and a fallible atom valuation.
    pub fn eval<E>(&self, f: &mut impl FnMut(&P) -> Result<bool, E>) -> Result<bool, E> {
        Ok(match self {
            Test::True => true,
            Test::False => false,
            Test::Atom(p) => f(p)?,
            Test::Not(b) => !b.eval(f)?,
            Test::And(v) => {
                for t in v {
                    if !t.eval(f)? {
                        return Ok(false);
                    }
                }
                true
            }
            Test::Or(v) => {
                for t in v {
                    if t.eval(f)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}

impl<P: Clone + Ord> Test<P> {
    /// Disjunctive normal form as a list of conjunctions of literals
    /// (atom, polarity). Returns `None` if the form would exceed `cap`.
    pub fn dnf(&self, cap: usize) -> Option<Vec<Vec<(P, bool)>>> {
        self.dnf_pol(true, cap)
    }

    fn dnf_pol(&self, pos: bool, cap: usize) -> Option<Vec<Vec<(P, bool)>>> {
        match (self, pos) {
            (Test::True, true) | (Test::False, false) => Some(vec![vec![]]),
            (Test::True, false) | (Test::False, true) => Some(vec![]),
            (Test::Atom(p), pol) => Some(vec![vec![(p.clone(), pol)]]),
            (Test::Not(b), pol) => b.dnf_pol(!pol, cap),
            (Test::And(v), true) | (Test::Or(v), false) => {
                let mut acc: Vec<Vec<(P, bool)>> = vec![vec![]];
                for t in v {
                    let d = t.dnf_pol(pos, cap)?;
                    let mut next = Vec::new();
                    for a in &acc {
                        for c in &d {
                            let mut m = a.clone();
                            m.extend(c.iter().cloned());
                            next.push(m);
                            if next.len() > cap {
                                return None;
                            }
                        }
                    }
                    acc = next;
                }
                Some(acc)
            }
            (Test::Or(v), true) | (Test::And(v), false) => {
                let mut acc = Vec::new();
                for t in v {
                    acc.extend(t.dnf_pol(pos, cap)?);
                    if acc.len() > cap {
                        return None;
                    }
                }
                Some(acc)
            }
        }
    }
}

fn prec<P>(t: &Test<P>) -> u8 {
    match t {
        Test::Or(_) => 0,
        Test::And(_) => 1,
        _ => 2,
    }
}

impl<P: fmt::Display> Test<P> {
    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = prec(self) < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Test::True => f.write_str("true")?,
            Test::False => f.write_str("false")?,
            Test::Atom(p) => write!(f, "{p}")?,
            Test::Not(b) => {
                f.write_str("not ")?;
                b.write_at(f, 2)?;
            }
            Test::And(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    t.write_at(f, 2)?;
                }
            }
            Test::Or(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" or ")?;
                    }
                    t.write_at(f, 1)?;
                }
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl<P: fmt::Display> fmt::Display for Test<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
