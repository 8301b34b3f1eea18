//! Text format parser.
//!
//! ```text
//! storage pd(countdown);
//! nonterminals A, B, C;
//! terminals a;
//! initial A;
//! encoding (#, en);
//! rules:
//! A -> if not test(null) then "a" B(push($, dec)) else "a";
//! ```
//!
//! `#` starts a comment when preceded by whitespace (or the start of the
//! text) and followed by whitespace (or the end of the text); otherwise it is
//! an ordinary name character, so `top=#` and `push(#)` work.

use super::{analysis::check, desugar, Class, Grammar, Item, Rule, KEYWORDS};
use crate::error::{Error, Result};
use crate::storage::{LookaheadEntry, StorageType};
use crate::symbol::{sym, Symbol};
use crate::term::{Term, Test};
use indexmap::IndexMap;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Punct(char),
    Arrow,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    start: usize,
    line: usize,
    col: usize,
}

fn is_punct(c: char) -> bool {
    matches!(c, '(' | ')' | ',' | ';' | '=' | '{' | '}' | ':')
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let at = |i: usize| chars.get(i).map(|x| x.1);
    let offset = |i: usize| chars.get(i).map_or(src.len(), |x| x.0);
    while i < chars.len() {
        let c = chars[i].1;
        if c == '\n' {
            line += 1;
            i += 1;
            line_start = i;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let col = i - line_start + 1;
        if c == '#'
            && at(i + 1).map_or(true, |n| n.is_whitespace())
            && (i == 0 || chars[i - 1].1.is_whitespace())
        {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let start = offset(i);
        if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match at(i) {
                    None | Some('\n') => {
                        return Err(Error::Parse { line, col, msg: "unterminated string".into() })
                    }
                    Some('"') => break,
                    Some('\\') if at(i + 1).is_some() => {
                        s.push(at(i + 1).unwrap());
                        i += 2;
                    }
                    Some(ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Token { tok: Tok::Quoted(s), start, line, col });
            continue;
        }
        if c == '-' && at(i + 1) == Some('>') {
            i += 2;
            out.push(Token { tok: Tok::Arrow, start, line, col });
            continue;
        }
        if is_punct(c) {
            i += 1;
            out.push(Token { tok: Tok::Punct(c), start, line, col });
            continue;
        }
        let mut s = String::new();
        while let Some(ch) = at(i) {
            if ch.is_whitespace() || is_punct(ch) || ch == '"' || (ch == '-' && at(i + 1) == Some('>')) {
                break;
            }
            s.push(ch);
            i += 1;
        }
        out.push(Token { tok: Tok::Ident(s), start, line, col });
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    nonterminals: Vec<Symbol>,
    terminals: IndexMap<Symbol, Option<usize>>,
    /// Whether `id` in a trailing call means the adjoined identity.
    tail_id: bool,
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    storage: Option<StorageType>,
    class: Option<Class>,
    initial: Option<Symbol>,
    encoding: Option<Term>,
    finals: Vec<Symbol>,
    lookahead: Vec<(Symbol, Grammar)>,
    exclusive: Vec<Vec<Symbol>>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (line, col) = match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => {
                let line = self.src.lines().count().max(1);
                (line, self.src.lines().last().map_or(1, |l| l.len() + 1))
            }
        };
        Error::Parse { line, col, msg: msg.into() }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn is_punct(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Punct(c))
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        if self.is_punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.is_kw(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{kw}'")))
        }
    }

    /// A name: identifier (not a keyword) or quoted string.
    fn name(&mut self) -> Result<Symbol> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                self.pos += 1;
                Ok(sym(&s))
            }
            Some(Tok::Quoted(s)) => {
                self.pos += 1;
                Ok(sym(&s))
            }
            _ => Err(self.err("expected a name")),
        }
    }

    /// Raw source text up to (not including) the next `;` at depth zero.
    fn raw_until_semicolon(&mut self) -> Result<String> {
        let start = self.toks.get(self.pos).map(|t| t.start).ok_or_else(|| self.err("unexpected end"))?;
        let mut depth = 0i32;
        while let Some(t) = self.toks.get(self.pos) {
            match t.tok {
                Tok::Punct('(') | Tok::Punct('{') => depth += 1,
                Tok::Punct(')') | Tok::Punct('}') => depth -= 1,
                Tok::Punct(';') if depth == 0 => {
                    let s = self.src[start..t.start].to_string();
                    self.pos += 1;
                    return Ok(s);
                }
                _ => {}
            }
            self.pos += 1;
        }
        Err(self.err("expected ';'"))
    }

    /// Raw source text of a `{ ... }` block (without the braces).
    fn raw_block(&mut self) -> Result<String> {
        self.expect_punct('{')?;
        let start = self.toks.get(self.pos).map(|t| t.start).ok_or_else(|| self.err("unexpected end"))?;
        let mut depth = 1i32;
        while let Some(t) = self.toks.get(self.pos) {
            match t.tok {
                Tok::Punct('{') => depth += 1,
                Tok::Punct('}') => {
                    depth -= 1;
                    if depth == 0 {
                        let s = self.src[start..t.start].to_string();
                        self.pos += 1;
                        return Ok(s);
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
        Err(self.err("unterminated block"))
    }

    fn name_list(&mut self) -> Result<Vec<(Symbol, Option<usize>)>> {
        let mut out = Vec::new();
        if self.is_punct(';') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            let n = self.name()?;
            let rank = if self.is_punct(':') {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Ident(k)) => {
                        Some(k.parse().map_err(|_| self.err(format!("bad rank '{k}'")))?)
                    }
                    _ => return Err(self.err("expected a rank")),
                }
            } else {
                None
            };
            out.push((n, rank));
            if self.is_punct(',') {
                self.pos += 1;
            } else {
                self.expect_punct(';')?;
                return Ok(out);
            }
        }
    }

    fn header(&mut self) -> Result<Header> {
        let mut h = Header::default();
        loop {
            let kw = match self.peek() {
                Some(Tok::Ident(s)) => s.clone(),
                _ => return Err(self.err("expected a declaration or 'rules:'")),
            };
            self.pos += 1;
            match kw.as_str() {
                "rules" => {
                    self.expect_punct(':')?;
                    return Ok(h);
                }
                "name" => {
                    h.name = Some(self.name()?.to_string());
                    self.expect_punct(';')?;
                }
                "storage" => {
                    let raw = self.raw_until_semicolon()?;
                    h.storage = Some(StorageType::parse(&raw).map_err(|e| self.err(e.to_string()))?);
                }
                "class" => {
                    let c = self.name()?;
                    h.class = Some(
                        Class::from_keyword(c.as_str())
                            .ok_or_else(|| self.err(format!("unknown class '{c}'")))?,
                    );
                    self.expect_punct(';')?;
                }
                "nonterminals" => {
                    for (n, r) in self.name_list()? {
                        if r.is_some() {
                            return Err(self.err("nonterminals have no rank"));
                        }
                        if !self.nonterminals.contains(&n) {
                            self.nonterminals.push(n);
                        }
                    }
                }
                "terminals" => {
                    for (n, r) in self.name_list()? {
                        self.terminals.insert(n, r);
                    }
                }
                "initial" => {
                    h.initial = Some(self.name()?);
                    self.expect_punct(';')?;
                }
                "encoding" => {
                    h.encoding = Some(self.term()?);
                    self.expect_punct(';')?;
                }
                "finals" => {
                    h.finals = self.name_list()?.into_iter().map(|x| x.0).collect();
                }
                "lookahead" => {
                    let key = self.name()?;
                    let line = self.toks.get(self.pos).map_or(1, |t| t.line);
                    let raw = self.raw_block()?;
                    let g = parse_grammar(&raw).map_err(|e| match e {
                        Error::Parse { line: l, col, msg } => Error::Parse {
                            line: line + l - 1,
                            col,
                            msg: format!("in look-ahead grammar {key}: {msg}"),
                        },
                        e => e,
                    })?;
                    h.lookahead.push((key, g));
                }
                "exclusive" => {
                    h.exclusive.push(self.name_list()?.into_iter().map(|x| x.0).collect());
                }
                other => return Err(self.err(format!("unknown declaration '{other}'"))),
            }
        }
    }

    /// term := name ['(' term,* ')'] ['=' term] | '(' term, term,... ')' | '{' names '}'
    fn term(&mut self) -> Result<Term> {
        if self.is_punct('(') {
            self.pos += 1;
            let mut parts = vec![self.term()?];
            while self.is_punct(',') {
                self.pos += 1;
                parts.push(self.term()?);
            }
            self.expect_punct(')')?;
            return Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Term::Tuple(parts) });
        }
        if self.is_punct('{') {
            self.pos += 1;
            let mut items = Vec::new();
            if !self.is_punct('}') {
                loop {
                    let n = self.name()?;
                    let r = if self.is_punct(':') {
                        self.pos += 1;
                        match self.next() {
                            Some(Tok::Ident(k)) => Some(k.parse().map_err(|_| self.err("bad rank"))?),
                            _ => return Err(self.err("expected a rank")),
                        }
                    } else {
                        None
                    };
                    items.push((n, r));
                    if self.is_punct(',') {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            }
            self.expect_punct('}')?;
            return Ok(Term::Set(items));
        }
        let head = self.name()?;
        if self.is_punct('(') {
            self.pos += 1;
            let mut args = Vec::new();
            if !self.is_punct(')') {
                args.push(self.term()?);
                while self.is_punct(',') {
                    self.pos += 1;
                    args.push(self.term()?);
                }
            }
            self.expect_punct(')')?;
            return Ok(Term::App(head, args));
        }
        if self.is_punct('=') {
            self.pos += 1;
            let arg = self.term()?;
            return Ok(Term::Eq(head, Box::new(arg)));
        }
        Ok(Term::Sym(head))
    }

    fn test(&mut self) -> Result<Test<Term>> {
        let mut parts = vec![self.test_and()?];
        while self.is_kw("or") {
            self.pos += 1;
            parts.push(self.test_and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Test::Or(parts) })
    }

    fn test_and(&mut self) -> Result<Test<Term>> {
        let mut parts = vec![self.test_not()?];
        while self.is_kw("and") {
            self.pos += 1;
            parts.push(self.test_not()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Test::And(parts) })
    }

    fn test_not(&mut self) -> Result<Test<Term>> {
        if self.is_kw("not") {
            self.pos += 1;
            return Ok(Test::Not(Box::new(self.test_not()?)));
        }
        if self.is_kw("true") {
            self.pos += 1;
            return Ok(Test::True);
        }
        if self.is_kw("false") {
            self.pos += 1;
            return Ok(Test::False);
        }
        if self.is_punct('(') {
            self.pos += 1;
            let t = self.test()?;
            self.expect_punct(')')?;
            return Ok(t);
        }
        // test(b) over the storage under a pushdown distributes over b
        if self.is_kw("test") && self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::Punct('(')) {
            self.pos += 2;
            let inner = self.test()?;
            self.expect_punct(')')?;
            return Ok(inner.substitute(&mut |p| Test::Atom(Term::app("test", vec![p.clone()]))));
        }
        Ok(Test::Atom(self.term()?))
    }

    fn is_nonterminal(&self, s: Symbol) -> bool {
        self.nonterminals.contains(&s)
    }

    fn chain(&mut self) -> Result<Vec<Term>> {
        self.expect_punct('(')?;
        let mut fs = vec![self.chain_element()?];
        while self.is_punct(';') {
            self.pos += 1;
            fs.push(self.chain_element()?);
        }
        self.expect_punct(')')?;
        Ok(fs)
    }

    /// `f` or `f1, f2` (a tuple instruction of a product storage).
    fn chain_element(&mut self) -> Result<Term> {
        let first = self.term()?;
        if !self.is_punct(',') {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.is_punct(',') {
            self.pos += 1;
            parts.push(self.term()?);
        }
        Ok(Term::Tuple(parts))
    }

    /// One right-hand side item, possibly a terminal with subtrees.
    fn item(&mut self, out: &mut Vec<Item>) -> Result<()> {
        let (name, quoted) = match self.peek().cloned() {
            Some(Tok::Quoted(s)) => (sym(&s), true),
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => (sym(&s), false),
            _ => return Err(self.err("expected a terminal or nonterminal")),
        };
        self.pos += 1;
        if !quoted && self.is_nonterminal(name) {
            if !self.is_punct('(') {
                return Err(self.err(format!("nonterminal {name} needs an instruction, e.g. {name}(f)")));
            }
            let chain = self.chain()?;
            out.push(Item::Call(name, chain));
            return Ok(());
        }
        if !quoted && !self.terminals.contains_key(&name) {
            return Err(self.err(format!("'{name}' is neither a declared nonterminal nor a terminal")));
        }
        out.push(Item::T(name));
        if self.is_punct('(') {
            self.pos += 1;
            loop {
                self.item(out)?;
                if self.is_punct(',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            self.expect_punct(')')?;
        }
        Ok(())
    }

    fn rhs(&mut self) -> Result<Vec<Item>> {
        let mut out = Vec::new();
        while !self.is_punct(';') && !self.is_kw("else") && self.peek().is_some() {
            self.item(&mut out)?;
        }
        if self.tail_id {
            if let Some(Item::Call(b, chain)) = out.last() {
                if chain.len() == 1 && chain[0] == Term::sym("id") {
                    let b = *b;
                    out.pop();
                    out.push(Item::Tail(b));
                }
            }
        }
        Ok(out)
    }

    fn rules(&mut self) -> Result<Vec<Rule>> {
        let mut rules = Vec::new();
        while self.peek().is_some() {
            let lhs = self.name()?;
            if !self.is_nonterminal(lhs) {
                return Err(self.err(format!("left-hand side {lhs} is not a declared nonterminal")));
            }
            if self.next() != Some(Tok::Arrow) {
                self.pos -= 1;
                return Err(self.err("expected '->'"));
            }
            if self.is_kw("if") {
                self.pos += 1;
                let test = self.test()?;
                self.expect_kw("then")?;
                let yes = self.rhs()?;
                let no = if self.is_kw("else") {
                    self.pos += 1;
                    Some(self.rhs()?)
                } else {
                    None
                };
                self.expect_punct(';')?;
                rules.push(Rule::new(lhs, test.clone(), yes));
                if let Some(no) = no {
                    rules.push(Rule::new(lhs, test.negate(), no));
                }
            } else {
                let rhs = self.rhs()?;
                self.expect_punct(';')?;
                rules.push(Rule::new(lhs, Test::True, rhs));
            }
        }
        Ok(rules)
    }
}

/// Parses, desugars and validates a grammar.
pub fn parse_grammar(src: &str) -> Result<Grammar> {
    let g = parse_raw(src)?;
    let g = desugar(&g)?;
    check(&g)?;
    Ok(g)
}

/// Parses without desugaring or validation.
pub(crate) fn parse_raw(src: &str) -> Result<Grammar> {
    let toks = lex(src)?;
    let mut p = Parser {
        src,
        toks,
        pos: 0,
        nonterminals: Vec::new(),
        terminals: IndexMap::new(),
        tail_id: false,
    };
    let h = p.header()?;
    let mut storage = h.storage.clone().ok_or_else(|| p.err("missing 'storage' declaration"))?;
    if let Some(la) = storage.lookahead().cloned() {
        let entries = h
            .lookahead
            .into_iter()
            .map(|(k, g)| LookaheadEntry::new(k, g))
            .collect();
        storage = StorageType::with_lookahead(&la.inner, entries, h.exclusive, la.step_bound)?;
    } else if !h.lookahead.is_empty() {
        return Err(p.err("look-ahead grammars need a la(...) storage type"));
    }
    p.tail_id = h.class == Some(Class::CfExt)
        || (h.class.is_none() && storage.compile_instr(&Term::sym("id")).is_err());
    let rules = p.rules()?;
    let initial = h.initial.ok_or_else(|| p.err("missing 'initial' declaration"))?;
    let encoding = h.encoding.ok_or_else(|| p.err("missing 'encoding' declaration"))?;
    let has_tail = rules.iter().any(|r| r.rhs.iter().any(|i| matches!(i, Item::Tail(_))));
    let class = match h.class {
        Some(c) => c,
        None if has_tail => Class::CfExt,
        None => Class::Cf,
    };
    let mut g = Grammar::new(h.name.as_deref().unwrap_or(""), storage, class, initial, encoding);
    g.nonterminals = p.nonterminals.clone();
    g.terminals = p.terminals.clone();
    g.rules = rules;
    g.finals = h.finals;
    if h.class.is_none() {
        g.class = super::classify(&g).0;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_hash_names() {
        let src = "# a comment\nstorage pushdown;\nnonterminals A;\nterminals a;\ninitial A;\nencoding #;\nrules:\nA -> if top=# then \"a\" A(push(#)) ; # trailing\nA -> ;\n";
        let g = parse_raw(src).unwrap();
        assert_eq!(g.rules.len(), 2);
        assert_eq!(g.encoding, Term::sym("#"));
    }

    #[test]
    fn errors_carry_positions() {
        let src = "storage pushdown;\nnonterminals A;\ninitial A;\nencoding #;\nrules:\nA -> B(pop);\n";
        match parse_raw(src) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn if_then_else_gives_two_rules() {
        let src = "storage countdown;\nnonterminals A;\nterminals a;\ninitial A;\nencoding en;\nrules:\nA -> if null then \"a\" else A(dec) A(dec);\n";
        let g = parse_raw(src).unwrap();
        assert_eq!(g.rules.len(), 2);
        assert_eq!(g.rules[1].test, Test::Not(Box::new(Test::Atom(Term::sym("null")))));
    }
}
