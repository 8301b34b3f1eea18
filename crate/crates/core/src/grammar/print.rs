use super::{Grammar, Item, RhsTree};
use crate::term::{Term, Test};
use std::fmt::Write;

fn ident(s: &str) -> String {
    if crate::term::is_plain_ident(s) || s == "#" {
        s.to_string()
    } else {
        format!("{s:?}")
    }
}

fn quoted(s: &str) -> String {
    format!("{s:?}")
}

fn item(out: &mut String, it: &Item) {
    match it {
        Item::T(t) => out.push_str(&quoted(t.as_str())),
        Item::Call(b, chain) => {
            let fs: Vec<String> = chain
                .iter()
                .map(|f| match f {
                    Term::Tuple(parts) => parts.iter().map(Term::to_string).collect::<Vec<_>>().join(", "),
                    _ => f.to_string(),
                })
                .collect();
            let _ = write!(out, "{}({})", ident(b.as_str()), fs.join("; "));
        }
        Item::Tail(b) => {
            let _ = write!(out, "{}(id)", ident(b.as_str()));
        }
    }
}

fn tree(out: &mut String, t: &RhsTree) {
    match t {
        RhsTree::Leaf(i) => item(out, i),
        RhsTree::Node(s, kids) => {
            out.push_str(&quoted(s.as_str()));
            if !kids.is_empty() {
                out.push('(');
                for (i, k) in kids.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    tree(out, k);
                }
                out.push(')');
            }
        }
    }
}

pub(super) fn rhs_text(g: &Grammar, rhs: &[Item]) -> String {
    let mut out = String::new();
    let trees = if g.is_ranked() { g.rhs_trees(rhs) } else { None };
    match trees {
        Some(ts) => {
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                tree(&mut out, t);
            }
        }
        None => {
            for (i, it) in rhs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                item(&mut out, it);
            }
        }
    }
    out
}

fn names(v: impl Iterator<Item = String>) -> String {
    v.collect::<Vec<_>>().join(", ")
}

pub(super) fn print_grammar(g: &Grammar) -> String {
    let mut out = String::new();
    if !g.name.is_empty() {
        let _ = writeln!(out, "name {};", ident(&g.name));
    }
    let _ = writeln!(out, "storage {};", g.storage);
    if let Some(la) = g.storage.lookahead() {
        for e in &la.entries {
            let _ = writeln!(out, "lookahead {} {{", ident(e.key.as_str()));
            for line in e.grammar.to_text().lines() {
                let _ = writeln!(out, "  {line}");
            }
            out.push_str("}\n");
        }
        for group in &la.exclusive {
            let _ = writeln!(out, "exclusive {};", names(group.iter().map(|k| ident(k.as_str()))));
        }
    }
    let _ = writeln!(out, "class {};", g.class.keyword());
    let _ = writeln!(out, "nonterminals {};", names(g.nonterminals.iter().map(|n| ident(n.as_str()))));
    let _ = writeln!(
        out,
        "terminals {};",
        names(g.terminals.iter().map(|(t, r)| match r {
            Some(k) => format!("{}:{k}", quoted(t.as_str())),
            None => quoted(t.as_str()),
        }))
    );
    let _ = writeln!(out, "initial {};", ident(g.initial.as_str()));
    let _ = writeln!(out, "encoding {};", g.encoding);
    if !g.finals.is_empty() {
        let _ = writeln!(out, "finals {};", names(g.finals.iter().map(|n| ident(n.as_str()))));
    }
    out.push_str("rules:\n");
    for r in &g.rules {
        let _ = write!(out, "{} -> ", ident(r.lhs.as_str()));
        if r.test != Test::True {
            let _ = write!(out, "if {} then ", r.test);
        }
        out.push_str(&rhs_text(g, &r.rhs));
        out.push_str(";\n");
    }
    out
}
