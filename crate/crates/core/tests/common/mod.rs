#![allow(dead_code)]

use gws_core::delta::{tree_delta, DeltaSpec};
use gws_core::engine::{derive_step, generate, Bounds, Compiled, FormItem};
use gws_core::grammar::is_racceptor_deterministic;
use gws_core::symbol::show_word;
use gws_core::tree::path_symbol;
use gws_core::{parse_grammar, Config, Grammar, Input, Item, RankedAlphabet, Symbol, Tree, Word};
use proptest::prelude::*;
use std::collections::{BTreeSet, HashSet, VecDeque};

pub fn word(s: &str) -> Word {
    gws_core::symbol::parse_word(s)
}

pub fn words(items: &[&str]) -> BTreeSet<Word> {
    items.iter().map(|s| word(s)).collect()
}

pub fn show_all(ws: &BTreeSet<Word>) -> Vec<String> {
    ws.iter().map(|w| show_word(w)).collect()
}

/// All words over `letters` of length at most `n`.
pub fn all_words(letters: &[&str], n: usize) -> Vec<Word> {
    let syms: Vec<Symbol> = letters.iter().map(|s| Symbol::new(s)).collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for s in &syms {
                let mut v: Word = w.clone();
                v.push(*s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

// ---- delta: pruned construction against enumerate-and-filter ----

pub fn small_alphabet() -> RankedAlphabet {
    RankedAlphabet::parse("f:2, g:1, a:0, b:0").unwrap()
}

/// Root-to-leaf path codes, computed independently of the library.
pub fn naive_paths(t: &Tree) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    fn go(t: &Tree, prefix: &mut Word, out: &mut BTreeSet<Word>) {
        if t.children().is_empty() {
            let mut w = prefix.clone();
            w.push(t.label());
            out.insert(w);
            return;
        }
        for (i, c) in t.children().iter().enumerate() {
            prefix.push(Symbol::new(&format!("{}.{}", t.label(), i + 1)));
            go(c, prefix, out);
            prefix.pop();
        }
    }
    go(t, &mut Vec::new(), &mut out);
    out
}

pub fn naive_tree_delta(alphabet: &RankedAlphabet, lang: &BTreeSet<Word>, size: usize) -> BTreeSet<Tree> {
    alphabet
        .trees_by_size(size)
        .into_iter()
        .flatten()
        .filter(|t| naive_paths(t).is_subset(lang))
        .collect()
}

/// Path words of length at most 3 over the path alphabet of `small_alphabet`.
pub fn path_word_pool() -> Vec<Word> {
    let a = small_alphabet();
    let mut inner = Vec::new();
    let mut leaves = Vec::new();
    for (s, k) in a.symbols() {
        if k == 0 {
            leaves.push(s);
        }
        for i in 1..=k {
            inner.push(path_symbol(s, i));
        }
    }
    let mut out = Vec::new();
    let mut prefixes: Vec<Word> = vec![Vec::new()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for p in &prefixes {
            for l in &leaves {
                let mut w = p.clone();
                w.push(*l);
                out.push(w);
            }
            for s in &inner {
                let mut w = p.clone();
                w.push(*s);
                next.push(w);
            }
        }
        prefixes = next;
    }
    out
}

/// A finite path language: the paths of a few small trees plus some
/// arbitrary words, minus a few.
pub fn path_language() -> impl Strategy<Value = BTreeSet<Word>> {
    let trees: Vec<Tree> = small_alphabet().trees_by_size(5).into_iter().flatten().collect();
    let pool = path_word_pool();
    let (nt, np) = (trees.len(), pool.len());
    (
        prop::collection::vec(0..nt, 0..4),
        prop::collection::vec(0..np, 0..6),
        prop::collection::vec(0..np, 0..3),
    )
        .prop_map(move |(ts, add, drop)| {
            let mut l: BTreeSet<Word> = BTreeSet::new();
            for i in ts {
                l.extend(naive_paths(&trees[i]));
            }
            for i in add {
                l.insert(pool[i].clone());
            }
            for i in drop {
                l.remove(&pool[i]);
            }
            l
        })
}

pub fn check_delta_against_naive(lang: &BTreeSet<Word>, size: usize) -> Result<(), String> {
    let a = small_alphabet();
    let fast = tree_delta(&DeltaSpec::finite(a.clone(), lang.iter().cloned(), size))
        .map_err(|e| e.to_string())?;
    let slow = naive_tree_delta(&a, lang, size);
    if fast.items != slow {
        return Err(format!(
            "L = {:?}: pruned {:?} vs naive {:?}",
            show_all(lang),
            fast.items,
            slow
        ));
    }
    Ok(())
}

// ---- prefix-freeness of empty-store deterministic regular acceptors ----

/// Per (nonterminal, top symbol): 0 = λ-rule, 1 = read a, 2 = read b,
/// 3 = read a and b, 4 = silent move, 5 = nothing. Targets and
/// instructions are indices.
pub type RegChoice = (u8, u8, u8, u8, u8);

pub fn det_reg_choices() -> impl Strategy<Value = Vec<RegChoice>> {
    prop::collection::vec((0u8..6, 0u8..3, 0u8..3, 0u8..3, 0u8..3), 6)
}

pub fn det_reg_text(choices: &[RegChoice]) -> String {
    let nts = ["A", "B", "C"];
    let tops = ["x", "#"];
    let instrs = ["push(x)", "pop", "stay"];
    let mut rules = Vec::new();
    for (k, &(kind, t1, i1, t2, i2)) in choices.iter().enumerate() {
        let (n, top) = (nts[k / 2], tops[k % 2]);
        let (m1, f1) = (nts[t1 as usize], instrs[i1 as usize]);
        let (m2, f2) = (nts[t2 as usize], instrs[i2 as usize]);
        match kind {
            0 => rules.push(format!("{n} -> if top={top} then ;")),
            1 => rules.push(format!("{n} -> if top={top} then \"a\" {m1}({f1});")),
            2 => rules.push(format!("{n} -> if top={top} then \"b\" {m1}({f1});")),
            3 => {
                rules.push(format!("{n} -> if top={top} then \"a\" {m1}({f1});"));
                rules.push(format!("{n} -> if top={top} then \"b\" {m2}({f2});"));
            }
            4 => rules.push(format!("{n} -> if top={top} then {m1}({f1});")),
            _ => {}
        }
    }
    format!(
        "name det; storage pushdown; class REG; nonterminals A, B, C; terminals a, b; \
         initial A; encoding #; rules:\n{}\n",
        rules.join("\n")
    )
}

pub fn check_prefix_free(choices: &[RegChoice], max_len: usize) -> Result<(), String> {
    let g = parse_grammar(&det_reg_text(choices)).map_err(|e| e.to_string())?;
    if !is_racceptor_deterministic(&g).map_err(|e| e.to_string())? {
        return Err(format!("not r-acceptor deterministic:\n{}", g.to_text()));
    }
    let sample = match generate(&g, &Bounds::with_len(max_len)) {
        Ok(s) => s,
        Err(e) if e.is_resource() => return Ok(()),
        Err(e) => return Err(e.to_string()),
    };
    let ws: Vec<&Word> = sample.items.iter().collect();
    for u in &ws {
        for v in &ws {
            if u.len() < v.len() && v.starts_with(u) {
                return Err(format!("{} is a prefix of {} in\n{}", show_word(u), show_word(v), g.to_text()));
            }
        }
    }
    Ok(())
}

// ---- partiality closure and pushdown axioms ----

pub const PD_INSTRS: &[&str] = &["push(a)", "push(b)", "pop", "stay(a)", "stay(b)", "stay"];
pub const PD_CD_INSTRS: &[&str] = &["push(a, dec)", "push(b, dec)", "pop", "stay(a)", "stay"];

fn instr_grammar(storage: &str, encoding: &str, instrs: &[&str], chain: &[usize]) -> Grammar {
    let mut rules: Vec<String> = instrs.iter().map(|f| format!("A -> B({f});")).collect();
    let seq: Vec<&str> = chain.iter().map(|&i| instrs[i]).collect();
    if seq.is_empty() {
        rules.push("A -> B(stay);".into());
    } else {
        rules.push(format!("A -> B({});", seq.join("; ")));
    }
    for t in ["a", "b", "#"] {
        rules.push(format!("T -> if top={t} then ;"));
    }
    let text = format!(
        "name ops; storage {storage}; nonterminals A, B, T; terminals ; initial A; \
         encoding {encoding}; rules:\n{}\n",
        rules.join("\n")
    );
    parse_grammar(&text).unwrap()
}

fn step(g: &Grammar, rule: usize, c: &Config) -> Option<Config> {
    let form = vec![FormItem::N(Symbol::new("A"), c.clone())];
    match derive_step(g, &form, 0, rule).unwrap() {
        Some(v) => match v.as_slice() {
            [FormItem::N(_, d)] => Some(d.clone()),
            _ => panic!("unexpected form"),
        },
        None => None,
    }
}

/// Applies the chain rule and then the rules of the intermediate
/// nonterminals that desugaring introduced, until `B` is reached.
fn run_chain(g: &Grammar, rule: usize, c: &Config) -> Option<Config> {
    let mut form = vec![FormItem::N(Symbol::new("A"), c.clone())];
    let mut r = rule;
    loop {
        form = derive_step(g, &form, 0, r).unwrap()?;
        let FormItem::N(n, d) = &form[0] else { panic!("unexpected form") };
        if *n == Symbol::new("B") {
            return Some(d.clone());
        }
        r = g.rules_of(*n).next().expect("intermediate nonterminal without rule").0;
    }
}

fn top_is(g: &Grammar, c: &Config, t: &str) -> bool {
    let (i, _) = g
        .rules
        .iter()
        .enumerate()
        .find(|(_, r)| r.lhs == Symbol::new("T") && format!("{}", r.test).contains(t))
        .unwrap();
    g.storage.eval_term_test(&g.rules[i].test, c).unwrap()
}

/// Applies `chain` one instruction at a time and as a single composed
/// call; checks that the composed call is undefined exactly when some
/// prefix is, and that push followed by pop is the identity with the
/// pushed symbol on top in between.
pub fn check_instruction_chain(count_down: bool, chain: &[usize]) -> Result<(), String> {
    let (storage, encoding, instrs, input) = if count_down {
        ("pd(countdown)", "(#, en)", PD_CD_INSTRS, Input::Int(6))
    } else {
        ("pushdown", "#", PD_INSTRS, Input::Unit)
    };
    let g = instr_grammar(storage, encoding, instrs, chain);
    let c0 = Compiled::new(&g).unwrap().encode(&input).ok_or("encoding undefined")?;
    let composed = run_chain(&g, instrs.len(), &c0);
    let mut cur = Some(c0);
    for &i in chain {
        let Some(c) = cur.clone() else { break };
        for (k, sym) in [(0usize, "a"), (1, "b")] {
            if let Some(pushed) = step(&g, k, &c) {
                if !top_is(&g, &pushed, &format!("top={sym}")) {
                    return Err(format!("top after {} on {c} is not {sym}", instrs[k]));
                }
                if step(&g, 2, &pushed).as_ref() != Some(&c) {
                    return Err(format!("pop after {} on {c} does not restore it", instrs[k]));
                }
            }
        }
        cur = step(&g, i, &c);
    }
    let expected = cur;
    if composed != expected {
        return Err(format!("composed {composed:?} vs stepwise {expected:?} for {chain:?}"));
    }
    Ok(())
}

pub fn instruction_chain() -> impl Strategy<Value = (bool, Vec<usize>)> {
    any::<bool>().prop_flat_map(|cd| {
        let n = if cd { PD_CD_INSTRS.len() } else { PD_INSTRS.len() };
        (Just(cd), prop::collection::vec(0..n, 0..=20))
    })
}

// ---- leftmost generation against rewriting at any position ----

/// Terminal words of length at most `max_len` reachable from the initial
/// form by rewriting any nonterminal occurrence. Forms longer than
/// `max_form` are dropped.
pub fn any_position_language(g: &Grammar, u: &Input, max_len: usize, max_form: usize) -> BTreeSet<Word> {
    let c0 = Compiled::new(g).unwrap().encode(u).unwrap();
    let start = vec![FormItem::N(g.initial, c0)];
    let mut seen: HashSet<Vec<FormItem>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut out = BTreeSet::new();
    while let Some(form) = queue.pop_front() {
        let terminals = form.iter().filter(|x| matches!(x, FormItem::T(_))).count();
        if terminals == form.len() {
            out.insert(form.iter().map(|x| match x { FormItem::T(t) => *t, _ => unreachable!() }).collect());
            continue;
        }
        for pos in 0..form.len() {
            if !matches!(form[pos], FormItem::N(..)) {
                continue;
            }
            for r in 0..g.rules.len() {
                if let Some(next) = derive_step(g, &form, pos, r).unwrap() {
                    let t = next.iter().filter(|x| matches!(x, FormItem::T(_))).count();
                    if t <= max_len && next.len() <= max_form && seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    out
}

/// Rule bodies: each item is a terminal (0, 1) or a call of S, A, B (2..5).
pub fn cf_rules() -> impl Strategy<Value = Vec<Vec<Vec<u8>>>> {
    prop::collection::vec(prop::collection::vec(prop::collection::vec(0u8..5, 1..=3), 1..=3), 3)
}

pub fn cf_text(rules: &[Vec<Vec<u8>>]) -> String {
    let nts = ["S", "A", "B"];
    let mut out = Vec::new();
    for (k, bodies) in rules.iter().enumerate() {
        for body in bodies {
            let mut items: Vec<String> = body
                .iter()
                .map(|&x| match x {
                    0 => "\"a\"".to_string(),
                    1 => "\"b\"".to_string(),
                    n => format!("{}(id)", nts[n as usize - 2]),
                })
                .collect();
            if body.iter().all(|&x| x >= 2) {
                items.push("\"a\"".into());
            }
            out.push(format!("{} -> {};", nts[k], items.join(" ")));
        }
    }
    format!(
        "name cf; storage s0; nonterminals S, A, B; terminals a, b; initial S; encoding en; rules:\n{}\n",
        out.join("\n")
    )
}

/// Every right-hand side has a terminal, so a form never has more items
/// than the word it derives and the any-position search is exhaustive.
pub fn check_leftmost(rules: &[Vec<Vec<u8>>], max_len: usize) -> Result<(), String> {
    let g = parse_grammar(&cf_text(rules)).map_err(|e| e.to_string())?;
    compare_leftmost(&g, &Input::Unit, max_len, max_len)
}

pub fn compare_leftmost(g: &Grammar, u: &Input, max_len: usize, max_form: usize) -> Result<(), String> {
    let mut b = Bounds::with_len(max_len);
    b.max_steps = 400;
    let s = gws_core::engine::transduce(g, u, &b).map_err(|e| e.to_string())?;
    if s.complete_up_to.map_or(true, |n| n < max_len) {
        return Err(format!("leftmost sample not complete up to {max_len}"));
    }
    let left = s.words_up_to(max_len);
    let any = any_position_language(g, u, max_len, max_form);
    if left != any {
        return Err(format!("leftmost {:?} vs any position {:?}\n{}", show_all(&left), show_all(&any), g.to_text()));
    }
    Ok(())
}

pub fn is_call(it: &Item) -> bool {
    matches!(it, Item::Call(..) | Item::Tail(_))
}
