//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its elapsed time and limit; the test fails if any line fails.

mod common;

use common::*;
use gws_core::constructions::*;
use gws_core::delta::{delta, re_witness, tree_delta, DeltaSpec};
use gws_core::engine::*;
use gws_core::grammar::{is_deterministic, lift_cf, Determinism};
use gws_core::symbol::show_word;
use gws_core::{corpus, parse_grammar, sym, Grammar, Input, RankedAlphabet, Tree, Word};
use proptest::test_runner::{Config as RunnerConfig, TestCaseError, TestRunner};
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond { Ok(()) } else { Err(msg()) }
}

fn e2s(e: gws_core::Error) -> String {
    e.to_string()
}

fn a_pow(n: usize) -> Word {
    vec![sym("a"); n]
}

fn abc(n: usize) -> Word {
    let mut w = vec![sym("a"); n];
    w.extend(vec![sym("b"); n]);
    w.extend(vec![sym("c"); n]);
    w
}

fn certified(s: &LanguageSample<Word>, n: usize, what: &str) -> Check {
    ensure(s.complete_up_to.map_or(false, |k| k >= n), || {
        format!("{what}: sample only complete up to {:?}, need {n}", s.complete_up_to)
    })
}

fn c1_g1_transduction() -> Check {
    let g1 = corpus::load("g1").map_err(e2s)?;
    for n in 0..=6u32 {
        let s = transduce(&g1, &Input::Int(n as u64), &Bounds::with_len(64)).map_err(e2s)?;
        let want: BTreeSet<Word> = [a_pow(1 << n)].into_iter().collect();
        ensure(s.items == want, || format!("n={n}: {:?}", show_all(&s.items)))?;
    }
    Ok(())
}

fn c2_g2_g3_generation() -> Check {
    let want: BTreeSet<Word> = (0..=6).map(abc).collect();
    for name in ["g2", "g3"] {
        let g = corpus::load(name).map_err(e2s)?;
        let mut b = Bounds::with_len(18);
        b.max_input = 7;
        let s = generate(&g, &b).map_err(e2s)?;
        certified(&s, 18, name)?;
        let got = s.words_up_to(18);
        ensure(got == want, || format!("{name}: {:?}", show_all(&got)))?;
    }
    Ok(())
}

fn bounded(g: &Grammar, n: usize) -> Result<BTreeSet<Word>, String> {
    let s = generate(g, &Bounds::with_len(n)).map_err(e2s)?;
    certified(&s, n, &g.name)?;
    Ok(s.words_up_to(n))
}

fn c3_round_trip() -> Check {
    let g1 = lift_cf(&corpus::load("g1").map_err(e2s)?).map_err(e2s)?;
    let mut inputs = vec![g1];
    for name in ["g2", "g3", "g4"] {
        inputs.push(corpus::load(name).map_err(e2s)?);
    }
    for g in inputs {
        let pda = to_pushdown_automaton(&g).map_err(e2s)?;
        let (l, lp) = (bounded(&g, 15)?, bounded(&pda, 15)?);
        ensure(l == lp, || format!("{}: automaton {:?} vs {:?}", g.name, show_all(&lp), show_all(&l)))?;
        ensure(!l.is_empty(), || format!("{}: empty sample", g.name))?;
        let back = to_grammar(&pda, true).map_err(e2s)?;
        let (l12, lb) = (bounded(&g, 12)?, bounded(&back, 12)?);
        ensure(l12 == lb, || format!("{}: triples {:?} vs {:?}", g.name, show_all(&lb), show_all(&l12)))?;
    }
    Ok(())
}

fn c4_determinism() -> Check {
    let g1 = lift_cf(&corpus::load("g1").map_err(e2s)?).map_err(e2s)?;
    let pda = to_pushdown_automaton(&g1).map_err(e2s)?;
    let d = is_deterministic(&pda);
    ensure(d == Determinism::Yes, || format!("{d}"))
}

fn c5_g7() -> Check {
    let g7 = corpus::load("g7").map_err(e2s)?;
    let mut b = Bounds::with_len(25);
    b.max_input = 12;
    let s = generate(&g7, &b).map_err(e2s)?;
    certified(&s, 25, "g7")?;
    let got = s.words_up_to(25);
    let want: BTreeSet<Word> = (1..=5).map(|n| a_pow(n * n)).collect();
    ensure(got == want, || format!("{:?}", show_all(&got)))
}

fn c6_g6() -> Check {
    let g6 = corpus::load("g6").map_err(e2s)?;
    let c = Compiled::new(&g6).map_err(e2s)?;
    let b = Bounds::default();
    let want: BTreeSet<Word> = (1..=5).map(abc).collect();
    let mut got = BTreeSet::new();
    let letters = [sym("a"), sym("b"), sym("c")];
    for len in 0..=15usize {
        let mut idx = vec![0usize; len];
        loop {
            let w: Word = idx.iter().map(|&i| letters[i]).collect();
            match c.d_accept(&Input::Str(w.clone()), &b).map_err(e2s)? {
                AcceptResult::Accepted => {
                    got.insert(w);
                }
                AcceptResult::RejectedWithinBounds => {}
                AcceptResult::Exhausted => return Err(format!("exhausted on {}", show_word(&w))),
            }
            let mut k = 0;
            while k < len {
                idx[k] += 1;
                if idx[k] < 3 {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == len {
                break;
            }
        }
    }
    ensure(got == want, || format!("{:?}", show_all(&got)))
}

fn ex1_alphabet() -> RankedAlphabet {
    RankedAlphabet::parse("c:3, a:0, b:0, eps:0").unwrap()
}

fn c7_delta_reg() -> Check {
    let spec = DeltaSpec::grammar(ex1_alphabet(), corpus::load("ex1_paths").map_err(e2s)?, 25);
    let got = delta(&spec).map_err(e2s)?.items;
    let want: BTreeSet<Word> = (1..=8)
        .map(|n| {
            let mut w = vec![sym("a"); n];
            w.extend(vec![sym("b"); n]);
            w
        })
        .collect();
    ensure(got == want, || format!("{:?}", show_all(&got)))
}

fn c8_delta_dcf() -> Check {
    let d = RankedAlphabet::parse("b:2, c:1, a:0").unwrap();
    let spec = DeltaSpec::grammar(d, corpus::load("ex2_paths").map_err(e2s)?, 35);
    let got = delta(&spec).map_err(e2s)?.items;
    let want: BTreeSet<Word> = (0..=4).map(|n| a_pow(1 << n)).collect();
    ensure(got == want, || format!("{:?}", show_all(&got)))
}

fn c9_derivation_trees() -> Check {
    let g2 = corpus::load("g2").map_err(e2s)?;
    let dt = derivation_tree_acceptor(&g2).map_err(e2s)?;
    let trees = generate_trees(&dt, &Bounds::with_len(60)).map_err(e2s)?;
    let yields: BTreeSet<Word> = trees.items.iter().map(tree_yield).filter(|w| w.len() <= 12).collect();
    // a derivation tree of a word of length 12 has fewer than 60 nodes
    ensure(trees.complete_up_to.map_or(false, |k| k >= 60), || "tree sample not certified".into())?;
    let l = bounded(&g2, 12)?;
    ensure(yields == l, || format!("{:?} vs {:?}", show_all(&yields), show_all(&l)))
}

fn unmarked_up_to(g: &Grammar, base: &RankedAlphabet, size: usize) -> Result<BTreeSet<Tree>, String> {
    let m = MarkedAlphabet::new(base.clone()).map_err(e2s)?;
    // a marked tree has at most twice the nodes of its original
    let s = generate_trees(g, &Bounds::with_len(2 * size)).map_err(e2s)?;
    ensure(s.complete_up_to.map_or(false, |k| k >= 2 * size), || format!("{}: not certified", g.name))?;
    let mut out = BTreeSet::new();
    for t in &s.items {
        let u = unmark_tree(t, &m).map_err(e2s)?;
        if u.size() <= size {
            out.insert(u);
        }
    }
    Ok(out)
}

fn c10_paths_and_trees() -> Check {
    let base = ex1_alphabet();
    let size = 16;
    let ex1 = corpus::load("ex1_paths").map_err(e2s)?;
    let ta = tree_acceptor_from_paths(&ex1, &base).map_err(e2s)?;
    let from_acceptor = unmarked_up_to(&ta, &base, size)?;
    let glued = tree_delta(&DeltaSpec::grammar(base.clone(), ex1, size)).map_err(e2s)?.items;
    ensure(!glued.is_empty() && from_acceptor == glued, || {
        format!("acceptor {from_acceptor:?} vs tree_delta {glued:?}")
    })?;
    let marked = corpus::load("ex1_marked").map_err(e2s)?;
    let original = unmarked_up_to(&marked, &base, size)?;
    let pa = path_acceptor(&marked, &base).map_err(e2s)?;
    let back = tree_delta(&DeltaSpec::grammar(base, pa, size)).map_err(e2s)?.items;
    ensure(!original.is_empty() && back == original, || format!("paths {back:?} vs trees {original:?}"))
}

fn c11_lookahead() -> Check {
    let g = corpus::load("tree_pd").map_err(e2s)?;
    let det = determinize_via_lookahead(&g, 10_000).map_err(e2s)?;
    let d = is_deterministic(&det);
    ensure(d == Determinism::Yes, || format!("determinism: {d}"))?;
    let b = Bounds::default();
    for (t, want) in [("sigma(a,a)", vec!["a"]), ("sigma(b,b)", vec!["b"]), ("sigma(a,b)", vec![])] {
        let u = Input::Tree(Tree::parse(t).map_err(e2s)?);
        let got = transduce(&det, &u, &b).map_err(e2s)?.items;
        let want: BTreeSet<Word> = want.iter().map(|s| word(s)).collect();
        ensure(got == want, || format!("{t}: {:?}", show_all(&got)))?;
    }
    Ok(())
}

fn c12_re_witness() -> Check {
    let l = parse_grammar(
        "name L; storage s0; nonterminals S; terminals a, b; initial S; encoding en; rules:\n\
         S -> \"a\" S(id) \"b\";\nS -> ;\n",
    )
    .map_err(e2s)?;
    let m = parse_grammar(
        "name M; storage s0; nonterminals S, T; terminals a, b; initial S; encoding en; rules:\n\
         S -> \"a\" S(id);\nS -> T(id);\nT -> \"b\" T(id);\nT -> ;\n",
    )
    .map_err(e2s)?;
    let (k, dk) = re_witness(&l, &m, &[(sym("a"), word("c")), (sym("b"), Vec::new())]).map_err(e2s)?;
    let got = delta(&DeltaSpec::grammar(dk, k, 27)).map_err(e2s)?.items;
    let in_l = |w: &Word| {
        let n = w.len() / 2;
        w.len() % 2 == 0 && w[..n].iter().all(|s| *s == sym("a")) && w[n..].iter().all(|s| *s == sym("b"))
    };
    let in_m = |w: &Word| {
        let k = w.iter().take_while(|s| **s == sym("a")).count();
        w[k..].iter().all(|s| *s == sym("b"))
    };
    let want: BTreeSet<Word> = all_words(&["a", "b"], 8)
        .into_iter()
        .filter(|w| in_l(w) && in_m(w))
        .map(|w| w.iter().filter(|s| **s == sym("a")).map(|_| sym("c")).collect::<Word>())
        .filter(|w| w.len() <= 4)
        .collect();
    ensure(got == want, || format!("{:?} vs {:?}", show_all(&got), show_all(&want)))
}

fn run<S: proptest::strategy::Strategy>(
    cases: u32,
    strategy: S,
    check: impl Fn(S::Value) -> Check,
) -> Check {
    let mut runner = TestRunner::new(RunnerConfig { cases, failure_persistence: None, ..RunnerConfig::default() });
    runner
        .run(&strategy, |v| check(v).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())
}

fn c13_properties() -> Check {
    run(200, path_language(), |l| check_delta_against_naive(&l, 7))?;
    run(200, det_reg_choices(), |c| check_prefix_free(&c, 12))?;
    run(10_000, instruction_chain(), |(cd, chain)| check_instruction_chain(cd, &chain))?;
    run(200, cf_rules(), |r| check_leftmost(&r, 10))?;
    let g2 = corpus::load("g2").map_err(e2s)?;
    compare_leftmost(&g2, &Input::Unit, 10, 14)
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, u64, fn() -> Check)> = vec![
        ("1 G1 transduction", 1, c1_g1_transduction),
        ("2 G2/G3 generation", 5, c2_g2_g3_generation),
        ("3 automaton/grammar round trip", 60, c3_round_trip),
        ("4 determinism preservation", 1, c4_determinism),
        ("5 G7 preset pushdown", 10, c5_g7),
        ("6 G6 alternating acceptor", 60, c6_g6),
        ("7 delta of a regular path language", 30, c7_delta_reg),
        ("8 delta of a deterministic pushdown path language", 60, c8_delta_dcf),
        ("9 derivation-tree yields", 30, c9_derivation_trees),
        ("10 path acceptor / tree acceptor", 60, c10_paths_and_trees),
        ("11 look-ahead determinization", 10, c11_lookahead),
        ("12 intersection witness", 60, c12_re_witness),
        ("13 property suites", 600, c13_properties),
    ];
    let mut failed = Vec::new();
    for (name, limit, f) in criteria {
        let t = Instant::now();
        let r = f();
        let dt = t.elapsed();
        let limit = Duration::from_secs(limit);
        let verdict = match &r {
            Ok(()) if dt < limit => "PASS".to_string(),
            Ok(()) => format!("FAIL (over time limit {}s)", limit.as_secs()),
            Err(e) => format!("FAIL ({e})"),
        };
        println!("criterion {name}: {verdict} [{:.2}s / {}s]", dt.as_secs_f64(), limit.as_secs());
        if !verdict.starts_with("PASS") {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
