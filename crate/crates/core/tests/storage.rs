use gws_core::storage::{apply, eval_pred, eval_test, Instr, LookaheadEntry, Pred};
use gws_core::symbol::parse_word;
use gws_core::{parse_grammar, sym, Config, Input, RankedAlphabet, StorageType, Term, Test, Tree};
use proptest::prelude::*;

fn pd(s: &str) -> Config {
    Config::word(&parse_word(s))
}

fn push(g: &str) -> Term {
    Term::app("push", vec![Term::sym(g)])
}

#[test]
fn test_evaluation() {
    let p = StorageType::pushdown();
    assert!(eval_test(&Test::True, &pd("a#")).unwrap());
    let top_a = p.compile_pred(&Term::eq("top", sym("a"))).unwrap();
    assert!(eval_test(&Test::atom(top_a.clone()), &pd("a#")).unwrap());
    assert!(!eval_test(&Test::atom(top_a), &pd("#")).unwrap());
    let c = StorageType::countdown();
    let null = c.compile_pred(&Term::sym("null")).unwrap();
    assert!(!eval_test(&Test::atom(null.clone()).negate(), &Config::Int(0)).unwrap());
    assert!(eval_test(&Test::atom(null).negate(), &Config::Int(4)).unwrap());
}

#[test]
fn instructions_and_encodings() {
    let p = StorageType::pushdown();
    assert_eq!(p.apply_term(&push("a"), &pd("#")).unwrap(), Some(pd("a#")));
    assert_eq!(p.apply_term(&Term::sym("pop"), &pd("#")).unwrap(), None);
    let c = StorageType::countdown();
    assert_eq!(c.apply_term(&Term::sym("dec"), &Config::Int(3)).unwrap(), Some(Config::Int(2)));
    assert_eq!(p.encode_term(&Term::sym("#"), &Input::Unit).unwrap(), Some(pd("#")));
    let o = StorageType::one_way();
    let ab = Term::Set(vec![(sym("a"), None), (sym("b"), None)]);
    assert_eq!(o.encode_term(&ab, &Input::Str(parse_word("abba"))).unwrap(), Some(Config::input(&parse_word("abba"))));
    assert_eq!(o.encode_term(&ab, &Input::Str(parse_word("abc"))).unwrap(), None);
}

#[test]
fn builtins() {
    let s0 = StorageType::trivial();
    assert_eq!(s0.identity(), Some(Term::sym("id")));
    assert!(s0.compile_pred(&Term::sym("bottom")).is_err());
    assert_eq!(s0.apply_term(&Term::sym("id"), &Config::Unit).unwrap(), Some(Config::Unit));

    let counter = StorageType::counter();
    let g0 = gws_core::storage::counter_symbol();
    assert!(counter.compile_instr(&push(g0.as_str())).is_ok());
    assert!(counter.compile_instr(&push("zz")).is_err());

    let tw = StorageType::tree_walk();
    let enc = Term::Set(vec![(sym("f"), Some(2)), (sym("a"), Some(0))]);
    let c = tw.encode_term(&enc, &Input::Tree(Tree::parse("f(a,a)").unwrap())).unwrap().unwrap();
    assert_eq!(tw.apply_term(&Term::sym("up"), &c).unwrap(), None);
    assert!(StorageType::parse("nosuchstorage").is_err());
}

#[test]
fn identity_extension() {
    let s = StorageType::with_identity(&StorageType::one_way());
    let id = s.identity().unwrap();
    for w in ["", "a", "ab", "ba", "abba", "bbb"] {
        assert_eq!(s.apply_term(&id, &pd(w)).unwrap(), Some(pd(w)));
    }
    let s0 = StorageType::with_identity(&StorageType::trivial());
    let new_id = s0.identity().unwrap();
    assert_ne!(new_id, Term::sym("id"));
    assert_eq!(s0.apply_term(&new_id, &Config::Unit).unwrap(), Some(Config::Unit));
    assert_eq!(s0.apply_term(&Term::sym("id"), &Config::Unit).unwrap(), Some(Config::Unit));
}

#[test]
fn product_components() {
    let s = StorageType::parse("product(oneway+id, pushdown)").unwrap();
    let c = Config::pair(pd("abc"), pd("#"));
    let first_a = s.compile_pred(&Term::eq("first", sym("a"))).unwrap();
    assert!(eval_pred(&first_a, &c).unwrap());
    let both = Test::and(vec![
        Test::atom(s.compile_pred(&Term::eq("first", sym("a"))).unwrap()),
        Test::atom(s.compile_pred(&Term::eq("top", sym("#"))).unwrap()),
    ]);
    assert!(eval_test(&both, &c).unwrap());
    let idstay = Term::Tuple(vec![Term::sym("id"), Term::sym("stay")]);
    assert_eq!(s.apply_term(&idstay, &c).unwrap(), Some(c.clone()));
    let rp = Term::Tuple(vec![Term::sym("read"), push("a")]);
    assert_eq!(s.apply_term(&rp, &c).unwrap(), Some(Config::pair(pd("bc"), pd("a#"))));
}

#[test]
fn pushdown_of() {
    let s = StorageType::parse("pd(countdown)").unwrap();
    let enc = Term::Tuple(vec![Term::sym("g"), Term::sym("en")]);
    let c = s.encode_term(&enc, &Input::Int(0)).unwrap().unwrap();
    assert_eq!(s.apply_term(&Term::sym("pop"), &c).unwrap(), None);
    let null = s.compile_pred(&Term::app("test", vec![Term::sym("null")])).unwrap();
    assert!(eval_pred(&null, &c).unwrap());
    let f = Term::app("push", vec![Term::sym("d"), Term::sym("dec")]);
    assert_eq!(s.apply_term(&f, &c).unwrap(), None);
    assert!(StorageType::iterate_pd(0) == StorageType::trivial());
    assert!(StorageType::iterate_pd(2).inner().is_some());
}

#[test]
fn lookahead_predicates() {
    let always = parse_grammar(
        "name always; storage countdown; nonterminals A; terminals ; initial A; encoding en; rules:\nA -> ;\n",
    )
    .unwrap();
    let s = StorageType::with_lookahead(
        &StorageType::countdown(),
        vec![LookaheadEntry::new(sym("k"), always)],
        vec![],
        100,
    )
    .unwrap();
    let acc = s.compile_pred(&Term::app("acc", vec![Term::sym("k")])).unwrap();
    for n in 0..20 {
        assert!(eval_pred(&acc, &Config::Int(n)).unwrap());
    }

    let rooted = parse_grammar(
        "name rooted; storage tree; nonterminals A; terminals ; initial A; encoding {sigma:2, a:0, b:0}; \
         rules:\nA -> if root=sigma then ;\n",
    )
    .unwrap();
    let s = StorageType::with_lookahead(
        &StorageType::tree(),
        vec![LookaheadEntry::new(sym("r"), rooted)],
        vec![],
        100,
    )
    .unwrap();
    let acc = s.compile_pred(&Term::app("acc", vec![Term::sym("r")])).unwrap();
    let alpha = RankedAlphabet::parse("sigma:2, a:0, b:0").unwrap();
    let trees: Vec<Tree> = alpha.trees_by_size(7).into_iter().flatten().collect();
    assert!(trees.len() > 20);
    for t in trees {
        let want = t.label() == sym("sigma");
        assert_eq!(eval_pred(&acc, &Config::Tree(t.clone())).unwrap(), want, "{t}");
    }
}

#[test]
fn lookahead_rejects_foreign_grammar() {
    let g = parse_grammar(
        "name g; storage pushdown; nonterminals A; terminals ; initial A; encoding #; rules:\nA -> ;\n",
    )
    .unwrap();
    let r = StorageType::with_lookahead(&StorageType::countdown(), vec![LookaheadEntry::new(sym("k"), g)], vec![], 10);
    assert!(r.is_err());
}

fn pd_instr(k: u8) -> (Instr, Term) {
    let (a, b) = (sym("a"), sym("b"));
    match k {
        0 => (Instr::Push(a), Term::app("push", vec![Term::sym("a"), Term::sym("id")])),
        1 => (Instr::Push(b), Term::app("push", vec![Term::sym("b"), Term::sym("id")])),
        2 => (Instr::Pop, Term::sym("pop")),
        3 => (Instr::StayAs(a), Term::app("stay", vec![Term::sym("a")])),
        4 => (Instr::StayAs(b), Term::app("stay", vec![Term::sym("b")])),
        _ => (Instr::Stay, Term::sym("stay")),
    }
}

fn cells_word(c: &Config) -> Config {
    match c {
        Config::Cells(s) => {
            let w: Vec<_> = s.iter().map(|(g, _)| *g).collect();
            Config::word(&w)
        }
        _ => panic!("not a pushdown of configurations"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, ..ProptestConfig::default() })]

    #[test]
    fn pushdown_of_trivial_is_pushdown(seq in prop::collection::vec(0u8..6, 0..=20)) {
        let p = StorageType::pushdown();
        let q = StorageType::pushdown_of(&StorageType::trivial());
        let mut c = pd("#");
        let mut d = q.encode_term(&Term::Tuple(vec![Term::sym("#"), Term::sym("en")]), &Input::Unit).unwrap().unwrap();
        for k in seq {
            for g in ["a", "b", "#"] {
                let t1 = p.compile_pred(&Term::eq("top", sym(g))).unwrap();
                let t2 = q.compile_pred(&Term::eq("top", sym(g))).unwrap();
                prop_assert_eq!(eval_pred(&t1, &c).unwrap(), eval_pred(&t2, &d).unwrap());
            }
            prop_assert_eq!(eval_pred(&Pred::Bottom, &c).unwrap(), eval_pred(&Pred::Bottom, &d).unwrap());
            let (i, t) = pd_instr(k);
            let (c2, d2) = (apply(&i, &c), q.apply_term(&t, &d).unwrap());
            prop_assert_eq!(c2.is_some(), d2.is_some());
            if let (Some(c2), Some(d2)) = (c2, d2) {
                prop_assert_eq!(cells_word(&d2), c2.clone());
                c = c2;
                d = d2;
            }
        }
    }

    #[test]
    fn product_projection(w in "[ab]{0,5}", p in "[ab]{0,4}", g in 0u8..3) {
        let s = StorageType::parse("product(oneway, pushdown)").unwrap();
        let mut pdw = p.clone();
        pdw.push('#');
        let (c1, c2) = (pd(&w), pd(&pdw));
        let c = Config::pair(c1.clone(), c2.clone());
        let sym_g = ["a", "b", "#"][g as usize];
        let first = Term::eq("first", sym(sym_g));
        let top = Term::eq("top", sym(sym_g));
        prop_assert_eq!(
            eval_pred(&s.compile_pred(&first).unwrap(), &c).unwrap(),
            eval_pred(&StorageType::one_way().compile_pred(&first).unwrap(), &c1).unwrap()
        );
        prop_assert_eq!(
            eval_pred(&s.compile_pred(&top).unwrap(), &c).unwrap(),
            eval_pred(&StorageType::pushdown().compile_pred(&top).unwrap(), &c2).unwrap()
        );
        prop_assert_eq!(
            eval_pred(&s.compile_pred(&Term::sym("empty")).unwrap(), &c).unwrap(),
            w.is_empty()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, ..ProptestConfig::default() })]

    #[test]
    fn noetherian_chains_end(kind in 0u8..3, n in 0usize..6, extra in 1usize..4, picks in prop::collection::vec(1u32..3, 20)) {
        let (c, size) = match kind {
            0 => (Config::Int(n as u64), n),
            1 => (pd(&"ab".repeat(n)), 2 * n),
            _ => {
                let alpha = RankedAlphabet::parse("f:2, g:1, a:0").unwrap();
                let all: Vec<Tree> = alpha.trees_by_size(n + 1).into_iter().flatten().collect();
                let t = all[picks[0] as usize % all.len()].clone();
                let s = t.size();
                (Config::Tree(t), s)
            }
        };
        let mut cur = Some(c);
        for k in 0..size + extra {
            let f = match kind {
                0 => Instr::Dec,
                1 => Instr::Read,
                _ => Instr::Sel(picks[k % picks.len()]),
            };
            cur = cur.and_then(|c| apply(&f, &c));
        }
        prop_assert!(cur.is_none());
    }
}

#[test]
fn exclusivity_is_sound_on_pushdowns() {
    let p = StorageType::pushdown();
    let tops: Vec<Pred> = ["a", "b", "#"].iter().map(|g| p.compile_pred(&Term::eq("top", sym(g))).unwrap()).collect();
    for w in ["#", "a#", "ba#", "bb#"] {
        for x in &tops {
            for y in &tops {
                if gws_core::storage::exclusive(x, y) {
                    assert!(!(eval_pred(x, &pd(w)).unwrap() && eval_pred(y, &pd(w)).unwrap()));
                }
            }
        }
    }
}
