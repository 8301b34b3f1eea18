use gws_core::engine::{generate, transduce, Bounds};
use gws_core::grammar::*;
use gws_core::{corpus, parse_grammar, Class, Input, Item, Term, Test};
use std::collections::BTreeSet;

fn g(src: &str) -> gws_core::Grammar {
    parse_grammar(src).unwrap()
}

fn lang(g: &gws_core::Grammar, n: usize) -> BTreeSet<gws_core::Word> {
    let s = generate(g, &Bounds::with_len(n)).unwrap();
    assert!(s.complete_up_to.unwrap() >= n, "{} not certified", g.name);
    s.words_up_to(n)
}

const G2_REG: &str = "name g2reg; storage pushdown; class REG; nonterminals Ain, A, B; terminals a, b; \
    initial Ain; encoding #; rules:\n\
    Ain -> A(stay);\nA -> \"a\" A(push(a));\nA -> B(stay);\n\
    B -> if top=a then \"b\" B(pop);\nB -> if top=# then ;\n";

#[test]
fn parsing() {
    let g2 = corpus::load("g2").unwrap();
    assert_eq!(g2.rules.len(), 7);
    assert_eq!(g2.class, Class::Cf);
    let lam = g2.rules.iter().find(|r| r.lhs.as_str() == "B" && r.rhs.is_empty());
    assert!(lam.is_some());
    let bad = "name bad; storage pushdown; nonterminals A; terminals a; initial A; encoding #; rules:\n\
               A -> if null then \"a\";\n";
    assert!(parse_grammar(bad).is_err());
    let undeclared = "name bad; storage pushdown; nonterminals A; terminals a; initial A; encoding #; rules:\n\
                      A -> Z(stay);\n";
    assert!(parse_grammar(undeclared).is_err());
}

#[test]
fn corpus_round_trips_through_text() {
    for (name, _) in corpus::FILES {
        let g = corpus::load(name).unwrap();
        let again = parse_grammar(&g.to_text()).unwrap();
        assert_eq!(again, g, "{name}");
    }
}

#[test]
fn desugaring() {
    let g1 = desugar(&corpus::load("g1").unwrap()).unwrap();
    assert_eq!(g1.rules.len(), 2);
    let calls: Vec<usize> = g1.rules.iter().map(|r| r.calls().count()).collect();
    assert!(calls.contains(&0) && calls.contains(&2));
    for r in &g1.rules {
        let mut atoms = Vec::new();
        r.test.atoms(&mut atoms);
        assert_eq!(atoms, vec![&Term::sym("null")]);
    }

    let dead = g("name d; storage pushdown; nonterminals A; terminals a; initial A; encoding #; rules:\n\
                  A -> if false then \"a\";\nA -> \"a\";\n");
    assert_eq!(desugar(&dead).unwrap().rules.len(), 1);

    // the chain push(#, dec); push(#, dec) goes through one fresh nonterminal
    let g7 = corpus::load("g7").unwrap();
    assert_eq!(g7.nonterminals.len(), 4);
    assert!(g7.rules.iter().all(|r| r.rhs.iter().all(|it| match it {
        Item::Call(_, chain) => chain.len() == 1,
        _ => true,
    })));
}

#[test]
fn classification() {
    let g2 = corpus::load("g2").unwrap();
    let rep = validate(&g2).unwrap();
    assert_eq!(rep.class, Class::Cf);
    assert!(!satisfies(&g2, Class::Reg));
    let src = corpus::source("g2").unwrap().replace("A -> B(stay) C(stay);", "A -> B(stay);");
    let reg = g(&src);
    assert!(satisfies(&reg, Class::Reg));
    let t1 = corpus::load("g1_tree").unwrap();
    assert_eq!(t1.class, Class::Rt);
    assert!(is_rt_normal(&t1));
}

#[test]
fn determinism() {
    assert_eq!(is_deterministic(&corpus::load("g1").unwrap()), Determinism::Yes);
    assert_eq!(is_deterministic(&corpus::load("g6").unwrap()), Determinism::Yes);
    match is_deterministic(&corpus::load("g2").unwrap()) {
        Determinism::No(w) => assert!(w.contains('#'), "{w}"),
        d => panic!("{d}"),
    }
}

#[test]
fn acceptor_determinism() {
    let variant = g("name v; storage pushdown; class REG; nonterminals Ain, A, B; terminals a, b; \
                     initial Ain; encoding #; rules:\n\
                     Ain -> A(stay);\nA -> \"a\" A(push(a));\nA -> \"b\" B(pop);\n\
                     B -> if top=a then \"b\" B(pop);\nB -> if top=# then ;\n");
    assert!(is_racceptor_deterministic(&variant).unwrap());
    assert!(matches!(is_deterministic(&variant), Determinism::No(_)));
    let clash = g("name c; storage pushdown; class REG; nonterminals A, B, C; terminals a; \
                   initial A; encoding #; rules:\n\
                   A -> if top=# then \"a\" B(stay);\nA -> if top=# then \"a\" C(stay);\nB -> ;\nC -> ;\n");
    assert!(!is_racceptor_deterministic(&clash).unwrap());
}

#[test]
fn regular_normal_form() {
    let long = g("name l; storage pushdown; class REG; nonterminals A, B; terminals a, b, c; \
                  initial A; encoding #; rules:\nA -> if top=# then \"a\" \"b\" \"c\" B(stay);\nB -> ;\n");
    let n = normalize_reg(&long).unwrap();
    assert!(is_reg_normal(&n));
    assert_eq!(n.rules.len(), 4);
    assert_eq!(n.nonterminals.len(), 4);
    assert_eq!(normalize_reg(&n).unwrap().rules.len(), 4);
    assert_eq!(lang(&n, 5), lang(&long, 5));

    let reg = g(G2_REG);
    let n = normalize_reg(&reg).unwrap();
    assert_eq!(lang(&n, 12), lang(&reg, 12));
}

#[test]
fn tree_normal_form() {
    let t2 = corpus::load("g2_tree").unwrap();
    let sigma = t2.rules.iter().find(|r| r.rhs.first() == Some(&Item::T(gws_core::sym("sigma")))).unwrap();
    assert_eq!(sigma.calls().count(), 2);
    assert!(is_rt_normal(&t2));

    let deep = g("name d; storage pushdown; class RT; nonterminals A, B; terminals f:2, g:1, a:0; \
                  initial A; encoding #; rules:\n\
                  A -> f(g(g(B(push(x)))), a);\nA -> a;\nB -> if top=x then g(A(pop));\n");
    assert!(!is_rt_normal(&deep));
    let n = normalize_rt(&deep).unwrap();
    assert!(is_rt_normal(&n));
    let b = Bounds::with_len(8);
    let before = gws_core::engine::generate_trees(&deep, &b).unwrap();
    let after = gws_core::engine::generate_trees(&n, &b).unwrap();
    assert_eq!(before.items, after.items);
    assert!(!before.items.is_empty());

    let no_id = g("name o; storage oneway; class RT; nonterminals A; terminals f:1, a:0; \
                   initial A; encoding {a}; rules:\nA -> if first=a then f(f(A(read)));\nA -> if empty then a;\n");
    assert!(normalize_rt(&no_id).is_err());
}

#[test]
fn extended_normal_form() {
    let g1 = corpus::load("g1").unwrap();
    let n = normalize_cfext(&g1).unwrap();
    assert!(is_cfext_normal(&n));
    assert_eq!(n.class, Class::CfExt);
    for r in &n.rules {
        assert!(r.calls().count() <= 2);
    }
    assert!(n.rules.iter().any(|r| r.rhs.len() == 2 && matches!(r.rhs[1], Item::Call(..) | Item::Tail(_))));
    for k in 0..=5u64 {
        let b = Bounds::with_len(40);
        assert_eq!(transduce(&n, &Input::Int(k), &b).unwrap().items, transduce(&g1, &Input::Int(k), &b).unwrap().items);
    }
    assert_eq!(is_deterministic(&n), Determinism::Yes);

    let term = g("name t; storage s0; nonterminals A; terminals a; initial A; encoding en; rules:\nA -> \"a\";\n");
    let n = normalize_cfext(&term).unwrap();
    assert_eq!(n.rules, term.rules);
}

fn top_atoms_only(t: &Test<Term>) -> bool {
    let mut atoms = Vec::new();
    t.atoms(&mut atoms);
    matches!(t, Test::Atom(_)) && atoms.iter().all(|a| matches!(a, Term::Eq(h, _) if h.as_str() == "top"))
}

#[test]
fn pushdown_test_normal_form() {
    let g2 = corpus::load("g2").unwrap();
    let n = cfp_test_normal_form(&g2).unwrap();
    assert!(n.rules.len() >= 7);
    assert!(n.rules.iter().all(|r| top_atoms_only(&r.test)), "{}", n.to_text());
    assert_eq!(lang(&n, 15), lang(&g2, 15));

    let neg = g("name n; storage pushdown; nonterminals A; terminals a; initial A; encoding #; rules:\n\
                 A -> if not top=a and not top=# then \"a\";\nA -> if top=a and top=# then \"a\";\nA -> if top=# then ;\n");
    let n = cfp_test_normal_form(&neg).unwrap();
    assert_eq!(n.rules.len(), 1, "{}", n.to_text());
}
