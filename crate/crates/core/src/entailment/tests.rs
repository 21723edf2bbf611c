use proptest::prelude::*;

use super::*;
use crate::syntax::{parse_fo, parse_il, IlAtom, Signature, Term};

fn two() -> Structure {
    let mut m = Structure::with_domain(2);
    m.add_constant("0", 0).unwrap();
    m.add_constant("1", 1).unwrap();
    m
}

fn sig2() -> Signature {
    Signature::new().with_constant("0").with_constant("1")
}

fn h(entries: &[(&str, usize)]) -> ParamAssignment {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn unsatisfiable_definitions_satisfy_everything() {
    let m = two();
    let gamma = FoFormula::False;
    for phi in ["dep(x)", "indep(x; y; y)", "~ R(x)"] {
        let sig = sig2().with_relation("R", 1);
        let phi = parse_il(phi, &sig).unwrap();
        let mut m = m.clone();
        m.add_relation("R", 1, []).unwrap();
        assert!(eval_entailment(&m, &gamma, &ParamAssignment::new(), &phi).unwrap());
    }
}

#[test]
fn constancy_follows_the_defined_team() {
    let m = two();
    let phi = parse_il("dep(x)", &sig2()).unwrap();

    let pinned = parse_fo("x = $p1", &sig2()).unwrap();
    assert!(eval_entailment(&m, &pinned, &h(&[("p1", 0)]), &phi).unwrap());

    let full = parse_fo("x = x", &sig2()).unwrap();
    assert!(!eval_entailment(&m, &full, &ParamAssignment::new(), &phi).unwrap());
}

#[test]
fn witnessed_split_returns_the_cover_diagrams() {
    let m = two();
    let gamma = parse_fo("x = x", &sig2()).unwrap();
    let phi = parse_il("(x = 0 \\/ x = 1)", &sig2()).unwrap();
    let tree = eval_entailment_witnessed(&m, &gamma, &ParamAssignment::new(), &phi)
        .unwrap()
        .expect("the split holds on the full team");
    let WitnessTree::Or {
        ext,
        gamma1,
        gamma2,
        left,
        right,
    } = &tree
    else {
        panic!("expected a split node, got {tree:?}");
    };
    assert_eq!(*left.as_ref(), WitnessTree::Atom);
    assert_eq!(*right.as_ref(), WitnessTree::Atom);
    let zero = team_of_definition(&m, gamma1, ext, &["x"]).unwrap();
    assert_eq!(zero, Team::from_rows(&["x"], [vec![0]]).unwrap());
    let one = team_of_definition(&m, gamma2, ext, &["x"]).unwrap();
    assert_eq!(one, Team::from_rows(&["x"], [vec![1]]).unwrap());
    assert!(ext.keys().all(|k| k.starts_with('w')));

    assert!(check_witness(&m, &gamma, &ParamAssignment::new(), &phi, &tree).unwrap());
}

#[test]
fn true_literals_witness_as_bare_leaves() {
    let m = two();
    let gamma = parse_fo("x = $p1", &sig2()).unwrap();
    let phi = parse_il("x = x", &sig2()).unwrap();
    let tree = eval_entailment_witnessed(&m, &gamma, &h(&[("p1", 1)]), &phi).unwrap();
    assert_eq!(tree, Some(WitnessTree::Atom));
}

#[test]
fn unsatisfied_formulas_yield_no_witness() {
    let m = two();
    let gamma = parse_fo("x = x", &sig2()).unwrap();
    let phi = parse_il("x = 0", &sig2()).unwrap();
    assert_eq!(
        eval_entailment_witnessed(&m, &gamma, &ParamAssignment::new(), &phi).unwrap(),
        None
    );
}

#[test]
fn tampered_covers_are_rejected() {
    let m = two();
    let gamma = parse_fo("x = x", &sig2()).unwrap();
    let phi = parse_il("(x = 0 \\/ x = 1)", &sig2()).unwrap();
    let tree = eval_entailment_witnessed(&m, &gamma, &ParamAssignment::new(), &phi)
        .unwrap()
        .unwrap();
    let WitnessTree::Or {
        ext,
        gamma1,
        left,
        right,
        ..
    } = tree
    else {
        panic!("expected a split node");
    };
    let lopsided = WitnessTree::Or {
        ext,
        gamma2: gamma1.clone(),
        gamma1,
        left,
        right,
    };
    assert!(!check_witness(&m, &gamma, &ParamAssignment::new(), &phi, &lopsided).unwrap());
}

#[test]
fn checker_takes_arbitrary_cover_formulas() {
    let m = two();
    let gamma = parse_fo("x = x", &sig2()).unwrap();
    let phi = parse_il("(x = 0 \\/ x = 1)", &sig2()).unwrap();
    let handmade = WitnessTree::Or {
        ext: ParamAssignment::new(),
        gamma1: parse_fo("x = 0", &sig2()).unwrap(),
        gamma2: parse_fo("not (x = 0)", &sig2()).unwrap(),
        left: Box::new(WitnessTree::Atom),
        right: Box::new(WitnessTree::Atom),
    };
    assert!(check_witness(&m, &gamma, &ParamAssignment::new(), &phi, &handmade).unwrap());
}

#[test]
fn mismatched_tree_shapes_are_errors() {
    let m = two();
    let gamma = parse_fo("x = x", &sig2()).unwrap();
    let phi = parse_il("x = x", &sig2()).unwrap();
    let tree = WitnessTree::And {
        left: Box::new(WitnessTree::Atom),
        right: Box::new(WitnessTree::Atom),
    };
    assert!(matches!(
        check_witness(&m, &gamma, &ParamAssignment::new(), &phi, &tree),
        Err(ModelError::WitnessShape(_))
    ));
}

#[test]
fn unknown_witness_parameters_fail_the_clause() {
    let m = two();
    let gamma = parse_fo("x = x", &sig2()).unwrap();
    let phi = parse_il("(x = x \\/ x = x)", &sig2()).unwrap();
    let tree = WitnessTree::Or {
        ext: ParamAssignment::new(),
        gamma1: parse_fo("x = $nope", &sig2()).unwrap(),
        gamma2: parse_fo("x = x", &sig2()).unwrap(),
        left: Box::new(WitnessTree::Atom),
        right: Box::new(WitnessTree::Atom),
    };
    assert!(!check_witness(&m, &gamma, &ParamAssignment::new(), &phi, &tree).unwrap());
}

#[test]
fn witness_trees_print_one_node_per_line() {
    let m = two();
    let gamma = parse_fo("x = x", &sig2()).unwrap();
    let phi = parse_il("forall y. (x = 0 \\/ y = y)", &sig2()).unwrap();
    let tree = eval_entailment_witnessed(&m, &gamma, &ParamAssignment::new(), &phi)
        .unwrap()
        .unwrap();
    let text = tree.to_string();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("ES-forall {"));
    assert!(lines[1].starts_with("  ES-or"));
    assert!(lines[2].starts_with("    ES-atom"));
    assert!(lines[3].starts_with("    ES-atom"));
}

fn arb_structure() -> impl Strategy<Value = Structure> {
    (1usize..=2, any::<u8>()).prop_map(|(size, rmask)| {
        let mut m = Structure::with_domain(size);
        let table = (0..size).filter(|e| rmask & (1 << e) != 0).map(|e| vec![e]);
        m.add_relation("R", 1, table).unwrap();
        m
    })
}

fn var_term() -> impl Strategy<Value = Term> {
    prop_oneof![Just(Term::var("x")), Just(Term::var("y"))]
}

fn arb_phi() -> impl Strategy<Value = IlFormula> {
    let leaf = prop_oneof![
        (any::<bool>(), var_term())
            .prop_map(|(pos, t)| IlFormula::Literal(pos, IlAtom::Rel("R".into(), vec![t]))),
        (any::<bool>(), var_term(), var_term())
            .prop_map(|(pos, a, b)| IlFormula::Literal(pos, IlAtom::Equal(a, b))),
        (var_term(), var_term(), var_term())
            .prop_map(|(a, b, c)| IlFormula::Indep(vec![a], vec![b], vec![c])),
        (var_term(), var_term()).prop_map(|(a, b)| IlFormula::Dep(vec![a, b])),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::tensor_or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::and(a, b)),
            (0usize..2, inner.clone()).prop_map(|(i, f)| IlFormula::exists(["x", "y"][i], f)),
            (0usize..2, inner).prop_map(|(i, f)| IlFormula::forall(["x", "y"][i], f)),
        ]
    })
}

fn arb_gamma() -> impl Strategy<Value = FoFormula> {
    let leaf = prop_oneof![
        Just(FoFormula::True),
        Just(FoFormula::False),
        var_term().prop_map(|t| FoFormula::Rel("R".into(), vec![t])),
        (var_term(), var_term()).prop_map(|(a, b)| FoFormula::Equal(a, b)),
        var_term().prop_map(|t| FoFormula::Equal(t, Term::param("p1"))),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FoFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FoFormula::and(a, b)),
            inner.clone().prop_map(FoFormula::not),
            (0usize..2, inner).prop_map(|(i, f)| FoFormula::exists(["x", "y"][i], f)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_matches_direct_team_semantics(
        m in arb_structure(),
        gamma in arb_gamma(),
        phi in arb_phi(),
    ) {
        let h = h(&[("p1", 0)]);
        let direct = {
            let phi = desugar_dep(&phi).unwrap();
            let x = team_of_definition(&m, &gamma, &h, &joint_domain(&gamma, &phi)).unwrap();
            eval_full(&m, &x, &phi).unwrap()
        };
        prop_assert_eq!(eval_entailment(&m, &gamma, &h, &phi).unwrap(), direct);

        let tree = eval_entailment_witnessed(&m, &gamma, &h, &phi).unwrap();
        prop_assert_eq!(tree.is_some(), direct);
        if let Some(tree) = tree {
            prop_assert!(check_witness(&m, &gamma, &h, &phi, &tree).unwrap());
        }
    }

    #[test]
    fn unused_parameters_never_matter(
        m in arb_structure(),
        gamma in arb_gamma(),
        phi in arb_phi(),
        extra in 0usize..2,
    ) {
        let lean = h(&[("p1", 0)]);
        let mut padded = lean.clone();
        padded.insert("q7".to_string(), extra);
        prop_assert_eq!(
            eval_entailment(&m, &gamma, &lean, &phi).unwrap(),
            eval_entailment(&m, &gamma, &padded, &phi).unwrap()
        );
    }

    #[test]
    fn verdicts_survive_domain_enlargement(
        m in arb_structure(),
        gamma in arb_gamma(),
        phi in arb_phi(),
    ) {
        let h = h(&[("p1", 0)]);
        let phi = desugar_dep(&phi).unwrap();
        let mut wide = joint_domain(&gamma, &phi);
        wide.push("z".to_string());
        prop_assert_eq!(
            eval_entailment(&m, &gamma, &h, &phi).unwrap(),
            eval_entailment_over(&m, &gamma, &h, &phi, &wide).unwrap()
        );
    }
}
