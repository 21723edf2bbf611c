use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;

fn sig() -> Signature {
    Signature::new()
        .with_relation("R", 1)
        .with_relation("S", 2)
        .with_function("f", 1)
        .with_constant("c")
}

#[test]
fn parse_fo_quantified_implication() {
    let f = parse_fo("forall x. (R(x) -> x = x)", &sig()).unwrap();
    assert_eq!(
        f,
        FoFormula::forall(
            "x",
            FoFormula::implies(
                FoFormula::Rel("R".into(), vec![Term::var("x")]),
                FoFormula::Equal(Term::var("x"), Term::var("x")),
            ),
        )
    );
}

#[test]
fn parse_fo_mixed_variable_kinds() {
    let f = parse_fo("S($p1, x)", &sig()).unwrap();
    assert_eq!(
        f,
        FoFormula::Rel("S".into(), vec![Term::param("p1"), Term::var("x")])
    );
}

#[test]
fn parse_fo_rejects_bound_parameter() {
    let e = parse_fo("exists $p1. R($p1)", &sig()).unwrap_err();
    assert!(e.to_string().contains("parameter"), "{e}");
}

#[test]
fn parse_il_independence_atom() {
    let f = parse_il("indep(x ; y ; z)", &sig()).unwrap();
    assert_eq!(
        f,
        IlFormula::Indep(
            vec![Term::var("x")],
            vec![Term::var("y")],
            vec![Term::var("z")],
        )
    );
}

#[test]
fn parse_il_split_under_quantifier() {
    let f = parse_il("exists y. (x = y \\/ ~R(x))", &sig()).unwrap();
    assert_eq!(
        f,
        IlFormula::exists(
            "y",
            IlFormula::tensor_or(
                IlFormula::Literal(true, IlAtom::Equal(Term::var("x"), Term::var("y"))),
                IlFormula::Literal(false, IlAtom::Rel("R".into(), vec![Term::var("x")])),
            ),
        )
    );
}

#[test]
fn parse_il_rejects_negated_compound() {
    let e = parse_il("~(R(x) /\\ R(y))", &sig()).unwrap_err();
    assert!(e.to_string().contains("relation atom"), "{e}");
}

#[test]
fn parse_il_rejects_parameter_variables() {
    let e = parse_il("R($p1)", &sig()).unwrap_err();
    assert!(e.to_string().contains("parameter"), "{e}");
}

#[test]
fn parse_il_allows_empty_first_tuple() {
    let f = parse_il("indep( ; y ; y)", &sig()).unwrap();
    assert_eq!(
        f,
        IlFormula::Indep(vec![], vec![Term::var("y")], vec![Term::var("y")])
    );
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_fo("(R(x) &\n  Q(x))", &sig()).unwrap_err();
    assert_eq!(e.line, 2);
    assert!(e.to_string().contains("undeclared relation 'Q'"), "{e}");
}

#[test]
fn strict_mode_checks_arity() {
    let e = parse_fo("R(x, y)", &sig()).unwrap_err();
    assert!(e.to_string().contains("arity 1"), "{e}");
}

#[test]
fn infer_mode_collects_and_checks_consistency() {
    let mut inferred = Signature::new().with_constant("c");
    let f = parse_fo_with("(S(x, c) & R(f(x)))", &mut inferred).unwrap();
    assert_eq!(inferred.relation_arity("S"), Some(2));
    assert_eq!(inferred.relation_arity("R"), Some(1));
    assert_eq!(inferred.function_arity("f"), Some(1));
    assert_eq!(f.free_team_vars().len(), 1);

    let e = parse_fo_with("(R(x) & R(x, y))", &mut Signature::new()).unwrap_err();
    assert!(e.to_string().contains("arities 1 and 2"), "{e}");
}

#[test]
fn free_vars_follow_binding() {
    let f = parse_fo("exists y. x = y", &sig()).unwrap();
    assert_eq!(free_vars_fo(&f), (["x".to_string()].into(), Default::default()));

    let g = parse_il("indep(x ; y ; z)", &sig()).unwrap();
    let (team, param) = free_vars_il(&g);
    assert_eq!(team, ["x".to_string(), "y".into(), "z".into()].into());
    assert!(param.is_empty());

    let h = parse_fo("x = $p1", &sig()).unwrap();
    assert_eq!(
        free_vars_fo(&h),
        (["x".to_string()].into(), ["p1".to_string()].into())
    );
}

#[test]
fn rename_substitutes_free_occurrences() {
    let map: BTreeMap<String, String> =
        [("x".to_string(), "v1".to_string()), ("y".to_string(), "v2".to_string())].into();
    let f = parse_fo("S(x, y)", &sig()).unwrap();
    assert_eq!(rename_fo(&f, &map).unwrap(), parse_fo("S(v1, v2)", &sig()).unwrap());

    let ts = parse_terms("f(x), y", &sig()).unwrap();
    assert_eq!(
        rename_terms(&ts, &map).unwrap(),
        parse_terms("f(v1), v2", &sig()).unwrap()
    );
}

#[test]
fn rename_detects_capture() {
    let f = parse_fo("exists x. S(x, y)", &sig()).unwrap();
    let map: BTreeMap<String, String> = [("y".to_string(), "x".to_string())].into();
    assert_eq!(
        rename_fo(&f, &map),
        Err(RenameError::Capture {
            var: "y".into(),
            target: "x".into()
        })
    );
}

#[test]
fn rename_detects_noninjective_collision() {
    let f = parse_fo("S(x, y)", &sig()).unwrap();
    let map: BTreeMap<String, String> = [("x".to_string(), "y".to_string())].into();
    assert!(matches!(
        rename_fo(&f, &map),
        Err(RenameError::NonInjective { .. })
    ));
}

#[test]
fn rename_ignores_bound_occurrences() {
    let f = parse_fo("(exists x. R(x) & R(x))", &sig()).unwrap();
    let map: BTreeMap<String, String> = [("x".to_string(), "v1".to_string())].into();
    assert_eq!(
        rename_fo(&f, &map).unwrap(),
        parse_fo("(exists x. R(x) & R(v1))", &sig()).unwrap()
    );
}

#[test]
fn desugar_expands_dependence_atoms() {
    let f = parse_il("dep(x, y)", &sig()).unwrap();
    assert_eq!(
        desugar_dep(&f).unwrap(),
        IlFormula::Indep(vec![Term::var("x")], vec![Term::var("y")], vec![Term::var("y")])
    );

    let g = parse_il("dep(y)", &sig()).unwrap();
    assert_eq!(
        desugar_dep(&g).unwrap(),
        IlFormula::Indep(vec![], vec![Term::var("y")], vec![Term::var("y")])
    );

    let h = parse_il("(R(x) \\/ x = y)", &sig()).unwrap();
    assert_eq!(desugar_dep(&h).unwrap(), h);

    let e = parse_il("dep()", &sig()).unwrap();
    assert_eq!(desugar_dep(&e), Err(DesugarError::EmptyDep));
}

#[test]
fn empty_witness_tuples_warn() {
    let f = parse_il("(indep(x ; ; y) /\\ indep(x ; y ; z))", &sig()).unwrap();
    assert_eq!(empty_tuple_warnings(&f).len(), 1);
}

#[test]
fn fo_view_of_flat_formulas() {
    let f = parse_il("exists y. (x = y \\/ ~R(x))", &sig()).unwrap();
    assert_eq!(
        fo_of_il(&f).unwrap(),
        parse_fo("exists y. (x = y | not R(x))", &sig()).unwrap()
    );
    let g = parse_il("indep(x ; y ; z)", &sig()).unwrap();
    assert_eq!(fo_of_il(&g), None);
}

#[test]
fn reserved_words_cannot_name_variables() {
    assert!(parse_fo("exists exists. R(exists)", &sig()).is_err());
    assert!(parse_il("dep = x", &sig()).is_err());
}

#[test]
fn signature_display_round_trips() {
    let s = sig();
    assert_eq!(parse_signature(&s.to_string()).unwrap(), s);
    assert_eq!(s.to_string(), "rel R/1 rel S/2 fun f/1 const c");
}

#[test]
fn comments_and_whitespace_are_skipped() {
    let f = parse_fo("# leading comment\n  R( x )  # trailing\n", &sig()).unwrap();
    assert_eq!(f, parse_fo("R(x)", &sig()).unwrap());
}

fn arb_fo_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::var("x")),
        Just(Term::var("y")),
        Just(Term::var("z")),
        Just(Term::param("p")),
        Just(Term::param("q")),
        Just(Term::Const("c".into())),
    ];
    leaf.prop_recursive(2, 6, 1, |inner| {
        inner.prop_map(|t| Term::App("f".into(), vec![t]))
    })
}

fn arb_il_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::var("x")),
        Just(Term::var("y")),
        Just(Term::var("z")),
        Just(Term::Const("c".into())),
    ];
    leaf.prop_recursive(2, 6, 1, |inner| {
        inner.prop_map(|t| Term::App("f".into(), vec![t]))
    })
}

fn arb_fo() -> impl Strategy<Value = FoFormula> {
    let leaf = prop_oneof![
        Just(FoFormula::True),
        Just(FoFormula::False),
        arb_fo_term().prop_map(|t| FoFormula::Rel("R".into(), vec![t])),
        (arb_fo_term(), arb_fo_term()).prop_map(|(a, b)| FoFormula::Rel("S".into(), vec![a, b])),
        (arb_fo_term(), arb_fo_term()).prop_map(|(a, b)| FoFormula::Equal(a, b)),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(FoFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FoFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FoFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FoFormula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FoFormula::iff(a, b)),
            (0usize..3, inner.clone()).prop_map(|(i, f)| FoFormula::exists(["x", "y", "z"][i], f)),
            (0usize..3, inner).prop_map(|(i, f)| FoFormula::forall(["x", "y", "z"][i], f)),
        ]
    })
}

fn arb_il() -> impl Strategy<Value = IlFormula> {
    fn tuple(min: usize) -> impl Strategy<Value = Vec<Term>> {
        proptest::collection::vec(arb_il_term(), min..=2)
    }
    let leaf = prop_oneof![
        (any::<bool>(), arb_il_term())
            .prop_map(|(pos, t)| IlFormula::Literal(pos, IlAtom::Rel("R".into(), vec![t]))),
        (any::<bool>(), arb_il_term(), arb_il_term())
            .prop_map(|(pos, a, b)| IlFormula::Literal(pos, IlAtom::Equal(a, b))),
        (tuple(0), tuple(1), tuple(1)).prop_map(|(t1, t2, t3)| IlFormula::Indep(t1, t2, t3)),
        tuple(1).prop_map(IlFormula::Dep),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::tensor_or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::and(a, b)),
            (0usize..3, inner.clone()).prop_map(|(i, f)| IlFormula::exists(["x", "y", "z"][i], f)),
            (0usize..3, inner).prop_map(|(i, f)| IlFormula::forall(["x", "y", "z"][i], f)),
        ]
    })
}

proptest! {
    #[test]
    fn fo_print_parse_round_trip(f in arb_fo()) {
        let printed = f.to_string();
        let reparsed = parse_fo(&printed, &sig()).unwrap();
        prop_assert_eq!(reparsed, f);
    }

    #[test]
    fn il_print_parse_round_trip(f in arb_il()) {
        let printed = f.to_string();
        let reparsed = parse_il(&printed, &sig()).unwrap();
        prop_assert_eq!(reparsed, f);
    }

    #[test]
    fn rename_maps_free_variable_set(f in arb_fo()) {
        let map: BTreeMap<String, String> = [
            ("x".to_string(), "x1".to_string()),
            ("y".to_string(), "y1".to_string()),
            ("z".to_string(), "z1".to_string()),
        ]
        .into();
        let renamed = rename_fo(&f, &map).unwrap();
        let expect: std::collections::BTreeSet<String> =
            f.free_team_vars().iter().map(|v| map[v].clone()).collect();
        prop_assert_eq!(renamed.free_team_vars(), expect);
        prop_assert_eq!(renamed.free_param_vars(), f.free_param_vars());
    }

    #[test]
    fn desugar_is_idempotent_and_preserves_free_vars(f in arb_il()) {
        let once = desugar_dep(&f).unwrap();
        prop_assert!(once.is_desugared());
        prop_assert_eq!(desugar_dep(&once).unwrap(), once.clone());
        prop_assert_eq!(once.free_team_vars(), f.free_team_vars());
    }
}
