use proptest::prelude::*;

use super::*;
use crate::syntax::{parse_fo_with, Term};

fn sentences(texts: &[&str]) -> BTreeSet<FoFormula> {
    let mut sig = Signature::new()
        .with_relation("P", 1)
        .with_relation("Q", 1)
        .with_constant("c")
        .with_constant("d")
        .with_function("f", 1);
    texts
        .iter()
        .map(|t| parse_fo_with(t, &mut sig).unwrap())
        .collect()
}

fn quick() -> ProverBudget {
    ProverBudget {
        depth: 3,
        ms: 1_000,
        cm_size: 3,
    }
}

#[test]
fn universal_premises_prove_weakened_universals() {
    let verdict = prove_entailment(
        &sentences(&["forall x. P(x)"]),
        &sentences(&["forall x. (Q(x) -> P(x))"]),
        &quick(),
    );
    let ProverVerdict::Proved { steps } = verdict else {
        panic!("expected a proof, got {verdict:?}");
    };
    assert_eq!(steps, 1);
}

#[test]
fn domains_are_never_empty() {
    let verdict = prove_entailment(&BTreeSet::new(), &sentences(&["exists x. x = x"]), &quick());
    assert!(matches!(verdict, ProverVerdict::Proved { .. }));
}

#[test]
fn existence_does_not_prove_universality() {
    let verdict = prove_entailment(
        &sentences(&["exists x. P(x)"]),
        &sentences(&["forall x. P(x)"]),
        &quick(),
    );
    let ProverVerdict::Refuted { model, params } = verdict else {
        panic!("expected a countermodel, got {verdict:?}");
    };
    assert_eq!(model.size(), 2);
    assert_eq!(model.relation("P").unwrap(), &BTreeSet::from([vec![0]]));
    assert!(params.is_empty());
}

#[test]
fn contradictions_admit_no_model() {
    assert!(find_countermodel(&sentences(&["P(c)", "not P(c)"]), 3).is_none());
}

#[test]
fn distinctness_from_a_constant_needs_two_elements() {
    let wish = sentences(&["exists x. not (x = c)"]);
    assert!(find_countermodel(&wish, 1).is_none());
    let (model, params) = find_countermodel(&wish, 3).unwrap();
    assert_eq!(model.size(), 2);
    assert!(params.is_empty());
}

#[test]
fn identity_functions_forbid_moved_points() {
    let wish = sentences(&["forall x. (f(x) = x)", "not (f(c) = c)"]);
    assert!(find_countermodel(&wish, 3).is_none());
}

#[test]
fn empty_goal_sets_hold_vacuously() {
    let verdict = prove_entailment(&sentences(&["P(c)"]), &BTreeSet::new(), &quick());
    assert!(matches!(verdict, ProverVerdict::Proved { steps: 0 }));
}

#[test]
fn inconsistent_premises_entail_anything() {
    let verdict = prove_entailment(
        &sentences(&["P(c)", "not P(c)"]),
        &sentences(&["Q(d)"]),
        &quick(),
    );
    assert!(matches!(verdict, ProverVerdict::Proved { .. }));
}

#[test]
fn parameters_act_as_fresh_constants() {
    let verdict = prove_entailment(
        &sentences(&["P($p)"]),
        &sentences(&["exists x. P(x)"]),
        &quick(),
    );
    assert!(matches!(verdict, ProverVerdict::Proved { .. }));

    let verdict = prove_entailment(
        &sentences(&["P($p)"]),
        &sentences(&["forall x. P(x)"]),
        &quick(),
    );
    let ProverVerdict::Refuted { model, params } = verdict else {
        panic!("expected a countermodel, got {verdict:?}");
    };
    assert_eq!(model.size(), 2);
    assert_eq!(params, ParamAssignment::from([("p".to_string(), 0)]));
}

#[test]
fn unbounded_orders_exhaust_the_budget() {
    let mut sig = Signature::new().with_relation("L", 2);
    let mut parse = |t: &str| parse_fo_with(t, &mut sig).unwrap();
    let premises = BTreeSet::from([
        parse("forall x. exists y. L(x, y)"),
        parse("forall x. not L(x, x)"),
        parse("forall x. forall y. forall z. ((L(x, y) & L(y, z)) -> L(x, z))"),
    ]);
    let verdict = prove_entailment(&premises, &sentences(&["P(c)"]), &quick());
    assert!(matches!(verdict, ProverVerdict::Unknown { .. }));
}

#[test]
fn structure_enumeration_is_exhaustive_and_deterministic() {
    let sig = Signature::new().with_relation("P", 1).with_constant("c");
    let all: Vec<Structure> = structures_over(&sig, 2).collect();
    assert_eq!(all.len(), 4 * 2);
    assert_eq!(all[0].relation("P").unwrap(), &BTreeSet::new());
    assert_eq!(all[1].relation("P").unwrap(), &BTreeSet::from([vec![0]]));

    let none = Signature::new();
    assert_eq!(structures_over(&none, 3).count(), 1);
}

fn arb_sentence() -> impl Strategy<Value = FoFormula> {
    let var = |ix: usize| Term::var(["x", "y"][ix]);
    let leaf = prop_oneof![
        (0usize..2).prop_map(move |i| FoFormula::Rel("P".into(), vec![var(i)])),
        (0usize..2).prop_map(move |i| FoFormula::Rel("Q".into(), vec![var(i)])),
        (0usize..2).prop_map(move |i| FoFormula::Equal(var(i), Term::Const("c".into()))),
        Just(FoFormula::Equal(var(0), var(1))),
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FoFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FoFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| FoFormula::implies(a, b)),
            inner.clone().prop_map(FoFormula::not),
            (0usize..2, inner.clone()).prop_map(|(i, f)| FoFormula::exists(["x", "y"][i], f)),
            (0usize..2, inner).prop_map(|(i, f)| FoFormula::forall(["x", "y"][i], f)),
        ]
    })
    .prop_map(|f| {
        let free: Vec<String> = f.free_team_vars().into_iter().collect();
        FoFormula::forall_many(&free, f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn proofs_never_coexist_with_countermodels(
        premise in arb_sentence(),
        goal in arb_sentence(),
    ) {
        let premises = BTreeSet::from([premise.clone()]);
        let goals = BTreeSet::from([goal.clone()]);
        let budget = ProverBudget { depth: 3, ms: 300, cm_size: 3 };
        if let ProverVerdict::Proved { .. } = prove_entailment(&premises, &goals, &budget) {
            let refutation = BTreeSet::from([premise, FoFormula::not(goal)]);
            prop_assert!(find_countermodel(&refutation, 3).is_none());
        }
    }

    #[test]
    fn larger_budgets_only_resolve_unknowns(
        premise in arb_sentence(),
        goal in arb_sentence(),
    ) {
        let premises = BTreeSet::from([premise]);
        let goals = BTreeSet::from([goal]);
        let lean = ProverBudget { depth: 2, ms: 150, cm_size: 2 };
        let ample = ProverBudget { depth: 4, ms: 600, cm_size: 3 };
        let first = prove_entailment(&premises, &goals, &lean);
        let second = prove_entailment(&premises, &goals, &ample);
        let flipped = matches!(
            (&first, &second),
            (ProverVerdict::Proved { .. }, ProverVerdict::Refuted { .. })
                | (ProverVerdict::Refuted { .. }, ProverVerdict::Proved { .. })
        );
        prop_assert!(!flipped, "verdict flipped: {first:?} then {second:?}");
    }
}

