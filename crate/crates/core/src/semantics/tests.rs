use proptest::prelude::*;

use crate::model::{eval_fo, tuples};
use crate::syntax::{desugar_dep, fo_of_il, parse_il};

use super::*;

fn team(vars: &[&str], rows: &[&[Elem]]) -> Team {
    Team::from_rows(vars, rows.iter().map(|r| r.to_vec())).unwrap()
}

fn m2_consts() -> Structure {
    let mut m = Structure::with_domain(2);
    m.add_constant("0", 0).unwrap();
    m.add_constant("1", 1).unwrap();
    m
}

/// Reference check: the satisfaction condition as a literal triple loop
/// over rows.
fn indep_oracle(m: &Structure, x: &Team, t1: &[Term], t2: &[Term], t3: &[Term]) -> bool {
    let rows: Vec<Assignment> = x.assignments().collect();
    let val = |s: &Assignment, ts: &[Term]| tuple_value(m, s, ts).unwrap();
    rows.iter().all(|s| {
        rows.iter().all(|s2| {
            val(s, t1) != val(s2, t1)
                || rows.iter().any(|s3| {
                    val(s3, t1) == val(s, t1)
                        && val(s3, t2) == val(s, t2)
                        && val(s3, t3) == val(s2, t3)
                })
        })
    })
}

#[test]
fn independence_atom_examples() {
    let m = Structure::with_domain(2);
    let (tx, ty) = (vec![Term::var("x")], vec![Term::var("y")]);

    let empty = Team::empty(&["x", "y"]).unwrap();
    assert!(sat_independence_atom(&m, &empty, &tx, &ty, &ty).unwrap());

    let full = team(&["x", "y"], &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
    assert!(sat_independence_atom(&m, &full, &[], &tx, &ty).unwrap());

    let diag = team(&["x", "y"], &[&[0, 0], &[1, 1]]);
    assert!(!sat_independence_atom(&m, &diag, &[], &tx, &ty).unwrap());
}

#[test]
fn split_disjunction_searches_covers() {
    let m = m2_consts();
    let x = team(&["x"], &[&[0], &[1]]);
    let f = parse_il("(x = 0 \\/ x = 1)", m.signature()).unwrap();
    assert!(eval_full(&m, &x, &f).unwrap());
    let g = parse_il("(x = 0 \\/ x = 0)", m.signature()).unwrap();
    assert!(!eval_full(&m, &x, &g).unwrap());
}

#[test]
fn constancy_atom_after_desugaring() {
    let m = Structure::with_domain(2);
    let dep = parse_il("dep(x)", m.signature()).unwrap();
    let two = team(&["x"], &[&[0], &[1]]);
    assert_eq!(eval_full(&m, &two, &dep), Err(ModelError::Sugared));
    let f = desugar_dep(&dep).unwrap();
    assert!(!eval_full(&m, &two, &f).unwrap());
    let one = team(&["x"], &[&[0]]);
    assert!(eval_full(&m, &one, &f).unwrap());
}

#[test]
fn quantifier_clauses_on_small_teams() {
    let mut m = Structure::with_domain(2);
    m.add_relation("R", 2, [vec![0, 1], vec![1, 0]]).unwrap();
    // every x pairs with a witness y in R
    let f = parse_il("forall x. exists y. R(x, y)", m.signature()).unwrap();
    assert!(eval_full(&m, &Team::unit(), &f).unwrap());
    let g = parse_il("forall x. forall y. R(x, y)", m.signature()).unwrap();
    assert!(!eval_full(&m, &Team::unit(), &g).unwrap());
}

#[test]
fn cover_enumeration_counts_three_to_the_n() {
    let x = team(&["x", "y"], &[&[0, 0], &[1, 1]]);
    let pairs: Vec<(Team, Team)> = covers(&x).collect();
    assert_eq!(pairs.len(), 9);
    for (y, z) in &pairs {
        assert_eq!(&y.union(z).unwrap(), &x);
    }
}

#[test]
fn evaluator_checks_symbols_once_and_scope_per_team() {
    let m = m2_consts();
    let sugared = IlFormula::Dep(vec![Term::var("x")]);
    assert!(matches!(
        Evaluator::new(&m, &sugared),
        Err(ModelError::Sugared)
    ));

    let f = parse_il("x = y", m.signature()).unwrap();
    let mut session = Evaluator::new(&m, &f).unwrap();
    let narrow = team(&["x"], &[&[0]]);
    assert_eq!(
        session.eval(&narrow),
        Err(ModelError::ScopeTeam(vec!["y".to_string()]))
    );
    assert!(session.eval(&team(&["x", "y"], &[&[0, 0]])).unwrap());
}

#[test]
fn family_semantics_limits_split_witnesses() {
    let m = m2_consts();
    let x = team(&["x"], &[&[0], &[1]]);
    let y0 = team(&["x"], &[&[0]]);
    let y1 = team(&["x"], &[&[1]]);
    let f = parse_il("(x = 0 \\/ x = 1)", m.signature()).unwrap();

    let mut family: BTreeSet<Team> = [x.clone(), y0].into();
    assert!(!eval_gts(&m, &family, &x, &f).unwrap());
    assert!(eval_full(&m, &x, &f).unwrap());

    family.insert(y1);
    assert!(eval_gts(&m, &family, &x, &f).unwrap());

    let lit = parse_il("x = x", m.signature()).unwrap();
    assert!(eval_gts(&m, &family, &x, &lit).unwrap());

    let outsider = team(&["y"], &[&[0]]);
    assert_eq!(
        eval_gts(&m, &family, &outsider, &lit),
        Err(ModelError::NotInFamily)
    );
}

#[test]
fn family_semantics_limits_existential_witnesses() {
    let m = m2_consts();
    let x = team(&["x"], &[&[0]]);
    let f = parse_il("exists y. y = 1", m.signature()).unwrap();
    // the only variation present fixes y = 0, so the witness is missing
    let family: BTreeSet<Team> = [x.clone(), team(&["x", "y"], &[&[0, 0]])].into();
    assert!(!eval_gts(&m, &family, &x, &f).unwrap());
    let with_witness: BTreeSet<Team> =
        [x.clone(), team(&["x", "y"], &[&[0, 1]])].into();
    assert!(eval_gts(&m, &with_witness, &x, &f).unwrap());
    assert!(eval_full(&m, &x, &f).unwrap());
}

/// All teams over every subset of `{x, y}`: the family in which general
/// semantics must agree with the full semantics.
fn all_teams_family(m: &Structure) -> BTreeSet<Team> {
    let mut family = BTreeSet::new();
    for vars in [vec![], vec!["x"], vec!["y"], vec!["x", "y"]] {
        let width = vars.len();
        let all_rows: Vec<Vec<Elem>> = tuples(m.size(), width).collect();
        for mask in 0..(1u32 << all_rows.len()) {
            let rows = all_rows
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, r)| r.clone());
            family.insert(Team::from_rows(&vars, rows).unwrap());
        }
    }
    family
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
        (var_term(), var_term(), var_term()).prop_map(|(a, b, c)| {
            IlFormula::Indep(vec![a], vec![b], vec![c])
        }),
        (var_term(), var_term()).prop_map(|(a, b)| IlFormula::Dep(vec![a, b])),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::tensor_or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::and(a, b)),
            (0usize..2, inner.clone()).prop_map(|(i, f)| IlFormula::exists(["x", "y"][i], f)),
            (0usize..2, inner).prop_map(|(i, f)| IlFormula::forall(["x", "y"][i], f)),
        ]
    })
}

fn arb_flat_phi() -> impl Strategy<Value = IlFormula> {
    let leaf = prop_oneof![
        (any::<bool>(), var_term())
            .prop_map(|(pos, t)| IlFormula::Literal(pos, IlAtom::Rel("R".into(), vec![t]))),
        (any::<bool>(), var_term(), var_term())
            .prop_map(|(pos, a, b)| IlFormula::Literal(pos, IlAtom::Equal(a, b))),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::tensor_or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::and(a, b)),
            (0usize..2, inner.clone()).prop_map(|(i, f)| IlFormula::exists(["x", "y"][i], f)),
            (0usize..2, inner).prop_map(|(i, f)| IlFormula::forall(["x", "y"][i], f)),
        ]
    })
}

fn build_xy_team(m: &Structure, mask: u16) -> Team {
    let rows = tuples(m.size(), 2)
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, r)| r);
    Team::from_rows(&["x", "y"], rows).unwrap()
}

proptest! {
    #[test]
    fn independence_check_matches_triple_loop_oracle(
        m in arb_structure(),
        mask in any::<u16>(),
        pick in 0usize..3,
    ) {
        let x = build_xy_team(&m, mask);
        let (tx, ty) = (vec![Term::var("x")], vec![Term::var("y")]);
        let (t1, t2, t3) = match pick {
            0 => (vec![], tx.clone(), ty.clone()),
            1 => (tx.clone(), ty.clone(), ty.clone()),
            _ => (ty.clone(), tx.clone(), tx.clone()),
        };
        prop_assert_eq!(
            sat_independence_atom(&m, &x, &t1, &t2, &t3).unwrap(),
            indep_oracle(&m, &x, &t1, &t2, &t3)
        );
    }

    #[test]
    fn satisfaction_is_local(m in arb_structure(), mask in any::<u16>(), phi in arb_phi()) {
        let phi = desugar_dep(&phi).unwrap();
        let x = build_xy_team(&m, mask);
        let free: Vec<String> = phi.free_team_vars().into_iter().collect();
        let restricted = x.restrict(&free).unwrap();
        prop_assert_eq!(
            eval_full(&m, &x, &phi).unwrap(),
            eval_full(&m, &restricted, &phi).unwrap()
        );
    }

    #[test]
    fn empty_team_satisfies_everything(m in arb_structure(), phi in arb_phi()) {
        let phi = desugar_dep(&phi).unwrap();
        let empty = Team::empty(&["x", "y"]).unwrap();
        prop_assert!(eval_full(&m, &empty, &phi).unwrap());
    }

    #[test]
    fn flat_formulas_reduce_to_rowwise_truth(
        m in arb_structure(),
        mask in any::<u16>(),
        phi in arb_flat_phi(),
    ) {
        let x = build_xy_team(&m, mask);
        let fo = fo_of_il(&phi).unwrap();
        let h = ParamAssignment::new();
        let rowwise = x.assignments().all(|s| eval_fo(&m, &h, &s, &fo).unwrap());
        prop_assert_eq!(eval_full(&m, &x, &phi).unwrap(), rowwise);
    }

    #[test]
    fn dependence_sugar_matches_functional_dependency(
        m in arb_structure(),
        mask in any::<u16>(),
    ) {
        let x = build_xy_team(&m, mask);
        let dep = desugar_dep(&IlFormula::Dep(vec![Term::var("x"), Term::var("y")])).unwrap();
        let rows: Vec<&Vec<Elem>> = x.rows().collect();
        let fd = rows
            .iter()
            .all(|r| rows.iter().all(|r2| r[0] != r2[0] || r[1] == r2[1]));
        prop_assert_eq!(eval_full(&m, &x, &dep).unwrap(), fd);
    }

    #[test]
    fn family_of_all_teams_agrees_with_full_semantics(
        m in arb_structure(),
        mask in any::<u16>(),
        phi in arb_phi(),
    ) {
        let phi = desugar_dep(&phi).unwrap();
        let x = build_xy_team(&m, mask);
        let family = all_teams_family(&m);
        prop_assert_eq!(
            eval_gts(&m, &family, &x, &phi).unwrap(),
            eval_full(&m, &x, &phi).unwrap()
        );
    }

    #[test]
    fn evaluator_session_agrees_with_fresh_calls(
        m in arb_structure(),
        masks in proptest::collection::vec(any::<u16>(), 1..8),
        phi in arb_phi(),
    ) {
        let phi = desugar_dep(&phi).unwrap();
        let mut session = Evaluator::new(&m, &phi).unwrap();
        for mask in masks {
            let x = build_xy_team(&m, mask);
            prop_assert_eq!(session.eval(&x).unwrap(), eval_full(&m, &x, &phi).unwrap());
        }
    }

    #[test]
    fn smaller_families_satisfy_less(
        m in arb_structure(),
        mask in any::<u16>(),
        drop_mask in any::<u32>(),
        phi in arb_phi(),
    ) {
        let phi = desugar_dep(&phi).unwrap();
        let x = build_xy_team(&m, mask);
        let full_family = all_teams_family(&m);
        let sub: BTreeSet<Team> = full_family
            .iter()
            .enumerate()
            .filter(|(i, t)| *t == &x || drop_mask & (1 << (i % 32)) != 0)
            .map(|(_, t)| t.clone())
            .collect();
        if eval_gts(&m, &sub, &x, &phi).unwrap() {
            prop_assert!(eval_gts(&m, &full_family, &x, &phi).unwrap());
        }
    }
}
