use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::model::{team_of_definition, Structure, Team};
use crate::semantics::eval_full;
use crate::syntax::{desugar_dep, parse_fo, parse_il, IlAtom, Signature};

fn explicit(m: &Structure, teams: BTreeSet<Team>) -> GeneralModel {
    GeneralModel::new(m.clone(), TeamFamily::Explicit(teams)).unwrap()
}

#[test]
fn explicit_families_must_hold_their_empty_teams() {
    let m = Structure::with_domain(2);
    let x = Team::from_rows(&["x"], [vec![0]]).unwrap();
    let missing = GeneralModel::new(
        m.clone(),
        TeamFamily::Explicit([x.clone()].into_iter().collect()),
    );
    assert_eq!(
        missing.unwrap_err(),
        ModelError::MissingEmptyTeam(vec!["x".to_string()])
    );
    let teams: BTreeSet<Team> = [x, Team::empty(&["x"]).unwrap()].into_iter().collect();
    assert!(GeneralModel::new(m, TeamFamily::Explicit(teams)).is_ok());
}

#[test]
fn full_and_least_families_are_closed_at_any_bound() {
    let m = Structure::with_domain(2);
    for family in [TeamFamily::Full, TeamFamily::Least] {
        let g = GeneralModel::new(m.clone(), family).unwrap();
        for bound in [1, 7] {
            assert_eq!(
                check_general_closure(&g, &["x", "y"], bound).unwrap(),
                ClosureVerdict::Closed
            );
        }
    }
}

#[test]
fn closure_bound_must_be_positive() {
    let m = Structure::with_domain(2);
    let g = GeneralModel::new(m, TeamFamily::Full).unwrap();
    assert_eq!(
        check_general_closure(&g, &["x"], 0).unwrap_err(),
        ModelError::ZeroBound
    );
}

#[test]
fn closure_catches_a_missing_universal_extension() {
    let m = Structure::with_domain(2);
    let x = Team::from_rows(&["x"], [vec![0]]).unwrap();
    let extension = x.extend_universal(&m, "y");
    let mut teams = least_family(&m, &["x", "y"]).unwrap();
    assert!(teams.remove(&extension));
    let g = explicit(&m, teams.clone());
    match check_general_closure(&g, &["x", "y"], 5).unwrap() {
        ClosureVerdict::Violation(v) => {
            assert_eq!(v.team, extension);
            let (ext, _) = family_extension(&m, &teams).unwrap();
            let defined = team_of_definition(&ext, &v.formula, &v.params, &v.vars).unwrap();
            assert_eq!(defined, v.team);
        }
        ClosureVerdict::Closed => panic!("missing extension went unnoticed"),
    }
}

#[test]
fn closure_names_a_missing_team_by_its_diagram() {
    let m = Structure::with_domain(2);
    let target = Team::from_rows(&["x"], [vec![1]]).unwrap();
    let mut teams = least_family(&m, &["x"]).unwrap();
    assert!(teams.remove(&target));
    let g = explicit(&m, teams);
    match check_general_closure(&g, &["x"], 3).unwrap() {
        ClosureVerdict::Violation(v) => {
            assert_eq!(v.formula, parse_fo("x = $m1", &Signature::new()).unwrap());
            assert_eq!(v.vars, vec!["x".to_string()]);
            assert_eq!(v.params, [("m1".to_string(), 1)].into_iter().collect());
            assert_eq!(v.team, target);
        }
        ClosureVerdict::Closed => panic!("missing team went unnoticed"),
    }
}

#[test]
fn least_family_enumerates_teams_over_every_subset() {
    let m = Structure::with_domain(2);
    let family = least_family(&m, &["x"]).unwrap();
    assert_eq!(family.len(), 6);
    assert!(family.contains(&Team::unit()));
    assert!(family.contains(&Team::empty::<&str>(&[]).unwrap()));
    assert!(family.contains(&Team::empty(&["x"]).unwrap()));
    assert!(family.contains(&Team::full(&m, &["x"]).unwrap()));

    let bare = least_family(&m, &[] as &[&str]).unwrap();
    assert_eq!(bare.len(), 2);

    assert_eq!(
        least_family(&m, &["x", "x"]).unwrap_err(),
        ModelError::DuplicateVar("x".to_string())
    );
}

#[test]
fn family_bounded_evaluation_limits_witnesses() {
    let m = Structure::with_domain(2);
    let phi = parse_il("exists y. (y = x)", &Signature::new()).unwrap();
    let x = Team::full(&m, &["x"]).unwrap();

    let full = GeneralModel::new(m.clone(), TeamFamily::Full).unwrap();
    assert!(full.eval(&x, &phi).unwrap());

    let starved: BTreeSet<Team> = [
        x.clone(),
        Team::empty(&["x"]).unwrap(),
        Team::empty(&["x", "y"]).unwrap(),
    ]
    .into_iter()
    .collect();
    let g = explicit(&m, starved);
    assert!(!g.eval(&x, &phi).unwrap());

    let absent = explicit(&m, [Team::empty(&["x"]).unwrap()].into_iter().collect());
    assert_eq!(absent.eval(&x, &phi).unwrap_err(), ModelError::NotInFamily);
}

#[test]
fn theta_tautology_needs_only_one_unary_team() {
    let m = Structure::with_domain(2);
    let theta = parse_theta(
        "theta { exists R/1 : forall x. (R(x) | not R(x)) }",
        m.signature(),
    )
    .unwrap();
    let g = explicit(&m, [Team::empty(&["x"]).unwrap()].into_iter().collect());
    assert_eq!(check_theta_closed(&g, &theta).unwrap(), ThetaVerdict::Closed);
}

#[test]
fn theta_demanding_a_proper_nonempty_relation_splits_on_domain_size() {
    let text = "theta { exists R/1 : ((exists x. R(x)) & (exists x. not R(x))) }";
    let m1 = Structure::with_domain(1);
    let theta = parse_theta(text, m1.signature()).unwrap();
    let g1 = GeneralModel::new(m1, TeamFamily::Full).unwrap();
    assert_eq!(
        check_theta_closed(&g1, &theta).unwrap(),
        ThetaVerdict::Violation { sentence: 0 }
    );

    let m2 = Structure::with_domain(2);
    let g2 = GeneralModel::new(m2, TeamFamily::Full).unwrap();
    assert_eq!(check_theta_closed(&g2, &theta).unwrap(), ThetaVerdict::Closed);
}

#[test]
fn theta_relation_variables_must_not_shadow_the_signature() {
    let mut m = Structure::with_domain(2);
    m.add_relation("R", 1, [vec![0]]).unwrap();
    let err = parse_theta("theta { exists R/1 : exists x. R(x) }", m.signature()).unwrap_err();
    assert!(err.to_string().contains("clashes"));

    let theta = Theta::new(vec![ThetaSentence {
        rel_vars: vec![("R".to_string(), 1)],
        body: parse_fo("exists x. R(x)", m.signature()).unwrap(),
    }])
    .unwrap();
    let g = GeneralModel::new(m, TeamFamily::Full).unwrap();
    assert_eq!(
        check_theta_closed(&g, &theta).unwrap_err(),
        ModelError::RelVarClash("R".to_string())
    );
}

#[test]
fn theta_sentences_are_validated() {
    let open = ThetaSentence {
        rel_vars: vec![("R".to_string(), 1)],
        body: parse_fo("R(x)", &Signature::new().with_relation("R", 1)).unwrap(),
    };
    assert_eq!(
        Theta::new(vec![open]).unwrap_err(),
        ModelError::SentenceFreeVars("x".to_string())
    );

    let doubled = ThetaSentence {
        rel_vars: vec![("R".to_string(), 1), ("R".to_string(), 2)],
        body: FoFormula::True,
    };
    assert_eq!(
        Theta::new(vec![doubled]).unwrap_err(),
        ModelError::DuplicateRelVar("R".to_string())
    );
}

#[test]
fn theta_files_round_trip() {
    let m = Structure::with_domain(2);
    let text = "theta {\n  exists R/1 : forall x. (R(x) | not R(x))\n  exists R/1, S/2 : exists x. (R(x) & S(x, x))\n}\n";
    let theta = parse_theta(text, m.signature()).unwrap();
    assert_eq!(theta.sentences().len(), 2);
    let printed = print_theta(&theta);
    assert_eq!(parse_theta(&printed, m.signature()).unwrap(), theta);
    assert_eq!(parse_theta("theta { }", m.signature()).unwrap(), Theta::default());
}

#[test]
fn family_files_round_trip() {
    let m = Structure::with_domain(2);
    let teams = least_family(&m, &["x"]).unwrap();
    let printed = print_family("F", &m, &teams);
    let (name, reread) = parse_family(&printed, &m).unwrap();
    assert_eq!(name, "F");
    assert_eq!(reread, teams);

    let (_, collapsed) = parse_family(
        "family G { team A over (x) { (0) } team B over (x) { (0) } }",
        &m,
    )
    .unwrap();
    assert_eq!(collapsed.len(), 1);
}

/// Grow a family until the bounded closure check stops complaining; adds
/// the empty team of each new domain alongside every reported witness.
fn saturate(m: &Structure, mut teams: BTreeSet<Team>, universe: &[&str], bound: usize) -> BTreeSet<Team> {
    loop {
        let g = explicit(m, teams.clone());
        match check_general_closure(&g, universe, bound).unwrap() {
            ClosureVerdict::Closed => return teams,
            ClosureVerdict::Violation(v) => {
                teams.insert(Team::empty(v.team.vars()).unwrap());
                teams.insert(v.team);
            }
        }
    }
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
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::tensor_or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| IlFormula::and(a, b)),
            (0usize..2, inner.clone()).prop_map(|(i, f)| IlFormula::exists(["x", "y"][i], f)),
            (0usize..2, inner).prop_map(|(i, f)| IlFormula::forall(["x", "y"][i], f)),
        ]
    })
}

/// Random subfamily of the least family over a two-element domain, padded
/// with the empty team of each member's domain.
fn arb_subfamily(universe: &'static [&'static str]) -> impl Strategy<Value = BTreeSet<Team>> {
    let all: Vec<Team> = least_family(&Structure::with_domain(2), universe)
        .unwrap()
        .into_iter()
        .collect();
    proptest::collection::vec(any::<bool>(), all.len()).prop_map(move |picks| {
        let mut teams = BTreeSet::new();
        for (team, pick) in all.iter().zip(picks) {
            if pick {
                teams.insert(Team::empty(team.vars()).unwrap());
                teams.insert(team.clone());
            }
        }
        teams
    })
}

proptest! {
    #[test]
    fn removing_any_nonempty_team_is_caught(pick in any::<u16>()) {
        let m = Structure::with_domain(2);
        let least = least_family(&m, &["x", "y"]).unwrap();
        let nonempty: Vec<&Team> = least.iter().filter(|t| !t.is_empty()).collect();
        let target = nonempty[pick as usize % nonempty.len()].clone();
        let mut teams = least.clone();
        teams.remove(&target);
        let g = explicit(&m, teams);
        match check_general_closure(&g, &["x", "y"], 5).unwrap() {
            ClosureVerdict::Violation(v) => prop_assert_eq!(v.team, target),
            ClosureVerdict::Closed => prop_assert!(false, "missing team went unnoticed"),
        }
    }

    #[test]
    fn saturation_reaches_the_least_family(seed in arb_subfamily(&["x"])) {
        let m = Structure::with_domain(2);
        let closed = saturate(&m, seed, &["x"], 3);
        prop_assert_eq!(closed, least_family(&m, &["x"]).unwrap());
    }

    #[test]
    fn closed_families_intersect_to_closed_families(
        a in arb_subfamily(&["x", "y"]),
        b in arb_subfamily(&["x", "y"]),
    ) {
        let m = Structure::with_domain(2);
        let fa = saturate(&m, a, &["x", "y"], 2);
        let fb = saturate(&m, b, &["x", "y"], 2);
        let both: BTreeSet<Team> = fa.intersection(&fb).cloned().collect();
        let g = explicit(&m, both);
        prop_assert_eq!(check_general_closure(&g, &["x", "y"], 2).unwrap(), ClosureVerdict::Closed);
    }

    #[test]
    fn least_family_evaluation_matches_direct_semantics(
        m in arb_structure(),
        mask in any::<u16>(),
        phi in arb_phi(),
    ) {
        let phi = desugar_dep(&phi).unwrap();
        let rows = crate::model::tuples(m.size(), 2)
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, r)| r);
        let x = Team::from_rows(&["x", "y"], rows).unwrap();
        let g = GeneralModel::new(m.clone(), TeamFamily::Least).unwrap();
        prop_assert_eq!(g.eval(&x, &phi).unwrap(), eval_full(&m, &x, &phi).unwrap());
    }

    #[test]
    fn explicit_theta_closure_transfers_to_the_full_family(
        teams in arb_subfamily(&["x"]),
    ) {
        let m = Structure::with_domain(2);
        let theta = parse_theta(
            "theta { exists R/1 : ((exists x. R(x)) & (exists x. not R(x))) }",
            m.signature(),
        )
        .unwrap();
        let g = explicit(&m, teams);
        if check_theta_closed(&g, &theta).unwrap() == ThetaVerdict::Closed {
            let full = GeneralModel::new(m, TeamFamily::Full).unwrap();
            prop_assert_eq!(check_theta_closed(&full, &theta).unwrap(), ThetaVerdict::Closed);
        }
    }
}
