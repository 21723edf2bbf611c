use proptest::prelude::*;

use crate::syntax::parse_fo;

use super::*;

fn m2_r0() -> Structure {
    let mut m = Structure::with_domain(2);
    m.add_relation("R", 1, [vec![0]]).unwrap();
    m
}

fn assign(pairs: &[(&str, Elem)]) -> Assignment {
    pairs.iter().map(|(v, e)| (v.to_string(), *e)).collect()
}

#[test]
fn tuples_enumerate_lexicographically() {
    assert_eq!(tuples(2, 0).collect::<Vec<_>>(), vec![Vec::<Elem>::new()]);
    assert_eq!(tuples(0, 1).count(), 0);
    assert_eq!(
        tuples(2, 2).collect::<Vec<_>>(),
        vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
    );
}

#[test]
fn eval_fo_checks_relation_membership() {
    let m = m2_r0();
    let f = parse_fo("R(x)", m.signature()).unwrap();
    let h = ParamAssignment::new();
    assert!(eval_fo(&m, &h, &assign(&[("x", 0)]), &f).unwrap());
    assert!(!eval_fo(&m, &h, &assign(&[("x", 1)]), &f).unwrap());
}

#[test]
fn eval_fo_quantifies_over_nonempty_domain() {
    let m = Structure::with_domain(2);
    let f = parse_fo("exists x. x = x", m.signature()).unwrap();
    assert!(eval_fo(&m, &ParamAssignment::new(), &Assignment::new(), &f).unwrap());
}

#[test]
fn eval_fo_reports_scope_and_symbol_errors() {
    let m = m2_r0();
    let h = ParamAssignment::new();
    let f = parse_fo("R(x)", m.signature()).unwrap();
    assert_eq!(
        eval_fo(&m, &h, &Assignment::new(), &f),
        Err(ModelError::ScopeTeam(vec!["x".into()]))
    );
    let g = FoFormula::Rel("Q".into(), vec![Term::var("x")]);
    assert_eq!(
        eval_fo(&m, &h, &assign(&[("x", 0)]), &g),
        Err(ModelError::Uninterpreted {
            what: "relation",
            name: "Q".into()
        })
    );
}

#[test]
fn definition_team_collects_satisfying_assignments() {
    let m = m2_r0();
    let h = ParamAssignment::new();
    let f = parse_fo("R(x)", m.signature()).unwrap();
    let team = team_of_definition(&m, &f, &h, &["x"]).unwrap();
    assert_eq!(team, Team::from_rows(&["x"], [vec![0]]).unwrap());

    let empty = team_of_definition(&m, &FoFormula::False, &h, &["x", "y"]).unwrap();
    assert!(empty.is_empty());
    assert_eq!(empty.vars(), ["x".to_string(), "y".into()]);

    let g = parse_fo("x = $p1", m.signature()).unwrap();
    let h1: ParamAssignment = [("p1".to_string(), 1)].into();
    let team = team_of_definition(&m, &g, &h1, &["x", "y"]).unwrap();
    assert_eq!(
        team,
        Team::from_rows(&["x", "y"], [vec![1, 0], vec![1, 1]]).unwrap()
    );
}

#[test]
fn canonical_definition_is_a_row_diagram() {
    let (gamma, h) = canonical_team_definition(&Team::empty(&["x"]).unwrap());
    assert_eq!(gamma, FoFormula::False);
    assert!(h.is_empty());

    let (gamma, h) = canonical_team_definition(&Team::from_rows(&["x"], [vec![0]]).unwrap());
    assert_eq!(gamma.to_string(), "x = $q1");
    assert_eq!(h, [("q1".to_string(), 0)].into());

    let (gamma, h) =
        canonical_team_definition(&Team::from_rows(&["x", "y"], [vec![0, 1]]).unwrap());
    assert_eq!(gamma.to_string(), "(x = $q1 & y = $q2)");
    assert_eq!(h, [("q1".to_string(), 0), ("q2".to_string(), 1)].into());
}

#[test]
fn restriction_projects_and_deduplicates() {
    let x = Team::from_rows(&["x", "y"], [vec![0, 0], vec![0, 1]]).unwrap();
    assert_eq!(
        x.restrict(&["x"]).unwrap(),
        Team::from_rows(&["x"], [vec![0]]).unwrap()
    );
    assert_eq!(x.restrict(&["x", "y"]).unwrap(), x);
    let empty = Team::empty(&["x", "y"]).unwrap();
    assert!(empty.restrict(&["y"]).unwrap().is_empty());
    assert_eq!(
        x.restrict(&["z"]),
        Err(ModelError::NotSubset(vec!["z".into()]))
    );
}

#[test]
fn universal_extension_multiplies_rows() {
    let m = Structure::with_domain(2);
    let x = Team::from_rows(&["x"], [vec![0]]).unwrap();
    assert_eq!(
        x.extend_universal(&m, "y"),
        Team::from_rows(&["x", "y"], [vec![0, 0], vec![0, 1]]).unwrap()
    );
    assert!(Team::empty(&["x"]).unwrap().extend_universal(&m, "y").is_empty());
    assert_eq!(
        x.extend_universal(&m, "x"),
        Team::from_rows(&["x"], [vec![0], vec![1]]).unwrap()
    );
}

#[test]
fn x_variations_of_a_singleton() {
    let m = Structure::with_domain(2);
    let x = Team::from_rows(&["x"], [vec![0]]).unwrap();
    let got: Vec<Team> = enumerate_x_variations(&m, &x, "y").collect();
    assert_eq!(
        got,
        vec![
            Team::from_rows(&["x", "y"], [vec![0, 0]]).unwrap(),
            Team::from_rows(&["x", "y"], [vec![0, 1]]).unwrap(),
            Team::from_rows(&["x", "y"], [vec![0, 0], vec![0, 1]]).unwrap(),
        ]
    );
}

#[test]
fn empty_team_has_one_variation() {
    let m = Structure::with_domain(3);
    let x = Team::empty(&["x"]).unwrap();
    let got: Vec<Team> = enumerate_x_variations(&m, &x, "y").collect();
    assert_eq!(got, vec![Team::empty(&["x", "y"]).unwrap()]);
}

#[test]
fn structure_enumeration_is_exhaustive_and_distinct() {
    let sig = Signature::new().with_relation("R", 1).with_constant("c");
    let all: Vec<Structure> = enumerate_structures(&sig, 2).collect();
    assert_eq!(all.len(), 8);
    let distinct: std::collections::BTreeSet<String> =
        all.iter().map(|m| print_structure("m", m)).collect();
    assert_eq!(distinct.len(), 8);
}

#[test]
fn structure_files_round_trip() {
    let mut m = Structure::new(&["a", "b", "c"]).unwrap();
    m.add_relation("R", 2, [vec![0, 1], vec![2, 2]]).unwrap();
    m.add_function("f", 1, [(vec![0], 1), (vec![1], 2), (vec![2], 0)])
        .unwrap();
    m.add_constant("k", 2).unwrap();
    let text = print_structure("M1", &m);
    let (name, back) = parse_structure(&text).unwrap();
    assert_eq!(name, "M1");
    assert_eq!(back, m);
}

#[test]
fn structure_files_reject_partial_functions() {
    let text = "model M { domain = { a, b } fun f/1 = { a -> b } }";
    let e = parse_structure(text).unwrap_err();
    assert!(e.to_string().contains("no value at"), "{e}");
}

#[test]
fn team_files_round_trip() {
    let m = Structure::with_domain(2);
    let x = Team::from_rows(&["x", "y"], [vec![0, 1], vec![1, 1]]).unwrap();
    let text = print_team("X", &m, &x);
    let (name, back) = parse_team(&text, &m).unwrap();
    assert_eq!(name, "X");
    assert_eq!(back, x);

    let unit = Team::unit();
    let (_, back) = parse_team(&print_team("U", &m, &unit), &m).unwrap();
    assert_eq!(back, unit);
}

#[test]
fn team_files_check_elements_and_width() {
    let m = Structure::with_domain(2);
    let e = parse_team("team X over (x) { (7) }", &m).unwrap_err();
    assert!(e.to_string().contains("unknown domain element"), "{e}");
    let e = parse_team("team X over (x) { (0, 1) }", &m).unwrap_err();
    assert!(e.to_string().contains("2 values"), "{e}");
}

fn arb_instance() -> impl Strategy<Value = (usize, usize, u16)> {
    // (domain size, variable count, row-selection mask)
    (1usize..=3, 0usize..=2, any::<u16>())
}

fn build_team(m: &Structure, nvars: usize, mask: u16) -> Team {
    let vars = ["x", "y"];
    let mut team = Team::empty(&vars[..nvars]).unwrap();
    for (i, row) in tuples(m.size(), nvars).enumerate() {
        if mask & (1 << (i % 16)) != 0 {
            team.insert_row(row).unwrap();
        }
    }
    team
}

proptest! {
    #[test]
    fn canonical_definition_round_trips((size, nvars, mask) in arb_instance()) {
        let m = Structure::with_domain(size);
        let team = build_team(&m, nvars, mask);
        let (gamma, h) = canonical_team_definition(&team);
        let vars: Vec<String> = team.vars().to_vec();
        let back = team_of_definition(&m, &gamma, &h, &vars).unwrap();
        prop_assert_eq!(back, team);
    }

    #[test]
    fn restriction_commutes_with_universal_extension((size, nvars, mask) in arb_instance()) {
        let m = Structure::with_domain(size);
        let team = build_team(&m, nvars, mask);
        let keep: Vec<String> = team
            .vars()
            .iter()
            .filter(|v| v.as_str() != "x")
            .cloned()
            .collect();
        let lhs = team.extend_universal(&m, "x").restrict(&keep).unwrap();
        let rhs = team.restrict(&keep).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn variations_satisfy_the_defining_predicate(
        (size, nvars, mask) in (1usize..=2, 1usize..=2, any::<u16>())
    ) {
        let m = Structure::with_domain(size);
        let team = build_team(&m, nvars, mask);
        prop_assume!(team.len() <= 3);
        let keep: Vec<String> = team
            .vars()
            .iter()
            .filter(|v| v.as_str() != "x")
            .cloned()
            .collect();
        let extended = team.extend_universal(&m, "x");
        let base = team.restrict(&keep).unwrap();
        let mut count = 0usize;
        for variation in enumerate_x_variations(&m, &team, "x") {
            prop_assert!(variation.is_subteam_of(&extended));
            prop_assert_eq!(variation.restrict(&keep).unwrap(), base.clone());
            count += 1;
        }
        let expected = ((1usize << size) - 1).pow(base.len() as u32);
        prop_assert_eq!(count, expected);
    }
}
