//! Built-in diagnostic battery for the command-line tool.
//!
//! Each check exercises one cross-module invariant at desk scale, trading
//! generated input for exhaustive enumeration over a two-element structure
//! so the whole suite is deterministic and finishes in well under a second.
//! The heavyweight randomized version of the same properties lives in the
//! acceptance test; this battery is the smoke layer a user can run from a
//! shipped binary.

use std::collections::BTreeSet;

use crate::entailment::{
    check_witness, eval_entailment, eval_entailment_over, eval_entailment_witnessed,
};
use crate::general::{least_family, Theta};
use crate::model::{
    canonical_team_definition, team_of_definition, Assignment, Elem, ParamAssignment, Structure,
    Team,
};
use crate::proof::{
    axiom_lit, check_proof, derive_dep, derive_fo, validate_sequent, Overall, Sequent,
    SequentVerdict,
};
use crate::prover::{prove_entailment, ProverBudget, ProverVerdict};
use crate::semantics::{eval_full, eval_gts, sat_independence_atom};
use crate::syntax::{desugar_dep, parse_fo_with, parse_il_with, FoFormula, IlFormula, Signature, Term};

/// One named diagnostic and its outcome.
pub struct SelfCheck {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

/// Run every diagnostic and report each by name.
pub fn run_selftest() -> Vec<SelfCheck> {
    let checks: &[(&'static str, fn() -> Result<(), String>)] = &[
        ("independence_oracle", independence_oracle),
        ("dependence_sugar", dependence_sugar),
        ("locality", locality),
        ("empty_team", empty_team),
        ("full_family_agrees", full_family_agrees),
        ("definition_round_trip", definition_round_trip),
        ("entailment_matches_teams", entailment_matches_teams),
        ("witness_trees", witness_trees),
        ("prover_verdicts", prover_verdicts),
        ("derived_proofs", derived_proofs),
        ("kernel_rejects_corruption", kernel_rejects_corruption),
        ("sequent_validation", sequent_validation),
    ];
    checks
        .iter()
        .map(|&(name, f)| SelfCheck { name, outcome: f() })
        .collect()
}

fn structure() -> Structure {
    let mut m = Structure::with_domain(2);
    m.add_relation("R", 1, [vec![1]]).expect("fixture");
    m
}

fn fo(text: &str, sig: &mut Signature) -> FoFormula {
    parse_fo_with(text, sig).expect("fixture parses")
}

fn il(text: &str, sig: &mut Signature) -> IlFormula {
    parse_il_with(text, sig).expect("fixture parses")
}

/// Every team over `vars`, as the power set of the full team's rows.
fn all_teams(m: &Structure, vars: &[&str]) -> Vec<Team> {
    let full: Vec<Vec<Elem>> = Team::full(m, vars)
        .expect("fixture")
        .row_set()
        .iter()
        .cloned()
        .collect();
    (0u32..1 << full.len())
        .map(|mask| {
            let rows = full
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, r)| r.clone());
            Team::from_rows(vars, rows).expect("fixture")
        })
        .collect()
}

/// Mixed formula sample over team variables x and y; `dep` stays sugared
/// so callers decide when to expand it.
fn sample(sig: &mut Signature) -> Vec<IlFormula> {
    [
        "R(x)",
        "~R(y)",
        "x = y",
        "x != y",
        "indep(x; y; y)",
        "dep(x, y)",
        "(R(x) \\/ x = y)",
        "(R(x) /\\ indep(y; x; x))",
        "exists y. x = y",
        "forall y. indep(x; y; y)",
    ]
    .iter()
    .map(|t| il(t, sig))
    .collect()
}

fn tuple_of(s: &Assignment, vs: &[&str]) -> Vec<Elem> {
    vs.iter().map(|v| s[*v]).collect()
}

fn independence_oracle() -> Result<(), String> {
    let m = structure();
    let brute = |x: &Team, t1: &[&str], t2: &[&str], t3: &[&str]| -> bool {
        let rows: Vec<Assignment> = x.assignments().collect();
        rows.iter().all(|s| {
            rows.iter().all(|s2| {
                tuple_of(s, t1) != tuple_of(s2, t1)
                    || rows.iter().any(|w| {
                        tuple_of(w, t1) == tuple_of(s, t1)
                            && tuple_of(w, t2) == tuple_of(s, t2)
                            && tuple_of(w, t3) == tuple_of(s2, t3)
                    })
            })
        })
    };
    let atoms: &[(&[&str], &[&str], &[&str])] = &[
        (&["x"], &["y"], &["y"]),
        (&["y"], &["x"], &["x"]),
        (&["x"], &["x"], &["y"]),
        (&["x", "y"], &["x"], &["y"]),
    ];
    for x in all_teams(&m, &["x", "y"]) {
        for &(t1, t2, t3) in atoms {
            let terms = |vs: &[&str]| -> Vec<Term> { vs.iter().map(|v| Term::var(v)).collect() };
            let got = sat_independence_atom(&m, &x, &terms(t1), &terms(t2), &terms(t3))
                .map_err(|e| e.to_string())?;
            if got != brute(&x, t1, t2, t3) {
                return Err(format!(
                    "atom ({t1:?}; {t2:?}; {t3:?}) disagrees with the oracle on {x:?}"
                ));
            }
        }
    }
    Ok(())
}

fn dependence_sugar() -> Result<(), String> {
    let m = structure();
    let mut sig = Signature::new();
    let phi = desugar_dep(&il("dep(x, y)", &mut sig)).expect("fixture desugars");
    for x in all_teams(&m, &["x", "y"]) {
        let rows: Vec<Assignment> = x.assignments().collect();
        let functional = rows
            .iter()
            .all(|s| rows.iter().all(|t| s["x"] != t["x"] || s["y"] == t["y"]));
        if eval_full(&m, &x, &phi).map_err(|e| e.to_string())? != functional {
            return Err(format!("dep(x, y) disagrees with the oracle on {x:?}"));
        }
    }
    Ok(())
}

fn locality() -> Result<(), String> {
    let m = structure();
    let mut sig = Signature::new();
    for phi in sample(&mut sig) {
        let phi = desugar_dep(&phi).expect("fixture desugars");
        let free: Vec<String> = phi.free_team_vars().into_iter().collect();
        for x in all_teams(&m, &["x", "y"]) {
            let wide = eval_full(&m, &x, &phi).map_err(|e| e.to_string())?;
            let narrow = x.restrict(&free).map_err(|e| e.to_string())?;
            if wide != eval_full(&m, &narrow, &phi).map_err(|e| e.to_string())? {
                return Err(format!("{phi:?} changes verdict when restricted on {x:?}"));
            }
        }
    }
    Ok(())
}

fn empty_team() -> Result<(), String> {
    let m = structure();
    let mut sig = Signature::new();
    let empty = Team::empty(&["x", "y"]).expect("fixture");
    for phi in sample(&mut sig) {
        let phi = desugar_dep(&phi).expect("fixture desugars");
        if !eval_full(&m, &empty, &phi).map_err(|e| e.to_string())? {
            return Err(format!("{phi:?} rejects the empty team"));
        }
    }
    Ok(())
}

fn full_family_agrees() -> Result<(), String> {
    let m = structure();
    let mut sig = Signature::new();
    // At finite scale the least family contains every team, so general-team
    // semantics over it must coincide with full team semantics.
    let family = least_family(&m, &["x", "y"]).map_err(|e| e.to_string())?;
    for phi in sample(&mut sig) {
        let phi = desugar_dep(&phi).expect("fixture desugars");
        for x in all_teams(&m, &["x", "y"]) {
            let full = eval_full(&m, &x, &phi).map_err(|e| e.to_string())?;
            let general = eval_gts(&m, &family, &x, &phi).map_err(|e| e.to_string())?;
            if full != general {
                return Err(format!("{phi:?} splits the readings on {x:?}"));
            }
        }
    }
    Ok(())
}

fn definition_round_trip() -> Result<(), String> {
    let m = structure();
    for x in all_teams(&m, &["x", "y"]) {
        let (gamma, h) = canonical_team_definition(&x);
        let back =
            team_of_definition(&m, &gamma, &h, &["x", "y"]).map_err(|e| e.to_string())?;
        if back != x {
            return Err(format!("definition of {x:?} evaluates to {back:?}"));
        }
    }
    Ok(())
}

/// Definitions paired with every parameter assignment they need.
fn definitions(sig: &mut Signature) -> Vec<(FoFormula, ParamAssignment)> {
    let mut out = Vec::new();
    for text in ["R(x)", "x = y", "(R(x) & R(y))", "(not R(x) | x = y)"] {
        out.push((fo(text, sig), ParamAssignment::new()));
    }
    for e in 0..2 {
        out.push((
            fo("x = $p", sig),
            ParamAssignment::from([("p".to_string(), e)]),
        ));
    }
    out
}

fn entailment_matches_teams() -> Result<(), String> {
    let m = structure();
    let mut sig = Signature::new();
    for (gamma, h) in definitions(&mut sig) {
        let team =
            team_of_definition(&m, &gamma, &h, &["x", "y"]).map_err(|e| e.to_string())?;
        for phi in sample(&mut sig) {
            let symbolic = eval_entailment_over(&m, &gamma, &h, &phi, &["x", "y"])
                .map_err(|e| e.to_string())?;
            let direct = eval_full(&m, &team, &desugar_dep(&phi).expect("fixture desugars"))
                .map_err(|e| e.to_string())?;
            if symbolic != direct {
                return Err(format!("{phi:?} splits the readings under {gamma:?}"));
            }
        }
    }
    Ok(())
}

fn witness_trees() -> Result<(), String> {
    let m = structure();
    let mut sig = Signature::new();
    for (gamma, h) in definitions(&mut sig) {
        for phi in sample(&mut sig) {
            let verdict = eval_entailment(&m, &gamma, &h, &phi).map_err(|e| e.to_string())?;
            let tree =
                eval_entailment_witnessed(&m, &gamma, &h, &phi).map_err(|e| e.to_string())?;
            match tree {
                Some(tree) => {
                    if !verdict {
                        return Err(format!("{phi:?} yields a tree despite failing"));
                    }
                    if !check_witness(&m, &gamma, &h, &phi, &tree).map_err(|e| e.to_string())? {
                        return Err(format!("witness for {phi:?} is rejected"));
                    }
                }
                None if verdict => {
                    return Err(format!("{phi:?} holds but yields no tree"));
                }
                None => {}
            }
        }
    }
    Ok(())
}

fn prover_verdicts() -> Result<(), String> {
    let mut sig = Signature::new();
    let budget = ProverBudget {
        depth: 4,
        ms: 1_000,
        cm_size: 2,
    };
    let single = |t: &str, sig: &mut Signature| BTreeSet::from([fo(t, sig)]);
    let valid = prove_entailment(
        &single("forall x. P(x)", &mut sig),
        &single("exists y. P(y)", &mut sig),
        &budget,
    );
    if !matches!(valid, ProverVerdict::Proved { .. }) {
        return Err(format!("weakening came back as {valid:?}"));
    }
    let invalid = prove_entailment(
        &single("exists x. P(x)", &mut sig),
        &single("forall x. P(x)", &mut sig),
        &budget,
    );
    if !matches!(invalid, ProverVerdict::Refuted { .. }) {
        return Err(format!("overreach came back as {invalid:?}"));
    }
    Ok(())
}

fn proof_budget() -> ProverBudget {
    ProverBudget {
        depth: 5,
        ms: 2_000,
        cm_size: 2,
    }
}

fn derived_proofs() -> Result<(), String> {
    let mut sig = Signature::new();
    let disjunction = derive_fo(&fo("R(x)", &mut sig), &il("(x = x \\/ R(x))", &mut sig))
        .map_err(|e| e.to_string())?;
    let report = check_proof(&disjunction, &Theta::default(), &proof_budget());
    if report.overall != Overall::Verified {
        return Err(format!("disjunction derivation is {:?}", report.overall));
    }
    let determination = derive_dep(
        &fo("S(x, y)", &mut sig),
        &[Term::var("x")],
        &Term::var("y"),
    )
    .map_err(|e| e.to_string())?;
    let report = check_proof(&determination, &Theta::default(), &proof_budget());
    if report.overall != Overall::Verified {
        return Err(format!("dependence derivation is {:?}", report.overall));
    }
    Ok(())
}

fn kernel_rejects_corruption() -> Result<(), String> {
    let mut sig = Signature::new();
    let mut proof = derive_fo(&fo("R(x)", &mut sig), &il("(x = x \\/ R(x))", &mut sig))
        .map_err(|e| e.to_string())?;
    let last = proof.steps.last().expect("derivation is nonempty").clone();
    let wrong = IlFormula::tensor_or(last.sequent.phi().clone(), last.sequent.phi().clone());
    proof.steps.last_mut().expect("derivation is nonempty").sequent = Sequent::new(
        last.sequent.context().clone(),
        last.sequent.gamma().clone(),
        wrong,
    )
    .map_err(|e| e.to_string())?;
    let report = check_proof(&proof, &Theta::default(), &proof_budget());
    if report.overall != Overall::Rejected {
        return Err(format!("corrupted conclusion is {:?}", report.overall));
    }
    Ok(())
}

fn sequent_validation() -> Result<(), String> {
    let mut sig = Signature::new();
    let axiom = axiom_lit(&fo("R(x)", &mut sig), &il("x = x", &mut sig))
        .map_err(|e| e.to_string())?;
    match validate_sequent(&axiom, 3).map_err(|e| e.to_string())? {
        SequentVerdict::ValidUpTo(3) => {}
        v => return Err(format!("literal axiom validated as {v:?}")),
    }
    let overreach = Sequent::new(
        BTreeSet::new(),
        fo("R(x)", &mut sig),
        il("P(x)", &mut sig),
    )
    .map_err(|e| e.to_string())?;
    match validate_sequent(&overreach, 3).map_err(|e| e.to_string())? {
        SequentVerdict::CounterExample(m, _) if m.size() == 1 => Ok(()),
        v => Err(format!("invalid sequent validated as {v:?}")),
    }
}
