//! Independence logic over finite first-order structures.
//!
//! The crate implements three satisfaction relations for negation-normal-form
//! independence logic and a sequent calculus that ties them together:
//!
//! * [`semantics`]: team semantics, where a formula is satisfied by a set of
//!   assignments (a team) over a structure.
//! * [`general`]: the same clauses relativized to a general model, a structure
//!   paired with a family of admissible teams that supplies the disjunction
//!   and existential witnesses.
//! * [`entailment`]: a symbolic reading where teams are first-order definable
//!   sets and each clause becomes a classical entailment between definitions.
//!
//! [`proof`] checks sequent derivations whose soundness can be probed against
//! all three readings, [`prover`] discharges the first-order side conditions
//! those rules generate, [`syntax`] and [`model`] supply the shared ASTs,
//! structures, and teams, and [`selftest`] wires small end-to-end checks for
//! the command-line tool.

pub mod entailment;
pub mod general;
pub mod model;
pub mod proof;
pub mod prover;
pub mod selftest;
pub mod semantics;
pub mod syntax;

pub use entailment::{check_witness, eval_entailment, eval_entailment_witnessed, WitnessTree};
pub use general::{
    check_general_closure, check_theta_closed, least_family, ClosureVerdict, GeneralModel,
    TeamFamily, Theta, ThetaVerdict,
};
pub use proof::{
    apply_rule, axiom_ind, axiom_lit, check_proof, derive_dep, derive_fo, parse_proof,
    parse_sequent, print_proof, print_sequent, theta_fo, validate_sequent, CheckReport, Overall,
    Proof, ProofError, ProofStep, Rule, Sequent, SequentVerdict, StepStatus,
};
pub use prover::{find_countermodel, prove_entailment, ProverBudget, ProverVerdict};
pub use selftest::{run_selftest, SelfCheck};
pub use semantics::{eval_full, eval_gts, sat_independence_atom, Evaluator};

pub use model::{
    canonical_team_definition, enumerate_x_variations, eval_fo, team_of_definition, Assignment,
    ParamAssignment, Structure, Team,
};
pub use syntax::{
    desugar_dep, parse_fo, parse_il, FoFormula, IlAtom, IlFormula, ParseError, Signature, Term,
};
