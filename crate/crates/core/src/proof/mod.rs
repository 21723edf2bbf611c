//! Sequent calculus for independence logic over team definitions.
//!
//! A sequent `Γ | γ ⊢ φ` pairs a first order context `Γ` (sentences up to
//! parameter variables) and a team definition `γ` with an independence
//! logic conclusion `φ`. Axioms introduce literals and independence atoms
//! under their defining side conditions; rules track splits, conjunctions,
//! quantifiers, context entailment, parameter abstraction, case splits,
//! and team-existence assumptions.
//!
//! The checker is a re-derivation kernel: every step is rebuilt from its
//! premises by the same constructors that generate rule instances, then
//! compared to the stated sequent syntactically (contexts as sets). There
//! is no unification or matching; authors must write contexts exactly as
//! the schemas produce them. The deterministic conventions are:
//!
//! * quantifier prefixes `∀⃗v` run in lexicographic variable order;
//! * `⋀Γ` conjoins a context in its set order, and `⋀∅` is `true`;
//! * fresh tuples for the independence axiom are named `v1_<x>`,
//!   `v2_<x>`, `v3_<x>` after the variables `<x>` they replace, with
//!   underscores doubled until nothing clashes;
//! * parameter abstraction rewrites `$p` to a team variable named `p`
//!   (primed until fresh) and binds it with an existential.
//!
//! Context entailment steps are not decided here: each one becomes an
//! obligation for the bounded prover, and an out-of-budget obligation
//! downgrades the report to conditionally verified instead of rejecting
//! the proof.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::general::Theta;
use crate::model::{eval_fo, Assignment, ModelError, ParamAssignment, Structure};
use crate::prover::{param_choices, prove_entailment, structures_over, ProverBudget, ProverVerdict};
use crate::syntax::{
    fo_of_il, rename_fo, rename_terms, terms_param_vars, FoFormula, IlFormula, RenameError,
    Signature, Term,
};

mod files;
pub use files::{parse_proof, parse_sequent, print_proof, print_sequent};


#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("a literal axiom needs a first order literal, got: {0}")]
    NotLiteral(String),
    #[error("parameter variables are not allowed here: ${0}")]
    ParamVar(String),
    #[error("a context formula must not have free team variables: {0}")]
    OpenContext(String),
    #[error("{rule} expects {want} premise(s), got {got}")]
    PremiseCount {
        rule: &'static str,
        want: usize,
        got: usize,
    },
    #[error("{0} premises must agree on the team definition")]
    GammaMismatch(&'static str),
    #[error("case-split premises must agree on the conclusion")]
    PhiMismatch,
    #[error("parameter '{0}' occurs free in the team definition")]
    ParamFreeInGamma(String),
    #[error("{0} is an axiom; build it with its dedicated constructor")]
    AxiomTag(&'static str),
    #[error("theta sentence index {0} is out of range")]
    ThetaIndex(usize),
    #[error("theta elimination failed: {0}")]
    ThetaMismatch(String),
    #[error("the formula lies outside the first order fragment")]
    IndepAtom,
    #[error("renaming failed: {0}")]
    Rename(#[from] RenameError),
}

// ---------------------------------------------------------------------------
// Sequents

/// `Γ | γ ⊢ φ`: context sentences, a team definition, and a conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    context: BTreeSet<FoFormula>,
    gamma: FoFormula,
    phi: IlFormula,
}

impl Sequent {
    /// Context formulas may keep parameter variables free but no team
    /// variables; the conclusion must be parameter-free.
    pub fn new(
        context: BTreeSet<FoFormula>,
        gamma: FoFormula,
        phi: IlFormula,
    ) -> Result<Sequent, ProofError> {
        for f in &context {
            if !f.free_team_vars().is_empty() {
                return Err(ProofError::OpenContext(f.to_string()));
            }
        }
        if let Some(p) = phi.free_param_vars().into_iter().next() {
            return Err(ProofError::ParamVar(p));
        }
        Ok(Sequent {
            context,
            gamma,
            phi,
        })
    }

    pub fn context(&self) -> &BTreeSet<FoFormula> {
        &self.context
    }

    pub fn gamma(&self) -> &FoFormula {
        &self.gamma
    }

    pub fn phi(&self) -> &IlFormula {
        &self.phi
    }

    /// Parameter variables free anywhere in the context or the definition.
    pub fn free_params(&self) -> BTreeSet<String> {
        let mut out = self.gamma.free_param_vars();
        for f in &self.context {
            out.extend(f.free_param_vars());
        }
        out
    }

    /// Combined signature of the context, the definition, and the
    /// conclusion.
    pub fn signature(&self) -> Signature {
        let mut sig = self.gamma.used_signature();
        for f in &self.context {
            crate::prover::merge_signature(&mut sig, &f.used_signature());
        }
        crate::prover::merge_signature(&mut sig, &self.phi.used_signature());
        sig
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.context.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}} | {} |- {}", self.gamma, self.phi)
    }
}

/// `⋀Γ` in set order; the empty conjunction is `true`.
fn conj_context(context: &BTreeSet<FoFormula>) -> FoFormula {
    FoFormula::conj(context.iter().cloned())
}

/// Sorted `Free_T(γ) ∪ Free_T(φ)` style prefixes.
fn prefix_vars(sets: &[BTreeSet<String>]) -> Vec<String> {
    let mut all = BTreeSet::new();
    for s in sets {
        all.extend(s.iter().cloned());
    }
    all.into_iter().collect()
}

/// Every team variable occurring in `f`, bound ones included.
fn all_team_vars_fo(f: &FoFormula) -> BTreeSet<String> {
    fn term(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::TeamVar(v) => {
                out.insert(v.clone());
            }
            Term::ParamVar(_) | Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| term(a, out)),
        }
    }
    fn walk(f: &FoFormula, out: &mut BTreeSet<String>) {
        match f {
            FoFormula::True | FoFormula::False => {}
            FoFormula::Rel(_, args) => args.iter().for_each(|a| term(a, out)),
            FoFormula::Equal(a, b) => {
                term(a, out);
                term(b, out);
            }
            FoFormula::Not(g) => walk(g, out),
            FoFormula::And(a, b)
            | FoFormula::Or(a, b)
            | FoFormula::Implies(a, b)
            | FoFormula::Iff(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            FoFormula::Exists(x, g) | FoFormula::Forall(x, g) => {
                out.insert(x.clone());
                walk(g, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Axioms

/// Literal introduction: `∀⃗v(γ → lit) | γ ⊢ lit` with
/// `⃗v = Free_T(γ) ∪ Free_T(lit)`.
pub fn axiom_lit(gamma: &FoFormula, lit: &IlFormula) -> Result<Sequent, ProofError> {
    let IlFormula::Literal(..) = lit else {
        return Err(ProofError::NotLiteral(lit.to_string()));
    };
    if let Some(p) = lit.free_param_vars().into_iter().next() {
        return Err(ProofError::ParamVar(p));
    }
    let lit_fo = fo_of_il(lit).expect("literals have a first order reading");
    let vars = prefix_vars(&[gamma.free_team_vars(), lit.free_team_vars()]);
    let guard = FoFormula::forall_many(&vars, FoFormula::implies(gamma.clone(), lit_fo));
    Sequent::new(BTreeSet::from([guard]), gamma.clone(), lit.clone())
}

/// Fresh tuples for the independence axiom: one name per variable of the
/// base tuple, tagged by position, with the underscore widened until no
/// name occurs in the base formula or terms.
fn ind_fresh_tuples(taken: &BTreeSet<String>, base: &[String]) -> [Vec<String>; 3] {
    let mut sep = "_".to_string();
    loop {
        let tuple = |j: usize, sep: &str| -> Vec<String> {
            base.iter().map(|w| format!("v{j}{sep}{w}")).collect()
        };
        let candidates = [tuple(1, &sep), tuple(2, &sep), tuple(3, &sep)];
        if candidates.iter().flatten().all(|v| !taken.contains(v)) {
            return candidates;
        }
        sep.push('_');
    }
}

/// Pointwise equality of two renamed copies of a term tuple.
fn tuple_equalities(
    terms: &[Term],
    left: &std::collections::BTreeMap<String, String>,
    right: &std::collections::BTreeMap<String, String>,
) -> Result<Vec<FoFormula>, ProofError> {
    let ls = rename_terms(terms, left)?;
    let rs = rename_terms(terms, right)?;
    Ok(ls
        .into_iter()
        .zip(rs)
        .map(|(a, b)| FoFormula::Equal(a, b))
        .collect())
}

/// Independence introduction. The context is the pair-interpolation
/// sentence: any two `γ`-rows agreeing on `⃗t1` admit a third `γ`-row
/// taking its `⃗t1⃗t2` values from the first and its `⃗t1⃗t3` values from
/// the second.
pub fn axiom_ind(
    gamma: &FoFormula,
    t1: &[Term],
    t2: &[Term],
    t3: &[Term],
) -> Result<Sequent, ProofError> {
    let all_terms: Vec<Term> = t1.iter().chain(t2).chain(t3).cloned().collect();
    if let Some(p) = terms_param_vars(&all_terms).into_iter().next() {
        return Err(ProofError::ParamVar(p));
    }
    let base = prefix_vars(&[
        gamma.free_team_vars(),
        all_terms.iter().flat_map(|t| t.team_vars()).collect(),
    ]);
    let mut taken = all_team_vars_fo(gamma);
    all_terms.iter().for_each(|t| taken.extend(t.team_vars()));
    let [v1, v2, v3] = ind_fresh_tuples(&taken, &base);
    let to_map = |vs: &[String]| -> std::collections::BTreeMap<String, String> {
        base.iter().cloned().zip(vs.iter().cloned()).collect()
    };
    let (m1, m2, m3) = (to_map(&v1), to_map(&v2), to_map(&v3));

    let t12: Vec<Term> = t1.iter().chain(t2).cloned().collect();
    let t13: Vec<Term> = t1.iter().chain(t3).cloned().collect();

    let mut antecedent = vec![rename_fo(gamma, &m1)?, rename_fo(gamma, &m2)?];
    antecedent.extend(tuple_equalities(t1, &m1, &m2)?);

    let mut witness = vec![rename_fo(gamma, &m3)?];
    witness.extend(tuple_equalities(&t12, &m3, &m1)?);
    witness.extend(tuple_equalities(&t13, &m3, &m2)?);

    let body = FoFormula::implies(
        FoFormula::conj(antecedent),
        FoFormula::exists_many(&v3, FoFormula::conj(witness)),
    );
    let prefix: Vec<String> = v1.iter().chain(&v2).cloned().collect();
    let guard = FoFormula::forall_many(&prefix, body);
    Sequent::new(
        BTreeSet::from([guard]),
        gamma.clone(),
        IlFormula::Indep(t1.to_vec(), t2.to_vec(), t3.to_vec()),
    )
}

// ---------------------------------------------------------------------------
// Rules

/// Rule tag plus the parameters that are not recoverable from the stated
/// conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Lit,
    Ind,
    Or,
    And,
    Exists { var: String },
    Forall { var: String },
    Ent,
    Depar { param: String },
    Split,
    Theta { sentence: usize, symbols: Vec<String> },
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::Lit => "PS-lit",
            Rule::Ind => "PS-ind",
            Rule::Or => "PS-or",
            Rule::And => "PS-and",
            Rule::Exists { .. } => "PS-exists",
            Rule::Forall { .. } => "PS-forall",
            Rule::Ent => "PS-ent",
            Rule::Depar { .. } => "PS-depar",
            Rule::Split => "PS-split",
            Rule::Theta { .. } => "PS-theta",
        }
    }

    fn premise_count(&self) -> usize {
        match self {
            Rule::Lit | Rule::Ind => 0,
            Rule::Or | Rule::And | Rule::Split => 2,
            _ => 1,
        }
    }
}

fn expect_premises<'a>(
    rule: &Rule,
    premises: &[&'a Sequent],
) -> Result<Vec<&'a Sequent>, ProofError> {
    if premises.len() != rule.premise_count() {
        return Err(ProofError::PremiseCount {
            rule: rule.tag(),
            want: rule.premise_count(),
            got: premises.len(),
        });
    }
    Ok(premises.to_vec())
}

/// Replace free occurrences of the parameter `$p` by the team variable `v`.
fn param_to_var(f: &FoFormula, p: &str, v: &str) -> FoFormula {
    fn term(t: &Term, p: &str, v: &str) -> Term {
        match t {
            Term::ParamVar(q) if q == p => Term::TeamVar(v.to_string()),
            Term::App(g, args) => {
                Term::App(g.clone(), args.iter().map(|a| term(a, p, v)).collect())
            }
            other => other.clone(),
        }
    }
    match f {
        FoFormula::True => FoFormula::True,
        FoFormula::False => FoFormula::False,
        FoFormula::Rel(r, args) => {
            FoFormula::Rel(r.clone(), args.iter().map(|a| term(a, p, v)).collect())
        }
        FoFormula::Equal(a, b) => FoFormula::Equal(term(a, p, v), term(b, p, v)),
        FoFormula::Not(g) => FoFormula::not(param_to_var(g, p, v)),
        FoFormula::And(a, b) => FoFormula::and(param_to_var(a, p, v), param_to_var(b, p, v)),
        FoFormula::Or(a, b) => FoFormula::or(param_to_var(a, p, v), param_to_var(b, p, v)),
        FoFormula::Implies(a, b) => {
            FoFormula::implies(param_to_var(a, p, v), param_to_var(b, p, v))
        }
        FoFormula::Iff(a, b) => FoFormula::iff(param_to_var(a, p, v), param_to_var(b, p, v)),
        FoFormula::Exists(x, g) => FoFormula::exists(x, param_to_var(g, p, v)),
        FoFormula::Forall(x, g) => FoFormula::forall(x, param_to_var(g, p, v)),
    }
}

/// Rename relation symbols according to `map`.
fn rename_rels(f: &FoFormula, map: &std::collections::BTreeMap<String, String>) -> FoFormula {
    match f {
        FoFormula::Rel(r, args) => {
            let name = map.get(r).cloned().unwrap_or_else(|| r.clone());
            FoFormula::Rel(name, args.clone())
        }
        FoFormula::True | FoFormula::False | FoFormula::Equal(..) => f.clone(),
        FoFormula::Not(g) => FoFormula::not(rename_rels(g, map)),
        FoFormula::And(a, b) => FoFormula::and(rename_rels(a, map), rename_rels(b, map)),
        FoFormula::Or(a, b) => FoFormula::or(rename_rels(a, map), rename_rels(b, map)),
        FoFormula::Implies(a, b) => {
            FoFormula::implies(rename_rels(a, map), rename_rels(b, map))
        }
        FoFormula::Iff(a, b) => FoFormula::iff(rename_rels(a, map), rename_rels(b, map)),
        FoFormula::Exists(x, g) => FoFormula::exists(x, rename_rels(g, map)),
        FoFormula::Forall(x, g) => FoFormula::forall(x, rename_rels(g, map)),
    }
}

/// Top-level conjuncts of a formula, as a set.
fn conjuncts(f: &FoFormula) -> BTreeSet<FoFormula> {
    match f {
        FoFormula::And(a, b) => {
            let mut out = conjuncts(a);
            out.extend(conjuncts(b));
            out
        }
        other => BTreeSet::from([other.clone()]),
    }
}

/// Lexicographically ordered permutations of `items`.
fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest: Vec<T> = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// Build the conclusion a rule application dictates.
///
/// `stated_gamma` supplies the target team definition for the rules that
/// leave it free (split disjunction and the two quantifier rules), and
/// `stated_context` supplies the strengthened context for entailment
/// steps; both are ignored by every other rule. The entailment obligation
/// of an entailment step is attached by the proof checker, never decided
/// here.
pub fn apply_rule(
    rule: &Rule,
    premises: &[&Sequent],
    stated_gamma: &FoFormula,
    stated_context: &BTreeSet<FoFormula>,
    theta: &Theta,
) -> Result<Sequent, ProofError> {
    let ps = expect_premises(rule, premises)?;
    match rule {
        Rule::Lit | Rule::Ind => Err(ProofError::AxiomTag(rule.tag())),
        Rule::Or => {
            let (p1, p2) = (ps[0], ps[1]);
            let vars = prefix_vars(&[
                stated_gamma.free_team_vars(),
                p1.gamma.free_team_vars(),
                p2.gamma.free_team_vars(),
            ]);
            let bicond = FoFormula::forall_many(
                &vars,
                FoFormula::iff(
                    stated_gamma.clone(),
                    FoFormula::or(p1.gamma.clone(), p2.gamma.clone()),
                ),
            );
            let mut context: BTreeSet<FoFormula> =
                p1.context.union(&p2.context).cloned().collect();
            context.insert(bicond);
            Sequent::new(
                context,
                stated_gamma.clone(),
                IlFormula::tensor_or(p1.phi.clone(), p2.phi.clone()),
            )
        }
        Rule::And => {
            let (p1, p2) = (ps[0], ps[1]);
            if p1.gamma != p2.gamma {
                return Err(ProofError::GammaMismatch("conjunction"));
            }
            let context = p1.context.union(&p2.context).cloned().collect();
            Sequent::new(
                context,
                p1.gamma.clone(),
                IlFormula::and(p1.phi.clone(), p2.phi.clone()),
            )
        }
        Rule::Exists { var } => {
            let p = ps[0];
            let vars = prefix_vars(&[
                stated_gamma.free_team_vars(),
                p.gamma.free_team_vars(),
            ]);
            let bicond = FoFormula::forall_many(
                &vars,
                FoFormula::iff(
                    FoFormula::exists(var, p.gamma.clone()),
                    FoFormula::exists(var, stated_gamma.clone()),
                ),
            );
            let mut context = p.context.clone();
            context.insert(bicond);
            Sequent::new(
                context,
                stated_gamma.clone(),
                IlFormula::exists(var, p.phi.clone()),
            )
        }
        Rule::Forall { var } => {
            let p = ps[0];
            let vars = prefix_vars(&[
                stated_gamma.free_team_vars(),
                p.gamma.free_team_vars(),
            ]);
            let bicond = FoFormula::forall_many(
                &vars,
                FoFormula::iff(
                    p.gamma.clone(),
                    FoFormula::exists(var, stated_gamma.clone()),
                ),
            );
            let mut context = p.context.clone();
            context.insert(bicond);
            Sequent::new(
                context,
                stated_gamma.clone(),
                IlFormula::forall(var, p.phi.clone()),
            )
        }
        Rule::Ent => {
            let p = ps[0];
            Sequent::new(stated_context.clone(), p.gamma.clone(), p.phi.clone())
        }
        Rule::Depar { param } => {
            let p = ps[0];
            if p.gamma.free_param_vars().contains(param) {
                return Err(ProofError::ParamFreeInGamma(param.clone()));
            }
            let whole = conj_context(&p.context);
            let taken = all_team_vars_fo(&whole);
            let mut var = param.clone();
            while taken.contains(&var) {
                var.push('\'');
            }
            let bound = FoFormula::exists(&var, param_to_var(&whole, param, &var));
            Sequent::new(BTreeSet::from([bound]), p.gamma.clone(), p.phi.clone())
        }
        Rule::Split => {
            let (p1, p2) = (ps[0], ps[1]);
            if p1.gamma != p2.gamma {
                return Err(ProofError::GammaMismatch("case-split"));
            }
            if p1.phi != p2.phi {
                return Err(ProofError::PhiMismatch);
            }
            let split = FoFormula::or(conj_context(&p1.context), conj_context(&p2.context));
            Sequent::new(BTreeSet::from([split]), p1.gamma.clone(), p1.phi.clone())
        }
        Rule::Theta { sentence, symbols } => {
            let p = ps[0];
            let decl = theta
                .sentences()
                .get(*sentence)
                .ok_or(ProofError::ThetaIndex(*sentence))?;
            if symbols.len() != decl.rel_vars.len() {
                return Err(ProofError::ThetaMismatch(format!(
                    "sentence {} binds {} relation variables, {} symbols given",
                    sentence,
                    decl.rel_vars.len(),
                    symbols.len()
                )));
            }
            if symbols.iter().collect::<BTreeSet<_>>().len() != symbols.len() {
                return Err(ProofError::ThetaMismatch(
                    "eliminated symbols must be distinct".to_string(),
                ));
            }
            let body_rels = decl.body.relation_symbols();
            let bound: BTreeSet<&str> =
                decl.rel_vars.iter().map(|(n, _)| n.as_str()).collect();
            let mut last_failure = "the theta sentence does not match".to_string();
            for perm in permutations(symbols) {
                // A symbol that also names a fixed relation of the body
                // would be conflated by the renaming.
                if perm
                    .iter()
                    .any(|s| body_rels.contains(s.as_str()) && !bound.contains(s.as_str()))
                {
                    last_failure =
                        "an eliminated symbol already occurs in the theta sentence".to_string();
                    continue;
                }
                let map: std::collections::BTreeMap<String, String> = decl
                    .rel_vars
                    .iter()
                    .map(|(n, _)| n.clone())
                    .zip(perm.iter().cloned())
                    .collect();
                let eliminated = conjuncts(&rename_rels(&decl.body, &map));
                if !eliminated.is_subset(&p.context) {
                    last_failure = format!(
                        "the premise context does not contain the instantiated sentence \
                         {{{}}}",
                        eliminated
                            .iter()
                            .map(|f| f.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                    continue;
                }
                let context: BTreeSet<FoFormula> =
                    p.context.difference(&eliminated).cloned().collect();
                let leak = perm.iter().find(|s| {
                    context
                        .iter()
                        .any(|f| f.relation_symbols().contains(s.as_str()))
                        || p.gamma.relation_symbols().contains(s.as_str())
                        || p.phi.relation_symbols().contains(s.as_str())
                });
                if let Some(s) = leak {
                    last_failure = format!(
                        "symbol '{s}' still occurs outside the eliminated context"
                    );
                    continue;
                }
                return Sequent::new(context, p.gamma.clone(), p.phi.clone());
            }
            Err(ProofError::ThetaMismatch(last_failure))
        }
    }
}

// ---------------------------------------------------------------------------
// Proofs and checking

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub sequent: Sequent,
    pub rule: Rule,
    /// Indices of earlier steps, zero-based.
    pub premises: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub name: String,
    pub steps: Vec<ProofStep>,
}

impl Proof {
    /// Step count minus one.
    pub fn length(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn conclusion(&self) -> Option<&Sequent> {
        self.steps.last().map(|s| &s.sequent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepStatus {
    Ok,
    Failed(String),
    Conditional(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overall {
    Verified,
    ConditionallyVerified,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub steps: Vec<StepStatus>,
    pub overall: Overall,
}

/// Re-derive every step and compare it to what the proof states.
///
/// Entailment obligations go to the bounded prover: a refuted obligation
/// fails its step, an undecided one leaves the step (and the proof)
/// conditional. An empty proof is rejected outright.
pub fn check_proof(proof: &Proof, theta: &Theta, budget: &ProverBudget) -> CheckReport {
    let mut statuses = Vec::with_capacity(proof.steps.len());
    for (i, step) in proof.steps.iter().enumerate() {
        statuses.push(check_step(proof, i, step, theta, budget));
    }
    let overall = if proof.steps.is_empty()
        || statuses
            .iter()
            .any(|s| matches!(s, StepStatus::Failed(_)))
    {
        Overall::Rejected
    } else if statuses
        .iter()
        .any(|s| matches!(s, StepStatus::Conditional(_)))
    {
        Overall::ConditionallyVerified
    } else {
        Overall::Verified
    };
    CheckReport {
        steps: statuses,
        overall,
    }
}

fn check_step(
    proof: &Proof,
    index: usize,
    step: &ProofStep,
    theta: &Theta,
    budget: &ProverBudget,
) -> StepStatus {
    if let Some(&bad) = step.premises.iter().find(|&&p| p >= index) {
        return StepStatus::Failed(format!(
            "premise {} does not precede the step",
            bad + 1
        ));
    }
    let premise_seqs: Vec<&Sequent> = step
        .premises
        .iter()
        .map(|&p| &proof.steps[p].sequent)
        .collect();

    let expected = match &step.rule {
        Rule::Lit => {
            if !step.premises.is_empty() {
                return StepStatus::Failed("axioms take no premises".to_string());
            }
            axiom_lit(&step.sequent.gamma, &step.sequent.phi)
        }
        Rule::Ind => {
            if !step.premises.is_empty() {
                return StepStatus::Failed("axioms take no premises".to_string());
            }
            let IlFormula::Indep(t1, t2, t3) = &step.sequent.phi else {
                return StepStatus::Failed(format!(
                    "the independence axiom concludes an independence atom, got: {}",
                    step.sequent.phi
                ));
            };
            axiom_ind(&step.sequent.gamma, t1, t2, t3)
        }
        rule => apply_rule(
            rule,
            &premise_seqs,
            &step.sequent.gamma,
            &step.sequent.context,
            theta,
        ),
    };

    let expected = match expected {
        Ok(s) => s,
        Err(e) => return StepStatus::Failed(e.to_string()),
    };
    if expected != step.sequent {
        return StepStatus::Failed(format!(
            "the stated sequent differs from the rule's conclusion {expected}"
        ));
    }

    if matches!(step.rule, Rule::Ent) {
        let obligation_goal = &premise_seqs[0].context;
        match prove_entailment(&step.sequent.context, obligation_goal, budget) {
            ProverVerdict::Proved { .. } => StepStatus::Ok,
            ProverVerdict::Refuted { .. } => StepStatus::Failed(
                "the stated context does not entail the premise context".to_string(),
            ),
            ProverVerdict::Unknown { reason } => StepStatus::Conditional(reason),
        }
    } else {
        StepStatus::Ok
    }
}

// ---------------------------------------------------------------------------
// Derived-rule generators

/// Push one step and return its index.
fn push_step(steps: &mut Vec<ProofStep>, sequent: Sequent, rule: Rule, premises: Vec<usize>) -> usize {
    steps.push(ProofStep {
        sequent,
        rule,
        premises,
    });
    steps.len() - 1
}

/// A proof of `∀⃗v(γ → φ) | γ ⊢ φ` for first order `φ`, by structural
/// recursion: literals are axioms; splits take the six-line derivation
/// through both `γ ∧ ψi` refinements; conjunctions combine and re-weaken;
/// the quantifier cases route through `(∃x γ) ∧ ψ` and `∃x γ`.
pub fn derive_fo(gamma: &FoFormula, phi: &IlFormula) -> Result<Proof, ProofError> {
    let mut steps = Vec::new();
    derive_fo_into(gamma, phi, &mut steps)?;
    Ok(Proof {
        name: "fo_introduction".to_string(),
        steps,
    })
}

/// The top-level context `{∀⃗v(γ → φ)}` of the derived sequent.
fn fo_guard(gamma: &FoFormula, phi: &IlFormula) -> BTreeSet<FoFormula> {
    let phi_fo = fo_of_il(phi).expect("checked first order fragment");
    let vars = prefix_vars(&[gamma.free_team_vars(), phi.free_team_vars()]);
    BTreeSet::from([FoFormula::forall_many(
        &vars,
        FoFormula::implies(gamma.clone(), phi_fo),
    )])
}

fn ent_step(
    steps: &mut Vec<ProofStep>,
    from: usize,
    context: BTreeSet<FoFormula>,
) -> Result<usize, ProofError> {
    let s = &steps[from].sequent;
    let sequent = Sequent::new(context, s.gamma.clone(), s.phi.clone())?;
    Ok(push_step(steps, sequent, Rule::Ent, vec![from]))
}

fn derive_fo_into(
    gamma: &FoFormula,
    phi: &IlFormula,
    steps: &mut Vec<ProofStep>,
) -> Result<usize, ProofError> {
    match phi {
        IlFormula::Literal(..) => {
            let seq = axiom_lit(gamma, phi)?;
            Ok(push_step(steps, seq, Rule::Lit, vec![]))
        }
        IlFormula::Indep(..) | IlFormula::Dep(..) => Err(ProofError::IndepAtom),
        IlFormula::TensorOr(psi1, psi2) => {
            let fo1 = fo_of_il(psi1).ok_or(ProofError::IndepAtom)?;
            let fo2 = fo_of_il(psi2).ok_or(ProofError::IndepAtom)?;
            let gamma1 = FoFormula::and(gamma.clone(), fo1.clone());
            let gamma2 = FoFormula::and(gamma.clone(), fo2.clone());
            let a = derive_fo_into(&gamma1, psi1, steps)?;
            let b = derive_fo_into(&gamma2, psi2, steps)?;
            let c = ent_step(steps, a, BTreeSet::new())?;
            let d = ent_step(steps, b, BTreeSet::new())?;
            let or_seq = apply_rule(
                &Rule::Or,
                &[&steps[c].sequent, &steps[d].sequent],
                gamma,
                &BTreeSet::new(),
                &Theta::default(),
            )?;
            let e = push_step(steps, or_seq, Rule::Or, vec![c, d]);
            ent_step(steps, e, fo_guard(gamma, phi))
        }
        IlFormula::And(psi1, psi2) => {
            let a = derive_fo_into(gamma, psi1, steps)?;
            let b = derive_fo_into(gamma, psi2, steps)?;
            let and_seq = apply_rule(
                &Rule::And,
                &[&steps[a].sequent, &steps[b].sequent],
                gamma,
                &BTreeSet::new(),
                &Theta::default(),
            )?;
            let c = push_step(steps, and_seq, Rule::And, vec![a, b]);
            ent_step(steps, c, fo_guard(gamma, phi))
        }
        IlFormula::Exists(x, psi) => {
            let fo_psi = fo_of_il(psi).ok_or(ProofError::IndepAtom)?;
            let refined = FoFormula::and(FoFormula::exists(x, gamma.clone()), fo_psi.clone());
            let a = derive_fo_into(&refined, psi, steps)?;
            let b = ent_step(steps, a, BTreeSet::new())?;
            let ex_seq = apply_rule(
                &Rule::Exists { var: x.clone() },
                &[&steps[b].sequent],
                gamma,
                &BTreeSet::new(),
                &Theta::default(),
            )?;
            let c = push_step(steps, ex_seq, Rule::Exists { var: x.clone() }, vec![b]);
            let vars = prefix_vars(&[gamma.free_team_vars(), refined.free_team_vars()]);
            let merged = FoFormula::forall_many(
                &vars,
                FoFormula::iff(
                    FoFormula::and(
                        FoFormula::exists(x, gamma.clone()),
                        FoFormula::exists(x, fo_psi),
                    ),
                    FoFormula::exists(x, gamma.clone()),
                ),
            );
            let d = ent_step(steps, c, BTreeSet::from([merged]))?;
            ent_step(steps, d, fo_guard(gamma, phi))
        }
        IlFormula::Forall(x, psi) => {
            let refined = FoFormula::exists(x, gamma.clone());
            let a = derive_fo_into(&refined, psi, steps)?;
            let fa_seq = apply_rule(
                &Rule::Forall { var: x.clone() },
                &[&steps[a].sequent],
                gamma,
                &BTreeSet::new(),
                &Theta::default(),
            )?;
            let b = push_step(steps, fa_seq, Rule::Forall { var: x.clone() }, vec![a]);
            let kept = steps[a].sequent.context.clone();
            let c = ent_step(steps, b, kept)?;
            ent_step(steps, c, fo_guard(gamma, phi))
        }
    }
}

/// A two-step proof of the functional-dependence sequent: the
/// independence axiom for `indep(⃗t; t′; t′)` followed by an entailment
/// step to the determination context
/// `∀⃗v1⃗v2((γ(⃗v1) ∧ γ(⃗v2) ∧ ⃗t(⃗v1) = ⃗t(⃗v2)) → t′(⃗v1) = t′(⃗v2))`.
pub fn derive_dep(gamma: &FoFormula, ts: &[Term], t_prime: &Term) -> Result<Proof, ProofError> {
    let tp = std::slice::from_ref(t_prime);
    let mut steps = Vec::new();
    let axiom = axiom_ind(gamma, ts, tp, tp)?;
    let a = push_step(&mut steps, axiom, Rule::Ind, vec![]);

    let all_terms: Vec<Term> = ts.iter().chain(tp).cloned().collect();
    let base = prefix_vars(&[
        gamma.free_team_vars(),
        all_terms.iter().flat_map(|t| t.team_vars()).collect(),
    ]);
    let mut taken = all_team_vars_fo(gamma);
    all_terms.iter().for_each(|t| taken.extend(t.team_vars()));
    let [v1, v2, _] = ind_fresh_tuples(&taken, &base);
    let to_map = |vs: &[String]| -> std::collections::BTreeMap<String, String> {
        base.iter().cloned().zip(vs.iter().cloned()).collect()
    };
    let (m1, m2) = (to_map(&v1), to_map(&v2));

    let mut antecedent = vec![rename_fo(gamma, &m1)?, rename_fo(gamma, &m2)?];
    antecedent.extend(tuple_equalities(ts, &m1, &m2)?);
    let consequent = tuple_equalities(tp, &m1, &m2)?
        .pop()
        .expect("one primed term");
    let prefix: Vec<String> = v1.iter().chain(&v2).cloned().collect();
    let guard = FoFormula::forall_many(
        &prefix,
        FoFormula::implies(FoFormula::conj(antecedent), consequent),
    );

    ent_step(&mut steps, a, BTreeSet::from([guard]))?;
    Ok(Proof {
        name: "dep_introduction".to_string(),
        steps,
    })
}

// ---------------------------------------------------------------------------
// Theta translation and sequent validation

/// First order image of a team-existence theory: each sentence's bound
/// relation variables are replaced by globally fresh symbols `S1, S2, …`
/// (skipping names any sentence body already uses), and the returned
/// signature interprets exactly the rewritten sentences.
pub fn theta_fo(theta: &Theta) -> (BTreeSet<FoFormula>, Signature) {
    let mut used: BTreeSet<String> = BTreeSet::new();
    for s in theta.sentences() {
        let bound: BTreeSet<&str> = s.rel_vars.iter().map(|(n, _)| n.as_str()).collect();
        for r in s.body.relation_symbols() {
            if !bound.contains(r.as_str()) {
                used.insert(r);
            }
        }
    }

    let mut out = BTreeSet::new();
    let mut sig = Signature::new();
    let mut next = 1usize;
    for s in theta.sentences() {
        let mut map = std::collections::BTreeMap::new();
        for (name, arity) in &s.rel_vars {
            let fresh = loop {
                let candidate = format!("S{next}");
                next += 1;
                if !used.contains(&candidate) {
                    break candidate;
                }
            };
            sig.declare_relation(&fresh, *arity);
            map.insert(name.clone(), fresh);
        }
        let rewritten = rename_rels(&s.body, &map);
        crate::prover::merge_signature(&mut sig, &rewritten.used_signature());
        out.insert(rewritten);
    }
    (out, sig)
}

#[derive(Debug, Clone)]
pub enum SequentVerdict {
    /// No counterexample among structures of size up to the bound.
    ValidUpTo(usize),
    /// A structure and parameter assignment satisfying the context whose
    /// defined team fails the conclusion.
    CounterExample(Structure, ParamAssignment),
}

/// Exhaustive empirical validity check: enumerate structures over the
/// sequent's signature and parameter assignments over its free
/// parameters; wherever the context holds, the team defined by `γ` must
/// satisfy `φ`.
pub fn validate_sequent(
    sequent: &Sequent,
    max_model_size: usize,
) -> Result<SequentVerdict, ModelError> {
    let sig = sequent.signature();
    let params = sequent.free_params();
    let empty = Assignment::new();
    for size in 1..=max_model_size {
        for m in structures_over(&sig, size) {
            for h in param_choices(&params, size) {
                let mut holds = true;
                for f in &sequent.context {
                    if !eval_fo(&m, &h, &empty, f)? {
                        holds = false;
                        break;
                    }
                }
                if !holds {
                    continue;
                }
                if !crate::entailment::eval_entailment(&m, &sequent.gamma, &h, &sequent.phi)? {
                    return Ok(SequentVerdict::CounterExample(m, h));
                }
            }
        }
    }
    Ok(SequentVerdict::ValidUpTo(max_model_size))
}
