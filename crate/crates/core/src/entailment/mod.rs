//! Entailment semantics: satisfaction judged against the team a
//! first-order formula defines under a parameter assignment.
//!
//! The fast verdict goes through the defined team directly. The witnessed
//! evaluator additionally returns a tree of defining formulas for every
//! split, existential, and universal step, and [`check_witness`] replays
//! the clauses literally: each internal node must pass its first-order
//! biconditional under the extended parameter assignment before recursion.
//! Generated witnesses are canonical team diagrams over fresh `$w1, $w2,
//! ...` parameters; the checker accepts any formulas.

use std::collections::BTreeSet;
use std::fmt;

use crate::model::{
    canonical_team_definition_named, enumerate_x_variations, eval_fo, team_of_definition,
    ModelError, ParamAssignment, Structure, Team,
};
use crate::semantics::{covers, eval_full, sat_independence_atom};
use crate::syntax::{desugar_dep, fo_of_il, FoFormula, IlFormula};

/// Witness for the existential clauses, mirroring the formula's shape
/// after dependence-atom desugaring. Atoms need no witness; each split,
/// existential, and universal node records its parameter extension and
/// defining formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessTree {
    Atom,
    Or {
        ext: ParamAssignment,
        gamma1: FoFormula,
        gamma2: FoFormula,
        left: Box<WitnessTree>,
        right: Box<WitnessTree>,
    },
    And {
        left: Box<WitnessTree>,
        right: Box<WitnessTree>,
    },
    Exists {
        ext: ParamAssignment,
        gamma: FoFormula,
        body: Box<WitnessTree>,
    },
    Forall {
        ext: ParamAssignment,
        gamma: FoFormula,
        body: Box<WitnessTree>,
    },
}

/// The team variables the evaluation is carried out over: free variables
/// of the defining formula and of the evaluated formula together.
fn joint_domain(gamma: &FoFormula, phi: &IlFormula) -> Vec<String> {
    let mut vars: BTreeSet<String> = gamma.free_team_vars();
    vars.extend(phi.free_team_vars());
    vars.into_iter().collect()
}

/// Satisfaction of `phi` on the team `gamma` defines under `h`, over the
/// joint free-variable domain. Dependence atoms are desugared first.
pub fn eval_entailment(
    m: &Structure,
    gamma: &FoFormula,
    h: &ParamAssignment,
    phi: &IlFormula,
) -> Result<bool, ModelError> {
    let phi = desugar_dep(phi).map_err(|_| ModelError::Sugared)?;
    eval_entailment_over(m, gamma, h, &phi, &joint_domain(gamma, &phi))
}

/// As [`eval_entailment`], over an explicitly chosen variable domain,
/// which must cover the free variables of both formulas. Verdicts do not
/// depend on the choice.
pub fn eval_entailment_over<S: AsRef<str>>(
    m: &Structure,
    gamma: &FoFormula,
    h: &ParamAssignment,
    phi: &IlFormula,
    var_domain: &[S],
) -> Result<bool, ModelError> {
    let phi = desugar_dep(phi).map_err(|_| ModelError::Sugared)?;
    let x = team_of_definition(m, gamma, h, var_domain)?;
    eval_full(m, &x, &phi)
}

/// Witnessed satisfaction: a tree of diagram formulas when `phi` holds on
/// the defined team, nothing otherwise.
pub fn eval_entailment_witnessed(
    m: &Structure,
    gamma: &FoFormula,
    h: &ParamAssignment,
    phi: &IlFormula,
) -> Result<Option<WitnessTree>, ModelError> {
    let phi = desugar_dep(phi).map_err(|_| ModelError::Sugared)?;
    let x = team_of_definition(m, gamma, h, &joint_domain(gamma, &phi))?;
    if !eval_full(m, &x, &phi)? {
        return Ok(None);
    }
    let mut fresh = 1;
    Ok(Some(build(m, &x, &phi, &mut fresh)?))
}

/// Witness for a formula known to hold on `x`, following the first
/// satisfying choice of the team-semantics search in its enumeration
/// order. Diagram parameters continue the `fresh` counter.
fn build(
    m: &Structure,
    x: &Team,
    phi: &IlFormula,
    fresh: &mut usize,
) -> Result<WitnessTree, ModelError> {
    match phi {
        IlFormula::Literal(..) | IlFormula::Indep(..) => Ok(WitnessTree::Atom),
        IlFormula::Dep(_) => Err(ModelError::Sugared),
        IlFormula::And(a, b) => Ok(WitnessTree::And {
            left: Box::new(build(m, x, a, fresh)?),
            right: Box::new(build(m, x, b, fresh)?),
        }),
        IlFormula::TensorOr(a, b) => {
            for (y, z) in covers(x) {
                if eval_full(m, &y, a)? && eval_full(m, &z, b)? {
                    let (gamma1, ext1, next) = canonical_team_definition_named(&y, "w", *fresh);
                    let (gamma2, ext2, next) = canonical_team_definition_named(&z, "w", next);
                    *fresh = next;
                    let mut ext = ext1;
                    ext.extend(ext2);
                    return Ok(WitnessTree::Or {
                        ext,
                        gamma1,
                        gamma2,
                        left: Box::new(build(m, &y, a, fresh)?),
                        right: Box::new(build(m, &z, b, fresh)?),
                    });
                }
            }
            unreachable!("a satisfied split has a satisfying cover")
        }
        IlFormula::Exists(v, body) => {
            for y in enumerate_x_variations(m, x, v) {
                if eval_full(m, &y, body)? {
                    let (gamma, ext, next) = canonical_team_definition_named(&y, "w", *fresh);
                    *fresh = next;
                    return Ok(WitnessTree::Exists {
                        ext,
                        gamma,
                        body: Box::new(build(m, &y, body, fresh)?),
                    });
                }
            }
            unreachable!("a satisfied existential has a satisfying variation")
        }
        IlFormula::Forall(v, body) => {
            let y = x.extend_universal(m, v);
            let (gamma, ext, next) = canonical_team_definition_named(&y, "w", *fresh);
            *fresh = next;
            Ok(WitnessTree::Forall {
                ext,
                gamma,
                body: Box::new(build(m, &y, body, fresh)?),
            })
        }
    }
}

/// Merge a node's parameter extension into the accumulated assignment.
/// Rebinding an existing parameter to a different value is not an
/// extension, so it fails the clause.
fn extended(h: &ParamAssignment, ext: &ParamAssignment) -> Option<ParamAssignment> {
    let mut out = h.clone();
    for (k, &v) in ext {
        if *out.entry(k.clone()).or_insert(v) != v {
            return None;
        }
    }
    Some(out)
}

/// `forall v1 ... vk. (a <-> b)` over the joint free team variables.
fn closed_iff(a: &FoFormula, b: FoFormula) -> FoFormula {
    let mut vars: BTreeSet<String> = a.free_team_vars();
    vars.extend(b.free_team_vars());
    let vars: Vec<String> = vars.into_iter().collect();
    FoFormula::forall_many(&vars, FoFormula::iff(a.clone(), b))
}

fn params_covered(f: &FoFormula, h: &ParamAssignment) -> bool {
    f.free_param_vars().iter().all(|p| h.contains_key(p))
}

/// Replay the clauses on a supplied witness: atoms by quantifying over the
/// assignments of the defined team, every internal node by its
/// biconditional under the extended parameters, then recursion with the
/// node's defining formulas. Structural mismatch between formula and tree
/// is an error; a failed clause is a `false` verdict.
pub fn check_witness(
    m: &Structure,
    gamma: &FoFormula,
    h: &ParamAssignment,
    phi: &IlFormula,
    tree: &WitnessTree,
) -> Result<bool, ModelError> {
    let phi = desugar_dep(phi).map_err(|_| ModelError::Sugared)?;
    check(m, gamma, h, &phi, tree)
}

fn shape_error(phi: &IlFormula, tree: &WitnessTree) -> ModelError {
    let tag = match tree {
        WitnessTree::Atom => "ES-atom",
        WitnessTree::Or { .. } => "ES-or",
        WitnessTree::And { .. } => "ES-and",
        WitnessTree::Exists { .. } => "ES-exists",
        WitnessTree::Forall { .. } => "ES-forall",
    };
    ModelError::WitnessShape(format!("{tag} node against formula {phi}"))
}

fn check(
    m: &Structure,
    gamma: &FoFormula,
    h: &ParamAssignment,
    phi: &IlFormula,
    tree: &WitnessTree,
) -> Result<bool, ModelError> {
    match (phi, tree) {
        (IlFormula::Literal(..) | IlFormula::Indep(..), WitnessTree::Atom) => {
            let x = team_of_definition(m, gamma, h, &joint_domain(gamma, phi))?;
            match phi {
                IlFormula::Literal(..) => {
                    let lit = fo_of_il(phi).expect("literals have a first-order reading");
                    for s in x.assignments() {
                        if !eval_fo(m, h, &s, &lit)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
                IlFormula::Indep(t1, t2, t3) => sat_independence_atom(m, &x, t1, t2, t3),
                _ => unreachable!(),
            }
        }
        (IlFormula::And(a, b), WitnessTree::And { left, right }) => {
            Ok(check(m, gamma, h, a, left)? && check(m, gamma, h, b, right)?)
        }
        (
            IlFormula::TensorOr(a, b),
            WitnessTree::Or {
                ext,
                gamma1,
                gamma2,
                left,
                right,
            },
        ) => {
            let Some(h2) = extended(h, ext) else {
                return Ok(false);
            };
            if !params_covered(gamma1, &h2) || !params_covered(gamma2, &h2) {
                return Ok(false);
            }
            let split = FoFormula::or(gamma1.clone(), gamma2.clone());
            if !eval_fo(m, &h2, &Default::default(), &closed_iff(gamma, split))? {
                return Ok(false);
            }
            Ok(check(m, gamma1, &h2, a, left)? && check(m, gamma2, &h2, b, right)?)
        }
        (IlFormula::Exists(v, body), WitnessTree::Exists { ext, gamma: g2, body: sub }) => {
            let Some(h2) = extended(h, ext) else {
                return Ok(false);
            };
            if !params_covered(g2, &h2) {
                return Ok(false);
            }
            let bicond = closed_iff(
                &FoFormula::exists(v, g2.clone()),
                FoFormula::exists(v, gamma.clone()),
            );
            if !eval_fo(m, &h2, &Default::default(), &bicond)? {
                return Ok(false);
            }
            check(m, g2, &h2, body, sub)
        }
        (IlFormula::Forall(v, body), WitnessTree::Forall { ext, gamma: g2, body: sub }) => {
            let Some(h2) = extended(h, ext) else {
                return Ok(false);
            };
            if !params_covered(g2, &h2) {
                return Ok(false);
            }
            let bicond = closed_iff(g2, FoFormula::exists(v, gamma.clone()));
            if !eval_fo(m, &h2, &Default::default(), &bicond)? {
                return Ok(false);
            }
            check(m, g2, &h2, body, sub)
        }
        _ => Err(shape_error(phi, tree)),
    }
}

impl WitnessTree {
    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        let bindings = |ext: &ParamAssignment| {
            let entries: Vec<String> = ext.iter().map(|(k, v)| format!("${k} -> {v}")).collect();
            format!("{{{}}}", entries.join(", "))
        };
        match self {
            WitnessTree::Atom => writeln!(f, "{pad}ES-atom"),
            WitnessTree::And { left, right } => {
                writeln!(f, "{pad}ES-and")?;
                left.write_indented(f, depth + 1)?;
                right.write_indented(f, depth + 1)
            }
            WitnessTree::Or {
                ext,
                gamma1,
                gamma2,
                left,
                right,
            } => {
                writeln!(f, "{pad}ES-or {} {gamma1} {gamma2}", bindings(ext))?;
                left.write_indented(f, depth + 1)?;
                right.write_indented(f, depth + 1)
            }
            WitnessTree::Exists { ext, gamma, body } => {
                writeln!(f, "{pad}ES-exists {} {gamma}", bindings(ext))?;
                body.write_indented(f, depth + 1)
            }
            WitnessTree::Forall { ext, gamma, body } => {
                writeln!(f, "{pad}ES-forall {} {gamma}", bindings(ext))?;
                body.write_indented(f, depth + 1)
            }
        }
    }
}

impl fmt::Display for WitnessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

#[cfg(test)]
mod tests;
