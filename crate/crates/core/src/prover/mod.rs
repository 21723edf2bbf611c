//! Bounded first-order entailment oracle.
//!
//! `prove_entailment` decides `⋀premises ⊨ ⋀goals` as far as its budget
//! allows: goal by goal, it clausifies the premises together with that
//! goal's negation, adds equality congruence axioms for the symbols in
//! play, and runs an iteratively deepened resolution refutation. When a
//! goal resists it falls back to an exhaustive countermodel search over
//! small structures. Either phase can give out, so `Unknown` is a
//! first-class verdict rather than an error.
//!
//! Parameter variables are treated as fresh constants throughout: the
//! refutation interns `$p` as a nullary symbol and the countermodel search
//! assigns it a domain element, reported in the returned assignment.
//!
//! Proofs are sound (a `Proved` entailment is FO-valid) and countermodels
//! are re-verified by the classical evaluator before they are reported, so
//! `Proved` and `Refuted` can never trade places under a larger budget.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::model::{tuples, Assignment, Elem, eval_fo, ParamAssignment, Structure};
use crate::syntax::{FoFormula, Signature};

mod clauses;

use clauses::{Clause, SearchOutcome, Translator};

#[cfg(test)]
mod tests;

/// Resource limits for one entailment query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverBudget {
    /// Maximum resolution derivation depth.
    pub depth: usize,
    /// Wall-clock limit in milliseconds across both search phases.
    pub ms: u64,
    /// Largest structure size tried by the countermodel fallback.
    pub cm_size: usize,
}

impl Default for ProverBudget {
    fn default() -> ProverBudget {
        ProverBudget {
            depth: 7,
            ms: 2_000,
            cm_size: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ProverVerdict {
    /// The entailment is valid; `steps` counts the refutation's inferences.
    Proved { steps: usize },
    /// A finite structure and parameter assignment satisfying the premises
    /// but not the goal conjunction, verified by classical evaluation.
    Refuted {
        model: Structure,
        params: ParamAssignment,
    },
    /// The budget ran out before either answer.
    Unknown { reason: String },
}

/// Decide `⋀premises ⊨ ⋀goals` within `budget`.
///
/// Formulas must be sentences up to parameter variables. An empty goal set
/// reads as `true` and is proved with zero steps.
pub fn prove_entailment(
    premises: &BTreeSet<FoFormula>,
    goals: &BTreeSet<FoFormula>,
    budget: &ProverBudget,
) -> ProverVerdict {
    let deadline = Instant::now() + Duration::from_millis(budget.ms);
    // The refutation gets the first share of the clock; whatever remains
    // funds the countermodel search.
    let refutation_deadline = Instant::now() + Duration::from_millis(budget.ms * 3 / 5);

    // Entailing a conjunction is entailing every conjunct, so each goal gets
    // its own refutation: clausifying a negated conjunction instead would
    // cross-multiply the goals' clause sets against each other. Repeated
    // subformulas are named before anything is clausified, and the naming
    // spans the whole query, so a formula shared by premise and goal meets
    // itself as one predicate instead of two skolemization towers the
    // search would have to reconcile.
    let mut translator = Translator::new();
    let sentences: Vec<&FoFormula> = premises.iter().chain(goals.iter()).collect();
    let (renamed, defs) = translator.name_across(&sentences);
    let (renamed_premises, renamed_goals) = renamed.split_at(premises.len());

    let mut premise_clauses: Vec<Clause> = Vec::new();
    let mut premises_blown = false;
    for f in renamed_premises.iter().chain(defs.iter()) {
        match translator.clausify(f) {
            Some(cs) => premise_clauses.extend(cs),
            None => premises_blown = true,
        }
    }

    let mut steps_total = 0usize;
    let mut all_proved = true;
    let mut timed_out = false;
    let mut saturated = false;
    let mut clausification_blown = premises_blown;
    for (goal, renamed_goal) in goals.iter().zip(renamed_goals) {
        if premises.contains(goal) {
            continue;
        }
        let mut clause_set = premise_clauses.clone();
        let mut goal_blown = false;
        match translator.clausify(&FoFormula::not(renamed_goal.clone())) {
            Some(cs) => clause_set.extend(cs),
            None => goal_blown = true,
        }
        clausification_blown |= goal_blown;
        let axioms = translator.equality_axioms(&clause_set);
        clause_set.extend(axioms);

        // One run at the full depth limit, not iterative deepening: the
        // lightest-first pick reaches genuine refutations quickly at any
        // limit, while exhausting a shallow level costs more than searching
        // the target one.
        let mut proved = false;
        match clauses::refute(&clause_set, budget.depth, Some(refutation_deadline)) {
            // Dropping an overflowing sentence only weakens the clause
            // set, so a refutation of the rest is still sound.
            SearchOutcome::Refutation(steps) => {
                steps_total += steps;
                proved = true;
            }
            SearchOutcome::Saturated if !premises_blown && !goal_blown => {
                saturated = true;
            }
            SearchOutcome::Saturated | SearchOutcome::Exhausted => {}
            SearchOutcome::TimedOut => {
                timed_out = true;
            }
        }
        // One stuck goal already settles the refutation phase; the leftover
        // clock is better spent on the countermodel search.
        if !proved {
            all_proved = false;
            break;
        }
    }
    if all_proved {
        return ProverVerdict::Proved { steps: steps_total };
    }

    let mut refutation_sentences: BTreeSet<FoFormula> = premises.clone();
    refutation_sentences.insert(FoFormula::not(FoFormula::conj(goals.iter().cloned())));
    match countermodel_search(&refutation_sentences, budget.cm_size, Some(deadline)) {
        Ok(Some((model, params))) => ProverVerdict::Refuted { model, params },
        Ok(None) => {
            let reason = if saturated {
                format!(
                    "the clause set is satisfiable (resolution saturated) but no \
                     countermodel exists within size {}",
                    budget.cm_size
                )
            } else if clausification_blown {
                "clausification exceeded the clause budget".to_string()
            } else if timed_out {
                "time budget exhausted during refutation search".to_string()
            } else {
                format!(
                    "no refutation within depth {} and no countermodel within size {}",
                    budget.depth, budget.cm_size
                )
            };
            ProverVerdict::Unknown { reason }
        }
        Err(TimedOut) => ProverVerdict::Unknown {
            reason: "time budget exhausted during countermodel search".to_string(),
        },
    }
}

/// Exhaustively search for a structure and parameter assignment satisfying
/// every sentence, over domains of size `1..=max_size`.
///
/// The search covers every interpretation of the sentences' combined
/// signature; any hit has, by construction, been accepted by the classical
/// evaluator. Sentences the evaluator rejects (unbound team variables,
/// arity clashes) satisfy nothing, so such inputs simply yield `None`.
pub fn find_countermodel(
    sentences: &BTreeSet<FoFormula>,
    max_size: usize,
) -> Option<(Structure, ParamAssignment)> {
    match countermodel_search(sentences, max_size, None) {
        Ok(found) => found,
        Err(TimedOut) => unreachable!("search without a deadline cannot time out"),
    }
}

struct TimedOut;

fn countermodel_search(
    sentences: &BTreeSet<FoFormula>,
    max_size: usize,
    deadline: Option<Instant>,
) -> Result<Option<(Structure, ParamAssignment)>, TimedOut> {
    let mut sig = Signature::new();
    let mut params: BTreeSet<String> = BTreeSet::new();
    for f in sentences {
        merge_signature(&mut sig, &f.used_signature());
        params.extend(f.free_param_vars());
    }

    let empty = Assignment::new();
    let mut ticks = 0usize;
    for size in 1..=max_size {
        for m in structures_over(&sig, size) {
            ticks += 1;
            if ticks % 256 == 0 {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return Err(TimedOut);
                    }
                }
            }
            for h in param_choices(&params, size) {
                if sentences
                    .iter()
                    .all(|f| eval_fo(&m, &h, &empty, f).unwrap_or(false))
                {
                    return Ok(Some((m, h)));
                }
            }
        }
    }
    Ok(None)
}

pub(crate) fn merge_signature(into: &mut Signature, from: &Signature) {
    for (name, arity) in from.relations() {
        into.declare_relation(name, arity);
    }
    for (name, arity) in from.functions() {
        into.declare_function(name, arity);
    }
    for name in from.constants() {
        into.declare_constant(name);
    }
}

/// Every structure of the given size interpreting exactly `sig`, in a
/// deterministic order: the slot list runs relations, functions, constants
/// (each alphabetical), and earlier slots vary faster. Within a relation
/// slot, tuples enter in lexicographic order, so the first nonempty variant
/// of a unary relation is `{(0)}`.
pub(crate) fn structures_over(sig: &Signature, size: usize) -> impl Iterator<Item = Structure> {
    enum Slot {
        Rel(String, usize),
        Func(String, usize),
        Const(String),
    }
    let mut slots: Vec<Slot> = Vec::new();
    let mut bases: Vec<usize> = Vec::new();
    for (name, arity) in sig.relations() {
        slots.push(Slot::Rel(name.to_string(), arity));
        bases.extend(std::iter::repeat(2).take(size.pow(arity as u32)));
    }
    for (name, arity) in sig.functions() {
        slots.push(Slot::Func(name.to_string(), arity));
        bases.extend(std::iter::repeat(size).take(size.pow(arity as u32)));
    }
    for name in sig.constants() {
        slots.push(Slot::Const(name.to_string()));
        bases.push(size);
    }

    odometer(bases).map(move |digits| {
        let mut m = Structure::with_domain(size);
        let mut at = 0usize;
        for slot in &slots {
            match slot {
                Slot::Rel(name, arity) => {
                    let args: Vec<Vec<Elem>> = tuples(size, *arity).collect();
                    let table = args
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| digits[at + i] == 1)
                        .map(|(_, t)| t.clone());
                    m.add_relation(name, *arity, table).unwrap();
                    at += args.len();
                }
                Slot::Func(name, arity) => {
                    let args: Vec<Vec<Elem>> = tuples(size, *arity).collect();
                    let table = args
                        .iter()
                        .enumerate()
                        .map(|(i, t)| (t.clone(), digits[at + i]));
                    m.add_function(name, *arity, table).unwrap();
                    at += args.len();
                }
                Slot::Const(name) => {
                    m.add_constant(name, digits[at]).unwrap();
                    at += 1;
                }
            }
        }
        m
    })
}

/// Every assignment of the parameter names into a domain of `size`
/// elements, first parameter varying fastest.
pub(crate) fn param_choices(
    params: &BTreeSet<String>,
    size: usize,
) -> impl Iterator<Item = ParamAssignment> + '_ {
    odometer(vec![size; params.len()]).map(move |digits| {
        params
            .iter()
            .zip(&digits)
            .map(|(name, &e)| (name.clone(), e as Elem))
            .collect()
    })
}

/// Little-endian counter over mixed bases; yields one empty vector when
/// there are no digits and nothing when any base is zero.
fn odometer(bases: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let mut digits = if bases.contains(&0) {
        None
    } else {
        Some(vec![0usize; bases.len()])
    };
    std::iter::from_fn(move || {
        let current = digits.clone()?;
        let d = digits.as_mut().expect("checked above");
        let mut i = 0;
        loop {
            if i == d.len() {
                digits = None;
                break;
            }
            d[i] += 1;
            if d[i] < bases[i] {
                break;
            }
            d[i] = 0;
            i += 1;
        }
        Some(current)
    })
}
