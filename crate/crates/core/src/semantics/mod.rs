//! Team semantics over full models and over explicit team families.
//!
//! A team satisfies a literal when all of its rows do classically; an
//! independence atom by the per-class product condition; a split disjunction
//! when the team is a union (overlap allowed) of satisfying subteams; an
//! existential by some lax x-variation; a universal by the full extension.
//! [`eval_gts`] draws disjunction and existential witnesses from a given
//! family of teams instead of from all teams, everything else unchanged.
//!
//! Verdicts of subformulas are memoized per call, keyed by formula node and
//! team, which keeps the exponential cover search tolerable at desk scale.

use std::collections::{BTreeSet, HashMap};

use crate::model::{
    enumerate_x_variations, is_x_variation, term_value, Assignment, Elem, ModelError,
    ParamAssignment, Structure, Team,
};
use crate::syntax::{IlAtom, IlFormula, Term};

/// Value tuple of terms under one assignment; IL terms have no parameters.
fn tuple_value(m: &Structure, s: &Assignment, ts: &[Term]) -> Result<Vec<Elem>, ModelError> {
    let h = ParamAssignment::new();
    ts.iter().map(|t| term_value(m, &h, s, t)).collect()
}

/// Independence atom check: within every class of rows agreeing on `t1`,
/// every occurring `t2`-value must combine with every occurring `t3`-value
/// in some row of the class.
pub fn sat_independence_atom(
    m: &Structure,
    x: &Team,
    t1: &[Term],
    t2: &[Term],
    t3: &[Term],
) -> Result<bool, ModelError> {
    let mut classes: HashMap<Vec<Elem>, (BTreeSet<Vec<Elem>>, BTreeSet<Vec<Elem>>, BTreeSet<(Vec<Elem>, Vec<Elem>)>)> =
        HashMap::new();
    for s in x.assignments() {
        let v1 = tuple_value(m, &s, t1)?;
        let v2 = tuple_value(m, &s, t2)?;
        let v3 = tuple_value(m, &s, t3)?;
        let entry = classes.entry(v1).or_default();
        entry.0.insert(v2.clone());
        entry.1.insert(v3.clone());
        entry.2.insert((v2, v3));
    }
    Ok(classes
        .values()
        .all(|(v2s, v3s, pairs)| pairs.len() == v2s.len() * v3s.len()))
}

fn literal_holds(
    m: &Structure,
    s: &Assignment,
    positive: bool,
    atom: &IlAtom,
) -> Result<bool, ModelError> {
    let val = match atom {
        IlAtom::Rel(r, args) => {
            let vals = tuple_value(m, s, args)?;
            m.rel_contains(r, &vals)?
        }
        IlAtom::Equal(a, b) => {
            tuple_value(m, s, std::slice::from_ref(a))? == tuple_value(m, s, std::slice::from_ref(b))?
        }
    };
    Ok(if positive { val } else { !val })
}

fn check_preconditions(m: &Structure, x: &Team, f: &IlFormula) -> Result<(), ModelError> {
    if !f.is_desugared() {
        return Err(ModelError::Sugared);
    }
    let dom: BTreeSet<&String> = x.vars().iter().collect();
    let loose: Vec<String> = f
        .free_team_vars()
        .into_iter()
        .filter(|v| !dom.contains(v))
        .collect();
    if !loose.is_empty() {
        return Err(ModelError::ScopeTeam(loose));
    }
    m.check_symbols(&f.used_signature())
}

/// Verdicts per formula node (by address, stable for the eval call) and
/// team. The two-level shape lets lookups borrow the team instead of
/// cloning it into a tuple key.
type Memo = HashMap<usize, HashMap<Team, bool>>;

fn memo_get(memo: &Memo, f: &IlFormula, x: &Team) -> Option<bool> {
    memo.get(&(f as *const IlFormula as usize))
        .and_then(|per_team| per_team.get(x))
        .copied()
}

fn memo_put(memo: &mut Memo, f: &IlFormula, x: &Team, verdict: bool) {
    memo.entry(f as *const IlFormula as usize)
        .or_default()
        .insert(x.clone(), verdict);
}

/// Full team semantics: every team over the structure is admissible.
pub fn eval_full(m: &Structure, x: &Team, f: &IlFormula) -> Result<bool, ModelError> {
    check_preconditions(m, x, f)?;
    let mut memo = Memo::new();
    Ok(ts(m, &mut memo, x, f))
}

/// Reusable evaluation session for one structure and formula. Verdicts are
/// memoized across calls, so judging many teams against the same formula
/// shares every subteam verdict instead of recomputing it per team.
pub struct Evaluator<'a> {
    m: &'a Structure,
    f: &'a IlFormula,
    memo: Memo,
}

impl<'a> Evaluator<'a> {
    /// Check the structure-level preconditions once and open a session.
    pub fn new(m: &'a Structure, f: &'a IlFormula) -> Result<Self, ModelError> {
        if !f.is_desugared() {
            return Err(ModelError::Sugared);
        }
        m.check_symbols(&f.used_signature())?;
        Ok(Evaluator {
            m,
            f,
            memo: Memo::new(),
        })
    }

    /// Verdict under full team semantics, same as [`eval_full`]. The team
    /// must still cover the formula's free variables.
    pub fn eval(&mut self, x: &Team) -> Result<bool, ModelError> {
        let dom: BTreeSet<&String> = x.vars().iter().collect();
        let loose: Vec<String> = self
            .f
            .free_team_vars()
            .into_iter()
            .filter(|v| !dom.contains(v))
            .collect();
        if !loose.is_empty() {
            return Err(ModelError::ScopeTeam(loose));
        }
        Ok(ts(self.m, &mut self.memo, x, self.f))
    }
}

/// Verdict of one disjunct on the subteam picked by `mask`, through a
/// per-mask cache so each distinct subteam is built and judged once even
/// though the cover loop revisits masks `3^n / 2^n` times over.
fn side_holds(
    m: &Structure,
    memo: &mut Memo,
    x: &Team,
    rows: &[Vec<Elem>],
    mask: u32,
    side: &IlFormula,
    cache: &mut [Option<bool>],
) -> bool {
    if let Some(v) = cache[mask as usize] {
        return v;
    }
    let picked = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, r)| r.clone());
    let sub = Team::from_rows(x.vars(), picked).expect("aligned rows");
    let v = ts(m, memo, &sub, side);
    cache[mask as usize] = Some(v);
    v
}

fn ts(m: &Structure, memo: &mut Memo, x: &Team, f: &IlFormula) -> bool {
    if let Some(v) = memo_get(memo, f, x) {
        return v;
    }
    let verdict = match f {
        IlFormula::Literal(pos, atom) => x
            .assignments()
            .all(|s| literal_holds(m, &s, *pos, atom).expect("checked scope")),
        IlFormula::Indep(t1, t2, t3) => {
            sat_independence_atom(m, x, t1, t2, t3).expect("checked scope")
        }
        IlFormula::Dep(_) => unreachable!("checked desugared"),
        // Same pair enumeration as [`covers`], on masks: `y` over subsets,
        // `z` over the complement plus a subset of `y`, skipped wholesale
        // when `a` already fails on `y`.
        IlFormula::TensorOr(a, b) => 'cover: {
            let rows: Vec<Vec<Elem>> = x.rows().cloned().collect();
            assert!(rows.len() <= 20, "cover search uses row bitmasks; team too large");
            let full: u32 = if rows.is_empty() { 0 } else { (1u32 << rows.len()) - 1 };
            let mut left = vec![None; full as usize + 1];
            let mut right = vec![None; full as usize + 1];
            for y_mask in 0..=full {
                if !side_holds(m, memo, x, &rows, y_mask, a, &mut left) {
                    continue;
                }
                let complement = full & !y_mask;
                // submask walk: w descends through subsets of y_mask
                let mut w = y_mask;
                loop {
                    if side_holds(m, memo, x, &rows, complement | w, b, &mut right) {
                        break 'cover true;
                    }
                    if w == 0 {
                        break;
                    }
                    w = (w - 1) & y_mask;
                }
            }
            false
        }
        IlFormula::And(a, b) => ts(m, memo, x, a) && ts(m, memo, x, b),
        IlFormula::Exists(v, g) => {
            enumerate_x_variations(m, x, v).any(|x1| ts(m, memo, &x1, g))
        }
        IlFormula::Forall(v, g) => {
            let x1 = x.extend_universal(m, v);
            ts(m, memo, &x1, g)
        }
    };
    memo_put(memo, f, x, verdict);
    verdict
}

/// All pairs `(Y, Z)` of subteams with `Y ∪ Z = X`, overlap allowed. `Y`
/// ranges over subsets; `Z` is the complement plus any subset of `Y`.
pub(crate) fn covers(x: &Team) -> impl Iterator<Item = (Team, Team)> + '_ {
    let rows: Vec<Vec<Elem>> = x.rows().cloned().collect();
    assert!(rows.len() <= 20, "cover search uses row bitmasks; team too large");
    let full: u32 = if rows.is_empty() { 0 } else { (1u32 << rows.len()) - 1 };
    let pick = move |mask: u32, rows: &[Vec<Elem>]| -> Team {
        let picked = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, r)| r.clone());
        Team::from_rows(x.vars(), picked).expect("aligned rows")
    };
    (0..=full).flat_map(move |y_mask| {
        let rows = rows.clone();
        let pick = pick;
        // submask walk: w descends through subsets of y_mask, ending at 0
        let mut w = y_mask;
        let mut exhausted = false;
        std::iter::from_fn(move || {
            if exhausted {
                return None;
            }
            let z_mask = (full & !y_mask) | w;
            let pair = (pick(y_mask, &rows), pick(z_mask, &rows));
            if w == 0 {
                exhausted = true;
            } else {
                w = (w - 1) & y_mask;
            }
            Some(pair)
        })
    })
}

/// General-team semantics over an explicit family: split and existential
/// witnesses must come from the family; universal extension is applied
/// unconditionally, exactly as the clause states. The initial team must be
/// a member of the family.
pub fn eval_gts(
    m: &Structure,
    family: &BTreeSet<Team>,
    x: &Team,
    f: &IlFormula,
) -> Result<bool, ModelError> {
    if !family.contains(x) {
        return Err(ModelError::NotInFamily);
    }
    check_preconditions(m, x, f)?;
    let mut memo = Memo::new();
    Ok(gts(m, family, &mut memo, x, f))
}

fn gts(m: &Structure, family: &BTreeSet<Team>, memo: &mut Memo, x: &Team, f: &IlFormula) -> bool {
    if let Some(v) = memo_get(memo, f, x) {
        return v;
    }
    let verdict = match f {
        IlFormula::Literal(pos, atom) => x
            .assignments()
            .all(|s| literal_holds(m, &s, *pos, atom).expect("checked scope")),
        IlFormula::Indep(t1, t2, t3) => {
            sat_independence_atom(m, x, t1, t2, t3).expect("checked scope")
        }
        IlFormula::Dep(_) => unreachable!("checked desugared"),
        IlFormula::TensorOr(a, b) => {
            let parts: Vec<&Team> = family
                .iter()
                .filter(|t| t.vars() == x.vars() && t.is_subteam_of(x))
                .collect();
            parts.iter().any(|y| {
                parts.iter().any(|z| {
                    y.row_set().union(z.row_set()).count() == x.len()
                        && gts(m, family, memo, y, a)
                        && gts(m, family, memo, z, b)
                })
            })
        }
        IlFormula::And(a, b) => gts(m, family, memo, x, a) && gts(m, family, memo, x, b),
        IlFormula::Exists(v, g) => family
            .iter()
            .filter(|x1| is_x_variation(x, v, x1))
            .any(|x1| gts(m, family, memo, x1, g)),
        IlFormula::Forall(v, g) => {
            let x1 = x.extend_universal(m, v);
            gts(m, family, memo, &x1, g)
        }
    };
    memo_put(memo, f, x, verdict);
    verdict
}

#[cfg(test)]
mod tests;
