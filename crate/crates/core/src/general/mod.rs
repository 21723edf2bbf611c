//! General models: a structure paired with a family of teams.
//!
//! The family is either `Full` (every team), `Least` (every team definable
//! by a first-order formula with domain-element parameters and family-team
//! relation parameters, which over a finite structure collapses to every
//! team), or an explicit finite set. [`check_general_closure`] searches for
//! definability-closure violations up to a formula size bound,
//! [`least_family`] materializes the least family over a variable universe,
//! and [`check_theta_closed`] decides relation-existence theories against
//! the family.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::model::{
    enumerate_assignments, eval_fo, eval_fo_raw, tuples, Elem, ModelError, ParamAssignment,
    Structure, Team,
};
use crate::semantics::eval_gts;
use crate::syntax::{FoFormula, IlFormula, Term};

mod files;
pub use files::{parse_family, parse_theta, print_family, print_theta};

/// Team family of a general model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TeamFamily {
    /// Every team over every finite variable domain.
    Full,
    /// The intersection of all closed families; over a finite structure this
    /// contains every team, so it is materialized on demand.
    Least,
    /// A finite, explicitly listed family.
    Explicit(BTreeSet<Team>),
}

/// A finite structure together with a team family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralModel {
    structure: Structure,
    family: TeamFamily,
}

impl GeneralModel {
    /// Pair a structure with a family. Explicit families must contain the
    /// empty team over each variable domain they declare, and their rows
    /// must stay inside the structure's domain.
    pub fn new(structure: Structure, family: TeamFamily) -> Result<GeneralModel, ModelError> {
        if let TeamFamily::Explicit(teams) = &family {
            let mut domains = BTreeSet::new();
            for t in teams {
                for row in t.rows() {
                    if let Some(&e) = row.iter().find(|&&e| e >= structure.size()) {
                        return Err(ModelError::ElementRange(e));
                    }
                }
                domains.insert(t.vars().to_vec());
            }
            for d in domains {
                if !teams.contains(&Team::empty(&d)?) {
                    return Err(ModelError::MissingEmptyTeam(d));
                }
            }
        }
        Ok(GeneralModel { structure, family })
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn family(&self) -> &TeamFamily {
        &self.family
    }

    pub fn explicit_teams(&self) -> Option<&BTreeSet<Team>> {
        match &self.family {
            TeamFamily::Explicit(teams) => Some(teams),
            _ => None,
        }
    }

    /// The family as a concrete team set. `Full` and `Least` are
    /// materialized as every team over every subset of the variable
    /// universe, which is all either can contribute to an evaluation whose
    /// teams stay inside the universe.
    pub fn teams<S: AsRef<str>>(&self, var_universe: &[S]) -> Result<BTreeSet<Team>, ModelError> {
        match &self.family {
            TeamFamily::Explicit(teams) => Ok(teams.clone()),
            TeamFamily::Full | TeamFamily::Least => least_family(&self.structure, var_universe),
        }
    }

    /// Family-bounded satisfaction of `f` by `x`. The variable universe is
    /// taken to be the team's variables plus every variable of `f`, bound
    /// ones included, so quantifier witnesses are never cut off.
    pub fn eval(&self, x: &Team, f: &IlFormula) -> Result<bool, ModelError> {
        self.eval_within(x, f, &[] as &[&str])
    }

    /// As [`GeneralModel::eval`], with extra variables admitted to the
    /// universe over which the full and least families are materialized.
    pub fn eval_within<S: AsRef<str>>(
        &self,
        x: &Team,
        f: &IlFormula,
        extra_vars: &[S],
    ) -> Result<bool, ModelError> {
        let mut universe: BTreeSet<String> = x.vars().iter().cloned().collect();
        universe.extend(f.all_team_vars());
        universe.extend(extra_vars.iter().map(|v| v.as_ref().to_string()));
        let universe: Vec<String> = universe.into_iter().collect();
        let family = self.teams(&universe)?;
        eval_gts(&self.structure, &family, x, f)
    }
}

/// All teams over all subsets of the variable universe. Over a finite
/// structure every such team is definable from its diagram, so this is the
/// least family restricted to the universe.
pub fn least_family<S: AsRef<str>>(
    m: &Structure,
    var_universe: &[S],
) -> Result<BTreeSet<Team>, ModelError> {
    let universe = sorted_universe(var_universe)?;
    assert!(universe.len() <= 16, "variable universe too large");
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << universe.len()) {
        let sub: Vec<&String> = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| v)
            .collect();
        let rows: Vec<Vec<Elem>> = Team::full(m, &sub)?.row_set().iter().cloned().collect();
        assert!(rows.len() <= 16, "team space too large to materialize");
        for pick in 0u32..(1 << rows.len()) {
            let picked = rows
                .iter()
                .enumerate()
                .filter(|(i, _)| pick >> i & 1 == 1)
                .map(|(_, r)| r.clone());
            out.insert(Team::from_rows(&sub, picked)?);
        }
    }
    Ok(out)
}

fn sorted_universe<S: AsRef<str>>(vars: &[S]) -> Result<Vec<String>, ModelError> {
    let mut out: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
    out.sort();
    for w in out.windows(2) {
        if w[0] == w[1] {
            return Err(ModelError::DuplicateVar(w[0].clone()));
        }
    }
    Ok(out)
}

/// Structure extended with one fresh relation per family team, in the
/// family's sorted order; returns the extension and the relation names.
/// Team rows become relation tuples in the team's variable order.
pub fn family_extension(
    m: &Structure,
    teams: &BTreeSet<Team>,
) -> Result<(Structure, Vec<String>), ModelError> {
    let mut ext = m.clone();
    let mut names = Vec::new();
    for (i, t) in teams.iter().enumerate() {
        let name = format!("__fam{i}");
        if m.signature().relations().any(|(n, _)| n == name) {
            return Err(ModelError::RelVarClash(name));
        }
        ext.add_relation(&name, t.vars().len(), t.row_set().iter().cloned())?;
        names.push(name);
    }
    Ok((ext, names))
}

/// Outcome of a closure check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureVerdict {
    Closed,
    Violation(Box<ClosureViolation>),
}

/// A definable team missing from the family: the defining formula (over the
/// family extension of the structure), its presentation variables, the
/// parameter values it uses, and the team it defines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureViolation {
    pub formula: FoFormula,
    pub vars: Vec<String>,
    pub params: ParamAssignment,
    pub team: Team,
}

/// Search for a first-order definable team missing from an explicit family.
///
/// Formulas are enumerated bottom-up by node count, over equalities between
/// universe variables and domain-element parameters `$m0, $m1, ...`, atoms
/// of the structure's relations and of the family-team relations, and the
/// connectives and quantifiers; terms stay variable- and parameter-shaped.
/// Each formula is presented over every superset of its free variables
/// inside the universe. Formulas are deduplicated by observable behavior,
/// so a reported witness is a smallest definition of its team. `Full` and
/// `Least` families are closed by construction.
pub fn check_general_closure<S: AsRef<str>>(
    g: &GeneralModel,
    var_universe: &[S],
    bound: usize,
) -> Result<ClosureVerdict, ModelError> {
    if bound == 0 {
        return Err(ModelError::ZeroBound);
    }
    let teams = match &g.family {
        TeamFamily::Full | TeamFamily::Least => return Ok(ClosureVerdict::Closed),
        TeamFamily::Explicit(teams) => teams,
    };
    let universe = sorted_universe(var_universe)?;
    let m = &g.structure;
    let (ext, _) = family_extension(m, teams)?;
    let h: ParamAssignment = (0..m.size()).map(|e| (format!("m{e}"), e)).collect();

    let check = |entry: &Entry| -> Result<Option<ClosureViolation>, ModelError> {
        for mask in 0u32..(1 << universe.len()) {
            let sub: Vec<&String> = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| v)
                .collect();
            if !entry.free.iter().all(|v| sub.iter().any(|s| *s == v)) {
                continue;
            }
            let pos: Vec<usize> = sub
                .iter()
                .map(|v| universe.iter().position(|u| &u == v).unwrap())
                .collect();
            let rows = entry
                .rows
                .iter()
                .map(|r| pos.iter().map(|&i| r[i]).collect::<Vec<Elem>>());
            let team = Team::from_rows(&sub, rows)?;
            if !teams.contains(&team) {
                let used = entry.formula.free_param_vars();
                return Ok(Some(ClosureViolation {
                    formula: entry.formula.clone(),
                    vars: sub.iter().map(|v| v.to_string()).collect(),
                    params: h
                        .iter()
                        .filter(|(k, _)| used.contains(*k))
                        .map(|(k, &v)| (k.clone(), v))
                        .collect(),
                    team,
                }));
            }
        }
        Ok(None)
    };

    let rows_of = |f: &FoFormula| -> BTreeSet<Vec<Elem>> {
        let mut rows = BTreeSet::new();
        for mut s in enumerate_assignments(&ext, &universe) {
            let row: Vec<Elem> = universe.iter().map(|v| s[v]).collect();
            if eval_fo_raw(&ext, &h, &mut s, f) {
                rows.insert(row);
            }
        }
        rows
    };

    let mut seen: HashSet<(BTreeSet<String>, BTreeSet<Vec<Elem>>)> = HashSet::new();
    let mut levels: Vec<Vec<Entry>> = Vec::new();
    for size in 1..=bound {
        let mut fresh = Vec::new();
        let mut admit = |formula: FoFormula, fresh: &mut Vec<Entry>| {
            let entry = Entry {
                free: formula.free_team_vars(),
                rows: rows_of(&formula),
                formula,
            };
            if seen.insert((entry.free.clone(), entry.rows.clone())) {
                fresh.push(entry);
            }
        };
        if size == 1 {
            admit(FoFormula::True, &mut fresh);
            admit(FoFormula::False, &mut fresh);
            for (i, v) in universe.iter().enumerate() {
                for w in &universe[i..] {
                    admit(FoFormula::Equal(Term::var(v), Term::var(w)), &mut fresh);
                }
                for e in 0..m.size() {
                    let p = Term::param(&format!("m{e}"));
                    admit(FoFormula::Equal(Term::var(v), p), &mut fresh);
                }
            }
            let rels: Vec<(String, usize)> = ext
                .signature()
                .relations()
                .map(|(n, a)| (n.to_string(), a))
                .collect();
            for (name, arity) in rels {
                for idx in tuples(universe.len(), arity) {
                    let args = idx.iter().map(|&i| Term::var(&universe[i])).collect();
                    admit(FoFormula::Rel(name.clone(), args), &mut fresh);
                }
            }
        } else {
            let prev = &levels[size - 2];
            let mut grown = Vec::new();
            for e in prev {
                grown.push(FoFormula::not(e.formula.clone()));
                for v in &universe {
                    grown.push(FoFormula::exists(v, e.formula.clone()));
                    grown.push(FoFormula::forall(v, e.formula.clone()));
                }
            }
            for left in 1..=size.saturating_sub(2) {
                let right = size - 1 - left;
                for a in &levels[left - 1] {
                    for b in &levels[right - 1] {
                        grown.push(FoFormula::and(a.formula.clone(), b.formula.clone()));
                        grown.push(FoFormula::or(a.formula.clone(), b.formula.clone()));
                        grown.push(FoFormula::implies(a.formula.clone(), b.formula.clone()));
                        grown.push(FoFormula::iff(a.formula.clone(), b.formula.clone()));
                    }
                }
            }
            for f in grown {
                admit(f, &mut fresh);
            }
        }
        for entry in &fresh {
            if let Some(v) = check(entry)? {
                return Ok(ClosureVerdict::Violation(Box::new(v)));
            }
        }
        levels.push(fresh);
    }
    Ok(ClosureVerdict::Closed)
}

struct Entry {
    formula: FoFormula,
    free: BTreeSet<String>,
    rows: BTreeSet<Vec<Elem>>,
}

/// One sentence of a relation-existence theory: existentially quantified
/// relation variables over a first-order body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaSentence {
    pub rel_vars: Vec<(String, usize)>,
    pub body: FoFormula,
}

/// A finite set of relation-existence sentences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Theta {
    sentences: Vec<ThetaSentence>,
}

impl Theta {
    /// Validates each sentence: relation variables distinct, bodies closed
    /// (no free team or parameter variables).
    pub fn new(sentences: Vec<ThetaSentence>) -> Result<Theta, ModelError> {
        for s in &sentences {
            let mut names = BTreeSet::new();
            for (name, _) in &s.rel_vars {
                if !names.insert(name.clone()) {
                    return Err(ModelError::DuplicateRelVar(name.clone()));
                }
            }
            let mut free: Vec<String> = s.body.free_team_vars().into_iter().collect();
            free.extend(s.body.free_param_vars().into_iter().map(|p| format!("${p}")));
            if !free.is_empty() {
                return Err(ModelError::SentenceFreeVars(free.join(", ")));
            }
        }
        Ok(Theta { sentences })
    }

    pub fn sentences(&self) -> &[ThetaSentence] {
        &self.sentences
    }
}

/// Outcome of a theta-closure check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThetaVerdict {
    Closed,
    Violation { sentence: usize },
}

/// Check that each sentence's relation variables can be interpreted so its
/// body holds: by the value rows of family teams of matching arity for an
/// explicit family, and by arbitrary relations of the right arity for the
/// full and least families.
pub fn check_theta_closed(g: &GeneralModel, theta: &Theta) -> Result<ThetaVerdict, ModelError> {
    let m = &g.structure;
    for (idx, sentence) in theta.sentences().iter().enumerate() {
        for (name, _) in &sentence.rel_vars {
            if m.signature().relations().any(|(n, _)| n == name.as_str()) {
                return Err(ModelError::RelVarClash(name.clone()));
            }
        }
        let candidates: Vec<Vec<BTreeSet<Vec<Elem>>>> = sentence
            .rel_vars
            .iter()
            .map(|(_, arity)| match &g.family {
                TeamFamily::Explicit(teams) => teams
                    .iter()
                    .filter(|t| t.vars().len() == *arity)
                    .map(|t| t.row_set().clone())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
                TeamFamily::Full | TeamFamily::Least => all_relations(m.size(), *arity),
            })
            .collect();
        let empty = ParamAssignment::new();
        let no_vars = BTreeMap::new();
        let mut found = false;
        for choice in cartesian(&candidates) {
            let mut ext = m.clone();
            for ((name, arity), rows) in sentence.rel_vars.iter().zip(&choice) {
                ext.add_relation(name, *arity, rows.iter().cloned())?;
            }
            if eval_fo(&ext, &empty, &no_vars, &sentence.body)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(ThetaVerdict::Violation { sentence: idx });
        }
    }
    Ok(ThetaVerdict::Closed)
}

fn all_relations(domain: usize, arity: usize) -> Vec<BTreeSet<Vec<Elem>>> {
    let cells: Vec<Vec<Elem>> = tuples(domain, arity).collect();
    assert!(cells.len() <= 16, "relation space too large to enumerate");
    (0u32..(1 << cells.len()))
        .map(|mask| {
            cells
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect()
        })
        .collect()
}

/// All picks of one item per slot, in slot-major order.
fn cartesian<'a, T>(slots: &'a [Vec<T>]) -> impl Iterator<Item = Vec<&'a T>> {
    let mut idx = vec![0usize; slots.len()];
    let mut done = slots.iter().any(|s| s.is_empty());
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let current: Vec<&T> = slots.iter().zip(&idx).map(|(s, &i)| &s[i]).collect();
        done = true;
        for i in (0..slots.len()).rev() {
            idx[i] += 1;
            if idx[i] < slots[i].len() {
                done = false;
                break;
            }
            idx[i] = 0;
        }
        Some(current)
    })
}

#[cfg(test)]
mod tests;
