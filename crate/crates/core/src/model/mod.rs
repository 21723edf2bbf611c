//! Finite structures, assignments, teams, and classical evaluation.
//!
//! Domain elements are stored by index (`Elem`); the element names given at
//! construction time fix the deterministic enumeration order everywhere
//! (assignment streams, x-variations, structure search). A [`Team`] keeps its
//! variables sorted and its rows in a canonical set, so teams compare and
//! hash by value.

mod files;

pub(crate) use files::parse_team_block;
pub use files::{parse_structure, parse_team, print_structure, print_team};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{FoFormula, Signature, Term};

/// Index into a structure's domain.
pub type Elem = usize;

/// Total map from team variables to domain elements.
pub type Assignment = BTreeMap<String, Elem>;

/// Total map from parameter variables (without the `$`) to domain elements.
pub type ParamAssignment = BTreeMap<String, Elem>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("domain must be nonempty")]
    EmptyDomain,
    #[error("duplicate domain element '{0}'")]
    DuplicateElement(String),
    #[error("unknown domain element '{0}'")]
    UnknownElement(String),
    #[error("duplicate team variable '{0}'")]
    DuplicateVar(String),
    #[error("team variable '{0}' has no value")]
    UnboundTeamVar(String),
    #[error("parameter variable '${0}' has no value")]
    UnboundParamVar(String),
    #[error("{what} '{name}' is not interpreted by the structure")]
    Uninterpreted { what: &'static str, name: String },
    #[error("{what} '{name}' expects {expected} arguments, got {got}")]
    Arity {
        what: &'static str,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("function '{name}' has no value at ({args})")]
    PartialFunction { name: String, args: String },
    #[error("function '{name}' maps ({args}) twice")]
    DuplicateFunctionEntry { name: String, args: String },
    #[error("row has {got} values but the team has {expected} variables")]
    RowWidth { expected: usize, got: usize },
    #[error("element index {0} is outside the domain")]
    ElementRange(Elem),
    #[error("variables {0:?} are not a subset of the team's domain")]
    NotSubset(Vec<String>),
    #[error("assignment domain does not match the team's variables")]
    AssignmentDomain,
    #[error("formula uses team variables outside the given domain: {0:?}")]
    ScopeTeam(Vec<String>),
    #[error("formula uses parameter variables outside the given assignment: {0:?}")]
    ScopeParam(Vec<String>),
    #[error("formula still contains dependence-atom sugar")]
    Sugared,
    #[error("the initial team is not a member of the family")]
    NotInFamily,
    #[error("explicit family lacks the empty team over ({})", .0.join(", "))]
    MissingEmptyTeam(Vec<String>),
    #[error("formula size bound must be at least 1")]
    ZeroBound,
    #[error("relation variable '{0}' is declared twice in one sentence")]
    DuplicateRelVar(String),
    #[error("relation variable '{0}' clashes with a declared relation symbol")]
    RelVarClash(String),
    #[error("sentence has free variables: {0}")]
    SentenceFreeVars(String),
    #[error("witness node does not match the formula: {0}")]
    WitnessShape(String),
}

/// Finite first-order structure: named elements plus tables for every
/// declared relation, function, and constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    sig: Signature,
    elems: Vec<String>,
    rels: BTreeMap<String, BTreeSet<Vec<Elem>>>,
    funs: BTreeMap<String, BTreeMap<Vec<Elem>, Elem>>,
    consts: BTreeMap<String, Elem>,
}

impl Structure {
    /// Structure with the given element names and an empty signature.
    pub fn new<S: AsRef<str>>(elems: &[S]) -> Result<Structure, ModelError> {
        if elems.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        let mut seen = BTreeSet::new();
        for e in elems {
            if !seen.insert(e.as_ref().to_string()) {
                return Err(ModelError::DuplicateElement(e.as_ref().to_string()));
            }
        }
        Ok(Structure {
            sig: Signature::new(),
            elems: elems.iter().map(|e| e.as_ref().to_string()).collect(),
            rels: BTreeMap::new(),
            funs: BTreeMap::new(),
            consts: BTreeMap::new(),
        })
    }

    /// Structure over elements named `0, 1, ..., n-1`.
    pub fn with_domain(n: usize) -> Structure {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Structure::new(&names).expect("nonempty distinct names")
    }

    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn elem_names(&self) -> &[String] {
        &self.elems
    }

    pub fn elem_index(&self, name: &str) -> Option<Elem> {
        self.elems.iter().position(|e| e == name)
    }

    pub fn elem_name(&self, e: Elem) -> &str {
        &self.elems[e]
    }

    fn check_tuple(&self, tuple: &[Elem]) -> Result<(), ModelError> {
        match tuple.iter().find(|&&e| e >= self.elems.len()) {
            Some(&e) => Err(ModelError::ElementRange(e)),
            None => Ok(()),
        }
    }

    pub fn add_relation(
        &mut self,
        name: &str,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<Elem>>,
    ) -> Result<(), ModelError> {
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(ModelError::Arity {
                    what: "relation",
                    name: name.to_string(),
                    expected: arity,
                    got: t.len(),
                });
            }
            self.check_tuple(&t)?;
            set.insert(t);
        }
        self.sig.declare_relation(name, arity);
        self.rels.insert(name.to_string(), set);
        Ok(())
    }

    /// Total function table; every argument tuple over the domain must appear
    /// exactly once.
    pub fn add_function(
        &mut self,
        name: &str,
        arity: usize,
        entries: impl IntoIterator<Item = (Vec<Elem>, Elem)>,
    ) -> Result<(), ModelError> {
        let mut map = BTreeMap::new();
        for (args, val) in entries {
            if args.len() != arity {
                return Err(ModelError::Arity {
                    what: "function",
                    name: name.to_string(),
                    expected: arity,
                    got: args.len(),
                });
            }
            self.check_tuple(&args)?;
            self.check_tuple(std::slice::from_ref(&val))?;
            let args_desc = args
                .iter()
                .map(|e| self.elems[*e].clone())
                .collect::<Vec<_>>()
                .join(", ");
            if map.insert(args, val).is_some() {
                return Err(ModelError::DuplicateFunctionEntry {
                    name: name.to_string(),
                    args: args_desc,
                });
            }
        }
        let expected = self.elems.len().pow(arity as u32);
        if map.len() != expected {
            let missing = tuples(self.elems.len(), arity)
                .find(|t| !map.contains_key(t))
                .expect("some tuple is missing");
            return Err(ModelError::PartialFunction {
                name: name.to_string(),
                args: missing
                    .iter()
                    .map(|e| self.elems[*e].clone())
                    .collect::<Vec<_>>()
                    .join(", "),
            });
        }
        self.sig.declare_function(name, arity);
        self.funs.insert(name.to_string(), map);
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str, value: Elem) -> Result<(), ModelError> {
        self.check_tuple(std::slice::from_ref(&value))?;
        self.sig.declare_constant(name);
        self.consts.insert(name.to_string(), value);
        Ok(())
    }

    pub fn relation(&self, name: &str) -> Option<&BTreeSet<Vec<Elem>>> {
        self.rels.get(name)
    }

    pub fn rel_contains(&self, name: &str, tuple: &[Elem]) -> Result<bool, ModelError> {
        self.rels
            .get(name)
            .map(|set| set.contains(tuple))
            .ok_or_else(|| ModelError::Uninterpreted {
                what: "relation",
                name: name.to_string(),
            })
    }

    pub fn apply_fun(&self, name: &str, args: &[Elem]) -> Result<Elem, ModelError> {
        let table = self.funs.get(name).ok_or_else(|| ModelError::Uninterpreted {
            what: "function",
            name: name.to_string(),
        })?;
        table.get(args).copied().ok_or_else(|| ModelError::PartialFunction {
            name: name.to_string(),
            args: args
                .iter()
                .map(|e| self.elems.get(*e).cloned().unwrap_or_else(|| format!("#{e}")))
                .collect::<Vec<_>>()
                .join(", "),
        })
    }

    pub fn function(&self, name: &str) -> Option<&BTreeMap<Vec<Elem>, Elem>> {
        self.funs.get(name)
    }

    pub fn constant(&self, name: &str) -> Result<Elem, ModelError> {
        self.consts.get(name).copied().ok_or_else(|| ModelError::Uninterpreted {
            what: "constant",
            name: name.to_string(),
        })
    }

    /// Check that every signature symbol used by `f` is interpreted with a
    /// matching arity.
    pub fn check_symbols(&self, used: &Signature) -> Result<(), ModelError> {
        for (name, arity) in used.relations() {
            match self.sig.relation_arity(name) {
                None => {
                    return Err(ModelError::Uninterpreted {
                        what: "relation",
                        name: name.to_string(),
                    })
                }
                Some(a) if a != arity => {
                    return Err(ModelError::Arity {
                        what: "relation",
                        name: name.to_string(),
                        expected: a,
                        got: arity,
                    })
                }
                Some(_) => {}
            }
        }
        for (name, arity) in used.functions() {
            match self.sig.function_arity(name) {
                None => {
                    return Err(ModelError::Uninterpreted {
                        what: "function",
                        name: name.to_string(),
                    })
                }
                Some(a) if a != arity => {
                    return Err(ModelError::Arity {
                        what: "function",
                        name: name.to_string(),
                        expected: a,
                        got: arity,
                    })
                }
                Some(_) => {}
            }
        }
        for name in used.constants() {
            if !self.consts.contains_key(name) {
                return Err(ModelError::Uninterpreted {
                    what: "constant",
                    name: name.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Team: a set of assignments over a fixed, sorted variable domain.
///
/// The empty team over `(x)` and over `(x, y)` are distinct values, and a
/// team over the empty domain may still contain the empty assignment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Team {
    vars: Vec<String>,
    rows: BTreeSet<Vec<Elem>>,
}

impl Team {
    /// Empty team over the given variables (sorted, duplicates rejected).
    pub fn empty<S: AsRef<str>>(vars: &[S]) -> Result<Team, ModelError> {
        let mut sorted: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(ModelError::DuplicateVar(w[0].clone()));
            }
        }
        Ok(Team {
            vars: sorted,
            rows: BTreeSet::new(),
        })
    }

    /// Team from rows aligned with `vars` as given; columns are reordered
    /// into the canonical sorted variable order.
    pub fn from_rows<S: AsRef<str>>(
        vars: &[S],
        rows: impl IntoIterator<Item = Vec<Elem>>,
    ) -> Result<Team, ModelError> {
        let mut team = Team::empty(vars)?;
        let given: Vec<&str> = vars.iter().map(|v| v.as_ref()).collect();
        let perm: Vec<usize> = team
            .vars
            .iter()
            .map(|v| given.iter().position(|g| g == v).expect("same variable set"))
            .collect();
        for row in rows {
            if row.len() != given.len() {
                return Err(ModelError::RowWidth {
                    expected: given.len(),
                    got: row.len(),
                });
            }
            team.rows.insert(perm.iter().map(|&i| row[i]).collect());
        }
        Ok(team)
    }

    /// The team over `()` whose only row is the empty assignment.
    pub fn unit() -> Team {
        Team {
            vars: Vec::new(),
            rows: std::iter::once(Vec::new()).collect(),
        }
    }

    /// All assignments over `vars` in the structure's domain.
    pub fn full<S: AsRef<str>>(m: &Structure, vars: &[S]) -> Result<Team, ModelError> {
        let mut team = Team::empty(vars)?;
        for row in tuples(m.size(), team.vars.len()) {
            team.rows.insert(row);
        }
        Ok(team)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<Elem>> {
        self.rows.iter()
    }

    pub fn row_set(&self) -> &BTreeSet<Vec<Elem>> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn var_position(&self, var: &str) -> Option<usize> {
        self.vars.binary_search_by(|v| v.as_str().cmp(var)).ok()
    }

    pub fn insert_row(&mut self, row: Vec<Elem>) -> Result<(), ModelError> {
        if row.len() != self.vars.len() {
            return Err(ModelError::RowWidth {
                expected: self.vars.len(),
                got: row.len(),
            });
        }
        self.rows.insert(row);
        Ok(())
    }

    pub fn insert_assignment(&mut self, s: &Assignment) -> Result<(), ModelError> {
        if s.len() != self.vars.len() || !self.vars.iter().all(|v| s.contains_key(v)) {
            return Err(ModelError::AssignmentDomain);
        }
        let row = self.vars.iter().map(|v| s[v]).collect();
        self.rows.insert(row);
        Ok(())
    }

    pub fn contains_row(&self, row: &[Elem]) -> bool {
        self.rows.contains(row)
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.rows.iter().map(move |row| {
            self.vars
                .iter()
                .cloned()
                .zip(row.iter().copied())
                .collect()
        })
    }

    fn positions(&self, vars: &[String]) -> Result<Vec<usize>, ModelError> {
        let missing: Vec<String> = vars
            .iter()
            .filter(|v| self.var_position(v).is_none())
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(ModelError::NotSubset(missing));
        }
        Ok(vars.iter().map(|v| self.var_position(v).unwrap()).collect())
    }

    /// Pointwise restriction of every row to a subset of the variables.
    pub fn restrict<S: AsRef<str>>(&self, vars: &[S]) -> Result<Team, ModelError> {
        let mut out = Team::empty(vars)?;
        let pos = self.positions(&out.vars)?;
        for row in &self.rows {
            out.rows.insert(pos.iter().map(|&i| row[i]).collect());
        }
        Ok(out)
    }

    /// `X[M/x]`: every row extended (or overwritten at `x`) with every
    /// domain element.
    pub fn extend_universal(&self, m: &Structure, x: &str) -> Team {
        let mut vars = self.vars.clone();
        let pos = match vars.binary_search_by(|v| v.as_str().cmp(x)) {
            Ok(p) => p,
            Err(p) => {
                vars.insert(p, x.to_string());
                p
            }
        };
        let fresh = vars.len() != self.vars.len();
        let mut rows = BTreeSet::new();
        for row in &self.rows {
            for elem in 0..m.size() {
                let mut new = row.clone();
                if fresh {
                    new.insert(pos, elem);
                } else {
                    new[pos] = elem;
                }
                rows.insert(new);
            }
        }
        Team { vars, rows }
    }

    /// Union of two teams over the same variable domain.
    pub fn union(&self, other: &Team) -> Result<Team, ModelError> {
        if self.vars != other.vars {
            return Err(ModelError::AssignmentDomain);
        }
        let mut out = self.clone();
        out.rows.extend(other.rows.iter().cloned());
        Ok(out)
    }

    pub fn is_subteam_of(&self, other: &Team) -> bool {
        self.vars == other.vars && self.rows.is_subset(&other.rows)
    }
}

/// All element tuples of the given width over a domain of the given size, in
/// lexicographic order.
pub fn tuples(domain_size: usize, width: usize) -> impl Iterator<Item = Vec<Elem>> {
    Tuples {
        domain_size,
        next: if width == 0 || domain_size > 0 {
            Some(vec![0; width])
        } else {
            None
        },
    }
}

struct Tuples {
    domain_size: usize,
    next: Option<Vec<Elem>>,
}

impl Iterator for Tuples {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.domain_size {
                self.next = Some(succ);
                return Some(current);
            }
            succ[i] = 0;
        }
        // width 0 or wrapped around: `current` was the last tuple
        Some(current)
    }
}

/// All assignments over the given variables, in row order.
pub fn enumerate_assignments<'a>(
    m: &Structure,
    vars: &'a [String],
) -> impl Iterator<Item = Assignment> + 'a {
    tuples(m.size(), vars.len())
        .map(move |row| vars.iter().cloned().zip(row).collect())
}

/// Value of a term under a parameter assignment and a team assignment.
pub fn term_value(
    m: &Structure,
    h: &ParamAssignment,
    s: &Assignment,
    t: &Term,
) -> Result<Elem, ModelError> {
    match t {
        Term::TeamVar(v) => s
            .get(v)
            .copied()
            .ok_or_else(|| ModelError::UnboundTeamVar(v.clone())),
        Term::ParamVar(p) => h
            .get(p)
            .copied()
            .ok_or_else(|| ModelError::UnboundParamVar(p.clone())),
        Term::Const(c) => m.constant(c),
        Term::App(f, args) => {
            let vals = args
                .iter()
                .map(|a| term_value(m, h, s, a))
                .collect::<Result<Vec<_>, _>>()?;
            m.apply_fun(f, &vals)
        }
    }
}

fn scope_check(
    m: &Structure,
    h: &ParamAssignment,
    team_vars: &BTreeSet<String>,
    f: &FoFormula,
) -> Result<(), ModelError> {
    let loose: Vec<String> = f
        .free_team_vars()
        .into_iter()
        .filter(|v| !team_vars.contains(v))
        .collect();
    if !loose.is_empty() {
        return Err(ModelError::ScopeTeam(loose));
    }
    let loose: Vec<String> = f
        .free_param_vars()
        .into_iter()
        .filter(|p| !h.contains_key(p))
        .collect();
    if !loose.is_empty() {
        return Err(ModelError::ScopeParam(loose));
    }
    m.check_symbols(&f.used_signature())
}

/// Classical satisfaction `M, h ∪ s ⊨ f`.
pub fn eval_fo(
    m: &Structure,
    h: &ParamAssignment,
    s: &Assignment,
    f: &FoFormula,
) -> Result<bool, ModelError> {
    scope_check(m, h, &s.keys().cloned().collect(), f)?;
    let mut scratch = s.clone();
    Ok(eval_fo_raw(m, h, &mut scratch, f))
}

/// Evaluation core; every symbol and variable must already be in scope.
pub(crate) fn eval_fo_raw(
    m: &Structure,
    h: &ParamAssignment,
    s: &mut Assignment,
    f: &FoFormula,
) -> bool {
    match f {
        FoFormula::True => true,
        FoFormula::False => false,
        FoFormula::Rel(r, args) => {
            let vals: Vec<Elem> = args
                .iter()
                .map(|a| term_value(m, h, s, a).expect("checked scope"))
                .collect();
            m.rel_contains(r, &vals).expect("checked symbol")
        }
        FoFormula::Equal(a, b) => {
            term_value(m, h, s, a).expect("checked scope")
                == term_value(m, h, s, b).expect("checked scope")
        }
        FoFormula::Not(g) => !eval_fo_raw(m, h, s, g),
        FoFormula::And(a, b) => eval_fo_raw(m, h, s, a) && eval_fo_raw(m, h, s, b),
        FoFormula::Or(a, b) => eval_fo_raw(m, h, s, a) || eval_fo_raw(m, h, s, b),
        FoFormula::Implies(a, b) => !eval_fo_raw(m, h, s, a) || eval_fo_raw(m, h, s, b),
        FoFormula::Iff(a, b) => eval_fo_raw(m, h, s, a) == eval_fo_raw(m, h, s, b),
        FoFormula::Exists(v, g) => {
            let saved = s.get(v).copied();
            let mut found = false;
            for e in 0..m.size() {
                s.insert(v.clone(), e);
                if eval_fo_raw(m, h, s, g) {
                    found = true;
                    break;
                }
            }
            restore(s, v, saved);
            found
        }
        FoFormula::Forall(v, g) => {
            let saved = s.get(v).copied();
            let mut all = true;
            for e in 0..m.size() {
                s.insert(v.clone(), e);
                if !eval_fo_raw(m, h, s, g) {
                    all = false;
                    break;
                }
            }
            restore(s, v, saved);
            all
        }
    }
}

fn restore(s: &mut Assignment, v: &str, saved: Option<Elem>) {
    match saved {
        Some(e) => {
            s.insert(v.to_string(), e);
        }
        None => {
            s.remove(v);
        }
    }
}

/// `‖γ‖_{M,h}` over the given variable domain: the team of all assignments
/// satisfying the definition.
pub fn team_of_definition<S: AsRef<str>>(
    m: &Structure,
    gamma: &FoFormula,
    h: &ParamAssignment,
    var_domain: &[S],
) -> Result<Team, ModelError> {
    let mut team = Team::empty(var_domain)?;
    scope_check(m, h, &team.vars.iter().cloned().collect(), gamma)?;
    let vars = team.vars.clone();
    let mut s = Assignment::new();
    for row in tuples(m.size(), vars.len()) {
        s.clear();
        s.extend(vars.iter().cloned().zip(row.iter().copied()));
        if eval_fo_raw(m, h, &mut s, gamma) {
            team.rows.insert(row);
        }
    }
    Ok(team)
}

/// A first-order definition of the team: the disjunction over rows of
/// equality diagrams `x1 = $q1 & ...`, with fresh parameters valued by the
/// returned assignment. The empty team yields `false`.
pub fn canonical_team_definition(x: &Team) -> (FoFormula, ParamAssignment) {
    let (gamma, h, _) = canonical_team_definition_named(x, "q", 1);
    (gamma, h)
}

/// As [`canonical_team_definition`], with a caller-chosen parameter name
/// prefix and starting index; returns the next unused index.
pub fn canonical_team_definition_named(
    x: &Team,
    prefix: &str,
    start: usize,
) -> (FoFormula, ParamAssignment, usize) {
    let mut h = ParamAssignment::new();
    let mut counter = start;
    let mut cases = Vec::new();
    for row in &x.rows {
        let mut eqs = Vec::new();
        for (v, e) in x.vars.iter().zip(row) {
            let p = format!("{prefix}{counter}");
            counter += 1;
            h.insert(p.clone(), *e);
            eqs.push(FoFormula::Equal(Term::var(v), Term::ParamVar(p)));
        }
        cases.push(FoFormula::conj(eqs));
    }
    (FoFormula::disj(cases), h, counter)
}

/// Whether `candidate` is an x-variation of `base`: same teams after
/// dropping `x`, with `candidate` ranging over `dom(base) ∪ {x}`.
pub fn is_x_variation(base: &Team, x: &str, candidate: &Team) -> bool {
    let mut vars: Vec<String> = base.vars.clone();
    if let Err(p) = vars.binary_search_by(|v| v.as_str().cmp(x)) {
        vars.insert(p, x.to_string());
    }
    if candidate.vars != vars {
        return false;
    }
    let keep: Vec<String> = vars.iter().filter(|v| v.as_str() != x).cloned().collect();
    candidate.restrict(&keep).expect("subset") == base.restrict(&keep).expect("subset")
}

/// All x-variations of a team: every `X'` over `dom(X) ∪ {x}` whose
/// restriction to `dom(X) \ {x}` equals that of `X`. Each original row picks
/// a nonempty set of values for `x`, so there are `(2^|M| - 1)^k` variations
/// for `k` restricted rows; the empty team has exactly itself.
pub fn enumerate_x_variations(m: &Structure, x_team: &Team, x: &str) -> XVariations {
    let keep: Vec<String> = x_team
        .vars
        .iter()
        .filter(|v| v.as_str() != x)
        .cloned()
        .collect();
    let base = x_team.restrict(&keep).expect("subset of the team's domain");
    let mut vars = keep.clone();
    let pos = match vars.binary_search_by(|v| v.as_str().cmp(x)) {
        Ok(p) => p,
        Err(p) => {
            vars.insert(p, x.to_string());
            p
        }
    };
    assert!(
        m.size() <= 30,
        "x-variation enumeration uses per-row bitmasks; domain too large"
    );
    let base_rows: Vec<Vec<Elem>> = base.rows.into_iter().collect();
    XVariations {
        domain_size: m.size(),
        vars,
        x_pos: pos,
        masks: vec![1; base_rows.len()],
        base_rows,
        done: false,
    }
}

/// Lazy stream of x-variations in a deterministic order.
pub struct XVariations {
    domain_size: usize,
    vars: Vec<String>,
    x_pos: usize,
    base_rows: Vec<Vec<Elem>>,
    masks: Vec<u32>,
    done: bool,
}

impl Iterator for XVariations {
    type Item = Team;

    fn next(&mut self) -> Option<Team> {
        if self.done {
            return None;
        }
        let mut rows = BTreeSet::new();
        for (row, mask) in self.base_rows.iter().zip(&self.masks) {
            for e in 0..self.domain_size {
                if mask & (1 << e) != 0 {
                    let mut new = row.clone();
                    new.insert(self.x_pos, e);
                    rows.insert(new);
                }
            }
        }
        let team = Team {
            vars: self.vars.clone(),
            rows,
        };
        // odometer over nonempty value sets, most significant at the end
        let limit = (1u32 << self.domain_size) - 1;
        let mut i = 0;
        loop {
            if i == self.masks.len() {
                self.done = true;
                break;
            }
            if self.masks[i] < limit {
                self.masks[i] += 1;
                break;
            }
            self.masks[i] = 1;
            i += 1;
        }
        Some(team)
    }
}

/// All structures interpreting `sig` over a domain of the given size, in a
/// deterministic order. Relation tables run through all subsets, function
/// tables through all total maps, constants through all elements.
pub fn enumerate_structures(sig: &Signature, size: usize) -> impl Iterator<Item = Structure> {
    let sig = sig.clone();
    let mut radices: Vec<u64> = Vec::new();
    for (_, arity) in sig.relations() {
        let cells = size.checked_pow(arity as u32).expect("desk-scale arity");
        assert!(cells <= 24, "relation table too large to enumerate");
        radices.push(1u64 << cells);
    }
    for (_, arity) in sig.functions() {
        let cells = size.checked_pow(arity as u32).expect("desk-scale arity");
        for _ in 0..cells {
            radices.push(size as u64);
        }
    }
    for _ in sig.constants() {
        radices.push(size as u64);
    }
    let counters = vec![0u64; radices.len()];
    StructureEnum {
        sig,
        size,
        radices,
        counters: if size == 0 { None } else { Some(counters) },
    }
}

struct StructureEnum {
    sig: Signature,
    size: usize,
    radices: Vec<u64>,
    counters: Option<Vec<u64>>,
}

impl Iterator for StructureEnum {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        let counters = self.counters.as_ref()?.clone();
        let mut m = Structure::with_domain(self.size);
        let mut slot = 0;
        for (name, arity) in self.sig.relations() {
            let mask = counters[slot];
            slot += 1;
            let table = tuples(self.size, arity)
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| t);
            m.add_relation(name, arity, table).expect("in-range tuples");
        }
        for (name, arity) in self.sig.functions() {
            let cells = self.size.pow(arity as u32);
            let values = &counters[slot..slot + cells];
            slot += cells;
            let entries = tuples(self.size, arity)
                .zip(values.iter().map(|&v| v as Elem))
                .collect::<Vec<_>>();
            m.add_function(name, arity, entries).expect("total table");
        }
        for name in self.sig.constants() {
            m.add_constant(name, counters[slot] as Elem).expect("in range");
            slot += 1;
        }
        // advance the mixed-radix counter; exhaust on wraparound
        let counters = self.counters.as_mut().expect("checked above");
        let mut i = 0;
        loop {
            if i == counters.len() {
                self.counters = None;
                break;
            }
            counters[i] += 1;
            if counters[i] < self.radices[i] {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
        Some(m)
    }
}

/// Single-line rendering of a team with element names from the structure.
pub fn render_team(m: &Structure, x: &Team) -> String {
    let vars = x.vars.join(", ");
    let rows: Vec<String> = x
        .rows
        .iter()
        .map(|row| {
            let vals: Vec<&str> = row.iter().map(|e| m.elem_name(*e)).collect();
            format!("({})", vals.join(", "))
        })
        .collect();
    format!("over ({}) {{ {} }}", vars, rows.join(" "))
}

#[cfg(test)]
mod tests;
