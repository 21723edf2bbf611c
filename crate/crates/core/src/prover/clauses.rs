//! Clause-level kernel behind the entailment oracle.
//!
//! First-order sentences are translated to clause sets by the usual
//! pipeline: implication elimination, negation normal form, inline
//! skolemization, distribution to conjunctive normal form. Equality is
//! handled by congruence axioms generated for the symbols that actually
//! occur. Refutations come from binary resolution with factoring under a
//! derivation-depth limit; the caller deepens the limit iteratively.
//!
//! Redundancy control keeps the saturation loop afloat: new clauses are
//! simplified against kept unit clauses, dropped when a kept clause
//! subsumes them, and retire the kept clauses they subsume. The given
//! clause is usually the lightest passive one, with every fourth pick
//! taken by age instead so heavy clauses cannot starve.
//!
//! Internal symbols never collide with user ones: parameter variables are
//! interned as `$name` constants and skolem functions as `#sk<n>`, and the
//! surface lexer accepts neither `$` nor `#` inside plain identifiers.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};
use std::time::Instant;

use crate::syntax::{FoFormula, Term};

/// Clauses whose literal count would exceed this are discarded.
const LIT_CAP: usize = 16;
/// Arena entries per deepening run before the run is cut off.
const CLAUSE_CAP: usize = 20_000;
/// Clause count allowed out of distribution to conjunctive normal form.
const CNF_CAP: usize = 4_096;

/// Function or predicate symbol table. Ids are dense indices.
#[derive(Debug, Default)]
pub(crate) struct Symbols {
    names: Vec<(String, usize)>,
    index: HashMap<(String, usize), usize>,
}

impl Symbols {
    fn intern(&mut self, name: &str, arity: usize) -> usize {
        let key = (name.to_string(), arity);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.names.len();
        self.names.push(key.clone());
        self.index.insert(key, id);
        id
    }

    fn arity(&self, id: usize) -> usize {
        self.names[id].1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum PTerm {
    Var(usize),
    App(usize, Vec<PTerm>),
}

impl PTerm {
    fn depth(&self) -> usize {
        match self {
            PTerm::Var(_) => 1,
            PTerm::App(_, args) => 1 + args.iter().map(PTerm::depth).max().unwrap_or(0),
        }
    }

    fn symbols(&self) -> usize {
        match self {
            PTerm::Var(_) => 1,
            PTerm::App(_, args) => 1 + args.iter().map(PTerm::symbols).sum::<usize>(),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            PTerm::Var(v) => Some(*v),
            PTerm::App(_, args) => args.iter().filter_map(PTerm::max_var).max(),
        }
    }
}

/// Predicate id 0 is reserved for equality.
pub(crate) const EQ: usize = 0;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct PLit {
    pub pos: bool,
    pub pred: usize,
    pub args: Vec<PTerm>,
}

impl PLit {
    fn complements(&self, other: &PLit) -> bool {
        self.pred == other.pred && self.pos != other.pos
    }

    fn symbols(&self) -> usize {
        1 + self.args.iter().map(PTerm::symbols).sum::<usize>()
    }

    fn depth(&self) -> usize {
        self.args.iter().map(PTerm::depth).max().unwrap_or(0)
    }

    fn max_var(&self) -> Option<usize> {
        self.args.iter().filter_map(PTerm::max_var).max()
    }
}

pub(crate) type Clause = Vec<PLit>;

fn clause_depth(c: &Clause) -> usize {
    c.iter().map(PLit::depth).max().unwrap_or(0)
}

fn clause_symbols(c: &Clause) -> usize {
    c.iter().map(PLit::symbols).sum()
}

fn clause_max_var(c: &Clause) -> Option<usize> {
    c.iter().filter_map(PLit::max_var).max()
}

/// Syntactic tautology: contains a literal and its exact complement.
fn tautology(c: &Clause) -> bool {
    c.iter()
        .any(|l| l.pos && c.iter().any(|m| !m.pos && m.pred == l.pred && m.args == l.args))
}

/// Sort and dedup literals, canonically renumber variables, repeat once so
/// the numbering no longer depends on the input order. Alpha-variants that
/// survive this cost extra work, never correctness.
fn normalize(mut c: Clause) -> Clause {
    for _ in 0..2 {
        c.sort();
        c.dedup();
        let mut map = HashMap::new();
        for lit in &mut c {
            for arg in &mut lit.args {
                renumber(arg, &mut map);
            }
        }
    }
    c
}

fn renumber(t: &mut PTerm, map: &mut HashMap<usize, usize>) {
    match t {
        PTerm::Var(v) => {
            let next = map.len();
            *v = *map.entry(*v).or_insert(next);
        }
        PTerm::App(_, args) => {
            for a in args {
                renumber(a, map);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Unification

type Subst = HashMap<usize, PTerm>;

fn walk(t: &PTerm, s: &Subst) -> PTerm {
    let mut cur = t.clone();
    while let PTerm::Var(v) = cur {
        match s.get(&v) {
            Some(bound) => cur = bound.clone(),
            None => return PTerm::Var(v),
        }
    }
    cur
}

fn occurs(v: usize, t: &PTerm, s: &Subst) -> bool {
    match walk(t, s) {
        PTerm::Var(w) => w == v,
        PTerm::App(_, args) => args.iter().any(|a| occurs(v, a, s)),
    }
}

fn unify(a: &PTerm, b: &PTerm, s: &mut Subst) -> bool {
    let (a, b) = (walk(a, s), walk(b, s));
    match (a, b) {
        (PTerm::Var(v), PTerm::Var(w)) if v == w => true,
        (PTerm::Var(v), t) | (t, PTerm::Var(v)) => {
            if occurs(v, &t, s) {
                return false;
            }
            s.insert(v, t);
            true
        }
        (PTerm::App(f, fa), PTerm::App(g, ga)) => {
            f == g && fa.len() == ga.len() && fa.iter().zip(&ga).all(|(x, y)| unify(x, y, s))
        }
    }
}

fn unify_lits(a: &PLit, b: &PLit, s: &mut Subst) -> bool {
    a.args.len() == b.args.len() && a.args.iter().zip(&b.args).all(|(x, y)| unify(x, y, s))
}

fn apply(t: &PTerm, s: &Subst) -> PTerm {
    match walk(t, s) {
        PTerm::Var(v) => PTerm::Var(v),
        PTerm::App(f, args) => PTerm::App(f, args.iter().map(|a| apply(a, s)).collect()),
    }
}

fn apply_clause(c: impl Iterator<Item = PLit>, s: &Subst) -> Clause {
    c.map(|l| PLit {
        args: l.args.iter().map(|a| apply(a, s)).collect(),
        ..l
    })
    .collect()
}

fn shift_vars(c: &Clause, offset: usize) -> Clause {
    fn shift(t: &PTerm, offset: usize) -> PTerm {
        match t {
            PTerm::Var(v) => PTerm::Var(v + offset),
            PTerm::App(f, args) => {
                PTerm::App(*f, args.iter().map(|a| shift(a, offset)).collect())
            }
        }
    }
    c.iter()
        .map(|l| PLit {
            args: l.args.iter().map(|a| shift(a, offset)).collect(),
            ..l.clone()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Translation to clauses

/// Quantifier-free, negation-normal intermediate form.
enum Nnf {
    Top,
    Bot,
    Lit(PLit),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
}

pub(crate) struct Translator {
    pub preds: Symbols,
    pub funcs: Symbols,
    next_var: usize,
    next_skolem: usize,
    next_def: usize,
}

/// Node count of a formula, for the naming threshold.
fn fo_size(f: &FoFormula) -> usize {
    match f {
        FoFormula::True | FoFormula::False | FoFormula::Rel(..) | FoFormula::Equal(..) => 1,
        FoFormula::Not(g) | FoFormula::Exists(_, g) | FoFormula::Forall(_, g) => 1 + fo_size(g),
        FoFormula::And(a, b)
        | FoFormula::Or(a, b)
        | FoFormula::Implies(a, b)
        | FoFormula::Iff(a, b) => 1 + fo_size(a) + fo_size(b),
    }
}

/// How many times each non-atomic subformula would be expanded by a direct
/// clausification: biconditional sides unfold once per direction, so their
/// contents count double.
fn count_subformulas<'a>(f: &'a FoFormula, mult: usize, out: &mut BTreeMap<&'a FoFormula, usize>) {
    let mult = mult.min(16);
    match f {
        FoFormula::True | FoFormula::False | FoFormula::Rel(..) | FoFormula::Equal(..) => {}
        FoFormula::Not(g) | FoFormula::Exists(_, g) | FoFormula::Forall(_, g) => {
            *out.entry(f).or_insert(0) += mult;
            count_subformulas(g, mult, out);
        }
        FoFormula::And(a, b) | FoFormula::Or(a, b) | FoFormula::Implies(a, b) => {
            *out.entry(f).or_insert(0) += mult;
            count_subformulas(a, mult, out);
            count_subformulas(b, mult, out);
        }
        FoFormula::Iff(a, b) => {
            *out.entry(f).or_insert(0) += mult;
            count_subformulas(a, mult * 2, out);
            count_subformulas(b, mult * 2, out);
        }
    }
}

/// Subformulas repeated at least this often get named.
const NAME_COUNT: usize = 2;
/// ... provided they have at least this many nodes; smaller ones are
/// cheaper to duplicate than to define.
const NAME_SIZE: usize = 4;

impl Translator {
    pub(crate) fn new() -> Translator {
        let mut preds = Symbols::default();
        assert_eq!(preds.intern("=", 2), EQ);
        Translator {
            preds,
            funcs: Symbols::default(),
            next_var: 0,
            next_skolem: 0,
            next_def: 0,
        }
    }

    /// Structure-preserving naming across a whole entailment query:
    /// subformulas a direct clausification would expand more than once,
    /// counted over every sentence together, become fresh defined
    /// predicates over their free variables. Returns the renamed sentences
    /// in order, then the universally closed definitions. Equisatisfiable;
    /// the point is that a formula shared between premise and goal turns
    /// into one predicate on both sides instead of two unrelated
    /// skolemization towers the refutation would have to reconcile.
    pub(crate) fn name_across(&mut self, sentences: &[&FoFormula]) -> (Vec<FoFormula>, Vec<FoFormula>) {
        let mut counts = BTreeMap::new();
        for f in sentences {
            count_subformulas(f, 1, &mut counts);
        }
        let marked: BTreeSet<FoFormula> = counts
            .into_iter()
            .filter(|(g, n)| *n >= NAME_COUNT && fo_size(g) >= NAME_SIZE)
            .map(|(g, _)| g.clone())
            .collect();
        let mut names = BTreeMap::new();
        let mut defs = Vec::new();
        let renamed = sentences
            .iter()
            .map(|f| self.rename(f, &marked, &mut names, &mut defs))
            .collect();
        (renamed, defs)
    }

    fn rename(
        &mut self,
        f: &FoFormula,
        marked: &BTreeSet<FoFormula>,
        names: &mut BTreeMap<FoFormula, FoFormula>,
        defs: &mut Vec<FoFormula>,
    ) -> FoFormula {
        if let Some(atom) = names.get(f) {
            return atom.clone();
        }
        let rebuilt = match f {
            FoFormula::True | FoFormula::False | FoFormula::Rel(..) | FoFormula::Equal(..) => {
                f.clone()
            }
            FoFormula::Not(g) => FoFormula::not(self.rename(g, marked, names, defs)),
            FoFormula::And(a, b) => FoFormula::and(
                self.rename(a, marked, names, defs),
                self.rename(b, marked, names, defs),
            ),
            FoFormula::Or(a, b) => FoFormula::or(
                self.rename(a, marked, names, defs),
                self.rename(b, marked, names, defs),
            ),
            FoFormula::Implies(a, b) => FoFormula::implies(
                self.rename(a, marked, names, defs),
                self.rename(b, marked, names, defs),
            ),
            FoFormula::Iff(a, b) => FoFormula::iff(
                self.rename(a, marked, names, defs),
                self.rename(b, marked, names, defs),
            ),
            FoFormula::Exists(x, g) => {
                FoFormula::exists(x, self.rename(g, marked, names, defs))
            }
            FoFormula::Forall(x, g) => {
                FoFormula::forall(x, self.rename(g, marked, names, defs))
            }
        };
        if marked.contains(f) {
            let vars: Vec<String> = f.free_team_vars().into_iter().collect();
            self.next_def += 1;
            let name = format!("#def{}", self.next_def);
            let atom = FoFormula::Rel(name, vars.iter().map(|v| Term::var(v)).collect());
            defs.push(FoFormula::forall_many(
                &vars,
                FoFormula::iff(atom.clone(), rebuilt),
            ));
            names.insert(f.clone(), atom.clone());
            return atom;
        }
        rebuilt
    }

    fn fresh_var(&mut self) -> usize {
        self.next_var += 1;
        self.next_var - 1
    }

    fn term(&mut self, t: &Term, env: &HashMap<String, PTerm>) -> PTerm {
        match t {
            // Free team variables fall outside the sentence precondition;
            // reading them as fresh constants keeps translation total.
            Term::TeamVar(v) => env
                .get(v)
                .cloned()
                .unwrap_or_else(|| PTerm::App(self.funcs.intern(&format!("#free_{v}"), 0), vec![])),
            Term::ParamVar(p) => PTerm::App(self.funcs.intern(&format!("${p}"), 0), vec![]),
            Term::Const(c) => PTerm::App(self.funcs.intern(c, 0), vec![]),
            Term::App(f, args) => {
                let args: Vec<PTerm> = args.iter().map(|a| self.term(a, env)).collect();
                PTerm::App(self.funcs.intern(f, args.len()), args)
            }
        }
    }

    /// Negation normal form with inline skolemization: `univ` carries the
    /// universal variables in scope, existentials become skolem terms over
    /// them.
    fn nnf(
        &mut self,
        f: &FoFormula,
        pos: bool,
        env: &mut HashMap<String, PTerm>,
        univ: &mut Vec<usize>,
    ) -> Nnf {
        match f {
            FoFormula::True => {
                if pos {
                    Nnf::Top
                } else {
                    Nnf::Bot
                }
            }
            FoFormula::False => {
                if pos {
                    Nnf::Bot
                } else {
                    Nnf::Top
                }
            }
            FoFormula::Rel(name, args) => {
                let args: Vec<PTerm> = args.iter().map(|a| self.term(a, env)).collect();
                Nnf::Lit(PLit {
                    pos,
                    pred: self.preds.intern(name, args.len()),
                    args,
                })
            }
            FoFormula::Equal(a, b) => Nnf::Lit(PLit {
                pos,
                pred: EQ,
                args: vec![self.term(a, env), self.term(b, env)],
            }),
            FoFormula::Not(g) => self.nnf(g, !pos, env, univ),
            FoFormula::And(a, b) | FoFormula::Or(a, b) => {
                let conjunctive = matches!(f, FoFormula::And(..)) == pos;
                let left = self.nnf(a, pos, env, univ);
                let right = self.nnf(b, pos, env, univ);
                if conjunctive {
                    Nnf::And(Box::new(left), Box::new(right))
                } else {
                    Nnf::Or(Box::new(left), Box::new(right))
                }
            }
            FoFormula::Implies(a, b) => {
                let left = self.nnf(a, !pos, env, univ);
                let right = self.nnf(b, pos, env, univ);
                if pos {
                    Nnf::Or(Box::new(left), Box::new(right))
                } else {
                    // ¬(a → b) is a ∧ ¬b; `left` already carries the flip.
                    Nnf::And(Box::new(left), Box::new(right))
                }
            }
            // Equal sides make a biconditional valid outright; expanding it
            // would cross-multiply one copy's clauses against the other's.
            FoFormula::Iff(a, b) if a == b => {
                if pos {
                    Nnf::Top
                } else {
                    Nnf::Bot
                }
            }
            FoFormula::Iff(a, b) => {
                let expanded = FoFormula::and(
                    FoFormula::implies((**a).clone(), (**b).clone()),
                    FoFormula::implies((**b).clone(), (**a).clone()),
                );
                self.nnf(&expanded, pos, env, univ)
            }
            FoFormula::Exists(x, g) | FoFormula::Forall(x, g) => {
                // A binder over a variable its body never mentions would
                // only mint a dead skolem or universal; peel it instead.
                if !g.free_team_vars().contains(x) {
                    return self.nnf(g, pos, env, univ);
                }
                let universal = matches!(f, FoFormula::Forall(..)) == pos;
                let binding = if universal {
                    let v = self.fresh_var();
                    univ.push(v);
                    PTerm::Var(v)
                } else {
                    self.next_skolem += 1;
                    let name = format!("#sk{}", self.next_skolem);
                    let id = self.funcs.intern(&name, univ.len());
                    PTerm::App(id, univ.iter().map(|&v| PTerm::Var(v)).collect())
                };
                let saved = env.insert(x.clone(), binding);
                let body = self.nnf(g, pos, env, univ);
                match saved {
                    Some(old) => env.insert(x.clone(), old),
                    None => env.remove(x),
                };
                if universal {
                    univ.pop();
                }
                body
            }
        }
    }

    /// Clause set of one sentence, `None` when distribution explodes past
    /// the cap. Repeated subformulas are named first, and the definitions
    /// ride along in the returned set.
    pub(crate) fn clausify(&mut self, f: &FoFormula) -> Option<Vec<Clause>> {
        fn cnf(f: &Nnf) -> Option<Vec<Clause>> {
            match f {
                Nnf::Top => Some(vec![]),
                Nnf::Bot => Some(vec![vec![]]),
                Nnf::Lit(l) => Some(vec![vec![l.clone()]]),
                Nnf::And(a, b) => {
                    let mut out = cnf(a)?;
                    out.extend(cnf(b)?);
                    (out.len() <= CNF_CAP).then_some(out)
                }
                Nnf::Or(a, b) => {
                    let (ca, cb) = (cnf(a)?, cnf(b)?);
                    if ca.len().saturating_mul(cb.len()) > CNF_CAP {
                        return None;
                    }
                    let mut out = Vec::with_capacity(ca.len() * cb.len());
                    for x in &ca {
                        for y in &cb {
                            let mut c = x.clone();
                            c.extend(y.iter().cloned());
                            out.push(c);
                        }
                    }
                    Some(out)
                }
            }
        }
        let nnf = self.nnf(f, true, &mut HashMap::new(), &mut Vec::new());
        let out = cnf(&nnf)?;
        if out.len() > CNF_CAP {
            return None;
        }
        Some(out)
    }

    /// Reflexivity, symmetry, transitivity, and one congruence clause per
    /// function and predicate symbol that occurs in `clauses`.
    pub(crate) fn equality_axioms(&mut self, clauses: &[Clause]) -> Vec<Clause> {
        if !clauses.iter().flatten().any(|l| l.pred == EQ) {
            return vec![];
        }
        let mut used_funcs = BTreeSet::new();
        let mut used_preds = BTreeSet::new();
        fn funcs_of(t: &PTerm, out: &mut BTreeSet<usize>) {
            if let PTerm::App(f, args) = t {
                out.insert(*f);
                for a in args {
                    funcs_of(a, out);
                }
            }
        }
        for lit in clauses.iter().flatten() {
            used_preds.insert(lit.pred);
            for arg in &lit.args {
                funcs_of(arg, &mut used_funcs);
            }
        }

        let eq = |pos, a, b| PLit {
            pos,
            pred: EQ,
            args: vec![a, b],
        };
        let v = PTerm::Var;
        let mut out = vec![
            vec![eq(true, v(0), v(0))],
            vec![eq(false, v(0), v(1)), eq(true, v(1), v(0))],
            vec![eq(false, v(0), v(1)), eq(false, v(1), v(2)), eq(true, v(0), v(2))],
        ];
        for f in used_funcs {
            let n = self.funcs.arity(f);
            if n == 0 {
                continue;
            }
            let mut clause: Clause = (0..n).map(|i| eq(false, v(i), v(n + i))).collect();
            let xs = (0..n).map(v).collect();
            let ys = (n..2 * n).map(v).collect();
            clause.push(eq(true, PTerm::App(f, xs), PTerm::App(f, ys)));
            out.push(clause);
        }
        for p in used_preds {
            let n = self.preds.arity(p);
            if p == EQ || n == 0 {
                continue;
            }
            let mut clause: Clause = (0..n).map(|i| eq(false, v(i), v(n + i))).collect();
            clause.push(PLit {
                pos: false,
                pred: p,
                args: (0..n).map(v).collect(),
            });
            clause.push(PLit {
                pos: true,
                pred: p,
                args: (n..2 * n).map(v).collect(),
            });
            out.push(clause);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Refutation search

pub(crate) enum SearchOutcome {
    /// Empty clause derived; payload counts the derivation's inference steps.
    Refutation(usize),
    /// Saturated without discarding anything: the set is satisfiable and
    /// deeper limits cannot change that.
    Saturated,
    /// Some limit pruned the search.
    Exhausted,
    TimedOut,
}

struct Stored {
    lits: Clause,
    depth: usize,
    fp: u64,
    /// Ids this clause was inferred from; empty for input clauses.
    parents: Vec<usize>,
    /// Inferences performed at this node: one per resolution or factoring
    /// step plus one per unit deletion.
    local_steps: usize,
}

/// Bit set over literal keys. If `c` subsumes `d` then every key of `c`
/// occurs in `d`, so `fp(c) & !fp(d) != 0` refutes subsumption cheaply.
fn fingerprint(c: &Clause) -> u64 {
    c.iter()
        .fold(0, |acc, l| acc | 1 << ((l.pred * 2 + l.pos as usize) % 64))
}

/// One-way matching: bind variables of `pat` so it equals `tgt` exactly.
/// Target variables are never bound, so bindings compare syntactically.
fn match_term(pat: &PTerm, tgt: &PTerm, s: &mut Subst) -> bool {
    match pat {
        PTerm::Var(v) => match s.get(v) {
            Some(bound) => bound == tgt,
            None => {
                s.insert(*v, tgt.clone());
                true
            }
        },
        PTerm::App(f, fa) => match tgt {
            PTerm::App(g, ga) if f == g && fa.len() == ga.len() => {
                fa.iter().zip(ga).all(|(x, y)| match_term(x, y, s))
            }
            _ => false,
        },
    }
}

fn match_args(pat: &PLit, tgt: &PLit, s: &mut Subst) -> bool {
    pat.args.len() == tgt.args.len()
        && pat.args.iter().zip(&tgt.args).all(|(x, y)| match_term(x, y, s))
}

/// Subsumption with the usual length guard: some instance of `c` is a
/// subset of `d`. Shared variable numbers are harmless because bindings run
/// strictly from `c` into `d`.
fn subsumes(c: &Clause, d: &Clause) -> bool {
    fn go(c: &Clause, d: &Clause, i: usize, s: &Subst) -> bool {
        let Some(lit) = c.get(i) else { return true };
        d.iter().any(|m| {
            if m.pos != lit.pos || m.pred != lit.pred {
                return false;
            }
            let mut trial = s.clone();
            match_args(lit, m, &mut trial) && go(c, d, i + 1, &trial)
        })
    }
    c.len() <= d.len() && go(c, d, 0, &Subst::new())
}

struct Search {
    term_cap: usize,
    arena: Vec<Stored>,
    passive: BinaryHeap<Reverse<(usize, usize)>>,
    by_age: VecDeque<usize>,
    picked: Vec<bool>,
    /// Retired by backward subsumption; skipped by picks and scans.
    dead: Vec<bool>,
    /// Canonical clause to arena id, for duplicate and depth bookkeeping.
    seen: HashMap<Clause, usize>,
    active: Vec<usize>,
    /// Kept unit clauses, the simplification index.
    units: Vec<usize>,
    discarded: bool,
}

impl Search {
    /// Admit one clause: simplify against kept units, drop it when a kept
    /// clause already subsumes it, retire kept clauses it subsumes. Returns
    /// the id when the admitted clause is empty.
    ///
    /// Subsumption is restricted to clauses no deeper than the loser, so a
    /// refutation of depth `k` survives every deletion of a limit-`k` run.
    fn admit(
        &mut self,
        lits: Clause,
        depth: usize,
        mut parents: Vec<usize>,
        mut local_steps: usize,
    ) -> Option<usize> {
        let mut lits = normalize(lits);
        // A kept unit matching a literal subsumes the whole clause; one
        // matching its complement deletes the literal.
        'rescan: loop {
            for &u in &self.units {
                if self.dead[u] {
                    continue;
                }
                let ulit = &self.arena[u].lits[0];
                for (i, lit) in lits.iter().enumerate() {
                    if ulit.pred != lit.pred {
                        continue;
                    }
                    let mut s = Subst::new();
                    if !match_args(ulit, lit, &mut s) {
                        continue;
                    }
                    if ulit.pos == lit.pos {
                        return None;
                    }
                    lits.remove(i);
                    parents.push(u);
                    local_steps += 1;
                    continue 'rescan;
                }
            }
            break;
        }
        if !lits.is_empty() {
            if tautology(&lits) {
                return None;
            }
            if let Some(&id) = self.seen.get(&lits) {
                // A shallower rederivation loosens the copy's depth limit.
                self.arena[id].depth = self.arena[id].depth.min(depth);
                return None;
            }
            let fp = fingerprint(&lits);
            for k in 0..self.arena.len() {
                if self.dead[k]
                    || self.arena[k].depth > depth
                    || self.arena[k].fp & !fp != 0
                {
                    continue;
                }
                if subsumes(&self.arena[k].lits, &lits) {
                    return None;
                }
            }
            if lits.len() > LIT_CAP
                || clause_depth(&lits) > self.term_cap
                || self.arena.len() >= CLAUSE_CAP
            {
                self.discarded = true;
                return None;
            }
            self.seen.insert(lits.clone(), self.arena.len());
            for k in 0..self.arena.len() {
                if self.dead[k] || self.arena[k].depth < depth || fp & !self.arena[k].fp != 0
                {
                    continue;
                }
                if subsumes(&lits, &self.arena[k].lits) {
                    self.dead[k] = true;
                }
            }
        }
        let id = self.arena.len();
        let weight = clause_symbols(&lits) + 4 * lits.len();
        let empty = lits.is_empty();
        if lits.len() == 1 {
            self.units.push(id);
        }
        self.arena.push(Stored {
            fp: fingerprint(&lits),
            lits,
            depth,
            parents,
            local_steps,
        });
        self.passive.push(Reverse((weight, id)));
        self.by_age.push_back(id);
        self.picked.push(false);
        self.dead.push(false);
        empty.then_some(id)
    }

    /// Next given clause. Usually the lightest passive clause, but every
    /// fourth pick takes the oldest so heavy clauses are not starved.
    fn pick(&mut self, picks: usize) -> Option<usize> {
        let age_turn = picks % 4 == 3;
        for source in 0..2 {
            let from_age = (source == 0) == age_turn;
            let found = if from_age {
                loop {
                    match self.by_age.pop_front() {
                        Some(id) if self.picked[id] || self.dead[id] => continue,
                        other => break other,
                    }
                }
            } else {
                loop {
                    match self.passive.pop() {
                        Some(Reverse((_, id))) if self.picked[id] || self.dead[id] => continue,
                        Some(Reverse((_, id))) => break Some(id),
                        None => break None,
                    }
                }
            };
            if let Some(id) = found {
                self.picked[id] = true;
                return Some(id);
            }
        }
        None
    }

    /// Cut every literal that unifies with a kept unit, so a resolvent and
    /// its whole unit chain land at one depth level. Each cut is one more
    /// inference with the unit as an extra parent. Returns nothing when no
    /// literal was cut; the uncut clause is always admitted separately, so
    /// the cascade only adds instances and never costs completeness.
    fn unit_cut(&self, lits: &Clause, parents: &[usize]) -> Option<(Clause, Vec<usize>, usize)> {
        let mut cur = lits.clone();
        let mut parents = parents.to_vec();
        let mut cuts = 0usize;
        'rescan: while !cur.is_empty() {
            for i in 0..cur.len() {
                for &u in &self.units {
                    if self.dead[u] {
                        continue;
                    }
                    let offset = clause_max_var(&cur).map_or(0, |v| v + 1);
                    let unit = shift_vars(&self.arena[u].lits, offset);
                    if !cur[i].complements(&unit[0]) {
                        continue;
                    }
                    let mut s = Subst::new();
                    if !unify_lits(&cur[i], &unit[0], &mut s) {
                        continue;
                    }
                    let rest = cur
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i)
                        .map(|(_, l)| l.clone());
                    cur = apply_clause(rest, &s);
                    parents.push(u);
                    cuts += 1;
                    continue 'rescan;
                }
            }
            break;
        }
        (cuts > 0).then_some((cur, parents, cuts))
    }
}

/// One resolution run under a derivation-depth limit. Term depth is capped
/// at `limit` past the deepest input term so self-feeding chains terminate.
pub(crate) fn refute(
    input: &[Clause],
    limit: usize,
    deadline: Option<Instant>,
) -> SearchOutcome {
    let mut search = Search {
        term_cap: limit + input.iter().map(|c| clause_depth(c)).max().unwrap_or(0),
        arena: Vec::new(),
        passive: BinaryHeap::new(),
        by_age: VecDeque::new(),
        picked: Vec::new(),
        dead: Vec::new(),
        seen: HashMap::new(),
        active: Vec::new(),
        units: Vec::new(),
        discarded: false,
    };

    for c in input {
        if let Some(e) = search.admit(c.clone(), 0, vec![], 0) {
            return SearchOutcome::Refutation(derivation_steps(&search.arena, e));
        }
    }

    let mut picks = 0usize;
    let mut ticks = 0usize;
    loop {
        let Some(id) = search.pick(picks) else { break };
        picks += 1;
        search.active.push(id);

        let mut results: Vec<(Clause, usize, Vec<usize>)> = Vec::new();
        for ai in 0..search.active.len() {
            let other = search.active[ai];
            if search.dead[other] || search.dead[id] {
                continue;
            }
            ticks += 1;
            if ticks % 64 == 0 {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return SearchOutcome::TimedOut;
                    }
                }
            }
            let depth = search.arena[id].depth.max(search.arena[other].depth) + 1;
            if depth > limit {
                search.discarded = true;
                continue;
            }
            let given = &search.arena[id].lits;
            let offset = clause_max_var(given).map_or(0, |v| v + 1);
            let shifted = shift_vars(&search.arena[other].lits, offset);
            for (i, li) in given.iter().enumerate() {
                for (j, mj) in shifted.iter().enumerate() {
                    if !li.complements(mj) {
                        continue;
                    }
                    let mut s = Subst::new();
                    if !unify_lits(li, mj, &mut s) {
                        continue;
                    }
                    let rest = given
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i)
                        .map(|(_, l)| l.clone())
                        .chain(
                            shifted
                                .iter()
                                .enumerate()
                                .filter(|&(k, _)| k != j)
                                .map(|(_, l)| l.clone()),
                        );
                    results.push((apply_clause(rest, &s), depth, vec![id, other]));
                }
            }
        }
        // Factoring keeps the calculus refutation-complete.
        let given = &search.arena[id].lits;
        let depth = search.arena[id].depth + 1;
        if depth <= limit {
            for i in 0..given.len() {
                for j in i + 1..given.len() {
                    if given[i].pos != given[j].pos || given[i].pred != given[j].pred {
                        continue;
                    }
                    let mut s = Subst::new();
                    if !unify_lits(&given[i], &given[j], &mut s) {
                        continue;
                    }
                    let rest = given
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, l)| l.clone());
                    results.push((apply_clause(rest, &s), depth, vec![id]));
                }
            }
        } else {
            search.discarded = true;
        }

        for (lits, depth, parents) in results {
            let cut = search.unit_cut(&lits, &parents);
            if let Some((clits, cparents, cuts)) = cut {
                if let Some(e) = search.admit(clits, depth, cparents, 1 + cuts) {
                    return SearchOutcome::Refutation(derivation_steps(&search.arena, e));
                }
            }
            if let Some(e) = search.admit(lits, depth, parents, 1) {
                return SearchOutcome::Refutation(derivation_steps(&search.arena, e));
            }
        }
    }

    if search.discarded {
        SearchOutcome::Exhausted
    } else {
        SearchOutcome::Saturated
    }
}

/// Count of inference steps in the derivation dag rooted at `goal`.
fn derivation_steps(arena: &[Stored], goal: usize) -> usize {
    let mut visited = HashSet::new();
    let mut stack = vec![goal];
    let mut steps = 0;
    while let Some(id) = stack.pop() {
        if !visited.insert(id) {
            continue;
        }
        steps += arena[id].local_steps;
        stack.extend(&arena[id].parents);
    }
    steps
}
