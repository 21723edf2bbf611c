//! Terms, formulas, signatures, and the operations that shuffle them around.
//!
//! Two formula languages share one term language:
//!
//! * [`FoFormula`] is ordinary first-order logic with full connectives, used
//!   for team definitions, sequent contexts, and prover queries.
//! * [`IlFormula`] is independence logic in negation normal form: literals,
//!   independence atoms, splitting disjunction, conjunction, and quantifiers.
//!
//! Variables come in two kinds. Team variables are bare identifiers and can
//!   be quantified; parameter variables are written `$p`, are valued by a
//! [`ParamAssignment`](crate::model::ParamAssignment), and never occur in an
//! `IlFormula` or in a team's domain.
//!
//! Concrete syntax is whitespace-insensitive; binary connectives are always
//! parenthesized, so printing and parsing round-trip exactly.

mod lexer;
mod parser;

pub use lexer::{lex, ParseError, Token, TokenKind};
pub use parser::{
    parse_fo, parse_fo_with, parse_il, parse_il_with, parse_signature, parse_terms, SigMode,
};
pub(crate) use parser::Parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Declared relation, function, and constant symbols.
///
/// Names must be unique within each category. A name may appear in more than
/// one category; occurrences are disambiguated by syntactic position (a name
/// applied in formula position is a relation, in term position a function,
/// and a bare identifier is a constant exactly when declared as one).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    relations: BTreeMap<String, usize>,
    functions: BTreeMap<String, usize>,
    constants: BTreeSet<String>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Self {
        self.relations.insert(name.to_string(), arity);
        self
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.functions.insert(name.to_string(), arity);
        self
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.constants.insert(name.to_string());
        self
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.constants.iter().map(|s| s.as_str())
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    pub fn declare_relation(&mut self, name: &str, arity: usize) {
        self.relations.insert(name.to_string(), arity);
    }

    pub fn declare_function(&mut self, name: &str, arity: usize) {
        self.functions.insert(name.to_string(), arity);
    }

    pub fn declare_constant(&mut self, name: &str) {
        self.constants.insert(name.to_string());
    }

    /// Union of two signatures; arities of the left operand win on clashes.
    pub fn merged(&self, other: &Signature) -> Signature {
        let mut out = other.clone();
        for (n, a) in &self.relations {
            out.relations.insert(n.clone(), *a);
        }
        for (n, a) in &self.functions {
            out.functions.insert(n.clone(), *a);
        }
        for n in &self.constants {
            out.constants.insert(n.clone());
        }
        out
    }
}

/// First-order terms over both variable kinds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Bare identifier not declared as a constant.
    TeamVar(String),
    /// `$name`, valued by a parameter assignment.
    ParamVar(String),
    /// Declared constant symbol.
    Const(String),
    /// Function application `f(t, ...)`.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::TeamVar(name.to_string())
    }

    pub fn param(name: &str) -> Term {
        Term::ParamVar(name.to_string())
    }

    fn collect_vars(&self, team: &mut BTreeSet<String>, param: &mut BTreeSet<String>) {
        match self {
            Term::TeamVar(v) => {
                team.insert(v.clone());
            }
            Term::ParamVar(p) => {
                param.insert(p.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(team, param);
                }
            }
        }
    }

    pub fn team_vars(&self) -> BTreeSet<String> {
        let (mut t, mut p) = (BTreeSet::new(), BTreeSet::new());
        self.collect_vars(&mut t, &mut p);
        p.clear();
        t
    }

    pub fn param_vars(&self) -> BTreeSet<String> {
        let (mut t, mut p) = (BTreeSet::new(), BTreeSet::new());
        self.collect_vars(&mut t, &mut p);
        p
    }
}

/// Free team variables of a term tuple.
pub fn terms_team_vars(terms: &[Term]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for t in terms {
        out.extend(t.team_vars());
    }
    out
}

/// Free parameter variables of a term tuple.
pub fn terms_param_vars(terms: &[Term]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for t in terms {
        out.extend(t.param_vars());
    }
    out
}

/// First-order formulas. Quantifiers bind team variables only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoFormula {
    True,
    False,
    Rel(String, Vec<Term>),
    Equal(Term, Term),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Iff(Box<FoFormula>, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
}

/// Atoms shared by positive and negative independence-logic literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IlAtom {
    Rel(String, Vec<Term>),
    Equal(Term, Term),
}

/// Independence-logic formulas in negation normal form.
///
/// `Dep` is surface sugar: `dep(t1, ..., tn)` abbreviates the independence
/// atom `indep(t1, ..., t(n-1) ; tn ; tn)`. Evaluators require formulas with
/// the sugar already expanded by [`desugar_dep`].
///
/// No parameter variable occurs anywhere in a well-formed `IlFormula`; the
/// parsers enforce this.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IlFormula {
    /// Positive or negated atom. Negation exists only at this level.
    Literal(bool, IlAtom),
    /// `indep(t⃗1 ; t⃗2 ; t⃗3)`: within each t⃗1-class, every t⃗2-value
    /// combines with every t⃗3-value.
    Indep(Vec<Term>, Vec<Term>, Vec<Term>),
    /// Functional dependence sugar, kept until desugaring.
    Dep(Vec<Term>),
    /// Splitting disjunction: the team is covered by two subteams.
    TensorOr(Box<IlFormula>, Box<IlFormula>),
    And(Box<IlFormula>, Box<IlFormula>),
    Exists(String, Box<IlFormula>),
    Forall(String, Box<IlFormula>),
}

impl FoFormula {
    pub fn not(f: FoFormula) -> FoFormula {
        FoFormula::Not(Box::new(f))
    }

    pub fn and(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, f: FoFormula) -> FoFormula {
        FoFormula::Exists(v.to_string(), Box::new(f))
    }

    pub fn forall(v: &str, f: FoFormula) -> FoFormula {
        FoFormula::Forall(v.to_string(), Box::new(f))
    }

    /// Conjunction of a sequence, `True` when empty.
    pub fn conj<I: IntoIterator<Item = FoFormula>>(parts: I) -> FoFormula {
        let mut iter = parts.into_iter();
        let first = match iter.next() {
            None => return FoFormula::True,
            Some(f) => f,
        };
        iter.fold(first, FoFormula::and)
    }

    /// Disjunction of a sequence, `False` when empty.
    pub fn disj<I: IntoIterator<Item = FoFormula>>(parts: I) -> FoFormula {
        let mut iter = parts.into_iter();
        let first = match iter.next() {
            None => return FoFormula::False,
            Some(f) => f,
        };
        iter.fold(first, FoFormula::or)
    }

    /// `forall v1. ... forall vk. f` over the given prefix order.
    pub fn forall_many(vars: &[String], f: FoFormula) -> FoFormula {
        vars.iter()
            .rev()
            .fold(f, |acc, v| FoFormula::Forall(v.clone(), Box::new(acc)))
    }

    /// `exists v1. ... exists vk. f` over the given prefix order.
    pub fn exists_many(vars: &[String], f: FoFormula) -> FoFormula {
        vars.iter()
            .rev()
            .fold(f, |acc, v| FoFormula::Exists(v.clone(), Box::new(acc)))
    }

    fn collect_free(
        &self,
        bound: &mut Vec<String>,
        team: &mut BTreeSet<String>,
        param: &mut BTreeSet<String>,
    ) {
        let term = |t: &Term, bound: &Vec<String>, team: &mut BTreeSet<String>, param: &mut BTreeSet<String>| {
            let (mut tv, mut pv) = (BTreeSet::new(), BTreeSet::new());
            t.collect_vars(&mut tv, &mut pv);
            for v in tv {
                if !bound.contains(&v) {
                    team.insert(v);
                }
            }
            param.extend(pv);
        };
        match self {
            FoFormula::True | FoFormula::False => {}
            FoFormula::Rel(_, args) => {
                for a in args {
                    term(a, bound, team, param);
                }
            }
            FoFormula::Equal(a, b) => {
                term(a, bound, team, param);
                term(b, bound, team, param);
            }
            FoFormula::Not(f) => f.collect_free(bound, team, param),
            FoFormula::And(a, b)
            | FoFormula::Or(a, b)
            | FoFormula::Implies(a, b)
            | FoFormula::Iff(a, b) => {
                a.collect_free(bound, team, param);
                b.collect_free(bound, team, param);
            }
            FoFormula::Exists(v, f) | FoFormula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, team, param);
                bound.pop();
            }
        }
    }

    pub fn free_team_vars(&self) -> BTreeSet<String> {
        let (mut t, mut p) = (BTreeSet::new(), BTreeSet::new());
        self.collect_free(&mut Vec::new(), &mut t, &mut p);
        p.clear();
        t
    }

    pub fn free_param_vars(&self) -> BTreeSet<String> {
        let (mut t, mut p) = (BTreeSet::new(), BTreeSet::new());
        self.collect_free(&mut Vec::new(), &mut t, &mut p);
        p
    }

    /// Relation, function, and constant symbols occurring in the formula.
    pub fn used_signature(&self) -> Signature {
        let mut sig = Signature::new();
        self.collect_signature(&mut sig);
        sig
    }

    pub(crate) fn collect_signature(&self, sig: &mut Signature) {
        fn term(t: &Term, sig: &mut Signature) {
            match t {
                Term::TeamVar(_) | Term::ParamVar(_) => {}
                Term::Const(c) => sig.declare_constant(c),
                Term::App(f, args) => {
                    sig.declare_function(f, args.len());
                    for a in args {
                        term(a, sig);
                    }
                }
            }
        }
        match self {
            FoFormula::True | FoFormula::False => {}
            FoFormula::Rel(r, args) => {
                sig.declare_relation(r, args.len());
                for a in args {
                    term(a, sig);
                }
            }
            FoFormula::Equal(a, b) => {
                term(a, sig);
                term(b, sig);
            }
            FoFormula::Not(f) => f.collect_signature(sig),
            FoFormula::And(a, b)
            | FoFormula::Or(a, b)
            | FoFormula::Implies(a, b)
            | FoFormula::Iff(a, b) => {
                a.collect_signature(sig);
                b.collect_signature(sig);
            }
            FoFormula::Exists(_, f) | FoFormula::Forall(_, f) => f.collect_signature(sig),
        }
    }

    /// Relation symbols occurring anywhere in the formula.
    pub fn relation_symbols(&self) -> BTreeSet<String> {
        self.used_signature()
            .relations()
            .map(|(n, _)| n.to_string())
            .collect()
    }

    /// Number of formula nodes; terms do not count.
    pub fn size(&self) -> usize {
        match self {
            FoFormula::True | FoFormula::False | FoFormula::Rel(..) | FoFormula::Equal(..) => 1,
            FoFormula::Not(f) => 1 + f.size(),
            FoFormula::And(a, b)
            | FoFormula::Or(a, b)
            | FoFormula::Implies(a, b)
            | FoFormula::Iff(a, b) => 1 + a.size() + b.size(),
            FoFormula::Exists(_, f) | FoFormula::Forall(_, f) => 1 + f.size(),
        }
    }
}

impl IlFormula {
    pub fn literal(positive: bool, atom: IlAtom) -> IlFormula {
        IlFormula::Literal(positive, atom)
    }

    pub fn tensor_or(a: IlFormula, b: IlFormula) -> IlFormula {
        IlFormula::TensorOr(Box::new(a), Box::new(b))
    }

    pub fn and(a: IlFormula, b: IlFormula) -> IlFormula {
        IlFormula::And(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, f: IlFormula) -> IlFormula {
        IlFormula::Exists(v.to_string(), Box::new(f))
    }

    pub fn forall(v: &str, f: IlFormula) -> IlFormula {
        IlFormula::Forall(v.to_string(), Box::new(f))
    }

    fn collect_free(&self, bound: &mut Vec<String>, team: &mut BTreeSet<String>) {
        let tuple = |ts: &[Term], bound: &Vec<String>, team: &mut BTreeSet<String>| {
            for v in terms_team_vars(ts) {
                if !bound.contains(&v) {
                    team.insert(v);
                }
            }
        };
        match self {
            IlFormula::Literal(_, IlAtom::Rel(_, args)) => tuple(args, bound, team),
            IlFormula::Literal(_, IlAtom::Equal(a, b)) => {
                tuple(std::slice::from_ref(a), bound, team);
                tuple(std::slice::from_ref(b), bound, team);
            }
            IlFormula::Indep(t1, t2, t3) => {
                tuple(t1, bound, team);
                tuple(t2, bound, team);
                tuple(t3, bound, team);
            }
            IlFormula::Dep(ts) => tuple(ts, bound, team),
            IlFormula::TensorOr(a, b) | IlFormula::And(a, b) => {
                a.collect_free(bound, team);
                b.collect_free(bound, team);
            }
            IlFormula::Exists(v, f) | IlFormula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, team);
                bound.pop();
            }
        }
    }

    pub fn free_team_vars(&self) -> BTreeSet<String> {
        let mut t = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut t);
        t
    }

    /// Always empty for formulas built by the parsers; present for symmetry.
    pub fn free_param_vars(&self) -> BTreeSet<String> {
        fn walk(f: &IlFormula, out: &mut BTreeSet<String>) {
            match f {
                IlFormula::Literal(_, IlAtom::Rel(_, args)) => out.extend(terms_param_vars(args)),
                IlFormula::Literal(_, IlAtom::Equal(a, b)) => {
                    out.extend(a.param_vars());
                    out.extend(b.param_vars());
                }
                IlFormula::Indep(t1, t2, t3) => {
                    out.extend(terms_param_vars(t1));
                    out.extend(terms_param_vars(t2));
                    out.extend(terms_param_vars(t3));
                }
                IlFormula::Dep(ts) => out.extend(terms_param_vars(ts)),
                IlFormula::TensorOr(a, b) | IlFormula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                IlFormula::Exists(_, f) | IlFormula::Forall(_, f) => walk(f, out),
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    /// Every team variable mentioned anywhere, free or bound.
    pub fn all_team_vars(&self) -> BTreeSet<String> {
        fn terms(ts: &[Term], out: &mut BTreeSet<String>) {
            for t in ts {
                out.extend(t.team_vars());
            }
        }
        fn walk(f: &IlFormula, out: &mut BTreeSet<String>) {
            match f {
                IlFormula::Literal(_, IlAtom::Rel(_, args)) => terms(args, out),
                IlFormula::Literal(_, IlAtom::Equal(a, b)) => {
                    out.extend(a.team_vars());
                    out.extend(b.team_vars());
                }
                IlFormula::Indep(t1, t2, t3) => {
                    terms(t1, out);
                    terms(t2, out);
                    terms(t3, out);
                }
                IlFormula::Dep(ts) => terms(ts, out),
                IlFormula::TensorOr(a, b) | IlFormula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                IlFormula::Exists(v, f) | IlFormula::Forall(v, f) => {
                    out.insert(v.clone());
                    walk(f, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    /// Number of formula nodes; terms do not count.
    pub fn size(&self) -> usize {
        match self {
            IlFormula::Literal(..) | IlFormula::Indep(..) | IlFormula::Dep(..) => 1,
            IlFormula::TensorOr(a, b) | IlFormula::And(a, b) => 1 + a.size() + b.size(),
            IlFormula::Exists(_, f) | IlFormula::Forall(_, f) => 1 + f.size(),
        }
    }

    /// True when no `Dep` node remains.
    pub fn is_desugared(&self) -> bool {
        match self {
            IlFormula::Dep(_) => false,
            IlFormula::Literal(..) | IlFormula::Indep(..) => true,
            IlFormula::TensorOr(a, b) | IlFormula::And(a, b) => {
                a.is_desugared() && b.is_desugared()
            }
            IlFormula::Exists(_, f) | IlFormula::Forall(_, f) => f.is_desugared(),
        }
    }

    /// True when the formula is literal-and-connective only, with no
    /// independence or dependence atom anywhere.
    pub fn is_fo_fragment(&self) -> bool {
        match self {
            IlFormula::Literal(..) => true,
            IlFormula::Indep(..) | IlFormula::Dep(..) => false,
            IlFormula::TensorOr(a, b) | IlFormula::And(a, b) => {
                a.is_fo_fragment() && b.is_fo_fragment()
            }
            IlFormula::Exists(_, f) | IlFormula::Forall(_, f) => f.is_fo_fragment(),
        }
    }

    /// Relation/function/constant symbols occurring in the formula.
    pub fn used_signature(&self) -> Signature {
        fn term(t: &Term, sig: &mut Signature) {
            match t {
                Term::TeamVar(_) | Term::ParamVar(_) => {}
                Term::Const(c) => sig.declare_constant(c),
                Term::App(f, args) => {
                    sig.declare_function(f, args.len());
                    for a in args {
                        term(a, sig);
                    }
                }
            }
        }
        fn walk(f: &IlFormula, sig: &mut Signature) {
            match f {
                IlFormula::Literal(_, IlAtom::Rel(r, args)) => {
                    sig.declare_relation(r, args.len());
                    for a in args {
                        term(a, sig);
                    }
                }
                IlFormula::Literal(_, IlAtom::Equal(a, b)) => {
                    term(a, sig);
                    term(b, sig);
                }
                IlFormula::Indep(t1, t2, t3) => {
                    for t in t1.iter().chain(t2).chain(t3) {
                        term(t, sig);
                    }
                }
                IlFormula::Dep(ts) => {
                    for t in ts {
                        term(t, sig);
                    }
                }
                IlFormula::TensorOr(a, b) | IlFormula::And(a, b) => {
                    walk(a, sig);
                    walk(b, sig);
                }
                IlFormula::Exists(_, f) | IlFormula::Forall(_, f) => walk(f, sig),
            }
        }
        let mut sig = Signature::new();
        walk(self, &mut sig);
        sig
    }

    pub fn relation_symbols(&self) -> BTreeSet<String> {
        self.used_signature()
            .relations()
            .map(|(n, _)| n.to_string())
            .collect()
    }
}

/// Both free-variable sets of a first-order formula: (team, parameter).
pub fn free_vars_fo(f: &FoFormula) -> (BTreeSet<String>, BTreeSet<String>) {
    (f.free_team_vars(), f.free_param_vars())
}

/// Both free-variable sets of an independence-logic formula.
pub fn free_vars_il(f: &IlFormula) -> (BTreeSet<String>, BTreeSet<String>) {
    (f.free_team_vars(), f.free_param_vars())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenameError {
    #[error("renaming {var} to {target} would capture it under a binder")]
    Capture { var: String, target: String },
    #[error("renaming is not injective on free variables: {a} and {b} both map to {target}")]
    NonInjective { a: String, b: String, target: String },
}

fn check_injective(free: &BTreeSet<String>, map: &BTreeMap<String, String>) -> Result<(), RenameError> {
    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    for v in free {
        let target = map.get(v).cloned().unwrap_or_else(|| v.clone());
        if let Some(prev) = seen.get(&target) {
            return Err(RenameError::NonInjective {
                a: prev.clone(),
                b: v.clone(),
                target,
            });
        }
        seen.insert(target, v.clone());
    }
    Ok(())
}

fn rename_term(t: &Term, map: &BTreeMap<String, String>, bound: &[String]) -> Result<Term, RenameError> {
    Ok(match t {
        Term::TeamVar(v) => {
            if bound.contains(v) {
                Term::TeamVar(v.clone())
            } else {
                let target = map.get(v).cloned().unwrap_or_else(|| v.clone());
                if bound.contains(&target) {
                    return Err(RenameError::Capture {
                        var: v.clone(),
                        target,
                    });
                }
                Term::TeamVar(target)
            }
        }
        Term::ParamVar(p) => Term::ParamVar(p.clone()),
        Term::Const(c) => Term::Const(c.clone()),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| rename_term(a, map, bound))
                .collect::<Result<_, _>>()?,
        ),
    })
}

/// Simultaneous renaming of free team variables in a first-order formula.
///
/// The mapping must be injective on the formula's free team variables
/// (identity on unmapped ones included) and no target may be captured by a
/// binder it passes under.
pub fn rename_fo(f: &FoFormula, map: &BTreeMap<String, String>) -> Result<FoFormula, RenameError> {
    check_injective(&f.free_team_vars(), map)?;
    fn walk(
        f: &FoFormula,
        map: &BTreeMap<String, String>,
        bound: &mut Vec<String>,
    ) -> Result<FoFormula, RenameError> {
        Ok(match f {
            FoFormula::True => FoFormula::True,
            FoFormula::False => FoFormula::False,
            FoFormula::Rel(r, args) => FoFormula::Rel(
                r.clone(),
                args.iter()
                    .map(|a| rename_term(a, map, bound))
                    .collect::<Result<_, _>>()?,
            ),
            FoFormula::Equal(a, b) => {
                FoFormula::Equal(rename_term(a, map, bound)?, rename_term(b, map, bound)?)
            }
            FoFormula::Not(g) => FoFormula::Not(Box::new(walk(g, map, bound)?)),
            FoFormula::And(a, b) => {
                FoFormula::And(Box::new(walk(a, map, bound)?), Box::new(walk(b, map, bound)?))
            }
            FoFormula::Or(a, b) => {
                FoFormula::Or(Box::new(walk(a, map, bound)?), Box::new(walk(b, map, bound)?))
            }
            FoFormula::Implies(a, b) => FoFormula::Implies(
                Box::new(walk(a, map, bound)?),
                Box::new(walk(b, map, bound)?),
            ),
            FoFormula::Iff(a, b) => {
                FoFormula::Iff(Box::new(walk(a, map, bound)?), Box::new(walk(b, map, bound)?))
            }
            FoFormula::Exists(v, g) => {
                bound.push(v.clone());
                let out = walk(g, map, bound)?;
                bound.pop();
                FoFormula::Exists(v.clone(), Box::new(out))
            }
            FoFormula::Forall(v, g) => {
                bound.push(v.clone());
                let out = walk(g, map, bound)?;
                bound.pop();
                FoFormula::Forall(v.clone(), Box::new(out))
            }
        })
    }
    walk(f, map, &mut Vec::new())
}

/// Simultaneous renaming of team variables in a term tuple.
pub fn rename_terms(ts: &[Term], map: &BTreeMap<String, String>) -> Result<Vec<Term>, RenameError> {
    check_injective(&terms_team_vars(ts), map)?;
    ts.iter().map(|t| rename_term(t, map, &[])).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesugarError {
    #[error("dep() with zero terms has no expansion")]
    EmptyDep,
}

/// Expand every `dep(t1, ..., tn)` into `indep(t1, ..., t(n-1) ; tn ; tn)`.
pub fn desugar_dep(f: &IlFormula) -> Result<IlFormula, DesugarError> {
    Ok(match f {
        IlFormula::Literal(..) | IlFormula::Indep(..) => f.clone(),
        IlFormula::Dep(ts) => {
            let (last, init) = ts.split_last().ok_or(DesugarError::EmptyDep)?;
            IlFormula::Indep(init.to_vec(), vec![last.clone()], vec![last.clone()])
        }
        IlFormula::TensorOr(a, b) => IlFormula::tensor_or(desugar_dep(a)?, desugar_dep(b)?),
        IlFormula::And(a, b) => IlFormula::and(desugar_dep(a)?, desugar_dep(b)?),
        IlFormula::Exists(v, g) => IlFormula::Exists(v.clone(), Box::new(desugar_dep(g)?)),
        IlFormula::Forall(v, g) => IlFormula::Forall(v.clone(), Box::new(desugar_dep(g)?)),
    })
}

/// View of the first-order fragment of independence logic as `FoFormula`.
///
/// Fails on independence and dependence atoms.
pub fn fo_of_il(f: &IlFormula) -> Option<FoFormula> {
    Some(match f {
        IlFormula::Literal(pos, atom) => {
            let base = match atom {
                IlAtom::Rel(r, args) => FoFormula::Rel(r.clone(), args.clone()),
                IlAtom::Equal(a, b) => FoFormula::Equal(a.clone(), b.clone()),
            };
            if *pos {
                base
            } else {
                FoFormula::not(base)
            }
        }
        IlFormula::Indep(..) | IlFormula::Dep(..) => return None,
        IlFormula::TensorOr(a, b) => FoFormula::or(fo_of_il(a)?, fo_of_il(b)?),
        IlFormula::And(a, b) => FoFormula::and(fo_of_il(a)?, fo_of_il(b)?),
        IlFormula::Exists(v, g) => FoFormula::Exists(v.clone(), Box::new(fo_of_il(g)?)),
        IlFormula::Forall(v, g) => FoFormula::Forall(v.clone(), Box::new(fo_of_il(g)?)),
    })
}

/// Warnings for degenerate independence atoms: an empty second or third
/// tuple makes the atom trivially true.
pub fn empty_tuple_warnings(f: &IlFormula) -> Vec<String> {
    fn walk(f: &IlFormula, out: &mut Vec<String>) {
        match f {
            IlFormula::Indep(_, t2, t3) => {
                if t2.is_empty() || t3.is_empty() {
                    out.push(format!("independence atom {f} has an empty witness tuple"));
                }
            }
            IlFormula::TensorOr(a, b) | IlFormula::And(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            IlFormula::Exists(_, g) | IlFormula::Forall(_, g) => walk(g, out),
            IlFormula::Literal(..) | IlFormula::Dep(..) => {}
        }
    }
    let mut out = Vec::new();
    walk(f, &mut out);
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::TeamVar(v) => write!(f, "{v}"),
            Term::ParamVar(p) => write!(f, "${p}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn fmt_terms(f: &mut fmt::Formatter<'_>, ts: &[Term]) -> fmt::Result {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoFormula::True => write!(f, "true"),
            FoFormula::False => write!(f, "false"),
            FoFormula::Rel(r, args) => {
                write!(f, "{r}(")?;
                fmt_terms(f, args)?;
                write!(f, ")")
            }
            FoFormula::Equal(a, b) => write!(f, "{a} = {b}"),
            // `not t1 = t2` prints as the sugar form so output re-parses.
            FoFormula::Not(inner) => match inner.as_ref() {
                FoFormula::Equal(a, b) => write!(f, "{a} != {b}"),
                _ => write!(f, "not {inner}"),
            },
            FoFormula::And(a, b) => write!(f, "({a} & {b})"),
            FoFormula::Or(a, b) => write!(f, "({a} | {b})"),
            FoFormula::Implies(a, b) => write!(f, "({a} -> {b})"),
            FoFormula::Iff(a, b) => write!(f, "({a} <-> {b})"),
            FoFormula::Exists(v, g) => write!(f, "exists {v}. {g}"),
            FoFormula::Forall(v, g) => write!(f, "forall {v}. {g}"),
        }
    }
}

impl fmt::Display for IlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IlFormula::Literal(true, IlAtom::Rel(r, args)) => {
                write!(f, "{r}(")?;
                fmt_terms(f, args)?;
                write!(f, ")")
            }
            IlFormula::Literal(false, IlAtom::Rel(r, args)) => {
                write!(f, "~{r}(")?;
                fmt_terms(f, args)?;
                write!(f, ")")
            }
            IlFormula::Literal(true, IlAtom::Equal(a, b)) => write!(f, "{a} = {b}"),
            IlFormula::Literal(false, IlAtom::Equal(a, b)) => write!(f, "{a} != {b}"),
            IlFormula::Indep(t1, t2, t3) => {
                write!(f, "indep(")?;
                fmt_terms(f, t1)?;
                write!(f, " ; ")?;
                fmt_terms(f, t2)?;
                write!(f, " ; ")?;
                fmt_terms(f, t3)?;
                write!(f, ")")
            }
            IlFormula::Dep(ts) => {
                write!(f, "dep(")?;
                fmt_terms(f, ts)?;
                write!(f, ")")
            }
            IlFormula::TensorOr(a, b) => write!(f, "({a} \\/ {b})"),
            IlFormula::And(a, b) => write!(f, "({a} /\\ {b})"),
            IlFormula::Exists(v, g) => write!(f, "exists {v}. {g}"),
            IlFormula::Forall(v, g) => write!(f, "forall {v}. {g}"),
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let sep = |f: &mut fmt::Formatter<'_>, first: &mut bool| -> fmt::Result {
            if !*first {
                write!(f, " ")?;
            }
            *first = false;
            Ok(())
        };
        for (n, a) in &self.relations {
            sep(f, &mut first)?;
            write!(f, "rel {n}/{a}")?;
        }
        for (n, a) in &self.functions {
            sep(f, &mut first)?;
            write!(f, "fun {n}/{a}")?;
        }
        for n in &self.constants {
            sep(f, &mut first)?;
            write!(f, "const {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
