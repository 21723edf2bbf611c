//! Recursive-descent parsers for both formula languages.
//!
//! Binary connectives appear only inside parentheses, so no precedence
//! climbing is needed. A signature drives name resolution: a bare
//! identifier is a constant exactly when declared as one, otherwise a team
//! variable. In inference mode, relation and function declarations are
//! collected from use instead; bare identifiers are always team variables
//! there.

use std::fmt::Display;

use super::lexer::{lex, ParseError, Token, TokenKind};
use super::{FoFormula, IlAtom, IlFormula, Signature, Term};

/// Words that cannot name variables, constants, functions, or relations.
const RESERVED: &[&str] = &["true", "false", "not", "exists", "forall", "indep", "dep"];

/// Name resolution policy for a parse.
pub enum SigMode<'a> {
    /// Every relation, function, and constant must be declared; arities are
    /// checked.
    Strict(&'a Signature),
    /// Declarations are inferred from use, extending the given signature.
    /// Inconsistent arities are an error.
    Infer(&'a mut Signature),
}

impl SigMode<'_> {
    fn is_constant(&self, name: &str) -> bool {
        match self {
            SigMode::Strict(s) => s.has_constant(name),
            SigMode::Infer(s) => s.has_constant(name),
        }
    }

    fn relation(&mut self, name: &str, arity: usize) -> Result<(), String> {
        match self {
            SigMode::Strict(s) => match s.relation_arity(name) {
                None => Err(format!("undeclared relation '{name}'")),
                Some(a) if a != arity => {
                    Err(format!("relation '{name}' has arity {a}, applied to {arity} arguments"))
                }
                Some(_) => Ok(()),
            },
            SigMode::Infer(s) => match s.relation_arity(name) {
                None => {
                    s.declare_relation(name, arity);
                    Ok(())
                }
                Some(a) if a != arity => {
                    Err(format!("relation '{name}' used with arities {a} and {arity}"))
                }
                Some(_) => Ok(()),
            },
        }
    }

    fn function(&mut self, name: &str, arity: usize) -> Result<(), String> {
        match self {
            SigMode::Strict(s) => match s.function_arity(name) {
                None => Err(format!("undeclared function '{name}'")),
                Some(a) if a != arity => {
                    Err(format!("function '{name}' has arity {a}, applied to {arity} arguments"))
                }
                Some(_) => Ok(()),
            },
            SigMode::Infer(s) => match s.function_arity(name) {
                None => {
                    s.declare_function(name, arity);
                    Ok(())
                }
                Some(a) if a != arity => {
                    Err(format!("function '{name}' used with arities {a} and {arity}"))
                }
                Some(_) => Ok(()),
            },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lang {
    Fo,
    Il,
}

/// Token cursor shared by the formula parsers and the file-format parsers.
pub(crate) struct Parser<'t> {
    text: &'t str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'t> Parser<'t> {
    pub(crate) fn new(text: &'t str) -> Result<Self, ParseError> {
        Ok(Parser {
            text,
            toks: lex(text)?,
            pos: 0,
        })
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn peek(&self) -> Option<&TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn peek2(&self) -> Option<&TokenKind> {
        self.toks.get(self.pos + 1).map(|t| &t.kind)
    }

    pub(crate) fn error(&self, msg: impl Display) -> ParseError {
        let pos = self
            .toks
            .get(self.pos)
            .map(|t| t.pos)
            .unwrap_or(self.text.len());
        ParseError::at(self.text, pos, msg.to_string())
    }

    pub(crate) fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, kind: &TokenKind) -> Result<(), ParseError> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {kind}, found {}",
                self.peek().map(|k| k.to_string()).unwrap_or_else(|| "end of input".into())
            )))
        }
    }

    /// Consume the given keyword identifier if present.
    pub(crate) fn eat_keyword(&mut self, word: &str) -> bool {
        if let Some(TokenKind::Ident(s)) = self.peek() {
            if s == word {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    pub(crate) fn expect_keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.eat_keyword(word) {
            Ok(())
        } else {
            Err(self.error(format!(
                "expected '{word}', found {}",
                self.peek().map(|k| k.to_string()).unwrap_or_else(|| "end of input".into())
            )))
        }
    }

    pub(crate) fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    pub(crate) fn expect_string(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(TokenKind::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected a quoted string")),
        }
    }

    pub(crate) fn expect_usize(&mut self) -> Result<usize, ParseError> {
        let err = self.error("expected a number");
        match self.peek() {
            Some(TokenKind::Ident(s)) if s.bytes().all(|b| b.is_ascii_digit()) => {
                let n = s.parse().map_err(|_| err)?;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(err),
        }
    }

    pub(crate) fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    /// `rel NAME/ARITY | fun NAME/ARITY | const NAME`, separated by optional
    /// commas or semicolons, until an unrecognized token or end of input.
    pub(crate) fn parse_sig_decls(&mut self, sig: &mut Signature) -> Result<(), ParseError> {
        loop {
            if self.eat(&TokenKind::Comma) || self.eat(&TokenKind::Semi) {
                continue;
            }
            if self.eat_keyword("rel") {
                let name = self.checked_name()?;
                self.expect(&TokenKind::Slash)?;
                let arity = self.expect_usize()?;
                if let Some(a) = sig.relation_arity(&name) {
                    if a != arity {
                        return Err(self.error(format!(
                            "relation '{name}' declared with arities {a} and {arity}"
                        )));
                    }
                }
                sig.declare_relation(&name, arity);
            } else if self.eat_keyword("fun") {
                let name = self.checked_name()?;
                self.expect(&TokenKind::Slash)?;
                let arity = self.expect_usize()?;
                if let Some(a) = sig.function_arity(&name) {
                    if a != arity {
                        return Err(self.error(format!(
                            "function '{name}' declared with arities {a} and {arity}"
                        )));
                    }
                }
                sig.declare_function(&name, arity);
            } else if self.eat_keyword("const") {
                let name = self.checked_name()?;
                sig.declare_constant(&name);
            } else {
                return Ok(());
            }
        }
    }

    /// Optional `sig { ... }` block.
    pub(crate) fn parse_sig_block(&mut self, sig: &mut Signature) -> Result<bool, ParseError> {
        if !self.eat_keyword("sig") {
            return Ok(false);
        }
        self.expect(&TokenKind::LBrace)?;
        self.parse_sig_decls(sig)?;
        self.expect(&TokenKind::RBrace)?;
        Ok(true)
    }

    fn checked_name(&mut self) -> Result<String, ParseError> {
        let name = self.expect_ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(self.error(format!("'{name}' is a reserved word")));
        }
        Ok(name)
    }

    // ----- terms -----

    fn parse_term(&mut self, env: &mut SigMode, lang: Lang) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(TokenKind::Param(p)) => {
                if lang == Lang::Il {
                    return Err(self.error(format!(
                        "parameter variable '${p}' cannot occur in an independence-logic formula"
                    )));
                }
                self.pos += 1;
                Ok(Term::ParamVar(p))
            }
            Some(TokenKind::Ident(name)) => {
                if RESERVED.contains(&name.as_str()) {
                    return Err(self.error(format!("'{name}' is a reserved word")));
                }
                self.pos += 1;
                if self.peek() == Some(&TokenKind::LParen) {
                    self.pos += 1;
                    let args = self.parse_term_list(env, lang, &TokenKind::RParen)?;
                    self.expect(&TokenKind::RParen)?;
                    if let Err(msg) = env.function(&name, args.len()) {
                        return Err(self.error(msg));
                    }
                    Ok(Term::App(name, args))
                } else if env.is_constant(&name) {
                    Ok(Term::Const(name))
                } else {
                    Ok(Term::TeamVar(name))
                }
            }
            _ => Err(self.error("expected a term")),
        }
    }

    /// Comma-separated terms, possibly empty, stopping before `stop`, `;`,
    /// or `)`.
    fn parse_term_list(
        &mut self,
        env: &mut SigMode,
        lang: Lang,
        stop: &TokenKind,
    ) -> Result<Vec<Term>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == Some(stop) || self.peek() == Some(&TokenKind::Semi) {
            return Ok(out);
        }
        loop {
            out.push(self.parse_term(env, lang)?);
            if !self.eat(&TokenKind::Comma) {
                return Ok(out);
            }
        }
    }

    /// A name followed by an argument list, resolved by what comes after:
    /// an equality sign makes it a function application, anything else a
    /// relation atom.
    fn parse_applied_or_term(
        &mut self,
        env: &mut SigMode,
        lang: Lang,
    ) -> Result<AppliedOrTerm, ParseError> {
        if let (Some(TokenKind::Ident(name)), Some(TokenKind::LParen)) = (self.peek(), self.peek2())
        {
            let name = name.clone();
            if RESERVED.contains(&name.as_str()) {
                return Err(self.error(format!("'{name}' is a reserved word")));
            }
            self.pos += 2;
            let args = self.parse_term_list(env, lang, &TokenKind::RParen)?;
            self.expect(&TokenKind::RParen)?;
            if matches!(self.peek(), Some(TokenKind::Eq) | Some(TokenKind::Neq)) {
                if let Err(msg) = env.function(&name, args.len()) {
                    return Err(self.error(msg));
                }
                Ok(AppliedOrTerm::Term(Term::App(name, args)))
            } else {
                if let Err(msg) = env.relation(&name, args.len()) {
                    return Err(self.error(msg));
                }
                Ok(AppliedOrTerm::Rel(name, args))
            }
        } else {
            Ok(AppliedOrTerm::Term(self.parse_term(env, lang)?))
        }
    }

    fn parse_binder_var(&mut self, env: &SigMode) -> Result<String, ParseError> {
        if let Some(TokenKind::Param(p)) = self.peek() {
            return Err(self.error(format!("cannot bind parameter variable '${p}'")));
        }
        let v = self.checked_name()?;
        if env.is_constant(&v) {
            return Err(self.error(format!("cannot bind '{v}', which is a declared constant")));
        }
        Ok(v)
    }

    // ----- first-order formulas -----

    pub(crate) fn parse_fo_formula(&mut self, env: &mut SigMode) -> Result<FoFormula, ParseError> {
        match self.peek().cloned() {
            Some(TokenKind::Ident(w)) if w == "true" => {
                self.pos += 1;
                Ok(FoFormula::True)
            }
            Some(TokenKind::Ident(w)) if w == "false" => {
                self.pos += 1;
                Ok(FoFormula::False)
            }
            Some(TokenKind::Ident(w)) if w == "not" => {
                self.pos += 1;
                Ok(FoFormula::not(self.parse_fo_formula(env)?))
            }
            Some(TokenKind::Ident(w)) if w == "exists" || w == "forall" => {
                self.pos += 1;
                let v = self.parse_binder_var(env)?;
                self.expect(&TokenKind::Dot)?;
                let body = self.parse_fo_formula(env)?;
                Ok(if w == "exists" {
                    FoFormula::Exists(v, Box::new(body))
                } else {
                    FoFormula::Forall(v, Box::new(body))
                })
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let a = self.parse_fo_formula(env)?;
                let out = match self.peek() {
                    Some(TokenKind::Amp) => {
                        self.pos += 1;
                        FoFormula::and(a, self.parse_fo_formula(env)?)
                    }
                    Some(TokenKind::Pipe) => {
                        self.pos += 1;
                        FoFormula::or(a, self.parse_fo_formula(env)?)
                    }
                    Some(TokenKind::Arrow) => {
                        self.pos += 1;
                        FoFormula::implies(a, self.parse_fo_formula(env)?)
                    }
                    Some(TokenKind::Iff) => {
                        self.pos += 1;
                        FoFormula::iff(a, self.parse_fo_formula(env)?)
                    }
                    _ => a,
                };
                self.expect(&TokenKind::RParen)?;
                Ok(out)
            }
            Some(TokenKind::Ident(_)) | Some(TokenKind::Param(_)) => {
                match self.parse_applied_or_term(env, Lang::Fo)? {
                    AppliedOrTerm::Rel(name, args) => Ok(FoFormula::Rel(name, args)),
                    AppliedOrTerm::Term(t) => {
                        if self.eat(&TokenKind::Eq) {
                            let u = self.parse_term(env, Lang::Fo)?;
                            Ok(FoFormula::Equal(t, u))
                        } else if self.eat(&TokenKind::Neq) {
                            let u = self.parse_term(env, Lang::Fo)?;
                            Ok(FoFormula::not(FoFormula::Equal(t, u)))
                        } else {
                            Err(self.error("expected '=' or '!=' after a term"))
                        }
                    }
                }
            }
            _ => Err(self.error("expected a formula")),
        }
    }

    // ----- independence-logic formulas -----

    pub(crate) fn parse_il_formula(&mut self, env: &mut SigMode) -> Result<IlFormula, ParseError> {
        match self.peek().cloned() {
            Some(TokenKind::Ident(w)) if w == "exists" || w == "forall" => {
                self.pos += 1;
                let v = self.parse_binder_var(env)?;
                self.expect(&TokenKind::Dot)?;
                let body = self.parse_il_formula(env)?;
                Ok(if w == "exists" {
                    IlFormula::Exists(v, Box::new(body))
                } else {
                    IlFormula::Forall(v, Box::new(body))
                })
            }
            Some(TokenKind::Ident(w)) if w == "indep" => {
                self.pos += 1;
                self.expect(&TokenKind::LParen)?;
                let t1 = self.parse_term_list(env, Lang::Il, &TokenKind::RParen)?;
                self.expect(&TokenKind::Semi)?;
                let t2 = self.parse_term_list(env, Lang::Il, &TokenKind::RParen)?;
                self.expect(&TokenKind::Semi)?;
                let t3 = self.parse_term_list(env, Lang::Il, &TokenKind::RParen)?;
                self.expect(&TokenKind::RParen)?;
                Ok(IlFormula::Indep(t1, t2, t3))
            }
            Some(TokenKind::Ident(w)) if w == "dep" => {
                self.pos += 1;
                self.expect(&TokenKind::LParen)?;
                let ts = self.parse_term_list(env, Lang::Il, &TokenKind::RParen)?;
                self.expect(&TokenKind::RParen)?;
                Ok(IlFormula::Dep(ts))
            }
            Some(TokenKind::Ident(w)) if w == "true" || w == "false" || w == "not" => {
                Err(self.error(format!("'{w}' is not part of the team-logic grammar")))
            }
            Some(TokenKind::Tilde) => {
                self.pos += 1;
                match (self.peek().cloned(), self.peek2()) {
                    (Some(TokenKind::Ident(name)), Some(TokenKind::LParen)) => {
                        if RESERVED.contains(&name.as_str()) {
                            return Err(self.error(format!("'{name}' is a reserved word")));
                        }
                        self.pos += 2;
                        let args = self.parse_term_list(env, Lang::Il, &TokenKind::RParen)?;
                        self.expect(&TokenKind::RParen)?;
                        if let Err(msg) = env.relation(&name, args.len()) {
                            return Err(self.error(msg));
                        }
                        Ok(IlFormula::Literal(false, IlAtom::Rel(name, args)))
                    }
                    _ => Err(self.error("'~' applies only to a relation atom")),
                }
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let a = self.parse_il_formula(env)?;
                let out = match self.peek() {
                    Some(TokenKind::TensorOr) => {
                        self.pos += 1;
                        IlFormula::tensor_or(a, self.parse_il_formula(env)?)
                    }
                    Some(TokenKind::TensorAnd) => {
                        self.pos += 1;
                        IlFormula::and(a, self.parse_il_formula(env)?)
                    }
                    _ => a,
                };
                self.expect(&TokenKind::RParen)?;
                Ok(out)
            }
            Some(TokenKind::Ident(_)) => match self.parse_applied_or_term(env, Lang::Il)? {
                AppliedOrTerm::Rel(name, args) => Ok(IlFormula::Literal(true, IlAtom::Rel(name, args))),
                AppliedOrTerm::Term(t) => {
                    if self.eat(&TokenKind::Eq) {
                        let u = self.parse_term(env, Lang::Il)?;
                        Ok(IlFormula::Literal(true, IlAtom::Equal(t, u)))
                    } else if self.eat(&TokenKind::Neq) {
                        let u = self.parse_term(env, Lang::Il)?;
                        Ok(IlFormula::Literal(false, IlAtom::Equal(t, u)))
                    } else {
                        Err(self.error("expected '=' or '!=' after a term"))
                    }
                }
            },
            Some(TokenKind::Param(p)) => Err(self.error(format!(
                "parameter variable '${p}' cannot occur in an independence-logic formula"
            ))),
            _ => Err(self.error("expected a formula")),
        }
    }
}

enum AppliedOrTerm {
    Rel(String, Vec<Term>),
    Term(Term),
}

/// Parse a first-order formula; all symbols must be declared in `sig`.
pub fn parse_fo(text: &str, sig: &Signature) -> Result<FoFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.parse_fo_formula(&mut SigMode::Strict(sig))?;
    p.expect_end()?;
    Ok(f)
}

/// Parse a first-order formula, inferring undeclared relations and
/// functions into `sig`. Bare identifiers are team variables unless `sig`
/// already declares them as constants.
pub fn parse_fo_with(text: &str, sig: &mut Signature) -> Result<FoFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.parse_fo_formula(&mut SigMode::Infer(sig))?;
    p.expect_end()?;
    Ok(f)
}

/// Parse an independence-logic formula against a declared signature.
pub fn parse_il(text: &str, sig: &Signature) -> Result<IlFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.parse_il_formula(&mut SigMode::Strict(sig))?;
    p.expect_end()?;
    Ok(f)
}

/// Parse an independence-logic formula, inferring declarations into `sig`.
pub fn parse_il_with(text: &str, sig: &mut Signature) -> Result<IlFormula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.parse_il_formula(&mut SigMode::Infer(sig))?;
    p.expect_end()?;
    Ok(f)
}

/// Parse a comma-separated term tuple (possibly empty) against a signature.
pub fn parse_terms(text: &str, sig: &Signature) -> Result<Vec<Term>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut env = SigMode::Strict(sig);
    let mut out = Vec::new();
    if !p.at_end() {
        loop {
            out.push(p.parse_term(&mut env, Lang::Fo)?);
            if !p.eat(&TokenKind::Comma) {
                break;
            }
        }
    }
    p.expect_end()?;
    Ok(out)
}

/// Parse standalone signature declarations: `rel R/2 fun f/1 const c`.
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let mut p = Parser::new(text)?;
    let mut sig = Signature::new();
    p.parse_sig_decls(&mut sig)?;
    p.expect_end()?;
    Ok(sig)
}
