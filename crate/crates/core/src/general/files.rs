//! Text formats for team families and relation-existence theories.
//!
//! ```text
//! family F {
//!   team X over (x) { (0), (1) }
//!   team E over (x) { }
//! }
//!
//! theta {
//!   exists R/1 : forall x. (R(x) | not R(x))
//!   exists R/1, S/2 : exists x. (R(x) & S(x, x))
//! }
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::model::{parse_team_block, print_team, Structure, Team};
use crate::syntax::{ParseError, Parser, SigMode, Signature, TokenKind};

use super::{Theta, ThetaSentence};

/// Parse a `family NAME { team ... }` file against a structure. Member
/// names are for the reader only; duplicates collapse.
pub fn parse_family(text: &str, m: &Structure) -> Result<(String, BTreeSet<Team>), ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_keyword("family")?;
    let name = p.expect_ident()?;
    p.expect(&TokenKind::LBrace)?;
    let mut teams = BTreeSet::new();
    while !p.eat(&TokenKind::RBrace) {
        let (_, team) = parse_team_block(&mut p, m)?;
        teams.insert(team);
    }
    p.expect_end()?;
    Ok((name, teams))
}

/// Render a family in the `family` file format, members in sorted order.
pub fn print_family(name: &str, m: &Structure, teams: &BTreeSet<Team>) -> String {
    let mut out = format!("family {name} {{\n");
    for (i, t) in teams.iter().enumerate() {
        for line in print_team(&format!("T{i}"), m, t).lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
    out.push_str("}\n");
    out
}

/// Parse a `theta { exists R/1, S/2 : <formula> ... }` file. Bodies are
/// read against the given signature extended with the sentence's relation
/// variables, which must not clash with declared relation symbols.
pub fn parse_theta(text: &str, sig: &Signature) -> Result<Theta, ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_keyword("theta")?;
    p.expect(&TokenKind::LBrace)?;
    let mut sentences = Vec::new();
    while !p.eat(&TokenKind::RBrace) {
        p.expect_keyword("exists")?;
        let mut rel_vars = Vec::new();
        loop {
            let name = p.expect_ident()?;
            if sig.relations().any(|(n, _)| n == name.as_str()) {
                return Err(p.error(format!(
                    "relation variable '{name}' clashes with a declared relation symbol"
                )));
            }
            p.expect(&TokenKind::Slash)?;
            let arity = p.expect_usize()?;
            rel_vars.push((name, arity));
            if !p.eat(&TokenKind::Comma) {
                break;
            }
        }
        p.expect(&TokenKind::Colon)?;
        let mut ext = sig.clone();
        for (name, arity) in &rel_vars {
            ext.declare_relation(name, *arity);
        }
        let mut mode = SigMode::Strict(&ext);
        let body = p.parse_fo_formula(&mut mode)?;
        sentences.push(ThetaSentence { rel_vars, body });
    }
    p.expect_end()?;
    Theta::new(sentences).map_err(|e| p.error(e))
}

/// Render a theory in the `theta` file format.
pub fn print_theta(theta: &Theta) -> String {
    let mut out = String::from("theta {\n");
    for s in theta.sentences() {
        let vars: Vec<String> = s
            .rel_vars
            .iter()
            .map(|(n, a)| format!("{n}/{a}"))
            .collect();
        let _ = writeln!(out, "  exists {} : {}", vars.join(", "), s.body);
    }
    out.push_str("}\n");
    out
}
