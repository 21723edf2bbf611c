//! Line-oriented text formats for structures and teams.
//!
//! ```text
//! model M1 {
//!   domain = { 0, 1 }
//!   rel R/1 = { (0) }
//!   fun f/1 = { 0 -> 1, 1 -> 0 }
//!   const c = 0
//! }
//!
//! team X over (x, y) {
//!   (0, 1)
//! }
//! ```
//!
//! Elements are opaque names; declaration order fixes element indices.
//! `#` starts a line comment anywhere.

use std::fmt::Write as _;

use crate::syntax::{ParseError, Parser, TokenKind};

use super::{Elem, Structure, Team};

fn elem_ref(p: &mut Parser, elems: &[String]) -> Result<Elem, ParseError> {
    let name = p.expect_ident()?;
    elems
        .iter()
        .position(|e| *e == name)
        .ok_or_else(|| p.error(format!("unknown domain element '{name}'")))
}

/// `(e1, e2, ...)`, or a bare element name as a singleton tuple.
fn elem_tuple(p: &mut Parser, elems: &[String]) -> Result<Vec<Elem>, ParseError> {
    if !p.eat(&TokenKind::LParen) {
        return Ok(vec![elem_ref(p, elems)?]);
    }
    let mut out = Vec::new();
    if !p.eat(&TokenKind::RParen) {
        loop {
            out.push(elem_ref(p, elems)?);
            if !p.eat(&TokenKind::Comma) {
                break;
            }
        }
        p.expect(&TokenKind::RParen)?;
    }
    Ok(out)
}

fn at_tuple_start(p: &Parser) -> bool {
    matches!(p.peek(), Some(TokenKind::LParen) | Some(TokenKind::Ident(_)))
}

/// Parse a `model NAME { ... }` file into a named structure.
pub fn parse_structure(text: &str) -> Result<(String, Structure), ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_keyword("model")?;
    let name = p.expect_ident()?;
    p.expect(&TokenKind::LBrace)?;

    p.expect_keyword("domain")?;
    p.expect(&TokenKind::Eq)?;
    p.expect(&TokenKind::LBrace)?;
    let mut elems = Vec::new();
    while let Some(TokenKind::Ident(_)) = p.peek() {
        elems.push(p.expect_ident()?);
        p.eat(&TokenKind::Comma);
    }
    p.expect(&TokenKind::RBrace)?;
    let mut m = Structure::new(&elems).map_err(|e| p.error(e))?;

    loop {
        if p.eat_keyword("rel") {
            let rel = p.expect_ident()?;
            p.expect(&TokenKind::Slash)?;
            let arity = p.expect_usize()?;
            p.expect(&TokenKind::Eq)?;
            p.expect(&TokenKind::LBrace)?;
            let mut table = Vec::new();
            while at_tuple_start(&p) {
                let t = elem_tuple(&mut p, &elems)?;
                if t.len() != arity {
                    return Err(p.error(format!(
                        "relation '{rel}' has arity {arity}, tuple has {} elements",
                        t.len()
                    )));
                }
                table.push(t);
                p.eat(&TokenKind::Comma);
            }
            p.expect(&TokenKind::RBrace)?;
            m.add_relation(&rel, arity, table).map_err(|e| p.error(e))?;
        } else if p.eat_keyword("fun") {
            let fun = p.expect_ident()?;
            p.expect(&TokenKind::Slash)?;
            let arity = p.expect_usize()?;
            p.expect(&TokenKind::Eq)?;
            p.expect(&TokenKind::LBrace)?;
            let mut table = Vec::new();
            while at_tuple_start(&p) {
                let args = elem_tuple(&mut p, &elems)?;
                if args.len() != arity {
                    return Err(p.error(format!(
                        "function '{fun}' has arity {arity}, entry has {} arguments",
                        args.len()
                    )));
                }
                p.expect(&TokenKind::Arrow)?;
                let val = elem_ref(&mut p, &elems)?;
                table.push((args, val));
                p.eat(&TokenKind::Comma);
            }
            p.expect(&TokenKind::RBrace)?;
            m.add_function(&fun, arity, table).map_err(|e| p.error(e))?;
        } else if p.eat_keyword("const") {
            let c = p.expect_ident()?;
            p.expect(&TokenKind::Eq)?;
            let val = elem_ref(&mut p, &elems)?;
            m.add_constant(&c, val).map_err(|e| p.error(e))?;
        } else {
            break;
        }
    }
    p.expect(&TokenKind::RBrace)?;
    p.expect_end()?;
    Ok((name, m))
}

/// Parse a `team NAME over (vars) { rows }` file against a structure.
pub fn parse_team(text: &str, m: &Structure) -> Result<(String, Team), ParseError> {
    let mut p = Parser::new(text)?;
    let (name, team) = parse_team_block(&mut p, m)?;
    p.expect_end()?;
    Ok((name, team))
}

/// One `team NAME over (vars) { rows }` block at the cursor.
pub(crate) fn parse_team_block(
    p: &mut Parser,
    m: &Structure,
) -> Result<(String, Team), ParseError> {
    p.expect_keyword("team")?;
    let name = p.expect_ident()?;
    p.expect_keyword("over")?;
    p.expect(&TokenKind::LParen)?;
    let mut vars = Vec::new();
    while let Some(TokenKind::Ident(_)) = p.peek() {
        vars.push(p.expect_ident()?);
        p.eat(&TokenKind::Comma);
    }
    p.expect(&TokenKind::RParen)?;
    p.expect(&TokenKind::LBrace)?;
    let elems: Vec<String> = m.elem_names().to_vec();
    let mut rows = Vec::new();
    while at_tuple_start(p) {
        let row = elem_tuple(p, &elems)?;
        if row.len() != vars.len() {
            return Err(p.error(format!(
                "row has {} values but the team has {} variables",
                row.len(),
                vars.len()
            )));
        }
        rows.push(row);
        p.eat(&TokenKind::Comma);
    }
    p.expect(&TokenKind::RBrace)?;
    let team = Team::from_rows(&vars, rows).map_err(|e| p.error(e))?;
    Ok((name, team))
}

fn fmt_tuple(m: &Structure, t: &[Elem]) -> String {
    let names: Vec<&str> = t.iter().map(|e| m.elem_name(*e)).collect();
    format!("({})", names.join(", "))
}

/// Render a structure in the `model` file format.
pub fn print_structure(name: &str, m: &Structure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {name} {{");
    let _ = writeln!(out, "  domain = {{ {} }}", m.elem_names().join(", "));
    for (rel, arity) in m.signature().relations() {
        let table: Vec<String> = m
            .relation(rel)
            .expect("declared relation has a table")
            .iter()
            .map(|t| fmt_tuple(m, t))
            .collect();
        let _ = writeln!(out, "  rel {rel}/{arity} = {{ {} }}", table.join(", "));
    }
    for (fun, arity) in m.signature().functions() {
        let entries: Vec<String> = m
            .function(fun)
            .expect("declared function has a table")
            .iter()
            .map(|(args, val)| {
                let val = m.elem_name(*val);
                if args.len() == 1 {
                    format!("{} -> {val}", m.elem_name(args[0]))
                } else {
                    format!("{} -> {val}", fmt_tuple(m, args))
                }
            })
            .collect();
        let _ = writeln!(out, "  fun {fun}/{arity} = {{ {} }}", entries.join(", "));
    }
    for c in m.signature().constants() {
        let val = m.constant(c).expect("declared constant has a value");
        let _ = writeln!(out, "  const {c} = {}", m.elem_name(val));
    }
    out.push_str("}\n");
    out
}

/// Render a team in the `team` file format.
pub fn print_team(name: &str, m: &Structure, x: &Team) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "team {name} over ({}) {{", x.vars().join(", "));
    for row in x.rows() {
        let _ = writeln!(out, "  {}", fmt_tuple(m, row));
    }
    out.push_str("}\n");
    out
}
