//! Text formats for proofs and standalone sequents.
//!
//! ```text
//! proof weaken {
//!   sig { rel R/1 }
//!   1: PS-lit gamma="R(x)" phi="x = x" ctx=["forall x. (R(x) -> x = x)"]
//!   2: PS-ent from [1] gamma="R(x)" phi="x = x" ctx=["forall x. R(x)"]
//! }
//!
//! sequent refl {
//!   sig { rel R/1 }
//!   gamma="R(x)"
//!   phi="x = x"
//!   ctx=["forall x. (R(x) -> x = x)"]
//! }
//! ```
//!
//! Steps are numbered consecutively from 1 and refer to premises by those
//! numbers; `from` lists must point at earlier steps. Formulas live inside
//! quoted strings and are parsed with inferred relation and function
//! declarations shared across the whole file, so arities must be
//! consistent; constants must be declared in the optional leading `sig`
//! block, since a bare identifier otherwise reads as a team variable. The
//! `sentence` key of a theta step is the 1-based position in the
//! accompanying theory file.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::syntax::{
    parse_fo_with, parse_il_with, FoFormula, IlFormula, ParseError, Parser, Signature, TokenKind,
};

use super::{Proof, ProofStep, Rule, Sequent};

fn parse_fo_str(p: &mut Parser, sig: &mut Signature) -> Result<FoFormula, ParseError> {
    let s = p.expect_string()?;
    parse_fo_with(&s, sig).map_err(|e| p.error(format!("in \"{s}\": {e}")))
}

fn parse_il_str(p: &mut Parser, sig: &mut Signature) -> Result<IlFormula, ParseError> {
    let s = p.expect_string()?;
    parse_il_with(&s, sig).map_err(|e| p.error(format!("in \"{s}\": {e}")))
}

fn parse_ctx(p: &mut Parser, sig: &mut Signature) -> Result<BTreeSet<FoFormula>, ParseError> {
    p.expect(&TokenKind::LBracket)?;
    let mut out = BTreeSet::new();
    if !p.eat(&TokenKind::RBracket) {
        loop {
            out.insert(parse_fo_str(p, sig)?);
            if !p.eat(&TokenKind::Comma) {
                break;
            }
        }
        p.expect(&TokenKind::RBracket)?;
    }
    Ok(out)
}

#[derive(Default)]
struct StepKeys {
    from: Option<Vec<usize>>,
    var: Option<String>,
    param: Option<String>,
    sentence: Option<usize>,
    symbols: Option<Vec<String>>,
    gamma: Option<FoFormula>,
    phi: Option<IlFormula>,
    ctx: Option<BTreeSet<FoFormula>>,
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, p: &Parser) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(p.error(format!("key '{key}' given twice")));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_step_keys(p: &mut Parser, sig: &mut Signature) -> Result<StepKeys, ParseError> {
    let mut keys = StepKeys::default();
    loop {
        let word = match p.peek() {
            Some(TokenKind::Ident(w)) => w.clone(),
            _ => return Ok(keys),
        };
        match word.as_str() {
            "from" => {
                p.expect_keyword("from")?;
                p.expect(&TokenKind::LBracket)?;
                let mut list = Vec::new();
                if !p.eat(&TokenKind::RBracket) {
                    loop {
                        list.push(p.expect_usize()?);
                        if !p.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                    p.expect(&TokenKind::RBracket)?;
                }
                set_once(&mut keys.from, list, "from", p)?;
            }
            "var" => {
                p.expect_keyword("var")?;
                p.expect(&TokenKind::Eq)?;
                let v = p.expect_ident()?;
                set_once(&mut keys.var, v, "var", p)?;
            }
            "param" => {
                p.expect_keyword("param")?;
                p.expect(&TokenKind::Eq)?;
                let v = p.expect_ident()?;
                set_once(&mut keys.param, v, "param", p)?;
            }
            "sentence" => {
                p.expect_keyword("sentence")?;
                p.expect(&TokenKind::Eq)?;
                let n = p.expect_usize()?;
                set_once(&mut keys.sentence, n, "sentence", p)?;
            }
            "symbols" => {
                p.expect_keyword("symbols")?;
                p.expect(&TokenKind::Eq)?;
                p.expect(&TokenKind::LBracket)?;
                let mut list = Vec::new();
                if !p.eat(&TokenKind::RBracket) {
                    loop {
                        list.push(p.expect_ident()?);
                        if !p.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                    p.expect(&TokenKind::RBracket)?;
                }
                set_once(&mut keys.symbols, list, "symbols", p)?;
            }
            "gamma" => {
                p.expect_keyword("gamma")?;
                p.expect(&TokenKind::Eq)?;
                let f = parse_fo_str(p, sig)?;
                set_once(&mut keys.gamma, f, "gamma", p)?;
            }
            "phi" => {
                p.expect_keyword("phi")?;
                p.expect(&TokenKind::Eq)?;
                let f = parse_il_str(p, sig)?;
                set_once(&mut keys.phi, f, "phi", p)?;
            }
            "ctx" => {
                p.expect_keyword("ctx")?;
                p.expect(&TokenKind::Eq)?;
                let c = parse_ctx(p, sig)?;
                set_once(&mut keys.ctx, c, "ctx", p)?;
            }
            _ => return Ok(keys),
        }
    }
}

/// Build the rule from its tag and keys, rejecting keys the rule does not
/// take.
fn build_rule(tag: &str, keys: &mut StepKeys, p: &Parser) -> Result<Rule, ParseError> {
    let rule = match tag {
        "lit" => Rule::Lit,
        "ind" => Rule::Ind,
        "or" => Rule::Or,
        "and" => Rule::And,
        "exists" => Rule::Exists {
            var: keys
                .var
                .take()
                .ok_or_else(|| p.error("PS-exists needs var=<name>"))?,
        },
        "forall" => Rule::Forall {
            var: keys
                .var
                .take()
                .ok_or_else(|| p.error("PS-forall needs var=<name>"))?,
        },
        "ent" => Rule::Ent,
        "depar" => Rule::Depar {
            param: keys
                .param
                .take()
                .ok_or_else(|| p.error("PS-depar needs param=<name>"))?,
        },
        "split" => Rule::Split,
        "theta" => {
            let sentence = keys
                .sentence
                .take()
                .ok_or_else(|| p.error("PS-theta needs sentence=<number>"))?;
            if sentence == 0 {
                return Err(p.error("theta sentences are numbered from 1"));
            }
            Rule::Theta {
                sentence: sentence - 1,
                symbols: keys.symbols.take().unwrap_or_default(),
            }
        }
        other => return Err(p.error(format!("unknown rule tag 'PS-{other}'"))),
    };
    for (present, key) in [
        (keys.var.is_some(), "var"),
        (keys.param.is_some(), "param"),
        (keys.sentence.is_some(), "sentence"),
        (keys.symbols.is_some(), "symbols"),
    ] {
        if present {
            return Err(p.error(format!("key '{key}' is not valid for {}", rule.tag())));
        }
    }
    Ok(rule)
}

/// Parse a `proof NAME { ... }` file. Returns the proof together with the
/// signature accumulated from the `sig` block and from use.
pub fn parse_proof(text: &str) -> Result<(Proof, Signature), ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_keyword("proof")?;
    let name = p.expect_ident()?;
    p.expect(&TokenKind::LBrace)?;
    let mut sig = Signature::new();
    p.parse_sig_block(&mut sig)?;

    let mut steps: Vec<ProofStep> = Vec::new();
    while !p.eat(&TokenKind::RBrace) {
        let number = p.expect_usize()?;
        if number != steps.len() + 1 {
            return Err(p.error(format!(
                "steps must be numbered consecutively; expected {}",
                steps.len() + 1
            )));
        }
        p.expect(&TokenKind::Colon)?;
        p.expect_keyword("PS")?;
        p.expect(&TokenKind::Minus)?;
        let tag = p.expect_ident()?;
        let mut keys = parse_step_keys(&mut p, &mut sig)?;
        let rule = build_rule(&tag, &mut keys, &p)?;
        let premises: Vec<usize> = keys
            .from
            .take()
            .unwrap_or_default()
            .into_iter()
            .map(|n| {
                if n == 0 || n > steps.len() {
                    Err(p.error(format!("step {number} must draw on earlier steps, got {n}")))
                } else {
                    Ok(n - 1)
                }
            })
            .collect::<Result<_, _>>()?;
        let gamma = keys
            .gamma
            .take()
            .ok_or_else(|| p.error(format!("step {number} needs gamma=\"...\"")))?;
        let phi = keys
            .phi
            .take()
            .ok_or_else(|| p.error(format!("step {number} needs phi=\"...\"")))?;
        let ctx = keys
            .ctx
            .take()
            .ok_or_else(|| p.error(format!("step {number} needs ctx=[...]")))?;
        let sequent = Sequent::new(ctx, gamma, phi).map_err(|e| p.error(e))?;
        steps.push(ProofStep {
            sequent,
            rule,
            premises,
        });
    }
    p.expect_end()?;
    Ok((Proof { name, steps }, sig))
}

/// Parse a `sequent NAME { gamma=... phi=... ctx=[...] }` file. The
/// context defaults to empty.
pub fn parse_sequent(text: &str) -> Result<(String, Sequent, Signature), ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_keyword("sequent")?;
    let name = p.expect_ident()?;
    p.expect(&TokenKind::LBrace)?;
    let mut sig = Signature::new();
    p.parse_sig_block(&mut sig)?;
    let mut keys = parse_step_keys(&mut p, &mut sig)?;
    p.expect(&TokenKind::RBrace)?;
    p.expect_end()?;
    for (present, key) in [
        (keys.from.is_some(), "from"),
        (keys.var.is_some(), "var"),
        (keys.param.is_some(), "param"),
        (keys.sentence.is_some(), "sentence"),
        (keys.symbols.is_some(), "symbols"),
    ] {
        if present {
            return Err(p.error(format!("key '{key}' does not belong in a sequent file")));
        }
    }
    let gamma = keys
        .gamma
        .take()
        .ok_or_else(|| p.error("a sequent needs gamma=\"...\""))?;
    let phi = keys
        .phi
        .take()
        .ok_or_else(|| p.error("a sequent needs phi=\"...\""))?;
    let sequent =
        Sequent::new(keys.ctx.take().unwrap_or_default(), gamma, phi).map_err(|e| p.error(e))?;
    Ok((name, sequent, sig))
}

fn sig_block(sig: &Signature) -> String {
    let mut parts: Vec<String> = Vec::new();
    parts.extend(sig.relations().map(|(n, a)| format!("rel {n}/{a}")));
    parts.extend(sig.functions().map(|(n, a)| format!("fun {n}/{a}")));
    parts.extend(sig.constants().map(|n| format!("const {n}")));
    if parts.is_empty() {
        String::new()
    } else {
        format!("  sig {{ {} }}\n", parts.join(" "))
    }
}

fn write_rule_params(out: &mut String, rule: &Rule) {
    match rule {
        Rule::Exists { var } | Rule::Forall { var } => {
            let _ = write!(out, " var={var}");
        }
        Rule::Depar { param } => {
            let _ = write!(out, " param={param}");
        }
        Rule::Theta { sentence, symbols } => {
            let _ = write!(out, " sentence={} symbols=[{}]", sentence + 1, symbols.join(", "));
        }
        _ => {}
    }
}

/// Render a proof in the `proof` file format, with a `sig` block covering
/// every symbol the steps mention.
pub fn print_proof(proof: &Proof) -> String {
    let mut sig = Signature::new();
    for step in &proof.steps {
        crate::prover::merge_signature(&mut sig, &step.sequent.signature());
    }
    let mut out = format!("proof {} {{\n", proof.name);
    out.push_str(&sig_block(&sig));
    for (i, step) in proof.steps.iter().enumerate() {
        let _ = write!(out, "  {}: {}", i + 1, step.rule.tag());
        if !step.premises.is_empty() {
            let list: Vec<String> = step.premises.iter().map(|p| (p + 1).to_string()).collect();
            let _ = write!(out, " from [{}]", list.join(", "));
        }
        write_rule_params(&mut out, &step.rule);
        let _ = write!(out, " gamma=\"{}\" phi=\"{}\"", step.sequent.gamma(), step.sequent.phi());
        let ctx: Vec<String> = step
            .sequent
            .context()
            .iter()
            .map(|f| format!("\"{f}\""))
            .collect();
        let _ = writeln!(out, " ctx=[{}]", ctx.join(", "));
    }
    out.push_str("}\n");
    out
}

/// Render a sequent in the `sequent` file format.
pub fn print_sequent(name: &str, sequent: &Sequent) -> String {
    let mut out = format!("sequent {name} {{\n");
    out.push_str(&sig_block(&sequent.signature()));
    let mut body = String::new();
    let _ = writeln!(body, "  gamma=\"{}\"", sequent.gamma());
    let _ = writeln!(body, "  phi=\"{}\"", sequent.phi());
    let ctx: Vec<String> = sequent
        .context()
        .iter()
        .map(|f| format!("\"{f}\""))
        .collect();
    let _ = writeln!(body, "  ctx=[{}]", ctx.join(", "));
    out.push_str(&body);
    out.push_str("}\n");
    out
}
