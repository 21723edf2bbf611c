//! Batch front end for the teamlogic crate.
//!
//! Every subcommand reads structures, teams, families, theories, proofs,
//! and sequents from files in the formats the library defines, takes
//! formulas inline, and reports through stdout. Exit codes are part of the
//! interface: 0 for positive verdicts (satisfied, verified, valid, closed),
//! 1 for negative ones, 2 for usage and input errors, and 3 when a proof
//! checks only conditionally because an entailment obligation stayed
//! undecided within the prover budget.
//!
//! `--format machine` switches from prose to one `key=value` line per fact,
//! with the keys documented in the project readme.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use teamlogic::general::{parse_family, parse_theta, TeamFamily, ThetaVerdict};
use teamlogic::model::{parse_structure, parse_team, print_structure, Structure};
use teamlogic::syntax::{
    desugar_dep, parse_fo, parse_fo_with, parse_il, parse_il_with, parse_signature, parse_terms,
    Signature,
};
use teamlogic::{
    check_proof, check_theta_closed, derive_dep, derive_fo, eval_entailment,
    eval_entailment_witnessed, eval_full, parse_proof, parse_sequent, print_proof, run_selftest,
    validate_sequent, GeneralModel, Overall, ParamAssignment, ProverBudget, SequentVerdict,
    StepStatus, Theta,
};

#[derive(Parser)]
#[command(name = "teamlogic", version, about = "Independence logic workbench")]
struct Cli {
    /// Output style: prose, or one key=value per line.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form.
    Parse(ParseArgs),
    /// Evaluate a formula over a team under full team semantics.
    EvalTeam(EvalTeamArgs),
    /// Evaluate over a general model given by a team family.
    EvalGts(EvalGtsArgs),
    /// Evaluate under entailment semantics with a symbolic team.
    EvalEnt(EvalEntArgs),
    /// Evaluate under entailment semantics and print the witness tree.
    Witness(EvalEntArgs),
    /// Re-derive and check a proof file step by step.
    CheckProof(CheckProofArgs),
    /// Generate a proof for a flat formula or a dependence atom.
    Derive(DeriveArgs),
    /// Validate a sequent over all structures up to a size bound.
    ValidateSeq(ValidateSeqArgs),
    /// Check a family for closure under a relation-existence theory.
    ThetaCheck(ThetaCheckArgs),
    /// Run the built-in diagnostic battery.
    Selftest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Il,
    Fo,
}

#[derive(Args)]
struct ParseArgs {
    /// Formula text.
    #[arg(long)]
    phi: String,
    /// Grammar to parse with.
    #[arg(long, value_enum, default_value_t = Kind::Il)]
    kind: Kind,
    /// Signature file; without it symbol kinds and arities are inferred.
    #[arg(long)]
    sig: Option<PathBuf>,
}

#[derive(Args)]
struct EvalTeamArgs {
    /// Structure file.
    #[arg(long)]
    model: PathBuf,
    /// Team file.
    #[arg(long)]
    team: PathBuf,
    /// Formula text.
    #[arg(long)]
    phi: String,
}

#[derive(Args)]
struct EvalGtsArgs {
    /// Structure file.
    #[arg(long)]
    model: PathBuf,
    /// Family file, or the keyword `full` or `least`.
    #[arg(long)]
    family: String,
    /// Team file.
    #[arg(long)]
    team: PathBuf,
    /// Formula text.
    #[arg(long)]
    phi: String,
    /// Extra variables admitted to the universe over which the full and
    /// least families are materialized.
    #[arg(long, value_delimiter = ',', default_value = "")]
    bound: Vec<String>,
}

#[derive(Args)]
struct EvalEntArgs {
    /// Structure file.
    #[arg(long)]
    model: PathBuf,
    /// Team definition, a first-order formula.
    #[arg(long)]
    gamma: String,
    /// Parameter assignment, e.g. `p=0,q=1`.
    #[arg(long, default_value = "")]
    params: String,
    /// Formula text.
    #[arg(long)]
    phi: String,
}

#[derive(Args)]
struct CheckProofArgs {
    /// Proof file.
    #[arg(long)]
    proof: PathBuf,
    /// Relation-existence theory file, required by theta steps.
    #[arg(long)]
    theta: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct BudgetArgs {
    /// Resolution depth limit for entailment obligations.
    #[arg(long, default_value_t = 7)]
    prover_depth: usize,
    /// Milliseconds granted to each entailment obligation.
    #[arg(long, default_value_t = 2_000)]
    prover_ms: u64,
    /// Largest structure size tried when refuting an obligation.
    #[arg(long, default_value_t = 3)]
    cm_size: usize,
}

impl BudgetArgs {
    fn budget(&self) -> ProverBudget {
        ProverBudget {
            depth: self.prover_depth,
            ms: self.prover_ms,
            cm_size: self.cm_size,
        }
    }
}

#[derive(Args)]
struct DeriveArgs {
    /// Team definition the derivation starts from.
    #[arg(long)]
    gamma: String,
    /// Flat conclusion to introduce; no independence atoms.
    #[arg(long, conflicts_with = "dep_of")]
    phi: Option<String>,
    /// Determined term of a dependence-atom conclusion.
    #[arg(long)]
    dep_of: Option<String>,
    /// Comma-separated conditioning terms for --dep-of.
    #[arg(long, default_value = "", requires = "dep_of")]
    dep_on: String,
    /// Signature file; needed when formulas mention constants.
    #[arg(long)]
    sig: Option<PathBuf>,
    /// Write the proof file here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateSeqArgs {
    /// Sequent file.
    #[arg(long)]
    seq: PathBuf,
    /// Largest structure size enumerated.
    #[arg(long, default_value_t = 3)]
    max_size: usize,
}

#[derive(Args)]
struct ThetaCheckArgs {
    /// Structure file.
    #[arg(long)]
    model: PathBuf,
    /// Family file, or the keyword `full` or `least`.
    #[arg(long)]
    family: String,
    /// Relation-existence theory file.
    #[arg(long)]
    theta: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let f = cli.format;
    match &cli.command {
        Command::Parse(a) => cmd_parse(a, f),
        Command::EvalTeam(a) => cmd_eval_team(a, f),
        Command::EvalGts(a) => cmd_eval_gts(a, f),
        Command::EvalEnt(a) => cmd_eval_ent(a, f),
        Command::Witness(a) => cmd_witness(a, f),
        Command::CheckProof(a) => cmd_check_proof(a, f),
        Command::Derive(a) => cmd_derive(a, f),
        Command::ValidateSeq(a) => cmd_validate_seq(a, f),
        Command::ThetaCheck(a) => cmd_theta_check(a, f),
        Command::Selftest => cmd_selftest(f),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_sig(path: &Option<PathBuf>) -> Result<Signature> {
    match path {
        Some(p) => Ok(parse_signature(&read(p)?)?),
        None => Ok(Signature::new()),
    }
}

fn load_structure(path: &Path) -> Result<Structure> {
    let (_, m) = parse_structure(&read(path)?)?;
    Ok(m)
}

fn family_of(text: &str, m: &Structure) -> Result<TeamFamily> {
    match text {
        "full" => Ok(TeamFamily::Full),
        "least" => Ok(TeamFamily::Least),
        path => {
            let (_, teams) = parse_family(&read(Path::new(path))?, m)?;
            Ok(TeamFamily::Explicit(teams))
        }
    }
}

fn parse_params(text: &str) -> Result<ParamAssignment> {
    let mut h = ParamAssignment::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, value) = part
            .split_once('=')
            .with_context(|| format!("parameter {part:?}; assignments look like p=0,q=1"))?;
        let value = value
            .trim()
            .parse()
            .with_context(|| format!("parameter value in {part:?}"))?;
        h.insert(name.trim().to_string(), value);
    }
    Ok(h)
}

fn report_satisfied(sat: bool, f: Format) -> Result<ExitCode> {
    match f {
        Format::Plain => println!("{}", if sat { "satisfied" } else { "not satisfied" }),
        Format::Machine => println!("satisfied={sat}"),
    }
    Ok(if sat { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_parse(a: &ParseArgs, f: Format) -> Result<ExitCode> {
    let strict = load_sig(&a.sig)?;
    let mut inferred = strict.clone();
    let (display, team_vars, params): (String, Vec<String>, Vec<String>) = match a.kind {
        Kind::Il => {
            let phi = if a.sig.is_some() {
                parse_il(&a.phi, &strict)?
            } else {
                parse_il_with(&a.phi, &mut inferred)?
            };
            let vars = phi.free_team_vars().into_iter().collect();
            (phi.to_string(), vars, Vec::new())
        }
        Kind::Fo => {
            let phi = if a.sig.is_some() {
                parse_fo(&a.phi, &strict)?
            } else {
                parse_fo_with(&a.phi, &mut inferred)?
            };
            let vars = phi.free_team_vars().into_iter().collect();
            let params = phi.free_param_vars().into_iter().collect();
            (phi.to_string(), vars, params)
        }
    };
    match f {
        Format::Plain => {
            println!("{display}");
            if !team_vars.is_empty() {
                println!("free team variables: {}", team_vars.join(", "));
            }
            if !params.is_empty() {
                println!("free parameters: {}", params.join(", "));
            }
        }
        Format::Machine => {
            println!("ok=true");
            println!("formula={display}");
            println!("free_team_vars={}", team_vars.join(","));
            println!("free_params={}", params.join(","));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval_team(a: &EvalTeamArgs, f: Format) -> Result<ExitCode> {
    let m = load_structure(&a.model)?;
    let (_, team) = parse_team(&read(&a.team)?, &m)?;
    let phi = desugar_dep(&parse_il(&a.phi, m.signature())?)?;
    report_satisfied(eval_full(&m, &team, &phi)?, f)
}

fn cmd_eval_gts(a: &EvalGtsArgs, f: Format) -> Result<ExitCode> {
    let m = load_structure(&a.model)?;
    let (_, team) = parse_team(&read(&a.team)?, &m)?;
    let phi = desugar_dep(&parse_il(&a.phi, m.signature())?)?;
    let family = family_of(&a.family, &m)?;
    let g = GeneralModel::new(m, family)?;
    let bound: Vec<&str> = a.bound.iter().map(|v| v.as_str()).filter(|v| !v.is_empty()).collect();
    report_satisfied(g.eval_within(&team, &phi, &bound)?, f)
}

fn cmd_eval_ent(a: &EvalEntArgs, f: Format) -> Result<ExitCode> {
    let m = load_structure(&a.model)?;
    let gamma = parse_fo(&a.gamma, m.signature())?;
    let phi = parse_il(&a.phi, m.signature())?;
    let h = parse_params(&a.params)?;
    report_satisfied(eval_entailment(&m, &gamma, &h, &phi)?, f)
}

fn cmd_witness(a: &EvalEntArgs, f: Format) -> Result<ExitCode> {
    let m = load_structure(&a.model)?;
    let gamma = parse_fo(&a.gamma, m.signature())?;
    let phi = parse_il(&a.phi, m.signature())?;
    let h = parse_params(&a.params)?;
    match eval_entailment_witnessed(&m, &gamma, &h, &phi)? {
        Some(tree) => {
            match f {
                Format::Plain => {
                    println!("satisfied");
                    print!("{tree}");
                }
                Format::Machine => {
                    println!("satisfied=true");
                    for line in tree.to_string().lines() {
                        println!("witness={}", line.trim_start());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        None => report_satisfied(false, f),
    }
}

fn status_word(s: &StepStatus) -> &'static str {
    match s {
        StepStatus::Ok => "ok",
        StepStatus::Failed(_) => "failed",
        StepStatus::Conditional(_) => "conditional",
    }
}

fn cmd_check_proof(a: &CheckProofArgs, f: Format) -> Result<ExitCode> {
    let (proof, sig) = parse_proof(&read(&a.proof)?)?;
    let theta = match &a.theta {
        Some(path) => parse_theta(&read(path)?, &sig)?,
        None => Theta::default(),
    };
    let report = check_proof(&proof, &theta, &a.budget.budget());
    for (i, status) in report.steps.iter().enumerate() {
        let detail = match status {
            StepStatus::Ok => String::new(),
            StepStatus::Failed(d) | StepStatus::Conditional(d) => format!(" {d}"),
        };
        match f {
            Format::Plain => println!("step {}: {}{detail}", i + 1, status_word(status)),
            Format::Machine => println!("step_{}={}{detail}", i + 1, status_word(status)),
        }
    }
    let (word, code) = match report.overall {
        Overall::Verified => ("verified", ExitCode::SUCCESS),
        Overall::Rejected => ("rejected", ExitCode::from(1)),
        Overall::ConditionallyVerified => ("conditionally-verified", ExitCode::from(3)),
    };
    match f {
        Format::Plain => println!("{}: {word}", proof.name),
        Format::Machine => println!("overall={word}"),
    }
    Ok(code)
}

fn cmd_derive(a: &DeriveArgs, f: Format) -> Result<ExitCode> {
    let mut sig = load_sig(&a.sig)?;
    let gamma = parse_fo_with(&a.gamma, &mut sig)?;
    let proof = match (&a.phi, &a.dep_of) {
        (Some(phi), None) => derive_fo(&gamma, &parse_il_with(phi, &mut sig)?)?,
        (None, Some(target)) => {
            let target = parse_terms(target, &sig)?;
            ensure!(target.len() == 1, "--dep-of takes exactly one term");
            let on = parse_terms(&a.dep_on, &sig)?;
            derive_dep(&gamma, &on, &target[0])?
        }
        _ => bail!("pass --phi for a flat formula or --dep-of for a dependence atom"),
    };
    let text = print_proof(&proof);
    match (&a.out, f) {
        (Some(path), _) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            match f {
                Format::Plain => println!("wrote {} ({} steps)", path.display(), proof.steps.len()),
                Format::Machine => {
                    println!("name={}", proof.name);
                    println!("steps={}", proof.steps.len());
                    println!("out={}", path.display());
                }
            }
        }
        (None, Format::Plain) => print!("{text}"),
        (None, Format::Machine) => bail!("--format machine needs --out here"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate_seq(a: &ValidateSeqArgs, f: Format) -> Result<ExitCode> {
    let (name, sequent, _) = parse_sequent(&read(&a.seq)?)?;
    match validate_sequent(&sequent, a.max_size)? {
        SequentVerdict::ValidUpTo(n) => {
            match f {
                Format::Plain => println!("{name}: valid up to size {n}"),
                Format::Machine => {
                    println!("verdict=valid");
                    println!("max_size={n}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        SequentVerdict::CounterExample(m, h) => {
            match f {
                Format::Plain => {
                    println!("{name}: counterexample of size {}", m.size());
                    print!("{}", print_structure("counter", &m));
                    for (p, e) in &h {
                        println!("${p} = {e}");
                    }
                }
                Format::Machine => {
                    println!("verdict=counterexample");
                    println!("size={}", m.size());
                    for (p, e) in &h {
                        println!("param_{p}={e}");
                    }
                }
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_theta_check(a: &ThetaCheckArgs, f: Format) -> Result<ExitCode> {
    let m = load_structure(&a.model)?;
    let family = family_of(&a.family, &m)?;
    let theta = parse_theta(&read(&a.theta)?, m.signature())?;
    let g = GeneralModel::new(m, family)?;
    match check_theta_closed(&g, &theta)? {
        ThetaVerdict::Closed => {
            match f {
                Format::Plain => println!("closed"),
                Format::Machine => println!("closed=true"),
            }
            Ok(ExitCode::SUCCESS)
        }
        ThetaVerdict::Violation { sentence } => {
            match f {
                Format::Plain => println!("not closed: sentence {} has no witness", sentence + 1),
                Format::Machine => {
                    println!("closed=false");
                    println!("sentence={}", sentence + 1);
                }
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_selftest(f: Format) -> Result<ExitCode> {
    let checks = run_selftest();
    let mut all = true;
    for check in &checks {
        all &= check.outcome.is_ok();
        let (word, detail): (&str, String) = match &check.outcome {
            Ok(()) => ("pass", String::new()),
            Err(d) => ("fail", format!(" {d}")),
        };
        match f {
            Format::Plain => println!("check {}: {word}{detail}", check.name),
            Format::Machine => println!("check_{}={word}{detail}", check.name),
        }
    }
    match f {
        Format::Plain => println!("overall: {}", if all { "pass" } else { "fail" }),
        Format::Machine => println!("overall={}", if all { "pass" } else { "fail" }),
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
