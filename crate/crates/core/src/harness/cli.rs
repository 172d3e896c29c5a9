//! Command-line interface.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use super::config::{parse_input, ExperimentConfig, ReportFormat};
use super::experiment::run_experiment;
use super::report::{emit_report, Report, EXIT_BUDGET, EXIT_CONFIG, EXIT_OK};
use crate::classical::freivalds_exact;
use crate::coin::exact_error_probability;
use crate::error::{Error, Result};
use crate::model::SubsetOracle;
use crate::oracles::{enumerate_members, mutate_near_members, oracle_membership, LanguageId};
use crate::quantum::{adh_accept_probability, rtqcfa_overall, rtqcfa_power_eq_i, rtqcfa_round};

#[derive(Debug, Parser)]
#[command(
    name = "boundrec",
    version,
    about = "Run bounded-error recognizers and check them against oracles"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Trials per input for probabilistic recognizers.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Report format: json or csv.
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<ReportFormat>,
    /// Writes output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Step cap per run; longer runs count as inconclusive.
    #[arg(long, global = true)]
    pub max_steps: Option<u64>,
    /// Oracle prefix bits, e.g. "101".
    #[arg(long, global = true)]
    pub prefix: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membership of each input in a language.
    Oracle {
        #[arg(long)]
        language: LanguageId,
        inputs: Vec<String>,
    },
    /// Runs the experiment in --config.
    Run,
    /// Exact probability computations.
    Exact {
        #[command(subcommand)]
        what: ExactCommand,
    },
    /// Lists members up to a bound.
    Enumerate {
        #[arg(long)]
        language: LanguageId,
        #[arg(long)]
        bound: u64,
    },
    /// Single-edit non-members near a member.
    Mutate {
        #[arg(long)]
        language: LanguageId,
        #[arg(long)]
        budget: usize,
        input: String,
    },
    /// Re-emits a saved JSON report.
    Report { path: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum ExactCommand {
    /// Error of reading bit k from 64^k coin tosses.
    Lemma1 {
        #[arg(long)]
        k: u32,
    },
    /// Outcome probabilities of reading digit j.
    Adh {
        #[arg(long)]
        j: u64,
    },
    /// Decisive-round bias and verdict probability of the block comparison.
    Freivalds {
        #[arg(long)]
        len_a: u32,
        #[arg(long)]
        len_b: u32,
    },
    /// Per-round and overall probabilities of the POWER-EQ machine, tensored
    /// with the digit reader when --prefix is given.
    Rtqcfa {
        #[arg(long, default_value = "1/64")]
        l: String,
        input: String,
    },
}

fn parse_format(s: &str) -> std::result::Result<ReportFormat, String> {
    match s {
        "json" => Ok(ReportFormat::Json),
        "csv" => Ok(ReportFormat::Csv),
        _ => Err(format!("unknown format '{s}' (json or csv)")),
    }
}

/// Exit code for an error.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::CapExceeded(_) | Error::ExactTooLarge(_) => EXIT_BUDGET,
        Error::Fault(_) => 1,
        _ => EXIT_CONFIG,
    }
}

fn oracle(g: &GlobalArgs) -> Result<Option<SubsetOracle>> {
    g.prefix
        .as_deref()
        .map(|p| p.parse().map_err(|e: Error| Error::Config(e.to_string())))
        .transpose()
}

fn need_oracle(g: &GlobalArgs) -> Result<SubsetOracle> {
    oracle(g)?.ok_or_else(|| Error::Config("--prefix is required".into()))
}

/// Loads --config and applies the flag overrides.
pub fn load_config(g: &GlobalArgs) -> Result<ExperimentConfig> {
    let path = g
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.trials {
        cfg.trials = t;
    }
    if let Some(f) = g.format {
        cfg.format = f;
    }
    if let Some(o) = &g.out {
        cfg.out = Some(o.clone());
    }
    if let Some(m) = g.max_steps {
        cfg.max_steps = Some(m);
    }
    if let Some(p) = &g.prefix {
        cfg.prefix = Some(p.clone());
    }
    Ok(cfg)
}

fn write_out(bytes: &[u8], path: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn json_out(v: &serde_json::Value, g: &GlobalArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    write_out(&bytes, g.out.as_ref(), stdout)
}

fn lines_out(lines: &[String], g: &GlobalArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut text = lines.join("\n");
    text.push('\n');
    write_out(text.as_bytes(), g.out.as_ref(), stdout)
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Run => {
            let cfg = load_config(g)?;
            let report = run_experiment(&cfg)?;
            let bytes = emit_report(&report, cfg.format)?;
            write_out(&bytes, cfg.out.as_ref(), stdout)?;
            Ok(report.exit_code())
        }
        Command::Report { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let report: Report =
                serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            let bytes = emit_report(&report, g.format.unwrap_or_default())?;
            write_out(&bytes, g.out.as_ref(), stdout)?;
            Ok(report.exit_code())
        }
        Command::Oracle { language, inputs } => {
            let o = oracle(g)?;
            let mut lines = Vec::new();
            for s in inputs {
                let w = parse_input(s, *language)?;
                let member = oracle_membership(*language, &w, o.as_ref())?;
                lines.push(format!("{w}\t{member}"));
            }
            lines_out(&lines, g, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Enumerate { language, bound } => {
            let o = oracle(g)?;
            let words = enumerate_members(*language, *bound, o.as_ref())?;
            lines_out(
                &words.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                g,
                stdout,
            )?;
            Ok(EXIT_OK)
        }
        Command::Mutate {
            language,
            budget,
            input,
        } => {
            let o = oracle(g)?;
            let w = parse_input(input, *language)?;
            let words = mutate_near_members(*language, &w, *budget, o.as_ref())?;
            lines_out(
                &words.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                g,
                stdout,
            )?;
            Ok(EXIT_OK)
        }
        Command::Exact { what } => {
            let v = match what {
                ExactCommand::Lemma1 { k } => {
                    let o = need_oracle(g)?;
                    let e = exact_error_probability(&o, *k)?;
                    json!({ "k": k, "error": e.to_string(), "error_f64": num_traits::ToPrimitive::to_f64(&e) })
                }
                ExactCommand::Adh { j } => {
                    let o = need_oracle(g)?;
                    let out = adh_accept_probability(&o, *j)?;
                    let bit = o.query(*j)?;
                    json!({
                        "j": j,
                        "bit": bit,
                        "p_in": out.p_in,
                        "p_out": out.p_out,
                        "correct": out.correct(bit),
                        "certified_correct": out.certified_correct(bit).to_string(),
                    })
                }
                ExactCommand::Freivalds { len_a, len_b } => {
                    let cfg = ExperimentConfig::new(super::config::Experiment::Freivalds {
                        len_a: *len_a,
                        len_b: *len_b,
                    });
                    let e = freivalds_exact(*len_a, *len_b, &cfg.freivalds)?;
                    serde_json::to_value(e)?
                }
                ExactCommand::Rtqcfa { l, input } => {
                    let mut cfg = ExperimentConfig::new(super::config::Experiment::Adh { j: 1 });
                    cfg.l = l.clone();
                    let l = cfg.l_value()?;
                    let w = parse_input(input, LanguageId::PowerEq)?;
                    match oracle(g)? {
                        Some(o) => serde_json::to_value(rtqcfa_power_eq_i(&w, &l, &o)?)?,
                        None => {
                            let (round, trace) = rtqcfa_round(&w, &l)?;
                            let overall = rtqcfa_overall(&round)?;
                            json!({ "round": round, "overall": overall, "blocks": trace.blocks })
                        }
                    }
                }
            };
            json_out(&v, g, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code_for(&e)
        }
    }
}
