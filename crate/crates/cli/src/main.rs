use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use edgevote::harness::{self, DependenceConfig, ExperimentConfig};
use edgevote::learner::{select_model, select_positive_model, EdgeTable};
use edgevote::rational::{parse_rational, to_f64};
use edgevote::source::{draw_dataset, load_dataset, save_dataset, SourceConfig, SourceSpec};
use edgevote::tail::{audit_bound, eval_lower_bound, eval_upper_bound, AuditGrid, BoundId, BoundParams};
use edgevote::theory;
use edgevote::vote::{exact_error, mc_error, theorem1_bound, Composition, VoteModel};
use edgevote::Rational;

/// Majority votes over weakly relevant variables: tail bounds, exact
/// errors, the edge-threshold learner and experiments.
#[derive(Parser)]
#[command(name = "edgevote", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tail inequalities and learning bounds.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Posterior probability that a variable is relevant (small instances).
    Posterior {
        #[arg(long)]
        data: PathBuf,
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        var: usize,
    },
    /// Synthetic data.
    #[command(subcommand)]
    Source(SourceCommand),
    /// Error of a vote.
    #[command(subcommand)]
    Error(ErrorCommand),
    /// Learn a thresholded vote from a dataset.
    Learn {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        beta: Rational,
        /// Consider un-negated variables only.
        #[arg(long)]
        positive_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a threshold sweep; writes CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the N = 100000, K = 1000, m = 100 threshold sweep; writes JSON.
    ReproFig2 {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare inclusive and exclusive learners in the separating regime; writes CSV.
    Exclusivity {
        #[arg(long, value_delimiter = ',', value_parser = rational_arg, default_value = "0.2,0.15,0.1")]
        gammas: Vec<Rational>,
        #[arg(long, default_value_t = 100)]
        replicates: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error of a fixed vote as relevant variables become dependent; writes CSV.
    Dependence {
        #[arg(long, value_delimiter = ',', default_value = "0,1,3,7")]
        rs: Vec<usize>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Check a tail inequality against exact binomial tails over a grid.
    Audit {
        /// Bound id, or `all`.
        #[arg(long)]
        bound: String,
        /// JSON grid file.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one tail inequality.
    Eval {
        #[arg(long)]
        bound: BoundId,
        #[command(flatten)]
        params: EvalParams,
    },
    /// Evaluate a learning bound; parameters as inline JSON or a JSON file.
    Theorem {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        params: String,
    },
}

#[derive(Args)]
struct EvalParams {
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    mean: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    T1,
    T2,
    T3,
    Bayes,
    Floor,
    Irrfloor,
}

#[derive(Subcommand)]
enum SourceCommand {
    /// Draw a dataset from a source configuration.
    Draw {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Number of examples.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ErrorCommand {
    /// Exact error of a vote with k relevant, l misleading and n - k - l irrelevant features.
    Exact {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        gamma: f64,
    },
    /// Monte Carlo error of a model file on a source.
    Mc {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TheoremParams {
    #[serde(rename = "N")]
    big_n: Option<u64>,
    #[serde(rename = "K")]
    big_k: Option<u64>,
    n: Option<u64>,
    k: Option<u64>,
    l: Option<u64>,
    gamma: Option<f64>,
    m: Option<u64>,
    beta: Option<serde_json::Value>,
    c_frac: Option<f64>,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.with_context(|| format!("missing parameter {name:?}"))
}

fn beta_value(v: Option<serde_json::Value>) -> Result<f64> {
    match need(v, "beta")? {
        serde_json::Value::Number(x) => x.as_f64().context("beta is not a number"),
        serde_json::Value::String(s) => Ok(to_f64(parse_rational(&s)?)),
        other => bail!("beta must be a number or a rational string, got {other}"),
    }
}

fn read_json_arg(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &impl serde::Serialize) -> Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn load_source(path: &Path) -> Result<SourceSpec> {
    let text = read_file(path)?;
    match serde_json::from_str::<SourceConfig>(&text) {
        Ok(config) => Ok(config.build()?),
        Err(config_err) => {
            let spec: SourceSpec = serde_json::from_str(&text)
                .map_err(|_| config_err)
                .with_context(|| format!("{} is neither a source config nor a source spec", path.display()))?;
            spec.validate()?;
            Ok(spec)
        }
    }
}

fn theorem(which: Which, p: TheoremParams) -> Result<serde_json::Value> {
    use serde_json::json;
    Ok(match which {
        Which::T1 => {
            let comp = Composition::new(need(p.n, "n")?, need(p.k, "k")?, need(p.l, "l")?)?;
            json!({ "bound": theorem1_bound(comp, need(p.gamma, "gamma")?)? })
        }
        Which::T2 => {
            let t = theory::theorem2_bound(
                need(p.big_n, "N")?,
                need(p.big_k, "K")?,
                need(p.gamma, "gamma")?,
                need(p.m, "m")?,
                beta_value(p.beta)?,
            )?;
            serde_json::to_value(t)?
        }
        Which::T3 => {
            let gamma = need(p.gamma, "gamma")?;
            let c = match (p.c_frac, p.beta) {
                (Some(c), None) => c,
                (None, Some(b)) => beta_value(Some(b))? / gamma,
                _ => bail!("give exactly one of \"c_frac\" and \"beta\""),
            };
            serde_json::to_value(theory::theorem3_bound(need(p.big_n, "N")?, need(p.big_k, "K")?, gamma, need(p.m, "m")?, c)?)?
        }
        Which::Bayes => {
            let (exact, bound) = theory::bayes_error_and_bound(need(p.big_k, "K")?, need(p.gamma, "gamma")?)?;
            json!({ "exact": exact, "bound": bound })
        }
        Which::Floor => json!({ "floor": theory::relevant_floor(need(p.k, "k")?, need(p.gamma, "gamma")?)? }),
        Which::Irrfloor => json!({
            "floor": theory::expected_irrelevant_floor(need(p.big_n, "N")?, need(p.big_k, "K")?, beta_value(p.beta)?, need(p.m, "m")?)?
        }),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Bounds(BoundsCommand::Audit { bound, grid, out }) => {
            let grid: AuditGrid = serde_json::from_str(&read_file(&grid)?).context("parsing the grid")?;
            let ids: Vec<BoundId> = if bound == "all" { BoundId::ALL.to_vec() } else { vec![bound.parse()?] };
            let mut sink = out.as_deref().map(|p| File::create(p).with_context(|| format!("creating {}", p.display())));
            let mut failed = false;
            for (i, id) in ids.into_iter().enumerate() {
                let report = audit_bound(id, &grid);
                match sink.as_mut() {
                    Some(Ok(f)) => {
                        let mut buf = Vec::new();
                        report.write_csv(&mut buf)?;
                        // one header for the whole file
                        let body = if i == 0 { &buf[..] } else { &buf[buf.iter().position(|&b| b == b'\n').map_or(0, |p| p + 1)..] };
                        f.write_all(body)?;
                    }
                    Some(Err(e)) => bail!("{e}"),
                    None => {}
                }
                eprintln!(
                    "{id}: {} checked, {} skipped, {} violations, max relative slack {:.6}",
                    report.checked(),
                    report.skipped(),
                    report.violations.len(),
                    report.max_relative_slack
                );
                failed |= !report.passed();
            }
            return Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS });
        }
        Command::Bounds(BoundsCommand::Eval { bound, params }) => {
            let p = BoundParams { ell: params.ell, mean: params.mean, eta: params.eta, delta: params.delta };
            let value = if bound.is_upper() {
                serde_json::to_value(eval_upper_bound(bound, &p)?)?
            } else {
                serde_json::json!({ "probability": eval_lower_bound(bound, &p)? })
            };
            write_json(None, &value)?;
        }
        Command::Bounds(BoundsCommand::Theorem { which, params }) => {
            let p: TheoremParams = serde_json::from_str(&read_json_arg(&params)?).context("parsing the parameters")?;
            write_json(None, &theorem(which, p)?)?;
        }
        Command::Posterior { data, k, gamma, var } => {
            let d = load_dataset(&data)?;
            println!("{}", theory::posterior_relevance(&d, k, gamma, var)?);
        }
        Command::Source(SourceCommand::Draw { config, seed, m, out }) => {
            let spec = load_source(&config)?;
            save_dataset(&draw_dataset(&spec, m, seed)?, &out)?;
        }
        Command::Error(ErrorCommand::Exact { n, k, l, gamma }) => {
            println!("{}", exact_error(Composition::new(n, k, l)?, gamma)?);
        }
        Command::Error(ErrorCommand::Mc { model, spec, trials, seed }) => {
            let model: VoteModel = serde_json::from_str(&read_file(&model)?).context("parsing the model")?;
            let spec = load_source(&spec)?;
            write_json(None, &mc_error(&model, &spec, trials, seed)?)?;
        }
        Command::Learn { data, beta, positive_only, out } => {
            let table = EdgeTable::from_dataset(&load_dataset(&data)?);
            let model =
                if positive_only { select_positive_model(&table, beta)? } else { select_model(&table, beta)? };
            let mut w = output(out.as_deref())?;
            serde_json::to_writer(&mut w, &model)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Sweep { config, out } => {
            let config: ExperimentConfig = serde_json::from_str(&read_file(&config)?).context("parsing the config")?;
            let records = harness::run_sweep(&config)?;
            let path = out.or_else(|| config.output.as_ref().map(PathBuf::from));
            let mut w = output(path.as_deref())?;
            harness::write_sweep_csv(&records, &mut w)?;
            w.flush()?;
        }
        Command::ReproFig2 { seed, out } => {
            let summary = harness::repro_fig2(seed)?;
            eprintln!(
                "best beta {} error {:.4}, irrelevant fraction {}, best error among <25%-irrelevant models {}",
                edgevote::rational::format_rational(&summary.best_beta),
                summary.best_error,
                summary.best_irrelevant_fraction.map_or("-".into(), |f| format!("{f:.4}")),
                summary.min_error_few_irrelevant.map_or("-".into(), |e| format!("{e:.4}")),
            );
            write_json(out.as_deref(), &summary)?;
        }
        Command::Exclusivity { gammas, replicates, seed, out } => {
            let reports = harness::exclusivity_profile(&gammas, replicates, seed)?;
            let mut w = output(out.as_deref())?;
            harness::write_exclusivity_csv(&reports, &mut w)?;
            w.flush()?;
        }
        Command::Dependence { rs, config, out } => {
            let config: DependenceConfig = serde_json::from_str(&read_file(&config)?).context("parsing the config")?;
            let records = harness::dependence_study(&rs, &config)?;
            let mut w = output(out.as_deref())?;
            harness::write_dependence_csv(&records, &mut w)?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
