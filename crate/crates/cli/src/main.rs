use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use quadwalk::algebra::{parse_rational, AlgebraicNumber};
use quadwalk::asymptotics::{periodicity, singular_exponent};
use quadwalk::counting::{count_walks, Endpoint, Series};
use quadwalk::group::orbit_search;
use quadwalk::guess::{guess_recurrence, Guess};
use quadwalk::pipeline::{
    batch, classify_model, verify, BatchEntry, BatchOutcome, ClassificationReport, Config, Summary,
};
use quadwalk::{parse_model, Model};

#[derive(Parser)]
#[command(name = "quadwalk", version, about = "Classify small-step lattice walk models")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Options {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest group order explored before giving up on finiteness.
    #[arg(long, global = true, default_value_t = 200)]
    bound: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Value substituted for the third variable of 3D models.
    #[arg(long, global = true, default_value = "1/7", value_parser = rational)]
    specialization: BigRational,
    /// Try the valuation argument before the fixed-point argument.
    #[arg(long, global = true)]
    valuation_first: bool,
    /// Record per-stage timings in reports (makes output nondeterministic).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one model.
    Classify {
        #[arg(allow_hyphen_values = true)]
        model: String,
    },
    /// Classify every model of a corpus file, one model per line.
    Batch {
        file: PathBuf,
        /// Worker threads; all cores by default.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Count walks and print the series.
    Count {
        #[arg(allow_hyphen_values = true)]
        model: String,
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        /// `origin`, `all`, or a point such as `2,0`.
        #[arg(long, default_value = "origin")]
        endpoint: Endpoint,
    },
    /// Search for a linear recurrence with polynomial coefficients.
    Guess {
        /// A model, or a series file written by `count` when --series is set.
        #[arg(allow_hyphen_values = true)]
        input: String,
        #[arg(long)]
        series: bool,
        #[arg(long, default_value_t = 160)]
        horizon: usize,
        #[arg(long, default_value = "origin")]
        endpoint: Endpoint,
        #[arg(long, default_value_t = 6)]
        max_order: usize,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
    },
    /// Critical point, growth constant and exponent of excursions.
    Asymptotics {
        #[arg(allow_hyphen_values = true)]
        model: String,
        /// Horizon for the period computation.
        #[arg(long, default_value_t = 60)]
        horizon: usize,
    },
    /// Order of the group of the model, up to --bound.
    GroupOrder {
        #[arg(allow_hyphen_values = true)]
        model: String,
    },
    /// Re-check the certificates in JSON reports (one per line).
    Verify { file: PathBuf },
}

fn rational(s: &str) -> Result<BigRational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational number: {s}"))
}

/// Failures, by exit code.
enum Failure {
    Usage(String),
    Parse(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.into())
    }
}

fn model(text: &str) -> Result<Model, Failure> {
    parse_model(text).map_err(|e| Failure::Parse(format!("{text}: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Parse(m)) => {
            eprintln!("parse error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn config(o: &Options) -> Config {
    Config {
        bound: o.bound,
        seed: o.seed,
        specialization: o.specialization.clone(),
        valuation_first: o.valuation_first,
        timings: o.timings,
        ..Config::default()
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = io::stdout();
    let mut out = BufWriter::new(out.lock());
    let json = cli.opts.json;
    match &cli.command {
        Command::Classify { model: text } => {
            let r = classify_model(&model(text)?, &config(&cli.opts));
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&r).context("serializing report")?)?;
            } else {
                write_report(&mut out, &r)?;
            }
        }
        Command::Batch { file, jobs } => {
            if *jobs == Some(0) {
                return Err(Failure::Usage("--jobs must be positive".into()));
            }
            let corpus = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let (entries, summary) = batch(&corpus, &config(&cli.opts), *jobs);
            write_batch(&mut out, &entries, &summary, json)?;
            out.flush()?;
            if summary.parse_errors > 0 {
                return Err(Failure::Parse(format!("{} line(s) failed to parse", summary.parse_errors)));
            }
        }
        Command::Count { model: text, horizon, endpoint } => {
            let s = count_walks(&model(text)?, *horizon, endpoint).context("counting walks")?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&s).context("serializing series")?)?;
            } else {
                write!(out, "{}", s.to_text())?;
            }
        }
        Command::Guess { input, series, horizon, endpoint, max_order, max_degree } => {
            let s = if *series {
                let text = fs::read_to_string(input).with_context(|| format!("reading {input}"))?;
                Series::from_text(&text).map_err(|e| Failure::Parse(e.to_string()))?
            } else {
                count_walks(&model(input)?, *horizon, endpoint).context("counting walks")?
            };
            let g = guess_recurrence(&s.terms, *max_order, *max_degree).map_err(|e| Failure::Usage(e.to_string()))?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&g).context("serializing guess")?)?;
            } else {
                match g {
                    Guess::Found(r) => {
                        writeln!(out, "recurrence of order {} and degree {}, verified on all {} terms", r.order, r.degree, s.terms.len())?;
                        writeln!(out, "{r}")?;
                    }
                    Guess::NoneFound { max_order, max_degree, terms } => writeln!(
                        out,
                        "no recurrence with order <= {max_order} and degree <= {max_degree} fits {terms} terms (evidence only)"
                    )?,
                }
            }
        }
        Command::Asymptotics { model: text, horizon } => {
            let m = model(text)?;
            let a = singular_exponent(&m).map_err(|e| Failure::Usage(e.to_string()))?;
            let period = periodicity(&m, *horizon).ok();
            let w = BigRational::new(1.into(), BigInt::from(1u64 << 50));
            let f = |x: &AlgebraicNumber| x.refine(&w).to_f64();
            if json {
                let v = serde_json::json!({
                    "x0": f(&a.x0),
                    "y0": f(&a.y0),
                    "rho": f(&a.rho),
                    "c": f(&a.c),
                    "period": period,
                    "exact": a,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v).context("serializing")?)?;
            } else {
                writeln!(out, "critical point: ({:.12}, {:.12})", f(&a.x0), f(&a.y0))?;
                writeln!(out, "rho: {:.12}  (root of {})", f(&a.rho), a.rho.annihilator())?;
                writeln!(out, "c: {:.12}  (root of {})", f(&a.c), a.c.annihilator())?;
                writeln!(out, "arccos(-c)/pi: {}", a.angle)?;
                match a.alpha.value() {
                    Some(v) => writeln!(out, "alpha: {v}")?,
                    None => writeln!(
                        out,
                        "alpha: irrational, in [{:.9}, {:.9}]",
                        a.alpha_numeric.0 .0, a.alpha_numeric.1 .0
                    )?,
                }
                match period {
                    Some(p) => writeln!(out, "period: {p}")?,
                    None => writeln!(out, "period: no excursion up to length {horizon}")?,
                }
            }
        }
        Command::GroupOrder { model: text } => {
            let r = orbit_search(&model(text)?, cli.opts.bound, cli.opts.seed)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&r).context("serializing")?)?;
            } else {
                match r.verdict {
                    quadwalk::group::GroupOrder::Finite(n) => writeln!(out, "finite, order {n}")?,
                    quadwalk::group::GroupOrder::ExceedsBound(b) => writeln!(out, "order exceeds {b}")?,
                }
            }
        }
        Command::Verify { file } => {
            let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let mut failed = 0;
            for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let value: serde_json::Value =
                    serde_json::from_str(line).map_err(|e| Failure::Parse(format!("line {}: {e}", i + 1)))?;
                let Some(report) =
                    value.get("report").cloned().or(Some(value.clone())).filter(|v| v.get("model").is_some())
                else {
                    continue;
                };
                let r: ClassificationReport =
                    serde_json::from_value(report).map_err(|e| Failure::Parse(format!("line {}: {e}", i + 1)))?;
                let v = verify(&r);
                let ok = v.passed();
                failed += usize::from(!ok);
                if json {
                    writeln!(
                        out,
                        "{}",
                        serde_json::json!({ "line": i + 1, "model": r.model, "passed": ok, "checks": v.checks })
                    )?;
                } else {
                    writeln!(out, "{} {}", if ok { "ok  " } else { "FAIL" }, r.model)?;
                    for (name, ok) in &v.checks {
                        writeln!(out, "     {} {name}", if *ok { "+" } else { "-" })?;
                    }
                }
            }
            out.flush()?;
            if failed > 0 {
                return Err(Failure::Internal(anyhow::anyhow!("{failed} report(s) failed verification")));
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn write_report(out: &mut impl Write, r: &ClassificationReport) -> io::Result<()> {
    writeln!(out, "model: {}", r.model)?;
    writeln!(out, "dimension: {} (effective {})", r.dimension, r.effective_dimension)?;
    if let Some(s) = r.singular {
        writeln!(out, "singular: {s}")?;
    }
    writeln!(out, "group: {}", r.group)?;
    writeln!(out, "non-D-finite: {}", r.nondfinite)?;
    if let Some(a) = &r.asymptotics {
        writeln!(out, "rho: {:.12}", a.rho)?;
        match a.alpha_verdict.value() {
            Some(v) => writeln!(out, "alpha: {v}")?,
            None => writeln!(out, "alpha: irrational, in [{:.9}, {:.9}]", a.alpha.0, a.alpha.1)?,
        }
        if let Some(p) = a.period {
            writeln!(out, "period: {p}")?;
        }
    }
    for e in &r.stage_errors {
        writeln!(out, "note ({}): {}", e.stage, e.message)?;
    }
    Ok(())
}

fn write_batch(out: &mut impl Write, entries: &[BatchEntry], summary: &Summary, json: bool) -> io::Result<()> {
    for e in entries {
        if json {
            writeln!(out, "{}", serde_json::to_string(e).map_err(io::Error::other)?)?;
            continue;
        }
        match &e.outcome {
            BatchOutcome::Report(r) => writeln!(
                out,
                "{:>5}  {:<22} {:<31} {}",
                e.line,
                r.group.to_string(),
                r.nondfinite.to_string(),
                r.model
            )?,
            BatchOutcome::ParseError(m) => writeln!(out, "{:>5}  parse error: {m}", e.line)?,
        }
    }
    if json {
        writeln!(out, "{}", serde_json::json!({ "summary": summary }))?;
    } else {
        writeln!(out, "models: {}  parse errors: {}", summary.models, summary.parse_errors)?;
        for (k, v) in &summary.group {
            writeln!(out, "  group {k}: {v}")?;
        }
        for (k, v) in &summary.nondfinite {
            writeln!(out, "  non-D-finite {k}: {v}")?;
        }
    }
    Ok(())
}
