use clap::{Args, Parser, Subcommand};
use costab::cli::{self, Context, DEFAULT_SEED};
use costab::field::FieldChoice;
use costab::report::Report;
use costab::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Co-slicings and co-stability conditions on homotopy categories of small quiver algebras.
#[derive(Parser)]
#[command(name = "costab", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Builtin algebra (trivial, a2, dual, kxk) or algebra file.
    #[arg(long, global = true, default_value = "a2")]
    algebra: String,
    /// Snapshot file to use instead of building one.
    #[arg(long, global = true)]
    snapshot: Option<PathBuf>,
    /// Suspension window, e.g. "-2,2".
    #[arg(long, global = true, default_value = "-2,2", value_parser = parse_window, allow_hyphen_values = true)]
    window: (i32, i32),
    /// Width bound for indecomposable complexes.
    #[arg(long, global = true, default_value_t = 2)]
    width: usize,
    /// Coefficient field: Q or Fp.
    #[arg(long, global = true, default_value = "Q")]
    field: FieldChoice,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the report (and any artifact next to it) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check snapshot, co-t-structure, co-slicing and condition files.
    Validate { paths: Vec<PathBuf> },
    /// Co-hearts and the rotation-scaling chart on the dual numbers.
    DemoTheoremB {
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Condition (S) failing on the arrow algebra and the missing deformation.
    DemoCounterexample {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.25, 0.49])]
        eps: Vec<f64>,
    },
    /// Deform a condition file to a new charge.
    Deform {
        condition: PathBuf,
        charge: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
        /// Snap new phases to rationals with at most this denominator.
        #[arg(long)]
        snap_denominator: Option<i64>,
    },
    /// Distance between two co-slicing files.
    Metric { a: PathBuf, b: PathBuf },
    /// Filtration of an object by the co-heart of a co-t-structure file.
    Hn { cotstructure: PathBuf, object: String },
    /// List the co-hearts in the window.
    EnumerateCohearts,
}

fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi = b.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err("LO must not exceed HI".into());
    }
    Ok((lo, hi))
}

fn emit(out: Option<&Path>, timing: bool, report: &Report, artifact: Option<(&str, &str)>) -> Result<(), Error> {
    let mut report = report.clone();
    if !timing {
        report.elapsed_ms = None;
    }
    match out {
        Some(path) => {
            if let Some((ext, text)) = artifact {
                let a = path.with_extension(ext);
                std::fs::write(&a, text).map_err(|e| Error::Io(format!("{}: {e}", a.display())))?;
                report.artifacts.push(a.display().to_string());
            }
            std::fs::write(path, report.to_text()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            eprint!("{report}");
        }
        None => {
            print!("{}", report.to_text());
            if let Some((_, text)) = artifact {
                println!();
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, Error> {
    let c = cli.common;
    let ctx = Context {
        algebra: c.algebra,
        snapshot: c.snapshot,
        window: c.window,
        width: c.width,
        field: c.field,
        seed: c.seed,
    };
    let out = c.out.as_deref();
    let timing = c.timing;
    let report = match cli.command {
        Command::Validate { paths } => {
            let r = cli::cmd_validate(&ctx, &paths)?;
            emit(out, timing, &r, None)?;
            r
        }
        Command::DemoTheoremB { samples } => {
            let w = cli::cmd_demo_theorem_b(&ctx, samples)?;
            emit(out, timing, &w.report, Some(("csv", &w.csv)))?;
            w.report
        }
        Command::DemoCounterexample { eps } => {
            let r = cli::cmd_demo_counterexample(&ctx, &eps)?;
            emit(out, timing, &r, None)?;
            r
        }
        Command::Deform { condition, charge, eps, snap_denominator } => {
            let d = cli::cmd_deform(&ctx, &condition, &charge, eps, snap_denominator)?;
            emit(out, timing, &d.report, d.condition.as_deref().map(|t| ("condition.toml", t)))?;
            d.report
        }
        Command::Metric { a, b } => {
            let r = cli::cmd_metric(&ctx, &a, &b)?;
            emit(out, timing, &r, None)?;
            r
        }
        Command::Hn { cotstructure, object } => {
            let r = cli::cmd_hn(&ctx, &cotstructure, &object)?;
            emit(out, timing, &r, None)?;
            r
        }
        Command::EnumerateCohearts => {
            let r = cli::cmd_enumerate_cohearts(&ctx)?;
            emit(out, timing, &r, None)?;
            r
        }
    };
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            // refusals and bad input are failures, not undecided
            ExitCode::from(1)
        }
    }
}
