use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use polya_aeppli::{check, dist, DistParams, Evaluated, Moments, SampleSpec, WarningKind};

/// Mass, distribution, quantile and random variates of the Pólya-Aeppli
/// distribution. Data goes to standard output (or --out) as CSV.
#[derive(Parser)]
#[command(name = "polya-aeppli", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the mass function as `x,value` rows.
    Pmf {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        points: PointArgs,
        /// Report log P(X = x).
        #[arg(long)]
        log: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the distribution function as `x,value` rows.
    Cdf {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        points: PointArgs,
        /// Report log probabilities.
        #[arg(long)]
        log: bool,
        /// Report P(X > x) instead of P(X <= x).
        #[arg(long)]
        upper_tail: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quantiles of the given probabilities as `p,q` rows.
    Quantile {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        points: PointArgs,
        /// Probabilities are natural logs.
        #[arg(long)]
        log: bool,
        /// Probabilities are P(X > x).
        #[arg(long)]
        upper_tail: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw random variates, one per line.
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant and oracle self-check suite.
    Check,
}

#[derive(Args)]
struct ParamArgs {
    /// Poisson rate of the clump count.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Geometric clump-size parameter in [0, 1).
    #[arg(long, allow_negative_numbers = true)]
    prob: Option<f64>,
    /// Mean (use with --variance instead of --lambda/--prob).
    #[arg(long, allow_negative_numbers = true)]
    mean: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    variance: Option<f64>,
}

#[derive(Args)]
struct PointArgs {
    /// Explicit comma-separated points.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["from", "to", "step"])]
    values: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ArgumentConflict, msg).exit()
}

impl ParamArgs {
    fn resolve(&self) -> polya_aeppli::Result<DistParams> {
        match (self.lambda, self.prob, self.mean, self.variance) {
            (Some(l), Some(p), None, None) => DistParams::new(l, p),
            (None, None, Some(m), Some(v)) => dist::params_from_moments(Moments::new(m, v)?),
            _ => usage_error("give exactly one of --lambda/--prob or --mean/--variance"),
        }
    }
}

impl PointArgs {
    fn resolve(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            return v.clone();
        }
        let (Some(from), Some(to)) = (self.from, self.to) else {
            usage_error("give --values or both --from and --to");
        };
        if !(self.step > 0.0) || !from.is_finite() || !to.is_finite() {
            usage_error("--from/--to must be finite and --step positive");
        }
        if to < from {
            return Vec::new();
        }
        let count = ((to - from) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| from + i as f64 * self.step).collect()
    }
}

/// Shortest round-trip decimal, plain notation in the everyday range.
fn format_num(v: f64) -> String {
    if v == 0.0 || (1e-5..1e16).contains(&v.abs()) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn writer(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn report_warnings(points: &[f64], result: &Evaluated) {
    for w in &result.warnings {
        let what = match w.kind {
            WarningKind::NonInteger => "non-integer point, mass is zero",
            WarningKind::OutOfDomain => "probability out of range, result is NaN",
        };
        eprintln!("warning: element {} ({}): {what}", w.index, format_num(points[w.index]));
    }
}

fn write_table(out: &Option<PathBuf>, header: &str, points: &[f64], values: &[f64]) -> io::Result<()> {
    let mut w = writer(out)?;
    writeln!(w, "{header}")?;
    for (x, v) in points.iter().zip(values) {
        writeln!(w, "{},{}", format_num(*x), format_num(*v))?;
    }
    w.flush()
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Pmf { params, points, log, out } => {
            let params = params.resolve()?;
            let xs = points.resolve();
            let result = dist::pmf(&xs, params, log)?;
            report_warnings(&xs, &result);
            write_table(&out, "x,value", &xs, &result.values)?;
        }
        Command::Cdf { params, points, log, upper_tail, out } => {
            let params = params.resolve()?;
            let xs = points.resolve();
            let result = dist::cdf(&xs, params, !upper_tail, log)?;
            write_table(&out, "x,value", &xs, &result.values)?;
        }
        Command::Quantile { params, points, log, upper_tail, out } => {
            let params = params.resolve()?;
            let ps = points.resolve();
            let result = dist::quantile(&ps, params, !upper_tail, log)?;
            report_warnings(&ps, &result);
            write_table(&out, "p,q", &ps, &result.values)?;
        }
        Command::Sample { params, n, seed, out } => {
            let params = params.resolve()?;
            let draws = polya_aeppli::sample(SampleSpec { n, seed }, params);
            let mut w = writer(&out)?;
            for d in draws {
                writeln!(w, "{d}")?;
            }
            w.flush()?;
        }
        Command::Check => {
            let mut failed = 0;
            for c in check::suite() {
                let report = check::run(&c);
                failed += usize::from(!report.passed);
                println!("{report}");
            }
            if failed > 0 {
                eprintln!("{failed} check(s) failed");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
