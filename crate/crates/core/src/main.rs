use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gbs_herald::heralding::optimize;
use gbs_herald::sweep::{
    asymptotic_csv, asymptotic_table, linear_n, log_spaced_n, parse_complex, parse_complex_list,
    parse_f64_list, run_sweep, sweep_csv, write_file, Figure, SweepMode, SweepSpec,
};
use gbs_herald::verify::{oracle_check, OracleGrid, MIN_TOLERANCE};
use gbs_herald::{CoreParams, Error};

#[derive(Parser)]
#[command(name = "gbs-herald", version, about = "Optimal heralding probabilities of (a^dag + s0 a + delta0)^n |0>")]
struct Cli {
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal lambda^2 and P_n for one parameter point
    Optimize {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        s0: f64,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        delta0: String,
    },
    /// Optimal P_n over a grid of n, s0 and delta0
    Sweep {
        #[command(flatten)]
        range: NRange,
        /// Comma-separated s0 values
        #[arg(long, default_value = "0")]
        s0: String,
        /// Comma-separated complex values such as 0.3+0.2i
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        delta0: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Figure data as CSV: 2, 3, 4a, 4b or 4c
    Figure {
        which: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optima against the large-n asymptotic forms
    Asymptotics {
        #[command(flatten)]
        range: NRange,
        /// Displacement for the photon-added regime; only its modulus matters
        #[arg(long, default_value = "2", allow_hyphen_values = true)]
        delta0: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare analytic P_n and conditional states with the Fock oracle
    OracleCheck {
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// lambda^2 points per s0 on the grid
        #[arg(long, default_value_t = 5)]
        grid: usize,
        /// Largest photon number checked
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Check a single point instead of the grid (needs --s0 and --delta0)
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        s0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        delta0: Option<String>,
        /// Print the per-point table
        #[arg(long)]
        table: bool,
    },
}

#[derive(Args)]
struct NRange {
    /// Comma-separated photon numbers
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, default_value_t = 10)]
    n_points: usize,
    /// Space the range logarithmically
    #[arg(long)]
    log_n: bool,
}

impl NRange {
    fn values(&self, default: &[usize]) -> Result<Vec<usize>, Error> {
        if let Some(list) = &self.n {
            return list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("cannot parse n {t:?}")))
                })
                .collect();
        }
        match (self.n_min, self.n_max) {
            (Some(lo), Some(hi)) if hi >= lo => {
                if self.log_n {
                    if lo == 0 {
                        return Err(Error::InvalidParameter("--log-n needs --n-min >= 1".into()));
                    }
                    Ok(log_spaced_n(lo, hi, self.n_points.max(1)))
                } else {
                    Ok(linear_n(lo, hi, self.n_points))
                }
            }
            (None, None) => Ok(default.to_vec()),
            _ => Err(Error::InvalidParameter("--n-min and --n-max go together, with n-min <= n-max".into())),
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli, invocation: &str) -> Result<ExitCode, Error> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    match cli.command {
        Command::Optimize { n, s0, delta0 } => {
            let r = optimize(n, s0, parse_complex(&delta0)?)?;
            println!("lambda^2_opt       = {:.15e}", r.lambda_sq_opt);
            println!("P_n                = {:.15e}", r.pn);
            println!("ln P_n             = {:.15e}", r.log_pn);
            println!("method             = {}", r.method);
            println!("feasibility margin = {:.15e}", r.feasibility_margin);
            println!("{}", serde_json::to_string(&r).expect("serializable result"));
        }
        Command::Sweep { range, s0, delta0, out } => {
            let n_values = range.values(&[1])?;
            let s0_values = parse_f64_list(&s0)?;
            let mode = if n_values.len() == 1 && s0_values.len() > 1 {
                SweepMode::FixedNSweepS0
            } else {
                SweepMode::FixedParamsSweepN
            };
            let spec = SweepSpec {
                mode,
                n_values,
                s0_values,
                delta0_values: parse_complex_list(&delta0)?,
            };
            emit(out.as_ref(), &sweep_csv(&spec, &run_sweep(&spec)?, invocation))?;
        }
        Command::Figure { which, out } => {
            let spec = SweepSpec::figure(which.parse::<Figure>()?);
            emit(out.as_ref(), &sweep_csv(&spec, &run_sweep(&spec)?, invocation))?;
        }
        Command::Asymptotics { range, delta0, out } => {
            let n_values = range.values(&log_spaced_n(10, 100_000, 9))?;
            if n_values.contains(&0) {
                return Err(Error::InvalidParameter("asymptotic forms need n >= 1".into()));
            }
            let rows = asymptotic_table(&n_values, parse_complex(&delta0)?.norm())?;
            emit(out.as_ref(), &asymptotic_csv(&rows, invocation))?;
        }
        Command::OracleCheck { tol, grid, n, lambda, s0, delta0, table } => {
            let points = match lambda {
                Some(lambda) => {
                    let d = parse_complex(delta0.as_deref().unwrap_or("0"))?;
                    vec![CoreParams::new(lambda, s0.unwrap_or(0.0), d)?]
                }
                None => OracleGrid {
                    lambda_sq_points: grid.max(1),
                    n_max: n,
                    ..OracleGrid::default()
                }
                .points(),
            };
            let single = lambda.is_some();
            let report = oracle_check(&points, n, tol)?;
            if table || single {
                print!("{}", report.table());
            }
            if let Some(w) = report.worst_deviation() {
                println!(
                    "worst |dP| = {:.3e} at lambda^2={} s0={} delta0={} n={}",
                    w.deviation(), w.lambda_sq, w.s0, w.delta0, w.n
                );
            }
            if let Some(w) = report.worst_infidelity() {
                println!(
                    "worst 1-F  = {:.3e} at lambda^2={} s0={} delta0={} n={}",
                    w.infidelity(), w.lambda_sq, w.s0, w.delta0, w.n
                );
            }
            println!("checked {} (point, n) pairs at tolerance {tol:e}", report.rows.len());
            if report.passed() {
                println!("PASS");
            } else {
                if tol < MIN_TOLERANCE {
                    eprintln!("tolerance {tol:e} is below the certifiable floor {MIN_TOLERANCE:e}");
                }
                for v in report.violations().iter().take(10) {
                    eprintln!(
                        "violation: lambda^2={} s0={} delta0={} n={} |dP|={:.3e} 1-F={:.3e}",
                        v.lambda_sq, v.s0, v.delta0, v.n, v.deviation(), v.infidelity()
                    );
                }
                println!("FAIL");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let invocation = std::iter::once("gbs-herald".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ");
    match run(Cli::parse(), &invocation) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
