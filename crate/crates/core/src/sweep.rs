//! Parameter sweeps, figure data and CSV output behind the command-line tool.
//!
//! Rows are computed in parallel and written in input order, so the same
//! arguments always produce the same bytes.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heralding::{
    asymptotic_pn, fit_gamma, optimize, optimize_added, optimize_parity, AsymptoticRegime,
    OptResult, ScalingFit,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Figure 3 photon numbers; the source lists four curves without their values.
pub const FIGURE3_N: [usize; 4] = [2, 5, 10, 20];
pub const FIGURE_S0: [f64; 3] = [0.5, 1.0, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Two,
    Three,
    FourA,
    FourB,
    FourC,
}

impl std::str::FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(Figure::Two),
            "3" => Ok(Figure::Three),
            "4a" => Ok(Figure::FourA),
            "4b" => Ok(Figure::FourB),
            "4c" => Ok(Figure::FourC),
            other => Err(Error::InvalidParameter(format!(
                "unknown figure {other:?}; expected 2, 3, 4a, 4b or 4c"
            ))),
        }
    }
}

impl Figure {
    /// `delta0` of the figure-4 panels.
    pub fn delta0(self) -> Complex64 {
        match self {
            Figure::FourA => Complex64::new(1.0, 0.0),
            Figure::FourB => Complex64::new(0.0, 1.0),
            Figure::FourC => Complex64::from_polar(1.0, PI / 4.0),
            Figure::Two | Figure::Three => Complex64::new(0.0, 0.0),
        }
    }
}

/// What to compute: curves of optimal `P_n` over `n` or over `s0`.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepMode {
    FixedNSweepS0,
    FixedParamsSweepN,
    Figure(Figure),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub n_values: Vec<usize>,
    pub s0_values: Vec<f64>,
    pub delta0_values: Vec<Complex64>,
}

impl SweepSpec {
    pub fn figure(figure: Figure) -> Self {
        let (n_values, s0_values) = match figure {
            Figure::Three => (
                FIGURE3_N.to_vec(),
                (0..81).map(|i| 2.0 * i as f64 / 80.0).collect(),
            ),
            _ => (default_figure_n(), FIGURE_S0.to_vec()),
        };
        SweepSpec {
            mode: SweepMode::Figure(figure),
            n_values,
            s0_values,
            delta0_values: vec![figure.delta0()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.s0_values.is_empty() || self.delta0_values.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one n, s0 and delta0".into()));
        }
        if let Some(s) = self.s0_values.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::InvalidParameter(format!("s0 must be finite and nonnegative, got {s}")));
        }
        if let Some(d) = self.delta0_values.iter().find(|d| !(d.re.is_finite() && d.im.is_finite())) {
            return Err(Error::InvalidParameter(format!("delta0 must be finite, got {d}")));
        }
        Ok(())
    }

    /// Curves in output order. A curve varies `n` unless the mode sweeps `s0`.
    pub fn curves(&self) -> Vec<Curve> {
        let sweep_s0 = matches!(
            self.mode,
            SweepMode::FixedNSweepS0 | SweepMode::Figure(Figure::Three)
        );
        let mut out = Vec::new();
        for &d in &self.delta0_values {
            if sweep_s0 {
                for &n in &self.n_values {
                    out.push(Curve {
                        points: self.s0_values.iter().map(|&s| (n, s, d)).collect(),
                        over_n: false,
                    });
                }
            } else {
                for &s in &self.s0_values {
                    out.push(Curve {
                        points: self.n_values.iter().map(|&n| (n, s, d)).collect(),
                        over_n: true,
                    });
                }
            }
        }
        out
    }
}

/// `{1..20}` followed by log-spaced points from 20 to 2000.
pub fn default_figure_n() -> Vec<usize> {
    let mut n: Vec<usize> = (1..=20).collect();
    n.extend(log_spaced_n(20, 2000, 21).into_iter().filter(|&k| k > 20));
    n
}

/// Rounded log-spaced integers in `[n_min, n_max]`, deduplicated.
pub fn log_spaced_n(n_min: usize, n_max: usize, points: usize) -> Vec<usize> {
    assert!(n_min >= 1 && n_max >= n_min && points >= 1);
    if points == 1 {
        return vec![n_min];
    }
    let (a, b) = ((n_min as f64).ln(), (n_max as f64).ln());
    let mut out: Vec<usize> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}

pub fn linear_n(n_min: usize, n_max: usize, points: usize) -> Vec<usize> {
    if points <= 1 || n_max == n_min {
        return vec![n_min];
    }
    let mut out: Vec<usize> = (0..points)
        .map(|i| {
            (n_min as f64 + (n_max - n_min) as f64 * i as f64 / (points - 1) as f64).round() as usize
        })
        .collect();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub points: Vec<(usize, f64, Complex64)>,
    pub over_n: bool,
}

#[derive(Debug, Clone)]
pub struct CurveResult {
    pub curve: Curve,
    pub rows: Vec<OptResult>,
}

impl CurveResult {
    /// Power-law fit over the upper decade of `n`, if it holds enough points.
    pub fn upper_decade_fit(&self) -> Option<ScalingFit> {
        if !self.curve.over_n {
            return None;
        }
        let n_max = self.rows.iter().map(|r| r.n).max()?;
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.n >= 1 && 10 * r.n >= n_max)
            .map(|r| (r.n as f64, r.log_pn))
            .collect();
        fit_gamma(&pts).ok()
    }

    /// `max P_n / min P_n` along the curve.
    pub fn spread(&self) -> f64 {
        let lo = self.rows.iter().map(|r| r.log_pn).fold(f64::INFINITY, f64::min);
        let hi = self.rows.iter().map(|r| r.log_pn).fold(f64::NEG_INFINITY, f64::max);
        (hi - lo).exp()
    }
}

/// Evaluates every curve, in parallel, preserving order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<CurveResult>> {
    spec.validate()?;
    spec.curves()
        .into_iter()
        .map(|curve| {
            let rows = curve
                .points
                .par_iter()
                .map(|&(n, s0, d)| optimize(n, s0, d))
                .collect::<Result<Vec<_>>>()?;
            Ok(CurveResult { curve, rows })
        })
        .collect()
}

/// Formats a float in scientific notation with 15 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.14e}")
}

pub const SWEEP_HEADER: &str = "s0,delta0_re,delta0_im,n,lambda_sq_opt,Pn,ln_Pn,feasibility_margin,method";

fn header_comments(out: &mut String, invocation: &str) {
    let _ = writeln!(out, "# gbs-herald {VERSION}");
    let _ = writeln!(out, "# invocation: {invocation}");
}

/// CSV text for a finished sweep, with fits or spreads as trailing comments.
pub fn sweep_csv(spec: &SweepSpec, results: &[CurveResult], invocation: &str) -> String {
    let mut out = String::new();
    header_comments(&mut out, invocation);
    if spec.mode == SweepMode::Figure(Figure::Three) {
        let _ = writeln!(
            out,
            "# n values {FIGURE3_N:?} are placeholder choices"
        );
    }
    let _ = writeln!(out, "{SWEEP_HEADER}");
    for res in results {
        for r in &res.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                sci(r.s0),
                sci(r.delta0.0),
                sci(r.delta0.1),
                r.n,
                sci(r.lambda_sq_opt),
                sci(r.pn),
                sci(r.log_pn),
                sci(r.feasibility_margin),
                r.method
            );
        }
    }
    for res in results {
        let first = &res.rows[0];
        if res.curve.over_n {
            match res.upper_decade_fit() {
                Some(fit) => {
                    let _ = writeln!(
                        out,
                        "# fit s0={} delta0={}{:+}i gamma={} prefactor={} residual={} n_range={}..{}",
                        first.s0,
                        first.delta0.0,
                        first.delta0.1,
                        sci(fit.gamma),
                        sci(fit.prefactor),
                        sci(fit.residual),
                        fit.n_range.0,
                        fit.n_range.1
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "# fit s0={} delta0={}{:+}i unavailable (fewer than 5 points in the upper decade)",
                        first.s0, first.delta0.0, first.delta0.1
                    );
                }
            }
        } else {
            let _ = writeln!(
                out,
                "# spread n={} delta0={}{:+}i max/min={}",
                first.n,
                first.delta0.0,
                first.delta0.1,
                sci(res.spread())
            );
        }
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

/// Parses `a+bi`, `a`, `bi`, `i`, `-i` and similar; exponents are allowed.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidParameter(format!("cannot parse complex number {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split before the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().map_err(|_| bad())?
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Comma-separated list of complex numbers.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>> {
    text.split(',').map(parse_complex).collect()
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse number {t:?}")))
        })
        .collect()
}

/// Exact optimum against the asymptotic form for each `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticRow {
    pub regime: &'static str,
    pub param: f64,
    pub n: usize,
    pub ln_exact: f64,
    pub ln_asymptotic: f64,
}

impl AsymptoticRow {
    pub fn ratio(&self) -> f64 {
        (self.ln_exact - self.ln_asymptotic).exp()
    }
}

pub fn asymptotic_table(n_values: &[usize], alpha_abs: f64) -> Result<Vec<AsymptoticRow>> {
    let regimes = [
        ("parity_s1", AsymptoticRegime::ParityS1),
        ("fock_s0", AsymptoticRegime::FockS0),
        ("added", AsymptoticRegime::Added { alpha_abs }),
    ];
    let mut jobs = Vec::new();
    for (name, regime) in regimes {
        for &n in n_values {
            jobs.push((name, regime, n));
        }
    }
    jobs.par_iter()
        .map(|&(name, regime, n)| {
            let (exact, param) = match regime {
                AsymptoticRegime::ParityS1 => (optimize_parity(n, 1.0)?, 1.0),
                AsymptoticRegime::FockS0 => (optimize_parity(n, 0.0)?, 0.0),
                AsymptoticRegime::Added { alpha_abs } => (optimize_added(n, alpha_abs)?, alpha_abs),
            };
            Ok(AsymptoticRow {
                regime: name,
                param,
                n,
                ln_exact: exact.log_pn,
                ln_asymptotic: asymptotic_pn(regime, n)?.ln(),
            })
        })
        .collect()
}

pub fn asymptotic_csv(rows: &[AsymptoticRow], invocation: &str) -> String {
    let mut out = String::new();
    header_comments(&mut out, invocation);
    let _ = writeln!(out, "regime,param,n,ln_Pn_exact,ln_Pn_asymptotic,ratio");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.regime,
            sci(r.param),
            r.n,
            sci(r.ln_exact),
            sci(r.ln_asymptotic),
            sci(r.ratio())
        );
    }
    out
}
