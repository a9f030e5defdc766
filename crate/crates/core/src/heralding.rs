//! Heralding probability `P_n(lambda)` and its maximization over `lambda^2`.
//!
//! `P_n = lambda^(2n) / n! * |Z|^2 * <psi_n|psi_n>`. Only `|Z|^2` and the power
//! of `lambda` depend on `lambda`, so a [`HeraldingCurve`] computes the state
//! norm once and evaluates any `lambda^2` in constant time.
//!
//! Setting `dP_n / dlambda = 0` gives, in `x = lambda^2`, the quartic
//!
//! ```text
//! n - (1 + |d|^2 + 4n) x
//!   + [2|d|^2 + 4n + 3 - s^2 + 2n(1 - s^2) - 2 Re(d^2) s] x^2
//!   - [(1 - s^2)(3 + 4n) + |d|^2 (1 + s^2) - 2 Re(d^2) s] x^3
//!   + (1 - s^2)^2 (1 + n) x^4 = 0
//! ```
//!
//! with `s = s0`, `d = delta0`. For `delta0 = 0` or `s0 = 0` it factors into
//! a quadratic times a polynomial whose roots sit on the physicality boundary.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::core_state::{psi_norm, z_squared, CoreParams};
use crate::error::{Error, Result};
use crate::logprob::{ln_factorial, LogProb};
use crate::poly::Polynomial;

/// Roots with a larger imaginary part are not considered real.
pub const ROOT_IMAG_TOL: f64 = 1e-9;
/// Distance kept from both ends of the feasible interval `(0, 1/(1+s0))`.
pub const ROOT_EDGE_TOL: f64 = 1e-12;

pub fn log_pn(p: &CoreParams, n: usize) -> LogProb {
    HeraldingCurve::new(n, p.s0(), p.delta0()).log_pn(p)
}

/// `P_n` as a function of `lambda^2` at fixed `(n, s0, delta0)`.
#[derive(Debug, Clone, Copy)]
pub struct HeraldingCurve {
    n: usize,
    s0: f64,
    delta0: Complex64,
    /// `ln(<psi_n|psi_n> / n!)`
    ln_norm_over_fact: f64,
}

impl HeraldingCurve {
    pub fn new(n: usize, s0: f64, delta0: Complex64) -> Self {
        let ln_norm_over_fact = psi_norm(n, s0, delta0).ln() - ln_factorial(n);
        HeraldingCurve {
            n,
            s0,
            delta0,
            ln_norm_over_fact,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn delta0(&self) -> Complex64 {
        self.delta0
    }

    /// Upper end of the physical interval for `lambda^2`.
    pub fn lambda_sq_bound(&self) -> f64 {
        1.0 / (1.0 + self.s0)
    }

    pub fn log_pn(&self, p: &CoreParams) -> LogProb {
        debug_assert_eq!(p.s0(), self.s0);
        let ln_z = z_squared(p).ln();
        if self.n == 0 {
            return LogProb::from_ln(ln_z);
        }
        let ln_x = p.lambda_sq().ln();
        LogProb::from_ln(self.n as f64 * ln_x + ln_z + self.ln_norm_over_fact)
    }

    /// `ln P_n`, or `-inf` outside the physical interval.
    pub fn ln_pn_at(&self, lambda_sq: f64) -> f64 {
        match CoreParams::from_lambda_sq(lambda_sq, self.s0, self.delta0) {
            Ok(p) => self.log_pn(&p).ln(),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    /// The extremality quartic in `lambda^2`.
    pub fn extremality_polynomial(&self) -> Polynomial {
        extremality_polynomial(self.n, self.s0, self.delta0)
    }
}

pub fn extremality_polynomial(n: usize, s0: f64, delta0: Complex64) -> Polynomial {
    let nf = n as f64;
    let s2 = s0 * s0;
    let d2 = delta0.norm_sqr();
    let re_d2 = (delta0 * delta0).re;
    let one_s2 = 1.0 - s2;
    Polynomial::new(vec![
        nf,
        -(1.0 + d2 + 4.0 * nf),
        2.0 * d2 + 4.0 * nf + 3.0 - s2 + 2.0 * nf * one_s2 - 2.0 * re_d2 * s0,
        -(one_s2 * (3.0 + 4.0 * nf) + d2 * (1.0 + s2) - 2.0 * re_d2 * s0),
        one_s2 * one_s2 * (1.0 + nf),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedFormParity,
    ClosedFormAdded,
    PolynomialGeneral,
    /// No feasible real root; bounded golden-section search.
    GoldenSection,
    /// `n = 0`: the supremum `P_0 -> 1` sits at `lambda -> 0`.
    Boundary,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ClosedFormParity => "closed_form_parity",
            Method::ClosedFormAdded => "closed_form_added",
            Method::PolynomialGeneral => "polynomial_general",
            Method::GoldenSection => "golden_section",
            Method::Boundary => "boundary",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateRoot {
    pub root: f64,
    pub feasible: bool,
    /// `ln P_n` at the root when it is feasible.
    pub log_pn: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub n: usize,
    pub s0: f64,
    pub delta0: (f64, f64),
    pub lambda_sq_opt: f64,
    pub log_pn: f64,
    /// `exp(log_pn)`, or `0.0` below the linear floor.
    pub pn: f64,
    pub candidate_roots: Vec<CandidateRoot>,
    pub method: Method,
    /// `1 - lambda^2 (1 + s0)` at the optimum.
    pub feasibility_margin: f64,
}

impl OptResult {
    fn assemble(
        curve: &HeraldingCurve,
        lambda_sq: f64,
        candidate_roots: Vec<CandidateRoot>,
        method: Method,
    ) -> Self {
        let ln = curve.ln_pn_at(lambda_sq);
        OptResult {
            n: curve.n,
            s0: curve.s0,
            delta0: (curve.delta0.re, curve.delta0.im),
            lambda_sq_opt: lambda_sq,
            log_pn: ln,
            pn: LogProb::from_ln(ln).linear(),
            candidate_roots,
            method,
            feasibility_margin: 1.0 - lambda_sq * (1.0 + curve.s0),
        }
    }

    fn boundary(n: usize, s0: f64, delta0: Complex64) -> Self {
        OptResult {
            n,
            s0,
            delta0: (delta0.re, delta0.im),
            lambda_sq_opt: 0.0,
            log_pn: 0.0,
            pn: 1.0,
            candidate_roots: Vec::new(),
            method: Method::Boundary,
            feasibility_margin: 1.0,
        }
    }

    pub fn log_prob(&self) -> LogProb {
        LogProb::from_ln(self.log_pn)
    }

    pub fn params(&self) -> Result<CoreParams> {
        CoreParams::from_lambda_sq(
            self.lambda_sq_opt,
            self.s0,
            Complex64::new(self.delta0.0, self.delta0.1),
        )
    }
}

fn is_feasible(x: f64, bound: f64) -> bool {
    x > ROOT_EDGE_TOL && x < bound - ROOT_EDGE_TOL
}

fn candidate(curve: &HeraldingCurve, root: f64) -> CandidateRoot {
    let feasible = is_feasible(root, curve.lambda_sq_bound());
    CandidateRoot {
        root,
        feasible,
        log_pn: feasible.then(|| curve.ln_pn_at(root)),
    }
}

fn check_params(n: usize, s0: f64, delta0: Complex64) -> Result<()> {
    if !(s0.is_finite() && s0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "s0 must be finite and nonnegative, got {s0}"
        )));
    }
    if !(delta0.re.is_finite() && delta0.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta0 must be finite, got {delta0}")));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameter(format!("n = {n} is too large")));
    }
    Ok(())
}

/// Closed-form optimum for `delta0 = 0`: the minus-sign root
/// `[2n+1 - sqrt(1 + 4n(n+1) s0^2)] / [2 (1 - s0^2)(n+1)]`, evaluated in the
/// rationalized form `2n / (2n + 1 + sqrt(1 + 4n(n+1) s0^2))`, which is
/// regular at `s0 = 1` where it gives `n / (2n + 1)`.
pub fn optimize_parity(n: usize, s0: f64) -> Result<OptResult> {
    let zero = Complex64::new(0.0, 0.0);
    check_params(n, s0, zero)?;
    if n == 0 {
        return Ok(OptResult::boundary(n, s0, zero));
    }
    let curve = HeraldingCurve::new(n, s0, zero);
    let nf = n as f64;
    let disc = (1.0 + 4.0 * nf * (nf + 1.0) * s0 * s0).sqrt();
    let minus = 2.0 * nf / (2.0 * nf + 1.0 + disc);
    // product of the two roots is n / ((1 - s0^2)(n + 1)); at s0 = 1 the
    // quadratic is linear and only one root exists
    let denom = (1.0 - s0 * s0) * (nf + 1.0) * minus;
    let mut roots = vec![candidate(&curve, minus)];
    if denom != 0.0 {
        roots.push(candidate(&curve, nf / denom));
    }
    Ok(OptResult::assemble(&curve, minus, roots, Method::ClosedFormParity))
}

/// Closed-form optimum for `s0 = 0`, `delta0 = alpha*`: photon-added coherent
/// states with `P_n = (1 - x) x^n L_n(-|alpha|^2) exp(-x |alpha|^2 / (1 - x))`.
pub fn optimize_added(n: usize, alpha_abs: f64) -> Result<OptResult> {
    if !(alpha_abs.is_finite() && alpha_abs >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "|alpha| must be finite and nonnegative, got {alpha_abs}"
        )));
    }
    let delta0 = Complex64::new(alpha_abs, 0.0);
    check_params(n, 0.0, delta0)?;
    if n == 0 {
        return Ok(OptResult::boundary(n, 0.0, delta0));
    }
    let curve = HeraldingCurve::new(n, 0.0, delta0);
    let nf = n as f64;
    let a2 = alpha_abs * alpha_abs;
    let disc = ((1.0 + a2) * (1.0 + a2) + 4.0 * nf * a2).sqrt();
    let minus = 2.0 * nf / (2.0 * nf + 1.0 + a2 + disc);
    let plus = nf / ((nf + 1.0) * minus);
    let roots = vec![candidate(&curve, minus), candidate(&curve, plus)];
    Ok(OptResult::assemble(&curve, minus, roots, Method::ClosedFormAdded))
}

/// General optimum: feasible real roots of the extremality quartic, argmax
/// of `P_n` over them, golden-section search when none is feasible.
pub fn optimize_general(n: usize, s0: f64, delta0: Complex64) -> Result<OptResult> {
    check_params(n, s0, delta0)?;
    if n == 0 {
        return Ok(OptResult::boundary(n, s0, delta0));
    }
    let curve = HeraldingCurve::new(n, s0, delta0);
    let poly = curve.extremality_polynomial();
    let roots: Vec<CandidateRoot> = poly
        .real_roots(ROOT_IMAG_TOL)
        .into_iter()
        .map(|r| candidate(&curve, r))
        .collect();
    let best = roots
        .iter()
        .filter_map(|c| c.log_pn.map(|l| (c.root, l)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    match best {
        Some((x, _)) => Ok(OptResult::assemble(&curve, x, roots, Method::PolynomialGeneral)),
        None => {
            let x = golden_section_max(|x| curve.ln_pn_at(x), 0.0, curve.lambda_sq_bound());
            Ok(OptResult::assemble(&curve, x, roots, Method::GoldenSection))
        }
    }
}

/// Dispatches to the closed forms where they apply.
pub fn optimize(n: usize, s0: f64, delta0: Complex64) -> Result<OptResult> {
    if delta0.norm_sqr() == 0.0 {
        optimize_parity(n, s0)
    } else if s0 == 0.0 {
        let mut r = optimize_added(n, delta0.norm())?;
        r.delta0 = (delta0.re, delta0.im);
        Ok(r)
    } else {
        optimize_general(n, s0, delta0)
    }
}

/// Maximizer of a unimodal `f` on the open interval `(lo, hi)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-15 * (a.abs() + b.abs()).max(1e-300) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if b - a < 1e-17 {
            break;
        }
    }
    0.5 * (a + b)
}

/// Large-`n` regimes with a closed asymptotic form of the optimal `P_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticRegime {
    /// `delta0 = 0`, `s0 = 1`: `P_n ~ e^(-1/2) / (sqrt(2 pi) n)`.
    ParityS1,
    /// `delta0 = 0`, `s0 = 0`: `P_n ~ 1 / (e n)`.
    FockS0,
    /// `s0 = 0`, `|delta0| = |alpha|`: `P_n ~ sqrt|alpha| / (2 sqrt(pi) n^(3/4))`.
    Added { alpha_abs: f64 },
}

pub fn asymptotic_pn(regime: AsymptoticRegime, n: usize) -> Result<LogProb> {
    if n == 0 {
        return Err(Error::InvalidParameter("asymptotic forms need n >= 1".into()));
    }
    let ln_n = (n as f64).ln();
    let ln_pi = std::f64::consts::PI.ln();
    let ln = match regime {
        AsymptoticRegime::ParityS1 => -0.5 - 0.5 * (std::f64::consts::LN_2 + ln_pi) - ln_n,
        AsymptoticRegime::FockS0 => -1.0 - ln_n,
        AsymptoticRegime::Added { alpha_abs } => {
            if !(alpha_abs.is_finite() && alpha_abs > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "the photon-added regime needs |alpha| > 0, got {alpha_abs}"
                )));
            }
            0.5 * alpha_abs.ln() - std::f64::consts::LN_2 - 0.5 * ln_pi - 0.75 * ln_n
        }
    };
    Ok(LogProb::from_ln(ln))
}

/// Least-squares power law `P_n ~ prefactor * n^(-gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub gamma: f64,
    pub prefactor: f64,
    pub n_range: (f64, f64),
    /// Root-mean-square residual of the fit in `ln P_n`.
    pub residual: f64,
}

pub const MIN_FIT_POINTS: usize = 5;

/// Fits a line to `(ln n, ln P_n)`; `points` holds `(n, ln P_n)`.
pub fn fit_gamma(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            need: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || points[0].0 <= 0.0 {
        return Err(Error::InvalidParameter(
            "n must be positive and strictly increasing".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(ScalingFit {
        gamma: -slope,
        prefactor: intercept.exp(),
        n_range: (points[0].0, points[points.len() - 1].0),
        residual: (sse / len).sqrt(),
    })
}
