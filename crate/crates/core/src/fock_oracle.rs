//! Brute-force Fock-basis expansion of two-mode Gaussian states.
//!
//! Amplitudes are summed term by term from the power series of the exponent,
//! with log-magnitudes and phases kept apart, and never touch the
//! closed-form norms in [`crate::core_state`]. The only shared input is the
//! normalization constant, which the total-mass checks validate on their own.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::core_state::{z_squared, CoreParams};
use crate::error::{Error, Result};
use crate::gaussian::GaussianPureState;
use crate::logprob::LogProb;

/// Expansions refuse states closer than this to the physicality boundary.
pub const MIN_ORACLE_MARGIN: f64 = 0.05;
/// Default ceiling on the neglected probability mass.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;
/// Rounding allowance added to every tail estimate.
pub const TAIL_FLOOR: f64 = 1e-13;
/// Automatic truncation stops doubling once the mass increment is below this.
pub const MASS_INCREMENT_TOL: f64 = 1e-13;

const MAX_AUTO_CUTOFF: usize = 4096;

/// Amplitudes `amps[(k_a, k_c)]` of `|k_a>_a |k_c>_c` up to the truncation.
#[derive(Debug, Clone)]
pub struct TwoModeFock {
    pub amps: DMatrix<Complex64>,
    /// Upper bound on the probability mass outside the truncation;
    /// `INFINITY` when the expansion was not certified.
    pub tail_bound: f64,
    pub normalized: bool,
    /// Every column holds all of its signal-mode components. True for core
    /// states, where `k_a <= k_c`.
    columns_exact: bool,
}

impl TwoModeFock {
    pub fn cutoff_a(&self) -> usize {
        self.amps.nrows() - 1
    }

    pub fn cutoff_c(&self) -> usize {
        self.amps.ncols() - 1
    }

    pub fn total_mass(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Projects the control mode on `|n>`.
    pub fn condition_on(&self, n: usize) -> Result<(LogProb, FockVector)> {
        if n > self.cutoff_c() {
            return Err(Error::BeyondTruncation {
                n,
                cutoff: self.cutoff_c(),
            });
        }
        if !self.columns_exact && !(self.tail_bound <= DEFAULT_TAIL_EPS) {
            return Err(Error::Truncation {
                tail: self.tail_bound,
                eps: DEFAULT_TAIL_EPS,
                suggested: 2 * self.cutoff_a(),
            });
        }
        let column: Vec<Complex64> = self.amps.column(n).iter().copied().collect();
        let mass: f64 = column.iter().map(|z| z.norm_sqr()).sum();
        let scale = mass.sqrt().recip();
        let tail = if self.columns_exact { 0.0 } else { self.tail_bound / mass };
        Ok((
            LogProb::from_linear(mass),
            FockVector {
                amps: column.iter().map(|z| z * scale).collect(),
                tail_bound: tail,
            },
        ))
    }
}

/// Single-mode Fock amplitudes with a bound on the neglected mass.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amps: Vec<Complex64>,
    pub tail_bound: f64,
}

impl FockVector {
    /// `|<self|other>|^2` over the common support, for normalized vectors,
    /// clamped to `[0, 1]` against rounding.
    pub fn fidelity(&self, other: &[Complex64]) -> f64 {
        let len = self.amps.len().max(other.len());
        let get = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or_default();
        let overlap: Complex64 = (0..len)
            .map(|k| get(&self.amps, k).conj() * get(other, k))
            .sum();
        overlap.norm_sqr().min(1.0)
    }
}

/// `ln k!` for `k = 0..=n` by cumulative sums.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `(ln|z|, z/|z|)`, with `ln|0| = -inf`.
fn polar_log(z: Complex64) -> (f64, Complex64) {
    let r = z.norm();
    if r == 0.0 {
        (f64::NEG_INFINITY, Complex64::new(1.0, 0.0))
    } else {
        (r.ln(), z / r)
    }
}

/// `k * ln|z|`, taking `0^0 = 1`.
fn power_ln(k: usize, ln_abs: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln_abs
    }
}

fn powers(unit: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        out.push(acc);
        acc *= unit;
    }
    out
}

/// Core amplitudes
/// `Z sum_{2p + q + r = t} (mu/2)^p / p! lambda^q / q! beta^r / r! sqrt(q! t!)`
/// for `k_a = q <= n_a`, `k_c = t <= n_c`.
fn core_amplitudes(p: &CoreParams, n_a: usize, n_c: usize) -> DMatrix<Complex64> {
    let ln_fact = ln_factorials(n_c);
    let ln_z = 0.5 * z_squared(p).ln();
    let ln_half_mu = (0.5 * p.mu()).ln();
    let ln_lambda = p.lambda().ln();
    let (ln_beta, beta_unit) = polar_log(p.beta());
    let beta_phase = powers(beta_unit, n_c);

    let mut amps = DMatrix::from_element(n_a + 1, n_c + 1, Complex64::new(0.0, 0.0));
    for t in 0..=n_c {
        for q in 0..=t.min(n_a) {
            let base = ln_z + power_ln(q, ln_lambda) - 0.5 * ln_fact[q] + 0.5 * ln_fact[t];
            let mut sum = Complex64::new(0.0, 0.0);
            for pp in 0..=(t - q) / 2 {
                let r = t - q - 2 * pp;
                let ln_mag = base + power_ln(pp, ln_half_mu) - ln_fact[pp]
                    + power_ln(r, ln_beta)
                    - ln_fact[r];
                if ln_mag == f64::NEG_INFINITY {
                    continue;
                }
                sum += beta_phase[r] * ln_mag.exp();
            }
            amps[(q, t)] = sum;
        }
    }
    amps
}

fn crop_mass(amps: &DMatrix<Complex64>, n_a: usize, n_c: usize) -> f64 {
    amps.view((0, 0), (n_a + 1, n_c + 1))
        .iter()
        .map(|z| z.norm_sqr())
        .sum()
}

/// Builds at twice the truncation, crops, and bounds the tail by the mass
/// found between the two truncations.
fn certify<F>(build: F, n_a: usize, n_c: usize, eps: f64) -> Result<(DMatrix<Complex64>, f64, f64)>
where
    F: Fn(usize, usize) -> DMatrix<Complex64>,
{
    let big = build(2 * n_a, 2 * n_c);
    let increment = (big.iter().map(|z| z.norm_sqr()).sum::<f64>() - crop_mass(&big, n_a, n_c)).max(0.0);
    let tail = 2.0 * increment + TAIL_FLOOR;
    if tail > eps {
        return Err(Error::Truncation {
            tail,
            eps,
            suggested: 2 * n_a.max(n_c),
        });
    }
    let amps = big.view((0, 0), (n_a + 1, n_c + 1)).into_owned();
    Ok((amps, tail, increment))
}

fn check_margin(margin: f64) -> Result<()> {
    if margin < MIN_ORACLE_MARGIN {
        return Err(Error::InvalidParameter(format!(
            "physicality margin {margin:.3e} is below the oracle limit {MIN_ORACLE_MARGIN}"
        )));
    }
    Ok(())
}

/// Core-state expansion at the given truncation, certified to
/// [`DEFAULT_TAIL_EPS`].
pub fn expand_core(p: &CoreParams, n_a: usize, n_c: usize) -> Result<TwoModeFock> {
    expand_core_with_tail(p, n_a, n_c, DEFAULT_TAIL_EPS)
}

pub fn expand_core_with_tail(
    p: &CoreParams,
    n_a: usize,
    n_c: usize,
    eps: f64,
) -> Result<TwoModeFock> {
    check_margin(p.to_gaussian()?.physicality_margin())?;
    let (amps, tail_bound, _) = certify(|a, c| core_amplitudes(p, a, c), n_a, n_c, eps)?;
    Ok(TwoModeFock {
        amps,
        tail_bound,
        normalized: true,
        columns_exact: n_a >= n_c,
    })
}

/// Core-state columns `k_c <= n_c`. Every column is a finite exact sum, so no
/// tail is certified; use this for conditioning only.
pub fn expand_core_columns(p: &CoreParams, n_c: usize) -> TwoModeFock {
    TwoModeFock {
        amps: core_amplitudes(p, n_c, n_c),
        tail_bound: f64::INFINITY,
        normalized: true,
        columns_exact: true,
    }
}

/// Truncation policy: start at `4n + 20` and double until the mass increment
/// is below [`MASS_INCREMENT_TOL`].
pub fn expand_core_auto(p: &CoreParams, n: usize) -> Result<TwoModeFock> {
    check_margin(p.to_gaussian()?.physicality_margin())?;
    auto_truncate(4 * n + 20, |cut| {
        certify(|a, c| core_amplitudes(p, a, c), cut, cut, f64::INFINITY)
    })
    .map(|(amps, tail_bound)| TwoModeFock {
        amps,
        tail_bound,
        normalized: true,
        columns_exact: true,
    })
}

fn auto_truncate<F>(start: usize, attempt: F) -> Result<(DMatrix<Complex64>, f64)>
where
    F: Fn(usize) -> Result<(DMatrix<Complex64>, f64, f64)>,
{
    let mut cut = start.max(1);
    loop {
        let (amps, tail, increment) = attempt(cut)?;
        if increment < MASS_INCREMENT_TOL {
            return Ok((amps, tail));
        }
        if cut >= MAX_AUTO_CUTOFF {
            return Err(Error::Truncation {
                tail,
                eps: MASS_INCREMENT_TOL,
                suggested: 2 * cut,
            });
        }
        cut *= 2;
    }
}

/// `sqrt(k!) sum_{2p + s = k} a^p / p! b^s / s!` for `k = 0..=n`, as
/// `(ln magnitude, unit phase)`.
fn single_mode_factors(a: Complex64, b: Complex64, ln_fact: &[f64]) -> Vec<(f64, Complex64)> {
    let n = ln_fact.len() - 1;
    let (ln_a, a_unit) = polar_log(a);
    let (ln_b, b_unit) = polar_log(b);
    let a_phase = powers(a_unit, n / 2);
    let b_phase = powers(b_unit, n);
    (0..=n)
        .map(|k| {
            let terms: Vec<(f64, Complex64)> = (0..=k / 2)
                .map(|p| {
                    let s = k - 2 * p;
                    let ln = power_ln(p, ln_a) - ln_fact[p] + power_ln(s, ln_b) - ln_fact[s]
                        + 0.5 * ln_fact[k];
                    (ln, a_phase[p] * b_phase[s])
                })
                .collect();
            let peak = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
            if peak == f64::NEG_INFINITY {
                return (f64::NEG_INFINITY, Complex64::new(1.0, 0.0));
            }
            let sum: Complex64 = terms.iter().map(|(ln, ph)| ph * (ln - peak).exp()).sum();
            let (ln_sum, unit) = polar_log(sum);
            (peak + ln_sum, unit)
        })
        .collect()
}

/// Amplitudes of a general two-mode state from
/// `exp(A_11 a^2 + 2 A_12 a c + A_22 c^2 + b_1 a + b_2 c)` (creation operators):
/// `sum_q (2 A_12)^q sqrt(C(k_a, q) C(k_c, q)) e_a[k_a - q] e_c[k_c - q]`.
fn general_amplitudes(state: &GaussianPureState, ln_z: f64, n_a: usize, n_c: usize) -> DMatrix<Complex64> {
    let a = state.a();
    let b = state.b();
    let ln_fact = ln_factorials(n_a.max(n_c));
    let ea = single_mode_factors(a[(0, 0)], b[0], &ln_fact[..=n_a]);
    let ec = single_mode_factors(a[(1, 1)], b[1], &ln_fact[..=n_c]);
    let (ln_cross, cross_unit) = polar_log(a[(0, 1)] * 2.0);
    let cross_phase = powers(cross_unit, n_a.min(n_c));
    let ln_binom = |n: usize, k: usize| ln_fact[n] - ln_fact[k] - ln_fact[n - k];

    DMatrix::from_fn(n_a + 1, n_c + 1, |ka, kc| {
        let mut sum = Complex64::new(0.0, 0.0);
        for q in 0..=ka.min(kc) {
            let (la, pa) = ea[ka - q];
            let (lc, pc) = ec[kc - q];
            let ln = ln_z
                + power_ln(q, ln_cross)
                + 0.5 * (ln_binom(ka, q) + ln_binom(kc, q))
                + la
                + lc;
            if ln == f64::NEG_INFINITY {
                continue;
            }
            sum += cross_phase[q] * pa * pc * ln.exp();
        }
        sum
    })
}

/// General two-mode expansion at truncation `n` in both modes.
pub fn expand_general(state: &GaussianPureState, n: usize) -> Result<TwoModeFock> {
    expand_general_with_tail(state, n, DEFAULT_TAIL_EPS)
}

pub fn expand_general_with_tail(state: &GaussianPureState, n: usize, eps: f64) -> Result<TwoModeFock> {
    let (ln_z, _) = general_setup(state)?;
    let (amps, tail_bound, _) = certify(|a, c| general_amplitudes(state, ln_z, a, c), n, n, eps)?;
    Ok(TwoModeFock {
        amps,
        tail_bound,
        normalized: true,
        columns_exact: false,
    })
}

/// General expansion with the doubling policy, starting at `start`.
pub fn expand_general_auto(state: &GaussianPureState, start: usize) -> Result<TwoModeFock> {
    let (ln_z, _) = general_setup(state)?;
    auto_truncate(start, |cut| {
        certify(|a, c| general_amplitudes(state, ln_z, a, c), cut, cut, f64::INFINITY)
    })
    .map(|(amps, tail_bound)| TwoModeFock {
        amps,
        tail_bound,
        normalized: true,
        columns_exact: false,
    })
}

fn general_setup(state: &GaussianPureState) -> Result<(f64, f64)> {
    if state.modes() != 2 {
        return Err(Error::Shape(format!(
            "the Fock oracle handles two modes, got {}",
            state.modes()
        )));
    }
    let margin = state.physicality_margin();
    check_margin(margin)?;
    Ok((0.5 * state.normalization_z()?.ln(), margin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ln_fact(k: usize) -> f64 {
        (1..=k).map(|j| (j as f64).ln()).sum()
    }

    #[test]
    fn tiny_lambda_is_vacuum() {
        let p = CoreParams::new(1e-8, 0.5, c(0.3, 0.1)).unwrap();
        let f = expand_core(&p, 6, 6).unwrap();
        assert!((f.amps[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(f.total_mass() <= 1.0 + 1e-12);
    }

    #[test]
    fn two_mode_squeezed_vacuum_is_diagonal() {
        let lambda: f64 = 0.6;
        let p = CoreParams::new(lambda, 0.0, c(0.0, 0.0)).unwrap();
        let f = expand_core_auto(&p, 0).unwrap();
        let z = (1.0 - lambda * lambda).sqrt();
        for q in 0..20 {
            for t in 0..20 {
                let expected = if q == t { z * lambda.powi(q as i32) } else { 0.0 };
                assert!((f.amps[(q, t)] - c(expected, 0.0)).norm() < 1e-14);
            }
        }
        let (prob, state) = f.condition_on(1).unwrap();
        assert!((prob.linear() - (1.0 - 0.36) * 0.36).abs() < 1e-15);
        assert!((state.amps[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mass_is_one_for_generic_core() {
        let p = CoreParams::new(0.6, 0.5, c(0.3, 0.2)).unwrap();
        let f = expand_core_auto(&p, 0).unwrap();
        let mass = f.total_mass();
        assert!((mass - 1.0).abs() < 1e-9, "mass {mass}");
        assert!(1.0 - mass <= f.tail_bound);
        assert!(mass <= 1.0 + 1e-12);
    }

    #[test]
    fn s1_two_photon_column() {
        let p = CoreParams::from_lambda_sq(0.4, 1.0, c(0.0, 0.0)).unwrap();
        let f = expand_core_columns(&p, 4);
        let (prob, state) = f.condition_on(2).unwrap();
        let expected = 3.0 * 0.08 * (0.36f64 - 0.16).sqrt();
        assert!((prob.linear() - expected).abs() < 1e-15);
        let r3 = 3f64.sqrt();
        assert!((state.amps[0] - c(1.0 / r3, 0.0)).norm() < 1e-15);
        assert!(state.amps[1].norm() < 1e-15);
        assert!((state.amps[2] - c(2f64.sqrt() / r3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn vacuum_column_is_vacuum() {
        let p = CoreParams::new(0.5, 1.2, c(0.4, -0.3)).unwrap();
        let f = expand_core_columns(&p, 3);
        let (prob, state) = f.condition_on(0).unwrap();
        assert!((prob.linear() - z_squared(&p).linear()).abs() < 1e-15);
        assert!((state.amps[0].norm() - 1.0).abs() < 1e-15);
        assert!(state.amps[1..].iter().all(|z| z.norm() == 0.0));
        assert!(matches!(f.condition_on(4), Err(Error::BeyondTruncation { .. })));
    }

    #[test]
    fn coherent_product() {
        let b = DVector::from_vec(vec![c(0.5, 0.0), c(0.0, 0.0)]);
        let s = GaussianPureState::new(DMatrix::zeros(2, 2), b).unwrap();
        let f = expand_general(&s, 20).unwrap();
        for k in 0..20 {
            let expected = (-0.125f64).exp() * 0.5f64.powi(k as i32) / ln_fact(k).mul_add(0.5, 0.0).exp();
            assert!((f.amps[(k, 0)] - c(expected, 0.0)).norm() < 1e-15);
            assert!(f.amps[(k, 1)].norm() == 0.0);
        }
    }

    #[test]
    fn squeezed_vacuum_series() {
        let mu: f64 = 0.6;
        let a = DMatrix::from_row_slice(2, 2, &[c(mu / 2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let s = GaussianPureState::new(a, DVector::zeros(2)).unwrap();
        let f = expand_general_auto(&s, 20).unwrap();
        let z = (1.0 - mu * mu).powf(0.25);
        for m in 0..30usize {
            // (mu/2)^m / m! * sqrt((2m)!)
            let expected = z * ((m as f64) * (mu / 2.0).ln() - ln_fact(m) + 0.5 * ln_fact(2 * m)).exp();
            assert!((f.amps[(2 * m, 0)].re - expected).abs() < 1e-14);
            assert!(f.amps[(2 * m + 1, 0)].norm() == 0.0);
        }
        assert!((f.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn general_matches_core_path() {
        let p = CoreParams::new(0.6, 0.5, c(0.3, 0.2)).unwrap();
        let g = expand_general_with_tail(&p.to_gaussian().unwrap(), 40, 1.0).unwrap();
        let k = expand_core_columns(&p, 40);
        let diff = (&g.amps - &k.amps).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(diff < 1e-10, "max deviation {diff}");
    }

    #[test]
    fn refuses_small_margin_and_short_truncation() {
        let p = CoreParams::from_lambda_sq(0.98, 0.0, c(0.0, 0.0)).unwrap();
        assert!(expand_core(&p, 10, 10).is_err());
        let p = CoreParams::from_lambda_sq(0.8, 0.0, c(0.0, 0.0)).unwrap();
        assert!(matches!(expand_core(&p, 10, 10), Err(Error::Truncation { .. })));
    }
}
