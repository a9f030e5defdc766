//! Two-mode core Gaussian state `Z exp[lambda c^dag (a^dag + s0 a + delta0)]|0,0>`
//! and the signal-mode state `(a^dag + s0 a + delta0)^n |0>` it heralds.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::GaussianPureState;
use crate::logprob::{ln_factorial, LogProb, LogSumExp};

/// Entangling strength `lambda` and control parameters `(s0, delta0)`.
///
/// The exponent coefficients are `mu = lambda^2 s0` on `c^dag^2 / 2` and
/// `beta = delta0 lambda` on `c^dag`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreParams {
    lambda: f64,
    s0: f64,
    delta0: Complex64,
}

impl CoreParams {
    pub fn new(lambda: f64, s0: f64, delta0: Complex64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and nonnegative, got {lambda}"
            )));
        }
        if !(s0.is_finite() && s0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "s0 must be finite and nonnegative, got {s0}"
            )));
        }
        if !(delta0.re.is_finite() && delta0.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta0 must be finite, got {delta0}")));
        }
        if !(lambda * lambda * (1.0 + s0) < 1.0) {
            return Err(Error::CoreUnphysical { lambda, s0 });
        }
        Ok(CoreParams { lambda, s0, delta0 })
    }

    pub fn from_lambda_sq(lambda_sq: f64, s0: f64, delta0: Complex64) -> Result<Self> {
        if !(lambda_sq >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda^2 must be nonnegative, got {lambda_sq}"
            )));
        }
        Self::new(lambda_sq.sqrt(), s0, delta0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_sq(&self) -> f64 {
        self.lambda * self.lambda
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn delta0(&self) -> Complex64 {
        self.delta0
    }

    pub fn mu(&self) -> f64 {
        self.lambda_sq() * self.s0
    }

    pub fn beta(&self) -> Complex64 {
        self.delta0 * self.lambda
    }

    /// `1 - lambda^2 (1 + s0)`, positive for physical parameters.
    pub fn feasibility_margin(&self) -> f64 {
        1.0 - self.lambda_sq() * (1.0 + self.s0)
    }

    /// The same state as a general two-mode `(A, b)` with modes ordered `(a, c)`.
    pub fn to_gaussian(&self) -> Result<GaussianPureState> {
        let half = |x: f64| Complex64::new(0.5 * x, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[zero, half(self.lambda), half(self.lambda), half(self.mu())],
        );
        let b = DVector::from_vec(vec![zero, self.beta()]);
        GaussianPureState::new(a, b)
    }
}

/// `ln |Z|^2` of the core state.
pub fn z_squared(p: &CoreParams) -> LogProb {
    let one_minus = 1.0 - p.lambda_sq();
    let mu = p.mu();
    let beta = p.beta();
    let det = (one_minus - mu) * (one_minus + mu);
    let re_beta_sq = (beta * beta).re;
    let exponent = -(one_minus * beta.norm_sqr() + re_beta_sq * mu) / det;
    LogProb::from_ln(0.5 * det.ln() + exponent)
}

/// Normalized Fock amplitudes of `(a^dag + s0 a + delta0)^n |0>` together with
/// the exact log of its squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiState {
    pub n: usize,
    pub coeffs: Vec<Complex64>,
    pub log_norm_sq: f64,
}

impl PsiState {
    pub fn norm_sq(&self) -> LogProb {
        LogProb::from_ln(self.log_norm_sq)
    }
}

/// Builds the state by applying the operator `n` times to the vacuum,
/// renormalizing after every step. `O(n^2)`.
pub fn psi_coefficients(n: usize, s0: f64, delta0: Complex64) -> PsiState {
    let sqrt: Vec<f64> = (0..=n + 1).map(|k| (k as f64).sqrt()).collect();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    coeffs.reserve(n);
    let mut next = Vec::with_capacity(n + 1);
    let mut log_norm_sq = 0.0;
    for _ in 0..n {
        let top = coeffs.len() - 1;
        next.clear();
        let mut norm_sq = 0.0;
        for j in 0..=top + 1 {
            let mut v = Complex64::new(0.0, 0.0);
            if j >= 1 {
                v += coeffs[j - 1] * sqrt[j];
            }
            if j < top {
                v += coeffs[j + 1] * (s0 * sqrt[j + 1]);
            }
            if j <= top {
                v += coeffs[j] * delta0;
            }
            norm_sq += v.norm_sqr();
            next.push(v);
        }
        let scale = norm_sq.sqrt().recip();
        log_norm_sq += norm_sq.ln();
        coeffs.clear();
        coeffs.extend(next.iter().map(|v| v * scale));
    }
    PsiState {
        n,
        coeffs,
        log_norm_sq,
    }
}

/// `ln <psi_n|psi_n>` for `delta0 = 0` from the explicit parity expansion
/// `sum_m s0^m n! / (2^m m! sqrt((n - 2m)!)) |n - 2m>`.
pub fn psi_norm_parity(n: usize, s0: f64) -> LogProb {
    let ln_nfac = ln_factorial(n);
    if s0 == 0.0 {
        return LogProb::from_ln(ln_nfac);
    }
    let ln_s0 = s0.ln();
    let ln2 = std::f64::consts::LN_2;
    let acc: LogSumExp = (0..=n / 2)
        .map(|m| {
            let mf = m as f64;
            2.0 * (mf * ln_s0 + ln_nfac - mf * ln2 - ln_factorial(m))
                - ln_factorial(n - 2 * m)
        })
        .collect();
    LogProb::from_ln(acc.ln())
}

/// `ln L_n(-x)` for `x >= 0` from the positive series
/// `sum_k C(n, k) x^k / k!`.
///
/// Terms are unimodal in `k`, so the sum stops once they fall 50 e-folds
/// below the running maximum on the decreasing side.
pub fn laguerre_neg(n: usize, x: f64) -> LogProb {
    assert!(x >= 0.0, "laguerre_neg needs x >= 0, got {x}");
    if x == 0.0 || n == 0 {
        return LogProb::ONE;
    }
    let ln_x = x.ln();
    let mut acc = LogSumExp::new();
    let mut term = 0.0;
    let mut peak = f64::NEG_INFINITY;
    for k in 0..=n {
        acc.push(term);
        peak = peak.max(term);
        if k == n {
            break;
        }
        let ratio = ((n - k) as f64).ln() + ln_x - 2.0 * ((k + 1) as f64).ln();
        if ratio < 0.0 && term < peak - 50.0 {
            break;
        }
        term += ratio;
    }
    LogProb::from_ln(acc.ln())
}

/// `ln <psi_n|psi_n>` choosing the cheapest exact path for the parameters.
pub fn psi_norm(n: usize, s0: f64, delta0: Complex64) -> LogProb {
    if delta0.norm_sqr() == 0.0 {
        psi_norm_parity(n, s0)
    } else if s0 == 0.0 {
        LogProb::from_ln(ln_factorial(n)) * laguerre_neg(n, delta0.norm_sqr())
    } else {
        psi_coefficients(n, s0, delta0).norm_sq()
    }
}

/// Lower bound `n! [(1 + s0)^n + (1 - s0)^n] / (2 sqrt(n + 2))` on
/// `<psi_n|psi_n>` for even `n` and `delta0 = 0`.
pub fn norm_lower_bound(n: usize, s0: f64) -> LogProb {
    let nf = n as f64;
    let ratio = (1.0 - s0) / (1.0 + s0);
    let ln_sum = nf * (1.0 + s0).ln() + ratio.powi(n as i32).ln_1p();
    LogProb::from_ln(
        ln_factorial(n) + ln_sum - std::f64::consts::LN_2 - 0.5 * (nf + 2.0).ln(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Three-term recurrence `(k+1) L_{k+1} = (2k+1+x) L_k - k L_{k-1}` at `-x`.
    fn laguerre_recurrence(n: usize, x: f64) -> f64 {
        let (mut prev, mut cur) = (1.0, 1.0 + x);
        if n == 0 {
            return prev;
        }
        for k in 1..n {
            let kf = k as f64;
            let next = ((2.0 * kf + 1.0 + x) * cur - kf * prev) / (kf + 1.0);
            prev = cur;
            cur = next;
        }
        cur
    }

    #[test]
    fn params_validation() {
        assert!(CoreParams::new(0.8, 0.6, c(0.0, 0.0)).is_err());
        assert!(CoreParams::new(0.7, 1.0, c(0.0, 0.0)).is_ok());
        assert!(CoreParams::new(-0.1, 0.0, c(0.0, 0.0)).is_err());
        assert!(CoreParams::new(0.1, -1.0, c(0.0, 0.0)).is_err());
        let p = CoreParams::new(0.5, 2.0, c(0.3, -0.4)).unwrap();
        assert_relative_eq!(p.mu(), 0.5);
        assert_eq!(p.beta(), c(0.15, -0.2));
        assert_relative_eq!(p.feasibility_margin(), 0.25);
    }

    #[test]
    fn z_squared_limits() {
        let p = CoreParams::new(1e-9, 0.7, c(0.4, 0.2)).unwrap();
        assert!(z_squared(&p).ln().abs() < 1e-16);

        let (l2, s0) = (0.4, 1.2);
        let p = CoreParams::from_lambda_sq(l2, s0, c(0.0, 0.0)).unwrap();
        let expected = ((1.0 - l2) * (1.0 - l2) - s0 * s0 * l2 * l2).sqrt();
        assert_relative_eq!(z_squared(&p).linear(), expected, epsilon = 1e-15);

        let alpha = c(0.8, -0.5);
        let p = CoreParams::from_lambda_sq(l2, 0.0, alpha.conj()).unwrap();
        let expected = (1.0 - l2) * (-l2 * alpha.norm_sqr() / (1.0 - l2)).exp();
        assert_relative_eq!(z_squared(&p).linear(), expected, epsilon = 1e-15);
    }

    #[test]
    fn z_squared_agrees_with_general_state() {
        let p = CoreParams::new(0.6, 0.5, c(0.3, 0.2)).unwrap();
        let g = p.to_gaussian().unwrap();
        assert_relative_eq!(
            z_squared(&p).ln(),
            g.normalization_z().unwrap().ln(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn psi_small_cases() {
        let s = psi_coefficients(0, 0.3, c(1.0, 1.0));
        assert_eq!(s.coeffs, vec![c(1.0, 0.0)]);
        assert_eq!(s.log_norm_sq, 0.0);

        let s = psi_coefficients(2, 1.0, c(0.0, 0.0));
        assert_relative_eq!(s.log_norm_sq.exp(), 3.0, epsilon = 1e-14);
        let r3 = 3f64.sqrt();
        assert_relative_eq!(s.coeffs[0].re, 1.0 / r3, epsilon = 1e-15);
        assert_eq!(s.coeffs[1], c(0.0, 0.0));
        assert_relative_eq!(s.coeffs[2].re, 2f64.sqrt() / r3, epsilon = 1e-15);

        let s = psi_coefficients(3, 0.0, c(1.0, 0.0));
        assert_relative_eq!(s.log_norm_sq.exp(), 6.0 * laguerre_recurrence(3, 1.0), epsilon = 1e-13);
        assert_relative_eq!(6.0 * laguerre_recurrence(3, 1.0), 34.0, epsilon = 1e-13);
    }

    #[test]
    fn parity_norm_special_values() {
        for n in 0..30 {
            assert_relative_eq!(psi_norm_parity(n, 0.0).ln(), ln_factorial(n), epsilon = 1e-12);
            // 2^n Gamma(n + 1/2) / sqrt(pi)
            let expected = n as f64 * std::f64::consts::LN_2 + libm::lgamma(n as f64 + 0.5)
                - 0.5 * std::f64::consts::PI.ln();
            assert_relative_eq!(
                psi_norm_parity(n, 1.0).ln(),
                expected,
                epsilon = 1e-12,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn parity_norm_matches_recurrence() {
        for n in 0..=10 {
            for s0 in [0.3, 1.7] {
                let a = psi_norm_parity(n, s0).ln();
                let b = psi_coefficients(n, s0, c(0.0, 0.0)).log_norm_sq;
                assert!((a - b).abs() < 1e-10, "n={n} s0={s0}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn parity_zeros_are_exact() {
        for n in [7usize, 12] {
            let s = psi_coefficients(n, 1.3, c(0.0, 0.0));
            for (k, ck) in s.coeffs.iter().enumerate() {
                if k % 2 != n % 2 {
                    assert!(ck.norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre_neg(0, 3.0).ln(), 0.0);
        assert_relative_eq!(laguerre_neg(1, 1.0).linear(), 2.0, epsilon = 1e-15);
        let oracle = laguerre_recurrence(50, 4.0);
        assert_relative_eq!(laguerre_neg(50, 4.0).linear(), oracle, max_relative = 1e-9);
    }

    #[test]
    fn laguerre_large_degree_is_finite() {
        let v = laguerre_neg(1_000_000, 4.0).ln();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn norm_dispatch_paths_agree() {
        let d = c(0.7, -0.4);
        for n in [1usize, 5, 13] {
            let rec = psi_coefficients(n, 0.0, d).log_norm_sq;
            assert_relative_eq!(psi_norm(n, 0.0, d).ln(), rec, epsilon = 1e-11);
        }
    }

    #[test]
    fn lower_bound_simple_case() {
        // n = 2, s0 = 1: norm 3, bound 2! * 4 / (2 * 2) = 2
        assert_relative_eq!(norm_lower_bound(2, 1.0).linear(), 2.0, epsilon = 1e-14);
        assert!(psi_norm_parity(2, 1.0) >= norm_lower_bound(2, 1.0));
    }
}
