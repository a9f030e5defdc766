//! Log-domain arithmetic for probabilities and norms that over- or underflow
//! at large photon numbers.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Below this natural log a value is reported as unrepresentable in linear form.
pub const LINEAR_FLOOR: f64 = -700.0;

/// A nonnegative quantity stored by its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogProb(f64);

impl LogProb {
    pub const ONE: LogProb = LogProb(0.0);
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);

    pub fn from_ln(ln: f64) -> Self {
        LogProb(ln)
    }

    pub fn from_linear(value: f64) -> Self {
        debug_assert!(value >= 0.0);
        LogProb(value.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// Whether `exp(ln)` is safely representable.
    pub fn is_representable(self) -> bool {
        self.0 > LINEAR_FLOOR
    }

    /// Linear value, or `0.0` when the log lies below [`LINEAR_FLOOR`].
    pub fn linear(self) -> f64 {
        if self.is_representable() {
            self.0.exp()
        } else {
            0.0
        }
    }
}

impl std::ops::Mul for LogProb {
    type Output = LogProb;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: LogProb) -> LogProb {
        LogProb(self.0 + rhs.0)
    }
}

impl std::ops::Div for LogProb {
    type Output = LogProb;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogProb) -> LogProb {
        LogProb(self.0 - rhs.0)
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({})", self.0)
    }
}

/// `ln n!` through the log-gamma function.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Stable `ln Σ exp(v)`; `-inf` for empty input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Streaming log-sum-exp that rescales whenever a larger term arrives.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term > self.max {
            self.sum = self.sum * (self.max - ln_term).exp() + 1.0;
            self.max = ln_term;
        } else {
            self.sum += (ln_term - self.max).exp();
        }
    }

    pub fn ln(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSumExp::new();
        for v in iter {
            acc.push(v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_match_products() {
        let mut prod = 1.0f64;
        for n in 1..=30usize {
            prod *= n as f64;
            assert!((ln_factorial(n) - prod.ln()).abs() < 1e-13 * prod.ln().max(1.0));
        }
        assert_eq!(ln_factorial(0), 0.0);
    }

    #[test]
    fn streaming_agrees_with_batch() {
        let v = [-1000.0, 3.0, 2.5, -4.0, 700.0, 699.0];
        let s: LogSumExp = v.iter().copied().collect();
        assert!((s.ln() - log_sum_exp(&v)).abs() < 1e-12);
        assert_eq!(LogSumExp::new().ln(), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn linear_floor() {
        assert_eq!(LogProb::from_ln(-800.0).linear(), 0.0);
        assert!(!LogProb::from_ln(-800.0).is_representable());
        assert!((LogProb::from_ln(-2.0).linear() - (-2.0f64).exp()).abs() < 1e-16);
    }
}
