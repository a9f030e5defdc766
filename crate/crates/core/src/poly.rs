//! Real polynomial roots from companion-matrix eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Leading coefficients below this fraction of the largest one are dropped.
pub const DEGREE_DROP_TOL: f64 = 1e-12;

/// Polynomial with real coefficients in ascending order of power.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Formal degree, including vanishing leading terms.
    pub fn formal_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Copy with negligible leading coefficients removed.
    pub fn reduced(&self) -> Polynomial {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().unwrap().abs() < DEGREE_DROP_TOL * scale {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.reduced().formal_degree()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        }
    }

    /// Largest term magnitude `max_k |c_k x^k|`, the scale for residuals at `x`.
    pub fn term_scale(&self, x: f64) -> f64 {
        let mut p = 1.0;
        let mut m = 0.0f64;
        for c in &self.coeffs {
            m = m.max((c * p).abs());
            p *= x;
        }
        m
    }

    /// All complex roots of the reduced polynomial.
    pub fn roots(&self) -> Vec<Complex64> {
        let reduced = self.reduced();
        let deg = reduced.formal_degree();
        if deg == 0 {
            return Vec::new();
        }
        let c = &reduced.coeffs;
        let lead = c[deg];
        let companion = DMatrix::<f64>::from_fn(deg, deg, |i, j| {
            if j == deg - 1 {
                -c[i] / lead
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        companion.complex_eigenvalues().iter().copied().collect()
    }

    /// Real roots: eigenvalues with `|im| <= imag_tol`, Newton-polished.
    pub fn real_roots(&self, imag_tol: f64) -> Vec<f64> {
        let reduced = self.reduced();
        let deriv = reduced.derivative();
        let mut out: Vec<f64> = self
            .roots()
            .into_iter()
            .filter(|z| z.im.abs() <= imag_tol)
            .map(|z| reduced.polish(&deriv, z.re))
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    fn polish(&self, deriv: &Polynomial, mut x: f64) -> f64 {
        for _ in 0..8 {
            let f = self.eval(x);
            let df = deriv.eval(x);
            if df == 0.0 || !df.is_finite() {
                break;
            }
            let step = f / df;
            let next = x - step;
            // keep a step only when it does not increase the residual
            if self.eval(next).abs() > f.abs() {
                break;
            }
            x = next;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(roots: &[f64]) -> Polynomial {
        let mut c = vec![1.0];
        for r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= r * ck;
            }
            c = next;
        }
        Polynomial::new(c)
    }

    #[test]
    fn recovers_known_roots() {
        let p = from_roots(&[0.1, 0.45, 2.0, -3.0]);
        let r = p.real_roots(1e-9);
        let expected = [-3.0, 0.1, 0.45, 2.0];
        assert_eq!(r.len(), 4);
        for (a, b) in r.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn complex_pairs_are_filtered() {
        // (x^2 + 1)(x - 0.5)
        let p = Polynomial::new(vec![-0.5, 1.0, -0.5, 1.0]);
        let r = p.real_roots(1e-9);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() < 1e-14);
        assert_eq!(p.roots().len(), 3);
    }

    #[test]
    fn degenerate_leading_terms_drop_degree() {
        let p = Polynomial::new(vec![2.0, -3.0, 1.0, 1e-17, 0.0]);
        assert_eq!(p.formal_degree(), 4);
        assert_eq!(p.degree(), 2);
        let r = p.real_roots(1e-9);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 1.0).abs() < 1e-14 && (r[1] - 2.0).abs() < 1e-14);
        assert!(Polynomial::new(vec![3.0]).roots().is_empty());
    }
}
