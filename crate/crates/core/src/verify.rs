//! Grid comparison of the analytic heralding probabilities and conditional
//! states against the Fock-space oracle.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::core_state::{psi_coefficients, CoreParams};
use crate::error::{Error, Result};
use crate::fock_oracle::expand_core_columns;
use crate::heralding::HeraldingCurve;
use crate::sweep::sci;

/// Tolerances below this cannot be certified in double precision.
pub const MIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid {
    pub lambda_sq_points: usize,
    pub s0_values: Vec<f64>,
    pub delta0_values: Vec<Complex64>,
    /// Largest `lambda^2 (1 + s0)` on the grid.
    pub load: f64,
    pub n_max: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid {
            lambda_sq_points: 5,
            s0_values: vec![0.0, 0.5, 1.0, 1.5, 2.0],
            delta0_values: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.3, 0.2),
                Complex64::new(1.0, 0.0),
            ],
            load: 0.9,
            n_max: 8,
        }
    }
}

impl OracleGrid {
    /// `lambda^2` uniform over `[0.05, load / (1 + s0)]`.
    pub fn points(&self) -> Vec<CoreParams> {
        let mut out = Vec::new();
        for &s0 in &self.s0_values {
            let hi = self.load / (1.0 + s0);
            for i in 0..self.lambda_sq_points {
                let x = if self.lambda_sq_points == 1 {
                    hi
                } else {
                    0.05 + (hi - 0.05) * i as f64 / (self.lambda_sq_points - 1) as f64
                };
                for &d in &self.delta0_values {
                    if let Ok(p) = CoreParams::from_lambda_sq(x, s0, d) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub lambda_sq: f64,
    pub s0: f64,
    pub delta0: Complex64,
    pub n: usize,
    pub analytic_pn: f64,
    pub oracle_pn: f64,
    pub fidelity: f64,
}

impl OracleRow {
    pub fn deviation(&self) -> f64 {
        (self.analytic_pn - self.oracle_pn).abs()
    }

    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub rows: Vec<OracleRow>,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn worst_deviation(&self) -> Option<&OracleRow> {
        self.rows.iter().max_by(|a, b| a.deviation().total_cmp(&b.deviation()))
    }

    pub fn worst_infidelity(&self) -> Option<&OracleRow> {
        self.rows.iter().max_by(|a, b| a.infidelity().total_cmp(&b.infidelity()))
    }

    /// Probabilities within `tol` absolute and fidelities within `tol / 10`.
    pub fn violations(&self) -> Vec<&OracleRow> {
        self.rows
            .iter()
            .filter(|r| !(r.deviation() <= self.tolerance && r.infidelity() <= 0.1 * self.tolerance))
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.tolerance >= MIN_TOLERANCE && self.violations().is_empty()
    }

    pub fn table(&self) -> String {
        let mut out = String::from("lambda_sq,s0,delta0_re,delta0_im,n,analytic_Pn,oracle_Pn,abs_dev,infidelity\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                sci(r.lambda_sq),
                sci(r.s0),
                sci(r.delta0.re),
                sci(r.delta0.im),
                r.n,
                sci(r.analytic_pn),
                sci(r.oracle_pn),
                sci(r.deviation()),
                sci(r.infidelity())
            );
        }
        out
    }
}

pub fn check_point(p: &CoreParams, n_max: usize) -> Result<Vec<OracleRow>> {
    let fock = expand_core_columns(p, n_max);
    (0..=n_max)
        .map(|n| {
            let (oracle, state) = fock.condition_on(n)?;
            let analytic = HeraldingCurve::new(n, p.s0(), p.delta0()).log_pn(p);
            let psi = psi_coefficients(n, p.s0(), p.delta0());
            Ok(OracleRow {
                lambda_sq: p.lambda_sq(),
                s0: p.s0(),
                delta0: p.delta0(),
                n,
                analytic_pn: analytic.linear(),
                oracle_pn: oracle.linear(),
                fidelity: state.fidelity(&psi.coeffs),
            })
        })
        .collect()
}

pub fn oracle_check(points: &[CoreParams], n_max: usize, tolerance: f64) -> Result<OracleReport> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
    }
    let rows = points
        .par_iter()
        .map(|p| check_point(p, n_max))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(OracleReport { rows, tolerance })
}
