//! Pure multimode Gaussian states written as
//! `Z exp(a^dag^T A a^dag + b^T a^dag)|0>`.
//!
//! `A` is complex symmetric and `b` a complex vector. Everything here is dense
//! linear algebra on a handful of modes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logprob::LogProb;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest tolerated `|A - A^T|` entry, relative to `max(1, max|A|)`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// A state is physical when its margin exceeds this.
pub const PHYSICAL_TOL: f64 = 1e-12;
/// Inverting `I - 4AA^dag` is refused below this margin.
pub const INVERSION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPureState {
    a: CMatrix,
    b: CVector,
}

impl GaussianPureState {
    /// Validates shape, symmetrizes `A` and checks physicality.
    pub fn new(a: CMatrix, b: CVector) -> Result<Self> {
        let a = symmetrized(a)?;
        if b.len() != a.nrows() {
            return Err(Error::Shape(format!(
                "b has length {} but A is {}x{}",
                b.len(),
                a.nrows(),
                a.ncols()
            )));
        }
        let margin = margin_of(&a);
        if !(margin > PHYSICAL_TOL) {
            return Err(Error::Unphysical { margin });
        }
        Ok(GaussianPureState { a, b })
    }

    pub fn vacuum(modes: usize) -> Self {
        GaussianPureState {
            a: CMatrix::zeros(modes, modes),
            b: CVector::zeros(modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CVector {
        &self.b
    }

    /// Smallest eigenvalue of `I - 4AA^dag`.
    pub fn physicality_margin(&self) -> f64 {
        margin_of(&self.a)
    }

    /// Coherent displacement `alpha = (I - 4AA^dag)^-1 (b + 2A b*)`.
    pub fn displacement_alpha(&self) -> Result<CVector> {
        let margin = self.physicality_margin();
        if margin <= INVERSION_TOL {
            return Err(Error::NearSingular {
                eigenvalue: margin,
                threshold: INVERSION_TOL,
            });
        }
        let m = self.modes();
        let kernel = CMatrix::identity(m, m) - (&self.a * self.a.adjoint()).scale(4.0);
        let rhs = &self.b + (&self.a * self.b.conjugate()).scale(2.0);
        kernel
            .lu()
            .solve(&rhs)
            .ok_or(Error::NearSingular {
                eigenvalue: margin,
                threshold: INVERSION_TOL,
            })
    }

    /// `|Z|^2` such that `<G|G> = 1`. `Z` itself is taken real positive.
    pub fn normalization_z(&self) -> Result<LogProb> {
        let alpha = self.displacement_alpha()?;
        let ln_det: f64 = kernel_eigenvalues(&self.a).iter().map(|e| e.ln()).sum();
        let quad = (alpha.adjoint() * &self.a * alpha.conjugate())[(0, 0)];
        let ln_z_sq = 0.5 * ln_det - alpha.norm_squared() + 2.0 * quad.re;
        Ok(LogProb::from_ln(ln_z_sq))
    }

    /// Real positive normalization constant `Z`.
    pub fn z(&self) -> Result<f64> {
        Ok((0.5 * self.normalization_z()?.ln()).exp())
    }

    /// Scales the creation operators of the last `gains.len()` modes:
    /// `A -> HAH`, `b -> Hb` with `H = diag(1, .., 1, g_1, .., g_K)`.
    pub fn h_transform(&self, gains: &GainVector) -> Result<GaussianPureState> {
        let m = self.modes();
        let k = gains.len();
        if k > m {
            return Err(Error::Shape(format!(
                "{k} gains for a {m}-mode state"
            )));
        }
        let h = gain_diagonal(m, gains.as_slice());
        let (a, b) = apply_gains(&self.a, &self.b, &h);
        let margin = margin_of(&a);
        if !(margin > PHYSICAL_TOL) {
            return Err(Error::GainTooLarge {
                margin,
                max_uniform_gain: max_uniform_gain(&self.a, k),
            });
        }
        Ok(GaussianPureState { a, b })
    }

    pub fn to_json(&self) -> String {
        let to_c = |z: &Complex64| JsonComplex { re: z.re, im: z.im };
        let doc = StateJson {
            modes: self.modes(),
            a: self
                .a
                .row_iter()
                .map(|row| row.iter().map(to_c).collect())
                .collect(),
            b: self.b.iter().map(to_c).collect(),
        };
        serde_json::to_string(&doc).expect("plain numeric document")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let m = doc.modes;
        if doc.a.len() != m || doc.a.iter().any(|r| r.len() != m) || doc.b.len() != m {
            return Err(Error::Shape(format!("document does not describe {m} modes")));
        }
        let a = CMatrix::from_fn(m, m, |i, j| {
            let z = &doc.a[i][j];
            Complex64::new(z.re, z.im)
        });
        let b = CVector::from_iterator(m, doc.b.iter().map(|z| Complex64::new(z.re, z.im)));
        GaussianPureState::new(a, b)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonComplex {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    #[serde(rename = "M")]
    modes: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<JsonComplex>>,
    b: Vec<JsonComplex>,
}

fn symmetrized(a: CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "A must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Err(Error::Shape("at least one mode is required".into()));
    }
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let asymmetry = (&a - a.transpose())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if asymmetry > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { asymmetry });
    }
    Ok((&a + a.transpose()).scale(0.5))
}

fn kernel_eigenvalues(a: &CMatrix) -> DVector<f64> {
    let m = a.nrows();
    let kernel = CMatrix::identity(m, m) - (a * a.adjoint()).scale(4.0);
    kernel.symmetric_eigenvalues()
}

fn margin_of(a: &CMatrix) -> f64 {
    kernel_eigenvalues(a).min()
}

/// Smallest eigenvalue of `I - 4AA^dag` for a raw matrix.
pub fn physicality_margin(a: &CMatrix) -> Result<f64> {
    let a = symmetrized(a.clone())?;
    Ok(margin_of(&a))
}

fn gain_diagonal(modes: usize, gains: &[f64]) -> Vec<f64> {
    let unmeasured = modes - gains.len();
    (0..modes)
        .map(|j| if j < unmeasured { 1.0 } else { gains[j - unmeasured] })
        .collect()
}

fn apply_gains(a: &CMatrix, b: &CVector, h: &[f64]) -> (CMatrix, CVector) {
    let a = CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (h[i] * h[j]));
    let b = CVector::from_fn(b.len(), |i, _| b[i] * h[i]);
    (a, b)
}

/// Largest uniform gain on the last `k` modes that keeps the state physical,
/// located as the first crossing of zero margin. `0.0` if even `g -> 0` fails.
pub fn max_uniform_gain(a: &CMatrix, k: usize) -> f64 {
    let m = a.nrows();
    let b = CVector::zeros(m);
    let margin_at = |g: f64| {
        let h = gain_diagonal(m, &vec![g; k]);
        margin_of(&apply_gains(a, &b, &h).0)
    };
    if margin_at(0.0) <= PHYSICAL_TOL {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while margin_at(hi) > PHYSICAL_TOL {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if margin_at(mid) > PHYSICAL_TOL {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    lo
}

/// Per-mode gains applied to the measured modes, which are the trailing modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector(Vec<f64>);

impl GainVector {
    pub fn new(gains: Vec<f64>) -> Result<Self> {
        if let Some(g) = gains.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "gains must be finite and positive, got {g}"
            )));
        }
        Ok(GainVector(gains))
    }

    pub fn uniform(gain: f64, measured: usize) -> Result<Self> {
        Self::new(vec![gain; measured])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn inverse(&self) -> GainVector {
        GainVector(self.0.iter().map(|g| 1.0 / g).collect())
    }
}

/// `V^T A V = diag(d)` with unitary `V` and `d` real, nonnegative and
/// descending; equivalently `A = conj(V) diag(d) V^dag`.
#[derive(Debug, Clone)]
pub struct TakagiDecomposition {
    pub v: CMatrix,
    pub d: Vec<f64>,
    /// Frobenius norm of `A - conj(V) diag(d) V^dag`.
    pub reconstruction_residual: f64,
}

impl TakagiDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let m = self.d.len();
        let diag = CMatrix::from_fn(m, m, |i, j| {
            if i == j {
                Complex64::new(self.d[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        self.v.conjugate() * diag * self.v.adjoint()
    }
}

/// Autonne-Takagi factorization of a complex symmetric matrix.
///
/// With `A = X + iY`, a column `u = x + iy` satisfies `A conj(u) = s u` exactly
/// when `(x; y)` is an eigenvector of the real symmetric matrix
/// `[[X, Y], [Y, -X]]` with eigenvalue `s`. Eigenvalues come in `+-s` pairs;
/// the `-s` partner of `u` is `iu`. Eigenvectors are taken in descending order
/// and kept when they are complex-orthogonal to those already chosen, which
/// also picks a valid basis inside degenerate and null clusters.
pub fn takagi(a: &CMatrix) -> Result<TakagiDecomposition> {
    let a = symmetrized(a.clone())?;
    let m = a.nrows();
    let embed = DMatrix::<f64>::from_fn(2 * m, 2 * m, |i, j| {
        let (bi, ii) = (i / m, i % m);
        let (bj, jj) = (j / m, j % m);
        let z = a[(ii, jj)];
        match (bi, bj) {
            (0, 0) => z.re,
            (1, 1) => -z.re,
            _ => z.im,
        }
    });
    let eig = embed.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut columns: Vec<CVector> = Vec::with_capacity(m);
    let mut d = Vec::with_capacity(m);
    for idx in order {
        if columns.len() == m {
            break;
        }
        let w = eig.eigenvectors.column(idx);
        let mut u = CVector::from_fn(m, |i, _| Complex64::new(w[i], w[i + m]));
        for c in &columns {
            let overlap = c.dotc(&u);
            u -= c * overlap;
        }
        let norm = u.norm();
        if norm > 0.5 {
            u /= Complex64::new(norm, 0.0);
            columns.push(u);
            d.push(eig.eigenvalues[idx].max(0.0));
        }
    }
    if columns.len() != m {
        return Err(Error::Shape(format!(
            "Takagi basis incomplete: found {} of {m} columns",
            columns.len()
        )));
    }
    let u = CMatrix::from_columns(&columns);
    let mut dec = TakagiDecomposition {
        v: u.conjugate(),
        d,
        reconstruction_residual: 0.0,
    };
    dec.reconstruction_residual = (&a - dec.reconstruct()).norm();
    Ok(dec)
}

/// Squeezing of each Takagi mode: `mu_j = 2 d_j = tanh r_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingParams {
    pub mu: Vec<f64>,
    pub r: Vec<f64>,
}

pub fn squeezing_params(dec: &TakagiDecomposition) -> Result<SqueezingParams> {
    let mut mu = Vec::with_capacity(dec.d.len());
    let mut r = Vec::with_capacity(dec.d.len());
    for (index, d) in dec.d.iter().enumerate() {
        let m = 2.0 * d;
        if !(m < 1.0) {
            return Err(Error::UnphysicalSqueezing { index, mu: m });
        }
        mu.push(m);
        r.push(m.atanh());
    }
    Ok(SqueezingParams { mu, r })
}

/// Squeezing in dB for a squeezing constant `r`: `20 r / ln 10`.
pub fn squeezing_db(r: f64) -> f64 {
    20.0 * r / std::f64::consts::LN_10
}
