//! Heralded non-Gaussian state preparation from two-mode Gaussian states.
//!
//! Photon counting on the control mode of a two-mode core Gaussian state
//! prepares `(a^dag + s0 a + delta0)^n |0>` in the signal mode. This crate
//! evaluates the heralding probability `P_n` exactly in log domain, maximizes
//! it over the entangling strength, and checks every closed form against a
//! brute-force Fock-space expansion.

// `!(x < y)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod core_state;
pub mod error;
pub mod fock_oracle;
pub mod gaussian;
pub mod heralding;
pub mod logprob;
pub mod poly;
pub mod sweep;
pub mod verify;

pub use core_state::{CoreParams, PsiState};
pub use error::{Error, Result};
pub use gaussian::{GainVector, GaussianPureState, TakagiDecomposition};
pub use heralding::{AsymptoticRegime, Method, OptResult, ScalingFit};
pub use logprob::LogProb;
pub use num_complex::Complex64;
