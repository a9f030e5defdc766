//! Build a three-mode pure Gaussian state, inspect its squeezing spectrum,
//! normalization and displacement, and round-trip it through JSON.
//!
//!     cargo run --example gaussian_state

use gbs_herald::gaussian::{squeezing_db, squeezing_params, takagi, CMatrix, CVector};
use gbs_herald::{Complex64, GaussianPureState};

fn main() -> gbs_herald::Result<()> {
    let c = Complex64::new;
    let a = CMatrix::from_row_slice(
        3,
        3,
        &[
            c(0.10, 0.00), c(0.15, 0.05), c(0.00, 0.02),
            c(0.15, 0.05), c(0.05, -0.10), c(0.08, 0.00),
            c(0.00, 0.02), c(0.08, 0.00), c(0.20, 0.03),
        ],
    );
    let b = CVector::from_vec(vec![c(0.3, 0.0), c(0.0, -0.2), c(0.1, 0.1)]);
    let state = GaussianPureState::new(a, b)?;

    let dec = takagi(state.a())?;
    let sq = squeezing_params(&dec)?;
    println!("physicality margin  {:.6}", state.physicality_margin());
    println!("takagi residual     {:.2e}", dec.reconstruction_residual);
    for (j, (mu, r)) in sq.mu.iter().zip(&sq.r).enumerate() {
        println!("mode {j}: mu = {mu:.6}, r = {r:.6}, {:.3} dB", squeezing_db(*r));
    }

    let alpha = state.displacement_alpha()?;
    println!("|Z|^2               {:.12}", state.normalization_z()?.linear());
    println!("|alpha|             {:.6}", alpha.norm());

    let json = state.to_json();
    let back = GaussianPureState::from_json(&json)?;
    println!("json round trip     {:.2e}", (back.a() - state.a()).norm() + (back.b() - state.b()).norm());
    Ok(())
}
