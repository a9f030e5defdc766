//! A local gain on the measured mode rescales the heralding probabilities
//! but leaves every heralded state unchanged.
//!
//!     cargo run --example gain_invariance

use gbs_herald::fock_oracle::expand_general_auto;
use gbs_herald::gaussian::max_uniform_gain;
use gbs_herald::{Complex64, CoreParams, GainVector};

fn main() -> gbs_herald::Result<()> {
    let state = CoreParams::new(0.5, 0.5, Complex64::new(0.3, 0.2))?.to_gaussian()?;
    println!("largest physical gain {:.4}", max_uniform_gain(state.a(), 1));
    let base = expand_general_auto(&state, 16)?;
    for g in [0.5, 0.8, 1.2] {
        let moved = state.h_transform(&GainVector::uniform(g, 1)?)?;
        let fock = expand_general_auto(&moved, 16)?;
        println!("gain {g}");
        for n in 0..=5 {
            let (p0, x) = base.condition_on(n)?;
            let (p1, y) = fock.condition_on(n)?;
            println!(
                "  n={n}  P {:.6e} -> {:.6e}  1-F {:.1e}",
                p0.linear(),
                p1.linear(),
                1.0 - x.fidelity(&y.amps)
            );
        }
    }
    Ok(())
}
