//! Expand the two-mode Gaussian state in the Fock basis, herald on the
//! signal mode and compare with the analytic probabilities and states.
//!
//!     cargo run --example fock_oracle

use gbs_herald::core_state::psi_coefficients;
use gbs_herald::fock_oracle::expand_core_auto;
use gbs_herald::heralding::HeraldingCurve;
use gbs_herald::{Complex64, CoreParams};

fn main() -> gbs_herald::Result<()> {
    let p = CoreParams::from_lambda_sq(0.35, 1.0, Complex64::new(0.3, 0.2))?;
    let n_max = 8;
    let fock = expand_core_auto(&p, n_max)?;
    println!(
        "cutoffs a={} c={}, mass {:.15}, tail bound {:.1e}",
        fock.cutoff_a(),
        fock.cutoff_c(),
        fock.total_mass(),
        fock.tail_bound
    );
    println!("{:>2}  {:>22}  {:>22}  {:>9}  {:>9}", "n", "oracle P_n", "analytic P_n", "|dP|", "1-F");
    for n in 0..=n_max {
        let (oracle, state) = fock.condition_on(n)?;
        let analytic = HeraldingCurve::new(n, p.s0(), p.delta0()).log_pn(&p);
        let psi = psi_coefficients(n, p.s0(), p.delta0());
        println!(
            "{n:>2}  {:>22.15e}  {:>22.15e}  {:>9.1e}  {:>9.1e}",
            oracle.linear(),
            analytic.linear(),
            (oracle.linear() - analytic.linear()).abs(),
            1.0 - state.fidelity(&psi.coeffs)
        );
    }
    Ok(())
}
