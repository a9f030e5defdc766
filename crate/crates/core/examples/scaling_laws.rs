//! Large-n behaviour of the optimal heralding probability: exact optima
//! against the asymptotic forms, and fitted power-law exponents.
//!
//!     cargo run --release --example scaling_laws

use gbs_herald::heralding::{fit_gamma, optimize_added, optimize_parity};
use gbs_herald::sweep::{asymptotic_table, log_spaced_n};

fn main() -> gbs_herald::Result<()> {
    let alpha = 2.0;
    println!("{:<10} {:>6} {:>8} {:>10}", "regime", "param", "n", "ratio");
    for row in asymptotic_table(&[100, 1_000, 10_000, 100_000], alpha)? {
        println!("{:<10} {:>6} {:>8} {:>10.6}", row.regime, row.param, row.n, row.ratio());
    }

    let ns = log_spaced_n(100, 2_000, 12);
    for s0 in [0.0, 0.5, 1.0, 1.5] {
        let pts: Vec<(f64, f64)> = ns
            .iter()
            .map(|&n| optimize_parity(n, s0).map(|r| (n as f64, r.log_pn)))
            .collect::<gbs_herald::Result<_>>()?;
        let fit = fit_gamma(&pts)?;
        println!("s0 = {s0:<4} P_n ~ {:.4} n^-{:.4}", fit.prefactor, fit.gamma);
    }
    let pts: Vec<(f64, f64)> = log_spaced_n(1_000, 100_000, 10)
        .iter()
        .map(|&n| optimize_added(n, alpha).map(|r| (n as f64, r.log_pn)))
        .collect::<gbs_herald::Result<_>>()?;
    let fit = fit_gamma(&pts)?;
    println!("|alpha| = {alpha} P_n ~ {:.4} n^-{:.4}", fit.prefactor, fit.gamma);
    Ok(())
}
