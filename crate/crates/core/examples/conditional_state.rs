//! Fock coefficients of the heralded state (a^dag + s0 a + delta0)^n |0>,
//! normalized, for a few parameter sets.
//!
//!     cargo run --example conditional_state -- 6 0.5 0.3+0.2i

use gbs_herald::core_state::{norm_lower_bound, psi_coefficients, psi_norm};
use gbs_herald::sweep::parse_complex;

fn main() -> gbs_herald::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(6), |s| s.parse()).expect("n is an integer");
    let s0: f64 = args.get(1).map_or(Ok(0.5), |s| s.parse()).expect("s0 is a number");
    let delta0 = parse_complex(args.get(2).map_or("0.3+0.2i", String::as_str))?;

    let psi = psi_coefficients(n, s0, delta0);
    println!("n = {n}, s0 = {s0}, delta0 = {delta0}");
    println!("ln <psi|psi> = {:.12}", psi_norm(n, s0, delta0).ln());
    if delta0.norm() == 0.0 {
        println!("lower bound  = {:.12}", norm_lower_bound(n, s0).ln());
    }
    println!("{:>3}  {:>14}  {:>14}  {:>12}", "k", "re", "im", "|c_k|^2");
    for (k, ck) in psi.coeffs.iter().enumerate() {
        println!("{k:>3}  {:>14.6e}  {:>14.6e}  {:>12.6e}", ck.re, ck.im, ck.norm_sqr());
    }
    Ok(())
}
