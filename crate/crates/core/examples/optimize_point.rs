//! Optimal gain lambda^2 and heralding probability at one parameter point,
//! with every candidate root of the extremality polynomial.
//!
//!     cargo run --example optimize_point -- 10 1.0 1+0.5i

use gbs_herald::heralding::optimize;
use gbs_herald::sweep::parse_complex;

fn main() -> gbs_herald::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(10), |s| s.parse()).expect("n is an integer");
    let s0: f64 = args.get(1).map_or(Ok(1.0), |s| s.parse()).expect("s0 is a number");
    let delta0 = parse_complex(args.get(2).map_or("1+0.5i", String::as_str))?;

    let r = optimize(n, s0, delta0)?;
    println!("n = {n}, s0 = {s0}, delta0 = {delta0}");
    println!("method        {}", r.method);
    println!("lambda^2_opt  {:.15}", r.lambda_sq_opt);
    println!("P_n           {:.15e}", r.pn);
    println!("margin        {:.3e}", r.feasibility_margin);
    for root in &r.candidate_roots {
        match root.log_pn {
            Some(l) => println!("  root {:>20.15}  feasible  ln P = {l:.12}", root.root),
            None => println!("  root {:>20.15}  rejected", root.root),
        }
    }
    Ok(())
}
