//! Write the CSV data behind every figure into a directory and print the
//! fitted exponents or spreads of each curve.
//!
//!     cargo run --release --example figure_data -- out/

use std::path::PathBuf;

use gbs_herald::sweep::{run_sweep, sweep_csv, write_file, Figure, SweepSpec};

fn main() -> gbs_herald::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;
    for (name, fig) in [
        ("2", Figure::Two),
        ("3", Figure::Three),
        ("4a", Figure::FourA),
        ("4b", Figure::FourB),
        ("4c", Figure::FourC),
    ] {
        let spec = SweepSpec::figure(fig);
        let results = run_sweep(&spec)?;
        let path = dir.join(format!("figure{name}.csv"));
        write_file(&path, &sweep_csv(&spec, &results, &format!("figure_data {name}")))?;
        println!("{}", path.display());
        for r in &results {
            let (n, s0, d) = r.curve.points[0];
            match r.upper_decade_fit() {
                Some(fit) => println!("  s0={s0} delta0={d}: gamma = {:.4}", fit.gamma),
                None => println!("  n={n} delta0={d}: spread over s0 = {:.3}", r.spread()),
            }
        }
    }
    Ok(())
}
