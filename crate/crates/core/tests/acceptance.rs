//! Exit criteria. Each test prints one PASS/FAIL line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see them.

use std::f64::consts::{E, PI};
use std::time::Instant;

use gbs_herald::core_state::{norm_lower_bound, psi_coefficients, psi_norm_parity};
use gbs_herald::fock_oracle::{expand_core_columns, expand_general_auto};
use gbs_herald::gaussian::{takagi, CMatrix, CVector};
use gbs_herald::heralding::{
    asymptotic_pn, fit_gamma, optimize, optimize_added, optimize_parity, HeraldingCurve,
};
use gbs_herald::sweep::log_spaced_n;
use gbs_herald::{AsymptoticRegime, Complex64, CoreParams, GainVector, GaussianPureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!(
        "[criterion {id:>2}] {} {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let s0s = [0.0, 0.5, 1.0, 1.5, 2.0];
    let deltas = [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 1.0), c(0.3, 0.2), c(1.0, 0.0)];
    let mut worst_dev = 0.0f64;
    let mut worst_infid = 0.0f64;
    let mut points = 0;
    for &s0 in &s0s {
        let hi = 0.9 / (1.0 + s0);
        for i in 0..5 {
            let lambda_sq = 0.05 + (hi - 0.05) * i as f64 / 4.0;
            for &d in &deltas {
                let p = CoreParams::from_lambda_sq(lambda_sq, s0, d).unwrap();
                let fock = expand_core_columns(&p, 8);
                for n in 0..=8 {
                    let (oracle_p, state) = fock.condition_on(n).unwrap();
                    let analytic = HeraldingCurve::new(n, s0, d).log_pn(&p).linear();
                    worst_dev = worst_dev.max((oracle_p.linear() - analytic).abs());
                    let psi = psi_coefficients(n, s0, d);
                    worst_infid = worst_infid.max(1.0 - state.fidelity(&psi.coeffs));
                }
                points += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "oracle equivalence",
        worst_dev <= 1e-9 && worst_infid <= 1e-10 && secs < 60.0,
        format!(
            "{points} points, n<=8: max |dP| = {worst_dev:.2e} (tol 1e-9), max 1-F = {worst_infid:.2e} (tol 1e-10), {secs:.2}s"
        ),
    );
}

#[test]
fn criterion_02_closed_form_exactness() {
    let mut worst = 0.0f64;
    for n in 1..=50usize {
        let nf = n as f64;
        let r = optimize_parity(n, 0.0).unwrap();
        worst = worst.max(rel(r.lambda_sq_opt, nf / (nf + 1.0)));
        // n^n / (n+1)^(n+1)
        let exact = nf * nf.ln() - (nf + 1.0) * (nf + 1.0).ln();
        worst = worst.max(rel(r.pn, exact.exp()));
        let r = optimize_parity(n, 1.0).unwrap();
        worst = worst.max(rel(r.lambda_sq_opt, nf / (2.0 * nf + 1.0)));
    }
    report(
        2,
        "closed-form exactness",
        worst <= 1e-12,
        format!("max relative error {worst:.2e} (tol 1e-12)"),
    );
}

#[test]
fn criterion_03_stirling_s1() {
    let start = Instant::now();
    let n = 10_000usize;
    let r = optimize_parity(n, 1.0).unwrap();
    let nf = n as f64;
    let scaled = (r.log_pn + 0.5 * (2.0 * PI).ln() + nf.ln() + 0.5).exp();
    let secs = start.elapsed().as_secs_f64();
    report(
        3,
        "Stirling asymptote at s0=1",
        (scaled - 1.0).abs() <= 0.01 && secs < 1.0,
        format!("P_n sqrt(2pi) n e^(1/2) = {scaled:.6} at n=1e4 (tol 0.01), {secs:.3}s"),
    );
}

#[test]
fn criterion_04_fock_asymptote() {
    let n = 10_000usize;
    let r = optimize_parity(n, 0.0).unwrap();
    let scaled = r.pn * E * n as f64;
    report(
        4,
        "Fock-state asymptote",
        (scaled - 1.0).abs() <= 0.01,
        format!("P_n e n = {scaled:.6} at n=1e4 (tol 0.01)"),
    );
}

#[test]
fn criterion_05_photon_added_asymptote() {
    let start = Instant::now();
    let n = 100_000usize;
    let alpha = 2.0;
    let r = optimize_added(n, alpha).unwrap();
    let asym = asymptotic_pn(AsymptoticRegime::Added { alpha_abs: alpha }, n).unwrap();
    let ratio = (r.log_pn - asym.ln()).exp();
    let secs = start.elapsed().as_secs_f64();
    report(
        5,
        "photon-added asymptote",
        (ratio - 1.0).abs() <= 0.05 && secs < 10.0,
        format!("P_n / asymptote = {ratio:.5} at |alpha|=2, n=1e5 (tol 0.05), {secs:.3}s"),
    );
}

#[test]
fn criterion_06_scaling_exponents() {
    let ns = log_spaced_n(100, 2000, 12);
    let mut ok = true;
    let mut detail = Vec::new();
    for s0 in [0.5, 1.0, 1.5] {
        let pts: Vec<(f64, f64)> = ns
            .iter()
            .map(|&n| (n as f64, optimize_parity(n, s0).unwrap().log_pn))
            .collect();
        let fit = fit_gamma(&pts).unwrap();
        ok &= (fit.gamma - 1.0).abs() <= 0.05;
        detail.push(format!("s0={s0}: gamma={:.4}", fit.gamma));
    }
    let ns = log_spaced_n(1_000, 100_000, 10);
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| (n as f64, optimize_added(n, 2.0).unwrap().log_pn))
        .collect();
    let fit = fit_gamma(&pts).unwrap();
    ok &= (fit.gamma - 0.75).abs() <= 0.03;
    detail.push(format!("|alpha|=2: gamma={:.4}", fit.gamma));
    report(
        6,
        "scaling exponents",
        ok,
        format!("{} (tol 1+-0.05, 0.75+-0.03)", detail.join(", ")),
    );
}

#[test]
fn criterion_07_magnitude_at_n20() {
    let rot = c((PI / 4.0).cos(), (PI / 4.0).sin());
    let mut sets = Vec::new();
    for d in [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), rot] {
        for s0 in [0.5, 1.0, 1.5] {
            sets.push((s0, d));
        }
    }
    let mut ok = true;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (s0, d) in sets {
        let p = optimize(20, s0, d).unwrap().pn;
        ok &= (1e-3..=1e-1).contains(&p);
        lo = lo.min(p);
        hi = hi.max(p);
    }
    report(
        7,
        "magnitude at n=20",
        ok,
        format!("P_20 in [{lo:.4e}, {hi:.4e}] over 12 sets (bracket [1e-3, 1e-1])"),
    );
}

#[test]
fn criterion_08_extremality() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=30usize);
        let s0 = rng.random_range(0.0..=2.0);
        let r = rng.random_range(0.0..=2.0);
        let phi = rng.random_range(0.0..2.0 * PI);
        let d = Complex64::from_polar(r, phi);
        let opt = optimize(n, s0, d).unwrap();
        let curve = HeraldingCurve::new(n, s0, d);
        let x = opt.lambda_sq_opt;
        let fd = (curve.ln_pn_at(x + h) - curve.ln_pn_at(x - h)) / (2.0 * h);
        worst = worst.max(fd.abs());
    }
    report(
        8,
        "extremality",
        worst <= 1e-4,
        format!("max |d lnP / d lambda^2| = {worst:.2e} over 200 draws (tol 1e-4)"),
    );
}

#[test]
fn criterion_09_norm_lower_bound() {
    let mut min_gap = f64::INFINITY;
    for s0 in [0.25, 1.0, 1.75] {
        for n in (0..=200).step_by(2) {
            let gap = psi_norm_parity(n, s0).ln() - norm_lower_bound(n, s0).ln();
            min_gap = min_gap.min(gap);
        }
    }
    report(
        9,
        "norm lower bound",
        min_gap >= 0.0,
        format!("min ln(norm / bound) = {min_gap:.4e} over even n<=200"),
    );
}

fn random_symmetric(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    let x = CMatrix::from_fn(m, m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&x + x.transpose()).scale(0.5)
}

fn random_physical_two_mode(rng: &mut ChaCha8Rng) -> GaussianPureState {
    let a = random_symmetric(rng, 2);
    let top = a.singular_values().max();
    let target = rng.random_range(0.1..0.4);
    let a = a.scale(target / top);
    let b = CVector::from_fn(2, |_, _| c(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)));
    GaussianPureState::new(a, b).unwrap()
}

#[test]
fn criterion_10_gaussian_core_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);

    let mut worst_takagi = 0.0f64;
    for i in 0..100 {
        let m = 1 + i % 6;
        let a = random_symmetric(&mut rng, m);
        let dec = takagi(&a).unwrap();
        worst_takagi = worst_takagi.max(dec.reconstruction_residual);
    }

    let mut worst_norm = 0.0f64;
    for _ in 0..10 {
        let s = random_physical_two_mode(&mut rng);
        let f = expand_general_auto(&s, 16).unwrap();
        worst_norm = worst_norm.max((f.total_mass() - 1.0).abs());
    }

    let mut worst_infid = 0.0f64;
    let core = CoreParams::new(0.5, 0.5, c(0.3, 0.2)).unwrap().to_gaussian().unwrap();
    let general = random_physical_two_mode(&mut rng);
    for state in [core, general] {
        let before = expand_general_auto(&state, 16).unwrap();
        for g in [0.5, 1.2] {
            let moved = state.h_transform(&GainVector::uniform(g, 1).unwrap()).unwrap();
            let after = expand_general_auto(&moved, 16).unwrap();
            for n in 0..=6 {
                let (_, x) = before.condition_on(n).unwrap();
                let (_, y) = after.condition_on(n).unwrap();
                worst_infid = worst_infid.max(1.0 - x.fidelity(&y.amps));
            }
        }
    }

    report(
        10,
        "Gaussian core suite",
        worst_takagi <= 1e-10 && worst_norm <= 1e-9 && worst_infid <= 1e-9,
        format!(
            "Takagi residual {worst_takagi:.2e} (tol 1e-10), |<G|G>-1| {worst_norm:.2e} (tol 1e-9), H-transform 1-F {worst_infid:.2e} (tol 1e-9)"
        ),
    );
}
