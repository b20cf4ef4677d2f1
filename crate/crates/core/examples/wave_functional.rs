//! Stochastic wave functionals: orthonormality in a sampled frame and the
//! ensemble average ψ_br against the noiseless solution.

use qrho::stochastic::{FrequencyProfile, NoiseSpec, PhaseIntegrator};
use qrho::wavefunc::{gram_matrix, psi_br, psi_in, FrameState};

fn main() -> qrho::Result<()> {
    let profile = FrequencyProfile::step(1.0, 2.0, 0.0, 0.0)?;
    let integ = PhaseIntegrator::new(profile, -1e-3, 1.5, 1e-3, 50.0)?.with_stride(50);
    let tr = integ.run(&NoiseSpec::new(0.3, 3, 0)?)?;
    let frame = FrameState::from_trajectory(&tr, tr.len() - 1)?;
    println!("frame at t = 1.5: {frame:?}");
    let g = gram_matrix(8, &frame)?;
    let worst = (0..9).flat_map(|m| (0..9).map(move |n| (m, n))).map(|(m, n)| (g[m][n] - if m == n { 1.0 } else { 0.0 }).norm()).fold(0.0, f64::max);
    println!("max |<psi_m|psi_n> - delta_mn| = {worst:.2e}");

    let xs: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
    let flat = PhaseIntegrator::new(FrequencyProfile::constant(1.0, 0.0)?, 0.0, 2.0, 1e-3, 50.0)?.with_stride(100);
    for eps in [0.0, 0.05, 0.3] {
        let ens = flat.ensemble(&NoiseSpec::new(eps, 11, 0)?, 400)?;
        let b = psi_br(0, &xs, &ens, 2.0)?;
        let dev = (0..xs.len()).map(|i| (b.value(i) - psi_in(0, xs[i], 2.0, 1.0).unwrap()).norm()).fold(0.0, f64::max);
        println!("eps = {eps}: alpha = {:.3}, max |psi_br - psi_in| = {dev:.3e}, mean std error {:.2e}", b.alpha, b.mean_std_error());
    }
    Ok(())
}
