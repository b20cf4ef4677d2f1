//! Euler–Maruyama ensemble of the complex-phase SDE on a constant channel,
//! compared with the stationary Fokker–Planck density.

use qrho::fokker_planck::StationaryDist;
use qrho::stochastic::{default_theta_max, FrequencyProfile, HistogramSpec, NoiseSpec, PhaseIntegrator};

fn main() -> qrho::Result<()> {
    let (omega, eps) = (1.0, 1.0);
    let profile = FrequencyProfile::constant(omega, 0.0)?;
    let integ = PhaseIntegrator::new(profile, 0.0, 60.0, 2e-3, default_theta_max(omega, eps))?;
    let spec = HistogramSpec { lo: -12.0, hi: 12.0, bins: 48, sample_from: 20.0, sample_every: 50, windows: 4 };
    let stats = integ.theta_statistics(&NoiseSpec::new(eps, 7, 0)?, 2000, &spec)?;

    // λ = Ω²/ε^{2/3}, γ = 1 without offset; θ̄ = θ/ε^{1/3}.
    let q = StationaryDist::new(omega * omega, 1.0, &[])?;
    let l1 = stats.l1_distance(|a, b| q.mass(a, b))?;
    println!("{} samples, mean theta {:.4}, P(theta>0) {:.4}", stats.samples, stats.mean_theta(), stats.positive_fraction());
    println!("L1 distance to the stationary density: {l1:.4}");
    println!("reinjections per window: {:?}", stats.reinjection_windows);
    for (i, d) in stats.density().iter().enumerate().step_by(4) {
        let (c, w) = (stats.bin_center(i), stats.bin_width());
        println!("  {c:>6.2} sde {d:.4}  fp {:.4}", q.mass(c - w / 2.0, c + w / 2.0)? / w);
    }

    let tr = integ.with_stride(500).run(&NoiseSpec::new(eps, 7, 0)?)?;
    println!("single trajectory: {} nodes, {} reinjections, sigma(T) = {:.4e}", tr.len(), tr.reinjections.len(), tr.sigma[tr.len() - 1]);
    Ok(())
}
