//! Stationary phase density Q̄_s(θ̄) for a few (λ, γ), with its flux, mass
//! split and the flux-equation residual.

use qrho::fokker_planck::{flux_residual, StationaryDist};

fn main() -> qrho::Result<()> {
    let grid: Vec<f64> = (0..=8).map(|i| -8.0 + 2.0 * i as f64).collect();
    for (lambda, gamma) in [(0.5, 1.0), (5.0, 1.0), (1.0, -2.0), (1.0, 4.0)] {
        let d = StationaryDist::new(lambda, gamma, &grid)?;
        let (neg, pos) = d.split_mass()?;
        println!("lambda={lambda} gamma={gamma}: J0f={:.8e} norm={:.10} P-={neg:.4} P+={pos:.4}", d.j0f_scaled, d.normalization()?);
        for &(x, q) in &d.grid {
            println!("  {x:>5.1} {q:.8e}  residual {:+.1e}", flux_residual(lambda, gamma, x)? / d.j0f_scaled);
        }
    }
    Ok(())
}
