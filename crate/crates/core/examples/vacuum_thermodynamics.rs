//! Ground level of the oscillator in the fluctuating vacuum: energy shift,
//! width, decay time and entropy against λ₊; plus the level distribution ϑ.

use qrho::thermo::{distribution, ground_energy, potentials, ThermoPoint};

fn main() -> qrho::Result<()> {
    let omega = 1.0;
    println!("{:>8} {:>10} {:>10} {:>10} {:>12} {:>12}", "lam+", "e_osc", "width", "decay", "beta+", "S/k");
    for lp in [0.1, 0.3, 1.0, 3.0, 10.0, 100.0, 1000.0] {
        let p = ThermoPoint::new(lp, omega, 1.0)?;
        let g = ground_energy(lp, omega, Some(1e-3))?;
        println!("{lp:>8} {:>10.6} {:>10.6} {:>10.4} {:>12.6} {:>12.6}", p.e_osc, p.level_width, g.decay_time, p.beta_plus, p.entropy);
    }
    println!("\nlevel distribution at eps+ = 1:");
    for e in [0.1, 1.0, 3.0, 10.0] {
        let p = potentials(e, 1.0, 1.0)?;
        println!("  E = {e:>4}: theta = {:.6e}  U = {:.6}  F = {:.6}  S = {:.6}", distribution(e, 1.0)?.value, p.internal_energy, p.helmholtz, p.entropy);
    }
    Ok(())
}
