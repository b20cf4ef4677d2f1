//! Averaged vacuum-to-vacuum transition probability over the step strength ρ.

use qrho::transitions::{delta_00, delta_00_simplified};

fn main() -> qrho::Result<()> {
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "rho", "lam=0.3", "lam=3", "lam=30", "sqrt(1-rho)");
    for i in 0..10 {
        let rho = 0.1 * i as f64;
        let row: Vec<f64> = [0.3, 3.0, 30.0].iter().map(|&l| delta_00_simplified(l, rho).map(|r| r.delta)).collect::<qrho::Result<_>>()?;
        println!("{rho:>5.1} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", row[0], row[1], row[2], (1.0 - rho).sqrt());
    }
    let two = delta_00(1.0, 2.0, 0.36)?;
    println!("\ntwo-sided, lambda = 1, lambda_plus = 2, rho = 0.36: delta = {:.8} (gamma = {:.4})", two.delta, two.gamma);
    Ok(())
}
