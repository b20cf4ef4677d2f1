//! Ai, Bi, A = Ai² + Bi², its log-derivatives and the A_p integrals.

use qrho::special::{a_p_integral, airy, ln_airy_modulus_derivs, Sign};

fn main() -> qrho::Result<()> {
    println!("{:>6} {:>14} {:>14} {:>14} {:>12} {:>12}", "x", "Ai", "Bi", "A", "(lnA)'", "(lnA)''");
    for i in 0..=12 {
        let x = -10.0 + 1.5 * i as f64;
        let v = airy(x)?;
        let d = ln_airy_modulus_derivs(x)?;
        println!("{x:>6.2} {:>14.6e} {:>14.6e} {:>14.6e} {:>12.6} {:>12.6}", v.ai, v.bi, v.modulus_sq, d.d1, d.d2);
    }
    println!("\nA_p(±β) for β = 1:");
    for p in [-0.5, 0.5, 1.5] {
        println!("  p = {p:>4}: {:.10e}  {:.10e}", a_p_integral(p, Sign::Plus, 1.0, None)?, a_p_integral(p, Sign::Minus, 1.0, None)?);
    }
    println!("  p = -1.5 (cutoff 0.01): {:.10e}", a_p_integral(-1.5, Sign::Plus, 1.0, Some(0.01))?);
    Ok(())
}
