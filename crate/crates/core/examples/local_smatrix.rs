//! Local S-matrix between the post-step in-frame and the out channel:
//! selection rules, closed forms and unitarity.

use qrho::wavefunc::{closed_forms, s_local, FrameState};

fn main() -> qrho::Result<()> {
    for ratio in [2.0, 4.0] {
        let (wi, wo) = (1.0, ratio);
        let fi = FrameState::after_sudden_step(wi, wo, 0.7)?;
        let fo = FrameState::deterministic(wo, 0.7)?;
        let s = s_local(32, &fi, &fo)?;
        let cf = closed_forms(&fi, &fo)?;
        println!("Omega_out/Omega_in = {ratio}");
        println!("  |S00|^2 = {:.15} (2 sqrt(wi wo)/(wi + wo) = {:.15})", s.vacuum_persistence(), 2.0 * (wi * wo).sqrt() / (wi + wo));
        println!("  S20 = {:.6}, closed form {:.6}", s.get(2, 0), cf.s20);
        println!("  S11 - S00^3 = {:.1e}", (s.get(1, 1) - s.get(0, 0).powu(3)).norm());
        println!("  parity violation = {:.1e}", s.parity_violation());
        for n in [0, 2, 4] {
            println!("  unitarity defect ({n},{n}) at K = 32: {:.2e}", s.unitarity_defect(32, n, n));
        }
    }
    Ok(())
}
