use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::special::ln_airy_modulus_sq;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCounts {
    pub e_bar: f64,
    pub n_sigma: f64,
    pub n_e: f64,
    pub p_e: f64,
}

fn scaled_energy(e: f64, epsilon: f64) -> Result<f64> {
    if !(e > 0.0) || !(epsilon > 0.0) || !e.is_finite() || !epsilon.is_finite() {
        return precondition("spectral counts need e > 0 and epsilon > 0");
    }
    Ok(e / epsilon.powf(2.0 / 3.0))
}

/// Integrated density of states N_Σ = ε^(1/3)/(π²·A(−Ē)).
pub fn n_sigma(e: f64, epsilon: f64) -> Result<f64> {
    let eb = scaled_energy(e, epsilon)?;
    Ok(epsilon.cbrt() * (-2.0 * PI.ln() - ln_airy_modulus_sq(-eb)?).exp())
}

/// Localized-state count N_E = ε^(1/3)/(π²·A(Ē)).
pub fn n_e(e: f64, epsilon: f64) -> Result<f64> {
    let eb = scaled_energy(e, epsilon)?;
    Ok(epsilon.cbrt() * (-2.0 * PI.ln() - ln_airy_modulus_sq(eb)?).exp())
}

/// P_E = N_E/N_Σ = A(−Ē)/A(Ē).
pub fn p_e(e: f64, epsilon: f64) -> Result<f64> {
    let eb = scaled_energy(e, epsilon)?;
    Ok((ln_airy_modulus_sq(-eb)? - ln_airy_modulus_sq(eb)?).exp())
}

pub fn spectral_counts(e: f64, epsilon: f64) -> Result<SpectralCounts> {
    Ok(SpectralCounts {
        e_bar: scaled_energy(e, epsilon)?,
        n_sigma: n_sigma(e, epsilon)?,
        n_e: n_e(e, epsilon)?,
        p_e: p_e(e, epsilon)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_sigma_asymptote_correction() {
        // Ē = 100 with ε = 1: relative deviation from √E/π is (5/32)/E³ ± 20%.
        let e: f64 = 100.0;
        let dev = n_sigma(e, 1.0).unwrap() / (e.sqrt() / PI) - 1.0;
        let expect = 5.0 / 32.0 / e.powi(3);
        assert!((dev / expect - 1.0).abs() < 0.2, "{dev:e} vs {expect:e}");
    }

    #[test]
    fn n_sigma_small_noise_and_breakdown() {
        let e: f64 = 2.0;
        let v = n_sigma(e, 1e-6).unwrap();
        assert!((v / (e.sqrt() / PI) - 1.0).abs() < 1e-6);
        let exact = n_sigma(1.0, 1.0).unwrap();
        assert!((exact - 1.0 / (PI * PI * 0.297_640_916_7)).abs() < 1e-8);
        assert!((exact / (1.0 / PI) - 1.0).abs() > 0.01);
    }

    #[test]
    fn n_e_values() {
        assert!((n_e(1.0, 1.0).unwrap() - 1.0 / (PI * PI * 1.476177)).abs() < 1e-6);
        assert!((n_e(1.0, 1.0).unwrap() - 0.06864).abs() < 1e-5);
        let e: f64 = 10.0;
        let ratio = n_e(e, 1.0).unwrap() / (e.sqrt() / PI * (-(4.0 / 3.0) * e.powf(1.5)).exp());
        // Leading order: the ratio is 1 + O(Ē^(−3/2)).
        assert!((ratio - 1.0).abs() < 2.0 * e.powf(-1.5), "{ratio}");
        let tiny = 1e-12;
        assert!((n_e(tiny, 1.0).unwrap() / n_sigma(tiny, 1.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn p_e_values() {
        assert!((p_e(1.0, 1.0).unwrap() - 0.20163).abs() < 1e-5);
        let v = p_e(10.0, 1.0).unwrap();
        let lead = (-(4.0 / 3.0) * 10f64.powf(1.5)).exp();
        assert!((v / lead - 1.0).abs() < 2.0 * 10f64.powf(-1.5), "{v:e} vs {lead:e}");
        assert!((p_e(1e-12, 1.0).unwrap() - 1.0).abs() < 1e-9);
        let c = spectral_counts(3.0, 0.5).unwrap();
        assert!((c.p_e - c.n_e / c.n_sigma).abs() < 1e-14 * c.p_e);
        assert!(c.p_e > 0.0 && c.p_e <= 1.0);
        assert!(n_e(-1.0, 1.0).is_err());
    }
}
