//! Equilibrium distribution of level occupations and ground-state thermodynamics
//! of the oscillator coupled to the fluctuating vacuum.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::io::write_rows;
use crate::special::{airy, ln_a_p_integral, ln_airy_modulus_derivs, ln_airy_modulus_sq, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFunction {
    pub epsilon_plus: f64,
    pub e: f64,
    pub value: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return precondition(format!("{name} = {v} must be positive and finite"));
    }
    Ok(())
}

/// ln ϑ = ln A(−Ē) − ln A(Ē), Ē = E/ε₊^{2/3}.
pub fn ln_distribution(e: f64, epsilon_plus: f64) -> Result<f64> {
    check_positive("e", e)?;
    check_positive("epsilon_plus", epsilon_plus)?;
    let x = e / epsilon_plus.powf(2.0 / 3.0);
    Ok(ln_airy_modulus_sq(-x)? - ln_airy_modulus_sq(x)?)
}

/// ϑ(ε₊, E) = N_E/N_Σ = A(−Ē)/A(Ē).
pub fn distribution(e: f64, epsilon_plus: f64) -> Result<DistributionFunction> {
    Ok(DistributionFunction { epsilon_plus, e, value: ln_distribution(e, epsilon_plus)?.exp() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potentials {
    pub internal_energy: f64,
    pub helmholtz: f64,
    pub entropy: f64,
}

/// U = −∂_{ε₊} ln ϑ (Richardson-extrapolated central difference), F = −ln ϑ/ε₊, S = ε₊k(U + F).
pub fn potentials(e: f64, epsilon_plus: f64, k: f64) -> Result<Potentials> {
    check_positive("k", k)?;
    let f0 = ln_distribution(e, epsilon_plus)?;
    let h = 1e-4 * epsilon_plus;
    if !(h > f64::MIN_POSITIVE && epsilon_plus - h > 0.0 && epsilon_plus + h > epsilon_plus) {
        return precondition(format!("finite-difference step {h} underflows at epsilon_plus = {epsilon_plus}"));
    }
    let d = |h: f64| -> Result<f64> {
        Ok((ln_distribution(e, epsilon_plus + h)? - ln_distribution(e, epsilon_plus - h)?) / (2.0 * h))
    };
    let dln = (4.0 * d(0.5 * h)? - d(h)?) / 3.0;
    let u = -dln;
    let f = -f0 / epsilon_plus;
    Ok(Potentials { internal_energy: u, helmholtz: f, entropy: epsilon_plus * k * (u + f) })
}

/// S(x)/k = ln(A(x)/A(−x)) − (2/3)x[(ln A)′(−x) + (ln A)′(x)] from Airy derivatives.
pub fn entropy_airy(x: f64, k: f64) -> Result<f64> {
    let (p, m) = (ln_airy_modulus_derivs(x)?, ln_airy_modulus_derivs(-x)?);
    Ok(k * (p.value - m.value - 2.0 / 3.0 * x * (m.d1 + p.d1)))
}

/// Entropy of a level of energy E at noise strength ε₊, analytic form.
pub fn entropy_direct(e: f64, epsilon_plus: f64, k: f64) -> Result<f64> {
    check_positive("e", e)?;
    check_positive("epsilon_plus", epsilon_plus)?;
    entropy_airy(e / epsilon_plus.powf(2.0 / 3.0), k)
}

fn ln_ap(p: f64, x: f64) -> Result<f64> {
    let q = if x >= 0.0 { Sign::Plus } else { Sign::Minus };
    ln_a_p_integral(p, q, x.abs(), None)
}

/// The same entropy from the Laplace integrals A_p: A_{1/2}/A_{−1/2} = (ln A)′, A_{−1/2} ∝ A.
pub fn entropy_ap(beta: f64, k: f64) -> Result<f64> {
    let (lp, lm) = (ln_ap(-0.5, beta)?, ln_ap(-0.5, -beta)?);
    let rp = (ln_ap(0.5, beta)? - lp).exp();
    let rm = (ln_ap(0.5, -beta)? - lm).exp();
    Ok(k * (lp - lm - 2.0 / 3.0 * beta * (rm + rp)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundEnergy {
    /// Cut-off regularized divergent term; present only when a cutoff was given.
    pub vacuum_term: Option<f64>,
    pub e_osc: f64,
    /// Imaginary part of the mean energy, the inverse decay time.
    pub width_term: f64,
    pub decay_time: f64,
}

/// e_osc = ½Ω_as{1 − [(ln A)′² + (ln A)″]/λ₊} at −λ₊, i.e. ½Ω_as(3 − 2(Ai′² + Bi′²)/(λ₊A)).
pub fn e_osc(lambda_plus: f64, omega_as: f64) -> Result<f64> {
    check_positive("lambda_plus", lambda_plus)?;
    check_positive("omega_as", omega_as)?;
    let d = ln_airy_modulus_derivs(-lambda_plus)?;
    Ok(0.5 * omega_as * (1.0 - (d.d1 * d.d1 + d.d2) / lambda_plus))
}

/// ½Ω_as·A_{−3/2}(−λ₊; z ≥ cutoff)/A_{−1/2}(−λ₊).
pub fn vacuum_energy(lambda_plus: f64, omega_as: f64, cutoff: Option<f64>) -> Result<f64> {
    check_positive("lambda_plus", lambda_plus)?;
    check_positive("omega_as", omega_as)?;
    let Some(c) = cutoff else {
        return precondition("the vacuum term diverges at z = 0; supply a positive cutoff");
    };
    let num = ln_a_p_integral(-1.5, Sign::Minus, lambda_plus, Some(c))?;
    let den = ln_a_p_integral(-0.5, Sign::Minus, lambda_plus, None)?;
    Ok(0.5 * omega_as * (num - den).exp())
}

pub fn ground_energy(lambda_plus: f64, omega_as: f64, cutoff: Option<f64>) -> Result<GroundEnergy> {
    let e = e_osc(lambda_plus, omega_as)?;
    let d1 = ln_airy_modulus_derivs(-lambda_plus)?.d1;
    let width = omega_as / (2.0 * lambda_plus.sqrt()) * d1;
    let vacuum_term = match cutoff {
        Some(_) => Some(vacuum_energy(lambda_plus, omega_as, cutoff)?),
        None => None,
    };
    Ok(GroundEnergy { vacuum_term, e_osc: e, width_term: width, decay_time: 1.0 / width })
}

/// β₊ = e_osc·√λ₊/Ω_as, the ground-level energy in units of ε₊^{1/3}.
pub fn beta_plus(lambda_plus: f64, omega_as: f64) -> Result<f64> {
    Ok(e_osc(lambda_plus, omega_as)? * lambda_plus.sqrt() / omega_as)
}

/// Ground-state entropy from the A_p integrals at β₊.
pub fn ground_entropy(lambda_plus: f64, omega_as: f64, k: f64) -> Result<f64> {
    check_positive("k", k)?;
    entropy_ap(beta_plus(lambda_plus, omega_as)?, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub lambda_plus: f64,
    pub omega_as: f64,
    pub beta_plus: f64,
    pub e_osc: f64,
    pub level_width: f64,
    pub entropy: f64,
    pub boltzmann_k: f64,
}

impl ThermoPoint {
    pub fn new(lambda_plus: f64, omega_as: f64, k: f64) -> Result<Self> {
        let g = ground_energy(lambda_plus, omega_as, None)?;
        let beta = g.e_osc * lambda_plus.sqrt() / omega_as;
        Ok(ThermoPoint {
            lambda_plus,
            omega_as,
            beta_plus: beta,
            e_osc: g.e_osc,
            level_width: g.width_term,
            entropy: ground_entropy(lambda_plus, omega_as, k)?,
            boltzmann_k: k,
        })
    }
}

/// Rows `lambda_plus,e_osc,width,entropy`.
pub fn write_thermo_csv<W: Write>(w: W, points: &[ThermoPoint]) -> Result<()> {
    write_rows(
        w,
        "lambda_plus,e_osc,width,entropy",
        points.iter().map(|p| vec![p.lambda_plus, p.e_osc, p.level_width, p.entropy]),
    )
}

/// ∂_α ln A(x + α) at α = 0 straight from Ai, Bi and their derivatives (|x| ≤ 110).
pub fn d_ln_airy_modulus(x: f64) -> Result<f64> {
    let v = airy(x)?;
    Ok(2.0 * (v.ai * v.ai_prime + v.bi * v.bi_prime) / (v.ai * v.ai + v.bi * v.bi))
}
