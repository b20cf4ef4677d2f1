use std::f64::consts::PI;

use crate::error::{precondition, Result};
use crate::stochastic::ComplexPhase;

/// Short-time transition density in θ plus the deterministic image of φ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub density: f64,
    pub phi_next: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Euler–Maruyama kernel from `phase_prev` over `dt`: Gaussian in θ with
/// mean θ′ − (θ′² − φ′² + U₀)dt and variance 2ε·dt; φ moves deterministically.
pub fn transition_kernel(
    phase: ComplexPhase,
    phase_prev: ComplexPhase,
    dt: f64,
    epsilon: f64,
    u0: f64,
) -> Result<KernelValue> {
    if !(dt > 0.0) || !(epsilon > 0.0) {
        return precondition("transition kernel needs dt > 0 and epsilon > 0");
    }
    let (th, ph) = (phase_prev.theta, phase_prev.phi);
    let mean = th - (th * th - ph * ph + u0) * dt;
    let variance = 2.0 * epsilon * dt;
    let d = phase.theta - mean;
    let density = (-d * d / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt();
    Ok(KernelValue { density, phi_next: ph - 2.0 * th * ph * dt, mean, variance })
}
