use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::stochastic::Trajectory;

/// Polar data of a classical solution ξ = σ·e^{ir} of ξ̈ + Ω²(t)ξ = 0.
///
/// `omega_in` is the channel frequency the frame is normalized to (Ω_out for
/// an out-channel frame). `r` is the unwrapped phase; square-root branches
/// downstream are continued through it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameState {
    pub sigma: f64,
    pub sigma_t: f64,
    pub r: f64,
    pub r_t: f64,
    pub tau: f64,
    pub omega_in: f64,
}

const FRAME_TOL: f64 = 1e-8;

impl FrameState {
    /// Checked constructor: r_t·σ² = Ω and r = Ω·τ to relative 1e-8.
    pub fn new(sigma: f64, sigma_t: f64, r: f64, r_t: f64, tau: f64, omega_in: f64) -> Result<Self> {
        FrameState { sigma, sigma_t, r, r_t, tau, omega_in }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let FrameState { sigma, sigma_t, r, r_t, tau, omega_in } = self;
        if !(omega_in > 0.0 && omega_in.is_finite()) {
            return precondition("frame frequency must be positive and finite");
        }
        if !(sigma > 0.0 && sigma.is_finite() && r_t > 0.0 && r_t.is_finite()) {
            return precondition(format!("frame needs sigma > 0 and r_t > 0 (sigma={sigma}, r_t={r_t})"));
        }
        if !sigma_t.is_finite() || !r.is_finite() || !tau.is_finite() {
            return precondition("frame entries must be finite");
        }
        let w = r_t * sigma * sigma;
        if (w - omega_in).abs() > FRAME_TOL * omega_in {
            return precondition(format!("r_t*sigma^2 = {w} differs from the channel frequency {omega_in}"));
        }
        if (r - omega_in * tau).abs() > FRAME_TOL * r.abs().max(1.0) {
            return precondition(format!("r = {r} differs from omega*tau = {}", omega_in * tau));
        }
        Ok(self)
    }

    /// Free in-channel solution ξ = e^{iΩt}.
    pub fn deterministic(omega: f64, t: f64) -> Result<Self> {
        FrameState::new(1.0, 0.0, omega * t, omega, t, omega)
    }

    /// From a complex solution and its derivative; `r` must be an unwrapped argument of ξ.
    pub fn from_xi(omega: f64, xi: Complex64, xi_dot: Complex64, r: f64) -> Result<Self> {
        let sigma = xi.norm();
        let wrap = (xi.arg() - r) / std::f64::consts::TAU;
        if !(sigma > 0.0) || (wrap - wrap.round()).abs() > 1e-9 {
            return precondition("r is not an argument of xi");
        }
        let q = xi_dot / xi;
        FrameState::new(sigma, sigma * q.re, r, q.im, r / omega, omega)
    }

    /// In-channel solution continued through a sudden step Ω_in → Ω_out at t = 0:
    /// ξ = cos Ω_out t + i(Ω_in/Ω_out) sin Ω_out t for t ≥ 0.
    pub fn after_sudden_step(omega_in: f64, omega_out: f64, t: f64) -> Result<Self> {
        if !(omega_out > 0.0) || !(t >= 0.0) {
            return precondition("sudden-step frame needs omega_out > 0 and t >= 0");
        }
        let (s, c) = (omega_out * t).sin_cos();
        let xi = Complex64::new(c, omega_in / omega_out * s);
        let xi_dot = Complex64::new(-omega_out * s, omega_in * c);
        // ξ stays in the quadrant of Ω_out·t, which fixes the unwrapped argument.
        let tau = std::f64::consts::TAU;
        let r = xi.arg() + ((omega_out * t - xi.arg()) / tau).round() * tau;
        FrameState::from_xi(omega_in, xi, xi_dot, r)
    }

    /// Frame carried by recorded node k of a trajectory.
    pub fn from_trajectory(tr: &Trajectory, k: usize) -> Result<Self> {
        if k >= tr.len() {
            return precondition(format!("node {k} outside trajectory of length {}", tr.len()));
        }
        FrameState::new(tr.sigma[k], tr.sigma_t(k), tr.r[k], tr.r_t(k), tr.tau[k], tr.omega_in)
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.sigma, self.r)
    }

    /// ξ̇ = (σ_t + iσr_t)·e^{ir}.
    pub fn xi_dot(&self) -> Complex64 {
        Complex64::new(self.sigma_t, self.sigma * self.r_t) * Complex64::from_polar(1.0, self.r)
    }

    /// ξ^{−1/2} on the branch continued through the unwrapped phase.
    pub(crate) fn xi_inv_sqrt(&self) -> Complex64 {
        Complex64::from_polar(self.sigma.powf(-0.5), -0.5 * self.r)
    }
}
