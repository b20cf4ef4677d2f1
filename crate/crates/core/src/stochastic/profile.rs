use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Constant,
    Step,
    SmoothTanh,
}

/// Deterministic frequency law Ω₀(t) with mean shift f0, so that U₀ = Ω₀² + f0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    pub kind: ProfileKind,
    pub omega_in: f64,
    pub omega_out: f64,
    pub t_c: f64,
    pub smoothing_scale: f64,
    pub f0: f64,
}

impl FrequencyProfile {
    pub fn constant(omega: f64, f0: f64) -> Result<Self> {
        FrequencyProfile { kind: ProfileKind::Constant, omega_in: omega, omega_out: omega, t_c: 0.0, smoothing_scale: 1.0, f0 }
            .validated()
    }

    /// Ω_in for t < t_c, Ω_out for t > t_c, the mean at t = t_c.
    pub fn step(omega_in: f64, omega_out: f64, t_c: f64, f0: f64) -> Result<Self> {
        FrequencyProfile { kind: ProfileKind::Step, omega_in, omega_out, t_c, smoothing_scale: 1.0, f0 }.validated()
    }

    pub fn smooth_tanh(omega_in: f64, omega_out: f64, t_c: f64, scale: f64, f0: f64) -> Result<Self> {
        FrequencyProfile { kind: ProfileKind::SmoothTanh, omega_in, omega_out, t_c, smoothing_scale: scale, f0 }
            .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.omega_in > 0.0 && self.omega_out > 0.0) || !self.omega_in.is_finite() || !self.omega_out.is_finite() {
            return precondition("omega_in and omega_out must be positive and finite");
        }
        if !self.t_c.is_finite() || !self.f0.is_finite() {
            return precondition("t_c and f0 must be finite");
        }
        if self.kind == ProfileKind::SmoothTanh && !(self.smoothing_scale > 0.0) {
            return precondition("smooth-tanh profile needs smoothing_scale > 0");
        }
        if self.kind == ProfileKind::Constant && self.omega_out != self.omega_in {
            return precondition("constant profile needs omega_out == omega_in");
        }
        // Ω₀ is monotone between the channel values, so its square is bounded below by the smaller one.
        let lo = self.omega_in.min(self.omega_out);
        if !(lo * lo + self.f0 > 0.0) {
            return precondition(format!("U0 = Omega0^2 + f0 must stay positive (min {})", lo * lo + self.f0));
        }
        Ok(self)
    }

    #[inline]
    pub fn omega0(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Constant => self.omega_in,
            ProfileKind::Step => {
                if t < self.t_c {
                    self.omega_in
                } else if t > self.t_c {
                    self.omega_out
                } else {
                    0.5 * (self.omega_in + self.omega_out)
                }
            }
            ProfileKind::SmoothTanh => {
                let s = 0.5 * (1.0 + ((t - self.t_c) / self.smoothing_scale).tanh());
                self.omega_in + (self.omega_out - self.omega_in) * s
            }
        }
    }

    #[inline]
    pub fn u0(&self, t: f64) -> f64 {
        let w = self.omega0(t);
        w * w + self.f0
    }

    /// Upper bound of |U₀(t)| over all t.
    pub fn max_abs_u0(&self) -> f64 {
        let hi = self.omega_in.max(self.omega_out);
        let lo = self.omega_in.min(self.omega_out);
        (hi * hi + self.f0).abs().max((lo * lo + self.f0).abs())
    }

    /// Default start time t_c − 20/Ω_in.
    pub fn default_t0(&self) -> f64 {
        self.t_c - 20.0 / self.omega_in
    }
}
