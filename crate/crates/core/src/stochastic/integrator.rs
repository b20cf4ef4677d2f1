//! Euler–Maruyama stepping of the phase Φ = θ + iφ with blow-up reinjection.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::noise::NoiseSpec;
use super::profile::FrequencyProfile;
use crate::error::{precondition, Error, Result};
use crate::io::fmt_num;

/// Floor for φ after reinjection and for its logarithmic decay.
pub const PHI_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPhase {
    pub theta: f64,
    pub phi: f64,
}

/// Escape of θ through −theta_max at `time`; `sign` is the side escaped through.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reinjection {
    pub time: f64,
    pub sign: i8,
}

/// 50·max(Ω_in, ε^(1/3)).
pub fn default_theta_max(omega_in: f64, epsilon: f64) -> f64 {
    50.0 * omega_in.max(epsilon.cbrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// Uniform grid from t0 to t1 with step at most `dt`.
    pub fn new(t0: f64, t1: f64, dt: f64) -> Result<Self> {
        if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
            return precondition("need finite t0 < t1");
        }
        if !(dt > 0.0) {
            return precondition("dt must be positive");
        }
        let steps = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
        Ok(TimeGrid { t0, t1, dt: (t1 - t0) / steps as f64, steps })
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t1
        } else {
            self.t0 + k as f64 * self.dt
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub stream_id: u64,
    pub omega_in: f64,
    pub time_grid: Vec<f64>,
    pub phase: Vec<ComplexPhase>,
    pub sigma: Vec<f64>,
    pub r: Vec<f64>,
    pub tau: Vec<f64>,
    pub lambda_frame: Vec<f64>,
    pub reinjections: Vec<Reinjection>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.time_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_grid.is_empty()
    }

    /// ṙ = Ω_in/σ².
    pub fn r_t(&self, k: usize) -> f64 {
        self.omega_in / (self.sigma[k] * self.sigma[k])
    }

    /// σ̇ = θσ.
    pub fn sigma_t(&self, k: usize) -> f64 {
        self.phase[k].theta * self.sigma[k]
    }

    /// Index of the recorded node closest to t, if t lies inside the time range.
    pub fn node_at(&self, t: f64) -> Option<usize> {
        let (first, last) = (*self.time_grid.first()?, *self.time_grid.last()?);
        let slack = 1e-9 * (last - first).abs().max(1.0);
        if t < first - slack || t > last + slack {
            return None;
        }
        let i = self.time_grid.partition_point(|&s| s < t);
        if i == 0 {
            return Some(0);
        }
        if i == self.len() {
            return Some(i - 1);
        }
        Some(if t - self.time_grid[i - 1] <= self.time_grid[i] - t { i - 1 } else { i })
    }

    /// True if no blow-up happened at or before t.
    pub fn regular_until(&self, t: f64) -> bool {
        self.reinjections.first().map_or(true, |e| e.time > t)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,theta,phi,sigma,r,tau")?;
        for k in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_num(self.time_grid[k]),
                fmt_num(self.phase[k].theta),
                fmt_num(self.phase[k].phi),
                fmt_num(self.sigma[k]),
                fmt_num(self.r[k]),
                fmt_num(self.tau[k])
            )?;
        }
        Ok(())
    }
}

/// Fixed integration setup shared by every trajectory of an ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseIntegrator {
    pub profile: FrequencyProfile,
    pub grid: TimeGrid,
    pub theta_max: f64,
    /// Keep every `record_stride`-th node (the last node is always kept).
    pub record_stride: usize,
}

impl PhaseIntegrator {
    pub fn new(profile: FrequencyProfile, t0: f64, t1: f64, dt: f64, theta_max: f64) -> Result<Self> {
        let profile = profile.validated()?;
        let grid = TimeGrid::new(t0, t1, dt)?;
        if !(theta_max > 0.0) {
            return precondition("theta_max must be positive");
        }
        let stiff = grid.dt * profile.max_abs_u0();
        if !(stiff < 0.1) {
            return precondition(format!("dt*max|U0| = {stiff} must be < 0.1"));
        }
        Ok(PhaseIntegrator { profile, grid, theta_max, record_stride: 1 })
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride.max(1);
        self
    }

    /// Runs the stepping loop, calling `visit(k, t, θ, ln φ, ∫θ)` at every node.
    #[inline]
    pub(crate) fn drive<V>(&self, noise: &NoiseSpec, events: &mut Vec<Reinjection>, mut visit: V) -> Result<()>
    where
        V: FnMut(usize, f64, f64, f64, f64),
    {
        let g = self.grid;
        let dt = g.dt;
        let cap = self.theta_max;
        let ln_floor = PHI_FLOOR.ln();
        let mut stream = noise.stream(dt)?;
        let (mut theta, mut ln_phi, mut s) = (0.0f64, self.profile.omega_in.ln(), 0.0f64);
        visit(0, g.t0, theta, ln_phi, s);
        for k in 0..g.steps {
            let t = g.t0 + k as f64 * dt;
            if theta * dt >= 1.0 {
                return Err(Error::Stability {
                    t,
                    reason: format!("theta*dt = {} >= 1 overshoots the quadratic drift", theta * dt),
                });
            }
            let phi2 = if ln_phi > -350.0 { (2.0 * ln_phi).exp() } else { 0.0 };
            let mut next = theta - (theta * theta - phi2 + self.profile.u0(t)) * dt - stream.next_increment();
            if !next.is_finite() {
                return Err(Error::Stability { t, reason: "non-finite theta".into() });
            }
            let half = 0.5 * (theta + next) * dt;
            s += half;
            ln_phi = (ln_phi - 2.0 * half).max(ln_floor);
            let tn = g.time(k + 1);
            if next <= -cap {
                events.push(Reinjection { time: tn, sign: -1 });
                next = cap;
                ln_phi = ln_floor;
            }
            theta = next;
            visit(k + 1, tn, theta, ln_phi, s);
        }
        Ok(())
    }

    /// Full trajectory with reconstructed frame series.
    pub fn run(&self, noise: &NoiseSpec) -> Result<Trajectory> {
        let g = self.grid;
        let stride = self.record_stride;
        let cap = g.steps / stride + 2;
        let mut tr = Trajectory {
            stream_id: noise.stream_id,
            omega_in: self.profile.omega_in,
            time_grid: Vec::with_capacity(cap),
            phase: Vec::with_capacity(cap),
            sigma: Vec::with_capacity(cap),
            r: Vec::with_capacity(cap),
            tau: Vec::with_capacity(cap),
            lambda_frame: Vec::with_capacity(cap),
            reinjections: Vec::new(),
        };
        let omega = self.profile.omega_in;
        let mut tau = 0.0;
        let mut prev_w = 1.0;
        let mut events = Vec::new();
        self.drive(noise, &mut events, |k, t, theta, ln_phi, s| {
            let w = (-2.0 * s).exp();
            if k > 0 {
                tau += 0.5 * g.dt * (prev_w + w);
            }
            prev_w = w;
            if k % stride == 0 || k == g.steps {
                let sigma = s.exp();
                tr.time_grid.push(t);
                tr.phase.push(ComplexPhase { theta, phi: ln_phi.exp() });
                tr.sigma.push(sigma);
                tr.r.push(omega * tau);
                tr.tau.push(tau);
                tr.lambda_frame.push(0.5 * theta * sigma * sigma);
            }
        })?;
        tr.reinjections = events;
        Ok(tr)
    }
}

/// Single trajectory from the in-channel fixed point Φ(t0) = iΩ_in.
pub fn integrate_phase(
    profile: &FrequencyProfile,
    noise: &NoiseSpec,
    t0: f64,
    t1: f64,
    dt: f64,
    theta_max: f64,
) -> Result<Trajectory> {
    PhaseIntegrator::new(*profile, t0, t1, dt, theta_max)?.run(noise)
}
