//! Parallel ensembles; results depend only on (seed, n_traj, parameters).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::{PhaseIntegrator, Trajectory};
use super::noise::NoiseSpec;
use super::profile::FrequencyProfile;
use crate::error::{precondition, Error, Result};

fn tag(stream_id: u64, e: Error) -> Error {
    Error::Stream { stream_id, source: Box::new(e) }
}

impl PhaseIntegrator {
    /// Trajectory i uses stream_id = i.
    pub fn ensemble(&self, base: &NoiseSpec, n_traj: usize) -> Result<Vec<Trajectory>> {
        if n_traj == 0 {
            return precondition("n_traj must be >= 1");
        }
        let runs: Vec<Result<Trajectory>> = (0..n_traj as u64)
            .into_par_iter()
            .map(|i| self.run(&base.with_stream(i)).map_err(|e| tag(i, e)))
            .collect();
        runs.into_iter().collect()
    }

    /// Streams θ samples into a histogram without storing trajectories.
    pub fn theta_statistics(&self, base: &NoiseSpec, n_traj: usize, spec: &HistogramSpec) -> Result<EnsembleStats> {
        if n_traj == 0 {
            return precondition("n_traj must be >= 1");
        }
        spec.validate()?;
        const CHUNK: usize = 64;
        let chunks = n_traj.div_ceil(CHUNK);
        let parts: Vec<Result<EnsembleStats>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = EnsembleStats::empty(spec, self.grid.t0, self.grid.t1);
                for i in c * CHUNK..((c + 1) * CHUNK).min(n_traj) {
                    self.accumulate(&base.with_stream(i as u64), spec, &mut acc).map_err(|e| tag(i as u64, e))?;
                }
                Ok(acc)
            })
            .collect();
        let mut total = EnsembleStats::empty(spec, self.grid.t0, self.grid.t1);
        for p in parts {
            total.merge(&p?);
        }
        Ok(total)
    }

    fn accumulate(&self, noise: &NoiseSpec, spec: &HistogramSpec, acc: &mut EnsembleStats) -> Result<()> {
        let g = self.grid;
        let k0 = (((spec.sample_from - g.t0) / g.dt).ceil().max(0.0)) as usize;
        let every = spec.sample_every.max(1);
        let (lo, bins) = (spec.lo, spec.bins);
        let inv_w = bins as f64 / (spec.hi - spec.lo);
        let mut theta_sum = 0.0;
        let mut events = Vec::new();
        // Steps until the next sample; avoids a division per step.
        let mut wait = k0;
        self.drive(noise, &mut events, |_k, _t, theta, _lp, _s| {
            if wait > 0 {
                wait -= 1;
            } else {
                wait = every - 1;
                let pos = (theta - lo) * inv_w;
                if pos < 0.0 {
                    acc.below += 1;
                } else if pos >= bins as f64 {
                    acc.above += 1;
                } else {
                    acc.counts[pos as usize] += 1;
                }
                theta_sum += theta;
                acc.samples += 1;
            }
        })?;
        acc.theta_sum += theta_sum;
        let wlen = (g.t1 - g.t0) / acc.reinjection_windows.len() as f64;
        for e in &events {
            let w = (((e.time - g.t0) / wlen) as usize).min(acc.reinjection_windows.len() - 1);
            acc.reinjection_windows[w] += 1;
        }
        acc.trajectories += 1;
        Ok(())
    }
}

/// Histogram layout and sampling schedule for streamed ensembles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
    /// First sampled time (burn-in end).
    pub sample_from: f64,
    /// Sample every this many steps.
    pub sample_every: usize,
    /// Number of equal time windows over [t0, t1] for reinjection counts.
    pub windows: usize,
}

impl HistogramSpec {
    fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || self.bins == 0 || self.windows == 0 {
            return precondition("histogram needs lo < hi, bins >= 1, windows >= 1");
        }
        Ok(())
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / self.bins as f64;
        (0..=self.bins).map(|i| self.lo + w * i as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
    pub samples: u64,
    /// Sum of sampled θ, accumulated per fixed chunk of trajectories.
    pub theta_sum: f64,
    pub trajectories: u64,
    pub reinjection_windows: Vec<u64>,
    pub window_span: (f64, f64),
}

impl EnsembleStats {
    fn empty(spec: &HistogramSpec, t0: f64, t1: f64) -> Self {
        EnsembleStats {
            lo: spec.lo,
            hi: spec.hi,
            counts: vec![0; spec.bins],
            below: 0,
            above: 0,
            samples: 0,
            theta_sum: 0.0,
            trajectories: 0,
            reinjection_windows: vec![0; spec.windows],
            window_span: (t0, t1),
        }
    }

    fn merge(&mut self, o: &EnsembleStats) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
        for (a, b) in self.reinjection_windows.iter_mut().zip(&o.reinjection_windows) {
            *a += b;
        }
        self.below += o.below;
        self.above += o.above;
        self.samples += o.samples;
        self.theta_sum += o.theta_sum;
        self.trajectories += o.trajectories;
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.bin_width()
    }

    /// Empirical density per bin.
    pub fn density(&self) -> Vec<f64> {
        let norm = self.samples as f64 * self.bin_width();
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    pub fn mean_theta(&self) -> f64 {
        self.theta_sum / self.samples as f64
    }

    /// L1 distance to a reference law given by its interval masses; the mass
    /// outside [lo, hi] is compared as one extra cell.
    pub fn l1_distance<M: Fn(f64, f64) -> Result<f64>>(&self, mass: M) -> Result<f64> {
        let n = self.samples as f64;
        let w = self.bin_width();
        let mut inside = 0.0;
        let mut l1 = 0.0;
        for (i, &c) in self.counts.iter().enumerate() {
            let a = self.lo + i as f64 * w;
            let m = mass(a, a + w)?;
            inside += m;
            l1 += (c as f64 / n - m).abs();
        }
        l1 += ((self.below + self.above) as f64 / n - (1.0 - inside)).abs();
        Ok(l1)
    }

    /// Fraction of samples with θ > 0 (bins straddling 0 split evenly).
    pub fn positive_fraction(&self) -> f64 {
        let mut pos = self.above as f64;
        for (i, &c) in self.counts.iter().enumerate() {
            let a = self.lo + i as f64 * self.bin_width();
            let b = a + self.bin_width();
            if a >= 0.0 {
                pos += c as f64;
            } else if b > 0.0 {
                pos += c as f64 * b / (b - a);
            }
        }
        pos / self.samples as f64
    }
}

/// Ensemble of full trajectories, trajectory i on stream i.
pub fn ensemble(
    profile: &FrequencyProfile,
    noise_base: &NoiseSpec,
    n_traj: usize,
    t0: f64,
    t1: f64,
    dt: f64,
    theta_max: f64,
) -> Result<Vec<Trajectory>> {
    PhaseIntegrator::new(*profile, t0, t1, dt, theta_max)?.ensemble(noise_base, n_traj)
}
