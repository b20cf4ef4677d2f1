use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::frame::FrameState;
use crate::error::{precondition, Error, Result};
use crate::special::{factorial, gauss_hermite, hermite};
use crate::stochastic::Trajectory;

/// Largest vibrational quantum number served by the wave-function routines.
pub const N_MAX: usize = 32;

fn check_n(n: usize) -> Result<()> {
    if n > N_MAX {
        return Err(Error::Capability(format!("quantum number {n} exceeds {N_MAX}")));
    }
    Ok(())
}

/// Shared evaluation: norm·exp(−(r_t/2)x² + i(phase + chirp·x²))·H_n(y).
#[inline]
fn eval(n: usize, x: f64, omega: f64, sigma: f64, r_t: f64, chirp: f64, phase: f64) -> Result<Complex64> {
    let norm = ((omega / PI).sqrt() / (2f64.powi(n as i32) * factorial(n)? * sigma)).sqrt();
    let h = hermite(n, omega.sqrt() * x / sigma)?;
    let arg = Complex64::new(-0.5 * r_t * x * x, phase + chirp * x * x);
    Ok(arg.exp() * (norm * h))
}

/// In-channel eigenstate n at time t.
pub fn psi_in(n: usize, x: f64, t: f64, omega_in: f64) -> Result<Complex64> {
    check_n(n)?;
    if !(omega_in > 0.0) {
        return precondition("omega_in must be positive");
    }
    let phase = -(n as f64 + 0.5) * omega_in * t;
    eval(n, x, omega_in, 1.0, omega_in, 0.0, phase)
}

/// Stochastic wave functional of quantum number n in a given frame.
pub fn psi_stc(n: usize, x: f64, frame: &FrameState) -> Result<Complex64> {
    check_n(n)?;
    let f = frame.validated()?;
    let phase = -(n as f64 + 0.5) * f.omega_in * f.tau;
    eval(n, x, f.omega_in, f.sigma, f.r_t, f.sigma_t / (2.0 * f.sigma), phase)
}

/// ⟨ψ_m, ψ_n⟩ for m, n ≤ n_max by Gauss–Hermite quadrature in x·√Ω/σ.
pub fn gram_matrix(n_max: usize, frame: &FrameState) -> Result<Vec<Vec<Complex64>>> {
    check_n(n_max)?;
    let f = frame.validated()?;
    let nodes = ((40.0 * (1.0 + 1.0 / f.sigma)).ceil() as usize).max(n_max + 1).min(128);
    let (y, w) = gauss_hermite(nodes)?;
    let scale = f.sigma / f.omega_in.sqrt();
    let mut vals = vec![vec![Complex64::new(0.0, 0.0); nodes]; n_max + 1];
    for (n, row) in vals.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            *v = psi_stc(n, scale * y[i], &f)?;
        }
    }
    let mut g = vec![vec![Complex64::new(0.0, 0.0); n_max + 1]; n_max + 1];
    for m in 0..=n_max {
        for n in 0..=n_max {
            g[m][n] = (0..nodes).map(|i| vals[m][i] * vals[n][i].conj() * (w[i] * (y[i] * y[i]).exp())).sum::<Complex64>()
                * scale;
        }
    }
    Ok(g)
}

/// Ensemble average of ψ_stc with its normalization and standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiBr {
    pub n: usize,
    pub t: f64,
    pub x: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Fraction of trajectories whose frame is still regular at t.
    pub alpha: f64,
    pub n_regular: usize,
    pub n_traj: usize,
}

impl PsiBr {
    pub fn value(&self, i: usize) -> Complex64 {
        Complex64::new(self.re[i], self.im[i])
    }

    pub fn mean_std_error(&self) -> f64 {
        self.std_error.iter().sum::<f64>() / self.std_error.len().max(1) as f64
    }
}

/// Tree summation in fixed order.
pub(crate) fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Monte Carlo estimate of the averaged wave functional at time t.
///
/// Trajectories that blew up before t do not carry a valid frame and are
/// excluded; α is the surviving fraction, and the estimate is the sum over
/// regular frames divided by α·N.
pub fn psi_br(n: usize, xs: &[f64], ensemble: &[Trajectory], t: f64) -> Result<PsiBr> {
    check_n(n)?;
    if ensemble.is_empty() {
        return precondition("psi_br needs a nonempty ensemble");
    }
    let mut frames = Vec::with_capacity(ensemble.len());
    for tr in ensemble {
        let k = tr
            .node_at(t)
            .ok_or_else(|| Error::Domain(format!("t = {t} outside the time range of trajectory {}", tr.stream_id)))?;
        if tr.regular_until(t) {
            frames.push(FrameState::from_trajectory(tr, k)?);
        }
    }
    let m = frames.len();
    if m == 0 {
        return Err(Error::Domain(format!("no regular trajectory at t = {t}")));
    }
    let alpha = m as f64 / ensemble.len() as f64;
    let mut out = PsiBr {
        n,
        t,
        x: xs.to_vec(),
        re: Vec::with_capacity(xs.len()),
        im: Vec::with_capacity(xs.len()),
        std_error: Vec::with_capacity(xs.len()),
        alpha,
        n_regular: m,
        n_traj: ensemble.len(),
    };
    let mut vals = vec![Complex64::new(0.0, 0.0); m];
    for &x in xs {
        for (v, f) in vals.iter_mut().zip(&frames) {
            *v = psi_stc(n, x, f)?;
        }
        let mean = pairwise_sum(&vals) / m as f64;
        let dev: Vec<Complex64> = vals.iter().map(|v| Complex64::new((v - mean).norm_sqr(), 0.0)).collect();
        let se = if m > 1 { (pairwise_sum(&dev).re / ((m - 1) * m) as f64).sqrt() } else { 0.0 };
        out.re.push(mean.re);
        out.im.push(mean.im);
        out.std_error.push(se);
    }
    Ok(out)
}
