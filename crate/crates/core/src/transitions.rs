//! Vacuum–vacuum transition probability of the averaged transition matrix.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::fokker_planck::{integrate_line, stationary_density, StationaryDist};

/// Relative tolerance used for I₁, I₂ unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// γ(ρ) = ((1 + √ρ)/(1 − √ρ))², the squared frequency ratio of a step barrier with reflection ρ.
pub fn gamma_of_rho(rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("reflection coefficient rho = {rho} must lie in [0, 1)")));
    }
    let s = rho.sqrt();
    Ok(((1.0 + s) / (1.0 - s)).powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub lambda: f64,
    /// None for the wave-function limit of the final state (λ₊ → ∞).
    pub lambda_plus: Option<f64>,
    pub rho: f64,
    pub gamma: f64,
    pub i1: f64,
    pub i2: f64,
    pub delta: f64,
}

/// ((a ± 1)/(2a²))^{1/2} with a = (1 + q)^{1/2}, q ≥ 0.
#[inline]
fn weights(q: f64) -> (f64, f64) {
    let a = (1.0 + q).sqrt();
    let two_a2 = 2.0 * (1.0 + q);
    (((a + 1.0) / two_a2).sqrt(), ((q / (a + 1.0)) / two_a2).sqrt())
}

fn check(lambda: f64, rho: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return precondition(format!("lambda = {lambda} must be positive and finite"));
    }
    gamma_of_rho(rho)
}

fn finish(lambda: f64, lambda_plus: Option<f64>, rho: f64, gamma: f64, i1: f64, i2: f64) -> TransitionResult {
    TransitionResult { lambda, lambda_plus, rho, gamma, i1, i2, delta: (1.0 - rho).sqrt() * (i1 * i1 + i2 * i2) }
}

/// Δ̄ for a final state described by a wave function: one quadrature over Q̄_s.
pub fn delta_00_simplified(lambda: f64, rho: f64) -> Result<TransitionResult> {
    delta_00_simplified_with(lambda, rho, DEFAULT_TOLERANCE)
}

pub fn delta_00_simplified_with(lambda: f64, rho: f64, tol: f64) -> Result<TransitionResult> {
    let gamma = check(lambda, rho)?;
    let c = lambda * gamma;
    let q = StationaryDist { lambda, gamma, j0f_scaled: 0.0, grid: Vec::new() };
    let inf = f64::INFINITY;
    let i1 = q.integrate_weighted(-inf, inf, |t| weights(t * t / c).0, tol)?;
    let i2 = q.integrate_weighted(-inf, inf, |t| weights(t * t / c).1, tol)?;
    Ok(finish(lambda, None, rho, gamma, i1, i2))
}

/// Δ with fluctuating in- and out-channels: nested quadrature over Q̄_s(λ)×Q̄_s(λ₊).
pub fn delta_00(lambda: f64, lambda_plus: f64, rho: f64) -> Result<TransitionResult> {
    delta_00_with(lambda, lambda_plus, rho, DEFAULT_TOLERANCE)
}

pub fn delta_00_with(lambda: f64, lambda_plus: f64, rho: f64, tol: f64) -> Result<TransitionResult> {
    let gamma = check(lambda, rho)?;
    check(lambda_plus, rho)?;
    let c = lambda * gamma;
    let s = (lambda / lambda_plus).sqrt();
    let outer = StationaryDist { lambda, gamma, j0f_scaled: 0.0, grid: Vec::new() };
    let inner = StationaryDist { lambda: lambda_plus, gamma, j0f_scaled: 0.0, grid: Vec::new() };
    let (m, w) = inner.bulk();
    // The inner density is revisited at the same nodes for every outer point.
    let cache: RefCell<HashMap<u64, f64>> = RefCell::new(HashMap::new());
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let q_plus = |t: f64| -> f64 {
        if let Some(&v) = cache.borrow().get(&t.to_bits()) {
            return v;
        }
        let v = stationary_density(lambda_plus, gamma, t).unwrap_or(f64::NAN);
        cache.borrow_mut().insert(t.to_bits(), v);
        v
    };
    let inner_pair = |t: f64| -> (f64, f64) {
        let run = |k: usize| {
            integrate_line(
                |u| {
                    let d = t - s * u;
                    let ws = weights(d * d / c);
                    q_plus(u) * if k == 0 { ws.0 } else { ws.1 }
                },
                m,
                w,
                f64::NEG_INFINITY,
                f64::INFINITY,
                tol,
            )
        };
        match (run(0), run(1)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                err.borrow_mut().get_or_insert(e);
                (f64::NAN, f64::NAN)
            }
        }
    };
    let inf = f64::INFINITY;
    let i1 = outer.integrate_weighted(-inf, inf, |t| inner_pair(t).0, tol);
    let i2 = outer.integrate_weighted(-inf, inf, |t| inner_pair(t).1, tol);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(finish(lambda, Some(lambda_plus), rho, gamma, i1?, i2?))
}
