use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::frame::FrameState;
use super::psi::N_MAX;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Gaussian data of the x-overlap of the in and out generating functionals:
/// I(z, w) = G·exp(αz² + βzw + γw²), w = z₊*.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapForm {
    pub a: Complex64,
    pub g: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

impl OverlapForm {
    pub fn new(frame_in: &FrameState, frame_out: &FrameState) -> Result<Self> {
        let (fi, fo) = (frame_in.validated()?, frame_out.validated()?);
        let (xi, eta) = (fi.xi(), fo.xi().conj());
        let (xd, ed) = (fi.xi_dot(), fo.xi_dot().conj());
        let a = -I * xd / xi + I * ed / eta;
        if a.re < 0.0 {
            return Err(Error::NonIntegrable { re_a: a.re });
        }
        let (wi, wo) = (fi.omega_in, fo.omega_in);
        // ξ^{-1/2} and (η₊*)^{-1/2} follow the unwrapped phases; A^{-1/2} is principal (Re A ≥ 0).
        let g = (wi * wo).powf(0.25) * 2f64.sqrt() * a.sqrt().inv() * fi.xi_inv_sqrt() * fo.xi_inv_sqrt().conj();
        Ok(OverlapForm {
            a,
            g,
            alpha: wi / (a * xi * xi) - 0.5 * xi.conj() / xi,
            beta: 2.0 * (wi * wo).sqrt() / (a * xi * eta),
            gamma: wo / (a * eta * eta) - 0.5 * eta.conj() / eta,
        })
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.g * (self.alpha * z * z + self.beta * z * w + self.gamma * w * w).exp()
    }
}

/// ∫ Ψ_in(z|x)·conj(Ψ_out(z₊|x)) dx in closed form, at w = z₊*.
pub fn generating_overlap(
    z: Complex64,
    z_plus_conj: Complex64,
    frame_in: &FrameState,
    frame_out: &FrameState,
) -> Result<Complex64> {
    Ok(OverlapForm::new(frame_in, frame_out)?.eval(z, z_plus_conj))
}

/// Local transition matrix between an in-frame and an out-frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SMatrixLocal {
    pub n_max: usize,
    /// entries[n][m]: in-state n, out-state m.
    pub entries: Vec<Vec<Complex64>>,
    pub frame_in: FrameState,
    pub frame_out: FrameState,
    pub omega_in: f64,
    pub omega_out: f64,
}

/// Taylor coefficients s_nm = √(n!m!)·[zⁿwᵐ] exp(αz² + βzw + γw²).
fn taylor_table(n_max: usize, alpha: Complex64, beta: Complex64, gamma: Complex64) -> Vec<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut s = vec![vec![zero; n_max + 1]; n_max + 1];
    s[0][0] = Complex64::new(1.0, 0.0);
    for m in 2..=n_max {
        let mf = m as f64;
        s[0][m] = 2.0 * gamma * ((mf - 1.0) / mf).sqrt() * s[0][m - 2];
    }
    for n in 1..=n_max {
        let nf = n as f64;
        for m in 0..=n_max {
            let mut v = zero;
            if n >= 2 {
                v += 2.0 * alpha * ((nf - 1.0) / nf).sqrt() * s[n - 2][m];
            }
            if m >= 1 {
                v += beta * (m as f64 / nf).sqrt() * s[n - 1][m - 1];
            }
            s[n][m] = v;
        }
    }
    s
}

/// All S_nm with n, m ≤ n_max.
pub fn s_local(n_max: usize, frame_in: &FrameState, frame_out: &FrameState) -> Result<SMatrixLocal> {
    if n_max > N_MAX {
        return Err(Error::Capability(format!("n_max {n_max} exceeds {N_MAX}")));
    }
    let f = OverlapForm::new(frame_in, frame_out)?;
    let mut entries = taylor_table(n_max, f.alpha, f.beta, f.gamma);
    for row in &mut entries {
        for v in row.iter_mut() {
            *v *= f.g;
        }
    }
    Ok(SMatrixLocal {
        n_max,
        entries,
        frame_in: *frame_in,
        frame_out: *frame_out,
        omega_in: frame_in.omega_in,
        omega_out: frame_out.omega_in,
    })
}

/// The four low-order elements in explicit form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedForms {
    pub s00: Complex64,
    pub s11: Complex64,
    pub s20: Complex64,
    pub s02: Complex64,
}

/// S₀₀ = (4Ω_inΩ_out)^{1/4}·e^{iπ/4}·{ξη₊*(ξ̇/ξ − η̇₊*/η₊*)}^{−1/2}, S₁₁ = S₀₀³, and
/// S₂₀, S₀₂ with the 1/√2 of the second Taylor coefficient.
pub fn closed_forms(frame_in: &FrameState, frame_out: &FrameState) -> Result<ClosedForms> {
    let (fi, fo) = (frame_in.validated()?, frame_out.validated()?);
    let (wi, wo) = (fi.omega_in, fo.omega_in);
    let (xi, eta) = (fi.xi(), fo.xi().conj());
    let d = fi.xi_dot() / xi - fo.xi_dot().conj() / eta;
    // d = iA lies in the closed upper half plane, where the principal root is continuous.
    let root = d.sqrt().inv() * fi.xi_inv_sqrt() * fo.xi_inv_sqrt().conj();
    let s00 = (4.0 * wi * wo).powf(0.25) * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4) * root;
    let s2 = s00 * s00;
    let r2 = std::f64::consts::SQRT_2;
    Ok(ClosedForms {
        s00,
        s11: s2 * s00,
        s20: s00 * (-Complex64::from_polar(1.0, -2.0 * fi.r) + (wi / wo).sqrt() / xi * eta * s2) / r2,
        s02: s00 * (-Complex64::from_polar(1.0, 2.0 * fo.r) + (wo / wi).sqrt() * xi / eta * s2) / r2,
    })
}

impl SMatrixLocal {
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.entries[n][m]
    }

    /// |Σ_{k≤K} S_kn·conj(S_km) − δ_nm|.
    pub fn unitarity_defect(&self, k_max: usize, n: usize, m: usize) -> f64 {
        let k_max = k_max.min(self.n_max);
        let s: Complex64 = (0..=k_max).map(|k| self.entries[k][n] * self.entries[k][m].conj()).sum();
        let d = if n == m { 1.0 } else { 0.0 };
        (s - d).norm()
    }

    /// Largest |S_nm| over odd n + m.
    pub fn parity_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (n, row) in self.entries.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                if (n + m) % 2 == 1 {
                    worst = worst.max(v.norm());
                }
            }
        }
        worst
    }

    /// |S₀₀|², the vacuum persistence probability.
    pub fn vacuum_persistence(&self) -> f64 {
        self.entries[0][0].norm_sqr()
    }
}
