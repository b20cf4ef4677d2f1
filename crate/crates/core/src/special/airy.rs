//! Real Airy functions Ai, Bi with derivatives, the modulus A(x) = Ai² + Bi²,
//! and the Laplace-type integrals ∫ z^p exp(xz − z³/12) dz.
//!
//! |x| ≥ 12 uses the Poincaré expansions. Inside, values come from a table of
//! nodes (spacing 0.5) produced by Taylor-stepping the Airy equation in the
//! numerically stable direction, followed by one Taylor step to x.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::quad::{integrate, integrate_sqrt_singular, Domain, QuadratureSpec};
use crate::error::{Error, Result};

/// |x| above which `airy` refuses to evaluate.
pub const AIRY_BOUND: f64 = 110.0;

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;
const BI0: f64 = 0.614_926_627_446_000_7;
const BIP0: f64 = 0.448_288_357_353_826_4;

const EDGE: f64 = 12.0;
const STEP: f64 = 0.5;
const NODES: usize = 49;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiryValues {
    pub x: f64,
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
    pub modulus_sq: f64,
}

/// Ai·e^{s}, Ai'·e^{s}, Bi·e^{−s}, Bi'·e^{−s} with the exponent s kept apart.
#[derive(Clone, Copy, Debug)]
struct Scaled {
    ai: f64,
    aip: f64,
    bi: f64,
    bip: f64,
    s: f64,
}

/// One Taylor step of y'' = x·y from x0 by h.
fn taylor(x0: f64, y: f64, dy: f64, h: f64) -> (f64, f64) {
    if h == 0.0 {
        return (y, dy);
    }
    // b_k = a_k h^k with a_{k+2} = (x0 a_k + a_{k−1}) / ((k+1)(k+2)).
    let (h2, h3) = (h * h, h * h * h);
    let mut bm1 = 0.0;
    let mut b0 = y;
    let mut b1 = dy * h;
    let mut sum = b0 + b1;
    let mut dsum = b1;
    let mut small = 0;
    for k in 0..400usize {
        let kf = k as f64;
        let b2 = (x0 * h2 * b0 + h3 * bm1) / ((kf + 1.0) * (kf + 2.0));
        sum += b2;
        dsum += (kf + 2.0) * b2;
        let scale = sum.abs().max(dsum.abs()).max(f64::MIN_POSITIVE);
        if (kf + 2.0) * b2.abs() <= 1e-18 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
        bm1 = b0;
        b0 = b1;
        b1 = b2;
    }
    (sum, dsum / h)
}

fn u_coeffs() -> &'static [f64] {
    static U: OnceLock<Vec<f64>> = OnceLock::new();
    U.get_or_init(|| {
        let mut u = vec![1.0];
        for k in 1..60 {
            let kf = k as f64;
            let prev = u[k - 1];
            u.push(prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf));
        }
        u
    })
}

fn v_coeff(k: usize) -> f64 {
    let kf = k as f64;
    -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u_coeffs()[k]
}

/// Σ_k sign^k c_k ζ^{−k} over the selected parity, truncated at the smallest term.
fn asym_sum(zeta: f64, coeff: impl Fn(usize) -> f64, start: usize, stride: usize, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut sign = 1.0;
    let mut k = start;
    while k < 60 {
        let term = coeff(k) * zeta.powi(-(k as i32));
        if term.abs() > last {
            break;
        }
        sum += sign * term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        last = term.abs();
        if alternate {
            sign = -sign;
        }
        k += stride;
    }
    sum
}

fn asym_positive(x: f64) -> Scaled {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let q = x.sqrt().sqrt();
    let sp = PI.sqrt();
    let u = |k: usize| u_coeffs()[k];
    let alt_u = asym_sum(zeta, u, 0, 1, true);
    let alt_v = asym_sum(zeta, v_coeff, 0, 1, true);
    let su = asym_sum(zeta, u, 0, 1, false);
    let sv = asym_sum(zeta, v_coeff, 0, 1, false);
    Scaled {
        ai: alt_u / (2.0 * sp * q),
        aip: -q * alt_v / (2.0 * sp),
        bi: su / (sp * q),
        bip: q * sv / sp,
        s: zeta,
    }
}

/// Modulus–phase pieces for x = −z ≤ −12: (P_u, Q_u, P_v, Q_v, ζ).
fn asym_negative_parts(z: f64) -> (f64, f64, f64, f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let u = |k: usize| u_coeffs()[k];
    let pu = asym_sum(zeta, u, 0, 2, true);
    let qu = asym_sum(zeta, u, 1, 2, true);
    let pv = asym_sum(zeta, v_coeff, 0, 2, true);
    let qv = asym_sum(zeta, v_coeff, 1, 2, true);
    (pu, qu, pv, qv, zeta)
}

fn asym_negative(z: f64) -> Scaled {
    let (pu, qu, pv, qv, zeta) = asym_negative_parts(z);
    let q = z.sqrt().sqrt();
    let sp = PI.sqrt();
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    Scaled {
        ai: (c * pu + s * qu) / (sp * q),
        aip: q * (s * pv - c * qv) / sp,
        bi: (-s * pu + c * qu) / (sp * q),
        bip: q * (c * pv + s * qv) / sp,
        s: 0.0,
    }
}

#[derive(Clone, Copy)]
struct Node {
    ai: f64,
    aip: f64,
    bi: f64,
    bip: f64,
}

fn node_x(j: usize) -> f64 {
    -EDGE + STEP * j as f64
}

fn table() -> &'static [Node; NODES] {
    static T: OnceLock<[Node; NODES]> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = [Node { ai: 0.0, aip: 0.0, bi: 0.0, bip: 0.0 }; NODES];
        let mid = NODES / 2;
        t[mid] = Node { ai: AI0, aip: AIP0, bi: BI0, bip: BIP0 };
        // Negative side: both solutions oscillate, step outward from 0.
        for j in (0..mid).rev() {
            let x0 = node_x(j + 1);
            let (ai, aip) = taylor(x0, t[j + 1].ai, t[j + 1].aip, -STEP);
            let (bi, bip) = taylor(x0, t[j + 1].bi, t[j + 1].bip, -STEP);
            t[j] = Node { ai, aip, bi, bip };
        }
        // Bi grows: step forward from 0.
        for j in mid + 1..NODES {
            let (bi, bip) = taylor(node_x(j - 1), t[j - 1].bi, t[j - 1].bip, STEP);
            t[j].bi = bi;
            t[j].bip = bip;
        }
        // Ai decays: step backward from the asymptotic value at the edge.
        let edge = asym_positive(EDGE);
        let damp = (-edge.s).exp();
        t[NODES - 1].ai = edge.ai * damp;
        t[NODES - 1].aip = edge.aip * damp;
        for j in (mid + 1..NODES - 1).rev() {
            let (ai, aip) = taylor(node_x(j + 1), t[j + 1].ai, t[j + 1].aip, -STEP);
            t[j].ai = ai;
            t[j].aip = aip;
        }
        t
    })
}

fn check_range(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > AIRY_BOUND {
        return Err(Error::Range { what: "Airy argument (Bi overflow guard)", value: x, bound: AIRY_BOUND });
    }
    Ok(())
}

fn scaled(x: f64) -> Result<Scaled> {
    if !x.is_finite() {
        return Err(Error::Range { what: "Airy argument must be finite", value: x, bound: f64::MAX });
    }
    if x >= EDGE {
        return Ok(asym_positive(x));
    }
    if x <= -EDGE {
        return Ok(asym_negative(-x));
    }
    let j = ((x + EDGE) / STEP).round().clamp(0.0, (NODES - 1) as f64) as usize;
    let n = table()[j];
    let x0 = node_x(j);
    let h = x - x0;
    let (ai, aip) = taylor(x0, n.ai, n.aip, h);
    let (bi, bip) = taylor(x0, n.bi, n.bip, h);
    Ok(Scaled { ai, aip, bi, bip, s: 0.0 })
}

/// Ai, Ai', Bi, Bi' and Ai² + Bi² at x (|x| ≤ 110). Values beyond the double
/// range (Bi for x ≳ 104, the modulus for x ≳ 65.7) come back as +∞; use
/// [`ln_airy_modulus_sq`] there.
pub fn airy(x: f64) -> Result<AiryValues> {
    check_range(x)?;
    let v = scaled(x)?;
    let (down, up) = ((-v.s).exp(), v.s.exp());
    Ok(AiryValues {
        x,
        ai: v.ai * down,
        ai_prime: v.aip * down,
        bi: if v.s > 0.0 { (v.s + v.bi.ln()).exp() } else { v.bi * up },
        bi_prime: if v.s > 0.0 { (v.s + v.bip.ln()).exp() } else { v.bip * up },
        modulus_sq: ln_modulus(x, &v).exp(),
    })
}

fn ln_modulus(x: f64, v: &Scaled) -> f64 {
    if x <= -EDGE {
        let (pu, qu, _, _, _) = asym_negative_parts(-x);
        return ((pu * pu + qu * qu) / (PI * (-x).sqrt())).ln();
    }
    let r = v.ai * v.ai * (-4.0 * v.s).exp();
    2.0 * v.s + (v.bi * v.bi + r).ln()
}

/// A(x) = Ai²(x) + Bi²(x) for |x| ≤ 110.
pub fn airy_modulus_sq(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(ln_airy_modulus_sq(x)?.exp())
}

/// ln A(x) for any finite x (asymptotic form beyond |x| = 12).
pub fn ln_airy_modulus_sq(x: f64) -> Result<f64> {
    let v = scaled(x)?;
    Ok(ln_modulus(x, &v))
}

/// Logarithmic derivatives of A: (ln A, (ln A)', (ln A)'').
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LnModulus {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// ln A and its first two derivatives from A' = 2(Ai·Ai' + Bi·Bi'),
/// A'' = 2(Ai'² + Bi'² + x·A).
pub fn ln_airy_modulus_derivs(x: f64) -> Result<LnModulus> {
    let v = scaled(x)?;
    let w = (-4.0 * v.s).exp();
    let den = v.bi * v.bi + v.ai * v.ai * w;
    let d1 = 2.0 * (v.bi * v.bip + v.ai * v.aip * w) / den;
    let second = 2.0 * (v.bip * v.bip + v.aip * v.aip * w) / den + 2.0 * x;
    Ok(LnModulus { value: ln_modulus(x, &v), d1, d2: second - d1 * d1 })
}

/// Sign q of the exponent in A_p(qβ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// ln ∫_{c}^∞ z^p exp(xz − z³/12) dz with c = cutoff or 0.
pub fn ln_laplace_airy(p: f64, x: f64, cutoff: Option<f64>) -> Result<f64> {
    let lower = cutoff.unwrap_or(0.0);
    if !(lower >= 0.0) || !x.is_finite() {
        return Err(Error::Precondition("Airy-Laplace integral needs x finite and cutoff >= 0".into()));
    }
    if lower == 0.0 && p <= -1.0 {
        return Err(Error::Precondition(format!(
            "z^{p} is not integrable at z = 0 (the integral diverges); pass a positive cutoff"
        )));
    }
    let g = |z: f64| p * z.ln() + x * z - z * z * z / 12.0;
    // Exponent maximum (for x > 0) to keep the integrand O(1).
    let peak = if x > 0.0 { (2.0 * x.sqrt()).max(lower) } else { lower };
    let shift = if x > 0.0 && peak > 0.0 { g(peak).max(if lower > 0.0 { g(lower) } else { f64::NEG_INFINITY }) } else if lower > 0.0 { g(lower) } else { 0.0 };
    let spec = QuadratureSpec::default().with_tolerance(1e-12).with_floor(0.0);
    let f = |z: f64| if z > 0.0 { (g(z) - shift).exp() } else { 0.0 };
    let width = if x < -1.0 { 1.0 / -x } else if x > 1.0 { 2.0 / (2.0 * x.sqrt()).sqrt() } else { 1.0 };
    let mut total = 0.0;
    if peak > lower {
        let e = if lower == 0.0 {
            integrate_sqrt_singular(f, Domain::Interval(0.0, peak), &spec)?
        } else {
            integrate(f, Domain::Interval(lower, peak), &spec)?
        };
        total += e.value;
        total += integrate(f, Domain::Ray(peak), &spec.exponential(width))?.value;
    } else if lower == 0.0 {
        total += integrate_sqrt_singular(f, Domain::Ray(0.0), &spec.exponential(width))?.value;
    } else {
        total += integrate(f, Domain::Ray(lower), &spec.exponential(width))?.value;
    }
    Ok(total.ln() + shift)
}

/// A_p(qβ) = ∫₀^∞ z^p exp(−z³/12 + qβz) dz for p ∈ {−3/2, −1/2, 1/2, 3/2}.
/// p = −3/2 diverges at 0 and needs an explicit positive cutoff.
pub fn a_p_integral(p: f64, q: Sign, beta: f64, cutoff: Option<f64>) -> Result<f64> {
    Ok(ln_a_p_integral(p, q, beta, cutoff)?.exp())
}

/// ln A_p(qβ); finite where A_p itself overflows.
pub fn ln_a_p_integral(p: f64, q: Sign, beta: f64, cutoff: Option<f64>) -> Result<f64> {
    if ![-1.5, -0.5, 0.5, 1.5].contains(&p) {
        return Err(Error::Precondition(format!("A_p defined for p in {{-3/2,-1/2,1/2,3/2}}, got {p}")));
    }
    if !(beta >= 0.0) {
        return Err(Error::Precondition("A_p needs beta >= 0".into()));
    }
    if p == -1.5 && !matches!(cutoff, Some(c) if c > 0.0) {
        return Err(Error::Precondition(
            "A_{-3/2} diverges at z = 0; a positive cutoff is required".into(),
        ));
    }
    ln_laplace_airy(p, q.value() * beta, cutoff)
}
