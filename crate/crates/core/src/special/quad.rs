//! Adaptive Gauss–Kronrod (7/15) quadrature on intervals, rays and the real line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Change of variables used to map an infinite range onto a finite one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RayMapping {
    /// z = a + L·(−ln(1−u)); suited to exponentially decaying integrands.
    Exponential,
    /// z = a + L·u/(1−u); suited to power-law tails.
    Algebraic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_floor: f64,
    /// Maximum number of bisections.
    pub max_refinements: usize,
    pub semi_infinite_mapping: RayMapping,
    /// Length scale L of the ray mapping.
    pub ray_scale: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            relative_tolerance: 1e-10,
            absolute_floor: 1e-300,
            max_refinements: 4000,
            semi_infinite_mapping: RayMapping::Exponential,
            ray_scale: 1.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(mut self, rel: f64) -> Self {
        self.relative_tolerance = rel;
        self
    }

    pub fn with_floor(mut self, abs: f64) -> Self {
        self.absolute_floor = abs;
        self
    }

    pub fn algebraic(mut self, scale: f64) -> Self {
        self.semi_infinite_mapping = RayMapping::Algebraic;
        self.ray_scale = scale;
        self
    }

    pub fn exponential(mut self, scale: f64) -> Self {
        self.semi_infinite_mapping = RayMapping::Exponential;
        self.ray_scale = scale;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) || self.max_refinements < 1 {
            return Err(Error::Precondition(
                "quadrature needs relative_tolerance > 0 and max_refinements >= 1".into(),
            ));
        }
        if !(self.ray_scale > 0.0) || !self.ray_scale.is_finite() {
            return Err(Error::Precondition("ray_scale must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// [lower, upper]
    Interval(f64, f64),
    /// [lower, ∞)
    Ray(f64),
    /// (−∞, ∞), centred at the given point.
    Line(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// (K15 value, |K15 − G7|, ∫|f| by K15).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kron * h, ((kron - gauss) * h).abs(), abs * h.abs())
}

/// Adaptive bisection over [a, b] with the conservative |K15 − G7| error estimate.
fn adapt<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        let (value, error, abs) = gk15(f, w[0], w[1]);
        evaluations += 15;
        total += value;
        total_err += error;
        total_abs += abs;
        heap.push(Segment { a: w[0], b: w[1], value, error, abs });
    }
    let mut refinements = 0;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Convergence { estimate: total, residual: total_err });
        }
        // Below ~50 ulp of ∫|f| the estimate is rounding noise, not truncation.
        let noise = 50.0 * f64::EPSILON * total_abs;
        if total_err <= (spec.relative_tolerance * total.abs()).max(spec.absolute_floor).max(noise) {
            // Resum to limit drift from incremental updates.
            let value: f64 = heap.iter().map(|s| s.value).sum();
            let error: f64 = heap.iter().map(|s| s.error).sum();
            return Ok(Estimate { value, error, evaluations });
        }
        if refinements >= spec.max_refinements {
            return Err(Error::Convergence { estimate: total, residual: total_err });
        }
        let worst = heap.pop().expect("non-empty segment heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Convergence { estimate: total, residual: total_err });
        }
        let (v1, e1, a1) = gk15(f, worst.a, mid);
        let (v2, e2, a2) = gk15(f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        total_abs += a1 + a2 - worst.abs;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, abs: a1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, abs: a2 });
        refinements += 1;
        if refinements % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
            total_abs = heap.iter().map(|s| s.abs).sum();
        }
    }
}

#[inline]
fn guarded(v: f64, jac: f64) -> f64 {
    if v == 0.0 || jac == 0.0 {
        0.0
    } else {
        v * jac
    }
}

/// z(u) and dz/du for the unit-interval image of a ray starting at 0.
#[inline]
fn ray_map(mapping: RayMapping, scale: f64, u: f64) -> (f64, f64) {
    let w = 1.0 - u;
    if w <= 0.0 {
        return (f64::INFINITY, 0.0);
    }
    match mapping {
        RayMapping::Exponential => (-scale * w.ln(), scale / w),
        RayMapping::Algebraic => (scale * u / w, scale / (w * w)),
    }
}

/// ∫ f over `domain`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, domain: Domain, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    match domain {
        Domain::Interval(a, b) => {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::Precondition("interval endpoints must be finite".into()));
            }
            if a == b {
                return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
            }
            adapt(&f, &[a, b], spec)
        }
        Domain::Ray(a) => {
            let (m, l) = (spec.semi_infinite_mapping, spec.ray_scale);
            let g = |u: f64| {
                let (z, jac) = ray_map(m, l, u);
                if !z.is_finite() {
                    return 0.0;
                }
                guarded(f(a + z), jac)
            };
            adapt(&g, &[0.0, 0.5, 1.0], spec)
        }
        Domain::Line(c) => {
            let (m, l) = (spec.semi_infinite_mapping, spec.ray_scale);
            let g = |u: f64| {
                let (z, jac) = ray_map(m, l, u.abs());
                if !z.is_finite() {
                    return 0.0;
                }
                guarded(f(c + z.copysign(u)), jac)
            };
            adapt(&g, &[-1.0, -0.5, 0.0, 0.5, 1.0], spec)
        }
    }
}

/// ∫ f over an interval or ray whose lower endpoint carries an integrable
/// (z − a)^(−1/2)-type singularity; substitutes z = a + s².
pub fn integrate_sqrt_singular<F: Fn(f64) -> f64>(
    f: F,
    domain: Domain,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    match domain {
        Domain::Interval(a, b) => {
            if b < a {
                return Err(Error::Precondition("interval must be ordered".into()));
            }
            integrate(|s| guarded(f(a + s * s), 2.0 * s), Domain::Interval(0.0, (b - a).sqrt()), spec)
        }
        Domain::Ray(a) => {
            let mut s_spec = *spec;
            s_spec.ray_scale = spec.ray_scale.sqrt();
            integrate(|s| guarded(f(a + s * s), 2.0 * s), Domain::Ray(0.0), &s_spec)
        }
        Domain::Line(_) => Err(Error::Precondition(
            "endpoint singularity needs a domain with a finite lower endpoint".into(),
        )),
    }
}

/// Sum of integrals over consecutive pieces [p0,p1], …, [p_{n-1}, ∞) (ray if `open_end`).
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    open_end: bool,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let mut out = Estimate { value: 0.0, error: 0.0, evaluations: 0 };
    let mut acc = |e: Estimate| {
        out.value += e.value;
        out.error += e.error;
        out.evaluations += e.evaluations;
    };
    for w in points.windows(2) {
        acc(integrate(&f, Domain::Interval(w[0], w[1]), spec)?);
    }
    if open_end {
        let last = *points.last().ok_or_else(|| Error::Precondition("no break points".into()))?;
        acc(integrate(&f, Domain::Ray(last), spec)?);
    }
    Ok(out)
}
