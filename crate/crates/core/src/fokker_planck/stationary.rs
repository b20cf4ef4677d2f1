use std::f64::consts::PI;
use std::io::Write;

use crate::error::{precondition, Result};
use crate::io::write_rows;
use crate::special::{integrate, integrate_pieces, ln_airy_modulus_sq, ln_laplace_airy, Domain, QuadratureSpec};

/// ln J̄₀f(x) = −ln(π²·A(−x)), x = λγ.
pub fn ln_flux_scaled(x: f64) -> Result<f64> {
    Ok(-2.0 * PI.ln() - ln_airy_modulus_sq(-x)?)
}

/// J̄₀f(x) = 1/(π²·[Ai²(−x) + Bi²(−x)]).
pub fn flux_scaled(x: f64) -> Result<f64> {
    Ok(ln_flux_scaled(x)?.exp())
}

/// J̄₀f from its integral form 1/(√π ∫₀^∞ z^(−1/2) e^(−z³/12 − xz) dz).
pub fn flux_scaled_quadrature(x: f64) -> Result<f64> {
    Ok((-0.5 * PI.ln() - ln_laplace_airy(-0.5, -x, None)?).exp())
}

fn check(lambda: f64, gamma: f64, theta: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() || !gamma.is_finite() || !theta.is_finite() {
        return precondition("stationary density needs lambda > 0 and finite gamma, theta_bar");
    }
    Ok(lambda * gamma)
}

/// ln ∫₀^∞ w(y)·exp(g(y)) dy for the folded exponent
/// g(y) = −(c + θ̄²)y + θ̄y² − y³/3, together with the shift used.
fn folded<W: Fn(f64) -> f64>(c: f64, theta: f64, weight: W, rel: f64) -> Result<(f64, f64)> {
    let a = c + theta * theta;
    let g = |y: f64| -a * y + theta * y * y - y * y * y / 3.0;
    // g'(y) = −[(y − θ̄)² + c]: an interior maximum only for c < 0.
    let peak = if c < 0.0 { theta + (-c).sqrt() } else { -1.0 };
    let spec = QuadratureSpec::default().with_tolerance(rel).with_floor(0.0);
    if peak > 0.0 {
        let shift = g(peak).max(0.0);
        let f = |y: f64| weight(y) * (g(y) - shift).exp();
        let width = (2.0 * (-c).sqrt()).powf(-0.5).min(1.0);
        let lo = (peak - 8.0 * width).max(0.0);
        let mut pts = vec![0.0];
        // Mass can also sit at y = 0 when θ̄ − √(−c) > 0 (decay rate a there).
        let near = 30.0 / a.max(1.0);
        if a > 0.0 && near < lo {
            pts.push(near);
        }
        if lo > 0.0 {
            pts.push(lo);
        }
        pts.push(peak);
        let e = integrate_pieces(f, &pts, true, &spec.exponential(width))?;
        Ok((e.value, shift))
    } else {
        let f = |y: f64| weight(y) * g(y).exp();
        let scale = 1.0 / a.max(1.0);
        if theta <= 0.0 {
            let e = integrate(f, Domain::Ray(0.0), &spec.exponential(scale))?;
            return Ok((e.value, 0.0));
        }
        // Positive θ̄: g flattens near y = θ̄ (g' = −(y − θ̄)² − c).
        let near = 30.0 * scale;
        let mut pts = vec![0.0];
        if near < theta {
            pts.push(near);
        }
        pts.push(theta);
        let e = integrate_pieces(f, &pts, true, &spec.exponential(1.0))?;
        Ok((e.value, 0.0))
    }
}

/// Q̄_s(θ̄) = J̄₀f·∫₀^∞ exp(−λγy − θ̄²y + θ̄y² − y³/3) dy.
pub fn stationary_density(lambda: f64, gamma: f64, theta_bar: f64) -> Result<f64> {
    let c = check(lambda, gamma, theta_bar)?;
    let (v, shift) = folded(c, theta_bar, |_| 1.0, 1e-12)?;
    Ok((ln_flux_scaled(c)? + shift).exp() * v)
}

/// dQ̄_s/dθ̄ by differentiation under the integral sign.
pub fn stationary_density_derivative(lambda: f64, gamma: f64, theta_bar: f64) -> Result<f64> {
    let c = check(lambda, gamma, theta_bar)?;
    // Split the sign-changing weight y² − 2θ̄y into its two parts to keep relative accuracy.
    let (p, s1) = folded(c, theta_bar, |y| y * y, 1e-12)?;
    let (q, s2) = folded(c, theta_bar, |y| y, 1e-12)?;
    let lj = ln_flux_scaled(c)?;
    Ok((lj + s1).exp() * p - 2.0 * theta_bar * (lj + s2).exp() * q)
}

/// Residual of the stationary flux equation (θ̄² + λγ)Q̄_s + dQ̄_s/dθ̄ − J̄₀f.
pub fn flux_residual(lambda: f64, gamma: f64, theta_bar: f64) -> Result<f64> {
    let c = check(lambda, gamma, theta_bar)?;
    let q = stationary_density(lambda, gamma, theta_bar)?;
    let dq = stationary_density_derivative(lambda, gamma, theta_bar)?;
    Ok((theta_bar * theta_bar + c) * q + dq - flux_scaled(c)?)
}

/// ∫_a^b f for a density-like f with bulk at `centre` ± `width` and at most power-law tails.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, centre: f64, width: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a < b) {
        return precondition("integration range needs a < b");
    }
    let (m, w) = (centre, width);
    let spec = QuadratureSpec::default().with_tolerance(tol).with_floor(0.0).algebraic(w);
    // Finite pieces over [a, b] ∩ [m − 4w, m + 4w], rays or intervals outside.
    let (lo, hi) = (a.max(m - 4.0 * w), b.min(m + 4.0 * w));
    let (lo, hi) = if lo < hi { (lo, hi) } else if a.is_finite() { (a, a) } else { (b, b) };
    let mut total = 0.0;
    if lo < hi {
        let mut pts = vec![lo];
        pts.extend([m - w, m, m + w].into_iter().filter(|&p| p > lo && p < hi));
        pts.push(hi);
        total += integrate_pieces(&f, &pts, false, &spec)?.value;
    }
    if a < lo {
        total += if a.is_finite() {
            integrate(&f, Domain::Interval(a, lo), &spec)?.value
        } else {
            integrate(|s| f(2.0 * lo - s), Domain::Ray(lo), &spec)?.value
        };
    }
    if b > hi {
        total += if b.is_finite() {
            integrate(&f, Domain::Interval(hi, b), &spec)?.value
        } else {
            integrate(&f, Domain::Ray(hi), &spec)?.value
        };
    }
    if total.is_nan() {
        return Err(crate::Error::Convergence { estimate: total, residual: f64::NAN });
    }
    Ok(total)
}

/// Q̄_s sampled on a grid, with its flux.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryDist {
    pub lambda: f64,
    pub gamma: f64,
    pub j0f_scaled: f64,
    pub grid: Vec<(f64, f64)>,
}

impl StationaryDist {
    pub fn new(lambda: f64, gamma: f64, theta_grid: &[f64]) -> Result<Self> {
        check(lambda, gamma, 0.0)?;
        let grid = theta_grid
            .iter()
            .map(|&t| stationary_density(lambda, gamma, t).map(|q| (t, q)))
            .collect::<Result<Vec<_>>>()?;
        Ok(StationaryDist { lambda, gamma, j0f_scaled: flux_scaled(lambda * gamma)?, grid })
    }

    pub fn density(&self, theta_bar: f64) -> Result<f64> {
        stationary_density(self.lambda, self.gamma, theta_bar)
    }

    /// Break points bracketing the bulk of Q̄_s: centre and a width.
    pub fn bulk(&self) -> (f64, f64) {
        let c = self.lambda * self.gamma;
        let centre = if c < 0.0 { (-c).sqrt() } else { 0.0 };
        (centre, c.abs().sqrt().max(1.0))
    }

    /// ∫ Q̄_s over [a, b] (either end may be infinite).
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        self.integrate_weighted(a, b, |_| 1.0, 1e-10)
    }

    /// ∫ Q̄_s(θ̄)·g(θ̄) dθ̄ over [a, b] at relative tolerance `tol`.
    pub fn integrate_weighted<G: Fn(f64) -> f64>(&self, a: f64, b: f64, g: G, tol: f64) -> Result<f64> {
        let (m, w) = self.bulk();
        let f = |t: f64| stationary_density(self.lambda, self.gamma, t).unwrap_or(f64::NAN) * g(t);
        integrate_line(f, m, w, a, b, tol)
    }
    /// ∫ Q̄_s dθ̄ over the real line.
    pub fn normalization(&self) -> Result<f64> {
        self.mass(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// (∫_{−∞}^0 Q̄_s, ∫_0^∞ Q̄_s).
    pub fn split_mass(&self) -> Result<(f64, f64)> {
        Ok((self.mass(f64::NEG_INFINITY, 0.0)?, self.mass(0.0, f64::INFINITY)?))
    }

    /// File name carrying the parameters, e.g. `stationary_lambda=1_gamma=4.csv`.
    pub fn file_name(&self) -> String {
        format!("stationary_lambda={}_gamma={}.csv", self.lambda, self.gamma)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_rows(w, "theta_bar,q_s", self.grid.iter().map(|&(t, q)| vec![t, q]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const GAMMA_THIRD: f64 = 2.678_938_534_707_747_6;

    #[test]
    fn flux_at_zero_and_two_routes() {
        let j = flux_scaled(0.0).unwrap();
        let a0 = 0.355_028_053_887_817_2f64.powi(2) + 0.614_926_627_446_000_7f64.powi(2);
        assert!((j - 1.0 / (PI * PI * a0)).abs() < 1e-14);
        assert!((j - 0.2009578).abs() < 1e-5);
        for i in 0..=40 {
            let x = -10.0 + 0.5 * i as f64;
            let a = flux_scaled(x).unwrap();
            let q = flux_scaled_quadrature(x).unwrap();
            assert!((a - q).abs() < 1e-8 * a, "x={x}: {a} vs {q}");
        }
    }

    #[test]
    fn flux_large_energy_asymptote() {
        let x: f64 = 100.0;
        let j = flux_scaled(x).unwrap();
        assert!((j * PI / x.sqrt() - 1.0).abs() < 0.01);
    }

    #[test]
    fn density_at_origin() {
        // J̄₀f(0)·∫₀^∞ e^(−y³/3) dy with the integral = 3^(−2/3)Γ(1/3).
        let exact = flux_scaled(0.0).unwrap() * 3f64.powf(-2.0 / 3.0) * GAMMA_THIRD;
        let q = stationary_density(1.0, 0.0, 0.0).unwrap();
        assert!((q - exact).abs() < 1e-12 * exact);
        assert!((q - 0.2588).abs() < 1e-4);
    }

    #[test]
    fn tail_law_at_eight_for_zero_coupling() {
        let j = flux_scaled(0.0).unwrap();
        for &t in &[-8.0, 8.0] {
            let q = stationary_density(2.0, 0.0, t).unwrap();
            assert!((t * t * q / j - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn normalized_and_asymmetric() {
        for &lambda in &[0.5, 5.0, 50.0] {
            for &gamma in &[-2.0, 0.0, 1.0, 4.0] {
                let d = StationaryDist::new(lambda, gamma, &[]).unwrap();
                let (neg, pos) = d.split_mass().unwrap();
                assert!((neg + pos - 1.0).abs() < 1e-6, "λ={lambda} γ={gamma}: {}", neg + pos);
                assert!(pos > neg, "λ={lambda} γ={gamma}");
            }
        }
    }

    #[test]
    fn flux_equation_residual() {
        for &(lambda, gamma) in &[(1.0, 0.0), (0.5, -2.0), (5.0, 1.0), (50.0, 4.0)] {
            let j = flux_scaled(lambda * gamma).unwrap();
            for i in 0..=40 {
                let t = -10.0 + 0.5 * i as f64;
                let r = flux_residual(lambda, gamma, t).unwrap();
                assert!(r.abs() < 1e-6 * j, "λ={lambda} γ={gamma} θ={t}: {r:e}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-4;
        for &t in &[-3.0, -0.4, 0.0, 1.1, 4.0] {
            let fd = (stationary_density(2.0, 1.5, t + h).unwrap() - stationary_density(2.0, 1.5, t - h).unwrap())
                / (2.0 * h);
            let an = stationary_density_derivative(2.0, 1.5, t).unwrap();
            assert!((fd - an).abs() < 1e-7, "{t}: {fd} vs {an}");
        }
    }

    #[test]
    fn csv_layout() {
        let d = StationaryDist::new(1.0, 4.0, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(d.file_name(), "stationary_lambda=1_gamma=4.csv");
        let mut out = Vec::new();
        d.write_csv(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("theta_bar,q_s\n"));
        assert_eq!(s.lines().count(), 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn density_is_nonnegative(lambda in 0.1f64..50.0, gamma in -2.0f64..5.0, t in -20.0f64..20.0) {
            let q = stationary_density(lambda, gamma, t).unwrap();
            prop_assert!(q >= 0.0 && q.is_finite());
        }
    }
}
