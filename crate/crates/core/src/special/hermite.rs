//! Physicists' Hermite polynomials and Gauss–Hermite rules.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 64;

fn check(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::Capability(format!(
            "Hermite degree {n} exceeds the supported bound {MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// H_n(x) via H_{k+1} = 2x·H_k − 2k·H_{k−1}.
pub fn hermite(n: usize, x: f64) -> Result<f64> {
    check(n)?;
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(h0);
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// H_0(x) … H_n(x).
pub fn hermite_all(n: usize, x: f64) -> Result<Vec<f64>> {
    check(n)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(2.0 * x);
    }
    for k in 1..n {
        let next = 2.0 * x * out[k] - 2.0 * k as f64 * out[k - 1];
        out.push(next);
    }
    Ok(out)
}

/// n! for n ≤ 64 as f64 (exact up to 22!, correctly rounded products beyond).
pub fn factorial(n: usize) -> Result<f64> {
    check(n)?;
    static TABLE: OnceLock<[f64; MAX_DEGREE + 1]> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut t = [1.0; MAX_DEGREE + 1];
        for k in 1..=MAX_DEGREE {
            t[k] = t[k - 1] * k as f64;
        }
        t
    });
    Ok(t[n])
}

/// Nodes and weights of the n-point Gauss–Hermite rule for weight e^(−x²).
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 2 * MAX_DEGREE {
        return Err(Error::Capability(format!("Gauss-Hermite order {n} not in 1..={}", 2 * MAX_DEGREE)));
    }
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // Orthonormal Hermite functions without the Gaussian factor.
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    Ok((x, w))
}
