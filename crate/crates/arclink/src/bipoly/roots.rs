//! Simultaneous polynomial root finding (Aberth-Ehrlich) and synthetic
//! division. Fully deterministic: initial guesses sit on a fixed circle, no
//! randomness anywhere.

use num_complex::Complex64;

use super::UniPoly;
use crate::error::{Error, Result};

const STEP_TOL: f64 = 1e-14;
const INIT_ANGLE_OFFSET: f64 = 0.376;

/// All complex roots of a polynomial with per-root residuals.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// |u(z)| at each returned root, on the original coefficients.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Backward-stable magnitude bound sum |c_k| |z|^k.
fn abs_horner(c: &[f64], zn: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * zn + a.abs())
}

/// Aberth-Ehrlich iteration; always returns whatever it found, with a
/// convergence flag.
pub fn aberth_roots(u: &UniPoly, max_iter: usize) -> Result<RootSet> {
    let trimmed = u.trim(1e-12);
    let n = trimmed.deg();
    if n == 0 || trimmed.is_zero() {
        return Err(Error::Algebra(
            "root finding needs degree >= 1 after trimming".into(),
        ));
    }
    let c = trimmed.coeffs();

    if n == 1 {
        let root = Complex64::new(-c[0] / c[1], 0.0);
        return Ok(RootSet {
            residuals: vec![u.eval_complex(root).norm()],
            roots: vec![root],
            iterations: 0,
            converged: true,
        });
    }
    if n == 2 {
        let (a, b, cc) = (c[2], c[1], c[0]);
        let disc = Complex64::new(b * b - 4.0 * a * cc, 0.0).sqrt();
        // pick the sign that avoids cancellation in -b -+ sqrt
        let s = if b >= 0.0 { -disc } else { disc };
        let q = (Complex64::new(b, 0.0) + s) * (-0.5);
        let r1 = q / a;
        let r2 = if q.norm() > 0.0 {
            Complex64::new(cc, 0.0) / q
        } else {
            Complex64::new(0.0, 0.0)
        };
        let roots = vec![r1, r2];
        let residuals = roots.iter().map(|&z| u.eval_complex(z).norm()).collect();
        return Ok(RootSet {
            roots,
            residuals,
            iterations: 0,
            converged: true,
        });
    }

    // monic normalization for the iteration
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();

    // Fujiwara-style bound for the initial circle radius
    let mut radius: f64 = 0.0;
    for k in 1..=n {
        let a = monic[n - k].abs();
        if a > 0.0 {
            radius = radius.max(2.0 * a.powf(1.0 / k as f64));
        }
    }
    if radius == 0.0 {
        radius = 1.0;
    }
    let center = Complex64::new(-monic[n - 1] / n as f64, 0.0);

    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + INIT_ANGLE_OFFSET;
            center + Complex64::from_polar(0.7 * radius.max(1e-3), theta)
        })
        .collect();

    let mut iterations = 0;
    let mut converged = false;
    let mut done = vec![false; n];
    while iterations < max_iter {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(&monic, z[i]);
            // stop this root once the residual is at rounding level of a
            // backward-stable evaluation
            if p.norm() <= 8.0 * f64::EPSILON * abs_horner(&monic, z[i].norm()) {
                done[i] = true;
                continue;
            }
            let newton = if dp.norm() > 0.0 {
                p / dp
            } else {
                // nudge off a critical point
                Complex64::new(1e-8, 1e-8)
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        sum += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * sum;
            let w = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= w;
            if w.norm() <= STEP_TOL * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            converged = true;
            break;
        }
    }

    // two Newton polish steps on the original coefficients
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = horner(c, *zi);
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.norm() < 1.0 + zi.norm() {
                    *zi -= step;
                }
            }
        }
    }

    let residuals: Vec<f64> = z.iter().map(|&zi| u.eval_complex(zi).norm()).collect();
    Ok(RootSet {
        roots: z,
        residuals,
        iterations,
        converged,
    })
}

/// All complex roots; errors when the iteration stalls.
pub fn poly_roots(u: &UniPoly, max_iter: usize) -> Result<RootSet> {
    let set = aberth_roots(u, max_iter)?;
    if !set.converged {
        let scale = u.max_abs().max(1e-300);
        let worst = set
            .residuals
            .iter()
            .zip(&set.roots)
            .map(|(r, z)| r / (scale * (1.0 + z.norm().powi(u.deg() as i32))))
            .fold(0.0_f64, f64::max);
        return Err(Error::RootFinder {
            iterations: set.iterations,
            residual: worst,
        });
    }
    Ok(set)
}

/// Outcome of a synthetic division by (z - root).
#[derive(Clone, Copy, Debug)]
pub struct DeflationInfo {
    pub remainder: f64,
    /// remainder / (||u|| max(1, |root|)^deg)
    pub rel_remainder: f64,
    /// Set when rel_remainder exceeded the deflation threshold.
    pub warned: bool,
}

/// Divide out a real root by synthetic division; the remainder magnitude is
/// reported rather than silently dropped.
///
/// The forward (Horner) recurrence is stable only for |root| <= 1; larger
/// roots are deflated by the backward recurrence, which divides the rounding
/// errors by the root instead of multiplying them.
pub fn deflate(u: &UniPoly, root: f64, tau_defl: f64) -> (UniPoly, DeflationInfo) {
    let c = u.coeffs();
    let n = u.deg();
    if n == 0 {
        return (
            UniPoly::zero(),
            DeflationInfo {
                remainder: c[0],
                rel_remainder: 1.0,
                warned: true,
            },
        );
    }
    let remainder = u.eval(root);
    let mut quotient = vec![0.0; n];
    if root.abs() <= 1.0 {
        let mut acc = c[n];
        for k in (0..n).rev() {
            quotient[k] = acc;
            acc = c[k] + root * acc;
        }
    } else {
        quotient[0] = -c[0] / root;
        for k in 1..n {
            quotient[k] = (quotient[k - 1] - c[k]) / root;
        }
    }
    let scale = u.max_abs() * root.abs().max(1.0).powi(n as i32);
    let rel = remainder.abs() / scale.max(1e-300);
    (
        UniPoly::from_coeffs(quotient),
        DeflationInfo {
            remainder,
            rel_remainder: rel,
            warned: rel > tau_defl,
        },
    )
}
