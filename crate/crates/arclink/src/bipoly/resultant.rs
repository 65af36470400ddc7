//! Sylvester resultant of two bivariate polynomials with respect to one
//! variable, by evaluation-interpolation: the determinant of the Sylvester
//! matrix is evaluated at scaled roots of unity in the kept variable and the
//! coefficients are recovered by an inverse discrete Fourier sum.
//!
//! This serves as the independent oracle against which the closed-form
//! elimination (u_j = q20^k v_j) is checked; it is never on the production
//! path of the solver.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{BiPoly, UniPoly};
use crate::error::{Error, Result};

/// Variable eliminated by the resultant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EliminateVar {
    Rho1,
    Rho2,
}

/// Coefficient polynomials of `p` in the eliminated variable, low to high,
/// with floating dust trimmed from the top.
fn coefficient_polys(p: &BiPoly, var: EliminateVar) -> Vec<UniPoly> {
    let scale = p.max_abs();
    let mut cols: Vec<UniPoly> = Vec::new();
    for h in 0..=super::MAX_DEG {
        let poly = match var {
            EliminateVar::Rho1 => p.rho1_coefficient(h),
            EliminateVar::Rho2 => {
                let mut c = Vec::with_capacity(super::MAX_DEG + 1);
                for i in 0..=super::MAX_DEG {
                    c.push(p.coeff(i, h));
                }
                UniPoly::from_coeffs(c)
            }
        };
        cols.push(poly);
    }
    while cols.len() > 1 {
        let top = cols.last().unwrap();
        if top.max_abs() <= 1e-12 * scale {
            cols.pop();
        } else {
            break;
        }
    }
    cols
}

fn unipoly_pow(base: &UniPoly, n: usize) -> UniPoly {
    let mut acc = UniPoly::constant(1.0);
    for _ in 0..n {
        acc = acc.mul(base);
    }
    acc
}

/// res(p, q, var) as a univariate polynomial in the kept variable.
pub fn sylvester_resultant(p: &BiPoly, q: &BiPoly, var: EliminateVar) -> Result<UniPoly> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::Algebra(
            "resultant of a zero polynomial is degenerate".into(),
        ));
    }
    let pa = coefficient_polys(p, var);
    let qa = coefficient_polys(q, var);
    let m = pa.len() - 1;
    let n = qa.len() - 1;
    if m == 0 && n == 0 {
        return Ok(UniPoly::constant(1.0));
    }
    if m == 0 {
        return Ok(unipoly_pow(&pa[0], n));
    }
    if n == 0 {
        return Ok(unipoly_pow(&qa[0], m));
    }

    let keep_deg_p = pa.iter().map(UniPoly::deg).max().unwrap_or(0);
    let keep_deg_q = qa.iter().map(UniPoly::deg).max().unwrap_or(0);
    let bound = m * keep_deg_q + n * keep_deg_p;
    let samples = bound + 1;
    let size = m + n;

    // Evaluate det(Sylvester) at roots of unity in the kept variable.
    let mut dets = Vec::with_capacity(samples);
    for k in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        let y = Complex64::from_polar(1.0, theta);
        let pv: Vec<Complex64> = pa.iter().map(|c| c.eval_complex(y)).collect();
        let qv: Vec<Complex64> = qa.iter().map(|c| c.eval_complex(y)).collect();
        let mut s = DMatrix::<Complex64>::zeros(size, size);
        for row in 0..n {
            for (i, &a) in pv.iter().enumerate() {
                // row holds [a_m .. a_0] shifted right by `row`
                s[(row, row + m - i)] = a;
            }
        }
        for row in 0..m {
            for (i, &b) in qv.iter().enumerate() {
                s[(n + row, row + n - i)] = b;
            }
        }
        dets.push(s.lu().determinant());
    }

    // Inverse DFT recovers the coefficients; the polynomial is real.
    let mut coeffs = Vec::with_capacity(samples);
    for j in 0..samples {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, d) in dets.iter().enumerate() {
            let theta = -2.0 * std::f64::consts::PI * (k * j) as f64 / samples as f64;
            acc += d * Complex64::from_polar(1.0, theta);
        }
        coeffs.push(acc.re / samples as f64);
    }
    Ok(UniPoly::from_coeffs(coeffs).trim(1e-13))
}
