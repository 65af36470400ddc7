//! Dense bivariate polynomial algebra over scalar and 3-vector coefficients,
//! plus the elimination tools built on it: reduction modulo the range conic,
//! Sylvester resultants (used as a cross-check oracle), simultaneous root
//! finding and deflation.
//!
//! Degrees in this problem are tiny (the largest object is the degree-6
//! vector polynomial xi), so everything is stored on fixed 7x7 grids and
//! plain coefficient vectors.

mod reduction;
mod resultant;
mod roots;

pub use reduction::QReduction;
pub use resultant::{sylvester_resultant, EliminateVar};
pub use roots::{aberth_roots, deflate, poly_roots, DeflationInfo, RootSet};

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum stored exponent per variable.
pub const MAX_DEG: usize = 6;

const N: usize = MAX_DEG + 1;

/// Dense bivariate polynomial: `coeff(i, j)` multiplies rho1^i rho2^j.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    c: [[f64; N]; N],
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { c: [[0.0; N]; N] }
    }

    pub fn constant(v: f64) -> Self {
        let mut p = Self::zero();
        p.c[0][0] = v;
        p
    }

    /// Single monomial v * rho1^i rho2^j.
    pub fn monomial(i: usize, j: usize, v: f64) -> Self {
        assert!(i <= MAX_DEG && j <= MAX_DEG);
        let mut p = Self::zero();
        p.c[i][j] = v;
        p
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.c[i][j]
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, v: f64) {
        assert!(i <= MAX_DEG && j <= MAX_DEG);
        self.c[i][j] = v;
    }

    /// Degree in rho1 (exact nonzero test; use `zero_small` first to drop dust).
    pub fn deg1(&self) -> usize {
        for i in (0..N).rev() {
            if self.c[i].iter().any(|&v| v != 0.0) {
                return i;
            }
        }
        0
    }

    pub fn deg2(&self) -> usize {
        for j in (0..N).rev() {
            if (0..N).any(|i| self.c[i][j] != 0.0) {
                return j;
            }
        }
        0
    }

    /// Highest i+j with a nonzero coefficient.
    pub fn total_degree(&self) -> usize {
        let mut d = 0;
        for i in 0..N {
            for j in 0..N {
                if self.c[i][j] != 0.0 {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|row| row.iter().all(|&v| v == 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.c
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    /// Zero out entries with |c| <= tol (absolute).
    pub fn zero_small(&mut self, tol: f64) {
        for row in self.c.iter_mut() {
            for v in row.iter_mut() {
                if v.abs() <= tol {
                    *v = 0.0;
                }
            }
        }
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for i in 0..N {
            for j in 0..N {
                out.c[i][j] += other.c[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for i in 0..N {
            for j in 0..N {
                out.c[i][j] -= other.c[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> BiPoly {
        let mut out = self.clone();
        for row in out.c.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    /// Exact product; fails if the product degree overflows the storage grid.
    pub fn mul(&self, other: &BiPoly) -> Result<BiPoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(BiPoly::zero());
        }
        let (a1, a2) = (self.deg1(), self.deg2());
        let (b1, b2) = (other.deg1(), other.deg2());
        if a1 + b1 > MAX_DEG || a2 + b2 > MAX_DEG {
            return Err(Error::Algebra(format!(
                "product degree ({}, {}) exceeds storage bound {}",
                a1 + b1,
                a2 + b2,
                MAX_DEG
            )));
        }
        let mut out = BiPoly::zero();
        for i in 0..=a1 {
            for j in 0..=a2 {
                let v = self.c[i][j];
                if v == 0.0 {
                    continue;
                }
                for k in 0..=b1 {
                    for l in 0..=b2 {
                        out.c[i + k][j + l] += v * other.c[k][l];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for i in (0..N).rev() {
            let mut row = 0.0;
            for j in (0..N).rev() {
                row = row * y + self.c[i][j];
            }
            acc = acc * x + row;
        }
        acc
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in (0..N).rev() {
            let mut row = Complex64::new(0.0, 0.0);
            for j in (0..N).rev() {
                row = row * y + self.c[i][j];
            }
            acc = acc * x + row;
        }
        acc
    }

    /// Sum of |c_ij| |x|^i |y|^j: a magnitude scale for residuals at (x, y).
    pub fn abs_eval(&self, x: f64, y: f64) -> f64 {
        let (ax, ay) = (x.abs(), y.abs());
        let mut acc = 0.0;
        for i in (0..N).rev() {
            let mut row = 0.0;
            for j in (0..N).rev() {
                row = row * ay + self.c[i][j].abs();
            }
            acc = acc * ax + row;
        }
        acc
    }

    /// Coefficient polynomial of rho1^h, as a univariate polynomial in rho2.
    pub fn rho1_coefficient(&self, h: usize) -> UniPoly {
        UniPoly::from_coeffs(self.c[h].to_vec())
    }

    /// Derivative with respect to rho1.
    pub fn d_rho1(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for i in 1..N {
            for j in 0..N {
                out.c[i - 1][j] = self.c[i][j] * i as f64;
            }
        }
        out
    }

    /// Derivative with respect to rho2.
    pub fn d_rho2(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for i in 0..N {
            for j in 1..N {
                out.c[i][j - 1] = self.c[i][j] * j as f64;
            }
        }
        out
    }
}

/// Bivariate polynomial with 3-vector coefficients (the carrier for xi).
#[derive(Clone, Debug)]
pub struct BiPolyVec3 {
    pub x: BiPoly,
    pub y: BiPoly,
    pub z: BiPoly,
}

impl BiPolyVec3 {
    pub fn zero() -> Self {
        BiPolyVec3 {
            x: BiPoly::zero(),
            y: BiPoly::zero(),
            z: BiPoly::zero(),
        }
    }

    /// Constant vector times rho1^i rho2^j.
    pub fn monomial(i: usize, j: usize, v: Vector3<f64>) -> Self {
        BiPolyVec3 {
            x: BiPoly::monomial(i, j, v.x),
            y: BiPoly::monomial(i, j, v.y),
            z: BiPoly::monomial(i, j, v.z),
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> Vector3<f64> {
        Vector3::new(self.x.coeff(i, j), self.y.coeff(i, j), self.z.coeff(i, j))
    }

    pub fn add(&self, other: &BiPolyVec3) -> BiPolyVec3 {
        BiPolyVec3 {
            x: self.x.add(&other.x),
            y: self.y.add(&other.y),
            z: self.z.add(&other.z),
        }
    }

    pub fn sub(&self, other: &BiPolyVec3) -> BiPolyVec3 {
        BiPolyVec3 {
            x: self.x.sub(&other.x),
            y: self.y.sub(&other.y),
            z: self.z.sub(&other.z),
        }
    }

    /// Product by a scalar polynomial.
    pub fn scale_poly(&self, s: &BiPoly) -> Result<BiPolyVec3> {
        Ok(BiPolyVec3 {
            x: self.x.mul(s)?,
            y: self.y.mul(s)?,
            z: self.z.mul(s)?,
        })
    }

    /// Product by a constant vector under the dot product.
    pub fn dot_vec(&self, v: &Vector3<f64>) -> BiPoly {
        self.x
            .scale(v.x)
            .add(&self.y.scale(v.y))
            .add(&self.z.scale(v.z))
    }

    pub fn dot(&self, other: &BiPolyVec3) -> Result<BiPoly> {
        Ok(self
            .x
            .mul(&other.x)?
            .add(&self.y.mul(&other.y)?)
            .add(&self.z.mul(&other.z)?))
    }

    pub fn cross(&self, other: &BiPolyVec3) -> Result<BiPolyVec3> {
        Ok(BiPolyVec3 {
            x: self.y.mul(&other.z)?.sub(&self.z.mul(&other.y)?),
            y: self.z.mul(&other.x)?.sub(&self.x.mul(&other.z)?),
            z: self.x.mul(&other.y)?.sub(&self.y.mul(&other.x)?),
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> Vector3<f64> {
        Vector3::new(self.x.eval(x, y), self.y.eval(x, y), self.z.eval(x, y))
    }

    /// Componentwise magnitude scale at a point.
    pub fn abs_eval(&self, x: f64, y: f64) -> f64 {
        self.x.abs_eval(x, y) + self.y.abs_eval(x, y) + self.z.abs_eval(x, y)
    }

    pub fn max_abs(&self) -> f64 {
        self.x.max_abs().max(self.y.max_abs()).max(self.z.max_abs())
    }

    pub fn zero_small(&mut self, tol: f64) {
        self.x.zero_small(tol);
        self.y.zero_small(tol);
        self.z.zero_small(tol);
    }

    pub fn total_degree(&self) -> usize {
        self.x
            .total_degree()
            .max(self.y.total_degree())
            .max(self.z.total_degree())
    }
}

/// Univariate polynomial, coefficients in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    c: Vec<f64>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { c: vec![0.0] }
    }

    pub fn constant(v: f64) -> Self {
        UniPoly { c: vec![v] }
    }

    pub fn from_coeffs(c: Vec<f64>) -> Self {
        let mut p = UniPoly { c };
        if p.c.is_empty() {
            p.c.push(0.0);
        }
        p.trim_exact();
        p
    }

    /// Monic polynomial with the given roots (test helper and reconstruction check).
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= r * a;
            }
            c = next;
        }
        UniPoly::from_coeffs(c)
    }

    fn trim_exact(&mut self) {
        while self.c.len() > 1 && *self.c.last().unwrap() == 0.0 {
            self.c.pop();
        }
    }

    /// Drop leading coefficients below rel_tol * max |c|.
    pub fn trim(&self, rel_tol: f64) -> UniPoly {
        let m = self.max_abs();
        if m == 0.0 {
            return UniPoly::zero();
        }
        let mut c = self.c.clone();
        while c.len() > 1 && c.last().unwrap().abs() <= rel_tol * m {
            c.pop();
        }
        UniPoly { c }
    }

    pub fn deg(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0.0; n];
        for (k, v) in c.iter_mut().enumerate() {
            *v = self.coeff(k) + other.coeff(k);
        }
        UniPoly::from_coeffs(c)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> UniPoly {
        UniPoly {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![0.0; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.c
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    pub fn derivative(&self) -> UniPoly {
        if self.c.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * k as f64)
                .collect(),
        )
    }
}
