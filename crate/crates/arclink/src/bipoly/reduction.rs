//! Reduction of powers of rho1 modulo the range conic.
//!
//! The conic q has no rho1*rho2 cross term, so q = b2 rho1^2 + b1 rho1 +
//! b0(rho2) with b2, b1 scalar. On q = 0 every power rho1^h (h = 2..5)
//! collapses to a polynomial linear in rho1,
//!
//! ```text
//! rho1^h = beta_h(rho2) rho1 + gamma_h(rho2)
//! ```
//!
//! with beta_2 = -b1/b2, gamma_2 = -b0/b2 and the recurrence
//! beta_{h+1} = beta_h beta_2 + gamma_h, gamma_{h+1} = beta_h gamma_2.

use super::{BiPoly, UniPoly};
use crate::error::{Error, Result};

/// The linear-in-rho1 reductions of rho1^h modulo a nondegenerate conic.
#[derive(Clone, Debug)]
pub struct QReduction {
    /// beta[h-2], gamma[h-2] correspond to rho1^h, h = 2..=5.
    beta: [UniPoly; 4],
    gamma: [UniPoly; 4],
}

impl QReduction {
    /// Build from the five conic coefficients (q has no cross term).
    ///
    /// Fails when |q20| <= eps * max|coefficient| (non-degeneracy condition 1).
    pub fn new(q20: f64, q10: f64, q02: f64, q01: f64, q00: f64, eps: f64) -> Result<QReduction> {
        let scale = q20
            .abs()
            .max(q10.abs())
            .max(q02.abs())
            .max(q01.abs())
            .max(q00.abs());
        if q20.abs() <= eps * scale || scale == 0.0 {
            return Err(Error::Degenerate(format!(
                "q20 = {q20:.3e} below degeneracy threshold (scale {scale:.3e})"
            )));
        }
        let b0 = UniPoly::from_coeffs(vec![q00, q01, q02]);
        let beta2 = UniPoly::constant(-q10 / q20);
        let gamma2 = b0.scale(-1.0 / q20);

        let mut beta = [
            beta2.clone(),
            UniPoly::zero(),
            UniPoly::zero(),
            UniPoly::zero(),
        ];
        let mut gamma = [
            gamma2.clone(),
            UniPoly::zero(),
            UniPoly::zero(),
            UniPoly::zero(),
        ];
        for h in 0..3 {
            beta[h + 1] = beta[h].mul(&beta2).add(&gamma[h]);
            gamma[h + 1] = beta[h].mul(&gamma2);
        }
        Ok(QReduction { beta, gamma })
    }

    /// beta_h for h in 2..=5.
    pub fn beta(&self, h: usize) -> &UniPoly {
        assert!((2..=5).contains(&h));
        &self.beta[h - 2]
    }

    pub fn gamma(&self, h: usize) -> &UniPoly {
        assert!((2..=5).contains(&h));
        &self.gamma[h - 2]
    }

    /// Reduce p modulo the conic: returns (a1~, a0~) with
    /// p = a1~(rho2) rho1 + a0~(rho2) on q = 0.
    pub fn reduce(&self, p: &BiPoly) -> Result<(UniPoly, UniPoly)> {
        let d1 = p.deg1();
        if d1 > 5 {
            return Err(Error::Algebra(format!(
                "reduce_mod_q needs deg_rho1 <= 5, got {d1}"
            )));
        }
        let mut a1 = p.rho1_coefficient(1);
        let mut a0 = p.rho1_coefficient(0);
        for h in 2..=d1.max(1) {
            if h < 2 {
                continue;
            }
            let ah = p.rho1_coefficient(h);
            if ah.is_zero() {
                continue;
            }
            a1 = a1.add(&ah.mul(self.beta(h)));
            a0 = a0.add(&ah.mul(self.gamma(h)));
        }
        Ok((a1, a0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    // q = rho1^2 - rho2: b2 = 1, b1 = 0, b0 = -rho2
    fn parabola() -> QReduction {
        QReduction::new(1.0, 0.0, 0.0, -1.0, 0.0, 1e-10).unwrap()
    }

    #[test]
    fn hand_recurrence_on_parabola() {
        let red = parabola();
        // beta2 = 0, gamma2 = rho2
        assert_eq!(red.beta(2).coeffs(), &[0.0]);
        assert_eq!(red.gamma(2).coeffs(), &[0.0, 1.0]);
        // beta3 = beta2^2 + gamma2 = rho2, gamma3 = beta2 gamma2 = 0
        assert_eq!(red.beta(3).coeffs(), &[0.0, 1.0]);
        assert!(red.gamma(3).is_zero());
        // rho1^4 = beta4 rho1 + gamma4 = rho2^2
        assert!(red.beta(4).is_zero());
        assert_eq!(red.gamma(4).coeffs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn degenerate_q20_rejected() {
        assert!(QReduction::new(0.0, 1.0, 1.0, 0.0, -1.0, 1e-10).is_err());
        assert!(QReduction::new(1e-14, 1.0, 1.0, 0.0, -1.0, 1e-10).is_err());
    }

    /// Sample real roots (x, y) of a random conic by solving the quadratic in rho1.
    fn conic_roots(
        q: (f64, f64, f64, f64, f64),
        rng: &mut StdRng,
        count: usize,
    ) -> Vec<(f64, f64)> {
        let (q20, q10, q02, q01, q00) = q;
        let mut out = Vec::new();
        let mut guard = 0;
        while out.len() < count && guard < 10_000 {
            guard += 1;
            let y = rng.gen_range(-2.0..2.0);
            let b0 = q02 * y * y + q01 * y + q00;
            let disc = q10 * q10 - 4.0 * q20 * b0;
            if disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            for x in [(-q10 + sq) / (2.0 * q20), (-q10 - sq) / (2.0 * q20)] {
                if x.abs() > 0.1 && x.abs() < 5.0 {
                    out.push((x, y));
                }
            }
        }
        out
    }

    #[test]
    fn powers_collapse_at_conic_roots() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..100 {
            let q = (
                rng.gen_range(0.3..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let red = QReduction::new(q.0, q.1, q.2, q.3, q.4, 1e-10).unwrap();
            for (x, y) in conic_roots(q, &mut rng, 6) {
                for h in 2..=5usize {
                    let lhs = x.powi(h as i32);
                    let rhs = red.beta(h).eval(y) * x + red.gamma(h).eval(y);
                    let tol = 1e-10 * x.abs().powi(h as i32).max(1e-6);
                    assert!(
                        (lhs - rhs).abs() < tol.max(1e-9 * (1.0 + rhs.abs())),
                        "h={h} lhs={lhs} rhs={rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn reduction_degree_growth() {
        // gamma_h deg <= 2(h-1), beta_h deg <= 2(h-2)
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..50 {
            let red = QReduction::new(
                rng.gen_range(0.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                1e-10,
            )
            .unwrap();
            for h in 2..=5usize {
                assert!(red.gamma(h).deg() <= 2 * (h - 1));
                assert!(red.beta(h).deg() <= 2 * h.saturating_sub(2));
            }
        }
    }

    #[test]
    fn linear_poly_reduces_unchanged() {
        let red = parabola();
        let p = BiPoly::monomial(1, 2, 3.0).add(&BiPoly::monomial(0, 1, -2.0));
        let (a1, a0) = red.reduce(&p).unwrap();
        assert_eq!(a1.coeffs(), &[0.0, 0.0, 3.0]);
        assert_eq!(a0.coeffs(), &[0.0, -2.0]);
    }

    #[test]
    fn conic_reduces_to_zero() {
        // p = q itself must reduce to (0, 0)
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..20 {
            let (q20, q10, q02, q01, q00) = (
                rng.gen_range(0.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let red = QReduction::new(q20, q10, q02, q01, q00, 1e-10).unwrap();
            let mut p = BiPoly::zero();
            p.set_coeff(2, 0, q20);
            p.set_coeff(1, 0, q10);
            p.set_coeff(0, 2, q02);
            p.set_coeff(0, 1, q01);
            p.set_coeff(0, 0, q00);
            let (a1, a0) = red.reduce(&p).unwrap();
            let scale = p.max_abs();
            assert!(a1.max_abs() <= 1e-12 * scale);
            assert!(a0.max_abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn reduction_agrees_at_sampled_roots() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..30 {
            let q = (
                rng.gen_range(0.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let red = QReduction::new(q.0, q.1, q.2, q.3, q.4, 1e-10).unwrap();
            // random p with deg_rho1 <= 5, total degree <= 5
            let mut p = BiPoly::zero();
            for i in 0..=5 {
                for j in 0..=(5 - i) {
                    p.set_coeff(i, j, rng.gen_range(-1.0..1.0));
                }
            }
            let (a1, a0) = red.reduce(&p).unwrap();
            let pnorm = p.max_abs();
            for (x, y) in conic_roots(q, &mut rng, 20) {
                let lhs = p.eval(x, y);
                let rhs = a1.eval(y) * x + a0.eval(y);
                let local = p.abs_eval(x, y).max(pnorm);
                assert!(
                    (lhs - rhs).abs() < 1e-9 * local,
                    "residual {:e} at ({x}, {y})",
                    (lhs - rhs).abs() / local
                );
            }
        }
    }
}
