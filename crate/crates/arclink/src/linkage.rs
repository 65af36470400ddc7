//! Construction and solution of the linkage polynomial system.
//!
//! Conservation of angular momentum between the two epochs is linear in the
//! range rates; projecting it onto D2 x (D1 x D2) and D1 x (D1 x D2) solves
//! for rhodot1, rhodot2 as quadratic polynomials, while the projection onto
//! D1 x D2 leaves the range conic q(rho1, rho2). The Laplace-Lenz/energy
//! combination contributes the vector polynomial xi = DeltaK x Deltar whose
//! line-of-sight projections p1, p2 have total degree 5. Reducing p1, p2
//! modulo q and eliminating rho1 yields two degree-10 univariate polynomials
//! u1, u2 in rho2 that share, after deflating one extraneous conic point
//! each, a common degree-9 root set: the candidate linkages.
//!
//! All polynomial work happens in ranges scaled by rho_scale =
//! max(|q1|, |q2|); results are re-scaled on output.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::attributable::Attributable;
use crate::bipoly::{
    aberth_roots, deflate, BiPoly, BiPolyVec3, DeflationInfo, QReduction, UniPoly,
};
use crate::config::LinkConfig;
use crate::error::{Error, Result};
use crate::geometry::{
    angmom_coeffs, los_frame, AngMomCoeffs, Epoch, LosFrame, ObserverState, Vec3,
};

/// Minimum ratio min(|q20|, |q02|) / max|q_ij| below which the elimination
/// is reported as ill-conditioned.
pub const CONIC_BALANCE_FLOOR: f64 = 1e-2;

/// Per-epoch geometric context: the line-of-sight frame plus observer state.
#[derive(Clone, Copy, Debug)]
pub struct EpochGeometry {
    pub frame: LosFrame,
    pub q: Vec3,
    pub qdot: Vec3,
    pub epoch: Epoch,
}

impl EpochGeometry {
    pub fn coeffs(&self) -> AngMomCoeffs {
        angmom_coeffs(
            &self.frame,
            &ObserverState {
                q: self.q,
                qdot: self.qdot,
                epoch: self.epoch,
            },
        )
    }
}

/// Build the epoch geometry from an attributable and its observer state.
pub fn epoch_geometry(att: &Attributable, obs: &ObserverState) -> Result<EpochGeometry> {
    let frame = los_frame(att.alpha, att.delta, att.alphadot, att.deltadot)?;
    Ok(EpochGeometry {
        frame,
        q: obs.q,
        qdot: obs.qdot,
        epoch: obs.epoch,
    })
}

/// The vectors entering the xi construction for one epoch, possibly rotated
/// (the J2 iteration applies R_L to the epoch-1 set).
#[derive(Clone, Copy, Debug)]
pub struct XiVectors {
    pub q: Vec3,
    pub qdot: Vec3,
    pub erho: Vec3,
    pub eperp: Vec3,
}

impl From<&EpochGeometry> for XiVectors {
    fn from(g: &EpochGeometry) -> Self {
        XiVectors {
            q: g.q,
            qdot: g.qdot,
            erho: g.frame.erho,
            eperp: g.frame.eperp,
        }
    }
}

impl XiVectors {
    pub fn rotated(&self, m: &Matrix3<f64>) -> XiVectors {
        XiVectors {
            q: m * self.q,
            qdot: m * self.qdot,
            erho: m * self.erho,
            eperp: m * self.eperp,
        }
    }
}

/// The extraneous points of the conic used by the deflation step.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriticalPoints {
    pub rho1_prime: f64,
    pub rho2_prime: f64,
    pub rho1_second: f64,
    pub rho2_second: f64,
}

/// Range conic q20 rho1^2 + q10 rho1 + q02 rho2^2 + q01 rho2 + q00 (no cross
/// term) plus, when the geometry admits them, its critical points.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConicQ {
    pub q20: f64,
    pub q10: f64,
    pub q02: f64,
    pub q01: f64,
    pub q00: f64,
    pub crit: Option<CriticalPoints>,
}

impl ConicQ {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.q20 * x * x + self.q10 * x + self.q02 * y * y + self.q01 * y + self.q00
    }

    pub fn abs_eval(&self, x: f64, y: f64) -> f64 {
        self.q20.abs() * x * x
            + self.q10.abs() * x.abs()
            + self.q02.abs() * y * y
            + self.q01.abs() * y.abs()
            + self.q00.abs()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.q20
            .abs()
            .max(self.q10.abs())
            .max(self.q02.abs())
            .max(self.q01.abs())
            .max(self.q00.abs())
    }

    pub fn as_bipoly(&self) -> BiPoly {
        let mut p = BiPoly::zero();
        p.set_coeff(2, 0, self.q20);
        p.set_coeff(1, 0, self.q10);
        p.set_coeff(0, 2, self.q02);
        p.set_coeff(0, 1, self.q01);
        p.set_coeff(0, 0, self.q00);
        p
    }

    pub fn reduction(&self, eps: f64) -> Result<QReduction> {
        QReduction::new(self.q20, self.q10, self.q02, self.q01, self.q00, eps)
    }
}

/// The range rates solved from angular-momentum conservation, as quadratic
/// polynomials in (rho1, rho2).
#[derive(Clone, Debug)]
pub struct RhoDotPolys {
    pub rhodot1: BiPoly,
    pub rhodot2: BiPoly,
}

/// Angular momentum as a vector polynomial in (rho1, rho2) once the range
/// rate substitution is applied. `epoch` selects which rho the quadratic
/// rides on.
pub fn angmom_poly(co: &AngMomCoeffs, rhodot: &BiPoly, epoch_index: usize) -> Result<BiPolyVec3> {
    let (i, j) = if epoch_index == 1 { (1, 0) } else { (0, 1) };
    let mut c = BiPolyVec3::monomial(0, 0, co.g);
    c = c.add(&BiPolyVec3::monomial(i, j, co.f));
    c = c.add(&BiPolyVec3::monomial(2 * i, 2 * j, co.e));
    let d_term = BiPolyVec3::monomial(0, 0, co.d).scale_poly(rhodot)?;
    Ok(c.add(&d_term))
}

/// Build the conic and the range-rate substitution from the two coefficient
/// sets. Critical points are not filled in here.
pub fn build_q_from_coeffs(
    co1: &AngMomCoeffs,
    co2: &AngMomCoeffs,
    eps_deg: f64,
) -> Result<(ConicQ, RhoDotPolys)> {
    let d1xd2 = co1.d.cross(&co2.d);
    let gate = eps_deg * co1.d.norm() * co2.d.norm();
    if d1xd2.norm() <= gate {
        return Err(Error::Degenerate(format!(
            "D1 x D2 = {:.3e} below threshold {:.3e}",
            d1xd2.norm(),
            gate
        )));
    }
    let n2 = d1xd2.norm_squared();

    // J = E2 rho2^2 + F2 rho2 + (G2 - G1) - E1 rho1^2 - F1 rho1
    let j_poly = BiPolyVec3::monomial(2, 0, -co1.e)
        .add(&BiPolyVec3::monomial(1, 0, -co1.f))
        .add(&BiPolyVec3::monomial(0, 2, co2.e))
        .add(&BiPolyVec3::monomial(0, 1, co2.f))
        .add(&BiPolyVec3::monomial(0, 0, co2.g - co1.g));

    let rhodot1 = j_poly.dot_vec(&co2.d.cross(&d1xd2)).scale(1.0 / n2);
    let rhodot2 = j_poly.dot_vec(&co1.d.cross(&d1xd2)).scale(1.0 / n2);

    let qp = j_poly.dot_vec(&d1xd2);
    let conic = ConicQ {
        q20: qp.coeff(2, 0),
        q10: qp.coeff(1, 0),
        q02: qp.coeff(0, 2),
        q01: qp.coeff(0, 1),
        q00: qp.coeff(0, 0),
        crit: None,
    };
    Ok((conic, RhoDotPolys { rhodot1, rhodot2 }))
}

/// The conic critical points from the closed forms; None when a denominator
/// is below the degeneracy threshold.
pub fn critical_points(
    g1: &EpochGeometry,
    g2: &EpochGeometry,
    eps_deg: f64,
) -> Option<CriticalPoints> {
    let e1 = &g1.frame;
    let e2 = &g2.frame;
    let den1s = e1.erho.cross(&e1.eperp).dot(&g1.q);
    let den2s = e2.erho.cross(&e2.eperp).dot(&g2.q);
    let e1xe2 = e1.erho.cross(&e2.erho);
    let den1p = e1xe2.dot(&g2.q);
    let den2p = e1xe2.dot(&g1.q);
    let gate1s = eps_deg * e1.eperp.norm() * g1.q.norm();
    let gate2s = eps_deg * e2.eperp.norm() * g2.q.norm();
    let gate1p = eps_deg * g2.q.norm();
    let gate2p = eps_deg * g1.q.norm();
    if den1s.abs() <= gate1s
        || den2s.abs() <= gate2s
        || den1p.abs() <= gate1p
        || den2p.abs() <= gate2p
    {
        return None;
    }
    Some(CriticalPoints {
        rho1_second: g1.q.cross(&g1.qdot).dot(&e1.erho) / den1s,
        rho2_second: g2.q.cross(&g2.qdot).dot(&e2.erho) / den2s,
        rho1_prime: g1.q.cross(&g2.q).dot(&e2.erho) / den1p,
        rho2_prime: g1.q.cross(&g2.q).dot(&e1.erho) / den2p,
    })
}

/// Build the conic, the range-rate substitution and the critical points from
/// the two epoch geometries.
pub fn build_q(
    g1: &EpochGeometry,
    g2: &EpochGeometry,
    eps_deg: f64,
) -> Result<(ConicQ, RhoDotPolys)> {
    let (mut conic, rhodots) = build_q_from_coeffs(&g1.coeffs(), &g2.coeffs(), eps_deg)?;
    conic.crit = critical_points(g1, g2, eps_deg);
    Ok((conic, rhodots))
}

/// xi = DeltaK x Deltar and its projections onto the two given directions,
/// from (possibly rotated) per-epoch vectors with the range rates already
/// eliminated.
///
/// The total-degree-6 part of xi is parallel to proj1 x proj2 by
/// construction, so both projections must come out with total degree 5;
/// a violation beyond rounding signals corrupted inputs.
pub fn build_xi_projected(
    x1: &XiVectors,
    x2: &XiVectors,
    rhodots: &RhoDotPolys,
    proj1: &Vec3,
    proj2: &Vec3,
) -> Result<(BiPolyVec3, BiPoly, BiPoly)> {
    let r1 = BiPolyVec3::monomial(0, 0, x1.q).add(&BiPolyVec3::monomial(1, 0, x1.erho));
    let r2 = BiPolyVec3::monomial(0, 0, x2.q).add(&BiPolyVec3::monomial(0, 1, x2.erho));
    let rdot1 = BiPolyVec3::monomial(0, 0, x1.qdot)
        .add(&BiPolyVec3::monomial(0, 0, x1.erho).scale_poly(&rhodots.rhodot1)?)
        .add(&BiPolyVec3::monomial(1, 0, x1.eperp));
    let rdot2 = BiPolyVec3::monomial(0, 0, x2.qdot)
        .add(&BiPolyVec3::monomial(0, 0, x2.erho).scale_poly(&rhodots.rhodot2)?)
        .add(&BiPolyVec3::monomial(0, 1, x2.eperp));

    let v1sq = rdot1.dot(&rdot1)?;
    let v2sq = rdot2.dot(&rdot2)?;
    let rv1 = rdot1.dot(&r1)?;
    let rv2 = rdot2.dot(&r2)?;
    let dr = r1.sub(&r2);

    let term1 = r1.cross(&r2)?.scale_poly(&v2sq.sub(&v1sq).scale(0.5))?;
    let term2 = rdot1.cross(&dr)?.scale_poly(&rv1)?;
    let term3 = rdot2.cross(&dr)?.scale_poly(&rv2)?;
    let xi = term1.sub(&term2).add(&term3);

    let scale = xi.max_abs();
    let mut p1 = xi.dot_vec(proj1);
    let mut p2 = xi.dot_vec(proj2);
    clean_projection(&mut p1, true, scale)?;
    clean_projection(&mut p2, false, scale)?;
    Ok((xi, p1, p2))
}

/// Zero the structurally-vanishing cells of a projection (total degree 6,
/// and the rho1^5 cell of p1), failing if they exceed rounding size.
fn clean_projection(p: &mut BiPoly, is_p1: bool, scale: f64) -> Result<()> {
    let tol = 1e-8 * scale.max(1e-300);
    let mut cells: Vec<(usize, usize)> = (0..=6).map(|i| (i, 6 - i)).collect();
    if is_p1 {
        cells.push((5, 0));
    }
    for (i, j) in cells {
        let v = p.coeff(i, j);
        if v.abs() > tol {
            return Err(Error::Algebra(format!(
                "projection coefficient ({i},{j}) = {v:.3e} exceeds structural-zero tolerance \
                 {tol:.3e}; genericity violated"
            )));
        }
        p.set_coeff(i, j, 0.0);
    }
    Ok(())
}

/// Standard (unrotated) xi construction from the two epoch geometries.
pub fn build_xi_p1_p2(
    g1: &EpochGeometry,
    g2: &EpochGeometry,
    rhodots: &RhoDotPolys,
) -> Result<(BiPolyVec3, BiPoly, BiPoly)> {
    build_xi_projected(
        &XiVectors::from(g1),
        &XiVectors::from(g2),
        rhodots,
        &g1.frame.erho,
        &g2.frame.erho,
    )
}

/// Intermediate univariate polynomials of the elimination.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub a11: UniPoly,
    pub a10: UniPoly,
    pub a21: UniPoly,
    pub a20: UniPoly,
    pub u1: UniPoly,
    pub u2: UniPoly,
    pub u1_tilde: UniPoly,
    pub u2_tilde: UniPoly,
    pub defl1: DeflationInfo,
    pub defl2: DeflationInfo,
}

/// Reduce p1, p2 modulo q and eliminate rho1.
///
/// u1 = q20^3 v1 and u2 = q20^4 v2 where v_j substitutes
/// rho1 = -a_{j,0}/a_{j,1} into q; u_j equals res(p_j, q, rho1). The
/// extraneous roots rho2' (for u1) and rho2'' (for u2) are deflated.
pub fn eliminate(p1: &BiPoly, p2: &BiPoly, q: &ConicQ, cfg: &LinkConfig) -> Result<Elimination> {
    let red = q.reduction(cfg.eps_deg)?;
    let (a11, a10) = red.reduce(p1)?;
    let (a21, a20) = red.reduce(p2)?;
    let b0 = UniPoly::from_coeffs(vec![q.q00, q.q01, q.q02]);

    let v1 = a10
        .mul(&a10)
        .scale(q.q20)
        .sub(&a10.mul(&a11).scale(q.q10))
        .add(&b0.mul(&a11.mul(&a11)));
    let v2 = a20
        .mul(&a20)
        .scale(q.q20)
        .sub(&a20.mul(&a21).scale(q.q10))
        .add(&b0.mul(&a21.mul(&a21)));

    let q20_3 = q.q20 * q.q20 * q.q20;
    let u1 = v1.scale(q20_3);
    let u2 = v2.scale(q20_3 * q.q20);

    let crit = q.crit.ok_or_else(|| {
        Error::Degenerate("critical points undefined; cannot deflate extraneous roots".into())
    })?;
    let (u1_tilde, defl1) = deflate(&u1, crit.rho2_prime, cfg.tau_defl);
    let (u2_tilde, defl2) = deflate(&u2, crit.rho2_second, cfg.tau_defl);
    for (label, info) in [("u1", &defl1), ("u2", &defl2)] {
        if info.rel_remainder > cfg.tau_defl_escalate {
            return Err(Error::Degenerate(format!(
                "deflation remainder of {label} is {:.3e}; geometry near-degenerate",
                info.rel_remainder
            )));
        }
    }
    Ok(Elimination {
        a11,
        a10,
        a21,
        a20,
        u1,
        u2,
        u1_tilde,
        u2_tilde,
        defl1,
        defl2,
    })
}

/// Everything the linkage constructed for one pair, in scaled range units.
#[derive(Clone, Debug)]
pub struct LinkagePolys {
    pub q: ConicQ,
    pub rhodots: RhoDotPolys,
    pub xi: BiPolyVec3,
    pub p1: BiPoly,
    pub p2: BiPoly,
    pub elim: Elimination,
}

/// One checked non-degeneracy condition with its magnitude and threshold.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub magnitude: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// The five condition groups of the construction, evaluated with scaled
/// thresholds. A report, not a gate.
#[derive(Clone, Debug, Serialize, Default)]
pub struct NonDegeneracyReport {
    pub items: Vec<ConditionCheck>,
}

impl NonDegeneracyReport {
    fn push(&mut self, name: &str, magnitude: f64, threshold: f64) {
        self.items.push(ConditionCheck {
            name: name.to_string(),
            magnitude,
            threshold,
            pass: magnitude > threshold,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&ConditionCheck> {
        self.items.iter().filter(|c| !c.pass).collect()
    }
}

/// Evaluate all five non-degeneracy condition groups.
pub fn nondegeneracy_report(
    g1: &EpochGeometry,
    g2: &EpochGeometry,
    polys: &LinkagePolys,
    eps_deg: f64,
) -> NonDegeneracyReport {
    let mut rep = NonDegeneracyReport::default();
    let co1 = g1.coeffs();
    let co2 = g2.coeffs();
    let d1xd2 = co1.d.cross(&co2.d);

    // group 1: q is a genuine quadratic in both variables
    rep.push(
        "E1.(D1xD2)",
        co1.e.dot(&d1xd2).abs(),
        eps_deg * co1.e.norm() * d1xd2.norm(),
    );
    rep.push(
        "E2.(D1xD2)",
        co2.e.dot(&d1xd2).abs(),
        eps_deg * co2.e.norm() * d1xd2.norm(),
    );
    rep.push(
        "|D1xD2|",
        d1xd2.norm(),
        eps_deg * co1.d.norm() * co2.d.norm(),
    );
    let e1 = &g1.frame;
    let e2 = &g2.frame;
    rep.push(
        "erho1 x eperp1 . q1",
        e1.erho.cross(&e1.eperp).dot(&g1.q).abs(),
        eps_deg * e1.eperp.norm() * g1.q.norm(),
    );
    rep.push(
        "erho2 x eperp2 . q2",
        e2.erho.cross(&e2.eperp).dot(&g2.q).abs(),
        eps_deg * e2.eperp.norm() * g2.q.norm(),
    );
    let e1xe2 = e1.erho.cross(&e2.erho);
    rep.push(
        "erho1 x erho2 . q1",
        e1xe2.dot(&g1.q).abs(),
        eps_deg * g1.q.norm(),
    );
    rep.push(
        "erho1 x erho2 . q2",
        e1xe2.dot(&g2.q).abs(),
        eps_deg * g2.q.norm(),
    );
    // conditioning side of condition 1: the reduction divides by q20, so a
    // leading coefficient that is relatively tiny makes the elimination
    // numerically meaningless well before it is analytically degenerate
    rep.push(
        "conic coefficient balance",
        polys.q.q20.abs().min(polys.q.q02.abs()) / polys.q.max_abs_coeff().max(1e-300),
        CONIC_BALANCE_FLOOR,
    );

    // group 2: the critical points exist, are distinct and nonzero
    rep.push(
        "|q1 x q2|",
        g1.q.cross(&g2.q).norm(),
        eps_deg * g1.q.norm() * g2.q.norm(),
    );
    match polys.q.crit {
        Some(c) => {
            let scale1 = c.rho1_prime.abs().max(c.rho1_second.abs()).max(1.0);
            let scale2 = c.rho2_prime.abs().max(c.rho2_second.abs()).max(1.0);
            rep.push(
                "rho1' - rho1''",
                (c.rho1_prime - c.rho1_second).abs(),
                eps_deg * scale1,
            );
            rep.push(
                "rho2' - rho2''",
                (c.rho2_prime - c.rho2_second).abs(),
                eps_deg * scale2,
            );
            rep.push("rho1''", c.rho1_second.abs(), eps_deg);
            rep.push("rho2''", c.rho2_second.abs(), eps_deg);
        }
        None => {
            rep.push("critical points defined", 0.0, eps_deg);
        }
    }

    // group 3: rdot_j never vanishes
    rep.push(
        "erho1 x eperp1 . qdot1",
        e1.erho.cross(&e1.eperp).dot(&g1.qdot).abs(),
        eps_deg * e1.eperp.norm() * g1.qdot.norm(),
    );
    rep.push(
        "erho2 x eperp2 . qdot2",
        e2.erho.cross(&e2.eperp).dot(&g2.qdot).abs(),
        eps_deg * e2.eperp.norm() * g2.qdot.norm(),
    );

    // group 4: {erho1, erho2, Deltar} spans R^3
    let dq = g1.q - g2.q;
    rep.push(
        "Deltaq . erho1 x erho2",
        dq.dot(&e1xe2).abs(),
        eps_deg * dq.norm().max(eps_deg),
    );

    // group 5: the extraneous points are not common solutions
    if let Some(c) = polys.q.crit {
        let p2_pt = (c.rho1_prime, c.rho2_second);
        let p1_pt = (c.rho1_second, c.rho2_prime);
        rep.push(
            "p1(P2)",
            polys.p1.eval(p2_pt.0, p2_pt.1).abs(),
            eps_deg * polys.p1.abs_eval(p2_pt.0, p2_pt.1),
        );
        rep.push(
            "p2(P1)",
            polys.p2.eval(p1_pt.0, p1_pt.1).abs(),
            eps_deg * polys.p2.abs_eval(p1_pt.0, p1_pt.1),
        );
    }
    rep
}

/// Gauss-Newton refinement of a candidate on the bivariate system
/// q = p1 = p2 = 0 (3 equations, 2 unknowns). The univariate elimination can
/// lose digits when the conic is poorly balanced; q, p1, p2 themselves are
/// built without that amplification, so a few least-squares Newton steps
/// restore full accuracy. Returns the input point when the iteration does
/// not improve.
fn polish_candidate(polys: &LinkagePolys, x0: f64, y0: f64) -> (f64, f64) {
    let q = polys.q.as_bipoly();
    let residual_norm = |x: f64, y: f64| -> f64 {
        let rq = q.eval(x, y) / q.abs_eval(x, y).max(1e-300);
        let r1 = polys.p1.eval(x, y) / polys.p1.abs_eval(x, y).max(1e-300);
        let r2 = polys.p2.eval(x, y) / polys.p2.abs_eval(x, y).max(1e-300);
        (rq * rq + r1 * r1 + r2 * r2).sqrt()
    };
    let (mut x, mut y) = (x0, y0);
    let mut best = (x, y, residual_norm(x, y));
    let qx = q.d_rho1();
    let qy = q.d_rho2();
    let p1x = polys.p1.d_rho1();
    let p1y = polys.p1.d_rho2();
    let p2x = polys.p2.d_rho1();
    let p2y = polys.p2.d_rho2();
    for _ in 0..6 {
        let r = nalgebra::Vector3::new(q.eval(x, y), polys.p1.eval(x, y), polys.p2.eval(x, y));
        let j = nalgebra::Matrix3x2::new(
            qx.eval(x, y),
            qy.eval(x, y),
            p1x.eval(x, y),
            p1y.eval(x, y),
            p2x.eval(x, y),
            p2y.eval(x, y),
        );
        let jtj = j.transpose() * j;
        let rhs = j.transpose() * r;
        let step = match jtj.try_inverse() {
            Some(inv) => inv * rhs,
            None => break,
        };
        if !step[0].is_finite() || !step[1].is_finite() {
            break;
        }
        // stay local: the candidate is already near a root
        if step.norm() > 0.1 * (1.0 + x.abs().max(y.abs())) {
            break;
        }
        x -= step[0];
        y -= step[1];
        let res = residual_norm(x, y);
        if res < best.2 {
            best = (x, y, res);
        }
        if step.norm() < 1e-15 * (1.0 + x.abs().max(y.abs())) {
            break;
        }
    }
    (best.0, best.1)
}

/// One root of u1~ with its cross-validation diagnostics (ranges unscaled).
#[derive(Clone, Debug, Serialize)]
pub struct RootRecord {
    pub rho2_re: f64,
    pub rho2_im: f64,
    /// |u1~(z)| relative to its coefficient scale.
    pub u1_residual: f64,
    /// |u2~(z)| / (||u2~|| max(1,|z|)^deg), the cross-validation metric.
    pub u2_residual: f64,
    pub cross_validated: bool,
    pub is_real: bool,
    /// Materially complex but within the snapping tolerance.
    pub snapped_imag: bool,
    pub accepted: bool,
    pub reject_reason: Option<&'static str>,
}

/// A real candidate linkage (unscaled units) with scaled residuals of the
/// defining equations.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RawSolution {
    pub rho1: f64,
    pub rho2: f64,
    pub rhodot1: f64,
    pub rhodot2: f64,
    pub residual_q: f64,
    pub residual_p1: f64,
    pub residual_p2: f64,
    /// Index into the root list this solution came from.
    pub root_index: usize,
    /// The root was materially complex and snapped to the real axis.
    pub snapped_imag: bool,
}

/// Full output of one linkage solve.
#[derive(Clone, Debug)]
pub struct LinkageOutcome {
    /// Length scale used internally; polynomials live in rho/rho_scale.
    pub rho_scale: f64,
    pub polys: LinkagePolys,
    pub nondegeneracy: NonDegeneracyReport,
    pub roots: Vec<RootRecord>,
    pub solutions: Vec<RawSolution>,
    pub root_iterations: usize,
    /// True when the mirrored (rho2-)elimination ran and outputs were swapped back.
    pub swapped: bool,
}

fn scaled_geometry(
    att: &Attributable,
    obs: &ObserverState,
    rho_scale: f64,
) -> Result<EpochGeometry> {
    let scaled = ObserverState {
        q: obs.q / rho_scale,
        qdot: obs.qdot / rho_scale,
        epoch: obs.epoch,
    };
    epoch_geometry(att, &scaled)
}

/// Solve the linkage system for a pair of attributables.
///
/// Returns at most 9 real candidate solutions plus the diagnostics of every
/// root; an empty solution list with all roots rejected is a valid outcome,
/// not an error.
pub fn solve_linkage(
    a1: &Attributable,
    a2: &Attributable,
    o1: &ObserverState,
    o2: &ObserverState,
    cfg: &LinkConfig,
) -> Result<LinkageOutcome> {
    if !cfg.eliminate_rho1 {
        // mirrored path: swap the epochs, run the standard elimination,
        // swap the solution components back
        let mut mirrored = cfg.clone();
        mirrored.eliminate_rho1 = true;
        let out = solve_linkage(a2, a1, o2, o1, &mirrored)?;
        let solutions = out
            .solutions
            .iter()
            .map(|s| RawSolution {
                rho1: s.rho2,
                rho2: s.rho1,
                rhodot1: s.rhodot2,
                rhodot2: s.rhodot1,
                residual_q: s.residual_q,
                residual_p1: s.residual_p2,
                residual_p2: s.residual_p1,
                root_index: s.root_index,
                snapped_imag: s.snapped_imag,
            })
            .collect();
        return Ok(LinkageOutcome {
            swapped: true,
            solutions,
            ..out
        });
    }

    if (a1.epoch.mjd - a2.epoch.mjd).abs() == 0.0 {
        return Err(Error::InvalidInput("the two mean epochs coincide".into()));
    }

    let rho_scale = o1.q.norm().max(o2.q.norm());
    if rho_scale == 0.0 {
        return Err(Error::InvalidInput("observer at the origin".into()));
    }
    let g1 = scaled_geometry(a1, o1, rho_scale)?;
    let g2 = scaled_geometry(a2, o2, rho_scale)?;

    let (conic, rhodots) = build_q(&g1, &g2, cfg.eps_deg)?;
    let (xi, p1, p2) = build_xi_p1_p2(&g1, &g2, &rhodots)?;
    let elim = eliminate(&p1, &p2, &conic, cfg)?;
    let polys = LinkagePolys {
        q: conic,
        rhodots,
        xi,
        p1,
        p2,
        elim,
    };
    let nondegeneracy = nondegeneracy_report(&g1, &g2, &polys, cfg.eps_deg);

    let set = aberth_roots(&polys.elim.u1_tilde, cfg.root_max_iter)?;
    if !set.converged {
        let worst = set.residuals.iter().cloned().fold(0.0_f64, f64::max);
        return Err(Error::RootFinder {
            iterations: set.iterations,
            residual: worst,
        });
    }

    let u1t = &polys.elim.u1_tilde;
    let u2t = &polys.elim.u2_tilde;
    let u1_scale = u1t.max_abs().max(1e-300);
    let u2_scale = u2t.max_abs().max(1e-300);
    let deg2 = u2t.deg() as i32;

    let mut roots = Vec::with_capacity(set.roots.len());
    let mut solutions = Vec::new();
    for (idx, (&z, &res1)) in set.roots.iter().zip(&set.residuals).enumerate() {
        let growth = z.norm().max(1.0).powi(deg2);
        let rel2 = u2t.eval_complex(z).norm() / (u2_scale * growth);
        let cross_ok = rel2 <= cfg.tau_x;
        let is_real = z.im.abs() < cfg.im_tol * (1.0 + z.re.abs());
        let snapped = is_real && z.im.abs() > 1e-12 * (1.0 + z.re.abs());

        let mut accepted = false;
        let mut reason = None;
        if !cross_ok {
            reason = Some("cross-validation");
        } else if !is_real {
            reason = Some("complex");
        } else {
            let y = z.re;
            let d1 = polys.elim.a11.eval(y);
            let d2 = polys.elim.a21.eval(y);
            let dscale = polys
                .elim
                .a11
                .max_abs()
                .max(polys.elim.a21.max_abs())
                .max(1e-300);
            if d1.abs().max(d2.abs()) <= 1e-12 * dscale {
                reason = Some("vanishing back-substitution denominators");
            } else {
                let x = if d1.abs() >= d2.abs() {
                    -polys.elim.a10.eval(y) / d1
                } else {
                    -polys.elim.a20.eval(y) / d2
                };
                let (x, y) = polish_candidate(&polys, x, y);
                let rd1 = polys.rhodots.rhodot1.eval(x, y);
                let rd2 = polys.rhodots.rhodot2.eval(x, y);
                let rq = polys.q.eval(x, y).abs() / polys.q.abs_eval(x, y).max(1e-300);
                let rp1 = polys.p1.eval(x, y).abs() / polys.p1.abs_eval(x, y).max(1e-300);
                let rp2 = polys.p2.eval(x, y).abs() / polys.p2.abs_eval(x, y).max(1e-300);
                solutions.push(RawSolution {
                    rho1: x * rho_scale,
                    rho2: y * rho_scale,
                    rhodot1: rd1 * rho_scale,
                    rhodot2: rd2 * rho_scale,
                    residual_q: rq,
                    residual_p1: rp1,
                    residual_p2: rp2,
                    root_index: idx,
                    snapped_imag: snapped,
                });
                accepted = true;
            }
        }
        roots.push(RootRecord {
            rho2_re: z.re * rho_scale,
            rho2_im: z.im * rho_scale,
            u1_residual: res1 / (u1_scale * z.norm().max(1.0).powi(u1t.deg() as i32)),
            u2_residual: rel2,
            cross_validated: cross_ok,
            is_real,
            snapped_imag: snapped,
            accepted,
            reject_reason: reason,
        });
    }

    Ok(LinkageOutcome {
        rho_scale,
        polys,
        nondegeneracy,
        roots,
        solutions,
        root_iterations: set.iterations,
        swapped: false,
    })
}

/// Evaluate u2~ at a scaled complex candidate (diagnostic helper).
pub fn cross_validation_residual(out: &LinkageOutcome, rho2_unscaled: Complex64) -> f64 {
    let u2t = &out.polys.elim.u2_tilde;
    let z = rho2_unscaled / out.rho_scale;
    let growth = z.norm().max(1.0).powi(u2t.deg() as i32);
    u2t.eval_complex(z).norm() / (u2t.max_abs().max(1e-300) * growth)
}
