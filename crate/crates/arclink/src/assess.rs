//! Selection and vetting of raw linkage solutions: physical filtering,
//! spurious-solution classification, Keplerian conversion, covariance
//! propagation through the implicit solution map, and a Mahalanobis
//! compatibility penalty.
//!
//! The penalty is a ranking criterion only: it propagates the epoch-1 state
//! to the second epoch, predicts the attributable there with a linearized
//! covariance, and measures the whitened prediction error. It deliberately
//! does not reproduce the chi4 attribution statistic of other pipelines;
//! reports label it `penalty_mahalanobis`.

use nalgebra::{Matrix3, Matrix4, SMatrix, Vector4};
use serde::Serialize;

use crate::attributable::Attributable;
use crate::config::LinkConfig;
use crate::error::{Error, Result};
use crate::geometry::{eval_state, integrals, los_frame, radec_view, ObserverState, State6, Vec3};
use crate::kepler::{cartesian_to_keplerian, propagate_universal, KeplerianElements};
use crate::linkage::{epoch_geometry, EpochGeometry, LinkageOutcome, RawSolution};

pub type Matrix6 = SMatrix<f64, 6, 6>;

/// Why a solution was kept or discarded.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SolutionFlags {
    pub negative_range: bool,
    pub out_of_range: bool,
    pub unbounded: bool,
    /// Violates the intermediate-system scalar identity (not a solution of
    /// the Lenz/energy subsystem).
    pub spurious_intersys: bool,
    /// Satisfies |L1 - L2| = 2: solves the intermediate system but not the
    /// full one.
    pub spurious_fullsys: bool,
    /// |Deltar| ~ 0, spurious metrics meaningless.
    pub spurious_indeterminate: bool,
    pub snapped_imag: bool,
    pub covariance_unavailable: bool,
    pub propagation_failed: bool,
}

impl SolutionFlags {
    /// No flag that would disqualify the solution as a preliminary orbit.
    pub fn physical(&self) -> bool {
        !(self.negative_range
            || self.out_of_range
            || self.unbounded
            || self.spurious_intersys
            || self.spurious_fullsys)
    }
}

/// Diagnostics of the two spurious-solution characterizations.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SpuriousMetrics {
    /// [DeltaK . Deltar + (|v1|^2/2 - mu/|r1|) |Deltar|^2] / (mu |Deltar|^2 / |r1|)
    pub residual_intersys: f64,
    /// |L1 - L2|
    pub lenz_diff: f64,
    /// | |L1 - L2| - 2 |
    pub lenz_gap: f64,
}

/// Covariance propagation products (epoch-1 Cartesian covariance and the
/// Jacobians it came from).
#[derive(Clone, Debug)]
pub struct CovariancePack {
    pub gamma_a: SMatrix<f64, 8, 8>,
    pub dphi_dr: Matrix4<f64>,
    pub dphi_da: SMatrix<f64, 4, 8>,
    pub decar1_da: SMatrix<f64, 6, 8>,
    pub gamma_car1: Matrix6,
}

/// A vetted linkage solution.
#[derive(Clone, Debug)]
pub struct LinkageSolution {
    pub raw: RawSolution,
    pub state1: State6,
    pub state2: State6,
    pub energy1: f64,
    pub energy2: f64,
    /// ||c1 - c2|| / ||c1||
    pub angmom_gap: f64,
    pub kepler1: Option<KeplerianElements>,
    pub kepler2: Option<KeplerianElements>,
    pub spurious: SpuriousMetrics,
    pub flags: SolutionFlags,
    pub covariance: Option<CovariancePack>,
    /// Mahalanobis compatibility penalty (None when preconditions failed).
    pub penalty: Option<f64>,
    pub accepted: bool,
}

/// Evaluate both Cartesian states of a raw solution.
pub fn states_from_raw(
    a1: &Attributable,
    a2: &Attributable,
    o1: &ObserverState,
    o2: &ObserverState,
    raw: &RawSolution,
) -> Result<(State6, State6)> {
    let g1 = epoch_geometry(a1, o1)?;
    let g2 = epoch_geometry(a2, o2)?;
    Ok((
        eval_state(&g1.frame, o1, raw.rho1, raw.rhodot1),
        eval_state(&g2.frame, o2, raw.rho2, raw.rhodot2),
    ))
}

/// Range/energy gates. Complex-snapped roots keep their flag from the solve.
pub fn physical_filter(
    raw: &RawSolution,
    energy1: f64,
    energy2: f64,
    cfg: &LinkConfig,
) -> SolutionFlags {
    SolutionFlags {
        negative_range: raw.rho1 <= 0.0 || raw.rho2 <= 0.0,
        out_of_range: raw.rho1 < cfg.rho_min
            || raw.rho1 > cfg.rho_max
            || raw.rho2 < cfg.rho_min
            || raw.rho2 > cfg.rho_max,
        unbounded: energy1 >= 0.0 || energy2 >= 0.0,
        snapped_imag: raw.snapped_imag,
        ..Default::default()
    }
}

/// The two spurious-solution tests of the reduced system.
pub fn spurious_check(
    state1: &State6,
    state2: &State6,
    mu: f64,
    cfg: &LinkConfig,
) -> (SpuriousMetrics, SolutionFlags) {
    let mut flags = SolutionFlags::default();
    let dr = state1.r - state2.r;
    let drn2 = dr.norm_squared();
    let scale = state1.r.norm().max(state2.r.norm());
    if drn2.sqrt() < 1e-12 * scale.max(1e-300) {
        flags.spurious_indeterminate = true;
        return (SpuriousMetrics::default(), flags);
    }
    let i1 = match integrals(state1, mu) {
        Ok(v) => v,
        Err(_) => {
            flags.spurious_indeterminate = true;
            return (SpuriousMetrics::default(), flags);
        }
    };
    let i2 = match integrals(state2, mu) {
        Ok(v) => v,
        Err(_) => {
            flags.spurious_indeterminate = true;
            return (SpuriousMetrics::default(), flags);
        }
    };
    let dk = i1.kappa - i2.kappa;
    let r1n = state1.r.norm();
    let raw_residual = dk.dot(&dr) + (0.5 * state1.rdot.norm_squared() - mu / r1n) * drn2;
    let residual_intersys = raw_residual / (mu * drn2 / r1n);
    let lenz_diff = (i1.lenz - i2.lenz).norm();
    let lenz_gap = (lenz_diff - 2.0).abs();
    flags.spurious_intersys = residual_intersys.abs() > cfg.tau_sp;
    flags.spurious_fullsys = lenz_gap < cfg.tau_l2;
    (
        SpuriousMetrics {
            residual_intersys,
            lenz_diff,
            lenz_gap,
        },
        flags,
    )
}

fn hat(u: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -u.z, u.y, u.z, 0.0, -u.x, -u.y, u.x, 0.0)
}

/// Gradients of p1* = DeltaK x Deltar . v1 (v1 = r1 - q1) with respect to
/// the four Cartesian blocks, in closed form.
pub fn p1_star_gradients(
    r1: &Vec3,
    v1dot: &Vec3,
    r2: &Vec3,
    v2dot: &Vec3,
    q1: &Vec3,
) -> (Vec3, Vec3, Vec3, Vec3) {
    let v1 = r1 - q1;
    let dr = r1 - r2;
    let dv2 = 0.5 * (v2dot.norm_squared() - v1dot.norm_squared());
    let rv1 = v1dot.dot(r1);
    let rv2 = v2dot.dot(r2);

    let d_r1 = q1.cross(r2) * dv2
        - v1dot * (v1dot.cross(&dr).dot(&v1))
        - (-q1.cross(v1dot) + r2.cross(v1dot)) * rv1
        + (-q1.cross(v2dot) + r2.cross(v2dot)) * rv2;

    let d_v1 =
        -v1dot * (r1.cross(r2).dot(&v1)) - r1 * (v1dot.cross(&dr).dot(&v1)) - dr.cross(&v1) * rv1;

    let d_r2 = -q1.cross(r1) * dv2 - v1dot.cross(&v1) * rv1
        + v2dot * (v2dot.cross(&dr).dot(&v1))
        + v2dot.cross(&v1) * rv2;

    let d_v2 =
        v2dot * (r1.cross(r2).dot(&v1)) + r2 * (v2dot.cross(&dr).dot(&v1)) + dr.cross(&v1) * rv2;

    (d_r1, d_v1, d_r2, d_v2)
}

/// p1* itself (used by the finite-difference cross-checks).
pub fn p1_star(r1: &Vec3, v1dot: &Vec3, r2: &Vec3, v2dot: &Vec3, q1: &Vec3) -> f64 {
    let v1 = r1 - q1;
    let dr = r1 - r2;
    let k1 = r1 * (0.5 * v1dot.norm_squared()) - v1dot * v1dot.dot(r1);
    let k2 = r2 * (0.5 * v2dot.norm_squared()) - v2dot * v2dot.dot(r2);
    (k1 - k2).cross(&dr).dot(&v1)
}

/// The implicit map Phi(R, A) = (c1 - c2, DeltaK x Deltar . erho1).
fn phi_map(
    r_vec: &Vector4<f64>,
    a1v: &Vector4<f64>,
    a2v: &Vector4<f64>,
    o1: &ObserverState,
    o2: &ObserverState,
) -> Result<Vector4<f64>> {
    let f1 = los_frame(a1v[0], a1v[1], a1v[2], a1v[3])?;
    let f2 = los_frame(a2v[0], a2v[1], a2v[2], a2v[3])?;
    let st1 = eval_state(&f1, o1, r_vec[0], r_vec[1]);
    let st2 = eval_state(&f2, o2, r_vec[2], r_vec[3]);
    let c1 = st1.r.cross(&st1.rdot);
    let c2 = st2.r.cross(&st2.rdot);
    let k1 = st1.r * (0.5 * st1.rdot.norm_squared()) - st1.rdot * st1.rdot.dot(&st1.r);
    let k2 = st2.r * (0.5 * st2.rdot.norm_squared()) - st2.rdot * st2.rdot.dot(&st2.r);
    let xi = (k1 - k2).cross(&(st1.r - st2.r));
    let dc = c1 - c2;
    Ok(Vector4::new(dc.x, dc.y, dc.z, xi.dot(&f1.erho)))
}

fn attributable_vec(a: &Attributable) -> Vector4<f64> {
    Vector4::new(a.alpha, a.delta, a.alphadot, a.deltadot)
}

/// Analytic partial derivatives of (r1, rdot1) with respect to the epoch-1
/// attributable, holding (rho1, rhodot1) fixed.
fn decar1_datt_fixed_r(g1: &EpochGeometry, rho1: f64, rhodot1: f64) -> SMatrix<f64, 6, 4> {
    let f = &g1.frame;
    let (sd, cd) = (f.erho.z, (1.0 - f.erho.z * f.erho.z).sqrt());
    // erho.z = sin(delta); cd = cos(delta) > 0 away from the poles
    let de_rho_da = f.ealpha * cd;
    let de_rho_dd = f.edelta;
    // d(ealpha)/dalpha = -(cd * erho - sd * edelta); d(edelta)/dalpha = -sd * ealpha
    let dealpha_da = -(f.erho * cd - f.edelta * sd);
    let dedelta_da = f.ealpha * (-sd);
    // eperp = alphadot cd ealpha + deltadot edelta, with (alphadot, deltadot)
    // recovered from the frame: eperp . ealpha = alphadot cd, eperp . edelta = deltadot
    let ad_cd = f.eperp.dot(&f.ealpha);
    let dd = f.eperp.dot(&f.edelta);
    let deperp_da = dealpha_da * ad_cd + dedelta_da * dd;
    // d(eperp)/ddelta: alphadot d(cd ealpha)/ddelta + deltadot d(edelta)/ddelta
    //   = alphadot (-sd ealpha) + deltadot (-erho), using d(ealpha)/ddelta = 0
    let alphadot = if cd > 0.0 { ad_cd / cd } else { 0.0 };
    let deperp_dd = f.ealpha * (-sd * alphadot) - f.erho * dd;

    let dr_da = de_rho_da * rho1;
    let dr_dd = de_rho_dd * rho1;
    let drdot_da = de_rho_da * rhodot1 + deperp_da * rho1;
    let drdot_dd = de_rho_dd * rhodot1 + deperp_dd * rho1;
    let drdot_dad = f.ealpha * (cd * rho1);
    let drdot_ddd = f.edelta * rho1;

    let mut m = SMatrix::<f64, 6, 4>::zeros();
    for k in 0..3 {
        m[(k, 0)] = dr_da[k];
        m[(k, 1)] = dr_dd[k];
        m[(k + 3, 0)] = drdot_da[k];
        m[(k + 3, 1)] = drdot_dd[k];
        m[(k + 3, 2)] = drdot_dad[k];
        m[(k + 3, 3)] = drdot_ddd[k];
    }
    m
}

/// Propagate the attributable covariances to the epoch-1 Cartesian state
/// through the implicit solution map.
///
/// dPhi/dR is assembled from the hat-map rows and the analytic p1*
/// gradients; dPhi/dA uses central finite differences. Fails when dPhi/dR is
/// singular at the solution.
pub fn propagate_covariance(
    a1: &Attributable,
    a2: &Attributable,
    o1: &ObserverState,
    o2: &ObserverState,
    raw: &RawSolution,
    _cfg: &LinkConfig,
) -> Result<CovariancePack> {
    if raw.rho1.abs() < 1e-300 {
        return Err(Error::Singular("rho1 = 0 in covariance propagation".into()));
    }
    let g1 = epoch_geometry(a1, o1)?;
    let g2 = epoch_geometry(a2, o2)?;
    let st1 = eval_state(&g1.frame, o1, raw.rho1, raw.rhodot1);
    let st2 = eval_state(&g2.frame, o2, raw.rho2, raw.rhodot2);

    // dPsi/dEcar: rows 1-3 from the hat map, row 4 = (1/rho1) dp1*/dEcar
    let (dp_r1, dp_v1, dp_r2, dp_v2) =
        p1_star_gradients(&st1.r, &st1.rdot, &st2.r, &st2.rdot, &o1.q);
    let mut dpsi = SMatrix::<f64, 4, 12>::zeros();
    let blocks = [-hat(&st1.rdot), hat(&st1.r), hat(&st2.rdot), -hat(&st2.r)];
    for (b, blk) in blocks.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                dpsi[(i, 3 * b + j)] = blk[(i, j)];
            }
        }
    }
    for (b, grad) in [dp_r1, dp_v1, dp_r2, dp_v2].iter().enumerate() {
        for j in 0..3 {
            dpsi[(3, 3 * b + j)] = grad[j] / raw.rho1;
        }
    }

    // dEcar/dR
    let mut decar_dr = SMatrix::<f64, 12, 4>::zeros();
    let put = |m: &mut SMatrix<f64, 12, 4>, row: usize, col: usize, v: Vec3| {
        m[(row, col)] = v.x;
        m[(row + 1, col)] = v.y;
        m[(row + 2, col)] = v.z;
    };
    put(&mut decar_dr, 0, 0, g1.frame.erho);
    put(&mut decar_dr, 3, 0, g1.frame.eperp);
    put(&mut decar_dr, 3, 1, g1.frame.erho);
    put(&mut decar_dr, 6, 2, g2.frame.erho);
    put(&mut decar_dr, 9, 2, g2.frame.eperp);
    put(&mut decar_dr, 9, 3, g2.frame.erho);

    let dphi_dr: Matrix4<f64> = dpsi * decar_dr;

    // dPhi/dA by central differences
    let r_vec = Vector4::new(raw.rho1, raw.rhodot1, raw.rho2, raw.rhodot2);
    let a1v = attributable_vec(a1);
    let a2v = attributable_vec(a2);
    let mut dphi_da = SMatrix::<f64, 4, 8>::zeros();
    for k in 0..8 {
        let (base, other, first) = if k < 4 {
            (a1v, a2v, true)
        } else {
            (a2v, a1v, false)
        };
        let idx = k % 4;
        let h = 1e-7 * (1.0 + base[idx].abs());
        let mut plus = base;
        let mut minus = base;
        plus[idx] += h;
        minus[idx] -= h;
        let (fp, fm) = if first {
            (
                phi_map(&r_vec, &plus, &other, o1, o2)?,
                phi_map(&r_vec, &minus, &other, o1, o2)?,
            )
        } else {
            (
                phi_map(&r_vec, &other, &plus, o1, o2)?,
                phi_map(&r_vec, &other, &minus, o1, o2)?,
            )
        };
        let col = (fp - fm) / (2.0 * h);
        for i in 0..4 {
            dphi_da[(i, k)] = col[i];
        }
    }

    let inv = dphi_dr.try_inverse().ok_or_else(|| {
        Error::Singular("dPhi/dR singular at the solution (implicit map undefined)".into())
    })?;
    let dr_da: SMatrix<f64, 4, 8> = -inv * dphi_da;

    // dEcar1/dA = analytic fixed-R part + (dEcar1/dR) dRdA
    let mut decar1_da = SMatrix::<f64, 6, 8>::zeros();
    let fixed = decar1_datt_fixed_r(&g1, raw.rho1, raw.rhodot1);
    for i in 0..6 {
        for j in 0..4 {
            decar1_da[(i, j)] = fixed[(i, j)];
        }
    }
    let mut decar1_dr = SMatrix::<f64, 6, 4>::zeros();
    for k in 0..3 {
        decar1_dr[(k, 0)] = g1.frame.erho[k];
        decar1_dr[(k + 3, 0)] = g1.frame.eperp[k];
        decar1_dr[(k + 3, 1)] = g1.frame.erho[k];
    }
    decar1_da += decar1_dr * dr_da;

    let mut gamma_a = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            gamma_a[(i, j)] = a1.gamma[(i, j)];
            gamma_a[(i + 4, j + 4)] = a2.gamma[(i, j)];
        }
    }
    let gamma_car1_raw = decar1_da * gamma_a * decar1_da.transpose();
    let gamma_car1 = (gamma_car1_raw + gamma_car1_raw.transpose()) * 0.5;

    Ok(CovariancePack {
        gamma_a,
        dphi_dr,
        dphi_da,
        decar1_da,
        gamma_car1,
    })
}

/// Mahalanobis compatibility penalty: propagate the epoch-1 state to the
/// second epoch, predict the attributable and its covariance, and whiten the
/// prediction error against Gamma2 + Gamma2_predicted.
pub fn compatibility_penalty(
    state1: &State6,
    gamma_car1: &Matrix6,
    a2: &Attributable,
    o2: &ObserverState,
    dt_time: f64,
    mu: f64,
) -> Result<f64> {
    let (d, s) = penalty_components(state1, gamma_car1, a2, o2, dt_time, mu)?;
    let sinv = s
        .try_inverse()
        .ok_or_else(|| Error::Singular("singular penalty covariance".into()))?;
    Ok((d.transpose() * sinv * d)[(0, 0)].max(0.0).sqrt())
}

/// The raw ingredients of the penalty: the prediction error d = A2 - A2_hat
/// (alpha wrapped) and the whitening covariance Gamma2 + Gamma2_predicted.
pub fn penalty_components(
    state1: &State6,
    gamma_car1: &Matrix6,
    a2: &Attributable,
    o2: &ObserverState,
    dt_time: f64,
    mu: f64,
) -> Result<(Vector4<f64>, Matrix4<f64>)> {
    let predicted = propagate_universal(state1, dt_time, mu)
        .map_err(|e| Error::Propagation(format!("penalty propagation: {e}")))?;

    // state transition matrix by central differences
    let mut stm = Matrix6::zeros();
    let r_scale = state1.r.norm();
    let v_scale = state1.rdot.norm();
    for k in 0..6 {
        let h = 1e-7 * if k < 3 { r_scale } else { v_scale };
        let mut plus = *state1;
        let mut minus = *state1;
        if k < 3 {
            plus.r[k] += h;
            minus.r[k] -= h;
        } else {
            plus.rdot[k - 3] += h;
            minus.rdot[k - 3] -= h;
        }
        let sp = propagate_universal(&plus, dt_time, mu)?;
        let sm = propagate_universal(&minus, dt_time, mu)?;
        for i in 0..3 {
            stm[(i, k)] = (sp.r[i] - sm.r[i]) / (2.0 * h);
            stm[(i + 3, k)] = (sp.rdot[i] - sm.rdot[i]) / (2.0 * h);
        }
    }

    // measurement Jacobian d(attributable)/d(state at t2)
    let view = radec_view(&predicted, o2)?;
    let mut hmat = SMatrix::<f64, 4, 6>::zeros();
    for k in 0..6 {
        let h = 1e-7
            * if k < 3 {
                predicted.r.norm()
            } else {
                predicted.rdot.norm()
            };
        let mut plus = predicted;
        let mut minus = predicted;
        if k < 3 {
            plus.r[k] += h;
            minus.r[k] -= h;
        } else {
            plus.rdot[k - 3] += h;
            minus.rdot[k - 3] -= h;
        }
        let vp = radec_view(&plus, o2)?;
        let vm = radec_view(&minus, o2)?;
        let dv = [
            wrap_pi(vp.alpha - vm.alpha) / (2.0 * h),
            (vp.delta - vm.delta) / (2.0 * h),
            (vp.alphadot - vm.alphadot) / (2.0 * h),
            (vp.deltadot - vm.deltadot) / (2.0 * h),
        ];
        for i in 0..4 {
            hmat[(i, k)] = dv[i];
        }
    }

    let gamma_pred = hmat * stm * gamma_car1 * stm.transpose() * hmat.transpose();
    let mut s = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            s[(i, j)] = a2.gamma[(i, j)] + gamma_pred[(i, j)];
        }
    }
    let d = Vector4::new(
        wrap_pi(a2.alpha - view.alpha),
        a2.delta - view.delta,
        a2.alphadot - view.alphadot,
        a2.deltadot - view.deltadot,
    );
    Ok((d, s))
}

fn wrap_pi(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a.rem_euclid(two_pi);
    if x >= std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

/// Assess a single raw solution; None when its states cannot be evaluated.
pub fn assess_one(
    raw: &RawSolution,
    a1: &Attributable,
    a2: &Attributable,
    o1: &ObserverState,
    o2: &ObserverState,
    cfg: &LinkConfig,
) -> Option<LinkageSolution> {
    let (state1, state2) = states_from_raw(a1, a2, o1, o2, raw).ok()?;
    let i1 = integrals(&state1, cfg.mu).ok()?;
    let i2 = integrals(&state2, cfg.mu).ok()?;
    let mut flags = physical_filter(raw, i1.energy, i2.energy, cfg);
    let (spurious, sflags) = spurious_check(&state1, &state2, cfg.mu, cfg);
    flags.spurious_intersys = sflags.spurious_intersys;
    flags.spurious_fullsys = sflags.spurious_fullsys;
    flags.spurious_indeterminate = sflags.spurious_indeterminate;

    let angmom_gap = (i1.c - i2.c).norm() / i1.c.norm().max(1e-300);

    let kepler1 = cartesian_to_keplerian(&state1, cfg.mu).ok();
    let kepler2 = cartesian_to_keplerian(&state2, cfg.mu).ok();

    let covariance = if !flags.negative_range {
        match propagate_covariance(a1, a2, o1, o2, raw, cfg) {
            Ok(p) => Some(p),
            Err(_) => {
                flags.covariance_unavailable = true;
                None
            }
        }
    } else {
        None
    };

    let penalty = if flags.physical() {
        let dt_time = cfg.mode.days_to_time(a2.epoch.mjd - a1.epoch.mjd);
        match covariance.as_ref() {
            Some(pack) => {
                match compatibility_penalty(&state1, &pack.gamma_car1, a2, o2, dt_time, cfg.mu) {
                    Ok(p) => Some(p),
                    Err(_) => {
                        flags.propagation_failed = true;
                        Some(f64::INFINITY)
                    }
                }
            }
            None => None,
        }
    } else {
        None
    };

    let accepted = flags.physical();
    Some(LinkageSolution {
        raw: *raw,
        state1,
        state2,
        energy1: i1.energy,
        energy2: i2.energy,
        angmom_gap,
        kepler1,
        kepler2,
        spurious,
        flags,
        covariance,
        penalty,
        accepted,
    })
}

/// Run the full assessment chain over the raw solutions of a linkage.
pub fn assess_solutions(
    outcome: &LinkageOutcome,
    a1: &Attributable,
    a2: &Attributable,
    o1: &ObserverState,
    o2: &ObserverState,
    cfg: &LinkConfig,
) -> Vec<LinkageSolution> {
    outcome
        .solutions
        .iter()
        .filter_map(|raw| assess_one(raw, a1, a2, o1, o2, cfg))
        .collect()
}

/// Project a vector onto the attributable seen from an observer (the
/// predicted attributable of a propagated solution). Exposed for tests.
pub fn predict_attributable(state: &State6, obs: &ObserverState) -> Result<Vector4<f64>> {
    let v = radec_view(state, obs)?;
    Ok(Vector4::new(v.alpha, v.delta, v.alphadot, v.deltadot))
}
