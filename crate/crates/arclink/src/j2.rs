//! Iterative linkage under Earth-oblateness secular drift.
//!
//! With J2, the matching conditions become R_c c1 = c2 and a rotated
//! Lenz/energy combination: the rotations R_c, R_L depend on the orbital
//! elements, so the system is solved by iteration. Each pass freezes the
//! rotations at the current orbit estimate, which makes the system
//! polynomial again with the same degree structure; the rebuilt system
//! p1 = p2 = q = 0 is generically inconsistent, so only one of p1, p2 is
//! solved together with q and the root nearest the previous iterate is
//! tracked.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::assess::{assess_one, LinkageSolution};
use crate::attributable::Attributable;
use crate::bipoly::{aberth_roots, UniPoly};
use crate::config::LinkConfig;
use crate::error::{Error, Result};
use crate::geometry::{ObserverState, Vec3};
use crate::kepler::{cartesian_to_keplerian, KeplerianElements};
use crate::linkage::{
    build_q_from_coeffs, build_xi_projected, epoch_geometry, solve_linkage, RawSolution, XiVectors,
};

/// Which polynomial pairs with q in the per-iteration solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    P1,
    P2,
}

/// Parameters of the J2 iteration.
#[derive(Clone, Debug)]
pub struct J2Config {
    /// Oblateness coefficient (dimensionless, >= 0).
    pub j2: f64,
    /// Equatorial radius of the central body (mode length units).
    pub r_body: f64,
    pub max_iter: usize,
    /// Convergence tolerance on (rho1, rho2) in units of rho_scale.
    pub tol_rho: f64,
    pub branch: Branch,
    /// 0.0 = plain fixed point; 0.5 damps stiff cases.
    pub damping: f64,
}

impl J2Config {
    pub fn earth() -> Self {
        J2Config {
            j2: crate::config::J2_EARTH,
            r_body: crate::config::R_EARTH,
            max_iter: 20,
            tol_rho: 1e-8,
            branch: Branch::P1,
            damping: 0.0,
        }
    }
}

/// First-order secular drift rates (Omega_dot, omega_dot) under J2.
///
/// Omega_dot = -(3/2) J2 n (R/p)^2 cos I,
/// omega_dot = (3/4) J2 n (R/p)^2 (5 cos^2 I - 1), with p = a(1-e^2).
pub fn secular_rates(el: &KeplerianElements, cfg: &J2Config, mu: f64) -> Result<(f64, f64)> {
    if el.e >= 1.0 || el.a <= 0.0 {
        return Err(Error::Unbounded {
            energy: -mu / (2.0 * el.a),
        });
    }
    let p = el.a * (1.0 - el.e * el.e);
    let n = (mu / (el.a * el.a * el.a)).sqrt();
    let ratio = (cfg.r_body / p) * (cfg.r_body / p);
    let ci = el.inc.cos();
    let raan_dot = -1.5 * cfg.j2 * n * ratio * ci;
    let argp_dot = 0.75 * cfg.j2 * n * ratio * (5.0 * ci * ci - 1.0);
    Ok((raan_dot, argp_dot))
}

/// Rotation by `angle` about the (normalized) `axis`, Rodrigues form.
/// Exactly the identity when the angle is exactly zero.
pub fn axis_angle(axis: &Vec3, angle: f64) -> Matrix3<f64> {
    if angle == 0.0 {
        return Matrix3::identity();
    }
    let k = hat(axis);
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

fn hat(u: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -u.z, u.y, u.z, 0.0, -u.x, -u.y, u.x, 0.0)
}

/// The pair (R_c, R_L) built from the drift angles:
/// R_c = R(z, dRaan), R_L = R(c2, omega1 + dArgp) R(z, dRaan) R(c1, -omega1).
#[derive(Clone, Copy, Debug)]
pub struct RotationPair {
    pub rc: Matrix3<f64>,
    pub rl: Matrix3<f64>,
}

/// Build the rotation pair from the two current element sets and the drift
/// accumulated over `dt` (epoch-1 rates, per the drift convention).
pub fn rotation_pair(
    el1: &KeplerianElements,
    el2: &KeplerianElements,
    c1_dir: &Vec3,
    c2_dir: &Vec3,
    dt: f64,
    cfg: &J2Config,
    mu: f64,
) -> Result<RotationPair> {
    let _ = el2; // axis c2 carries the epoch-2 information
    if c1_dir.norm() < 1e-12 || c2_dir.norm() < 1e-12 {
        return Err(Error::Degenerate("angular momentum axis undefined".into()));
    }
    let (raan_dot, argp_dot) = secular_rates(el1, cfg, mu)?;
    let d_raan = raan_dot * dt;
    let d_argp = argp_dot * dt;
    let omega1 = el1.argp;
    let zhat = Vec3::new(0.0, 0.0, 1.0);
    let rc = axis_angle(&zhat, d_raan);
    let rl = if d_raan == 0.0 && d_argp == 0.0 && (c1_dir - c2_dir).norm() < 1e-9 {
        Matrix3::identity()
    } else {
        axis_angle(&(c2_dir / c2_dir.norm()), omega1 + d_argp)
            * axis_angle(&zhat, d_raan)
            * axis_angle(&(c1_dir / c1_dir.norm()), -omega1)
    };
    Ok(RotationPair { rc, rl })
}

/// One iteration snapshot of a tracked seed.
#[derive(Clone, Debug, Serialize)]
pub struct J2IterationRecord {
    pub iteration: usize,
    pub rho1: f64,
    pub rho2: f64,
    /// Step size in scaled range units.
    pub step_scaled: f64,
    pub d_raan: f64,
    pub d_argp: f64,
    pub branch: Branch,
}

/// Result for one unperturbed seed carried through the J2 iteration.
#[derive(Clone, Debug)]
pub struct J2SeedResult {
    pub seed: RawSolution,
    pub converged: bool,
    pub iterations: usize,
    /// Assessed solution at convergence (None when the track was lost).
    pub solution: Option<LinkageSolution>,
    /// Residual of the branch that was *not* solved, at convergence — the
    /// witness that p1 = p2 = q = 0 is inconsistent under J2.
    pub residual_other_branch: Option<f64>,
    pub trace: Vec<J2IterationRecord>,
}

#[derive(Clone, Debug)]
pub struct J2Outcome {
    pub seeds: Vec<J2SeedResult>,
    pub rho_scale: f64,
}

struct BranchSolve {
    rho1: f64,
    rho2: f64,
    rhodot1: f64,
    rhodot2: f64,
    step: f64,
    residual_other: f64,
}

/// Solve the chosen branch (p_branch = q = 0) of the rotated system and
/// track the root nearest `(prev1, prev2)` (scaled units).
#[allow(clippy::too_many_arguments)]
fn solve_branch(
    g1s: &crate::linkage::EpochGeometry,
    g2s: &crate::linkage::EpochGeometry,
    rot: &RotationPair,
    branch: Branch,
    prev1: f64,
    prev2: f64,
    cfg: &LinkConfig,
) -> Result<Option<BranchSolve>> {
    let co1 = g1s.coeffs().rotated(&rot.rc);
    let co2 = g2s.coeffs();
    let (conic, rhodots) = build_q_from_coeffs(&co1, &co2, cfg.eps_deg)?;

    let x1 = XiVectors::from(g1s).rotated(&rot.rl);
    let x2 = XiVectors::from(g2s);
    let proj1 = rot.rl * g1s.frame.erho;
    let proj2 = g2s.frame.erho;
    let (_, p1, p2) = build_xi_projected(&x1, &x2, &rhodots, &proj1, &proj2)?;

    let red = conic.reduction(cfg.eps_deg)?;
    let target = match branch {
        Branch::P1 => &p1,
        Branch::P2 => &p2,
    };
    let other = match branch {
        Branch::P1 => &p2,
        Branch::P2 => &p1,
    };
    let (a1c, a0c) = red.reduce(target)?;
    let b0 = UniPoly::from_coeffs(vec![conic.q00, conic.q01, conic.q02]);
    let v = a0c
        .mul(&a0c)
        .scale(conic.q20)
        .sub(&a0c.mul(&a1c).scale(conic.q10))
        .add(&b0.mul(&a1c.mul(&a1c)));

    let set = aberth_roots(&v, cfg.root_max_iter)?;
    if !set.converged {
        return Ok(None);
    }
    let dscale = a1c.max_abs().max(1e-300);
    let mut best: Option<BranchSolve> = None;
    for z in &set.roots {
        if z.im.abs() >= cfg.im_tol * (1.0 + z.re.abs()) {
            continue;
        }
        let y = z.re;
        let den = a1c.eval(y);
        if den.abs() <= 1e-12 * dscale {
            continue;
        }
        let x = -a0c.eval(y) / den;
        let step = ((x - prev1).powi(2) + (y - prev2).powi(2)).sqrt();
        if best.as_ref().map_or(true, |b| step < b.step) {
            let residual_other = other.eval(x, y).abs() / other.abs_eval(x, y).max(1e-300);
            best = Some(BranchSolve {
                rho1: x,
                rho2: y,
                rhodot1: rhodots.rhodot1.eval(x, y),
                rhodot2: rhodots.rhodot2.eval(x, y),
                step,
                residual_other,
            });
        }
    }
    Ok(best)
}

/// Iterative J2 linkage seeded by the unperturbed solutions.
///
/// With j2 = 0 the scheme reduces to the unperturbed engine: the seeds are
/// returned unchanged with a single-iteration trace.
pub fn j2_linkage(
    a1: &Attributable,
    a2: &Attributable,
    o1: &ObserverState,
    o2: &ObserverState,
    cfg: &LinkConfig,
    j2cfg: &J2Config,
) -> Result<J2Outcome> {
    let outcome = solve_linkage(a1, a2, o1, o2, cfg)?;
    let rho_scale = outcome.rho_scale;
    // seeds pass the physical gates; the two-body spurious metrics are not
    // meaningful on J2-perturbed data and would starve the iteration
    let assessed: Vec<LinkageSolution> = outcome
        .solutions
        .iter()
        .filter_map(|raw| assess_one(raw, a1, a2, o1, o2, cfg))
        .filter(|s| !(s.flags.negative_range || s.flags.out_of_range || s.flags.unbounded))
        .collect();
    if assessed.is_empty() {
        return Err(Error::Degenerate(
            "unperturbed linkage produced no physically admissible seed".into(),
        ));
    }

    if j2cfg.j2 == 0.0 {
        // identity reduction: the rotations are exactly I and the system is
        // the unperturbed one
        let seeds = assessed
            .into_iter()
            .map(|s| {
                let raw = s.raw;
                J2SeedResult {
                    seed: raw,
                    converged: true,
                    iterations: 1,
                    residual_other_branch: Some(match j2cfg.branch {
                        Branch::P1 => raw.residual_p2,
                        Branch::P2 => raw.residual_p1,
                    }),
                    trace: vec![J2IterationRecord {
                        iteration: 1,
                        rho1: raw.rho1,
                        rho2: raw.rho2,
                        step_scaled: 0.0,
                        d_raan: 0.0,
                        d_argp: 0.0,
                        branch: j2cfg.branch,
                    }],
                    solution: Some(s),
                }
            })
            .collect();
        return Ok(J2Outcome { seeds, rho_scale });
    }

    // scaled geometries reused across iterations
    let scale_obs = |o: &ObserverState| ObserverState {
        q: o.q / rho_scale,
        qdot: o.qdot / rho_scale,
        epoch: o.epoch,
    };
    let g1s = epoch_geometry(a1, &scale_obs(o1))?;
    let g2s = epoch_geometry(a2, &scale_obs(o2))?;
    let dt = cfg.mode.days_to_time(a2.epoch.mjd - a1.epoch.mjd);

    let mut seeds = Vec::with_capacity(assessed.len());
    for seed_sol in &assessed {
        let seed = seed_sol.raw;
        let mut cur = (
            seed.rho1 / rho_scale,
            seed.rho2 / rho_scale,
            seed.rhodot1 / rho_scale,
            seed.rhodot2 / rho_scale,
        );
        let mut trace = Vec::new();
        let mut converged = false;
        let mut residual_other = None;
        let mut iterations = 0;
        // previous raw step, for Aitken extrapolation of the linear
        // contraction
        let mut prev_step: Option<(f64, f64, f64, f64)> = None;

        'iterate: for iter in 1..=j2cfg.max_iter {
            iterations = iter;
            // states of the current iterate, unscaled
            let raw_cur = RawSolution {
                rho1: cur.0 * rho_scale,
                rho2: cur.1 * rho_scale,
                rhodot1: cur.2 * rho_scale,
                rhodot2: cur.3 * rho_scale,
                ..seed
            };
            let (st1, st2) = match crate::assess::states_from_raw(a1, a2, o1, o2, &raw_cur) {
                Ok(v) => v,
                Err(_) => break 'iterate,
            };
            let (el1, el2) = match (
                cartesian_to_keplerian(&st1, cfg.mu),
                cartesian_to_keplerian(&st2, cfg.mu),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                _ => break 'iterate, // iterate left the elliptic domain
            };
            let c1 = st1.r.cross(&st1.rdot);
            let c2 = st2.r.cross(&st2.rdot);
            let rot = match rotation_pair(&el1, &el2, &c1, &c2, dt, j2cfg, cfg.mu) {
                Ok(r) => r,
                Err(_) => break 'iterate,
            };
            let (raan_dot, argp_dot) = secular_rates(&el1, j2cfg, cfg.mu)?;

            // primary branch, fallback to the other if the track is lost
            let mut used_branch = j2cfg.branch;
            let mut found = solve_branch(&g1s, &g2s, &rot, used_branch, cur.0, cur.1, cfg)?;
            let lost = |b: &Option<BranchSolve>| match b {
                Some(s) => s.step > 0.5,
                None => true,
            };
            if lost(&found) {
                used_branch = match j2cfg.branch {
                    Branch::P1 => Branch::P2,
                    Branch::P2 => Branch::P1,
                };
                found = solve_branch(&g1s, &g2s, &rot, used_branch, cur.0, cur.1, cfg)?;
            }
            let next = match found {
                Some(s) if s.step <= 0.5 => s,
                _ => break 'iterate, // root tracking lost on both branches
            };

            let d = j2cfg.damping;
            let stepped = (
                cur.0 * d + next.rho1 * (1.0 - d),
                cur.1 * d + next.rho2 * (1.0 - d),
                cur.2 * d + next.rhodot1 * (1.0 - d),
                cur.3 * d + next.rhodot2 * (1.0 - d),
            );
            let raw_step = (
                stepped.0 - cur.0,
                stepped.1 - cur.1,
                stepped.2 - cur.2,
                stepped.3 - cur.3,
            );
            let step = (raw_step.0 * raw_step.0 + raw_step.1 * raw_step.1).sqrt();
            cur = stepped;

            // Aitken acceleration: once consecutive steps are colinear with
            // a stable (signed) contraction ratio, jump to the extrapolated
            // limit; this also quenches alternating modes
            if let Some(prev) = prev_step {
                let dot = raw_step.0 * prev.0 + raw_step.1 * prev.1;
                let norm_prev2 = prev.0 * prev.0 + prev.1 * prev.1;
                if step > 0.0 && norm_prev2 > 0.0 {
                    let cosang = dot / (step * norm_prev2.sqrt());
                    let lambda = dot / norm_prev2;
                    if cosang.abs() > 0.8 && lambda.abs() < 0.95 && lambda.abs() > 0.05 {
                        let gain = lambda / (1.0 - lambda);
                        cur.0 += raw_step.0 * gain;
                        cur.1 += raw_step.1 * gain;
                        cur.2 += raw_step.2 * gain;
                        cur.3 += raw_step.3 * gain;
                    }
                }
            }
            prev_step = Some(raw_step);

            residual_other = Some(next.residual_other);
            trace.push(J2IterationRecord {
                iteration: iter,
                rho1: cur.0 * rho_scale,
                rho2: cur.1 * rho_scale,
                step_scaled: step,
                d_raan: raan_dot * dt,
                d_argp: argp_dot * dt,
                branch: used_branch,
            });
            if step < j2cfg.tol_rho {
                converged = true;
                break;
            }
        }

        let solution = if converged {
            let raw = RawSolution {
                rho1: cur.0 * rho_scale,
                rho2: cur.1 * rho_scale,
                rhodot1: cur.2 * rho_scale,
                rhodot2: cur.3 * rho_scale,
                ..seed
            };
            assess_one(&raw, a1, a2, o1, o2, cfg)
        } else {
            None
        };
        seeds.push(J2SeedResult {
            seed,
            converged,
            iterations,
            solution,
            residual_other_branch: residual_other,
            trace,
        });
    }
    Ok(J2Outcome { seeds, rho_scale })
}
