//! Keplerian element conversions and universal-variable two-body propagation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Epoch, State6, Vec3};

const KEPLER_TOL: f64 = 1e-12;
const KEPLER_MAX_ITER: usize = 50;
/// Below this eccentricity the perigee direction is conventional (omega = 0).
const E_DEGENERATE: f64 = 1e-10;
/// Below this inclination the node is conventional (Omega = 0).
const I_DEGENERATE: f64 = 1e-10;

/// Classical elements: a, e, I, Omega (node), omega (perigee), ell (mean anomaly).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KeplerianElements {
    pub a: f64,
    pub e: f64,
    pub inc: f64,
    pub raan: f64,
    pub argp: f64,
    pub mean_anomaly: f64,
    pub epoch: Epoch,
}

fn wrap_two_pi(a: f64) -> f64 {
    a.rem_euclid(2.0 * std::f64::consts::PI)
}

/// Convert a Cartesian state to elliptic Keplerian elements.
///
/// Degenerate conventions: e < 1e-10 fixes omega = 0 with the anomaly
/// measured from the node; I < 1e-10 fixes Omega = 0.
pub fn cartesian_to_keplerian(state: &State6, mu: f64) -> Result<KeplerianElements> {
    let r = state.r;
    let v = state.rdot;
    let rnorm = r.norm();
    if rnorm == 0.0 {
        return Err(Error::Singular("state at the origin".into()));
    }
    let energy = 0.5 * v.norm_squared() - mu / rnorm;
    if energy >= 0.0 {
        return Err(Error::Unbounded { energy });
    }
    let a = -mu / (2.0 * energy);
    let c = r.cross(&v);
    let cnorm = c.norm();
    if cnorm < 1e-12 * rnorm * v.norm().max(1e-300) {
        return Err(Error::Singular("rectilinear orbit (|c| ~ 0)".into()));
    }
    let chat = c / cnorm;
    let e_vec = (r * (v.norm_squared() - mu / rnorm) - v * (r.dot(&v))) / mu;
    let e = e_vec.norm();
    if e >= 1.0 {
        return Err(Error::Unbounded { energy });
    }

    let inc = (c.z / cnorm).clamp(-1.0, 1.0).acos();

    // node direction
    let (raan, node) = if inc < I_DEGENERATE || (std::f64::consts::PI - inc) < I_DEGENERATE {
        (0.0, Vec3::new(1.0, 0.0, 0.0))
    } else {
        let n = Vec3::new(-c.y, c.x, 0.0);
        (wrap_two_pi(n.y.atan2(n.x)), n / n.norm())
    };
    let node_perp = chat.cross(&node);

    let (argp, nu) = if e < E_DEGENERATE {
        // anomaly measured from the node
        let u = r.dot(&node_perp).atan2(r.dot(&node));
        (0.0, wrap_two_pi(u))
    } else {
        let ehat = e_vec / e;
        let argp = wrap_two_pi(e_vec.dot(&node_perp).atan2(e_vec.dot(&node)));
        let eperp = chat.cross(&ehat);
        let nu = wrap_two_pi(r.dot(&eperp).atan2(r.dot(&ehat)));
        (argp, nu)
    };

    // eccentric and mean anomaly
    let ecc_anom = {
        let (snu, cnu) = nu.sin_cos();
        let den = 1.0 + e * cnu;
        let se = ((1.0 - e * e).sqrt() * snu) / den;
        let ce = (e + cnu) / den;
        se.atan2(ce)
    };
    let mean_anomaly = wrap_two_pi(ecc_anom - e * ecc_anom.sin());

    Ok(KeplerianElements {
        a,
        e,
        inc,
        raan,
        argp,
        mean_anomaly,
        epoch: state.epoch,
    })
}

/// Solve Kepler's equation M = E - e sin E for elliptic orbits.
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::InvalidInput(format!(
            "elliptic solver needs e in [0,1), got {e}"
        )));
    }
    let m = mean_anomaly;
    let mut ecc = if e > 0.8 { std::f64::consts::PI } else { m };
    for _ in 0..KEPLER_MAX_ITER {
        let f = ecc - e * ecc.sin() - m;
        let fp = 1.0 - e * ecc.cos();
        let step = f / fp;
        ecc -= step;
        if step.abs() < KEPLER_TOL {
            return Ok(ecc);
        }
    }
    Err(Error::Propagation(
        "Kepler equation did not converge".into(),
    ))
}

/// Convert elliptic elements to a Cartesian state.
pub fn keplerian_to_cartesian(el: &KeplerianElements, mu: f64) -> Result<State6> {
    if el.e >= 1.0 || el.a <= 0.0 {
        return Err(Error::Unbounded {
            energy: -mu / (2.0 * el.a),
        });
    }
    let ecc_anom = solve_kepler(el.mean_anomaly, el.e)?;
    let (se, ce) = ecc_anom.sin_cos();
    let b_over_a = (1.0 - el.e * el.e).sqrt();
    // perifocal coordinates
    let x = el.a * (ce - el.e);
    let y = el.a * b_over_a * se;
    let rmag = el.a * (1.0 - el.e * ce);
    let n = (mu / (el.a * el.a * el.a)).sqrt();
    let vx = -el.a * el.a * n * se / rmag;
    let vy = el.a * el.a * n * b_over_a * ce / rmag;

    let (so, co) = el.argp.sin_cos();
    let (sr, cr) = el.raan.sin_cos();
    let (si, ci) = el.inc.sin_cos();
    let p_hat = Vec3::new(cr * co - sr * so * ci, sr * co + cr * so * ci, so * si);
    let q_hat = Vec3::new(-cr * so - sr * co * ci, -sr * so + cr * co * ci, co * si);
    Ok(State6 {
        r: p_hat * x + q_hat * y,
        rdot: p_hat * vx + q_hat * vy,
        epoch: el.epoch,
    })
}

/// Stumpff functions C(z), S(z) with series fallback near z = 0.
pub fn stumpff(z: f64) -> (f64, f64) {
    if z > 1e-6 {
        let sz = z.sqrt();
        ((1.0 - sz.cos()) / z, (sz - sz.sin()) / (sz * z))
    } else if z < -1e-6 {
        let sz = (-z).sqrt();
        ((1.0 - sz.cosh()) / z, (sz.sinh() - sz) / (sz * -z))
    } else {
        (
            0.5 - z / 24.0 + z * z / 720.0,
            1.0 / 6.0 - z / 120.0 + z * z / 5040.0,
        )
    }
}

/// Two-body propagation by universal variables (handles elliptic and
/// near-parabolic states uniformly). `dt` is in the same time unit as the
/// velocity; the returned epoch is advanced by dt interpreted in days via
/// the caller's convention, so the caller sets the epoch afterwards if the
/// time unit is not days.
pub fn propagate_universal(state: &State6, dt: f64, mu: f64) -> Result<State6> {
    if dt == 0.0 {
        return Ok(*state);
    }
    let r0 = state.r;
    let v0 = state.rdot;
    let r0n = r0.norm();
    if r0n == 0.0 {
        return Err(Error::Singular("propagation from the origin".into()));
    }
    let sqrt_mu = mu.sqrt();
    let alpha = 2.0 / r0n - v0.norm_squared() / mu; // 1/a
    let rv = r0.dot(&v0);

    let mut chi = if alpha > 1e-12 {
        sqrt_mu * dt * alpha
    } else {
        // near-parabolic / hyperbolic starter
        dt.signum() * (mu / r0n).sqrt() * dt.abs() / r0n
    };

    let mut converged = false;
    for _ in 0..KEPLER_MAX_ITER {
        let z = alpha * chi * chi;
        let (c2, c3) = stumpff(z);
        let chi2 = chi * chi;
        let t_of_chi =
            (rv / sqrt_mu * chi2 * c2 + (1.0 - alpha * r0n) * chi2 * chi * c3 + r0n * chi)
                / sqrt_mu;
        let dt_dchi =
            (chi2 * c2 + rv / sqrt_mu * chi * (1.0 - z * c3) + r0n * (1.0 - z * c2)) / sqrt_mu;
        let step = (dt - t_of_chi) / dt_dchi;
        chi += step;
        if step.abs() < KEPLER_TOL * (1.0 + chi.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Propagation(format!(
            "universal Kepler solver stalled (dt = {dt})"
        )));
    }

    let z = alpha * chi * chi;
    let (c2, c3) = stumpff(z);
    let chi2 = chi * chi;
    let f = 1.0 - chi2 * c2 / r0n;
    let g = dt - chi2 * chi * c3 / sqrt_mu;
    let r_new = r0 * f + v0 * g;
    let rn = r_new.norm();
    let fdot = sqrt_mu * chi * (z * c3 - 1.0) / (r0n * rn);
    let gdot = 1.0 - chi2 * c2 / rn;
    Ok(State6 {
        r: r_new,
        rdot: r0 * fdot + v0 * gdot,
        epoch: state.epoch,
    })
}
