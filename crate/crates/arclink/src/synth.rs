//! Synthetic-scenario generation: exact attributable pairs sampled from a
//! propagated two-body (or J2-perturbed) orbit, plus simple analytic
//! observer models. Used by the test suites and benchmarks as the forward
//! oracle the linkage must invert; none of it sits on the solver path.

use rand::Rng;

use crate::attributable::Attributable;
use crate::config::{UnitMode, GAUSS_K, OMEGA_EARTH, R_EARTH};
use crate::error::{Error, Result};
use crate::geometry::{radec_view, Epoch, ObserverState, State6, Vec3};
use crate::kepler::{keplerian_to_cartesian, propagate_universal, KeplerianElements};

/// The true ranges and range rates behind a synthetic pair.
#[derive(Clone, Copy, Debug)]
pub struct TruthRanges {
    pub rho1: f64,
    pub rhodot1: f64,
    pub rho2: f64,
    pub rhodot2: f64,
}

/// A synthetic linkage problem with its ground truth.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub a1: Attributable,
    pub a2: Attributable,
    pub o1: ObserverState,
    pub o2: ObserverState,
    pub state1: State6,
    pub state2: State6,
    pub truth: TruthRanges,
    pub elements: KeplerianElements,
}

/// Observer on a circular 1 AU ecliptic orbit (heliocentric mode);
/// |q| = 1 AU and |qdot| = k AU/day by construction.
pub fn heliocentric_observer(epoch: Epoch, phase0: f64) -> ObserverState {
    let theta = GAUSS_K * epoch.mjd + phase0;
    let (s, c) = theta.sin_cos();
    ObserverState {
        q: Vec3::new(c, s, 0.0),
        qdot: Vec3::new(-s, c, 0.0) * GAUSS_K,
        epoch,
    }
}

/// Station fixed on a rotating sphere of radius R_EARTH (geocentric mode);
/// latitude/longitude in radians, rotation referenced to MJD 51544.5.
pub fn geocentric_station(epoch: Epoch, lat: f64, lon: f64) -> ObserverState {
    let theta = OMEGA_EARTH * (epoch.mjd - 51544.5) * 86400.0 + lon;
    let (st, ct) = theta.sin_cos();
    let (sl, cl) = lat.sin_cos();
    let q = Vec3::new(cl * ct, cl * st, sl) * R_EARTH;
    let qdot = Vec3::new(-cl * st, cl * ct, 0.0) * (R_EARTH * OMEGA_EARTH);
    ObserverState { q, qdot, epoch }
}

/// Random elliptic heliocentric elements: a in [0.8, 3] AU, e in [0, 0.3],
/// all angles uniform.
pub fn random_elliptic_elements<R: Rng>(rng: &mut R, epoch: Epoch) -> KeplerianElements {
    let two_pi = 2.0 * std::f64::consts::PI;
    KeplerianElements {
        a: rng.gen_range(0.8..3.0),
        e: rng.gen_range(0.0..0.3),
        inc: rng.gen_range(0.0..std::f64::consts::PI),
        raan: rng.gen_range(0.0..two_pi),
        argp: rng.gen_range(0.0..two_pi),
        mean_anomaly: rng.gen_range(0.0..two_pi),
        epoch,
    }
}

/// Build the exact linkage problem for an orbit seen at two epochs.
///
/// `sigma` seeds the (diagonal) attributable covariance; the angular data
/// themselves are exact.
pub fn scenario_from_elements<F>(
    elements: &KeplerianElements,
    mjd1: f64,
    mjd2: f64,
    mode: UnitMode,
    mu: f64,
    sigma: f64,
    observer: F,
) -> Result<Scenario>
where
    F: Fn(Epoch) -> ObserverState,
{
    let base = keplerian_to_cartesian(elements, mu)?;
    let make = |mjd: f64| -> Result<(Attributable, ObserverState, State6)> {
        let dt = mode.days_to_time(mjd - elements.epoch.mjd);
        let mut st = propagate_universal(&base, dt, mu)?;
        st.epoch = Epoch::new(mjd);
        let obs = observer(st.epoch);
        let view = radec_view(&st, &obs)?;
        if view.rho < 1e-9 {
            return Err(Error::Singular("object at the observer".into()));
        }
        let att = Attributable::exact(
            view.alpha,
            view.delta,
            view.alphadot,
            view.deltadot,
            st.epoch,
            sigma,
        );
        Ok((att, obs, st))
    };
    let (a1, o1, state1) = make(mjd1)?;
    let (a2, o2, state2) = make(mjd2)?;
    let v1 = radec_view(&state1, &o1)?;
    let v2 = radec_view(&state2, &o2)?;
    Ok(Scenario {
        a1,
        a2,
        o1,
        o2,
        state1,
        state2,
        truth: TruthRanges {
            rho1: v1.rho,
            rhodot1: v1.rhodot,
            rho2: v2.rho,
            rhodot2: v2.rhodot,
        },
        elements: *elements,
    })
}

/// Random attributable/observer inputs with generic geometry (no underlying
/// orbit), heliocentric-like magnitudes. Draws are rejected until coarse
/// non-degeneracy margins hold.
pub fn random_generic_inputs<R: Rng>(
    rng: &mut R,
) -> (Attributable, Attributable, ObserverState, ObserverState) {
    let two_pi = 2.0 * std::f64::consts::PI;
    loop {
        let e1 = Epoch::new(54000.0);
        let e2 = Epoch::new(54000.0 + rng.gen_range(20.0..200.0));
        let mut rand_att = |ep: Epoch| {
            Attributable::exact(
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                rng.gen_range(-1.1..1.1),
                rng.gen_range(-0.03..0.03),
                rng.gen_range(-0.03..0.03),
                ep,
                1e-6,
            )
        };
        let a1 = rand_att(e1);
        let a2 = rand_att(e2);
        let mut rand_obs = |ep: Epoch| {
            let theta = rng.gen_range(0.0..two_pi);
            let z = rng.gen_range(-0.2..0.2);
            let r = rng.gen_range(0.8..1.2);
            let q = Vec3::new(theta.cos(), theta.sin(), z).normalize() * r;
            let tangent =
                Vec3::new(-theta.sin(), theta.cos(), rng.gen_range(-0.1..0.1)).normalize();
            ObserverState {
                q,
                qdot: tangent * rng.gen_range(0.012..0.022),
                epoch: ep,
            }
        };
        let o1 = rand_obs(e1);
        let o2 = rand_obs(e2);

        // coarse genericity screen so downstream thresholds are comfortable
        let g1 = match crate::linkage::epoch_geometry(&a1, &o1) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let g2 = match crate::linkage::epoch_geometry(&a2, &o2) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let co1 = g1.coeffs();
        let co2 = g2.coeffs();
        let d1xd2 = co1.d.cross(&co2.d);
        let margin = 1e-4;
        if d1xd2.norm() < margin * co1.d.norm() * co2.d.norm() {
            continue;
        }
        if co1.e.dot(&d1xd2).abs() < margin * co1.e.norm() * d1xd2.norm() {
            continue;
        }
        if co2.e.dot(&d1xd2).abs() < margin * co2.e.norm() * d1xd2.norm() {
            continue;
        }
        if crate::linkage::critical_points(&g1, &g2, 1e-6).is_none() {
            continue;
        }
        // the elimination divides by q20: require balanced conic
        // coefficients or the reduction is too ill-conditioned to call the
        // draw generic
        if let Ok((q, _)) = crate::linkage::build_q_from_coeffs(&co1, &co2, 1e-10) {
            let balance = q.q20.abs().min(q.q02.abs()) / q.max_abs_coeff();
            if balance < 0.05 {
                continue;
            }
        } else {
            continue;
        }
        return (a1, a2, o1, o2);
    }
}

/// J2 acceleration (z axis = body spin axis).
pub fn accel_j2(r: &Vec3, mu: f64, j2: f64, r_body: f64) -> Vec3 {
    let rn = r.norm();
    let factor = 1.5 * j2 * mu * r_body * r_body / rn.powi(5);
    let zr = r.z / rn;
    Vec3::new(
        factor * (5.0 * zr * zr - 1.0) * r.x,
        factor * (5.0 * zr * zr - 1.0) * r.y,
        factor * ((5.0 * zr * zr - 3.0) * r.z),
    )
}

fn total_accel(r: &Vec3, mu: f64, j2: f64, r_body: f64) -> Vec3 {
    let rn = r.norm();
    -r * (mu / (rn * rn * rn)) + accel_j2(r, mu, j2, r_body)
}

/// Fixed-step RK4 integration of the J2-perturbed two-body problem.
/// `step` is the nominal step in the same time unit as the velocities.
pub fn propagate_j2_rk4(
    state: &State6,
    dt: f64,
    mu: f64,
    j2: f64,
    r_body: f64,
    step: f64,
) -> State6 {
    let n = (dt.abs() / step).ceil().max(1.0) as usize;
    let h = dt / n as f64;
    let mut r = state.r;
    let mut v = state.rdot;
    for _ in 0..n {
        let k1r = v;
        let k1v = total_accel(&r, mu, j2, r_body);
        let k2r = v + k1v * (h / 2.0);
        let k2v = total_accel(&(r + k1r * (h / 2.0)), mu, j2, r_body);
        let k3r = v + k2v * (h / 2.0);
        let k3v = total_accel(&(r + k2r * (h / 2.0)), mu, j2, r_body);
        let k4r = v + k3v * h;
        let k4v = total_accel(&(r + k3r * h), mu, j2, r_body);
        r += (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
    }
    State6 {
        r,
        rdot: v,
        epoch: state.epoch,
    }
}

/// Exact attributable pair from two externally propagated states (used with
/// the J2 oracle, where no conic-section shortcut exists).
pub fn scenario_from_states(
    state1: &State6,
    state2: &State6,
    o1: &ObserverState,
    o2: &ObserverState,
    sigma: f64,
) -> Result<(Attributable, Attributable, TruthRanges)> {
    let v1 = radec_view(state1, o1)?;
    let v2 = radec_view(state2, o2)?;
    let a1 = Attributable::exact(
        v1.alpha,
        v1.delta,
        v1.alphadot,
        v1.deltadot,
        state1.epoch,
        sigma,
    );
    let a2 = Attributable::exact(
        v2.alpha,
        v2.delta,
        v2.alphadot,
        v2.deltadot,
        state2.epoch,
        sigma,
    );
    Ok((
        a1,
        a2,
        TruthRanges {
            rho1: v1.rho,
            rhodot1: v1.rhodot,
            rho2: v2.rho,
            rhodot2: v2.rhodot,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{MU_EARTH, MU_SUN};
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn heliocentric_observer_is_circular() {
        for mjd in [0.0, 51544.5, 60000.25] {
            let o = heliocentric_observer(Epoch::new(mjd), 0.7);
            assert_relative_eq!(o.q.norm(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(o.qdot.norm(), GAUSS_K, epsilon = 1e-12);
            assert!(o.q.dot(&o.qdot).abs() < 1e-15);
        }
    }

    #[test]
    fn station_sits_on_sphere() {
        let o = geocentric_station(Epoch::new(51545.3), 0.7, 1.2);
        assert_relative_eq!(o.q.norm(), R_EARTH, epsilon = 1e-9);
        assert_relative_eq!(
            o.qdot.norm(),
            R_EARTH * OMEGA_EARTH * 0.7f64.cos(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn scenario_truth_consistent() {
        let mut rng = StdRng::seed_from_u64(61);
        let el = random_elliptic_elements(&mut rng, Epoch::new(54000.0));
        let sc = scenario_from_elements(
            &el,
            54010.0,
            54100.0,
            UnitMode::Heliocentric,
            MU_SUN,
            1e-9,
            |t| heliocentric_observer(t, 0.3),
        )
        .unwrap();
        // the attributable and truth must reproduce the state exactly
        let frame =
            crate::geometry::los_frame(sc.a1.alpha, sc.a1.delta, sc.a1.alphadot, sc.a1.deltadot)
                .unwrap();
        let st = crate::geometry::eval_state(&frame, &sc.o1, sc.truth.rho1, sc.truth.rhodot1);
        assert!((st.r - sc.state1.r).norm() < 1e-12);
        assert!((st.rdot - sc.state1.rdot).norm() < 1e-12);
    }

    #[test]
    fn rk4_matches_kepler_when_unperturbed() {
        let st = State6 {
            r: Vec3::new(7000.0, 0.0, 0.0),
            rdot: Vec3::new(0.0, 6.5, 3.0),
            epoch: Epoch::new(0.0),
        };
        let dt = 5000.0;
        let rk = propagate_j2_rk4(&st, dt, MU_EARTH, 0.0, R_EARTH, 1.0);
        let kp = propagate_universal(&st, dt, MU_EARTH).unwrap();
        assert!(
            (rk.r - kp.r).norm() / kp.r.norm() < 1e-10,
            "pos error {:e}",
            (rk.r - kp.r).norm() / kp.r.norm()
        );
        assert!((rk.rdot - kp.rdot).norm() / kp.rdot.norm() < 1e-10);
    }

    #[test]
    fn j2_conserves_energy_with_potential() {
        // with J2 on, the conserved quantity is v^2/2 - mu/r + U_J2
        let st = State6 {
            r: Vec3::new(7000.0, 0.0, 0.0),
            rdot: Vec3::new(0.0, 6.8, 3.2),
            epoch: Epoch::new(0.0),
        };
        let j2 = crate::config::J2_EARTH;
        let pot = |r: &Vec3| {
            let rn = r.norm();
            let zr = r.z / rn;
            -MU_EARTH / rn
                + MU_EARTH * j2 * R_EARTH * R_EARTH / (2.0 * rn.powi(3)) * (3.0 * zr * zr - 1.0)
        };
        let e0 = 0.5 * st.rdot.norm_squared() + pot(&st.r);
        let out = propagate_j2_rk4(&st, 20000.0, MU_EARTH, j2, R_EARTH, 0.5);
        let e1 = 0.5 * out.rdot.norm_squared() + pot(&out.r);
        assert_relative_eq!(e0, e1, max_relative = 1e-10);
    }
}
