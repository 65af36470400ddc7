//! Inertial-frame vector geometry of topocentric optical observations.
//!
//! An observation direction (alpha, delta) with angular rates defines the
//! orthonormal basis {e_rho, e_alpha, e_delta} and the rate vector e_perp.
//! Together with the observer state these give the four coefficient vectors
//! D, E, F, G that make the angular momentum a polynomial in the range and
//! range rate:
//!
//! ```text
//! c(rho, rhodot) = D rhodot + E rho^2 + F rho + G = r x rdot
//! ```
//!
//! Everything here is a pure function of its inputs.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Epoch as a Modified Julian Date in the caller's (uniform) timescale.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Epoch {
    pub mjd: f64,
}

impl Epoch {
    pub fn new(mjd: f64) -> Self {
        Epoch { mjd }
    }

    /// Signed interval self - other, in days.
    pub fn days_since(self, other: Epoch) -> f64 {
        self.mjd - other.mjd
    }
}

/// Position and velocity of the observing station in the inertial frame.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ObserverState {
    pub q: Vec3,
    pub qdot: Vec3,
    pub epoch: Epoch,
}

/// Line-of-sight orthonormal basis plus the angular-rate vector
/// e_perp = alphadot cos(delta) e_alpha + deltadot e_delta.
#[derive(Clone, Copy, Debug)]
pub struct LosFrame {
    pub erho: Vec3,
    pub ealpha: Vec3,
    pub edelta: Vec3,
    pub eperp: Vec3,
}

/// Coefficient vectors of the angular-momentum polynomial.
#[derive(Clone, Copy, Debug)]
pub struct AngMomCoeffs {
    pub d: Vec3,
    pub e: Vec3,
    pub f: Vec3,
    pub g: Vec3,
}

impl AngMomCoeffs {
    /// c(rho, rhodot) = D rhodot + E rho^2 + F rho + G.
    pub fn eval(&self, rho: f64, rhodot: f64) -> Vec3 {
        self.d * rhodot + self.e * (rho * rho) + self.f * rho + self.g
    }

    /// Coefficient vectors rotated by a 3x3 matrix (used by the J2 scheme,
    /// where the epoch-1 angular momentum enters as R_c c_1).
    pub fn rotated(&self, rot: &nalgebra::Matrix3<f64>) -> AngMomCoeffs {
        AngMomCoeffs {
            d: rot * self.d,
            e: rot * self.e,
            f: rot * self.f,
            g: rot * self.g,
        }
    }
}

/// Cartesian position/velocity at an epoch.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct State6 {
    pub r: Vec3,
    pub rdot: Vec3,
    pub epoch: Epoch,
}

/// Two-body first integrals evaluated at a state.
#[derive(Clone, Copy, Debug)]
pub struct Integrals {
    /// Angular momentum r x rdot.
    pub c: Vec3,
    /// Specific energy |rdot|^2/2 - mu/|r|.
    pub energy: f64,
    /// Laplace-Lenz vector L (|L| is the eccentricity).
    pub lenz: Vec3,
    /// K = |rdot|^2 r / 2 - (rdot . r) rdot, the u-free part of mu L.
    pub kappa: Vec3,
}

/// Build the line-of-sight basis at (alpha, delta) with rates.
///
/// Fails when |delta| >= pi/2: the basis degenerates at the poles.
pub fn los_frame(alpha: f64, delta: f64, alphadot: f64, deltadot: f64) -> Result<LosFrame> {
    if !delta.is_finite() || delta.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::InvalidInput(format!(
            "declination {delta} outside (-pi/2, pi/2)"
        )));
    }
    let (sa, ca) = alpha.sin_cos();
    let (sd, cd) = delta.sin_cos();
    let erho = Vec3::new(cd * ca, cd * sa, sd);
    let ealpha = Vec3::new(-sa, ca, 0.0);
    let edelta = Vec3::new(-sd * ca, -sd * sa, cd);
    let eperp = ealpha * (alphadot * cd) + edelta * deltadot;
    Ok(LosFrame {
        erho,
        ealpha,
        edelta,
        eperp,
    })
}

/// D = q x e_rho, E = e_rho x e_perp, F = q x e_perp + e_rho x qdot, G = q x qdot.
pub fn angmom_coeffs(frame: &LosFrame, obs: &ObserverState) -> AngMomCoeffs {
    AngMomCoeffs {
        d: obs.q.cross(&frame.erho),
        e: frame.erho.cross(&frame.eperp),
        f: obs.q.cross(&frame.eperp) + frame.erho.cross(&obs.qdot),
        g: obs.q.cross(&obs.qdot),
    }
}

/// r = q + rho e_rho, rdot = qdot + rhodot e_rho + rho e_perp.
///
/// rho <= 0 is allowed; diagnostics evaluate the polynomial system at
/// unphysical points too.
pub fn eval_state(frame: &LosFrame, obs: &ObserverState, rho: f64, rhodot: f64) -> State6 {
    State6 {
        r: obs.q + frame.erho * rho,
        rdot: obs.qdot + frame.erho * rhodot + frame.eperp * rho,
        epoch: obs.epoch,
    }
}

/// First integrals of Kepler motion at a state.
pub fn integrals(state: &State6, mu: f64) -> Result<Integrals> {
    let rnorm = state.r.norm();
    if rnorm == 0.0 {
        return Err(Error::Singular("integrals at |r| = 0".into()));
    }
    if mu <= 0.0 {
        return Err(Error::InvalidInput(format!("mu = {mu} must be positive")));
    }
    let v2 = state.rdot.norm_squared();
    let rv = state.rdot.dot(&state.r);
    let energy = 0.5 * v2 - mu / rnorm;
    let kappa = state.r * (0.5 * v2) - state.rdot * rv;
    let lenz = (state.r * (v2 - mu / rnorm) - state.rdot * rv) / mu;
    Ok(Integrals {
        c: state.r.cross(&state.rdot),
        energy,
        lenz,
        kappa,
    })
}

/// Spherical view of a state as seen from an observer: the exact inverse of
/// [`eval_state`] composed with [`los_frame`].
#[derive(Clone, Copy, Debug)]
pub struct RadecView {
    pub alpha: f64,
    pub delta: f64,
    pub alphadot: f64,
    pub deltadot: f64,
    pub rho: f64,
    pub rhodot: f64,
}

/// Recover (alpha, delta, rates, rho, rhodot) of a state relative to an observer.
pub fn radec_view(state: &State6, obs: &ObserverState) -> Result<RadecView> {
    let u = state.r - obs.q;
    let rho = u.norm();
    if rho == 0.0 {
        return Err(Error::Singular("object coincides with observer".into()));
    }
    let erho = u / rho;
    let delta = erho.z.asin();
    let alpha = erho.y.atan2(erho.x);
    let frame = los_frame(alpha, delta, 0.0, 0.0)?;
    let udot = state.rdot - obs.qdot;
    let rhodot = udot.dot(&erho);
    let cd = delta.cos();
    let alphadot = udot.dot(&frame.ealpha) / (rho * cd);
    let deltadot = udot.dot(&frame.edelta) / rho;
    Ok(RadecView {
        alpha,
        delta,
        alphadot,
        deltadot,
        rho,
        rhodot,
    })
}
