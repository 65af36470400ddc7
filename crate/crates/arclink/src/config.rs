//! Unit systems and engine tolerances.
//!
//! Two canonical unit systems are supported: heliocentric (AU, day,
//! mu = k^2 with k the Gauss constant) for asteroid work, and geocentric
//! (km, s) for Earth satellites and debris. All internal math is
//! unit-agnostic; the mode only fixes the constants and the time unit
//! used when converting epochs expressed in MJD.

use serde::{Deserialize, Serialize};

/// Gauss gravitational constant, AU^(3/2)/day.
pub const GAUSS_K: f64 = 0.01720209895;
/// Heliocentric gravitational parameter, AU^3/day^2.
pub const MU_SUN: f64 = GAUSS_K * GAUSS_K;
/// Geocentric gravitational parameter, km^3/s^2.
pub const MU_EARTH: f64 = 398600.4418;
/// Earth equatorial radius, km.
pub const R_EARTH: f64 = 6378.1363;
/// Earth rotation rate, rad/s (sidereal).
pub const OMEGA_EARTH: f64 = 7.292115e-5;
/// Earth oblateness coefficient (dimensionless), a conventional value.
pub const J2_EARTH: f64 = 1.08262668e-3;

/// Canonical unit system selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    /// Lengths in AU, times in days, mu = GAUSS_K^2.
    Heliocentric,
    /// Lengths in km, times in seconds, mu = MU_EARTH.
    Geocentric,
}

impl UnitMode {
    pub fn default_mu(self) -> f64 {
        match self {
            UnitMode::Heliocentric => MU_SUN,
            UnitMode::Geocentric => MU_EARTH,
        }
    }

    /// Seconds per canonical time unit (86400 for days, 1 for seconds).
    pub fn seconds_per_time_unit(self) -> f64 {
        match self {
            UnitMode::Heliocentric => 86400.0,
            UnitMode::Geocentric => 1.0,
        }
    }

    /// Convert an interval in days (MJD differences) to canonical time units.
    pub fn days_to_time(self, days: f64) -> f64 {
        days * 86400.0 / self.seconds_per_time_unit()
    }
}

/// Tolerances and switches for the linkage engine and solution selection.
///
/// Every threshold that gates a numerical decision lives here so batch
/// runs can pin them in one place.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct LinkConfig {
    pub mode: UnitMode,
    /// Gravitational parameter in mode units.
    pub mu: f64,
    /// Relative threshold under which a quantity counts as degenerate zero.
    pub eps_deg: f64,
    /// Cross-validation threshold: a root of u1~ is kept if the scaled
    /// residual of u2~ there stays below tau_x.
    pub tau_x: f64,
    /// Deflation remainder threshold (warning level).
    pub tau_defl: f64,
    /// Deflation remainder level at which the warning escalates to an error.
    pub tau_defl_escalate: f64,
    /// Spurious-solution threshold on the normalized intermediate-system residual.
    pub tau_sp: f64,
    /// Spurious-solution threshold on | |L1-L2| - 2 |.
    pub tau_l2: f64,
    /// Roots with |Im| < im_tol * (1 + |Re|) are treated as real.
    pub im_tol: f64,
    /// Admissible range interval (mode length units).
    pub rho_min: f64,
    pub rho_max: f64,
    /// Aberth iteration cap.
    pub root_max_iter: usize,
    /// Eliminate rho1 and keep rho2 (the default); false runs the mirrored
    /// elimination with the two epochs swapped internally.
    pub eliminate_rho1: bool,
    /// Penalty above which a linkage is marked unlikely.
    pub penalty_threshold: f64,
}

impl LinkConfig {
    pub fn heliocentric() -> Self {
        LinkConfig {
            mode: UnitMode::Heliocentric,
            mu: MU_SUN,
            rho_min: 1.0e-3,
            rho_max: 1.0e3,
            ..Self::base(UnitMode::Heliocentric)
        }
    }

    pub fn geocentric() -> Self {
        LinkConfig {
            mode: UnitMode::Geocentric,
            mu: MU_EARTH,
            rho_min: 1.0,
            rho_max: 1.0e6,
            ..Self::base(UnitMode::Geocentric)
        }
    }

    fn base(mode: UnitMode) -> Self {
        LinkConfig {
            mode,
            mu: mode.default_mu(),
            eps_deg: 1.0e-10,
            tau_x: 1.0e-6,
            tau_defl: 1.0e-6,
            tau_defl_escalate: 1.0e-4,
            tau_sp: 1.0e-2,
            tau_l2: 1.0e-2,
            im_tol: 1.0e-7,
            rho_min: 1.0e-3,
            rho_max: 1.0e3,
            root_max_iter: 200,
            eliminate_rho1: true,
            penalty_threshold: 10.0,
        }
    }
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self::heliocentric()
    }
}
