//! Run configuration file (TOML) and its mapping onto the engine knobs.

use serde::{Deserialize, Serialize};

use arclink::config::{J2_EARTH, R_EARTH};
use arclink::j2::{Branch, J2Config};
use arclink::{LinkConfig, UnitMode};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub mode: UnitMode,
    /// Gravitational parameter override (mode units); mode default if absent.
    pub mu: Option<f64>,
    /// Admissible range interval (mode length units); mode defaults if absent.
    pub rho_min: Option<f64>,
    pub rho_max: Option<f64>,
    pub tolerances: Tolerances,
    pub fit: FitDefaults,
    pub j2: J2Section,
    pub ephemeris: EphemerisSection,
    /// Accepted solutions with penalty above this mark the pair unlikely.
    pub penalty_threshold: f64,
    /// Grid resolution of the --plot curve sampling.
    pub plot_grid: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: UnitMode::Heliocentric,
            mu: None,
            rho_min: None,
            rho_max: None,
            tolerances: Tolerances::default(),
            fit: FitDefaults::default(),
            j2: J2Section::default(),
            ephemeris: EphemerisSection::default(),
            penalty_threshold: 10.0,
            plot_grid: 161,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub eps_deg: f64,
    pub tau_x: f64,
    pub tau_defl: f64,
    pub tau_defl_escalate: f64,
    pub tau_sp: f64,
    pub tau_l2: f64,
    pub im_tol: f64,
    pub root_max_iter: usize,
    /// Use the mirrored elimination (solve for rho1 instead of rho2).
    pub eliminate_rho2: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        let base = LinkConfig::heliocentric();
        Tolerances {
            eps_deg: base.eps_deg,
            tau_x: base.tau_x,
            tau_defl: base.tau_defl,
            tau_defl_escalate: base.tau_defl_escalate,
            tau_sp: base.tau_sp,
            tau_l2: base.tau_l2,
            im_tol: base.im_tol,
            root_max_iter: base.root_max_iter,
            eliminate_rho2: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct FitDefaults {
    /// 1-sigma noise assumed when an observation row leaves sigma blank.
    pub sigma_arcsec: f64,
}

impl Default for FitDefaults {
    fn default() -> Self {
        FitDefaults { sigma_arcsec: 1.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct J2Section {
    pub j2: f64,
    pub r_body: f64,
    pub max_iter: usize,
    pub tol_rho: f64,
    /// "p1" or "p2"
    pub branch: String,
    pub damping: f64,
}

impl Default for J2Section {
    fn default() -> Self {
        J2Section {
            j2: J2_EARTH,
            r_body: R_EARTH,
            max_iter: 20,
            tol_rho: 1e-8,
            branch: "p1".into(),
            damping: 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct EphemerisSection {
    /// Heliocentric builtin model: orbital phase (rad) at MJD 0.
    pub phase0: f64,
    /// Geocentric builtin model: station latitude/longitude (degrees).
    pub station_lat_deg: f64,
    pub station_lon_deg: f64,
}

impl Default for EphemerisSection {
    fn default() -> Self {
        EphemerisSection {
            phase0: 0.0,
            station_lat_deg: 0.0,
            station_lon_deg: 0.0,
        }
    }
}

impl RunConfig {
    pub fn link_config(&self) -> LinkConfig {
        let mut cfg = match self.mode {
            UnitMode::Heliocentric => LinkConfig::heliocentric(),
            UnitMode::Geocentric => LinkConfig::geocentric(),
        };
        if let Some(mu) = self.mu {
            cfg.mu = mu;
        }
        if let Some(v) = self.rho_min {
            cfg.rho_min = v;
        }
        if let Some(v) = self.rho_max {
            cfg.rho_max = v;
        }
        cfg.eps_deg = self.tolerances.eps_deg;
        cfg.tau_x = self.tolerances.tau_x;
        cfg.tau_defl = self.tolerances.tau_defl;
        cfg.tau_defl_escalate = self.tolerances.tau_defl_escalate;
        cfg.tau_sp = self.tolerances.tau_sp;
        cfg.tau_l2 = self.tolerances.tau_l2;
        cfg.im_tol = self.tolerances.im_tol;
        cfg.root_max_iter = self.tolerances.root_max_iter;
        cfg.eliminate_rho1 = !self.tolerances.eliminate_rho2;
        cfg.penalty_threshold = self.penalty_threshold;
        cfg
    }

    pub fn j2_config(&self) -> J2Config {
        J2Config {
            j2: self.j2.j2,
            r_body: self.j2.r_body,
            max_iter: self.j2.max_iter,
            tol_rho: self.j2.tol_rho,
            branch: if self.j2.branch.eq_ignore_ascii_case("p2") {
                Branch::P2
            } else {
                Branch::P1
            },
            damping: self.j2.damping,
        }
    }
}
