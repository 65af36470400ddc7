//! Observer state sources: a state file (exact rows with linear
//! interpolation between bracketing rows of the same station) or the
//! builtin analytic models.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use arclink::config::{GAUSS_K, OMEGA_EARTH, R_EARTH};
use arclink::{Epoch, ObserverState, UnitMode, Vec3};

use crate::config::EphemerisSection;
use crate::error::{CliError, Result};

/// Epochs closer than this (days) count as the same instant.
const EPOCH_TOL: f64 = 1e-9;

#[derive(Debug, Deserialize)]
struct StateRow {
    station_id: String,
    mjd: f64,
    x: f64,
    y: f64,
    z: f64,
    vx: f64,
    vy: f64,
    vz: f64,
}

/// Per-station time series of observer states.
#[derive(Debug, Default)]
pub struct StateTable {
    by_station: BTreeMap<String, Vec<(f64, Vec3, Vec3)>>,
}

impl StateTable {
    pub fn from_csv(path: &Path) -> Result<StateTable> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::Ingestion(format!("{}: {e}", path.display())))?;
        let mut table = StateTable::default();
        for rec in rdr.deserialize::<StateRow>() {
            let row = rec.map_err(|e| CliError::Parse {
                path: path.display().to_string(),
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            table.by_station.entry(row.station_id).or_default().push((
                row.mjd,
                Vec3::new(row.x, row.y, row.z),
                Vec3::new(row.vx, row.vy, row.vz),
            ));
        }
        for series in table.by_station.values_mut() {
            series.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }
        Ok(table)
    }

    /// State of a station at an epoch: an exact row, or linear interpolation
    /// between the bracketing rows.
    pub fn lookup(&self, station: &str, epoch: Epoch) -> Result<ObserverState> {
        let series = self.by_station.get(station).ok_or_else(|| {
            CliError::Ingestion(format!("no observer states for station {station}"))
        })?;
        let t = epoch.mjd;
        // exact row
        if let Some((_, q, qdot)) = series.iter().find(|(m, _, _)| (m - t).abs() <= EPOCH_TOL) {
            return Ok(ObserverState {
                q: *q,
                qdot: *qdot,
                epoch,
            });
        }
        // bracketing rows
        let after = series.iter().position(|(m, _, _)| *m > t);
        match after {
            Some(idx) if idx > 0 => {
                let (t0, q0, v0) = series[idx - 1];
                let (t1, q1, v1) = series[idx];
                let w = (t - t0) / (t1 - t0);
                Ok(ObserverState {
                    q: q0 * (1.0 - w) + q1 * w,
                    qdot: v0 * (1.0 - w) + v1 * w,
                    epoch,
                })
            }
            _ => Err(CliError::Ingestion(format!(
                "station {station} has no state coverage at MJD {t}"
            ))),
        }
    }
}

/// Source of observer states.
pub enum EphemerisSource {
    File(StateTable),
    BuiltinCircular,
}

impl EphemerisSource {
    pub fn observer(
        &self,
        station: &str,
        epoch: Epoch,
        mode: UnitMode,
        section: &EphemerisSection,
    ) -> Result<ObserverState> {
        match self {
            EphemerisSource::File(table) => table.lookup(station, epoch),
            EphemerisSource::BuiltinCircular => Ok(builtin_circular(epoch, mode, section)),
        }
    }
}

/// Heliocentric: observer on a circular 1 AU ecliptic orbit. Geocentric:
/// station fixed on the rotating sphere of radius R_EARTH at the configured
/// latitude/longitude.
pub fn builtin_circular(epoch: Epoch, mode: UnitMode, section: &EphemerisSection) -> ObserverState {
    match mode {
        UnitMode::Heliocentric => {
            let theta = GAUSS_K * epoch.mjd + section.phase0;
            let (s, c) = theta.sin_cos();
            ObserverState {
                q: Vec3::new(c, s, 0.0),
                qdot: Vec3::new(-s, c, 0.0) * GAUSS_K,
                epoch,
            }
        }
        UnitMode::Geocentric => {
            let lat = section.station_lat_deg.to_radians();
            let lon = section.station_lon_deg.to_radians();
            let theta = OMEGA_EARTH * (epoch.mjd - 51544.5) * 86400.0 + lon;
            let (st, ct) = theta.sin_cos();
            let (sl, cl) = lat.sin_cos();
            ObserverState {
                q: Vec3::new(cl * ct, cl * st, sl) * R_EARTH,
                qdot: Vec3::new(-cl * st, cl * ct, 0.0) * (R_EARTH * OMEGA_EARTH),
                epoch,
            }
        }
    }
}
