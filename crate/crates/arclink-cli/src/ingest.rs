//! Observation-file ingestion: CSV rows grouped into arcs, attributables
//! fitted at each arc's mean epoch, observer states attached.

use std::path::Path;

use serde::Deserialize;

use arclink::attributable::{fit_attributable, AngularObservation, Attributable};
use arclink::{Epoch, ObserverState};

use crate::config::RunConfig;
use crate::ephemeris::EphemerisSource;
use crate::error::{CliError, Result};

const ARCSEC: f64 = std::f64::consts::PI / 180.0 / 3600.0;

#[derive(Debug, Deserialize)]
struct ObsRow {
    arc_id: String,
    station_id: String,
    mjd: f64,
    ra_deg: f64,
    dec_deg: f64,
    sigma_ra_arcsec: Option<f64>,
    sigma_dec_arcsec: Option<f64>,
}

/// One short arc with its fitted attributable and observer state at the
/// mean epoch.
#[derive(Clone, Debug)]
pub struct ObservedArc {
    pub id: String,
    pub station: String,
    pub observations: Vec<AngularObservation>,
    pub attributable: Attributable,
    pub observer: ObserverState,
}

/// Parse the observation file, group by arc, fit attributables, and attach
/// observer states at the mean epochs.
pub fn ingest(
    obs_path: &Path,
    source: &EphemerisSource,
    config: &RunConfig,
) -> Result<Vec<ObservedArc>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(obs_path)
        .map_err(|e| CliError::Ingestion(format!("{}: {e}", obs_path.display())))?;

    // group rows by arc id, preserving first-appearance order
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::BTreeMap<String, (String, Vec<AngularObservation>)> =
        std::collections::BTreeMap::new();
    for rec in rdr.deserialize::<ObsRow>() {
        let row = rec.map_err(|e| CliError::Parse {
            path: obs_path.display().to_string(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let sigma_ra = row.sigma_ra_arcsec.unwrap_or(config.fit.sigma_arcsec) * ARCSEC;
        let sigma_dec = row.sigma_dec_arcsec.unwrap_or(config.fit.sigma_arcsec) * ARCSEC;
        let obs = AngularObservation {
            epoch: Epoch::new(row.mjd),
            alpha: row.ra_deg.to_radians(),
            delta: row.dec_deg.to_radians(),
            sigma_alpha: sigma_ra,
            sigma_delta: sigma_dec,
        };
        let entry = groups
            .entry(row.arc_id.clone())
            .or_insert_with(|| (row.station_id.clone(), Vec::new()));
        if entry.0 != row.station_id {
            return Err(CliError::Ingestion(format!(
                "arc {} mixes stations {} and {}",
                row.arc_id, entry.0, row.station_id
            )));
        }
        if !order.contains(&row.arc_id) {
            order.push(row.arc_id.clone());
        }
        entry.1.push(obs);
    }

    let mut arcs = Vec::with_capacity(order.len());
    let mut missing = Vec::new();
    for id in order {
        let (station, observations) = groups.remove(&id).unwrap();
        if observations.len() < 2 {
            return Err(CliError::Ingestion(format!(
                "arc {id} has {} observation(s); need at least 2",
                observations.len()
            )));
        }
        for w in observations.windows(2) {
            if w[1].epoch.mjd <= w[0].epoch.mjd {
                return Err(CliError::Ingestion(format!(
                    "arc {id}: epochs not strictly increasing at MJD {}",
                    w[1].epoch.mjd
                )));
            }
        }
        let attributable = fit_attributable(&observations, config.mode)
            .map_err(|e| CliError::Ingestion(format!("arc {id}: {e}")))?;
        match source.observer(&station, attributable.epoch, config.mode, &config.ephemeris) {
            Ok(observer) => arcs.push(ObservedArc {
                id,
                station,
                observations,
                attributable,
                observer,
            }),
            Err(_) => missing.push(format!("{station} @ MJD {}", attributable.epoch.mjd)),
        }
    }
    if !missing.is_empty() {
        return Err(CliError::Ingestion(format!(
            "missing observer state coverage: {}",
            missing.join(", ")
        )));
    }
    Ok(arcs)
}

/// Parse an explicit pair list: one `arc_id_1,arc_id_2` per line.
pub fn parse_pairs(path: &Path, arcs: &[ObservedArc]) -> Result<Vec<(usize, usize)>> {
    let text = std::fs::read_to_string(path)?;
    let find = |id: &str| arcs.iter().position(|a| a.id == id);
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split(',').map(str::trim);
        let (a, b) = (it.next().unwrap_or(""), it.next().unwrap_or(""));
        let (ia, ib) = match (find(a), find(b)) {
            (Some(x), Some(y)) => (x, y),
            _ => {
                return Err(CliError::Parse {
                    path: path.display().to_string(),
                    line: (lineno + 1) as u64,
                    message: format!("unknown arc id in pair '{line}'"),
                })
            }
        };
        pairs.push((ia, ib));
    }
    Ok(pairs)
}
