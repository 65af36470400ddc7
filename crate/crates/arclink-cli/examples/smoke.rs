//! Writes a small synthetic input set and runs the batch, printing the report.

use std::fmt::Write as _;

use arclink::config::MU_SUN;
use arclink::geometry::{radec_view, Epoch};
use arclink::kepler::{keplerian_to_cartesian, propagate_universal};
use arclink::synth::heliocentric_observer;
use arclink::{KeplerianElements, UnitMode};
use arclink_cli::ephemeris::EphemerisSource;
use arclink_cli::{default_pairs, ingest, run_linkage_batch, RunConfig, RunOptions};

fn main() {
    let el = KeplerianElements {
        a: 1.7,
        e: 0.12,
        inc: 0.4,
        raan: 1.0,
        argp: 2.2,
        mean_anomaly: 0.5,
        epoch: Epoch::new(54000.0),
    };
    let base = keplerian_to_cartesian(&el, MU_SUN).unwrap();
    let mut text =
        String::from("arc_id,station_id,mjd,ra_deg,dec_deg,sigma_ra_arcsec,sigma_dec_arcsec\n");
    for (arc, t0) in [("one", 54090.0), ("two", 54210.0)] {
        for k in 0..4 {
            let mjd = t0 + 0.5 * k as f64;
            let dt = UnitMode::Heliocentric.days_to_time(mjd - el.epoch.mjd);
            let mut st = propagate_universal(&base, dt, MU_SUN).unwrap();
            st.epoch = Epoch::new(mjd);
            let obs = heliocentric_observer(st.epoch, 0.0);
            let v = radec_view(&st, &obs).unwrap();
            writeln!(
                text,
                "{arc},S1,{mjd:.9},{:.12},{:.12},1.0,1.0",
                v.alpha.to_degrees(),
                v.delta.to_degrees()
            )
            .unwrap();
        }
    }
    let dir = std::env::temp_dir().join("arclink_smoke");
    std::fs::create_dir_all(&dir).unwrap();
    let obs = dir.join("obs.csv");
    std::fs::write(&obs, text).unwrap();

    let config = RunConfig::default();
    let arcs = ingest(&obs, &EphemerisSource::BuiltinCircular, &config).unwrap();
    let reports = run_linkage_batch(
        &arcs,
        &default_pairs(arcs.len()),
        &config,
        &RunOptions::default(),
    );
    println!("{}", serde_json::to_string_pretty(&reports).unwrap());
}
