//! The batch pipeline: pair enumeration, prefilter, linkage, assessment and
//! report assembly. Failures are isolated per pair; the batch always
//! completes.

use std::path::Path;

use arclink::assess::assess_solutions;
use arclink::j2::j2_linkage;
use arclink::linkage::{build_q, epoch_geometry, solve_linkage};
use arclink::prefilter::{accept_pair, RangeBox};
use arclink::ObserverState;

use crate::config::RunConfig;
use crate::error::Result;
use crate::ingest::ObservedArc;
use crate::report::{J2Record, LinkageRecord, PairReport, PrefilterRecord, SolutionRecord};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub use_j2: bool,
    pub skip_prefilter: bool,
    pub plot_dir: Option<std::path::PathBuf>,
}

/// All unordered pairs in input order.
pub fn default_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

/// Run the batch over the given pairs, emitting one report per pair in
/// input order.
pub fn run_linkage_batch(
    arcs: &[ObservedArc],
    pairs: &[(usize, usize)],
    config: &RunConfig,
    options: &RunOptions,
) -> Vec<PairReport> {
    pairs
        .iter()
        .map(|&(i, j)| run_pair(&arcs[i], &arcs[j], config, options))
        .collect()
}

fn run_pair(
    arc1: &ObservedArc,
    arc2: &ObservedArc,
    config: &RunConfig,
    options: &RunOptions,
) -> PairReport {
    // epoch order: the engine convention puts the earlier arc first
    let (first, second) = if arc1.attributable.epoch.mjd <= arc2.attributable.epoch.mjd {
        (arc1, arc2)
    } else {
        (arc2, arc1)
    };
    let mut report = PairReport {
        arc1: first.id.clone(),
        arc2: second.id.clone(),
        prefilter: None,
        linkage: None,
        error: None,
    };
    match run_pair_inner(first, second, config, options, &mut report) {
        Ok(()) => {}
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

fn run_pair_inner(
    first: &ObservedArc,
    second: &ObservedArc,
    config: &RunConfig,
    options: &RunOptions,
    report: &mut PairReport,
) -> Result<()> {
    let cfg = config.link_config();
    let a1 = &first.attributable;
    let a2 = &second.attributable;
    let o1 = &first.observer;
    let o2 = &second.observer;

    if !options.skip_prefilter {
        // the prefilter sees the same scaled conic the solver would build
        let rho_scale = o1.q.norm().max(o2.q.norm());
        let scale_obs = |o: &ObserverState| ObserverState {
            q: o.q / rho_scale,
            qdot: o.qdot / rho_scale,
            epoch: o.epoch,
        };
        let g1 = epoch_geometry(a1, &scale_obs(o1))?;
        let g2 = epoch_geometry(a2, &scale_obs(o2))?;
        let (conic, _) = build_q(&g1, &g2, cfg.eps_deg)?;
        let range = RangeBox::new(cfg.rho_min / rho_scale, cfg.rho_max / rho_scale)?;
        let decision = accept_pair(&conic, &range);
        report.prefilter = Some(PrefilterRecord::from_acceptance(&decision, rho_scale));
        if !decision.accept {
            return Ok(());
        }
    }

    let outcome = solve_linkage(a1, a2, o1, o2, &cfg)?;
    let solutions = assess_solutions(&outcome, a1, a2, o1, o2, &cfg);

    let j2 = if options.use_j2 {
        let j2cfg = config.j2_config();
        match j2_linkage(a1, a2, o1, o2, &cfg, &j2cfg) {
            Ok(out) => Some(J2Record::from_outcome(&out)),
            Err(e) => {
                report.error = Some(format!("j2 iteration: {e}"));
                None
            }
        }
    } else {
        None
    };

    let unlikely_link = !solutions
        .iter()
        .any(|s| s.accepted && s.penalty.is_some_and(|p| p <= cfg.penalty_threshold));

    if let Some(dir) = &options.plot_dir {
        write_plot_files(dir, report, &outcome, config)?;
    }

    report.linkage = Some(LinkageRecord {
        nondegeneracy_pass: outcome.nondegeneracy.all_pass(),
        nondegeneracy: outcome.nondegeneracy.clone(),
        roots: outcome.roots.clone(),
        solutions: solutions.iter().map(SolutionRecord::from).collect(),
        j2,
        unlikely_link,
    });
    Ok(())
}

/// Curve data for external plotting: q, p1, p2 sampled on a grid over the
/// admissible square, plus the root markers.
fn write_plot_files(
    dir: &Path,
    report: &PairReport,
    outcome: &arclink::LinkageOutcome,
    config: &RunConfig,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let cfg = config.link_config();
    let stem = format!("pair_{}_{}", report.arc1, report.arc2);
    let n = config.plot_grid.max(2);
    let scale = outcome.rho_scale;

    let mut w = csv::Writer::from_path(dir.join(format!("{stem}_curves.csv")))?;
    w.write_record(["rho1", "rho2", "q", "p1", "p2"])?;
    for i in 0..n {
        let rho1 = cfg.rho_min + (cfg.rho_max - cfg.rho_min) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let rho2 = cfg.rho_min + (cfg.rho_max - cfg.rho_min) * j as f64 / (n - 1) as f64;
            let (xs, ys) = (rho1 / scale, rho2 / scale);
            w.write_record([
                format!("{rho1:.9e}"),
                format!("{rho2:.9e}"),
                format!("{:.9e}", outcome.polys.q.eval(xs, ys)),
                format!("{:.9e}", outcome.polys.p1.eval(xs, ys)),
                format!("{:.9e}", outcome.polys.p2.eval(xs, ys)),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join(format!("{stem}_roots.csv")))?;
    w.write_record(["rho1", "rho2", "accepted"])?;
    for s in &outcome.solutions {
        w.write_record([
            format!("{:.9e}", s.rho1),
            format!("{:.9e}", s.rho2),
            "raw".to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
