//! Serializable per-pair reports. Angles cross the output boundary in
//! degrees; everything internal stays in radians.

use serde::Serialize;

use arclink::assess::LinkageSolution;
use arclink::j2::{J2Outcome, J2SeedResult};
use arclink::kepler::KeplerianElements;
use arclink::linkage::{NonDegeneracyReport, RootRecord};
use arclink::prefilter::Acceptance;

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub arc1: String,
    pub arc2: String,
    /// Present unless the prefilter was skipped.
    pub prefilter: Option<PrefilterRecord>,
    /// Absent when the prefilter rejected the pair or the solve errored.
    pub linkage: Option<LinkageRecord>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefilterRecord {
    pub accepted: bool,
    pub conic: String,
    pub fail_open: bool,
    pub witness: Option<(f64, f64)>,
}

impl PrefilterRecord {
    pub fn from_acceptance(a: &Acceptance, rho_scale: f64) -> Self {
        PrefilterRecord {
            accepted: a.accept,
            conic: format!("{:?}", a.class.kind).to_lowercase(),
            fail_open: a.fail_open,
            witness: a.witness.map(|(x, y)| (x * rho_scale, y * rho_scale)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkageRecord {
    pub nondegeneracy_pass: bool,
    pub nondegeneracy: NonDegeneracyReport,
    pub roots: Vec<RootRecord>,
    pub solutions: Vec<SolutionRecord>,
    pub j2: Option<J2Record>,
    /// No accepted solution with penalty at or below the threshold.
    pub unlikely_link: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementsRecord {
    pub epoch_mjd: f64,
    pub a: f64,
    pub e: f64,
    pub inc_deg: f64,
    pub raan_deg: f64,
    pub argp_deg: f64,
    pub mean_anomaly_deg: f64,
}

impl From<&KeplerianElements> for ElementsRecord {
    fn from(el: &KeplerianElements) -> Self {
        ElementsRecord {
            epoch_mjd: el.epoch.mjd,
            a: el.a,
            e: el.e,
            inc_deg: el.inc.to_degrees(),
            raan_deg: el.raan.to_degrees(),
            argp_deg: el.argp.to_degrees(),
            mean_anomaly_deg: el.mean_anomaly.to_degrees(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionRecord {
    pub rho1: f64,
    pub rho2: f64,
    pub rhodot1: f64,
    pub rhodot2: f64,
    pub residual_q: f64,
    pub residual_p1: f64,
    pub residual_p2: f64,
    pub state1: [f64; 6],
    pub state2: [f64; 6],
    pub elements1: Option<ElementsRecord>,
    pub elements2: Option<ElementsRecord>,
    pub energy1: f64,
    pub energy2: f64,
    pub flags: arclink::SolutionFlags,
    pub spurious: arclink::assess::SpuriousMetrics,
    /// Mahalanobis ranking penalty (not the chi4 attribution statistic).
    pub penalty_mahalanobis: Option<f64>,
    pub accepted: bool,
    pub covariance_car1: Option<[[f64; 6]; 6]>,
}

impl From<&LinkageSolution> for SolutionRecord {
    fn from(s: &LinkageSolution) -> Self {
        let pack = |st: &arclink::State6| [st.r.x, st.r.y, st.r.z, st.rdot.x, st.rdot.y, st.rdot.z];
        let cov = s.covariance.as_ref().map(|p| {
            let mut m = [[0.0; 6]; 6];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = p.gamma_car1[(i, j)];
                }
            }
            m
        });
        SolutionRecord {
            rho1: s.raw.rho1,
            rho2: s.raw.rho2,
            rhodot1: s.raw.rhodot1,
            rhodot2: s.raw.rhodot2,
            residual_q: s.raw.residual_q,
            residual_p1: s.raw.residual_p1,
            residual_p2: s.raw.residual_p2,
            state1: pack(&s.state1),
            state2: pack(&s.state2),
            elements1: s.kepler1.as_ref().map(Into::into),
            elements2: s.kepler2.as_ref().map(Into::into),
            energy1: s.energy1,
            energy2: s.energy2,
            flags: s.flags,
            spurious: s.spurious,
            penalty_mahalanobis: s.penalty,
            accepted: s.accepted,
            covariance_car1: cov,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct J2Record {
    pub seeds: Vec<J2SeedRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct J2SeedRecord {
    pub seed_rho1: f64,
    pub seed_rho2: f64,
    pub converged: bool,
    pub iterations: usize,
    pub residual_other_branch: Option<f64>,
    pub trace: Vec<arclink::j2::J2IterationRecord>,
    pub solution: Option<SolutionRecord>,
}

impl J2Record {
    pub fn from_outcome(out: &J2Outcome) -> Self {
        J2Record {
            seeds: out.seeds.iter().map(J2SeedRecord::from_seed).collect(),
        }
    }
}

impl J2SeedRecord {
    fn from_seed(s: &J2SeedResult) -> Self {
        J2SeedRecord {
            seed_rho1: s.seed.rho1,
            seed_rho2: s.seed.rho2,
            converged: s.converged,
            iterations: s.iterations,
            residual_other_branch: s.residual_other_branch,
            trace: s.trace.clone(),
            solution: s.solution.as_ref().map(SolutionRecord::from),
        }
    }
}
