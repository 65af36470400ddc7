//! Linkage of too-short optical arcs into preliminary two-body orbits.
//!
//! Two short arcs of angular observations each yield an attributable
//! (angles and angular rates at a mean epoch) but no ranges. Conservation
//! of angular momentum plus a combination of the Laplace-Lenz and energy
//! integrals turn the linkage into an overdetermined polynomial system in
//! the two topocentric ranges; elimination collapses it to a degree-9
//! univariate polynomial whose real positive roots are the candidate
//! linkages. The crate provides:
//!
//! * [`geometry`]: observation-direction bases and the two-body integrals,
//! * [`attributable`]: least-squares attributable fits with covariance,
//! * [`bipoly`]: the small dense polynomial algebra and root finding,
//! * [`linkage`]: construction and solution of the polynomial system,
//! * [`assess`]: physical filtering, spurious-solution classification,
//!   compatibility penalty and covariance propagation,
//! * [`j2`]: the iterative re-linkage under Earth-oblateness drift,
//! * [`prefilter`]: the conic-vs-range-box batch prescreen,
//! * [`kepler`]: element conversions and universal-variable propagation,
//! * [`synth`]: synthetic-scenario generation used by tests and benchmarks.

pub mod assess;
pub mod attributable;
pub mod bipoly;
pub mod config;
pub mod error;
pub mod geometry;
pub mod j2;
pub mod kepler;
pub mod linkage;
pub mod prefilter;
pub mod synth;

pub use assess::{assess_solutions, LinkageSolution, SolutionFlags};
pub use attributable::{fit_attributable, AngularObservation, Attributable};
pub use config::{LinkConfig, UnitMode};
pub use error::{Error, Result};
pub use geometry::{Epoch, ObserverState, State6, Vec3};
pub use kepler::KeplerianElements;
pub use linkage::{solve_linkage, LinkageOutcome, NonDegeneracyReport, RawSolution};
pub use prefilter::{accept_pair, classify_conic, ConicClass, RangeBox};
