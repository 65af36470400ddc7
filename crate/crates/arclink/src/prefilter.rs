//! Cheap prescreen for attributable pairs: does the range conic q = 0 meet
//! the admissible square [rho_min, rho_max]^2 at all? Pairs whose conic
//! misses the square cannot produce in-range linkages and are skipped before
//! the full polynomial solve.
//!
//! The test is exact for conics without cross term: intersect the conic with
//! the four boundary lines (univariate quadratics); if no boundary segment
//! is hit, a bounded conic is accepted only when it lies entirely inside the
//! square (center inside and no intersections with the infinite lines).
//! Decisions within a thin band of the boundary fail open.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linkage::ConicQ;

/// Admissible range interval, shared by both axes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RangeBox {
    pub rho_min: f64,
    pub rho_max: f64,
}

impl RangeBox {
    pub fn new(rho_min: f64, rho_max: f64) -> Result<Self> {
        if !(rho_min > 0.0 && rho_min < rho_max) {
            return Err(Error::InvalidInput(format!(
                "range box needs 0 < rho_min < rho_max, got [{rho_min}, {rho_max}]"
            )));
        }
        Ok(RangeBox { rho_min, rho_max })
    }

    fn band(&self) -> f64 {
        1e-9 * self.rho_max
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let b = self.band();
        x >= self.rho_min - b
            && x <= self.rho_max + b
            && y >= self.rho_min - b
            && y <= self.rho_max + b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConicKind {
    Ellipse,
    Circle,
    Parabola,
    Hyperbola,
    Degenerate,
}

impl ConicKind {
    pub fn bounded(self) -> bool {
        matches!(self, ConicKind::Ellipse | ConicKind::Circle)
    }
}

/// Conic classification with the center when it exists.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConicClass {
    pub kind: ConicKind,
    pub center: Option<(f64, f64)>,
}

/// Classify from the signs of q20, q02 (the conic has no cross term).
pub fn classify_conic(q: &ConicQ) -> ConicClass {
    let scale = q.max_abs_coeff();
    if scale == 0.0 {
        return ConicClass {
            kind: ConicKind::Degenerate,
            center: None,
        };
    }
    let tol = 1e-12 * scale;
    let n20 = q.q20.abs() > tol;
    let n02 = q.q02.abs() > tol;
    match (n20, n02) {
        (true, true) => {
            let center = Some((-q.q10 / (2.0 * q.q20), -q.q01 / (2.0 * q.q02)));
            if q.q20 * q.q02 > 0.0 {
                let kind = if (q.q20 - q.q02).abs() <= tol {
                    ConicKind::Circle
                } else {
                    ConicKind::Ellipse
                };
                ConicClass { kind, center }
            } else {
                ConicClass {
                    kind: ConicKind::Hyperbola,
                    center,
                }
            }
        }
        (true, false) => ConicClass {
            // q20 rho1^2 + q10 rho1 + q01 rho2 + q00: a parabola when the
            // rho2 line term survives, else parallel lines
            kind: if q.q01.abs() > tol {
                ConicKind::Parabola
            } else {
                ConicKind::Degenerate
            },
            center: None,
        },
        (false, true) => ConicClass {
            kind: if q.q10.abs() > tol {
                ConicKind::Parabola
            } else {
                ConicKind::Degenerate
            },
            center: None,
        },
        (false, false) => ConicClass {
            kind: ConicKind::Degenerate,
            center: None,
        },
    }
}

/// Real roots of a x^2 + b x + c = 0, degenerating gracefully to the linear
/// case.
fn quadratic_roots(a: f64, b: f64, c: f64, scale: f64) -> Vec<f64> {
    let tol = 1e-14 * scale;
    if a.abs() <= tol {
        if b.abs() <= tol {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let qq = -0.5 * (b + b.signum() * sq);
    if qq == 0.0 {
        return vec![0.0];
    }
    vec![qq / a, c / qq]
}

/// Intersections of the conic with the vertical line rho1 = x.
fn roots_on_vertical(q: &ConicQ, x: f64) -> Vec<f64> {
    quadratic_roots(
        q.q02,
        q.q01,
        q.q20 * x * x + q.q10 * x + q.q00,
        q.max_abs_coeff() * (1.0 + x * x),
    )
}

/// Intersections of the conic with the horizontal line rho2 = y.
fn roots_on_horizontal(q: &ConicQ, y: f64) -> Vec<f64> {
    quadratic_roots(
        q.q20,
        q.q10,
        q.q02 * y * y + q.q01 * y + q.q00,
        q.max_abs_coeff() * (1.0 + y * y),
    )
}

/// Outcome of the pair filter.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Acceptance {
    pub accept: bool,
    /// A point proving acceptance: a boundary hit or the conic center.
    pub witness: Option<(f64, f64)>,
    pub class: ConicClass,
    /// Degenerate conic accepted unconditionally (fail-open).
    pub fail_open: bool,
}

/// Decide whether the conic meets the admissible square.
pub fn accept_pair(q: &ConicQ, range: &RangeBox) -> Acceptance {
    let class = classify_conic(q);
    if class.kind == ConicKind::Degenerate {
        return Acceptance {
            accept: true,
            witness: None,
            class,
            fail_open: true,
        };
    }

    // boundary-segment intersections
    let mut any_line_hit = false;
    let mut witness = None;
    for x in [range.rho_min, range.rho_max] {
        let roots = roots_on_vertical(q, x);
        any_line_hit |= !roots.is_empty();
        for y in roots {
            if range.contains(x, y) && witness.is_none() {
                witness = Some((x, y));
            }
        }
    }
    for y in [range.rho_min, range.rho_max] {
        let roots = roots_on_horizontal(q, y);
        any_line_hit |= !roots.is_empty();
        for x in roots {
            if range.contains(x, y) && witness.is_none() {
                witness = Some((x, y));
            }
        }
    }
    if let Some(w) = witness {
        return Acceptance {
            accept: true,
            witness: Some(w),
            class,
            fail_open: false,
        };
    }

    if !class.kind.bounded() {
        // unbounded conic that misses the boundary cannot enter the square
        return Acceptance {
            accept: false,
            witness: None,
            class,
            fail_open: false,
        };
    }

    // bounded: entirely inside iff the curve is non-empty, the center is
    // inside, and the conic meets none of the four infinite lines. The sign
    // test q(center) * q20 > 0 detects an imaginary ellipse (empty curve).
    let (cx, cy) = class.center.expect("bounded conic has a center");
    let empty = q.eval(cx, cy) * q.q20 > 0.0;
    if !empty && range.contains(cx, cy) && !any_line_hit {
        Acceptance {
            accept: true,
            witness: Some((cx, cy)),
            class,
            fail_open: false,
        }
    } else {
        Acceptance {
            accept: false,
            witness: None,
            class,
            fail_open: false,
        }
    }
}
