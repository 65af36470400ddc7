//! Weighted least-squares fit of an attributable — angular position and
//! rates at the mean epoch of a short arc — with its 4x4 covariance.
//!
//! Right ascension noise is interpreted in great-circle units, so alpha
//! residuals are weighted by cos^2(delta_mean); the covariance then comes
//! out directly in alpha coordinates. For m > 3 observations the parameter
//! covariance is rescaled by chi^2/dof, which is flagged in the fit
//! metadata.

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::config::UnitMode;
use crate::error::{Error, Result};
use crate::geometry::Epoch;

/// Pole guard: the line-of-sight basis degenerates near |delta| = 90 deg.
const DEC_LIMIT: f64 = 89.9 * std::f64::consts::PI / 180.0;

/// One timed angular observation. Sigmas are 1-sigma noise in radians;
/// sigma_alpha is in great-circle units (already scaled by cos delta).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AngularObservation {
    pub epoch: Epoch,
    pub alpha: f64,
    pub delta: f64,
    pub sigma_alpha: f64,
    pub sigma_delta: f64,
}

/// Diagnostics of the attributable fit.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FitMeta {
    pub n_obs: usize,
    pub chi2: f64,
    pub dof: usize,
    /// True when the covariance was inflated by chi2/dof.
    pub rescaled: bool,
    pub arc_span_days: f64,
}

/// Angular position and velocity at the mean epoch, with covariance in the
/// order (alpha, delta, alphadot, deltadot). Rates are per canonical time
/// unit of the mode the fit was run in.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Attributable {
    pub alpha: f64,
    pub delta: f64,
    pub alphadot: f64,
    pub deltadot: f64,
    pub epoch: Epoch,
    pub gamma: Matrix4<f64>,
    pub fit: FitMeta,
}

impl Attributable {
    /// An attributable with prescribed values and a diagonal covariance
    /// (used by synthetic scenarios and ingestion of exact data).
    pub fn exact(
        alpha: f64,
        delta: f64,
        alphadot: f64,
        deltadot: f64,
        epoch: Epoch,
        sigma: f64,
    ) -> Self {
        Attributable {
            alpha,
            delta,
            alphadot,
            deltadot,
            epoch,
            gamma: Matrix4::from_diagonal_element(sigma * sigma),
            fit: FitMeta {
                n_obs: 0,
                chi2: 0.0,
                dof: 0,
                rescaled: false,
                arc_span_days: 0.0,
            },
        }
    }
}

fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a.rem_euclid(two_pi);
    if x >= std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

/// Weighted polynomial fit of one coordinate; returns value and derivative at
/// tau = 0 plus their 2x2 covariance and the chi-square.
fn fit_coordinate(
    tau: &[f64],
    y: &[f64],
    weights: &[f64],
    degree: usize,
) -> Result<([f64; 2], nalgebra::Matrix2<f64>, f64)> {
    let m = tau.len();
    let npar = degree + 1;
    let mut a = DMatrix::zeros(m, npar);
    for (i, &t) in tau.iter().enumerate() {
        let mut pow = 1.0;
        for k in 0..npar {
            a[(i, k)] = pow;
            pow *= t;
        }
    }
    let w = DMatrix::from_diagonal(&DVector::from_row_slice(weights));
    let normal = a.transpose() * &w * &a;
    let rhs = a.transpose() * &w * DVector::from_row_slice(y);
    let inv = normal.clone().try_inverse().ok_or_else(|| {
        Error::Fit("rank-deficient design matrix (duplicate observation times?)".into())
    })?;
    let params = &inv * rhs;
    let fitted = &a * &params;
    let mut chi2 = 0.0;
    for i in 0..m {
        let r = y[i] - fitted[i];
        chi2 += weights[i] * r * r;
    }
    let value = params[0];
    let deriv = if npar > 1 { params[1] } else { 0.0 };
    let cov = nalgebra::Matrix2::new(
        inv[(0, 0)],
        if npar > 1 { inv[(0, 1)] } else { 0.0 },
        if npar > 1 { inv[(1, 0)] } else { 0.0 },
        if npar > 1 { inv[(1, 1)] } else { 0.0 },
    );
    Ok(([value, deriv], cov, chi2))
}

/// Fit an attributable at the mean epoch of the arc.
///
/// m = 2 uses exact linear interpolation; m >= 3 a weighted quadratic fit
/// whose second derivative is discarded. Alpha is unwrapped across the
/// +-pi branch before fitting.
pub fn fit_attributable(obs: &[AngularObservation], mode: UnitMode) -> Result<Attributable> {
    let m = obs.len();
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "attributable fit needs at least 2 observations, got {m}"
        )));
    }
    for o in obs {
        if o.sigma_alpha <= 0.0 || o.sigma_delta <= 0.0 {
            return Err(Error::InvalidInput(
                "observation sigma must be positive".into(),
            ));
        }
        if o.delta.abs() >= DEC_LIMIT {
            return Err(Error::InvalidInput(format!(
                "declination {:.4} rad too close to the pole",
                o.delta
            )));
        }
    }

    let mut sorted: Vec<AngularObservation> = obs.to_vec();
    sorted.sort_by(|a, b| a.epoch.mjd.partial_cmp(&b.epoch.mjd).unwrap());

    let t_mean = sorted.iter().map(|o| o.epoch.mjd).sum::<f64>() / m as f64;
    let span = sorted.last().unwrap().epoch.mjd - sorted[0].epoch.mjd;
    if span == 0.0 {
        return Err(Error::Fit("all observation times equal".into()));
    }
    let tau: Vec<f64> = sorted
        .iter()
        .map(|o| mode.days_to_time(o.epoch.mjd - t_mean))
        .collect();

    // unwrap alpha across the +-pi branch
    let mut alphas = Vec::with_capacity(m);
    let mut prev = sorted[0].alpha;
    let mut offset = 0.0;
    let two_pi = 2.0 * std::f64::consts::PI;
    for o in &sorted {
        let mut a = o.alpha + offset;
        while a - prev > std::f64::consts::PI {
            a -= two_pi;
            offset -= two_pi;
        }
        while a - prev < -std::f64::consts::PI {
            a += two_pi;
            offset += two_pi;
        }
        alphas.push(a);
        prev = a;
    }
    let deltas: Vec<f64> = sorted.iter().map(|o| o.delta).collect();

    let delta_mean = deltas.iter().sum::<f64>() / m as f64;
    let cosd = delta_mean.cos();
    let w_alpha: Vec<f64> = sorted
        .iter()
        .map(|o| cosd * cosd / (o.sigma_alpha * o.sigma_alpha))
        .collect();
    let w_delta: Vec<f64> = sorted
        .iter()
        .map(|o| 1.0 / (o.sigma_delta * o.sigma_delta))
        .collect();

    let degree = if m == 2 { 1 } else { 2 };
    let ([alpha, alphadot], cov_a, chi2_a) = fit_coordinate(&tau, &alphas, &w_alpha, degree)?;
    let ([delta, deltadot], cov_d, chi2_d) = fit_coordinate(&tau, &deltas, &w_delta, degree)?;

    if delta.abs() >= DEC_LIMIT {
        return Err(Error::InvalidInput(
            "fitted declination too close to the pole".into(),
        ));
    }

    let npar = degree + 1;
    let dof_per_coord = m.saturating_sub(npar);
    let (factor_a, factor_d, rescaled) = if m > 3 && dof_per_coord > 0 {
        (
            chi2_a / dof_per_coord as f64,
            chi2_d / dof_per_coord as f64,
            true,
        )
    } else {
        (1.0, 1.0, false)
    };

    let mut gamma = Matrix4::zeros();
    gamma[(0, 0)] = cov_a[(0, 0)] * factor_a;
    gamma[(0, 2)] = cov_a[(0, 1)] * factor_a;
    gamma[(2, 0)] = cov_a[(1, 0)] * factor_a;
    gamma[(2, 2)] = cov_a[(1, 1)] * factor_a;
    gamma[(1, 1)] = cov_d[(0, 0)] * factor_d;
    gamma[(1, 3)] = cov_d[(0, 1)] * factor_d;
    gamma[(3, 1)] = cov_d[(1, 0)] * factor_d;
    gamma[(3, 3)] = cov_d[(1, 1)] * factor_d;

    Ok(Attributable {
        alpha: wrap_angle(alpha),
        delta,
        alphadot,
        deltadot,
        epoch: Epoch::new(t_mean),
        gamma,
        fit: FitMeta {
            n_obs: m,
            chi2: chi2_a + chi2_d,
            dof: 2 * dof_per_coord,
            rescaled,
            arc_span_days: span,
        },
    })
}
