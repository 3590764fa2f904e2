use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::MethodKind;
use super::curve::QfiCurve;

pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitForm {
    PowerLaw,
    LinearPlusQuadratic,
}

impl FromStr for FitForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power_law" => Ok(FitForm::PowerLaw),
            "quad" | "linear_plus_quadratic" => Ok(FitForm::LinearPlusQuadratic),
            other => Err(Error::config("form", format!("unknown fit form `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum FitReport {
    /// `F = prefactor N^slope`, fitted on `log F` against `log N`.
    PowerLaw {
        slope: f64,
        prefactor: f64,
        /// RMS residual of `log F`.
        residual: f64,
        points: usize,
    },
    /// `F = a N + b N^2`.
    LinearPlusQuadratic {
        a: f64,
        b: f64,
        covariance: [[f64; 2]; 2],
        residual: f64,
        points: usize,
    },
}

fn least_squares(design: DMatrix<f64>, y: DVector<f64>) -> Result<(DVector<f64>, f64, DMatrix<f64>)> {
    let gram = design.transpose() * &design;
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::domain("fit design matrix is singular"))?;
    let coef = design
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::domain(format!("least squares failed: {e}")))?;
    let resid = &y - &design * &coef;
    let rss = resid.norm_squared();
    let dof = (y.len() - coef.len()).max(1) as f64;
    let cov = inv * (rss / dof);
    Ok((coef, (rss / y.len() as f64).sqrt(), cov))
}

pub fn fit_scaling(ns: &[f64], values: &[f64], form: FitForm) -> Result<FitReport> {
    if ns.len() != values.len() {
        return Err(Error::domain("fit inputs differ in length"));
    }
    if ns.len() < MIN_FIT_POINTS {
        return Err(Error::domain(format!(
            "fit needs at least {MIN_FIT_POINTS} points, got {}",
            ns.len()
        )));
    }
    if ns.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::domain("fit inputs must be finite"));
    }
    let m = ns.len();
    match form {
        FitForm::PowerLaw => {
            if let Some(bad) = ns.iter().chain(values).find(|v| **v <= 0.0) {
                return Err(Error::domain(format!("power-law fit needs positive data, got {bad}")));
            }
            let design = DMatrix::from_fn(m, 2, |i, j| if j == 0 { 1.0 } else { ns[i].ln() });
            let y = DVector::from_iterator(m, values.iter().map(|v| v.ln()));
            let (coef, residual, _) = least_squares(design, y)?;
            Ok(FitReport::PowerLaw {
                slope: coef[1],
                prefactor: coef[0].exp(),
                residual,
                points: m,
            })
        }
        FitForm::LinearPlusQuadratic => {
            let design = DMatrix::from_fn(m, 2, |i, j| if j == 0 { ns[i] } else { ns[i] * ns[i] });
            let (coef, residual, cov) = least_squares(design, DVector::from_column_slice(values))?;
            Ok(FitReport::LinearPlusQuadratic {
                a: coef[0],
                b: coef[1],
                covariance: [[cov[(0, 0)], cov[(0, 1)]], [cov[(1, 0)], cov[(1, 1)]]],
                residual,
                points: m,
            })
        }
    }
}

/// Fits one method's rows of a curve against its sweep values.
/// `method` may be omitted when the curve holds a single method.
pub fn fit_curve(curve: &QfiCurve, method: Option<MethodKind>, form: FitForm) -> Result<FitReport> {
    let method = match method {
        Some(m) => m,
        None => match curve.methods().as_slice() {
            [only] => *only,
            many => {
                return Err(Error::config(
                    "method",
                    format!("curve holds {} methods; choose one", many.len()),
                ))
            }
        },
    };
    let (ns, values): (Vec<f64>, Vec<f64>) = curve.series(method).into_iter().unzip();
    fit_scaling(&ns, &values, form)
}
