//! Quantum Fisher information for estimating the transverse field `h`.

mod analytic;
mod finite_diff;
mod generator;

pub use analytic::{
    generator_coeffs_analytic, local_qfi_analytic, local_qfi_no_zeeman, precession_frequency, qfi_analytic_t0,
    qfi_no_zeeman, qfi_stretched_probe, sensing_time, sql_reference, sx_expectation_analytic, sx_trajectory_no_zeeman,
    GeneratorCoeffs, RingPolarization, SensingKind,
};
pub use finite_diff::{default_step, local_qfi_fd, qfi_pure_fd, FdEstimate, FieldStencil, StencilStates, FD_AGREEMENT_TOL};
pub use generator::{generator_exact, project_generator, qfi_from_generator, GeneratorProjection};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::C64;
use crate::space::HilbertSpace;
use crate::state::{product_state, BlochVector, StateVector};

/// Negative values above this are rounding noise and clip to zero.
const QFI_NOISE_FLOOR: f64 = 1e-9;
/// Below this the reduced qubit state counts as pure.
const PURITY_TOL: f64 = 1e-12;

pub(crate) fn clip_qfi(f: f64) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::Internal(format!("non-finite QFI {f}")));
    }
    if f < 0.0 {
        if f < -QFI_NOISE_FLOOR * f.abs().max(1.0) {
            return Err(Error::Internal(format!("negative QFI {f}")));
        }
        return Ok(0.0);
    }
    Ok(f)
}

/// QFI of a qubit with Bloch vector `v` and derivative `dv`.
pub fn local_qubit_qfi(v: BlochVector, dv: BlochVector) -> Result<f64> {
    let r2 = v.norm_squared();
    if r2 > 1.0 + 1e-10 {
        return Err(Error::domain(format!("Bloch vector length {} exceeds 1", r2.sqrt())));
    }
    let mixedness = 1.0 - r2;
    if mixedness < PURITY_TOL {
        return Ok(dv.norm_squared());
    }
    let p = v.dot(&dv);
    Ok(dv.norm_squared() + p * p / mixedness)
}

/// `Delta h = sqrt(<O^2> - <O>^2) / |d<O>/dh|`; infinite for a flat signal.
pub fn error_propagation(mean: f64, second_moment: f64, slope: f64) -> Result<f64> {
    let var = second_moment - mean * mean;
    if var < -1e-12 {
        return Err(Error::domain(format!("negative variance {var}")));
    }
    if slope == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(var.max(0.0).sqrt() / slope.abs())
}

/// Ring orientation of the optimal probe `(|up> u^N + |up> v^N) / sqrt 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalProbe {
    pub theta: f64,
    pub phi: f64,
}

impl OptimalProbe {
    pub fn spinors(&self) -> ([C64; 2], [C64; 2]) {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let lo = C64::from_polar(1.0, -0.5 * self.phi);
        let hi = C64::from_polar(1.0, 0.5 * self.phi);
        ([lo * c, hi * s], [-lo * s, hi * c])
    }

    pub fn state(&self, space: HilbertSpace) -> Result<StateVector> {
        let up = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let (u, v) = self.spinors();
        let a = product_state(space, up, u)?;
        let b = product_state(space, up, v)?;
        StateVector::normalized(space, a.amplitudes() + b.amplitudes())
    }
}

/// `F_max = (4 alpha^2 + beta^2 + gamma^2) I^2` and the probe reaching it.
pub fn fmax_and_optimal_probe(coeffs: &GeneratorCoeffs, n_ring: usize) -> Result<(f64, OptimalProbe)> {
    if n_ring == 0 {
        return Err(Error::domain("ring must have at least one site"));
    }
    let GeneratorCoeffs { alpha, beta, gamma, .. } = *coeffs;
    if alpha == 0.0 && beta == 0.0 && gamma == 0.0 {
        return Err(Error::domain("generator coefficients all vanish"));
    }
    let transverse = (4.0 * alpha * alpha + gamma * gamma).sqrt();
    let spin = n_ring as f64 / 2.0;
    let f = (4.0 * alpha * alpha + beta * beta + gamma * gamma) * spin * spin;
    let probe = OptimalProbe {
        theta: if transverse == 0.0 { 0.0 } else { transverse.atan2(beta) },
        phi: (2.0 * alpha).atan2(gamma),
    };
    Ok((f, probe))
}

/// Which route produced a QFI value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QfiMethod {
    FdState,
    GeneratorExact,
    Analytic,
    LocalBloch,
    Epf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiPoint {
    pub model: String,
    pub t: f64,
    pub h: f64,
    pub value: f64,
    pub method: QfiMethod,
    pub probe: String,
    /// Relative spread of the two finite-difference steps, when applicable.
    pub convergence: Option<f64>,
}
