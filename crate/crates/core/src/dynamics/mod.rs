//! Pure-state time evolution.
//!
//! Two propagators are available: an exact eigendecomposition (the oracle,
//! dense spaces only) and a Chebyshev expansion that only needs
//! matrix-vector products and scales to sparse full-product spaces.

mod chebyshev;
mod eigen;

pub use chebyshev::{bessel_j_sequence, ChebyshevPropagator, MAX_ORDER};
pub use eigen::EigenSystem;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{expectation, HermitianOperator, Storage};
use crate::state::StateVector;

const NORM_DRIFT_TOL: f64 = 1e-10;
/// Total relative widening applied to spectral enclosures.
pub const SPECTRAL_MARGIN: f64 = 0.01;
pub const DEFAULT_CHEBYSHEV_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum Method {
    Eigen,
    Chebyshev { tol: f64 },
}

impl Method {
    /// Eigendecomposition for dense operators, Chebyshev for sparse ones.
    pub fn auto_for(op: &HermitianOperator) -> Method {
        match op.storage() {
            Storage::Dense(_) => Method::Eigen,
            Storage::Sparse(_) => Method::Chebyshev {
                tol: DEFAULT_CHEBYSHEV_TOL,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Propagation {
    pub method: Method,
    pub t: f64,
}

impl Propagation {
    pub fn eigen(t: f64) -> Self {
        Self {
            method: Method::Eigen,
            t,
        }
    }

    pub fn chebyshev(t: f64, tol: f64) -> Self {
        Self {
            method: Method::Chebyshev { tol },
            t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBounds {
    pub e_min: f64,
    pub e_max: f64,
}

impl SpectralBounds {
    pub fn half_width(&self) -> f64 {
        (self.e_max - self.e_min) / 2.0
    }

    pub fn center(&self) -> f64 {
        (self.e_max + self.e_min) / 2.0
    }

    pub fn width(&self) -> f64 {
        self.e_max - self.e_min
    }

    pub fn contains(&self, e: f64) -> bool {
        self.e_min <= e && e <= self.e_max
    }

    /// Widens the enclosure by [`SPECTRAL_MARGIN`] of its width in total.
    /// A zero-width enclosure is padded relative to its magnitude.
    fn widened(e_min: f64, e_max: f64) -> Self {
        let width = e_max - e_min;
        let pad = if width > 0.0 {
            0.5 * SPECTRAL_MARGIN * width
        } else {
            0.5 * SPECTRAL_MARGIN * e_max.abs().max(1.0)
        };
        Self {
            e_min: e_min - pad,
            e_max: e_max + pad,
        }
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::domain(format!(
            "Chebyshev tolerance {tol:e} must lie in (0, 1e-6]"
        )));
    }
    Ok(())
}

pub(crate) fn check_norm(psi: &StateVector) -> Result<()> {
    let drift = (psi.norm() - 1.0).abs();
    if drift >= NORM_DRIFT_TOL {
        return Err(Error::Convergence(format!(
            "propagated norm drifted by {drift:e}"
        )));
    }
    Ok(())
}

/// Gershgorin enclosure before widening.
pub fn gershgorin_bounds(op: &HermitianOperator) -> SpectralBounds {
    let n = op.dim();
    let mut center = vec![0.0f64; n];
    let mut radius = vec![0.0f64; n];
    for (r, c, v) in op.entries() {
        if r == c {
            center[r] = v.re;
        } else {
            radius[r] += v.norm();
        }
    }
    let e_min = (0..n).map(|r| center[r] - radius[r]).fold(f64::INFINITY, f64::min);
    let e_max = (0..n).map(|r| center[r] + radius[r]).fold(f64::NEG_INFINITY, f64::max);
    SpectralBounds { e_min, e_max }
}

/// Rigorous spectral enclosure: exact extremal eigenvalues for dense
/// storage, Gershgorin discs for sparse storage, widened by the margin.
pub fn spectral_bounds(op: &HermitianOperator) -> Result<SpectralBounds> {
    if !op.is_hermitian() {
        return Err(Error::domain("spectral bounds require a Hermitian operator"));
    }
    let raw = match op.storage() {
        Storage::Dense(_) => {
            let e = eigen::eigenvalues(op)?;
            SpectralBounds {
                e_min: e[0],
                e_max: e[e.len() - 1],
            }
        }
        Storage::Sparse(_) => gershgorin_bounds(op),
    };
    Ok(SpectralBounds::widened(raw.e_min, raw.e_max))
}

/// A propagator prepared once for a fixed Hamiltonian.
#[derive(Debug, Clone)]
pub enum Propagator {
    Eigen(EigenSystem),
    Chebyshev(ChebyshevPropagator),
}

impl Propagator {
    pub fn new(op: &HermitianOperator, method: Method) -> Result<Self> {
        Ok(match method {
            Method::Eigen => Propagator::Eigen(EigenSystem::new(op)?),
            Method::Chebyshev { tol } => Propagator::Chebyshev(ChebyshevPropagator::new(op, tol)?),
        })
    }

    pub fn method(&self) -> Method {
        match self {
            Propagator::Eigen(_) => Method::Eigen,
            Propagator::Chebyshev(c) => Method::Chebyshev { tol: c.tol() },
        }
    }

    /// Exact extreme eigenvalues on the eigen path, the widened enclosure on
    /// the Chebyshev path. `None` for an empty spectrum.
    pub fn bounds(&self) -> Option<SpectralBounds> {
        match self {
            Propagator::Eigen(e) => {
                let ev = e.eigenvalues();
                let e_min = ev.iter().copied().reduce(f64::min)?;
                let e_max = ev.iter().copied().reduce(f64::max)?;
                Some(SpectralBounds { e_min, e_max })
            }
            Propagator::Chebyshev(c) => Some(c.bounds()),
        }
    }

    /// `exp(-iHt) psi` with the Chebyshev order used (0 for the eigen path).
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<(StateVector, usize)> {
        match self {
            Propagator::Eigen(e) => Ok((e.evolve(psi, t)?, 0)),
            Propagator::Chebyshev(c) => c.evolve(psi, t),
        }
    }

    /// States at each of the ascending `times`. The eigen path evolves
    /// directly from `psi0`; the Chebyshev path steps between successive times.
    pub fn states_at(&self, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        check_ascending(times)?;
        let mut out = Vec::with_capacity(times.len());
        let mut last_t = 0.0;
        let mut last: Option<StateVector> = None;
        for &t in times {
            let next = match (self, &last) {
                (Propagator::Chebyshev(c), Some(prev)) => c.evolve(prev, t - last_t)?.0,
                _ => self.evolve(psi0, t)?.0,
            };
            last_t = t;
            out.push(next.clone());
            last = Some(next);
        }
        Ok(out)
    }
}

fn check_ascending(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::domain("times must be finite"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("times must be sorted ascending"));
    }
    Ok(())
}

/// `exp(-iHt) psi0`.
pub fn evolve(h: &HermitianOperator, psi0: &StateVector, prop: Propagation) -> Result<StateVector> {
    if !prop.t.is_finite() {
        return Err(Error::domain("propagation time must be finite"));
    }
    check_norm(psi0).map_err(|_| Error::domain("initial state must be normalized"))?;
    Ok(Propagator::new(h, prop.method)?.evolve(psi0, prop.t)?.0)
}

/// Expectation values of `observables` (columns) at each time (rows).
pub fn trajectory(
    h: &HermitianOperator,
    psi0: &StateVector,
    observables: &[HermitianOperator],
    times: &[f64],
    method: Method,
) -> Result<Vec<Vec<f64>>> {
    let prop = Propagator::new(h, method)?;
    prop.states_at(psi0, times)?
        .iter()
        .map(|psi| observables.iter().map(|o| expectation(o, psi)).collect())
        .collect()
}
