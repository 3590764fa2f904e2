//! Finite-difference routes: global QFI from the evolved state and the
//! central-spin Bloch vector, both differentiated with respect to `h`.

use crate::dynamics::{Method, Propagator};
use crate::error::{Error, Result};
use crate::models::{build_hamiltonian, ModelSpec};
use crate::operator::C64;
use crate::space::HilbertSpace;
use crate::state::{reduce_to_central_bloch, BlochVector, StateVector};

use super::{clip_qfi, error_propagation, local_qubit_qfi};

/// Largest accepted relative spread between the `step` and `step / 2` estimates.
pub const FD_AGREEMENT_TOL: f64 = 1e-4;

/// Default step `1e-4 max(1, |h|)`.
pub fn default_step(h: f64) -> f64 {
    1e-4 * h.abs().max(1.0)
}

/// Offsets of the five-point stencil in units of the step.
const OFFSETS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Propagators for `H(h + k step)` with `k` in `{-1, -1/2, 0, 1/2, 1}`.
#[derive(Debug, Clone)]
pub struct FieldStencil {
    space: HilbertSpace,
    h: f64,
    step: f64,
    propagators: Vec<Propagator>,
}

/// Evolved states on the stencil at one time.
#[derive(Debug, Clone)]
pub struct StencilStates {
    pub t: f64,
    pub step: f64,
    states: Vec<StateVector>,
}

/// A finite-difference estimate with its two-step convergence figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    /// Richardson-extrapolated value.
    pub value: f64,
    /// `|F(step) - F(step/2)| / max(|F(step/2)|, 1)`.
    pub spread: f64,
}

impl FieldStencil {
    /// `method = None` picks eigendecomposition for dense and Chebyshev for
    /// sparse Hamiltonians.
    pub fn new(spec: &ModelSpec, space: HilbertSpace, h: f64, step: f64, method: Option<Method>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::domain(format!("finite-difference step {step} must be positive")));
        }
        let propagators = OFFSETS
            .iter()
            .map(|k| {
                let ham = build_hamiltonian(&spec.with_field(h + k * step), space)?;
                let m = method.unwrap_or_else(|| Method::auto_for(&ham));
                Propagator::new(&ham, m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            space,
            h,
            step,
            propagators,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    /// The propagator at the unshifted field.
    pub fn center(&self) -> &Propagator {
        &self.propagators[2]
    }

    /// Chebyshev orders each stencil member uses for a step of length `t`.
    pub fn chebyshev_orders(&self, t: f64) -> Result<Vec<usize>> {
        self.propagators
            .iter()
            .map(|p| match p {
                Propagator::Chebyshev(c) => c.order_for(t),
                Propagator::Eigen(_) => Ok(0),
            })
            .collect()
    }

    pub fn states(&self, probe: &StateVector, t: f64) -> Result<StencilStates> {
        let states = self
            .propagators
            .iter()
            .map(|p| Ok(p.evolve(probe, t)?.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(StencilStates {
            t,
            step: self.step,
            states,
        })
    }

    /// Streams stencil states over ascending `times`; Chebyshev members step
    /// from the previous time, eigen members evolve directly.
    pub fn for_each_time<F>(&self, probe: &StateVector, times: &[f64], mut visit: F) -> Result<()>
    where
        F: FnMut(&StencilStates) -> Result<()>,
    {
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("times must be sorted ascending"));
        }
        let mut current: Option<StencilStates> = None;
        for &t in times {
            let next = match current {
                None => self.states(probe, t)?,
                Some(prev) => {
                    let states = self
                        .propagators
                        .iter()
                        .zip(prev.states)
                        .map(|(p, s)| match p {
                            Propagator::Chebyshev(c) => Ok(c.evolve(&s, t - prev.t)?.0),
                            Propagator::Eigen(e) => e.evolve(probe, t),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    StencilStates {
                        t,
                        step: self.step,
                        states,
                    }
                }
            };
            visit(&next)?;
            current = Some(next);
        }
        Ok(())
    }
}

fn relative_spread(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn check_spread(step: f64, spread: f64) -> Result<()> {
    if spread > FD_AGREEMENT_TOL {
        return Err(Error::Step {
            step,
            spread,
            suggested: step / 4.0,
        });
    }
    Ok(())
}

impl StencilStates {
    pub fn center(&self) -> &StateVector {
        &self.states[2]
    }

    fn pure_qfi(&self, derivative: &nalgebra::DVector<C64>) -> f64 {
        let psi = self.center().amplitudes();
        4.0 * (derivative.norm_squared() - psi.dotc(derivative).norm_sqr())
    }

    /// `4 (<d psi|d psi> - |<psi|d psi>|^2)` with central differences.
    pub fn global_qfi(&self) -> Result<FdEstimate> {
        let s = &self.states;
        let wide = (s[4].amplitudes() - s[0].amplitudes()) / C64::new(2.0 * self.step, 0.0);
        let narrow = (s[3].amplitudes() - s[1].amplitudes()) / C64::new(self.step, 0.0);
        let richardson = (&narrow * C64::new(4.0, 0.0) - &wide) / C64::new(3.0, 0.0);
        let (f_wide, f_narrow) = (self.pure_qfi(&wide), self.pure_qfi(&narrow));
        let spread = relative_spread(f_wide, f_narrow);
        check_spread(self.step, spread)?;
        Ok(FdEstimate {
            value: clip_qfi(self.pure_qfi(&richardson))?,
            spread,
        })
    }

    fn blochs(&self) -> Result<Vec<BlochVector>> {
        self.states.iter().map(reduce_to_central_bloch).collect()
    }

    /// Central Bloch vector and its Richardson-extrapolated `h` derivative,
    /// with the wide and narrow derivatives used for the convergence check.
    fn bloch_derivatives(&self) -> Result<(BlochVector, BlochVector, BlochVector, BlochVector)> {
        let v = self.blochs()?;
        let wide = v[4].sub(&v[0]).scale(1.0 / (2.0 * self.step));
        let narrow = v[3].sub(&v[1]).scale(1.0 / self.step);
        let richardson = narrow.scale(4.0).sub(&wide).scale(1.0 / 3.0);
        Ok((v[2], richardson, wide, narrow))
    }

    pub fn bloch(&self) -> Result<(BlochVector, BlochVector)> {
        let (v, dv, _, _) = self.bloch_derivatives()?;
        Ok((v, dv))
    }

    /// Local QFI of the central spin's reduced state.
    pub fn local_qfi(&self) -> Result<FdEstimate> {
        let (v, dv, wide, narrow) = self.bloch_derivatives()?;
        let spread = relative_spread(local_qubit_qfi(v, wide)?, local_qubit_qfi(v, narrow)?);
        check_spread(self.step, spread)?;
        Ok(FdEstimate {
            value: local_qubit_qfi(v, dv)?,
            spread,
        })
    }

    /// `<s_0^x>` at the unshifted field.
    pub fn central_sx(&self) -> Result<f64> {
        Ok(reduce_to_central_bloch(self.center())?.x / 2.0)
    }

    /// Squared inverse error-propagation sensitivity of `s_0^x`.
    pub fn inverse_epf(&self) -> Result<FdEstimate> {
        let (v, dv, wide, narrow) = self.bloch_derivatives()?;
        let mean = v.x / 2.0;
        let inv = |slope: f64| -> Result<f64> {
            let delta = error_propagation(mean, 0.25, slope)?;
            Ok(if delta.is_infinite() { 0.0 } else { 1.0 / (delta * delta) })
        };
        let spread = relative_spread(inv(wide.x / 2.0)?, inv(narrow.x / 2.0)?);
        check_spread(self.step, spread)?;
        Ok(FdEstimate {
            value: inv(dv.x / 2.0)?,
            spread,
        })
    }
}

/// Global QFI by finite differences of `exp(-i H(h) t) probe` in `h`.
pub fn qfi_pure_fd(
    spec: &ModelSpec,
    space: HilbertSpace,
    probe: &StateVector,
    t: f64,
    h: f64,
    step: f64,
    method: Option<Method>,
) -> Result<FdEstimate> {
    FieldStencil::new(spec, space, h, step, method)?
        .states(probe, t)?
        .global_qfi()
}

/// Local QFI of the central spin by finite differences of its Bloch vector.
pub fn local_qfi_fd(
    spec: &ModelSpec,
    space: HilbertSpace,
    probe: &StateVector,
    t: f64,
    h: f64,
    step: f64,
    method: Option<Method>,
) -> Result<FdEstimate> {
    FieldStencil::new(spec, space, h, step, method)?
        .states(probe, t)?
        .local_qfi()
}
