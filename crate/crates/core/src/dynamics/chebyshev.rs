//! Chebyshev expansion of `exp(-i H t)`.
//!
//! With `H` mapped onto `[-1, 1]` as `H~ = (H - b) / a`,
//! `exp(-iHt) = exp(-ibt) sum_k (2 - delta_k0) (-i)^k J_k(a t) T_k(H~)`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, C64};
use crate::state::StateVector;

use super::SpectralBounds;

/// Hard ceiling on the expansion order.
pub const MAX_ORDER: usize = 200_000;
/// Orders kept beyond the first negligible coefficient.
const EXTRA_ORDERS: usize = 10;

/// `J_0(x) .. J_kmax(x)` for `x >= 0` by Miller's backward recurrence,
/// normalized with `J_0 + 2 sum_k J_2k = 1`.
pub fn bessel_j_sequence(kmax: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and non-negative");
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = kmax.max(x.ceil() as usize);
    let mut start = top + 30 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut next = 0.0f64; // J_{k+1}
    let mut cur = 1e-300f64; // J_k
    let mut norm = 0.0f64;
    for k in (1..=start).rev() {
        if k <= kmax {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Expansion coefficients and the truncation order for `tau = a t`.
pub(crate) fn expansion(tau: f64, tol: f64) -> Result<Vec<C64>> {
    let x = tau.abs();
    let mut kmax = (x.ceil() as usize + 64).max(64);
    loop {
        let j = bessel_j_sequence(kmax, x);
        let floor = x.ceil() as usize;
        let cut = (floor..=kmax).find(|&k| j[k].abs() < tol / 10.0);
        if let Some(cut) = cut {
            let order = cut + EXTRA_ORDERS;
            if order > kmax {
                kmax = order;
                continue;
            }
            let coeffs: Vec<C64> = (0..=order)
                .map(|k| {
                    let sign = if tau < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
                    let weight = if k == 0 { 1.0 } else { 2.0 };
                    minus_i_pow(k) * (weight * sign * j[k])
                })
                .collect();
            let tail = coeffs[cut..].iter().map(|c| c.norm()).fold(0.0, f64::max);
            if tail >= tol {
                return Err(Error::Convergence(format!(
                    "Chebyshev tail {tail:e} exceeds tolerance {tol:e}"
                )));
            }
            return Ok(coeffs);
        }
        if kmax >= MAX_ORDER {
            return Err(Error::Convergence(format!(
                "Chebyshev expansion for tau={tau} needs more than {MAX_ORDER} orders"
            )));
        }
        kmax = (2 * kmax).min(MAX_ORDER);
    }
}

fn minus_i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

#[derive(Debug, Clone)]
pub struct ChebyshevPropagator {
    op: HermitianOperator,
    bounds: SpectralBounds,
    tol: f64,
}

impl ChebyshevPropagator {
    pub fn new(op: &HermitianOperator, tol: f64) -> Result<Self> {
        super::check_tol(tol)?;
        if !op.is_hermitian() {
            return Err(Error::domain("Chebyshev propagation requires a Hermitian operator"));
        }
        let bounds = super::spectral_bounds(op)?;
        Ok(Self {
            op: op.clone(),
            bounds,
            tol,
        })
    }

    pub fn bounds(&self) -> SpectralBounds {
        self.bounds
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Number of Chebyshev terms used for a step of length `t`.
    pub fn order_for(&self, t: f64) -> Result<usize> {
        Ok(expansion(self.bounds.half_width() * t, self.tol)?.len() - 1)
    }

    /// Returns the propagated state and the expansion order used.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<(StateVector, usize)> {
        if psi.space() != self.op.space() {
            return Err(Error::domain("state and Hamiltonian live on different spaces"));
        }
        if !t.is_finite() {
            return Err(Error::domain("propagation time must be finite"));
        }
        if t == 0.0 {
            return Ok((psi.clone(), 0));
        }
        let a = self.bounds.half_width();
        let b = self.bounds.center();
        let coeffs = expansion(a * t, self.tol)?;
        let n = psi.amplitudes().len();
        let scaled = |x: &[C64], y: &mut [C64]| {
            self.op.apply_into(x, y);
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi = (*yi - xi * b) / a;
            }
        };
        let mut prev = psi.amplitudes().clone();
        let mut cur = DVector::from_element(n, C64::new(0.0, 0.0));
        scaled(prev.as_slice(), cur.as_mut_slice());
        let mut acc = &prev * coeffs[0];
        if coeffs.len() > 1 {
            acc.axpy(coeffs[1], &cur, C64::new(1.0, 0.0));
        }
        let mut next = DVector::from_element(n, C64::new(0.0, 0.0));
        for &c in &coeffs[2..] {
            scaled(cur.as_slice(), next.as_mut_slice());
            for (nx, pv) in next.iter_mut().zip(prev.iter()) {
                *nx = 2.0 * *nx - pv;
            }
            acc.axpy(c, &next, C64::new(1.0, 0.0));
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        acc *= C64::from_polar(1.0, -b * t);
        let out = StateVector::from_evolved(psi.space(), acc);
        super::check_norm(&out)?;
        Ok((out, coeffs.len() - 1))
    }
}
