use crate::dynamics::EigenSystem;
use crate::error::{Error, Result};
use crate::operator::{expectation, second_moment, Axis, HermitianOperator, TermSum, C64};
use crate::state::StateVector;

use super::clip_qfi;

/// `G = int_0^t e^{iHs} H1 e^{-iHs} ds` by exact diagonalization of `H`.
pub fn generator_exact(h: &HermitianOperator, h1: &HermitianOperator, t: f64) -> Result<HermitianOperator> {
    EigenSystem::new(h)?.generator(h1, t)
}

/// `4 (<G^2> - <G>^2)` in the probe.
pub fn qfi_from_generator(g: &HermitianOperator, probe: &StateVector) -> Result<f64> {
    let mean = expectation(g, probe)?;
    let second = second_moment(g, probe)?;
    clip_qfi(4.0 * (second - mean * mean))
}

/// Coefficients of a generator on `{I_y, S_z I_z, S_z I_x}` and what is left over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorProjection {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Frobenius norm of `G - alpha I_y - beta S_z I_z - gamma S_z I_x`.
    pub residual: f64,
}

/// Projects `g` onto the mutually trace-orthogonal operators
/// `I_y`, `S_z I_z`, `S_z I_x` with Hilbert-Schmidt inner products.
pub fn project_generator(g: &HermitianOperator) -> Result<GeneratorProjection> {
    let space = g.space();
    let one = C64::new(1.0, 0.0);
    let basis: Vec<HermitianOperator> = [(None, Axis::Y), (Some(Axis::Z), Axis::Z), (Some(Axis::Z), Axis::X)]
        .iter()
        .map(|&(c, r)| {
            let mut sum = TermSum::new(space);
            match c {
                None => sum.ring(one, r),
                Some(c) => sum.central_ring(one, c, r),
            }
            sum.assemble(true)
        })
        .collect::<Result<_>>()?;
    let mut coeffs = [0.0f64; 3];
    for (k, b) in basis.iter().enumerate() {
        let norm = b.frobenius_inner(b).re;
        if norm == 0.0 {
            return Err(Error::domain("projection basis operator vanishes"));
        }
        coeffs[k] = b.frobenius_inner(g).re / norm;
    }
    let residual = HermitianOperator::linear_combination(&[
        (one, g),
        (C64::new(-coeffs[0], 0.0), &basis[0]),
        (C64::new(-coeffs[1], 0.0), &basis[1]),
        (C64::new(-coeffs[2], 0.0), &basis[2]),
    ])?
    .frobenius_norm();
    Ok(GeneratorProjection {
        alpha: coeffs[0],
        beta: coeffs[1],
        gamma: coeffs[2],
        residual,
    })
}
