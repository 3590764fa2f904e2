use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, C64};
use crate::space::{HilbertSpace, DENSE_DIM_LIMIT};
use crate::state::StateVector;

/// Relative gap below which two eigenvalues are treated as degenerate.
const DEGENERACY_REL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Block {
    indices: Vec<usize>,
    energies: DVector<f64>,
    vectors: DMatrix<C64>,
}

/// Exact spectral decomposition of a Hermitian operator.
///
/// The operator is first split into the connected components of its
/// non-zero pattern; each component is diagonalized densely.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    space: HilbertSpace,
    blocks: Vec<Block>,
    scale: f64,
}

pub(crate) fn check_capacity(op: &HermitianOperator) -> Result<()> {
    if op.dim() > DENSE_DIM_LIMIT {
        return Err(Error::Capacity {
            what: format!("dense eigendecomposition on {}", op.space()),
            limit: DENSE_DIM_LIMIT,
            requested: op.dim(),
        });
    }
    Ok(())
}

/// Connected components of the operator's sparsity graph, each sorted.
pub(crate) fn components(op: &HermitianOperator) -> Vec<Vec<usize>> {
    let n = op.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (r, c, _) in op.entries() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().collect()
}

fn sub_matrix(op: &HermitianOperator, indices: &[usize]) -> DMatrix<C64> {
    let mut local = vec![usize::MAX; op.dim()];
    for (k, &i) in indices.iter().enumerate() {
        local[i] = k;
    }
    let m = indices.len();
    let mut out = DMatrix::from_element(m, m, C64::new(0.0, 0.0));
    // callers only pass whole components, so every entry stays inside
    for (r, c, v) in op.entries() {
        if local[r] != usize::MAX {
            out[(local[r], local[c])] = v;
        }
    }
    out
}

/// Sorted eigenvalues without eigenvectors.
pub(crate) fn eigenvalues(op: &HermitianOperator) -> Result<Vec<f64>> {
    check_capacity(op)?;
    let mut out = Vec::with_capacity(op.dim());
    for idx in components(op) {
        let m = sub_matrix(op, &idx);
        out.extend(m.symmetric_eigenvalues().iter().copied());
    }
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}

impl EigenSystem {
    pub fn new(op: &HermitianOperator) -> Result<Self> {
        check_capacity(op)?;
        if !op.is_hermitian() {
            return Err(Error::domain("eigendecomposition requires a Hermitian operator"));
        }
        let blocks: Vec<Block> = components(op)
            .into_iter()
            .map(|indices| {
                let eig = sub_matrix(op, &indices).symmetric_eigen();
                Block {
                    indices,
                    energies: eig.eigenvalues,
                    vectors: eig.eigenvectors,
                }
            })
            .collect();
        let scale = blocks
            .iter()
            .flat_map(|b| b.energies.iter())
            .fold(0.0f64, |m, e| m.max(e.abs()));
        Ok(Self {
            space: op.space(),
            blocks,
            scale,
        })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.energies.iter().copied())
            .collect();
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }

    /// `exp(-i H t) psi`.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.space() != self.space {
            return Err(Error::domain("state and Hamiltonian live on different spaces"));
        }
        let src = psi.amplitudes();
        let mut out = DVector::from_element(src.len(), C64::new(0.0, 0.0));
        for b in &self.blocks {
            let local = DVector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| src[i]));
            let mut coeffs = b.vectors.ad_mul(&local);
            for (c, &e) in coeffs.iter_mut().zip(b.energies.iter()) {
                *c *= C64::from_polar(1.0, -e * t);
            }
            let back = &b.vectors * coeffs;
            for (&i, v) in b.indices.iter().zip(back.iter()) {
                out[i] = *v;
            }
        }
        let evolved = StateVector::from_evolved(self.space, out);
        super::check_norm(&evolved)?;
        Ok(evolved)
    }

    fn dense_basis(&self) -> (DMatrix<C64>, Vec<f64>) {
        let n = self.space.dim();
        let mut v = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        let mut energies = Vec::with_capacity(n);
        let mut col = 0;
        for b in &self.blocks {
            for k in 0..b.indices.len() {
                for (row, &i) in b.indices.iter().enumerate() {
                    v[(i, col)] = b.vectors[(row, k)];
                }
                energies.push(b.energies[k]);
                col += 1;
            }
        }
        (v, energies)
    }

    /// Transformed local generator `G = int_0^t e^{iHs} H1 e^{-iHs} ds`,
    /// assembled in the eigenbasis of `H`.
    pub fn generator(&self, h1: &HermitianOperator, t: f64) -> Result<HermitianOperator> {
        if h1.space() != self.space {
            return Err(Error::domain("H1 and H live on different spaces"));
        }
        let (v, energies) = self.dense_basis();
        let rotated = v.ad_mul(&(h1.to_dense() * &v));
        let gap_floor = DEGENERACY_REL * self.scale.max(f64::MIN_POSITIVE);
        let kernel = |m: usize, n: usize| -> C64 {
            let w = energies[m] - energies[n];
            if w.abs() < gap_floor {
                C64::new(t, 0.0)
            } else {
                // (e^{iwt} - 1) / (iw), written without cancellation
                C64::from_polar(2.0 * (0.5 * w * t).sin() / w, 0.5 * w * t)
            }
        };
        let dim = rotated.nrows();
        let weighted = DMatrix::from_fn(dim, dim, |m, n| rotated[(m, n)] * kernel(m, n));
        let g = &v * weighted * v.adjoint();
        let defect = (&g - g.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let size = g.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        if defect > 1e-12 * size {
            return Err(Error::Internal(format!(
                "generator Hermiticity defect {defect:e}"
            )));
        }
        let sym = (&g + g.adjoint()) * C64::new(0.5, 0.0);
        HermitianOperator::from_dense(self.space, sym, true)
    }
}
