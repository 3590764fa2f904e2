//! Operator storage and assembly of spin-1/2 and collective spin operators.
//!
//! Every spin operator carries the spin-1/2 normalization: single-site
//! operators have eigenvalues `+-1/2`, and collective ring operators are
//! plain sums of them (`I_a = sum_i s_i^a`).

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{BasisKind, HilbertSpace};
use crate::state::StateVector;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) const HERMITICITY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
    /// Raising operator `s^+ = s^x + i s^y`.
    Plus,
    /// Lowering operator `s^- = s^x - i s^y`.
    Minus,
}

impl Axis {
    pub fn is_ladder(self) -> bool {
        matches!(self, Axis::Plus | Axis::Minus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Ring,
    Central,
}

/// Small sparse matrix acting on one subsystem, stored column-wise.
#[derive(Debug, Clone)]
pub(crate) struct LocalMatrix {
    columns: Vec<Vec<(usize, C64)>>,
}

impl LocalMatrix {
    fn from_entries(dim: usize, entries: &[(usize, usize, C64)]) -> Self {
        let mut columns = vec![Vec::new(); dim];
        for &(r, c, v) in entries {
            if v != ZERO {
                columns[c].push((r, v));
            }
        }
        Self { columns }
    }

    /// Spin-1/2 operator, basis order (up, down).
    pub(crate) fn spin_half(axis: Axis) -> Self {
        let h = 0.5;
        let entries: Vec<(usize, usize, C64)> = match axis {
            Axis::X => vec![(0, 1, C64::new(h, 0.0)), (1, 0, C64::new(h, 0.0))],
            Axis::Y => vec![(0, 1, C64::new(0.0, -h)), (1, 0, C64::new(0.0, h))],
            Axis::Z => vec![(0, 0, C64::new(h, 0.0)), (1, 1, C64::new(-h, 0.0))],
            Axis::Plus => vec![(0, 1, ONE)],
            Axis::Minus => vec![(1, 0, ONE)],
        };
        Self::from_entries(2, &entries)
    }

    /// Collective spin `I = N/2` operator in the Dicke basis `k -> M = I - k`.
    pub(crate) fn dicke(n_ring: usize, axis: Axis) -> Self {
        let dim = n_ring + 1;
        let spin = n_ring as f64 / 2.0;
        let mut raise = Vec::with_capacity(n_ring);
        // I+ |M> = sqrt(I(I+1) - M(M+1)) |M+1>, i.e. column k -> row k-1.
        for k in 1..dim {
            let m = spin - k as f64;
            let amp = (spin * (spin + 1.0) - m * (m + 1.0)).max(0.0).sqrt();
            raise.push((k - 1, k, amp));
        }
        let entries: Vec<(usize, usize, C64)> = match axis {
            Axis::Z => (0..dim)
                .map(|k| (k, k, C64::new(spin - k as f64, 0.0)))
                .collect(),
            Axis::Plus => raise.iter().map(|&(r, c, a)| (r, c, C64::new(a, 0.0))).collect(),
            Axis::Minus => raise.iter().map(|&(r, c, a)| (c, r, C64::new(a, 0.0))).collect(),
            Axis::X => raise
                .iter()
                .flat_map(|&(r, c, a)| [(r, c, C64::new(a / 2.0, 0.0)), (c, r, C64::new(a / 2.0, 0.0))])
                .collect(),
            // I_y = (I+ - I-) / (2i)
            Axis::Y => raise
                .iter()
                .flat_map(|&(r, c, a)| [(r, c, C64::new(0.0, -a / 2.0)), (c, r, C64::new(0.0, a / 2.0))])
                .collect(),
        };
        Self::from_entries(dim, &entries)
    }
}

/// One tensor-product term `coeff * (F_1 on s_1) (F_2 on s_2) ...`.
#[derive(Debug, Clone)]
pub(crate) struct Term {
    coeff: C64,
    factors: Vec<(usize, LocalMatrix)>,
}

/// Accumulates tensor-product terms and assembles them into an operator.
#[derive(Debug, Clone)]
pub(crate) struct TermSum {
    space: HilbertSpace,
    terms: Vec<Term>,
}

impl TermSum {
    pub(crate) fn new(space: HilbertSpace) -> Self {
        Self {
            space,
            terms: Vec::new(),
        }
    }

    fn push(&mut self, coeff: C64, factors: Vec<(usize, LocalMatrix)>) {
        if coeff != ZERO {
            self.terms.push(Term { coeff, factors });
        }
    }

    /// `coeff * sigma_site^axis` on a full-product space (site 0 is central).
    pub(crate) fn site(&mut self, coeff: C64, site: usize, axis: Axis) {
        self.push(coeff, vec![(site, LocalMatrix::spin_half(axis))]);
    }

    /// `coeff * sigma_a^axis_a sigma_b^axis_b` on a full-product space.
    pub(crate) fn site_pair(&mut self, coeff: C64, a: (usize, Axis), b: (usize, Axis)) {
        self.push(
            coeff,
            vec![
                (a.0, LocalMatrix::spin_half(a.1)),
                (b.0, LocalMatrix::spin_half(b.1)),
            ],
        );
    }

    pub(crate) fn central(&mut self, coeff: C64, axis: Axis) {
        self.push(coeff, vec![(0, LocalMatrix::spin_half(axis))]);
    }

    pub(crate) fn ring(&mut self, coeff: C64, axis: Axis) {
        match self.space.kind() {
            BasisKind::FullProduct => {
                for site in 1..=self.space.n_ring() {
                    self.site(coeff, site, axis);
                }
            }
            BasisKind::CollectiveSector => {
                let m = LocalMatrix::dicke(self.space.n_ring(), axis);
                self.push(coeff, vec![(1, m)]);
            }
        }
    }

    /// `coeff * S^c_axis I^r_axis`.
    pub(crate) fn central_ring(&mut self, coeff: C64, c_axis: Axis, r_axis: Axis) {
        match self.space.kind() {
            BasisKind::FullProduct => {
                for site in 1..=self.space.n_ring() {
                    self.site_pair(coeff, (0, c_axis), (site, r_axis));
                }
            }
            BasisKind::CollectiveSector => {
                let c = LocalMatrix::spin_half(c_axis);
                let r = LocalMatrix::dicke(self.space.n_ring(), r_axis);
                self.push(coeff, vec![(0, c), (1, r)]);
            }
        }
    }

    fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let layout = self.space.layout();
        let mut strides = vec![1usize; layout.len()];
        for s in (0..layout.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * layout[s + 1];
        }
        let dim = self.space.dim();
        let mut out = Vec::new();
        let mut partial: Vec<(usize, C64)> = Vec::new();
        let mut next: Vec<(usize, C64)> = Vec::new();
        for col in 0..dim {
            for term in &self.terms {
                partial.clear();
                partial.push((col, term.coeff));
                for (sub, mat) in &term.factors {
                    next.clear();
                    let stride = strides[*sub];
                    for &(r, v) in &partial {
                        let digit = (r / stride) % layout[*sub];
                        for &(rr, mv) in &mat.columns[digit] {
                            next.push((r + rr * stride - digit * stride, v * mv));
                        }
                    }
                    std::mem::swap(&mut partial, &mut next);
                }
                out.extend(partial.iter().map(|&(r, v)| (r, col, v)));
            }
        }
        out
    }

    pub(crate) fn assemble(&self, hermitian: bool) -> Result<HermitianOperator> {
        HermitianOperator::from_triplets(self.space, self.triplets(), hermitian)
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Builds from unsorted triplets, summing duplicates and dropping exact zeros.
    fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; dim + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                indices.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_idx = Vec::with_capacity(rows.len());
        let mut keep_val = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(values) {
            if v != ZERO {
                keep_rows.push(r);
                keep_idx.push(c);
                keep_val.push(v);
            }
        }
        for &r in &keep_rows {
            indptr[r + 1] += 1;
        }
        for r in 0..dim {
            indptr[r + 1] += indptr[r];
        }
        Self {
            dim,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Dense(DMatrix<C64>),
    Sparse(CsrMatrix),
}

/// Operator tied to a [`HilbertSpace`].
///
/// Ladder operators share this type with `hermitian == false`; everything
/// else is checked Hermitian at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    space: HilbertSpace,
    storage: Storage,
    hermitian: bool,
}

impl HermitianOperator {
    fn from_triplets(
        space: HilbertSpace,
        triplets: Vec<(usize, usize, C64)>,
        hermitian: bool,
    ) -> Result<Self> {
        let dim = space.dim();
        let storage = if space.prefers_sparse() {
            Storage::Sparse(CsrMatrix::from_triplets(dim, triplets))
        } else {
            let mut m = DMatrix::from_element(dim, dim, ZERO);
            for (r, c, v) in triplets {
                m[(r, c)] += v;
            }
            Storage::Dense(m)
        };
        let op = Self {
            space,
            storage,
            hermitian,
        };
        if hermitian {
            op.check_hermitian(HERMITICITY_TOL)?;
        }
        Ok(op)
    }

    /// Wraps a dense matrix; `hermitian` requests the build-time check.
    pub fn from_dense(space: HilbertSpace, m: DMatrix<C64>, hermitian: bool) -> Result<Self> {
        let dim = space.dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::domain(format!(
                "matrix shape {}x{} does not match {space}",
                m.nrows(),
                m.ncols()
            )));
        }
        let triplets = dense_triplets(&m);
        Self::from_triplets(space, triplets, hermitian)
    }

    fn check_hermitian(&self, tol: f64) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect >= tol {
            return Err(Error::Internal(format!(
                "operator fails Hermiticity check: max|O - O^dag| = {defect:e}"
            )));
        }
        Ok(())
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Non-zero entries `(row, col, value)`, row-major.
    pub fn entries(&self) -> Vec<(usize, usize, C64)> {
        match &self.storage {
            Storage::Dense(m) => dense_triplets(m),
            Storage::Sparse(s) => (0..s.dim)
                .flat_map(|r| s.row(r).map(move |(c, v)| (r, c, v)))
                .collect(),
        }
    }

    /// Entrywise `max |O - O^dag|`.
    pub fn hermiticity_defect(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                let mut worst = 0.0f64;
                for r in 0..n {
                    for c in r..n {
                        worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
                    }
                }
                worst
            }
            Storage::Sparse(s) => {
                let mut map: HashMap<(usize, usize), C64> = HashMap::with_capacity(s.nnz());
                for r in 0..s.dim {
                    for (c, v) in s.row(r) {
                        map.insert((r, c), v);
                    }
                }
                map.iter()
                    .map(|(&(r, c), &v)| {
                        let t = map.get(&(c, r)).copied().unwrap_or(ZERO);
                        (v - t.conj()).norm()
                    })
                    .fold(0.0, f64::max)
            }
        }
    }

    /// `y = O x`.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        match &self.storage {
            Storage::Dense(m) => {
                let n = m.nrows();
                y.iter_mut().for_each(|v| *v = ZERO);
                for (c, &xc) in x.iter().enumerate().take(n) {
                    if xc == ZERO {
                        continue;
                    }
                    let col = m.column(c);
                    for (yr, &mrc) in y.iter_mut().zip(col.iter()) {
                        *yr += mrc * xc;
                    }
                }
            }
            Storage::Sparse(s) => s.matvec(x, y),
        }
    }

    pub fn apply(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut y = DVector::from_element(x.len(), ZERO);
        self.apply_into(x.as_slice(), y.as_mut_slice());
        y
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(s) => {
                let mut m = DMatrix::from_element(s.dim, s.dim, ZERO);
                for r in 0..s.dim {
                    for (c, v) in s.row(r) {
                        m[(r, c)] = v;
                    }
                }
                m
            }
        }
    }

    /// `sum_k coeff_k * O_k` over operators on the same space.
    pub fn linear_combination(parts: &[(C64, &HermitianOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::domain("empty linear combination"))?;
        let space = first.1.space;
        let mut hermitian = true;
        let mut triplets = Vec::new();
        for (coeff, op) in parts {
            if op.space != space {
                return Err(Error::domain("linear combination across different spaces"));
            }
            hermitian &= op.hermitian && coeff.im == 0.0;
            triplets.extend(op.entries().into_iter().map(|(r, c, v)| (r, c, v * coeff)));
        }
        Self::from_triplets(space, triplets, hermitian)
    }

    /// Operator product `self * other`; flagged Hermitian only if it is.
    pub fn compose(&self, other: &HermitianOperator) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::domain("product across different spaces"));
        }
        let triplets = match (&self.storage, &other.storage) {
            (Storage::Dense(a), Storage::Dense(b)) => dense_triplets(&(a * b)),
            _ => {
                let rhs = other.entries();
                let mut rhs_rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.dim()];
                for (r, c, v) in rhs {
                    rhs_rows[r].push((c, v));
                }
                let mut out = Vec::new();
                for (r, k, a) in self.entries() {
                    for &(c, b) in &rhs_rows[k] {
                        out.push((r, c, a * b));
                    }
                }
                out
            }
        };
        let mut op = Self::from_triplets(self.space, triplets, false)?;
        op.hermitian = op.hermiticity_defect() < 1e-12;
        Ok(op)
    }

    /// `[self, other] = self other - other self`.
    pub fn commutator(&self, other: &HermitianOperator) -> Result<Self> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        Self::linear_combination(&[(ONE, &ab), (-ONE, &ba)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries()
            .iter()
            .map(|(_, _, v)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Hilbert-Schmidt inner product `Tr(self^dag other)`.
    pub fn frobenius_inner(&self, other: &HermitianOperator) -> C64 {
        let mut lookup: HashMap<(usize, usize), C64> = HashMap::new();
        for (r, c, v) in other.entries() {
            lookup.insert((r, c), v);
        }
        self.entries()
            .into_iter()
            .filter_map(|(r, c, v)| lookup.get(&(r, c)).map(|w| v.conj() * w))
            .sum()
    }
}

fn dense_triplets(m: &DMatrix<C64>) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            if v != ZERO {
                out.push((r, c, v));
            }
        }
    }
    out
}

/// Spin-1/2 operator on one site of a full-product space; site 0 is the central spin.
pub fn single_site_op(space: HilbertSpace, site: usize, axis: Axis) -> Result<HermitianOperator> {
    space.require_full_product("single-site operator")?;
    if site > space.n_ring() {
        return Err(Error::domain(format!(
            "site {site} out of range [0, {}]",
            space.n_ring()
        )));
    }
    let mut sum = TermSum::new(space);
    sum.site(ONE, site, axis);
    sum.assemble(!axis.is_ladder())
}

/// Collective ring operator `I_axis` or central operator `S_axis`.
pub fn collective_op(space: HilbertSpace, axis: Axis, who: Party) -> Result<HermitianOperator> {
    let mut sum = TermSum::new(space);
    match who {
        Party::Ring => sum.ring(ONE, axis),
        Party::Central => sum.central(ONE, axis),
    }
    sum.assemble(!axis.is_ladder())
}

/// Complex expectation value, valid for any operator.
pub fn expectation_complex(op: &HermitianOperator, psi: &StateVector) -> Result<C64> {
    if op.space() != psi.space() {
        return Err(Error::domain(format!(
            "operator on {} applied to state on {}",
            op.space(),
            psi.space()
        )));
    }
    let y = op.apply(psi.amplitudes());
    Ok(psi.amplitudes().dotc(&y))
}

/// `<psi|O|psi>` for a Hermitian operator.
pub fn expectation(op: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    if !op.is_hermitian() {
        return Err(Error::domain("expectation of a non-Hermitian operator"));
    }
    let z = expectation_complex(op, psi)?;
    if z.im.abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "expectation has imaginary residue {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `<psi|O^2|psi> = ||O psi||^2` for a Hermitian operator.
pub fn second_moment(op: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    if !op.is_hermitian() {
        return Err(Error::domain("second moment of a non-Hermitian operator"));
    }
    if op.space() != psi.space() {
        return Err(Error::domain("operator and state live on different spaces"));
    }
    Ok(op.apply(psi.amplitudes()).norm_squared())
}
