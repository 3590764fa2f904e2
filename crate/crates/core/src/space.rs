//! State-space descriptors.
//!
//! Two bases are supported:
//!
//! * [`BasisKind::FullProduct`]: the full tensor product of the central spin
//!   and `N` ring spins, dimension `2^(N+1)`. A basis index is a bit string
//!   with the central spin as the most significant bit, ring site 1 next and
//!   ring site `N` least significant. Bit value 0 is spin up (`s_z = +1/2`).
//! * [`BasisKind::CollectiveSector`]: the central spin times the maximal
//!   total-spin (Dicke) sector of the ring, dimension `2 (N + 1)`. Index
//!   `c (N + 1) + k` labels central state `c` (0 = up, 1 = down) and ring
//!   magnetization `M_z = I - k` with `I = N / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension handled by dense storage and the eigendecomposition path.
pub const DENSE_DIM_LIMIT: usize = 4096;
/// Full-product spaces switch to sparse storage from this ring size on.
pub const SPARSE_RING_THRESHOLD: usize = 10;
/// Desk-scale cap on full-product ring size.
pub const MAX_FULL_PRODUCT_RING: usize = 18;
/// Desk-scale cap on collective-sector ring size.
pub const MAX_COLLECTIVE_RING: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    FullProduct,
    CollectiveSector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    kind: BasisKind,
    n_ring: usize,
}

impl HilbertSpace {
    pub fn new(kind: BasisKind, n_ring: usize) -> Result<Self> {
        if n_ring == 0 {
            return Err(Error::domain("ring must contain at least one spin"));
        }
        let limit = match kind {
            BasisKind::FullProduct => MAX_FULL_PRODUCT_RING,
            BasisKind::CollectiveSector => MAX_COLLECTIVE_RING,
        };
        if n_ring > limit {
            return Err(Error::Capacity {
                what: format!("{kind:?} ring size"),
                limit,
                requested: n_ring,
            });
        }
        Ok(Self { kind, n_ring })
    }

    pub fn full_product(n_ring: usize) -> Result<Self> {
        Self::new(BasisKind::FullProduct, n_ring)
    }

    pub fn collective(n_ring: usize) -> Result<Self> {
        Self::new(BasisKind::CollectiveSector, n_ring)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn n_ring(&self) -> usize {
        self.n_ring
    }

    /// Total ring spin `I = N / 2`.
    pub fn ring_spin(&self) -> f64 {
        self.n_ring as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            BasisKind::FullProduct => 1usize << (self.n_ring + 1),
            BasisKind::CollectiveSector => 2 * (self.n_ring + 1),
        }
    }

    /// Whether operators on this space are stored sparsely.
    pub fn prefers_sparse(&self) -> bool {
        self.kind == BasisKind::FullProduct && self.n_ring >= SPARSE_RING_THRESHOLD
    }

    pub fn fits_dense(&self) -> bool {
        self.dim() <= DENSE_DIM_LIMIT
    }

    /// Subsystem dimensions, most significant first.
    pub(crate) fn layout(&self) -> Vec<usize> {
        match self.kind {
            BasisKind::FullProduct => vec![2; self.n_ring + 1],
            BasisKind::CollectiveSector => vec![2, self.n_ring + 1],
        }
    }

    /// Index of the central spin's down state offset: basis states with the
    /// central spin down are exactly those with index `>= dim / 2`.
    pub(crate) fn central_half(&self) -> usize {
        self.dim() / 2
    }

    pub(crate) fn require_full_product(&self, what: &str) -> Result<()> {
        if self.kind != BasisKind::FullProduct {
            return Err(Error::basis(format!("{what} requires a full-product space")));
        }
        Ok(())
    }
}

impl std::fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.kind {
            BasisKind::FullProduct => "full-product",
            BasisKind::CollectiveSector => "collective-sector",
        };
        write!(f, "{name}(N={}, dim={})", self.n_ring, self.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_follow_kind() {
        for n in 1..=8 {
            assert_eq!(HilbertSpace::full_product(n).unwrap().dim(), 1 << (n + 1));
            assert_eq!(HilbertSpace::collective(n).unwrap().dim(), 2 * (n + 1));
        }
    }

    #[test]
    fn rejects_empty_ring_and_caps() {
        assert!(matches!(HilbertSpace::full_product(0), Err(Error::Domain(_))));
        assert!(matches!(
            HilbertSpace::full_product(MAX_FULL_PRODUCT_RING + 1),
            Err(Error::Capacity { .. })
        ));
        assert!(HilbertSpace::collective(MAX_COLLECTIVE_RING).is_ok());
    }

    #[test]
    fn sparse_switch() {
        assert!(!HilbertSpace::full_product(9).unwrap().prefers_sparse());
        assert!(HilbertSpace::full_product(10).unwrap().prefers_sparse());
        assert!(!HilbertSpace::collective(100).unwrap().prefers_sparse());
    }
}
