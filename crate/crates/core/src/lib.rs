//! Central-spin dynamics and dynamic quantum Fisher information.
//!
//! The crate builds central-spin Hamiltonians on either the full tensor
//! product space or the collective (maximal Dicke) sector, propagates pure
//! probe states with an exact eigendecomposition or a Chebyshev expansion,
//! and evaluates global and local quantum Fisher information through
//! independent routes (finite differences of the evolved state, the exact
//! transformed generator, and closed forms).

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod metrology;
pub mod models;
pub mod operator;
pub mod space;
pub mod state;

pub use error::{Error, Result};
pub use operator::{Axis, HermitianOperator, Party, C64};
pub use space::{BasisKind, HilbertSpace};
pub use state::{BlochVector, ProbeKind, StateVector};
