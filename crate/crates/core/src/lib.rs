//! Exact computations in the rank-n Heisenberg vertex algebra H(n) and its
//! orthogonal invariants H(n)^{O(n)}.
//!
//! Containers are generic over a [`Scalar`] field; the aliases at the crate
//! root fix arbitrary-precision rationals.

pub mod alpha;
pub mod classical;
pub mod decouple;
pub mod error;
pub mod fock;
pub mod identities;
pub mod invariant;
pub mod linalg;
pub mod modes;
pub mod nopoly;
pub mod scalar;
pub mod scratch;
pub mod symbolic;
pub mod zhu;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub(crate) type Map<K, V> = std::collections::HashMap<K, V, rustc_hash::FxBuildHasher>;

/// Arbitrary-precision rationals.
pub type Q = num_rational::BigRational;

pub type FockState = fock::FockState<Q>;
pub type AlphaPoly = alpha::AlphaPoly<Q>;
pub type QPoly = classical::QPoly<Q>;
pub type NOPoly = nopoly::NOPoly<Q>;
pub type Decomposition = decouple::Decomposition<Q>;
