//! Parameter-invariant variational functionals on submanifolds.
//!
//! The crate covers the exterior algebra of k-vectors in a chart and the lift
//! of maps to k-vector bundles ([`kvector`]), oriented rays of k-vectors
//! ([`grassmann`]), integration of differential forms over parametrized
//! pieces ([`forms`]), Finsler and areal Lagrangians with their Hilbert form
//! ([`finsler`]), and the resulting length/area functionals ([`functional`]).
//!
//! Everything works in explicit coordinates over boxes. The crate is
//! `no_std` and needs only `alloc`.
#![no_std]
// When std is linked (tests, or num-traits unified with its std feature) the
// inherent float methods shadow `Float`, leaving its imports unused.
#![allow(unused_imports)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod finsler;
pub mod forms;
pub mod functional;
pub mod grassmann;
pub mod kvector;
pub mod linalg;
pub mod maps;
pub mod multiindex;
pub mod polynomial;
pub mod quadrature;

pub use error::{Error, Result};
pub use kvector::KVector;
pub use linalg::Matrix;
pub use maps::{CatalogMap, DifferentiableMap, SharedMap};
pub use multiindex::MultiIndex;
