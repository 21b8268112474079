//! Phase-space analysis of the Dicke model ground state: exact
//! diagonalization in the truncated Fock ⊗ Dicke basis, Husimi
//! distributions and Wehrl entropies by four-dimensional quadrature, the
//! parity-adapted coherent-state (cat) approximation and the zero set of
//! its Husimi distribution.

pub mod coherent;
pub mod eigensolve;
pub mod error;
pub mod export;
pub mod husimi;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod sweep;
pub mod variational;
pub mod zeros;

pub use error::{Error, Result};
