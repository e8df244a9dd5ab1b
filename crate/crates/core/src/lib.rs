//! Exact linear algebra over prime fields built around the Frobenius normal
//! form of a generic matrix, and randomized algebraic distance oracles for
//! directed graphs built on top of it.
//!
//! The layers, bottom-up:
//!
//! - [`field`], [`poly`]: arithmetic in Z/pZ and dense polynomials.
//! - [`matrix`], [`polymat`]: dense matrices, Hankel utilities and
//!   truncated polynomial matrices.
//! - [`frobenius`]: Las Vegas FNF construction and matrix power queries.
//! - [`updates`]: rank-1 FNF updates and batched element updates of powers.
//! - [`graphenc`]: random weighted adjacency encodings of digraphs.
//! - [`oracles`]: distance oracles (multi-failure, dynamic edge, vertex update).

pub mod cli;
pub mod error;
pub mod field;
pub mod frobenius;
pub mod graphenc;
pub mod matrix;
pub mod oracles;
pub mod poly;
pub mod polymat;
pub mod updates;

pub use error::{Error, Result};
pub use field::{PrimeField, Scalar};
pub use matrix::Matrix;
pub use poly::Poly;
pub use polymat::PolyMatrix;
