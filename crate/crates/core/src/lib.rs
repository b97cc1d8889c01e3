//! Structured block encodings of sparse matrices.
//!
//! A matrix is described by a labelling of its non-zero entries ([`structure`]),
//! compiled into oracle permutations, assembled into circuits ([`schemes`],
//! [`families`]) and simulated densely so the encoded block can be checked
//! ([`verify`]). [`estimator`] tabulates resource costs and [`sva`] handles
//! singular-value amplification polynomials.

pub mod circuit;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod families;
pub mod schemes;
pub mod structure;
pub mod sva;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use schemes::{build, BlockEncoding, SchemeKind};
pub use structure::{compile, StructureSpec};
