//! Exact computer algebra for interpolated categories of permutation modules.
pub mod category;
pub mod combinatorics;
pub mod deligne;
pub mod error;
pub mod exact;
pub mod glpres;
pub mod hsmod;
pub mod kron;
pub mod linalg;
pub mod schur;
pub mod serialize;
pub mod suites;

pub use combinatorics::{CosetMatrix, Composition, ObjectLabel, SetPartition};
pub use error::{Error, Result};
pub use exact::{AffineForm, IVPoly, Rational};
pub use schur::{compose_interpolated, specialize_morphism, ConcreteMap, Morphism};
