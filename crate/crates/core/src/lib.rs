//! Finite-field quiver representations, their Hall algebras, and exact
//! checks of Green's formula and of induction/restriction identities.

pub mod algebra;
pub mod cache;
pub mod context;
pub mod error;
pub mod exec;
pub mod field;
pub mod functor;
pub mod green;
pub mod hallnum;
pub mod matrix;
pub mod quiver;
pub mod rep;
pub mod scalar;
pub mod subspace;
pub mod table;

pub use algebra::{HallElement, Sign, TensorElement};
pub use context::{ClassKey, HallContext};
pub use error::{HallError, Result};
pub use exec::Execution;
pub use field::{Elem, GaloisField};
pub use matrix::GfMatrix;
pub use quiver::{DimVector, Quiver};
pub use rep::Rep;
pub use scalar::SqrtQScalar;
pub use table::IsoClassTable;
