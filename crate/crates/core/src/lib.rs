//! Finite groupoids, their convolution C*-algebras realized as explicit matrix
//! *-algebras, and finite-scale checks of the structure theory built on them:
//! spectra through induction from isotropy, Morita equivalence, invariant-ideal
//! exactness, unitary-action collapse, and fiberwise Pontryagin duality.
//!
//! Every algebra here is finite dimensional, so the universal norm is realized by
//! the faithful left regular representation and "spectrum" means the Wedderburn
//! block list of the matrix model.

pub mod algebra;
pub mod bundle;
pub mod corpus;
pub mod crossed;
pub mod error;
pub mod exec;
pub mod groupoid;
pub mod groups;
pub mod induction;
pub mod linalg;
pub mod report;
pub mod star_algebra;

pub use error::{Error, Result};
pub use exec::Exec;
pub use groupoid::{ElemId, FiniteGroupoid, GroupoidTable};
pub use groups::GroupTable;
pub use star_algebra::NumericOptions;
