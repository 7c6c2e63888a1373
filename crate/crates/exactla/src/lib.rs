//! Exact sparse linear algebra over the rationals and integers.

pub mod echelon;
pub mod error;
pub mod matrix;
pub mod q;
pub mod qpi;
pub mod snf;
pub mod subspace;
pub mod svec;

pub use echelon::Echelon;
pub use error::LinAlgError;
pub use matrix::{lincomb, null_space_of_rows, RatMatrix};
pub use q::Q;
pub use qpi::QPi;
pub use snf::{smith_invariants, smith_normal_form, SnfResult};
pub use subspace::Subspace;
pub use svec::SVec;
