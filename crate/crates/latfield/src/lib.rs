//! Exact discrete model of the phase space of Abelian gauge fields on
//! cubical Lorentzian lattices.

pub mod complex;
pub mod error;
pub mod functor;
pub mod gauge;
pub mod green;
pub mod homology;
pub mod lorentz;
pub mod phasespace;

pub use error::ModelError;
