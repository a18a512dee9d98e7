//! Numerical toolkit for generalized grand Morrey norms on finite spaces of
//! homogeneous type, together with the maximal, singular-integral and
//! potential operators acting on them and a harness that measures their
//! boundedness constants empirically.

pub mod cli;
pub mod funcnorm;
pub mod homspace;
pub mod operators;
pub mod verify;

pub use funcnorm::{GridFunction, NormError};
pub use homspace::{DiscreteHomSpace, Geometry, SpaceError};
