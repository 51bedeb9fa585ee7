//! Exact computations with p-dg algebras, their categories of one-sided
//! twisted complexes, stable hom spaces, and the 2-category of projective
//! p-dg bimodules with its cell 2-representations.

pub mod bicat;
pub mod builtin;
pub mod category;
pub mod cellrep;
pub mod expr;
pub mod filtration;
pub mod format;
pub mod gflin;
pub mod homotopy;
pub mod pdgalg;
pub mod twisted;

pub use gflin::{Field, GradedSpace, LinearMap, Mat, Scalar};
pub use pdgalg::{validate_algebra, HModuleData, PdgAlgebra, RawAlgebra};
