//! Concrete model: bounded homotopy category of projectives over a quiver algebra.

pub mod algebra;
pub mod complex;
pub mod decompose;
pub mod enumerate;
pub mod hom;

pub use algebra::{Algebra, AlgebraPresentation};
pub use complex::{cone, Complex, GradedMap, PMat};
pub use decompose::decompose;
pub use enumerate::{enumerate_indecomposables, Enumeration, OrbitRep};
pub use hom::{find_iso, hom_dim, HomSpace};
