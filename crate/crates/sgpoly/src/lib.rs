//! Calculus for the symmetric self-similar Laplacians Δ_r on the Sierpinski
//! gasket: monomial values and derivatives, polynomial evaluation on refined
//! meshes, and the Neumann spectrum by spectral decimation.
//!
//! All computations are generic over [`Scalar`], with an exact rational
//! backend and an extended-precision float backend.

pub mod error;
pub mod laplacian;
pub mod linalg;
pub mod mesh;
pub mod monomials;
pub mod oracle;
pub mod poly_eval;
pub mod scalar;
pub mod spectrum;

pub use error::{Error, Result};
pub use laplacian::{LaplacianParams, V1Values, harmonic_extension};
pub use mesh::{Geometry, VertexAddr, VertexMesh};
pub use monomials::{MonomialRow, MonomialTable};
pub use poly_eval::{CellPolynomial, CoeffVector, JetCalculus, Refinement, Rotation};
pub use scalar::{Backend, Float, RBig, Scalar};
pub use spectrum::{Branch, Decimation, DecimationTrajectory, Level1Spectrum, TargetRatio, target_ratio};
pub use num_rational::BigRational;
