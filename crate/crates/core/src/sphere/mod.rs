//! Spectral representation of fields on the round unit sphere.

mod elliptic;
mod field;
mod grid;
mod harmonics;
mod legendre;
mod tangent;

pub use elliptic::{default_tolerance, invert_helmholtz_plus_two, invert_laplacian, invert_shear_operator};
pub use field::{CovectorField, ScalarField};
pub use grid::SphereGrid;
pub use harmonics::{axis_order, coeff_count, first_eigen_norm, index, HarmonicCoeffs};
pub use legendre::{gauss_legendre, LegendreTable};
pub use tangent::{Calculus, TangentTensor};
