//! Inverses of `Δ̊` and `Δ̊ + 2` on their ranges.

use super::field::ScalarField;
use crate::error::{Error, Result};

/// Default kernel tolerance: `1e-10 · (1 + max |coeff|)`.
pub fn default_tolerance(f: &ScalarField) -> f64 {
    1e-10 * (1.0 + f.max_abs_coeff())
}

/// Solve `(Δ̊ + 2) M = f`. The kernel (degree 1) must be absent from `f` up to `tol`;
/// the degree-1 part of the solution is set to zero.
pub fn invert_helmholtz_plus_two(f: &ScalarField, tol: f64) -> Result<ScalarField> {
    let content = f.coeffs().degree_norm(1);
    if content > tol {
        return Err(Error::KernelObstruction {
            content,
            tolerance: tol,
        });
    }
    Ok(ScalarField::new(f.coeffs().map_degree(|l| {
        if l == 1 {
            0.0
        } else {
            1.0 / (2.0 - (l * (l + 1)) as f64)
        }
    })))
}

/// Solve `Δ̊ u = f` with zero mean. `f` must have mean below `tol`.
pub fn invert_laplacian(f: &ScalarField, tol: f64) -> Result<ScalarField> {
    let mean = f.mean();
    if mean.abs() > tol {
        return Err(Error::NonzeroMean {
            mean,
            tolerance: tol,
        });
    }
    Ok(ScalarField::new(f.coeffs().map_degree(|l| {
        if l == 0 {
            0.0
        } else {
            -1.0 / (l * (l + 1)) as f64
        }
    })))
}

/// Solve `½ Δ̊(Δ̊ + 2) u = f` on degrees `>= 2`; lower degrees of `f` are discarded.
pub fn invert_shear_operator(f: &ScalarField) -> ScalarField {
    ScalarField::new(f.coeffs().map_degree(|l| {
        if l <= 1 {
            0.0
        } else {
            let lam = (l * (l + 1)) as f64;
            2.0 / (lam * (lam - 2.0))
        }
    }))
}
