//! Coefficient storage in the real orthonormal spherical-harmonic basis.
//!
//! Basis functions, with `P̄` the associated Legendre functions normalized so that
//! `2π ∫ P̄_l^m(x)² dx = 1` and no Condon-Shortley phase:
//!
//! ```text
//! Y_{l,0}  = P̄_l^0(cos θ)
//! Y_{l,m}  = √2 P̄_l^m(cos θ) cos(mφ)     m > 0
//! Y_{l,-m} = √2 P̄_l^m(cos θ) sin(mφ)     m > 0
//! ```
//!
//! With this choice the coordinate functions of the unit sphere are
//! `x = √(4π/3) Y_{1,1}`, `y = √(4π/3) Y_{1,-1}`, `z = √(4π/3) Y_{1,0}`.

use crate::error::{Error, Result};

/// Flat index of `(l, mu)` in a coefficient vector.
#[inline]
pub fn index(l: usize, mu: i64) -> usize {
    debug_assert!(mu.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + mu) as usize
}

/// Number of coefficients for band limit `l_max`.
#[inline]
pub fn coeff_count(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Order `mu` of the degree-1 harmonic proportional to the Cartesian coordinate `axis` (0 = x).
pub fn axis_order(axis: usize) -> i64 {
    match axis {
        0 => 1,
        1 => -1,
        2 => 0,
        _ => panic!("axis {axis} out of range"),
    }
}

/// `√(4π/3)`: the coefficient of `Y_{1,mu}` in a first eigenfunction.
pub fn first_eigen_norm() -> f64 {
    (4.0 * std::f64::consts::PI / 3.0).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoeffs {
    band_limit: usize,
    data: Vec<f64>,
}

impl HarmonicCoeffs {
    pub fn zeros(band_limit: usize) -> Self {
        Self {
            band_limit,
            data: vec![0.0; coeff_count(band_limit)],
        }
    }

    pub fn from_vec(band_limit: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != coeff_count(band_limit) {
            return Err(Error::ShapeMismatch {
                expected: coeff_count(band_limit),
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient #{pos}")));
        }
        Ok(Self { band_limit, data })
    }

    /// A single basis function `value · Y_{l,mu}`.
    pub fn delta(band_limit: usize, l: usize, mu: i64, value: f64) -> Self {
        let mut c = Self::zeros(band_limit);
        c.set(l, mu, value);
        c
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Coefficient of `Y_{l,mu}`; zero beyond the band limit.
    pub fn get(&self, l: usize, mu: i64) -> f64 {
        if l > self.band_limit {
            0.0
        } else {
            self.data[index(l, mu)]
        }
    }

    pub fn set(&mut self, l: usize, mu: i64, value: f64) {
        assert!(l <= self.band_limit, "degree {l} beyond band limit {}", self.band_limit);
        self.data[index(l, mu)] = value;
    }

    /// Iterate `(l, mu, value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        (0..=self.band_limit).flat_map(move |l| {
            (-(l as i64)..=l as i64).map(move |mu| (l, mu, self.data[index(l, mu)]))
        })
    }

    /// Copy into a different band limit, truncating or zero-padding.
    pub fn resized(&self, band_limit: usize) -> Self {
        let mut out = Self::zeros(band_limit);
        let n = coeff_count(band_limit.min(self.band_limit));
        out.data[..n].copy_from_slice(&self.data[..n]);
        out
    }

    /// Multiply the degree-`l` block by `f(l)`.
    pub fn map_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for l in 0..=self.band_limit {
            let s = f(l);
            for v in &mut out.data[l * l..(l + 1) * (l + 1)] {
                *v *= s;
            }
        }
        out
    }

    /// Zero every degree `l <= l_max`.
    pub fn without_low_degrees(&self, l_max: usize) -> Self {
        let mut out = self.clone();
        let n = coeff_count(l_max.min(self.band_limit));
        out.data[..n].iter_mut().for_each(|v| *v = 0.0);
        out
    }

    /// Euclidean norm of the degree-`l` block.
    pub fn degree_norm(&self, l: usize) -> f64 {
        if l > self.band_limit {
            return 0.0;
        }
        self.data[l * l..(l + 1) * (l + 1)]
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Coefficient dot product; by orthonormality this is `∫ f g`.
    pub fn dot(&self, other: &Self) -> f64 {
        let n = coeff_count(self.band_limit.min(other.band_limit));
        self.data[..n]
            .iter()
            .zip(&other.data[..n])
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `a·self + b·other` at the larger band limit.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        let l = self.band_limit.max(other.band_limit);
        let mut out = Self::zeros(l);
        for (i, v) in out.data.iter_mut().enumerate() {
            let x = self.data.get(i).copied().unwrap_or(0.0);
            let y = other.data.get(i).copied().unwrap_or(0.0);
            *v = a * x + b * y;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            band_limit: self.band_limit,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// Reflection through the equatorial plane, `θ → π - θ`, of a scalar.
    pub fn reflected(&self) -> Self {
        let mut out = self.clone();
        for l in 0..=self.band_limit {
            for mu in -(l as i64)..=l as i64 {
                if (l + mu.unsigned_abs() as usize) % 2 == 1 {
                    out.data[index(l, mu)] = -out.data[index(l, mu)];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout_is_dense() {
        let mut seen = vec![false; coeff_count(6)];
        for l in 0..=6 {
            for mu in -(l as i64)..=l as i64 {
                let i = index(l, mu);
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn resize_preserves_shared_degrees() {
        let c = HarmonicCoeffs::delta(4, 3, -2, 1.5);
        assert_eq!(c.resized(8).get(3, -2), 1.5);
        assert_eq!(c.resized(2).get(3, -2), 0.0);
        assert_eq!(c.resized(2).band_limit(), 2);
    }

    #[test]
    fn non_finite_rejected() {
        let mut v = vec![0.0; 4];
        v[2] = f64::NAN;
        assert!(HarmonicCoeffs::from_vec(1, v).is_err());
    }
}
