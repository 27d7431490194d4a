use std::f64::consts::PI;

use super::harmonics::{coeff_count, index, HarmonicCoeffs};
use super::legendre::{gauss_legendre, LegendreTable};
use crate::error::{Error, Result};

/// Gauss-Legendre in `cos θ` times uniform in `φ`.
///
/// Samples are stored theta-major: `values[j * n_phi + k]` sits at `(θ_j, φ_k)`.
/// The grid transforms exactly up to its resolved limit `K = min(n_theta - 1, (n_phi - 2)/2)`
/// reduced so that products of two band-`L` fields, and their first few derivatives,
/// are analyzed without aliasing.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    band_limit: usize,
    resolved: usize,
    n_theta: usize,
    n_phi: usize,
    theta: Vec<f64>,
    cos_theta: Vec<f64>,
    sin_theta: Vec<f64>,
    weights: Vec<f64>,
    phi: Vec<f64>,
    cos_m: Vec<f64>,
    sin_m: Vec<f64>,
    legendre: LegendreTable,
}

impl SphereGrid {
    /// Default grid for band limit `L`: `2L + 8` colatitudes and `4L + 16` longitudes.
    pub fn new(band_limit: usize) -> Self {
        Self::with_resolution(band_limit, 2 * band_limit + 8, 4 * band_limit + 16)
            .expect("default resolution is admissible")
    }

    pub fn with_resolution(band_limit: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 * band_limit + 8 {
            return Err(Error::GridTooCoarse {
                band_limit,
                reason: format!("n_theta = {n_theta} < {}", 2 * band_limit + 8),
            });
        }
        if n_phi < 4 * band_limit + 16 {
            return Err(Error::GridTooCoarse {
                band_limit,
                reason: format!("n_phi = {n_phi} < {}", 4 * band_limit + 16),
            });
        }
        // exact analysis to degree K of anything up to degree 2n_theta - 1 - K in θ
        // and n_phi - 1 - K in φ; pick K so that degree K + 1 inputs are still exact
        let resolved = (n_theta - 1).min((n_phi - 2) / 2);
        let (x, w) = gauss_legendre(n_theta);
        let theta: Vec<f64> = x.iter().map(|x| x.acos()).collect();
        let sin_theta: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
        let phi: Vec<f64> = (0..n_phi)
            .map(|k| 2.0 * PI * k as f64 / n_phi as f64)
            .collect();
        let mut cos_m = vec![0.0; (resolved + 1) * n_phi];
        let mut sin_m = vec![0.0; (resolved + 1) * n_phi];
        for m in 0..=resolved {
            for (k, p) in phi.iter().enumerate() {
                cos_m[m * n_phi + k] = (m as f64 * p).cos();
                sin_m[m * n_phi + k] = (m as f64 * p).sin();
            }
        }
        let legendre = LegendreTable::new(resolved, &x);
        Ok(Self {
            band_limit,
            resolved,
            n_theta,
            n_phi,
            theta,
            cos_theta: x,
            sin_theta,
            weights: w,
            phi,
            cos_m,
            sin_m,
            legendre,
        })
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    /// Highest degree the grid synthesizes and analyzes.
    pub fn resolved_limit(&self) -> usize {
        self.resolved
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn sin_theta(&self) -> &[f64] {
        &self.sin_theta
    }

    /// Gauss weights in `cos θ`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// `(θ, φ)` of sample `i`.
    pub fn point(&self, i: usize) -> (f64, f64) {
        (self.theta[i / self.n_phi], self.phi[i % self.n_phi])
    }

    /// Evaluate `f(θ, φ)` at every sample.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for t in &self.theta {
            for p in &self.phi {
                out.push(f(*t, *p));
            }
        }
        out
    }

    /// Quadrature weight of sample `i` (solid angle).
    #[inline]
    pub fn area_weight(&self, i: usize) -> f64 {
        self.weights[i / self.n_phi] * 2.0 * PI / self.n_phi as f64
    }

    /// `∫ f` by quadrature.
    pub fn integrate_values(&self, values: &[f64]) -> Result<f64> {
        self.check_shape(values)?;
        let dphi = 2.0 * PI / self.n_phi as f64;
        let mut total = 0.0;
        for (j, row) in values.chunks_exact(self.n_phi).enumerate() {
            total += self.weights[j] * row.iter().sum::<f64>();
        }
        Ok(total * dphi)
    }

    fn check_shape(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                actual: values.len(),
            });
        }
        Ok(())
    }

    /// Projection onto degrees `<= L`.
    pub fn analyze(&self, values: &[f64]) -> Result<HarmonicCoeffs> {
        self.analyze_to(values, self.band_limit)
    }

    /// Projection onto degrees `<= lmax`; `lmax` may not exceed the resolved limit.
    pub fn analyze_to(&self, values: &[f64], lmax: usize) -> Result<HarmonicCoeffs> {
        self.check_shape(values)?;
        if lmax > self.resolved {
            return Err(Error::BandLimitExceeded {
                requested: lmax,
                resolved: self.resolved,
            });
        }
        let np = self.n_phi;
        let dphi = 2.0 * PI / np as f64;
        let mut out = vec![0.0; coeff_count(lmax)];
        let mut a = vec![0.0; self.n_theta];
        let mut b = vec![0.0; self.n_theta];
        for m in 0..=lmax {
            let cm = &self.cos_m[m * np..(m + 1) * np];
            let sm = &self.sin_m[m * np..(m + 1) * np];
            let scale = if m == 0 { 1.0 } else { 2f64.sqrt() };
            for (j, row) in values.chunks_exact(np).enumerate() {
                let mut sa = 0.0;
                let mut sb = 0.0;
                for k in 0..np {
                    sa += row[k] * cm[k];
                    sb += row[k] * sm[k];
                }
                let f = self.weights[j] * dphi * scale;
                a[j] = sa * f;
                b[j] = sb * f;
            }
            for l in m..=lmax {
                let p = self.legendre.values(m, l);
                let mut ca = 0.0;
                let mut cb = 0.0;
                for j in 0..self.n_theta {
                    ca += p[j] * a[j];
                    cb += p[j] * b[j];
                }
                out[index(l, m as i64)] = ca;
                if m > 0 {
                    out[index(l, -(m as i64))] = cb;
                }
            }
        }
        HarmonicCoeffs::from_vec(lmax, out)
    }

    fn check_band(&self, coeffs: &HarmonicCoeffs) -> Result<()> {
        if coeffs.band_limit() > self.resolved {
            return Err(Error::BandLimitExceeded {
                requested: coeffs.band_limit(),
                resolved: self.resolved,
            });
        }
        Ok(())
    }

    /// Per-colatitude Fourier amplitudes `A_m(θ_j)`, `B_m(θ_j)` of a synthesis, built from
    /// either the Legendre values or their θ-derivatives.
    fn fourier_rows(&self, coeffs: &HarmonicCoeffs, deriv: bool) -> (Vec<f64>, Vec<f64>) {
        let lmax = coeffs.band_limit();
        let nt = self.n_theta;
        let mut a = vec![0.0; (lmax + 1) * nt];
        let mut b = vec![0.0; (lmax + 1) * nt];
        for m in 0..=lmax {
            let scale = if m == 0 { 1.0 } else { 2f64.sqrt() };
            let ar = &mut a[m * nt..(m + 1) * nt];
            let br = &mut b[m * nt..(m + 1) * nt];
            for l in m..=lmax {
                let p = if deriv {
                    self.legendre.derivs(m, l)
                } else {
                    self.legendre.values(m, l)
                };
                let ca = coeffs.get(l, m as i64) * scale;
                let cb = if m > 0 {
                    coeffs.get(l, -(m as i64)) * scale
                } else {
                    0.0
                };
                if ca != 0.0 {
                    for j in 0..nt {
                        ar[j] += ca * p[j];
                    }
                }
                if cb != 0.0 {
                    for j in 0..nt {
                        br[j] += cb * p[j];
                    }
                }
            }
        }
        (a, b)
    }

    fn fourier_sum(&self, a: &[f64], b: &[f64], lmax: usize, out: &mut [f64]) {
        let nt = self.n_theta;
        let np = self.n_phi;
        for j in 0..nt {
            let row = &mut out[j * np..(j + 1) * np];
            row.iter_mut().for_each(|v| *v = a[j]);
            for m in 1..=lmax {
                let am = a[m * nt + j];
                let bm = b[m * nt + j];
                if am == 0.0 && bm == 0.0 {
                    continue;
                }
                let cm = &self.cos_m[m * np..(m + 1) * np];
                let sm = &self.sin_m[m * np..(m + 1) * np];
                for k in 0..np {
                    row[k] += am * cm[k] + bm * sm[k];
                }
            }
        }
    }

    /// Pointwise evaluation; accepts coefficients up to the resolved limit.
    pub fn synthesize(&self, coeffs: &HarmonicCoeffs) -> Result<Vec<f64>> {
        self.check_band(coeffs)?;
        let (a, b) = self.fourier_rows(coeffs, false);
        let mut out = vec![0.0; self.len()];
        self.fourier_sum(&a, &b, coeffs.band_limit(), &mut out);
        Ok(out)
    }

    /// Orthonormal-frame gradient components `(∂_θ f, (1/sin θ) ∂_φ f)`.
    pub fn synthesize_gradient(&self, coeffs: &HarmonicCoeffs) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_band(coeffs)?;
        let lmax = coeffs.band_limit();
        let nt = self.n_theta;
        let (da, db) = self.fourier_rows(coeffs, true);
        let mut ft = vec![0.0; self.len()];
        self.fourier_sum(&da, &db, lmax, &mut ft);
        // ∂_φ (A cos mφ + B sin mφ) = m (B cos mφ - A sin mφ)
        let (a, b) = self.fourier_rows(coeffs, false);
        let mut pa = vec![0.0; a.len()];
        let mut pb = vec![0.0; b.len()];
        for m in 1..=lmax {
            for j in 0..nt {
                let s = m as f64 / self.sin_theta[j];
                pa[m * nt + j] = s * b[m * nt + j];
                pb[m * nt + j] = -s * a[m * nt + j];
            }
        }
        let mut fp = vec![0.0; self.len()];
        self.fourier_sum(&pa, &pb, lmax, &mut fp);
        Ok((ft, fp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_weight_is_four_pi() {
        for l in [0, 4, 17] {
            let g = SphereGrid::new(l);
            let ones = vec![1.0; g.len()];
            let s = g.integrate_values(&ones).unwrap();
            assert!((s / (4.0 * PI) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(matches!(
            SphereGrid::with_resolution(8, 20, 48),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn shape_mismatch_reported() {
        let g = SphereGrid::new(3);
        assert!(matches!(
            g.analyze(&[0.0; 5]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn synthesis_beyond_resolution_rejected() {
        let g = SphereGrid::new(3);
        let c = HarmonicCoeffs::zeros(g.resolved_limit() + 1);
        assert!(matches!(
            g.synthesize(&c),
            Err(Error::BandLimitExceeded { .. })
        ));
    }
}
