use std::f64::consts::PI;

use super::grid::SphereGrid;
use super::harmonics::HarmonicCoeffs;
use crate::error::Result;

/// A real function on the unit sphere, held spectrally.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    coeffs: HarmonicCoeffs,
}

impl ScalarField {
    pub fn new(coeffs: HarmonicCoeffs) -> Self {
        Self { coeffs }
    }

    pub fn zeros(band_limit: usize) -> Self {
        Self::new(HarmonicCoeffs::zeros(band_limit))
    }

    pub fn constant(band_limit: usize, value: f64) -> Self {
        Self::new(HarmonicCoeffs::delta(
            band_limit,
            0,
            0,
            value * (4.0 * PI).sqrt(),
        ))
    }

    /// First eigenfunction `X̃^{axis+1}` (the Cartesian coordinate `x`, `y` or `z`).
    pub fn first_eigen(band_limit: usize, axis: usize) -> Self {
        use super::harmonics::{axis_order, first_eigen_norm};
        Self::new(HarmonicCoeffs::delta(
            band_limit,
            1,
            axis_order(axis),
            first_eigen_norm(),
        ))
    }

    /// Project grid samples onto degrees `<= lmax`.
    pub fn from_values(grid: &SphereGrid, values: &[f64], lmax: usize) -> Result<Self> {
        Ok(Self::new(grid.analyze_to(values, lmax)?))
    }

    pub fn coeffs(&self) -> &HarmonicCoeffs {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> HarmonicCoeffs {
        self.coeffs
    }

    pub fn band_limit(&self) -> usize {
        self.coeffs.band_limit()
    }

    pub fn values(&self, grid: &SphereGrid) -> Result<Vec<f64>> {
        grid.synthesize(&self.coeffs)
    }

    pub fn integrate(&self) -> f64 {
        (4.0 * PI).sqrt() * self.coeffs.get(0, 0)
    }

    pub fn mean(&self) -> f64 {
        self.integrate() / (4.0 * PI)
    }

    /// `∫ self · other`, exact by orthonormality.
    pub fn inner(&self, other: &Self) -> f64 {
        self.coeffs.dot(&other.coeffs)
    }

    pub fn laplacian(&self) -> Self {
        Self::new(self.coeffs.map_degree(|l| -((l * (l + 1)) as f64)))
    }

    /// `(Δ + 2) f`.
    pub fn helmholtz_plus_two(&self) -> Self {
        Self::new(self.coeffs.map_degree(|l| 2.0 - (l * (l + 1)) as f64))
    }

    pub fn gradient(&self) -> CovectorField {
        CovectorField::new(self.clone(), Self::zeros(self.band_limit()))
    }

    /// `ε̊_{AB} ∇̊^B f`.
    pub fn skew_gradient(&self) -> CovectorField {
        CovectorField::new(Self::zeros(self.band_limit()), self.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coeffs.lin_comb(1.0, &other.coeffs, 1.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coeffs.lin_comb(1.0, &other.coeffs, -1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.scaled(s))
    }

    pub fn resized(&self, band_limit: usize) -> Self {
        Self::new(self.coeffs.resized(band_limit))
    }

    /// Remove degrees `<= l`.
    pub fn without_low_degrees(&self, l: usize) -> Self {
        Self::new(self.coeffs.without_low_degrees(l))
    }

    /// Pointwise product projected onto degrees `<= lmax`.
    pub fn product(&self, other: &Self, grid: &SphereGrid, lmax: usize) -> Result<Self> {
        let a = self.values(grid)?;
        let b = other.values(grid)?;
        let p: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::from_values(grid, &p, lmax)
    }

    /// Reflection `θ → π - θ`.
    pub fn reflected(&self) -> Self {
        Self::new(self.coeffs.reflected())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.max_abs()
    }
}

/// A tangential 1-form `V_A = ∇̊_A g + ε̊_{AB} ∇̊^B h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovectorField {
    grad: ScalarField,
    curl: ScalarField,
}

impl CovectorField {
    /// Degree-0 content of either potential is dropped; it does not contribute to `V`.
    pub fn new(grad: ScalarField, curl: ScalarField) -> Self {
        let strip = |f: ScalarField| {
            let mut c = f.into_coeffs();
            c.set(0, 0, 0.0);
            ScalarField::new(c)
        };
        Self {
            grad: strip(grad),
            curl: strip(curl),
        }
    }

    pub fn zeros(band_limit: usize) -> Self {
        Self::new(ScalarField::zeros(band_limit), ScalarField::zeros(band_limit))
    }

    pub fn grad_potential(&self) -> &ScalarField {
        &self.grad
    }

    pub fn curl_potential(&self) -> &ScalarField {
        &self.curl
    }

    pub fn band_limit(&self) -> usize {
        self.grad.band_limit().max(self.curl.band_limit())
    }

    /// `∇̊^A V_A = Δ̊ g`.
    pub fn divergence(&self) -> ScalarField {
        self.grad.laplacian()
    }

    /// `ε̊^{AB} ∇̊_B V_A = Δ̊ h`.
    pub fn curl(&self) -> ScalarField {
        self.curl.laplacian()
    }

    /// `∫ V^A W_A`; both Helmholtz parts are orthogonal, each pairs as `-∫ p Δ̊ q`.
    pub fn inner(&self, other: &Self) -> f64 {
        -self.grad.inner(&other.grad.laplacian()) - self.curl.inner(&other.curl.laplacian())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.grad.add(&other.grad), self.curl.add(&other.curl))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.grad.sub(&other.grad), self.curl.sub(&other.curl))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.grad.scale(s), self.curl.scale(s))
    }

    /// Orthonormal-frame components `(V_θ̂, V_φ̂)` on the grid.
    pub fn frame_components(&self, grid: &SphereGrid) -> Result<(Vec<f64>, Vec<f64>)> {
        let (gt, gp) = grid.synthesize_gradient(self.grad.coeffs())?;
        let (ht, hp) = grid.synthesize_gradient(self.curl.coeffs())?;
        // ε̊_{θ̂φ̂} = +1: (ε∇h)_θ̂ = ∇_φ̂ h, (ε∇h)_φ̂ = -∇_θ̂ h
        let vt = gt.iter().zip(&hp).map(|(a, b)| a + b).collect();
        let vp = gp.iter().zip(&ht).map(|(a, b)| a - b).collect();
        Ok((vt, vp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrates_to_four_pi_times_value() {
        let f = ScalarField::constant(4, 2.5);
        assert!((f.integrate() - 10.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn first_eigen_is_cos_theta() {
        let g = SphereGrid::new(3);
        let v = ScalarField::first_eigen(3, 2).values(&g).unwrap();
        for (i, x) in v.iter().enumerate() {
            let (t, _) = g.point(i);
            assert!((x - t.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn first_eigen_x_and_y() {
        let g = SphereGrid::new(2);
        let x = ScalarField::first_eigen(2, 0).values(&g).unwrap();
        let y = ScalarField::first_eigen(2, 1).values(&g).unwrap();
        for i in 0..g.len() {
            let (t, p) = g.point(i);
            assert!((x[i] - t.sin() * p.cos()).abs() < 1e-14);
            assert!((y[i] - t.sin() * p.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn frame_components_of_skew_gradient() {
        // h = cos θ: ε∇h has θ̂ part 0 and φ̂ part sin θ
        let g = SphereGrid::new(4);
        let v = ScalarField::first_eigen(4, 2).skew_gradient();
        let (vt, vp) = v.frame_components(&g).unwrap();
        for i in 0..g.len() {
            let (t, _) = g.point(i);
            assert!(vt[i].abs() < 1e-13);
            assert!((vp[i] - t.sin()).abs() < 1e-13);
        }
    }
}
