//! Radiative data on one cut of null infinity, and generators for it.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{CovectorField, HarmonicCoeffs, LegendreTable, ScalarField};
use crate::tensor::TracelessTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct BondiData {
    mass_aspect: ScalarField,
    angmom_aspect: CovectorField,
    shear: TracelessTensor,
    u: f64,
}

impl BondiData {
    pub fn new(
        mass_aspect: ScalarField,
        angmom_aspect: CovectorField,
        shear: TracelessTensor,
        u: f64,
    ) -> Result<Self> {
        let l = mass_aspect.band_limit();
        let others = [
            ("angular momentum aspect (grad)", angmom_aspect.grad_potential().band_limit()),
            ("angular momentum aspect (curl)", angmom_aspect.curl_potential().band_limit()),
            ("shear (electric)", shear.electric().band_limit()),
            ("shear (magnetic)", shear.magnetic().band_limit()),
        ];
        for (name, other) in others {
            if other != l {
                return Err(Error::BandLimitMismatch(format!(
                    "mass aspect has band limit {l}, {name} has {other}"
                )));
            }
        }
        if !u.is_finite() {
            return Err(Error::NonFinite("u".into()));
        }
        Ok(Self {
            mass_aspect,
            angmom_aspect,
            shear,
            u,
        })
    }

    /// Constant mass aspect, no shear, no angular momentum aspect.
    pub fn schwarzschild(band_limit: usize, mass: f64) -> Self {
        Self::new(
            ScalarField::constant(band_limit, mass),
            CovectorField::zeros(band_limit),
            TracelessTensor::zeros(band_limit),
            0.0,
        )
        .expect("consistent band limits")
    }

    pub fn band_limit(&self) -> usize {
        self.mass_aspect.band_limit()
    }

    pub fn mass_aspect(&self) -> &ScalarField {
        &self.mass_aspect
    }

    pub fn angmom_aspect(&self) -> &CovectorField {
        &self.angmom_aspect
    }

    pub fn shear(&self) -> &TracelessTensor {
        &self.shear
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn with_u(&self, u: f64) -> Result<Self> {
        Self::new(
            self.mass_aspect.clone(),
            self.angmom_aspect.clone(),
            self.shear.clone(),
            u,
        )
    }

    pub fn with_mass_aspect(&self, m: ScalarField) -> Result<Self> {
        Self::new(m, self.angmom_aspect.clone(), self.shear.clone(), self.u)
    }

    pub fn with_angmom_aspect(&self, n: CovectorField) -> Result<Self> {
        Self::new(self.mass_aspect.clone(), n, self.shear.clone(), self.u)
    }

    pub fn with_shear(&self, shear: TracelessTensor) -> Result<Self> {
        Self::new(self.mass_aspect.clone(), self.angmom_aspect.clone(), shear, self.u)
    }

    /// Reflection through the equatorial plane. `N` and `C` transform as tensors, so the
    /// curl-type potentials change sign.
    pub fn reflected(&self) -> Self {
        let n = &self.angmom_aspect;
        Self {
            mass_aspect: self.mass_aspect.reflected(),
            angmom_aspect: CovectorField::new(
                n.grad_potential().reflected(),
                n.curl_potential().reflected().scale(-1.0),
            ),
            shear: self.shear.reflected(),
            u: self.u,
        }
    }
}

/// Energy, momentum, center of mass and angular momentum of one cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeSet {
    pub energy: f64,
    pub linear_momentum: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub center_of_mass: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub angular_momentum: Option<[f64; 3]>,
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub withheld: Option<String>,
}

/// Coefficients of `sin θ` in degrees `<= band_limit`, computed by Gauss-Chebyshev
/// quadrature of the second kind, which integrates `√(1-x²)·poly` exactly.
pub fn sin_theta_coeffs(band_limit: usize) -> ScalarField {
    let n = band_limit + 2;
    let nodes: Vec<f64> = (1..=n)
        .map(|k| (k as f64 * PI / (n + 1) as f64).cos())
        .collect();
    let weights: Vec<f64> = (1..=n)
        .map(|k| {
            let s = (k as f64 * PI / (n + 1) as f64).sin();
            PI / (n + 1) as f64 * s * s
        })
        .collect();
    let table = LegendreTable::new(band_limit, &nodes);
    let mut c = HarmonicCoeffs::zeros(band_limit);
    for l in (0..=band_limit).step_by(2) {
        let p = table.values(0, l);
        let v: f64 = p.iter().zip(&weights).map(|(p, w)| p * w).sum();
        c.set(l, 0, 2.0 * PI * v);
    }
    ScalarField::new(c)
}

/// Data of the Kerr metric with mass `mass` and spin parameter `spin` in a BMS frame.
pub fn kerr_data(mass: f64, spin: f64, band_limit: usize) -> Result<BondiData> {
    if !mass.is_finite() {
        return Err(Error::NonFinite("mass".into()));
    }
    if !spin.is_finite() {
        return Err(Error::NonFinite("spin".into()));
    }
    if band_limit < 8 {
        return Err(Error::InvalidArgument(format!(
            "band limit {band_limit} below the minimum of 8"
        )));
    }
    let sin = sin_theta_coeffs(band_limit);
    let ma = mass * spin;
    let n = CovectorField::new(
        sin.scale(3.0 * ma),
        ScalarField::first_eigen(band_limit, 2).scale(-3.0 * ma),
    );
    let shear = TracelessTensor::new(sin.scale(-2.0 * spin), ScalarField::zeros(band_limit));
    BondiData::new(ScalarField::constant(band_limit, mass), n, shear, 0.0)
}

fn random_field(rng: &mut ChaCha8Rng, band_limit: usize, amplitude: f64) -> ScalarField {
    let mut c = HarmonicCoeffs::zeros(band_limit);
    for l in 0..=band_limit {
        let decay = (l.max(1) as f64).powi(-3);
        for mu in -(l as i64)..=l as i64 {
            let v: f64 = rng.gen_range(-1.0..1.0);
            c.set(l, mu, v * amplitude * decay);
        }
    }
    ScalarField::new(c)
}

/// Deterministic pseudo-random data with spectra decaying like `l^-3`.
///
/// With `com_frame`, the mass aspect has no degree-1 part and a positive mean.
pub fn random_data(seed: u64, band_limit: usize, amplitude: f64, com_frame: bool) -> BondiData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = random_field(&mut rng, band_limit, amplitude);
    let g = random_field(&mut rng, band_limit, amplitude);
    let h = random_field(&mut rng, band_limit, amplitude);
    let c = random_field(&mut rng, band_limit, amplitude);
    let cb = random_field(&mut rng, band_limit, amplitude);
    if com_frame {
        let mut coeffs = m.into_coeffs();
        for mu in -1..=1 {
            coeffs.set(1, mu, 0.0);
        }
        let mean = amplitude.abs() * (1.0 + coeffs.get(0, 0).abs());
        coeffs.set(0, 0, mean * (4.0 * PI).sqrt());
        m = ScalarField::new(coeffs);
    }
    BondiData::new(m, CovectorField::new(g, h), TracelessTensor::new(c, cb), 0.0)
        .expect("consistent band limits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereGrid;

    #[test]
    fn sin_theta_projection_matches_grid_projection() {
        // sin θ is not smooth at the poles, so grid projection converges only algebraically
        let l = 40;
        let g = SphereGrid::new(l);
        let vals = g.sample(|t, _| t.sin());
        let grid = g.analyze(&vals).unwrap();
        let exact = sin_theta_coeffs(l);
        for d in 0..=8 {
            assert!((grid.get(d, 0) - exact.coeffs().get(d, 0)).abs() < 2e-5);
        }
        let c00 = PI.powf(1.5) / 2.0;
        assert!((exact.coeffs().get(0, 0) - c00).abs() < 1e-14);
    }

    #[test]
    fn random_data_is_deterministic() {
        assert_eq!(random_data(7, 6, 0.1, true), random_data(7, 6, 0.1, true));
        assert_ne!(random_data(7, 6, 0.1, true), random_data(8, 6, 0.1, true));
    }

    #[test]
    fn com_frame_random_data() {
        let d = random_data(3, 8, 0.2, true);
        assert_eq!(d.mass_aspect().coeffs().degree_norm(1), 0.0);
        assert!(d.mass_aspect().integrate() > 0.0);
    }

    #[test]
    fn band_limit_mismatch_rejected() {
        let r = BondiData::new(
            ScalarField::zeros(4),
            CovectorField::zeros(5),
            TracelessTensor::zeros(4),
            0.0,
        );
        assert!(matches!(r, Err(Error::BandLimitMismatch(_))));
    }
}
