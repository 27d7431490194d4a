//! Symmetric traceless 2-tensors on the sphere through their scalar potentials.
//!
//! `C_AB = F_AB[c] + F̄_AB[c̄]` with
//! `F[c] = ∇̊∇̊c - ½σ̊Δ̊c` and `F̄[c̄]_AB = ½(ε̊_AD ∇̊^D∇̊_B c̄ + ε̊_BD ∇̊^D∇̊_A c̄)`.

use crate::error::{Error, Result};
use crate::sphere::{invert_shear_operator, Calculus, CovectorField, ScalarField, SphereGrid, TangentTensor};

#[derive(Debug, Clone, PartialEq)]
pub struct TracelessTensor {
    electric: ScalarField,
    magnetic: ScalarField,
}

impl TracelessTensor {
    /// Degrees `l <= 1` of either potential are dropped; `F` and `F̄` annihilate them.
    pub fn new(electric: ScalarField, magnetic: ScalarField) -> Self {
        let l = electric.band_limit().max(magnetic.band_limit());
        Self {
            electric: electric.resized(l).without_low_degrees(1),
            magnetic: magnetic.resized(l).without_low_degrees(1),
        }
    }

    /// Like [`TracelessTensor::new`] but refuses nonzero `l <= 1` content.
    pub fn new_strict(electric: ScalarField, magnetic: ScalarField) -> Result<Self> {
        for (name, f) in [("electric", &electric), ("magnetic", &magnetic)] {
            for (l, mu, v) in f.coeffs().iter() {
                if l > 1 {
                    break;
                }
                if v != 0.0 {
                    return Err(Error::LowDegreeShear { field: name, l, mu });
                }
            }
        }
        Ok(Self::new(electric, magnetic))
    }

    pub fn zeros(band_limit: usize) -> Self {
        Self::new(ScalarField::zeros(band_limit), ScalarField::zeros(band_limit))
    }

    pub fn electric(&self) -> &ScalarField {
        &self.electric
    }

    pub fn magnetic(&self) -> &ScalarField {
        &self.magnetic
    }

    pub fn band_limit(&self) -> usize {
        self.electric.band_limit()
    }

    pub fn is_zero(&self) -> bool {
        self.electric.max_abs_coeff() == 0.0 && self.magnetic.max_abs_coeff() == 0.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.electric.scale(s), self.magnetic.scale(s))
    }

    /// Ambient components on the grid.
    pub fn tangent(&self, calc: &Calculus) -> Result<TangentTensor> {
        Ok(calc.electric(&self.electric)?.add(&calc.magnetic(&self.magnetic)?))
    }

    /// `∇̊^B C_AB = ∇̊_A ½(Δ̊+2)c + ε̊_AD ∇̊^D ½(Δ̊+2)c̄`.
    pub fn divergence(&self) -> CovectorField {
        CovectorField::new(
            self.electric.helmholtz_plus_two().scale(0.5),
            self.magnetic.helmholtz_plus_two().scale(0.5),
        )
    }

    /// `∇̊^A∇̊^B C_AB = ½Δ̊(Δ̊+2)c`.
    pub fn double_divergence(&self) -> ScalarField {
        self.electric.helmholtz_plus_two().laplacian().scale(0.5)
    }

    /// Reflection `θ → π - θ`; the magnetic potential is a pseudo-scalar.
    pub fn reflected(&self) -> Self {
        Self::new(self.electric.reflected(), self.magnetic.reflected().scale(-1.0))
    }
}

/// Pointwise orthonormal-frame components `(θ̂θ̂, θ̂φ̂)`; `φ̂φ̂ = -θ̂θ̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearComponents {
    pub theta_theta: Vec<f64>,
    pub theta_phi: Vec<f64>,
}

impl ShearComponents {
    /// Coordinate components `(C_θθ, C_θφ, C_φφ)` at sample `i`.
    pub fn coordinate(&self, grid: &SphereGrid, i: usize) -> (f64, f64, f64) {
        let s = grid.point(i).0.sin();
        (
            self.theta_theta[i],
            s * self.theta_phi[i],
            -s * s * self.theta_theta[i],
        )
    }
}

pub fn tensor_components(t: &TracelessTensor, grid: &SphereGrid) -> Result<ShearComponents> {
    let calc = Calculus::new(grid);
    let [tt, tp, _, _] = calc.frame_components(&t.tangent(&calc)?);
    Ok(ShearComponents {
        theta_theta: tt,
        theta_phi: tp,
    })
}

pub fn div_tensor(t: &TracelessTensor) -> CovectorField {
    t.divergence()
}

pub fn double_divergence(t: &TracelessTensor) -> ScalarField {
    t.double_divergence()
}

/// `C_DE C'^DE` projected to the grid's resolved limit.
pub fn contract(a: &TracelessTensor, b: &TracelessTensor, grid: &SphereGrid) -> Result<ScalarField> {
    let calc = Calculus::new(grid);
    let v = a.tangent(&calc)?.dot(&b.tangent(&calc)?);
    calc.project_tensor(&v)
}

/// Potentials recovered from frame components, with the reconstruction defect.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub tensor: TracelessTensor,
    pub residual: f64,
}

/// Recover `(c, c̄)` at band limit `band_limit` from full frame components
/// `[θ̂θ̂, θ̂φ̂, φ̂θ̂, φ̂φ̂]`.
pub fn decompose_shear(
    components: &[Vec<f64>; 4],
    grid: &SphereGrid,
    band_limit: usize,
    tol: f64,
) -> Result<Decomposition> {
    let [tt, tp, pt, pp] = components;
    for c in components {
        if c.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: c.len(),
            });
        }
    }
    let scale = components
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let defect = (0..grid.len())
        .map(|i| (tp[i] - pt[i]).abs().max((tt[i] + pp[i]).abs()))
        .fold(0.0f64, f64::max);
    if defect > tol * (1.0 + scale) {
        return Err(Error::NotSymmetricTraceless {
            defect,
            tolerance: tol * (1.0 + scale),
        });
    }
    let calc = Calculus::new(grid);
    let c = calc.from_frame_components(tt, tp, pt, pp);
    let div = calc.divergence(&c)?;
    let ddiv = calc.project_tensor(&calc.divergence(&div)?)?;
    let curl = calc
        .epsilon()
        .contract(&[0, 1], &calc.nabla(&div)?, &[0, 1]);
    let curl = calc.project_tensor(&curl)?.scale(-1.0);
    let tensor = TracelessTensor::new(
        invert_shear_operator(&ddiv).resized(band_limit),
        invert_shear_operator(&curl).resized(band_limit),
    );
    let residual = tensor.tangent(&calc)?.sub(&c).max_abs();
    Ok(Decomposition { tensor, residual })
}

/// Intermediate pointwise quantities shared by the quadratic shear formulas.
pub(crate) struct ShearFields {
    pub c: TangentTensor,
    pub dc: TangentTensor,
    pub div: TangentTensor,
    pub cc: TangentTensor,
}

impl ShearFields {
    pub fn new(t: &TracelessTensor, calc: &Calculus) -> Result<Self> {
        let c = t.tangent(calc)?;
        let dc = calc.nabla(&c)?;
        let div = dc.trace(0, 2);
        let cc = c.dot(&c);
        Ok(Self { c, dc, div, cc })
    }
}

/// `Δ̊` of sampled values, through the spectral Laplacian.
pub(crate) fn spectral_laplacian(calc: &Calculus, v: &TangentTensor) -> Result<TangentTensor> {
    let f = calc.project_tensor(v)?;
    calc.scalar(&f.laplacian())
}

/// The second-order scalar curvature coefficient, term by term, as samples.
pub(crate) fn r2_values(f: &ShearFields, calc: &Calculus) -> Result<TangentTensor> {
    let t1 = f.cc.scale(0.5);
    let t2 = f.dc.contract(&[0, 1, 2], &f.dc, &[1, 0, 2]).scale(0.5);
    let t3 = spectral_laplacian(calc, &f.cc)?.scale(0.25);
    let w = f
        .c
        .contract(&[1], &f.div, &[0])
        .add(&f.c.contract(&[0, 1], &f.dc, &[0, 1]));
    let t4 = calc.divergence(&w)?.scale(-1.0);
    let t5 = f.dc.dot(&f.dc).scale(-0.25);
    Ok(t1.add(&t2).add(&t3).add(&t4).add(&t5))
}

/// `R⁽²⁾` projected to the grid's resolved limit.
pub fn r2_scalar(t: &TracelessTensor, grid: &SphereGrid) -> Result<ScalarField> {
    let calc = Calculus::new(grid);
    let f = ShearFields::new(t, &calc)?;
    calc.project_tensor(&r2_values(&f, &calc)?)
}

/// A pointwise residual together with the size of the terms that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub abs: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(lhs: &TangentTensor, rhs: &TangentTensor) -> Self {
        Self {
            abs: lhs.sub(rhs).max_abs(),
            scale: lhs.max_abs().max(rhs.max_abs()),
        }
    }

    pub fn from_terms(terms: &[&TangentTensor]) -> Self {
        let mut sum = TangentTensor::zeros(terms[0].rank(), terms[0].npts());
        let mut scale = 0.0f64;
        for t in terms {
            sum = sum.add(t);
            scale = scale.max(t.max_abs());
        }
        Self {
            abs: sum.max_abs(),
            scale,
        }
    }

    /// `abs / scale`, or `abs` when every term vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.abs / self.scale
        } else {
            self.abs
        }
    }
}

/// Pointwise residual of `½R⁽²⁾ + ¼∇̊_A(C^AB ∇̊^D C_BD) + (1/16)Δ̊(C_DE C^DE) = 0`.
pub fn magical_identity_residual(t: &TracelessTensor, grid: &SphereGrid) -> Result<Residual> {
    let calc = Calculus::new(grid);
    let f = ShearFields::new(t, &calc)?;
    let a = r2_values(&f, &calc)?.scale(0.5);
    let b = calc
        .divergence(&f.c.contract(&[1], &f.div, &[0]))?
        .scale(0.25);
    let c = spectral_laplacian(&calc, &f.cc)?.scale(1.0 / 16.0);
    Ok(Residual::from_terms(&[&a, &b, &c]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterchangeResiduals {
    pub one: Residual,
    pub two: Residual,
    pub three: Residual,
    pub four: Residual,
    pub five: Residual,
    pub combined: Residual,
}

impl InterchangeResiduals {
    pub fn named(&self) -> [(&'static str, Residual); 6] {
        [
            ("interchange_one", self.one),
            ("interchange_two", self.two),
            ("interchange_three", self.three),
            ("interchange_four", self.four),
            ("interchange_five", self.five),
            ("interchange_combined", self.combined),
        ]
    }
}

/// Outer product `a ⊗ b` with indices `[free(a), free(b)]`.
fn outer(a: &TangentTensor, b: &TangentTensor) -> TangentTensor {
    a.contract(&[], b, &[])
}

pub fn interchange_residuals(t: &TracelessTensor, grid: &SphereGrid) -> Result<InterchangeResiduals> {
    let calc = Calculus::new(grid);
    let sigma = calc.metric();
    let eps = calc.epsilon();
    let f = calc.electric(t.electric())?;
    let fb = calc.magnetic(t.magnetic())?;
    let c = f.add(&fb);
    let df = calc.nabla(&f)?;
    let dfb = calc.nabla(&fb)?;

    // ∇_A F_BD - ∇_B F_AD = ∇^E F_BE σ_AD - ∇^E F_AE σ_BD
    let div_f = df.trace(0, 2);
    let one = Residual::new(
        &df.sub(&df.swap(0, 1)),
        &outer(&div_f, sigma)
            .permute(&[1, 0, 2])
            .sub(&outer(&div_f, sigma)),
    );

    // ∇_A F̄_BD - ∇_B F̄_AD = -½ε_AB Δ∇_D c̄ + ½ε_DA ∇_B c̄ - ½ε_DB ∇_A c̄
    let grad_cb = calc.gradient(t.magnetic())?;
    let lap_grad_cb = calc.laplacian(&grad_cb)?;
    let rhs2 = outer(eps, &lap_grad_cb)
        .scale(-0.5)
        .add(&outer(eps, &grad_cb).permute(&[1, 2, 0]).scale(0.5))
        .sub(&outer(eps, &grad_cb).permute(&[2, 1, 0]).scale(0.5));
    let two = Residual::new(&dfb.sub(&dfb.swap(0, 1)), &rhs2);

    // ∇^D∇_A C_BD + ∇^D∇_B C_AD - ΔC_AB = σ_AB ∇^D∇^E C_DE + 2C_AB
    let ddc = calc.nabla(&calc.nabla(&c)?)?;
    let x = ddc.trace(0, 3);
    let lap_c = ddc.trace(0, 1);
    let dd = ddc.trace(0, 2).trace(0, 1);
    let three = Residual::new(
        &x.add(&x.swap(0, 1)).sub(&lap_c),
        &sigma.mul_values(dd.values()).add(&c.scale(2.0)),
    );

    // ε^AB ∇_A F_BD = ½ε_DB ∇^B(Δ+2)c
    let g = calc.gradient(&t.electric().helmholtz_plus_two())?;
    let four = Residual::new(
        &eps.contract(&[0, 1], &df, &[0, 1]),
        &calc.rotate(&g).scale(0.5),
    );

    // ε^AB ∇_A F̄_BD = -½∇_D(Δ+2)c̄
    let gb = calc.gradient(&t.magnetic().helmholtz_plus_two())?;
    let five = Residual::new(&eps.contract(&[0, 1], &dfb, &[0, 1]), &gb.scale(-0.5));

    // ε^AB ∇_A C_BD = ε_DA ∇_B C^AB
    let dc = df.add(&dfb);
    let combined = Residual::new(
        &eps.contract(&[0, 1], &dc, &[0, 1]),
        &calc.rotate(&dc.trace(0, 2)),
    );

    Ok(InterchangeResiduals {
        one,
        two,
        three,
        four,
        five,
        combined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::HarmonicCoeffs;

    fn sample(l: usize, salt: usize) -> TracelessTensor {
        let mut c = HarmonicCoeffs::zeros(l);
        let mut cb = HarmonicCoeffs::zeros(l);
        for (i, v) in c.as_mut_slice().iter_mut().enumerate() {
            *v = (((i + salt) * 7919 % 23) as f64 - 11.0) / 11.0;
        }
        for (i, v) in cb.as_mut_slice().iter_mut().enumerate() {
            *v = (((i + 3 * salt) * 104729 % 19) as f64 - 9.0) / 9.0;
        }
        TracelessTensor::new(ScalarField::new(c), ScalarField::new(cb))
    }

    #[test]
    fn low_degrees_are_dropped_or_rejected() {
        let c = ScalarField::new(HarmonicCoeffs::delta(4, 1, 0, 1.0));
        let t = TracelessTensor::new(c.clone(), ScalarField::zeros(4));
        assert!(t.is_zero());
        assert!(matches!(
            TracelessTensor::new_strict(ScalarField::zeros(4), c),
            Err(Error::LowDegreeShear { field: "magnetic", l: 1, mu: 0 })
        ));
    }

    #[test]
    fn divergence_closed_form_matches_engine() {
        let l = 6;
        let g = SphereGrid::new(l);
        let calc = Calculus::new(&g);
        let t = sample(l, 1);
        let engine = calc.divergence(&t.tangent(&calc).unwrap()).unwrap();
        let closed = calc.covector(&t.divergence()).unwrap();
        assert!(engine.sub(&closed).max_abs() < 1e-10 * (1.0 + closed.max_abs()));
    }

    #[test]
    fn interchange_identities_hold() {
        let l = 6;
        let g = SphereGrid::new(l);
        let r = interchange_residuals(&sample(l, 2), &g).unwrap();
        for (name, res) in r.named() {
            assert!(res.relative() < 1e-10, "{name}: {res:?}");
        }
    }

    #[test]
    fn magical_identity_holds() {
        let l = 6;
        let g = SphereGrid::new(l);
        let r = magical_identity_residual(&sample(l, 3), &g).unwrap();
        assert!(r.relative() < 1e-10, "{r:?}");
    }

    #[test]
    fn decomposition_round_trip() {
        let l = 7;
        let g = SphereGrid::new(l);
        let calc = Calculus::new(&g);
        let t = sample(l, 4);
        let comps = calc.frame_components(&t.tangent(&calc).unwrap());
        let d = decompose_shear(&comps, &g, l, 1e-10).unwrap();
        assert!(d.tensor.electric().sub(t.electric()).max_abs_coeff() < 1e-10);
        assert!(d.tensor.magnetic().sub(t.magnetic()).max_abs_coeff() < 1e-10);
        assert!(d.residual < 1e-10);
    }
}
