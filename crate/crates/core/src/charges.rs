//! Charges at null infinity from one cut of Bondi-Sachs data.
//!
//! Rotation fields: `Y^{(k)}_A = ε̊_AB ∇̊^B X̃^k`, the rotation about the `k`-th axis
//! (`Y^{(3)} = ∂_φ`). The antisymmetric pair `Y_{i,j} = ε_{ijq} Y^{(q)}` enters each `J^k` once,
//! through the pair `(i, j)` with `ε^{ijk} = 1`, so every formula below is written with `Y^{(k)}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::bondi::{BondiData, ChargeSet};
use crate::error::{Error, Result};
use crate::sphere::{
    axis_order, default_tolerance, first_eigen_norm, invert_helmholtz_plus_two, Calculus,
    CovectorField, ScalarField, SphereGrid, TangentTensor,
};

/// Default tolerance for the center-of-mass frame test.
pub const FRAME_TOLERANCE: f64 = 1e-10;

pub fn bondi_energy(d: &BondiData) -> f64 {
    d.mass_aspect().integrate() / (4.0 * PI)
}

/// `p^i = (1/4π) ∫ m X̃^i`.
pub fn bondi_linear_momentum(d: &BondiData) -> [f64; 3] {
    let m = d.mass_aspect().coeffs();
    std::array::from_fn(|i| first_eigen_norm() * m.get(1, axis_order(i)) / (4.0 * PI))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    pub energy: f64,
    pub momentum: [f64; 3],
    pub tolerance: f64,
    pub passed: bool,
    pub reason: Option<String>,
}

impl FrameReport {
    pub fn momentum_norm(&self) -> f64 {
        self.momentum.iter().map(|p| p * p).sum::<f64>().sqrt()
    }

    pub fn require(&self) -> Result<()> {
        match &self.reason {
            None => Ok(()),
            Some(r) => Err(Error::Frame(r.clone())),
        }
    }
}

/// Passes iff `|p| <= tol·(1 + e)` and `e > tol`.
pub fn check_com_frame(d: &BondiData, tol: f64) -> FrameReport {
    let energy = bondi_energy(d);
    let momentum = bondi_linear_momentum(d);
    let pn = momentum.iter().map(|p| p * p).sum::<f64>().sqrt();
    let mut reasons = Vec::new();
    if pn > tol * (1.0 + energy.abs()) {
        let parts: Vec<String> = momentum
            .iter()
            .enumerate()
            .filter(|(_, p)| p.abs() > tol * (1.0 + energy.abs()))
            .map(|(i, p)| format!("p{} = {p:.6e}", i + 1))
            .collect();
        reasons.push(format!("nonzero linear momentum ({})", parts.join(", ")));
    }
    if energy <= tol {
        reasons.push(format!("non-positive energy e = {energy:.6e}"));
    }
    FrameReport {
        energy,
        momentum,
        tolerance: tol,
        passed: reasons.is_empty(),
        reason: if reasons.is_empty() {
            None
        } else {
            Some(reasons.join("; "))
        },
    }
}

/// Zeroth-order terms of the optimal isometric embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingLevelZero {
    /// Solution of `(Δ̊+2)M = 2m` without degree-1 part.
    pub m_potential: ScalarField,
    /// `X^{0(0)} = M - ¼(Δ̊+2)c`.
    pub x0: ScalarField,
    /// `X^{i(0)} = ½(∇̊^A c + ε̊^{AB}∇̊_B c̄)∇̊_A X̃^i - ¼ Δ̊c X̃^i`.
    pub xi: [ScalarField; 3],
    /// Largest coefficient of `Δ̊(Δ̊+2)X^{0(0)} - Δ̊(2m) + ½(Δ̊+2)∇̊^D∇̊^E C_DE`.
    pub first_order_residual: f64,
}

impl EmbeddingLevelZero {
    /// The same embedding with `M` shifted by `Σ f_i X̃^i`.
    pub fn shifted(&self, f: [f64; 3]) -> Self {
        let l = self.x0.band_limit();
        let mut shift = ScalarField::zeros(l);
        for (i, fi) in f.iter().enumerate() {
            shift = shift.add(&ScalarField::first_eigen(l, i).scale(*fi));
        }
        Self {
            m_potential: self.m_potential.add(&shift),
            x0: self.x0.add(&shift),
            xi: self.xi.clone(),
            first_order_residual: self.first_order_residual,
        }
    }
}

/// `X^{i(0)}` for all three axes, evaluated on the grid and projected.
pub fn linearized_embedding(d: &BondiData, grid: &SphereGrid) -> Result<[ScalarField; 3]> {
    let calc = Calculus::new(grid);
    let l = d.band_limit();
    let c = d.shear().electric();
    let cb = d.shear().magnetic();
    let gc = calc.gradient(c)?;
    let gcb = calc.gradient(cb)?;
    let lap_c = c.laplacian().values(grid)?;
    let mut out = Vec::with_capacity(3);
    for i in 0..3 {
        let x = ScalarField::first_eigen(l, i);
        let gx = calc.gradient(&x)?;
        let xv = x.values(grid)?;
        let a = gc.dot(&gx);
        let b = calc.epsilon().contract(&[0], &gx, &[0]).contract(&[0], &gcb, &[0]);
        let v: Vec<f64> = (0..grid.len())
            .map(|p| 0.5 * (a.values()[p] + b.values()[p]) - 0.25 * lap_c[p] * xv[p])
            .collect();
        out.push(ScalarField::from_values(grid, &v, l + 1)?);
    }
    Ok(out.try_into().expect("three components"))
}

pub fn solve_embedding(d: &BondiData, grid: &SphereGrid, frame_tol: f64) -> Result<EmbeddingLevelZero> {
    let frame = check_com_frame(d, frame_tol);
    frame.require()?;
    let two_m = d.mass_aspect().scale(2.0);
    // the frame test bounds the degree-1 content of 2m by 2√(12π)·tol·(1+e)
    let kernel_tol = default_tolerance(&two_m)
        .max(2.0 * (12.0 * PI).sqrt() * frame_tol * (1.0 + frame.energy.abs()) * (1.0 + 1e-9));
    let m_potential = invert_helmholtz_plus_two(&two_m, kernel_tol)?;
    let c = d.shear().electric();
    let x0 = m_potential.sub(&c.helmholtz_plus_two().scale(0.25));
    let xi = linearized_embedding(d, grid)?;
    let residual = x0
        .helmholtz_plus_two()
        .laplacian()
        .sub(&two_m.laplacian())
        .add(&d.shear().double_divergence().helmholtz_plus_two().scale(0.5));
    Ok(EmbeddingLevelZero {
        m_potential,
        x0,
        xi,
        first_order_residual: residual.max_abs_coeff(),
    })
}

/// Rotation about axis `k` as a covector field: curl potential `X̃^k`.
pub fn rotation_field(band_limit: usize, k: usize) -> CovectorField {
    ScalarField::first_eigen(band_limit, k).skew_gradient()
}

/// Pointwise ingredients shared by the charge integrands.
struct Sampled<'g> {
    calc: Calculus<'g>,
    m: Vec<f64>,
    c: Vec<f64>,
    grad_m: TangentTensor,
    grad_cb: TangentTensor,
    f: TangentTensor,
    fb: TangentTensor,
    div_f: TangentTensor,
    div_fb: TangentTensor,
}

impl<'g> Sampled<'g> {
    fn new(d: &BondiData, grid: &'g SphereGrid) -> Result<Self> {
        let calc = Calculus::new(grid);
        let c = d.shear().electric();
        let cb = d.shear().magnetic();
        let div = d.shear().divergence();
        let div_f = calc.gradient(div.grad_potential())?;
        let div_fb = calc.covector(&div.curl_potential().skew_gradient())?;
        Ok(Self {
            m: d.mass_aspect().values(grid)?,
            c: c.values(grid)?,
            grad_m: calc.gradient(d.mass_aspect())?,
            grad_cb: calc.gradient(cb)?,
            f: calc.electric(c)?,
            fb: calc.magnetic(cb)?,
            div_f,
            div_fb,
            calc,
        })
    }

    fn integrate(&self, v: &[f64]) -> f64 {
        self.calc.grid().integrate_values(v).expect("grid samples")
    }

    fn eigen(&self, l: usize, i: usize) -> Result<(Vec<f64>, TangentTensor)> {
        let x = ScalarField::first_eigen(l, i);
        Ok((x.values(self.calc.grid())?, self.calc.gradient(&x)?))
    }
}

/// The seven center-of-mass integrals per axis, before the `1/(8πe)` factor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComTerms {
    pub angmom_aspect: f64,
    pub shear_mass_gradient: f64,
    pub shear_mass: f64,
    pub magnetic_mass: f64,
    pub magnetic_quadratic: f64,
    pub divergence_pair: f64,
    pub electric_magnetic: f64,
}

impl ComTerms {
    pub fn total(&self) -> f64 {
        self.angmom_aspect
            + self.shear_mass_gradient
            + self.shear_mass
            + self.magnetic_mass
            + self.magnetic_quadratic
            + self.divergence_pair
            + self.electric_magnetic
    }
}

/// `∫ ∇̊^A X̃^i N_A = -∫ X̃^i ∇̊^A N_A`, read off the gradient potential.
fn com_aspect_term(d: &BondiData, i: usize) -> f64 {
    let g = d.angmom_aspect().grad_potential();
    2.0 * first_eigen_norm() * g.coeffs().get(1, axis_order(i))
}

pub fn center_of_mass_terms(d: &BondiData, grid: &SphereGrid) -> Result<[ComTerms; 3]> {
    let s = Sampled::new(d, grid)?;
    let l = d.band_limit();
    let cb2 = d.shear().magnetic().helmholtz_plus_two();
    let g_cb2 = s.calc.gradient(&cb2)?;
    let q_cb2 = g_cb2.dot(&g_cb2);
    let pair = s.div_f.dot(&s.div_fb);
    let ffb = s.f.dot(&s.fb);
    let mut out = [ComTerms::default(); 3];
    for (i, t) in out.iter_mut().enumerate() {
        let (x, gx) = s.eigen(l, i)?;
        let gx_gm = gx.dot(&s.grad_m);
        let eps_gx_gcb = s
            .calc
            .epsilon()
            .contract(&[0], &gx, &[0])
            .contract(&[0], &s.grad_cb, &[0]);
        let n = grid.len();
        let mut v = vec![0.0; n];
        let mut fill = |f: &dyn Fn(usize) -> f64| -> f64 {
            for (p, val) in v.iter_mut().enumerate() {
                *val = f(p);
            }
            s.integrate(&v)
        };
        t.angmom_aspect = com_aspect_term(d, i);
        t.shear_mass_gradient = fill(&|p| -gx_gm.values()[p] * s.c[p]);
        t.shear_mass = fill(&|p| 3.0 * x[p] * s.c[p] * s.m[p]);
        t.magnetic_mass = fill(&|p| 2.0 * eps_gx_gcb.values()[p] * s.m[p]);
        t.magnetic_quadratic = fill(&|p| -x[p] * q_cb2.values()[p] / 16.0);
        t.divergence_pair = fill(&|p| -0.5 * x[p] * pair.values()[p]);
        t.electric_magnetic = fill(&|p| -0.25 * x[p] * ffb.values()[p]);
    }
    Ok(out)
}

fn frame_energy(d: &BondiData, frame_tol: f64) -> Result<f64> {
    let frame = check_com_frame(d, frame_tol);
    frame.require()?;
    Ok(frame.energy)
}

/// Center of mass at null infinity, all seven terms.
pub fn center_of_mass(d: &BondiData, grid: &SphereGrid, frame_tol: f64) -> Result<[f64; 3]> {
    let e = frame_energy(d, frame_tol)?;
    let terms = center_of_mass_terms(d, grid)?;
    Ok(terms.map(|t| t.total() / (8.0 * PI * e)))
}

/// The closed-shear form: only the first three terms.
pub fn center_of_mass_closed_shear(d: &BondiData, grid: &SphereGrid, frame_tol: f64) -> Result<[f64; 3]> {
    let e = frame_energy(d, frame_tol)?;
    let s = Sampled::new(d, grid)?;
    let l = d.band_limit();
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let (x, gx) = s.eigen(l, i)?;
        let gx_gm = gx.dot(&s.grad_m);
        let v: Vec<f64> = (0..grid.len())
            .map(|p| -gx_gm.values()[p] * s.c[p] + 3.0 * x[p] * s.c[p] * s.m[p])
            .collect();
        *o = (com_aspect_term(d, i) + s.integrate(&v)) / (8.0 * PI * e);
    }
    Ok(out)
}

/// The closed-shear, constant-mass-aspect form: `(1/8πe) ∫ ∇̊^A X̃^i N_A`.
pub fn center_of_mass_rigid(d: &BondiData, frame_tol: f64) -> Result<[f64; 3]> {
    let e = frame_energy(d, frame_tol)?;
    Ok(std::array::from_fn(|i| com_aspect_term(d, i) / (8.0 * PI * e)))
}

/// The five angular-momentum integrals per axis, before the `1/(8π)` factor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AngmomTerms {
    pub angmom_aspect: f64,
    pub shear_mass_gradient: f64,
    pub embedding_magnetic: f64,
    pub electric_div_magnetic: f64,
    pub magnetic_div_electric: f64,
}

impl AngmomTerms {
    pub fn total(&self) -> f64 {
        self.angmom_aspect
            + self.shear_mass_gradient
            + self.embedding_magnetic
            + self.electric_div_magnetic
            + self.magnetic_div_electric
    }
}

fn angmom_aspect_term(d: &BondiData, k: usize) -> f64 {
    rotation_field(d.band_limit(), k).inner(d.angmom_aspect())
}

pub fn angular_momentum_terms(
    d: &BondiData,
    emb: &EmbeddingLevelZero,
    grid: &SphereGrid,
) -> Result<[AngmomTerms; 3]> {
    let s = Sampled::new(d, grid)?;
    let l = d.band_limit();
    let lap_x0 = emb.x0.laplacian().values(grid)?;
    let mut out = [AngmomTerms::default(); 3];
    for (k, t) in out.iter_mut().enumerate() {
        let y = s.calc.covector(&rotation_field(l, k))?;
        let (_, gx) = s.eigen(l, k)?;
        let y_gm = y.dot(&s.grad_m);
        // Y·ε∇c̄ = ∇X̃·∇c̄
        let gx_gcb = gx.dot(&s.grad_cb);
        let yf = y.contract(&[0], &s.f, &[0]);
        let yfb = y.contract(&[0], &s.fb, &[0]);
        let a = yf.dot(&s.div_fb);
        let b = yfb.dot(&s.div_f);
        let n = grid.len();
        let mut v = vec![0.0; n];
        let mut fill = |f: &dyn Fn(usize) -> f64| -> f64 {
            for (p, val) in v.iter_mut().enumerate() {
                *val = f(p);
            }
            s.integrate(&v)
        };
        t.angmom_aspect = angmom_aspect_term(d, k);
        t.shear_mass_gradient = fill(&|p| -s.c[p] * y_gm.values()[p]);
        t.embedding_magnetic = fill(&|p| 0.25 * lap_x0[p] * gx_gcb.values()[p]);
        t.electric_div_magnetic = fill(&|p| -0.25 * a.values()[p]);
        t.magnetic_div_electric = fill(&|p| -0.25 * b.values()[p]);
    }
    Ok(out)
}

/// Angular momentum for a given zeroth-order embedding.
pub fn angular_momentum_with(
    d: &BondiData,
    emb: &EmbeddingLevelZero,
    grid: &SphereGrid,
) -> Result<[f64; 3]> {
    Ok(angular_momentum_terms(d, emb, grid)?.map(|t| t.total() / (8.0 * PI)))
}

pub fn angular_momentum(d: &BondiData, grid: &SphereGrid, frame_tol: f64) -> Result<[f64; 3]> {
    let emb = solve_embedding(d, grid, frame_tol)?;
    angular_momentum_with(d, &emb, grid)
}

/// The closed-shear form: `(1/8π) ∫ [Y·N - c Y·∇̊m]`.
pub fn angular_momentum_closed_shear(d: &BondiData, grid: &SphereGrid, frame_tol: f64) -> Result<[f64; 3]> {
    frame_energy(d, frame_tol)?;
    let s = Sampled::new(d, grid)?;
    let l = d.band_limit();
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let y = s.calc.covector(&rotation_field(l, k))?;
        let y_gm = y.dot(&s.grad_m);
        let v: Vec<f64> = (0..grid.len())
            .map(|p| -s.c[p] * y_gm.values()[p])
            .collect();
        *o = (angmom_aspect_term(d, k) + s.integrate(&v)) / (8.0 * PI);
    }
    Ok(out)
}

/// The closed-shear, constant-mass-aspect form: `(1/8π) ∫ Y·N`.
pub fn angular_momentum_rigid(d: &BondiData, frame_tol: f64) -> Result<[f64; 3]> {
    frame_energy(d, frame_tol)?;
    Ok(std::array::from_fn(|k| angmom_aspect_term(d, k) / (8.0 * PI)))
}

/// Energy and momentum always; center of mass and angular momentum when the frame test passes.
pub fn charges(d: &BondiData, grid: &SphereGrid, frame_tol: f64) -> Result<ChargeSet> {
    let frame = check_com_frame(d, frame_tol);
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("frame.momentum_norm".to_string(), frame.momentum_norm());
    let mut set = ChargeSet {
        energy: frame.energy,
        linear_momentum: frame.momentum,
        center_of_mass: None,
        angular_momentum: None,
        diagnostics,
        withheld: None,
    };
    if let Some(reason) = &frame.reason {
        set.withheld = Some(format!("not in the center-of-mass frame: {reason}"));
        return Ok(set);
    }
    let emb = solve_embedding(d, grid, frame_tol)?;
    set.diagnostics
        .insert("embedding.first_order_residual".into(), emb.first_order_residual);
    set.diagnostics.insert(
        "embedding.kernel_content".into(),
        d.mass_aspect().coeffs().degree_norm(1),
    );
    let com = center_of_mass_terms(d, grid)?.map(|t| t.total() / (8.0 * PI * frame.energy));
    let j = angular_momentum_with(d, &emb, grid)?;
    let shifted = angular_momentum_with(d, &emb.shifted([1.0, 1.0, 1.0]), grid)?;
    let shift = (0..3).fold(0.0f64, |a, k| a.max((shifted[k] - j[k]).abs()));
    set.diagnostics
        .insert("angular_momentum.l1_ambiguity_shift".into(), shift);
    set.center_of_mass = Some(com);
    set.angular_momentum = Some(j);
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bondi::{kerr_data, random_data};

    #[test]
    fn kerr_charges() {
        let d = kerr_data(2.0, 0.5, 16).unwrap();
        let g = SphereGrid::new(16);
        let set = charges(&d, &g, FRAME_TOLERANCE).unwrap();
        assert!((set.energy - 2.0).abs() < 1e-12);
        let j = set.angular_momentum.unwrap();
        assert!((j[2] + 1.0).abs() < 1e-10, "{j:?}");
        assert!(j[0].abs() < 1e-10 && j[1].abs() < 1e-10);
        let c = set.center_of_mass.unwrap();
        assert!(c.iter().all(|v| v.abs() < 1e-10), "{c:?}");
    }

    #[test]
    fn frame_gate() {
        let l = 8;
        let m = ScalarField::first_eigen(l, 0).add(&ScalarField::constant(l, 2.0));
        let d = BondiData::schwarzschild(l, 1.0).with_mass_aspect(m).unwrap();
        let r = check_com_frame(&d, FRAME_TOLERANCE);
        assert!(!r.passed);
        assert!((r.momentum[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!(matches!(
            center_of_mass(&d, &SphereGrid::new(l), FRAME_TOLERANCE),
            Err(Error::Frame(_))
        ));
        let zero = BondiData::schwarzschild(l, 0.0);
        assert!(!check_com_frame(&zero, FRAME_TOLERANCE).passed);
    }

    #[test]
    fn first_order_residual_vanishes() {
        let d = random_data(5, 10, 0.3, true);
        let emb = solve_embedding(&d, &SphereGrid::new(10), FRAME_TOLERANCE).unwrap();
        assert!(emb.first_order_residual < 1e-10, "{}", emb.first_order_residual);
    }
}
