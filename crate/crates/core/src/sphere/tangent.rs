//! Pointwise tensor calculus on the unit sphere.
//!
//! Tangent tensors are held by their ambient Cartesian components on the grid, so a rank-`k`
//! tensor carries `3^k` sample arrays. Tangential derivatives of a component are taken
//! spectrally; the covariant derivative adds the shape-operator correction
//! `∇_a T_{b…} = ∂̄_a T_{b…} + Σ_i n_{b_i} T_{…a…}`, with the derivative index first.
//!
//! Components of band-limited potentials stay band-limited (each derivative raises the degree
//! by one), so all identities below hold to rounding on a grid built for the potentials.

use super::field::{CovectorField, ScalarField};
use super::grid::SphereGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TangentTensor {
    rank: usize,
    npts: usize,
    data: Vec<f64>,
}

fn pow3(k: usize) -> usize {
    3usize.pow(k as u32)
}

fn decode(mut c: usize, rank: usize, out: &mut [usize]) {
    for r in (0..rank).rev() {
        out[r] = c % 3;
        c /= 3;
    }
}

fn encode(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, i| acc * 3 + i)
}

impl TangentTensor {
    pub fn zeros(rank: usize, npts: usize) -> Self {
        Self {
            rank,
            npts,
            data: vec![0.0; pow3(rank) * npts],
        }
    }

    pub fn scalar(values: Vec<f64>) -> Self {
        Self {
            rank: 0,
            npts: values.len(),
            data: values,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn npts(&self) -> usize {
        self.npts
    }

    /// Samples of the component with Cartesian indices `idx`.
    pub fn comp(&self, idx: &[usize]) -> &[f64] {
        debug_assert_eq!(idx.len(), self.rank);
        let c = encode(idx);
        &self.data[c * self.npts..(c + 1) * self.npts]
    }

    pub fn comp_mut(&mut self, idx: &[usize]) -> &mut [f64] {
        let c = encode(idx);
        &mut self.data[c * self.npts..(c + 1) * self.npts]
    }

    fn comp_flat(&self, c: usize) -> &[f64] {
        &self.data[c * self.npts..(c + 1) * self.npts]
    }

    /// Values of a rank-0 tensor.
    pub fn values(&self) -> &[f64] {
        assert_eq!(self.rank, 0, "values() on a rank-{} tensor", self.rank);
        &self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        assert_eq!(self.rank, 0);
        self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.rank, other.rank);
        assert_eq!(self.npts, other.npts);
        Self {
            rank: self.rank,
            npts: self.npts,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rank: self.rank,
            npts: self.npts,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// Pointwise multiplication by a scalar field given as samples.
    pub fn mul_values(&self, f: &[f64]) -> Self {
        assert_eq!(f.len(), self.npts);
        let mut out = self.clone();
        for chunk in out.data.chunks_exact_mut(self.npts) {
            for (v, s) in chunk.iter_mut().zip(f) {
                *v *= s;
            }
        }
        out
    }

    /// Largest absolute component over the grid.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sum over index pairs: `out_{free(a), free(b)} = a_{…i…} b_{…i…}`.
    pub fn contract(&self, ia: &[usize], other: &Self, ib: &[usize]) -> Self {
        assert_eq!(ia.len(), ib.len());
        assert_eq!(self.npts, other.npts);
        let p = ia.len();
        let free_a: Vec<usize> = (0..self.rank).filter(|r| !ia.contains(r)).collect();
        let free_b: Vec<usize> = (0..other.rank).filter(|r| !ib.contains(r)).collect();
        let rank = free_a.len() + free_b.len();
        let mut out = Self::zeros(rank, self.npts);
        let mut oi = vec![0; rank];
        let mut si = vec![0; p];
        let mut ai = vec![0; self.rank];
        let mut bi = vec![0; other.rank];
        for oc in 0..pow3(rank) {
            decode(oc, rank, &mut oi);
            for (k, r) in free_a.iter().enumerate() {
                ai[*r] = oi[k];
            }
            for (k, r) in free_b.iter().enumerate() {
                bi[*r] = oi[free_a.len() + k];
            }
            let dst = &mut out.data[oc * self.npts..(oc + 1) * self.npts];
            for sc in 0..pow3(p) {
                decode(sc, p, &mut si);
                for k in 0..p {
                    ai[ia[k]] = si[k];
                    bi[ib[k]] = si[k];
                }
                let x = self.comp(&ai);
                let y = other.comp(&bi);
                for ((d, x), y) in dst.iter_mut().zip(x).zip(y) {
                    *d += x * y;
                }
            }
        }
        out
    }

    /// Full contraction of two tensors of equal rank, index by index.
    pub fn dot(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank);
        let idx: Vec<usize> = (0..self.rank).collect();
        self.contract(&idx, other, &idx)
    }

    /// Trace over indices `i` and `j`.
    pub fn trace(&self, i: usize, j: usize) -> Self {
        assert!(i != j && i < self.rank && j < self.rank);
        let rank = self.rank - 2;
        let free: Vec<usize> = (0..self.rank).filter(|r| *r != i && *r != j).collect();
        let mut out = Self::zeros(rank, self.npts);
        let mut oi = vec![0; rank];
        let mut ti = vec![0; self.rank];
        for oc in 0..pow3(rank) {
            decode(oc, rank, &mut oi);
            for (k, r) in free.iter().enumerate() {
                ti[*r] = oi[k];
            }
            let dst = &mut out.data[oc * self.npts..(oc + 1) * self.npts];
            for s in 0..3 {
                ti[i] = s;
                ti[j] = s;
                for (d, x) in dst.iter_mut().zip(self.comp(&ti)) {
                    *d += x;
                }
            }
        }
        out
    }

    /// Reorder indices: output index `r` is input index `perm[r]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank);
        let mut out = Self::zeros(self.rank, self.npts);
        let mut oi = vec![0; self.rank];
        let mut ti = vec![0; self.rank];
        for oc in 0..pow3(self.rank) {
            decode(oc, self.rank, &mut oi);
            for r in 0..self.rank {
                ti[perm[r]] = oi[r];
            }
            let src = encode(&ti);
            out.data[oc * self.npts..(oc + 1) * self.npts].copy_from_slice(self.comp_flat(src));
        }
        out
    }

    /// Exchange indices `i` and `j`.
    pub fn swap(&self, i: usize, j: usize) -> Self {
        let mut perm: Vec<usize> = (0..self.rank).collect();
        perm.swap(i, j);
        self.permute(&perm)
    }

    /// `½ (T_ab + T_ba)` of a rank-2 tensor.
    pub fn symmetrized(&self) -> Self {
        assert_eq!(self.rank, 2);
        self.add(&self.swap(0, 1)).scale(0.5)
    }
}

/// The frame and derivative machinery tied to a grid.
#[derive(Debug, Clone)]
pub struct Calculus<'g> {
    grid: &'g SphereGrid,
    work: usize,
    normal: TangentTensor,
    e_theta: TangentTensor,
    e_phi: TangentTensor,
    metric: TangentTensor,
    epsilon: TangentTensor,
}

impl<'g> Calculus<'g> {
    pub fn new(grid: &'g SphereGrid) -> Self {
        let npts = grid.len();
        let mut normal = TangentTensor::zeros(1, npts);
        let mut e_theta = TangentTensor::zeros(1, npts);
        let mut e_phi = TangentTensor::zeros(1, npts);
        for i in 0..npts {
            let (t, p) = grid.point(i);
            let (st, ct) = t.sin_cos();
            let (sp, cp) = p.sin_cos();
            let n = [st * cp, st * sp, ct];
            let et = [ct * cp, ct * sp, -st];
            let ep = [-sp, cp, 0.0];
            for a in 0..3 {
                normal.comp_mut(&[a])[i] = n[a];
                e_theta.comp_mut(&[a])[i] = et[a];
                e_phi.comp_mut(&[a])[i] = ep[a];
            }
        }
        let mut metric = TangentTensor::zeros(2, npts);
        for a in 0..3 {
            for b in 0..3 {
                let na = normal.comp(&[a]).to_vec();
                let nb = normal.comp(&[b]).to_vec();
                let d = if a == b { 1.0 } else { 0.0 };
                for (i, v) in metric.comp_mut(&[a, b]).iter_mut().enumerate() {
                    *v = d - na[i] * nb[i];
                }
            }
        }
        // ε_ab = ε_abc n^c, so that ε(e_θ, e_φ) = +1
        let mut epsilon = TangentTensor::zeros(2, npts);
        for (a, b, c, s) in [
            (0, 1, 2, 1.0),
            (1, 2, 0, 1.0),
            (2, 0, 1, 1.0),
            (1, 0, 2, -1.0),
            (2, 1, 0, -1.0),
            (0, 2, 1, -1.0),
        ] {
            let nc = normal.comp(&[c]).to_vec();
            for (v, n) in epsilon.comp_mut(&[a, b]).iter_mut().zip(&nc) {
                *v = s * n;
            }
        }
        Self {
            grid,
            work: grid.resolved_limit(),
            normal,
            e_theta,
            e_phi,
            metric,
            epsilon,
        }
    }

    pub fn grid(&self) -> &'g SphereGrid {
        self.grid
    }

    /// Band limit used for re-projection of pointwise results.
    pub fn work_limit(&self) -> usize {
        self.work
    }

    pub fn normal(&self) -> &TangentTensor {
        &self.normal
    }

    pub fn e_theta(&self) -> &TangentTensor {
        &self.e_theta
    }

    pub fn e_phi(&self) -> &TangentTensor {
        &self.e_phi
    }

    /// Induced metric `σ̊_ab = δ_ab - n_a n_b`.
    pub fn metric(&self) -> &TangentTensor {
        &self.metric
    }

    /// Area form.
    pub fn epsilon(&self) -> &TangentTensor {
        &self.epsilon
    }

    pub fn scalar(&self, f: &ScalarField) -> Result<TangentTensor> {
        Ok(TangentTensor::scalar(f.values(self.grid)?))
    }

    /// Project samples of a scalar to the working band limit.
    pub fn project(&self, values: &[f64]) -> Result<ScalarField> {
        ScalarField::from_values(self.grid, values, self.work)
    }

    pub fn project_tensor(&self, t: &TangentTensor) -> Result<ScalarField> {
        self.project(t.values())
    }

    fn frame_to_cartesian(&self, ft: &[f64], fp: &[f64]) -> TangentTensor {
        let n = self.grid.len();
        let mut out = TangentTensor::zeros(1, n);
        for a in 0..3 {
            let et = self.e_theta.comp(&[a]);
            let ep = self.e_phi.comp(&[a]);
            for (i, v) in out.comp_mut(&[a]).iter_mut().enumerate() {
                *v = et[i] * ft[i] + ep[i] * fp[i];
            }
        }
        out
    }

    /// Tangential gradient of sampled values.
    pub fn gradient_values(&self, values: &[f64]) -> Result<TangentTensor> {
        let c = self.grid.analyze_to(values, self.work)?;
        let (ft, fp) = self.grid.synthesize_gradient(&c)?;
        Ok(self.frame_to_cartesian(&ft, &fp))
    }

    pub fn gradient(&self, f: &ScalarField) -> Result<TangentTensor> {
        self.check_band(f)?;
        let (ft, fp) = self.grid.synthesize_gradient(f.coeffs())?;
        Ok(self.frame_to_cartesian(&ft, &fp))
    }

    fn check_band(&self, f: &ScalarField) -> Result<()> {
        if f.band_limit() > self.work {
            return Err(Error::BandLimitExceeded {
                requested: f.band_limit(),
                resolved: self.work,
            });
        }
        Ok(())
    }

    pub fn covector(&self, v: &CovectorField) -> Result<TangentTensor> {
        let (vt, vp) = v.frame_components(self.grid)?;
        Ok(self.frame_to_cartesian(&vt, &vp))
    }

    /// Covariant derivative; the new index comes first.
    pub fn nabla(&self, t: &TangentTensor) -> Result<TangentTensor> {
        let k = t.rank();
        let n = t.npts();
        let mut out = TangentTensor::zeros(k + 1, n);
        let mut bi = vec![0; k];
        let mut full = vec![0; k + 1];
        for bc in 0..pow3(k) {
            decode(bc, k, &mut bi);
            let g = self.gradient_values(t.comp_flat(bc))?;
            for a in 0..3 {
                full[0] = a;
                full[1..].copy_from_slice(&bi);
                out.comp_mut(&full).copy_from_slice(g.comp(&[a]));
            }
        }
        if k > 0 {
            let mut corr = vec![0.0; n];
            for a in 0..3 {
                for bc in 0..pow3(k) {
                    decode(bc, k, &mut bi);
                    corr.iter_mut().for_each(|v| *v = 0.0);
                    for slot in 0..k {
                        let nb = self.normal.comp(&[bi[slot]]);
                        let mut swapped = bi.clone();
                        swapped[slot] = a;
                        let ts = t.comp(&swapped);
                        for i in 0..n {
                            corr[i] += nb[i] * ts[i];
                        }
                    }
                    full[0] = a;
                    full[1..].copy_from_slice(&bi);
                    for (v, c) in out.comp_mut(&full).iter_mut().zip(&corr) {
                        *v += c;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `∇^a T_{a…}`.
    pub fn divergence(&self, t: &TangentTensor) -> Result<TangentTensor> {
        Ok(self.nabla(t)?.trace(0, 1))
    }

    /// Rough Laplacian `∇^a ∇_a T`.
    pub fn laplacian(&self, t: &TangentTensor) -> Result<TangentTensor> {
        let d = self.nabla(t)?;
        Ok(self.nabla(&d)?.trace(0, 1))
    }

    /// `∇_a ∇_b f`.
    pub fn hessian(&self, f: &ScalarField) -> Result<TangentTensor> {
        self.nabla(&self.gradient(f)?)
    }

    /// `F_ab[c] = ∇_a∇_b c - ½ σ̊_ab Δ̊ c`.
    pub fn electric(&self, c: &ScalarField) -> Result<TangentTensor> {
        let h = self.hessian(c)?;
        let lap = c.laplacian().values(self.grid)?;
        Ok(h.sub(&self.metric.mul_values(&lap).scale(0.5)))
    }

    /// `F̄_ab[c̄] = ½(ε_ad ∇^d∇_b c̄ + ε_bd ∇^d∇_a c̄)`.
    pub fn magnetic(&self, cbar: &ScalarField) -> Result<TangentTensor> {
        let h = self.hessian(cbar)?;
        let t = self.epsilon.contract(&[1], &h, &[0]);
        Ok(t.symmetrized())
    }

    /// `ε_a^d V_d` for a rank-1 tensor.
    pub fn rotate(&self, v: &TangentTensor) -> TangentTensor {
        self.epsilon.contract(&[1], v, &[0])
    }

    /// Orthonormal-frame components `(T_θ̂θ̂, T_θ̂φ̂, T_φ̂θ̂, T_φ̂φ̂)` of a rank-2 tensor.
    pub fn frame_components(&self, t: &TangentTensor) -> [Vec<f64>; 4] {
        let tt = t.contract(&[0], &self.e_theta, &[0]);
        let tp = t.contract(&[0], &self.e_phi, &[0]);
        let f = |x: &TangentTensor, e: &TangentTensor| x.contract(&[0], e, &[0]).into_values();
        [
            f(&tt, &self.e_theta),
            f(&tt, &self.e_phi),
            f(&tp, &self.e_theta),
            f(&tp, &self.e_phi),
        ]
    }

    /// Rank-2 tensor from orthonormal-frame components.
    pub fn from_frame_components(&self, tt: &[f64], tp: &[f64], pt: &[f64], pp: &[f64]) -> TangentTensor {
        let n = self.grid.len();
        let mut out = TangentTensor::zeros(2, n);
        for a in 0..3 {
            let ea = (self.e_theta.comp(&[a]), self.e_phi.comp(&[a]));
            for b in 0..3 {
                let eb = (self.e_theta.comp(&[b]), self.e_phi.comp(&[b]));
                for (i, v) in out.comp_mut(&[a, b]).iter_mut().enumerate() {
                    *v = ea.0[i] * eb.0[i] * tt[i]
                        + ea.0[i] * eb.1[i] * tp[i]
                        + ea.1[i] * eb.0[i] * pt[i]
                        + ea.1[i] * eb.1[i] * pp[i];
                }
            }
        }
        out
    }

    /// `∫ f` of sampled values.
    pub fn integrate(&self, t: &TangentTensor) -> f64 {
        self.grid
            .integrate_values(t.values())
            .expect("tensor sampled on this grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::HarmonicCoeffs;

    #[test]
    fn frame_is_orthonormal_and_oriented() {
        let g = SphereGrid::new(2);
        let calc = Calculus::new(&g);
        let eps_tp = calc
            .epsilon()
            .contract(&[0], calc.e_theta(), &[0])
            .contract(&[0], calc.e_phi(), &[0]);
        for v in eps_tp.values() {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let tr = calc.metric().trace(0, 1);
        for v in tr.values() {
            assert!((v - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn laplacian_of_scalar_matches_spectral() {
        let l = 6;
        let g = SphereGrid::new(l);
        let calc = Calculus::new(&g);
        let mut c = HarmonicCoeffs::zeros(l);
        for (i, v) in c.as_mut_slice().iter_mut().enumerate() {
            *v = ((i * 7919 % 13) as f64 - 6.0) / 7.0;
        }
        let f = ScalarField::new(c);
        let lap = calc.divergence(&calc.gradient(&f).unwrap()).unwrap();
        let expect = f.laplacian().values(&g).unwrap();
        for (a, b) in lap.values().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn hessian_is_symmetric_and_tangent() {
        let g = SphereGrid::new(5);
        let calc = Calculus::new(&g);
        let f = ScalarField::new(HarmonicCoeffs::delta(5, 4, -3, 1.0));
        let h = calc.hessian(&f).unwrap();
        assert!(h.sub(&h.swap(0, 1)).max_abs() < 1e-12);
        assert!(h.contract(&[1], calc.normal(), &[0]).max_abs() < 1e-12);
    }

    #[test]
    fn electric_and_magnetic_are_traceless() {
        let g = SphereGrid::new(5);
        let calc = Calculus::new(&g);
        let f = ScalarField::new(HarmonicCoeffs::delta(5, 3, 2, 1.0));
        for t in [calc.electric(&f).unwrap(), calc.magnetic(&f).unwrap()] {
            assert!(t.trace(0, 1).max_abs() < 1e-12);
            assert!(t.sub(&t.swap(0, 1)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn permute_and_contract_agree() {
        let g = SphereGrid::new(1);
        let calc = Calculus::new(&g);
        let e = calc.epsilon();
        // ε_ab = -ε_ba
        assert!(e.add(&e.swap(0, 1)).max_abs() < 1e-15);
        // ε_a^c ε_cb = -σ̊_ab
        let ee = e.contract(&[1], e, &[0]);
        assert!(ee.add(calc.metric()).max_abs() < 1e-14);
    }
}
