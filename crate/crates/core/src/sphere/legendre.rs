//! Gauss-Legendre nodes and normalized associated Legendre tables.

use std::f64::consts::PI;

/// Gauss-Legendre nodes `x_j` and weights `w_j` on `[-1, 1]`, sorted by decreasing `x`
/// (increasing colatitude).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_p(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_p(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = x;
        ws[i] = w;
        xs[n - 1 - i] = -x;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }
    (xs, ws)
}

/// Unnormalized `P_n(x)` and its derivative.
fn legendre_p(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Values `P̄_l^m(cos θ)` and `d/dθ P̄_l^m(cos θ)` for `0 <= m <= l <= lmax` at a set of nodes.
///
/// Normalization: `2π ∫ P̄_l^m(x)² dx = 1`, no Condon-Shortley phase.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    lmax: usize,
    n_nodes: usize,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

#[inline]
fn tri(lmax: usize, m: usize, l: usize) -> usize {
    // block for order m starts after all (m', l) with m' < m
    let before = m * (lmax + 1) - m * (m.saturating_sub(1)) / 2;
    before + (l - m)
}

impl LegendreTable {
    pub fn new(lmax: usize, cos_theta: &[f64]) -> Self {
        let n_nodes = cos_theta.len();
        let count = (lmax + 1) * (lmax + 2) / 2;
        let mut values = vec![0.0; count * n_nodes];
        let mut derivs = vec![0.0; count * n_nodes];
        let mut col = vec![vec![0.0; lmax + 2]; lmax + 2];
        for (j, &x) in cos_theta.iter().enumerate() {
            let s = (1.0 - x * x).max(0.0).sqrt();
            // col[m][l]; one extra order so the derivative recurrence can look up m+1
            for row in col.iter_mut() {
                row.iter_mut().for_each(|v| *v = 0.0);
            }
            let mut pmm = 1.0 / (4.0 * PI).sqrt();
            for m in 0..=lmax + 1 {
                if m > 0 {
                    let mf = m as f64;
                    pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
                }
                if m > lmax {
                    break;
                }
                col[m][m] = pmm;
                if m < lmax {
                    col[m][m + 1] = (2.0 * m as f64 + 3.0).sqrt() * x * pmm;
                }
                for l in m + 2..=lmax {
                    let lf = l as f64;
                    let mf = m as f64;
                    let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                    let b = (((lf - 1.0) * (lf - 1.0) - mf * mf)
                        / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                        .sqrt();
                    col[m][l] = a * (x * col[m][l - 1] - b * col[m][l - 2]);
                }
            }
            #[allow(clippy::needless_range_loop)]
            for m in 0..=lmax {
                for l in m..=lmax {
                    let lf = l as f64;
                    let mf = m as f64;
                    let d = if m == 0 {
                        if l == 0 {
                            0.0
                        } else {
                            -(lf * (lf + 1.0)).sqrt() * col[1][l]
                        }
                    } else {
                        let lower = ((lf + mf) * (lf - mf + 1.0)).sqrt() * col[m - 1][l];
                        let upper = if m < l {
                            ((lf + mf + 1.0) * (lf - mf)).sqrt() * col[m + 1][l]
                        } else {
                            0.0
                        };
                        0.5 * (lower - upper)
                    };
                    let k = tri(lmax, m, l) * n_nodes + j;
                    values[k] = col[m][l];
                    derivs[k] = d;
                }
            }
        }
        Self {
            lmax,
            n_nodes,
            values,
            derivs,
        }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// `P̄_l^m` at every node.
    #[inline]
    pub fn values(&self, m: usize, l: usize) -> &[f64] {
        let k = tri(self.lmax, m, l) * self.n_nodes;
        &self.values[k..k + self.n_nodes]
    }

    /// `d/dθ P̄_l^m` at every node.
    #[inline]
    pub fn derivs(&self, m: usize, l: usize) -> &[f64] {
        let k = tri(self.lmax, m, l) * self.n_nodes;
        &self.derivs[k..k + self.n_nodes]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 41] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n} sum={s}");
            assert!(x.windows(2).all(|p| p[0] > p[1]));
        }
    }

    #[test]
    fn quadrature_exact_for_polynomials() {
        let (x, w) = gauss_legendre(6);
        // ∫ x^10 dx = 2/11, degree 10 < 2·6
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_on_quadrature() {
        let lmax = 12;
        let (x, w) = gauss_legendre(lmax + 2);
        let t = LegendreTable::new(lmax, &x);
        for m in 0..=lmax {
            for l1 in m..=lmax {
                for l2 in m..=lmax {
                    let s: f64 = t
                        .values(m, l1)
                        .iter()
                        .zip(t.values(m, l2))
                        .zip(&w)
                        .map(|((a, b), w)| 2.0 * PI * a * b * w)
                        .sum();
                    let expect = if l1 == l2 { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12, "m={m} l1={l1} l2={l2} s={s}");
                }
            }
        }
    }

    #[test]
    fn theta_derivative_matches_finite_difference() {
        let lmax = 9;
        let theta: f64 = 0.7;
        let h = 1e-5;
        let xs = [theta.cos(), (theta + h).cos(), (theta - h).cos()];
        let t = LegendreTable::new(lmax, &xs);
        for m in 0..=lmax {
            for l in m..=lmax {
                let fd = (t.values(m, l)[1] - t.values(m, l)[2]) / (2.0 * h);
                let d = t.derivs(m, l)[0];
                assert!((fd - d).abs() < 1e-8, "l={l} m={m} fd={fd} d={d}");
            }
        }
    }
}
