//! Dense symmetric `(m-1)×(m-1)` matrices and their LDLᵀ factorization.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::Pair;

/// A pivot at or below this fraction of the largest diagonal entry marks the
/// matrix as singular.
pub const SINGULARITY_RATIO: f64 = 1e-12;

/// Information matrix `M(ξ,β)`, stored densely in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoMatrix {
    n: usize,
    data: Vec<f64>,
}

impl InfoMatrix {
    pub fn zeros(n: usize) -> InfoMatrix {
        InfoMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> InfoMatrix {
        let mut out = InfoMatrix::zeros(n);
        for k in 0..n {
            out.data[k * n + k] = 1.0;
        }
        out
    }

    /// Builds a matrix from row-major entries; it must be symmetric.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<InfoMatrix> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let m = InfoMatrix { n, data };
        if m.asymmetry() > 1e-14 {
            return Err(Error::InvalidParameters("matrix is not symmetric"));
        }
        Ok(m)
    }

    /// Side length `m - 1`.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Largest `|M_rc − M_cr|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for c in 0..r {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// Adds `c · f(i,j) f(i,j)ᵀ`.
    pub(crate) fn add_pair(&mut self, pair: Pair, m: usize, c: f64) {
        let n = self.n;
        let a = pair.i() - 1;
        self.data[a * n + a] += c;
        if pair.j() < m {
            let b = pair.j() - 1;
            self.data[b * n + b] += c;
            self.data[a * n + b] -= c;
            self.data[b * n + a] -= c;
        }
    }

    /// `α·self + (1−α)·other`.
    pub fn mix(&self, other: &InfoMatrix, alpha: f64) -> InfoMatrix {
        InfoMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    /// LDLᵀ factorization; fails when the matrix is not positive definite.
    pub fn factorize(&self) -> Result<Ldlt> {
        Ldlt::new(self)
    }

    /// `log det M`, or `None` when the matrix is singular.
    pub fn log_det(&self) -> Option<f64> {
        self.factorize().ok().map(|f| f.log_det())
    }

    /// Solves `M x = v`.
    pub fn solve(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        Ok(self.factorize()?.solve(v))
    }

    pub fn inverse(&self) -> Result<InfoMatrix> {
        Ok(self.factorize()?.inverse())
    }
}

/// `M = L D Lᵀ` with unit lower-triangular `L` and positive diagonal `D`.
#[derive(Clone, Debug)]
pub struct Ldlt {
    n: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl Ldlt {
    fn new(m: &InfoMatrix) -> Result<Ldlt> {
        let n = m.n;
        let scale = (0..n).map(|k| m.get(k, k)).fold(0.0, f64::max);
        if n > 0 && !(scale > 0.0) {
            return Err(Error::Singular);
        }
        let floor = SINGULARITY_RATIO * scale;
        let mut l = vec![0.0; n * n];
        let mut d = vec![0.0; n];
        for j in 0..n {
            let mut dj = m.get(j, j);
            for k in 0..j {
                dj -= l[j * n + k] * l[j * n + k] * d[k];
            }
            if !(dj > floor) {
                return Err(Error::Singular);
            }
            d[j] = dj;
            l[j * n + j] = 1.0;
            for i in j + 1..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k] * d[k];
                }
                l[i * n + j] = s / dj;
            }
        }
        Ok(Ldlt { n, l, d })
    }

    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    pub fn log_det(&self) -> f64 {
        self.d.iter().map(|x| math::ln(*x)).sum()
    }

    pub fn solve(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = v.to_vec();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.l[i * n + k] * x[k];
            }
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.l[k * n + i] * x[k];
            }
        }
        x
    }

    pub fn inverse(&self) -> InfoMatrix {
        let n = self.n;
        let mut out = InfoMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for c in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[c] = 1.0;
            let col = self.solve(&e);
            for r in 0..n {
                out.data[r * n + c] = col[r];
            }
        }
        // symmetrize away round-off
        for r in 0..n {
            for c in 0..r {
                let avg = 0.5 * (out.data[r * n + c] + out.data[c * n + r]);
                out.data[r * n + c] = avg;
                out.data[c * n + r] = avg;
            }
        }
        out
    }
}

/// `f(i,j)ᵀ A f(i,j)` for a pair, read directly off the entries of `A`.
pub(crate) fn pair_quadratic_form(a: &InfoMatrix, pair: Pair, m: usize) -> f64 {
    let x = pair.i() - 1;
    if pair.j() == m {
        a.get(x, x)
    } else {
        let y = pair.j() - 1;
        a.get(x, x) + a.get(y, y) - 2.0 * a.get(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{information_matrix, pairs, regression_vector, Design, Parameters};
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Cofactor expansion, independent of the factorization.
    fn det3(m: &InfoMatrix) -> f64 {
        let g = |r, c| m.get(r, c);
        g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
    }

    fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> InfoMatrix {
        let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut data = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                let mut s = if r == c { 0.1 } else { 0.0 };
                for k in 0..n {
                    s += a[r * n + k] * a[c * n + k];
                }
                data[r * n + c] = s;
            }
        }
        for r in 0..n {
            for c in 0..r {
                data[c * n + r] = data[r * n + c];
            }
        }
        InfoMatrix::from_row_major(n, data).unwrap()
    }

    #[test]
    fn identity_has_zero_log_det() {
        assert_eq!(InfoMatrix::identity(3).log_det(), Some(0.0));
    }

    #[test]
    fn cycle_design_is_singular() {
        let p = |i, j| crate::model::Pair::new(i, j).unwrap();
        let design = Design::uniform_on(4, &[p(1, 2), p(1, 4), p(2, 4)]).unwrap();
        let info = information_matrix(&design, &Parameters::zeros(4).unwrap()).unwrap();
        assert!(info.log_det().is_none());
        assert_eq!(info.solve(&[1.0, 0.0, 0.0]), Err(Error::Singular));
    }

    #[test]
    fn uniform_log_det_matches_cofactor_expansion() {
        let params = Parameters::zeros(4).unwrap();
        let info = information_matrix(&Design::uniform(4).unwrap(), &params).unwrap();
        // direct summation of rank-one terms
        let mut direct = [[0.0; 3]; 3];
        for p in pairs(4) {
            let f = regression_vector(p, 4).unwrap();
            for r in 0..3 {
                for c in 0..3 {
                    direct[r][c] += (1.0 / 6.0) * 0.25 * (f[r] * f[c]) as f64;
                }
            }
        }
        for r in 0..3 {
            for c in 0..3 {
                assert!((info.get(r, c) - direct[r][c]).abs() < 1e-16);
            }
        }
        let ld = info.log_det().unwrap();
        assert!((ld - math::ln(det3(&info))).abs() < 1e-12);
    }

    #[test]
    fn solve_scaled_identity() {
        let mut m = InfoMatrix::identity(3);
        m.data.iter_mut().for_each(|x| *x *= 2.0);
        assert_eq!(m.solve(&[1.0, 1.0, 1.0]).unwrap(), vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn solve_random_spd_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..7 {
            for _ in 0..20 {
                let m = random_spd(&mut rng, n);
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let x = m.solve(&v).unwrap();
                let r = m.mul_vec(&x);
                let num: f64 = r.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
                let den: f64 = v.iter().map(|a| a * a).sum();
                assert!(math::sqrt(num / den) <= 1e-10);
            }
        }
    }

    #[test]
    fn path_inverse_matches_factor_form() {
        // Path 1-2-…-m at β = 0 with equal weights: M = (1/4)/(m-1) · FᵀF and
        // F⁻¹ is upper triangular ones, so M⁻¹ = 4(m-1) F⁻¹F⁻ᵀ.
        for m in 2..8usize {
            let n = m - 1;
            let edges: Vec<_> = (1..m).map(|k| crate::model::Pair::new(k, k + 1).unwrap()).collect();
            let design = Design::uniform_on(m, &edges).unwrap();
            let info = information_matrix(&design, &Parameters::zeros(m).unwrap()).unwrap();
            let f = regression_vector(crate::model::Pair::new(1, m).unwrap(), m).unwrap();
            let v: Vec<f64> = f.iter().map(|x| *x as f64).collect();
            let x = info.solve(&v).unwrap();
            for r in 0..n {
                // (F⁻¹F⁻ᵀ)_{r0} = number of k ≥ max(r,0) = n - r
                let expected = 4.0 * n as f64 * (n - r) as f64;
                assert!((x[r] - expected).abs() < 1e-9 * expected);
            }
        }
    }

    #[test]
    fn log_det_is_midpoint_concave() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = random_spd(&mut rng, 4);
            let b = random_spd(&mut rng, 4);
            let mid = a.mix(&b, 0.5).log_det().unwrap();
            let avg = 0.5 * (a.log_det().unwrap() + b.log_det().unwrap());
            assert!(mid >= avg - 1e-10);
        }
    }
}
