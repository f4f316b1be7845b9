//! Elementary symmetric functions, Newton transformations and the Gårding
//! cones `Γ_k⁺` on small dense symmetric matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::{binomial, Error, Result};

/// Eigenvalues of an `n × n` symmetric matrix, in no particular order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("spectrum must have at least one entry"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("spectrum entries must be finite"));
        }
        Ok(Spectrum { values })
    }

    /// `n` copies of `a` followed by the remaining entries of `b`.
    pub fn two_valued(a: f64, mult_a: usize, b: f64, mult_b: usize) -> Result<Self> {
        let mut values = vec![a; mult_a];
        values.extend(core::iter::repeat_n(b, mult_b));
        Spectrum::new(values)
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// All of `σ_0 … σ_n` by the usual product expansion of `Π (1 + λ_i t)`.
    pub fn elementary_all(&self) -> Vec<f64> {
        let n = self.values.len();
        let mut e = vec![0.0; n + 1];
        e[0] = 1.0;
        for (i, &lam) in self.values.iter().enumerate() {
            for j in (1..=i + 1).rev() {
                e[j] += lam * e[j - 1];
            }
        }
        e
    }

    /// `σ_k(λ)`, with `σ_0 = 1`.
    pub fn elementary_symmetric(&self, k: usize) -> Result<f64> {
        if k > self.dim() {
            return Err(Error::domain("k exceeds the dimension of the spectrum"));
        }
        Ok(self.elementary_all()[k])
    }

    /// Membership in `Γ_k⁺`, tested as `σ_j > 0` for `j = 1 … k` with no
    /// tolerance. `k = 0` is the whole space; `k > n` is empty.
    pub fn in_gamma_cone(&self, k: usize) -> bool {
        if k > self.dim() {
            return false;
        }
        self.elementary_all()[1..=k].iter().all(|&s| s > 0.0)
    }

    /// Maclaurin's inequality `σ₁/n ≥ (σ_k / C(n,k))^{1/k}` with slack `1e-12`.
    pub fn maclaurin_holds(&self, k: usize) -> Result<bool> {
        if k == 0 || !self.in_gamma_cone(k) {
            return Err(Error::domain("Maclaurin check needs a spectrum in the cone Γ_k⁺"));
        }
        let n = self.dim();
        let e = self.elementary_all();
        let lhs = e[1] / n as f64;
        let rhs = libm::pow(e[k] / binomial(n, k), 1.0 / k as f64);
        Ok(lhs + 1e-12 >= rhs)
    }
}

/// Dense symmetric matrix, stored row-major. Symmetry is exact as stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::domain("matrix data does not match its dimension"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        for i in 0..dim {
            for j in 0..i {
                if data[i * dim + j] != data[j * dim + i] {
                    return Err(Error::domain("matrix is not symmetric"));
                }
            }
        }
        Ok(SymMatrix { dim, data })
    }

    /// Replaces `a_ij` and `a_ji` by their mean, then validates.
    pub fn symmetrized(dim: usize, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::domain("matrix data does not match its dimension"));
        }
        for i in 0..dim {
            for j in 0..i {
                let m = 0.5 * (data[i * dim + j] + data[j * dim + i]);
                data[i * dim + j] = m;
                data[j * dim + i] = m;
            }
        }
        SymMatrix::new(dim, data)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut data = vec![0.0; dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            data[i * dim + i] = d;
        }
        SymMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius inner product `Σ_ij A_ij B_ij`.
    pub fn contract(&self, other: &SymMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.contract(self))
    }

    /// Plain matrix product; the result is generally not symmetric.
    pub fn matmul(&self, other: &SymMatrix) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(l, j);
                }
            }
        }
        out
    }

    /// Eigenvalues and column eigenvectors (row-major `n × n`, column `j` is
    /// the eigenvector of value `j`).
    pub fn eigen(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let (values, vectors) = jacobi_eigen(self)?;
        let n = self.dim;
        let scale = self.frobenius_norm().max(1.0);
        for (j, &lam) in values.iter().enumerate() {
            let mut res = 0.0;
            for i in 0..n {
                let mut av = 0.0;
                for l in 0..n {
                    av += self.get(i, l) * vectors[l * n + j];
                }
                let r = av - lam * vectors[i * n + j];
                res += r * r;
            }
            if libm::sqrt(res) > 1e-12 * scale {
                return Err(Error::NonConvergence(alloc::format!(
                    "eigenpair residual {:e} above tolerance",
                    libm::sqrt(res)
                )));
            }
        }
        Ok((values, vectors))
    }

    pub fn eigenvalues(&self) -> Result<Spectrum> {
        Spectrum::new(self.eigen()?.0)
    }

    /// `σ_k` of the eigenvalues.
    pub fn sigma_k(&self, k: usize) -> Result<f64> {
        if k > self.dim {
            return Err(Error::domain("k exceeds the matrix dimension"));
        }
        self.eigenvalues()?.elementary_symmetric(k)
    }

    /// Newton transformation `T_q(A)`, by `T_0 = I`,
    /// `T_q = σ_q I - A T_{q-1}` with `σ_q = tr(A T_{q-1}) / q`.
    pub fn newton_transform(&self, q: usize) -> Result<SymMatrix> {
        if q >= self.dim {
            return Err(Error::domain("Newton transform order must be below the dimension"));
        }
        let n = self.dim;
        let mut t = SymMatrix::identity(n);
        for step in 1..=q {
            let at = self.matmul(&t);
            let sigma = (0..n).map(|i| at[i * n + i]).sum::<f64>() / step as f64;
            let mut next = at;
            for v in next.iter_mut() {
                *v = -*v;
            }
            for i in 0..n {
                next[i * n + i] += sigma;
            }
            t = SymMatrix::symmetrized(n, next)?;
        }
        Ok(t)
    }

    /// `QᵀAQ` for a row-major square `q`, symmetrized.
    pub fn conjugate(&self, q: &[f64]) -> Result<SymMatrix> {
        let n = self.dim;
        if q.len() != n * n {
            return Err(Error::domain("conjugating matrix has the wrong size"));
        }
        let mut aq = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                aq[i * n + j] = (0..n).map(|l| self.get(i, l) * q[l * n + j]).sum();
            }
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|l| q[l * n + i] * aq[l * n + j]).sum();
            }
        }
        SymMatrix::symmetrized(n, out)
    }
}

/// Cyclic Jacobi rotations; more than accurate enough for `n ≤ 10`.
fn jacobi_eigen(m: &SymMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = m.dim;
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if libm::sqrt(off) <= 1e-15 * scale {
            return Ok(((0..n).map(|i| a[i * n + i]).collect(), v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-18 * scale {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                // exact zero by construction; rounding would leave ~eps·scale
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::NonConvergence("Jacobi sweeps exhausted".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sigma_small_cases() {
        assert_eq!(spec(&[1.0, 2.0, 3.0]).elementary_symmetric(2).unwrap(), 11.0);
        assert_eq!(spec(&[1.0, 2.0, 3.0]).elementary_symmetric(0).unwrap(), 1.0);
        for n in 1..8 {
            let ones = spec(&vec![1.0; n]);
            for k in 0..=n {
                assert_eq!(ones.elementary_symmetric(k).unwrap(), binomial(n, k));
            }
        }
        assert!(spec(&[1.0, 2.0]).elementary_symmetric(3).is_err());
    }

    #[test]
    fn diagonal_matrix_sigma() {
        let a = SymMatrix::diagonal(&[1.0, 2.0, 3.0]);
        assert!((a.sigma_k(2).unwrap() - 11.0).abs() < 1e-12);
        let id = SymMatrix::identity(5);
        assert!((id.sigma_k(3).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn newton_transform_diagonal() {
        let a = SymMatrix::diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(a.newton_transform(0).unwrap(), SymMatrix::identity(3));
        let t1 = a.newton_transform(1).unwrap();
        assert_eq!(t1, SymMatrix::diagonal(&[5.0, 4.0, 3.0]));
        assert!(a.newton_transform(3).is_err());
    }

    #[test]
    fn cone_examples() {
        assert!(spec(&[0.5, 2.0, 1.0]).in_gamma_cone(3));
        assert!(spec(&[1.0, 1.0, -0.1]).in_gamma_cone(2));
        assert!(!spec(&[1.0, 1.0, -0.1]).in_gamma_cone(3));
        assert!(!spec(&[-1.0, -1.0, -1.0]).in_gamma_cone(1));
        // boundary of the cone is excluded
        assert!(!spec(&[1.0, -1.0]).in_gamma_cone(1));
    }

    #[test]
    fn maclaurin_examples() {
        assert!(spec(&[1.0; 4]).maclaurin_holds(3).unwrap());
        assert!(spec(&[1.0, 2.0, 3.0]).maclaurin_holds(2).unwrap());
        assert!(spec(&[-1.0, -1.0, -1.0]).maclaurin_holds(1).is_err());
    }

    #[test]
    fn rejects_asymmetric_and_nonfinite() {
        assert!(SymMatrix::new(2, vec![1.0, 2.0, 2.0000001, 1.0]).is_err());
        assert!(SymMatrix::new(2, vec![1.0, f64::NAN, f64::NAN, 1.0]).is_err());
        assert!(Spectrum::new(vec![]).is_err());
        assert!(Spectrum::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn eigen_of_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let a = SymMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let mut ev = a.eigenvalues().unwrap().values().to_vec();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }
}
