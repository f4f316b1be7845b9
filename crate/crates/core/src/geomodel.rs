//! Pointwise boundary geometry and the closed-form coefficients `c₁`, `c₂`.
//!
//! Principal curvatures are taken with respect to the interior unit normal,
//! so the unit sphere bounding the unit ball has `κ_a = 1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGeometry {
    n: usize,
    kappas: Vec<f64>,
}

/// Curvature invariants `H = Σκ_a`, `|Π|² = Σκ_a²` and the trace-free part
/// `|Π̊|² = |Π|² - H²/(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub mean: f64,
    pub pi_sq: f64,
    pub pi0_sq: f64,
}

impl BoundaryGeometry {
    pub fn new(n: usize, kappas: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain("dimension must be at least 3"));
        }
        if kappas.len() != n - 1 {
            return Err(Error::domain(alloc::format!("expected {} principal curvatures, got {}", n - 1, kappas.len())));
        }
        if kappas.iter().any(|k| !k.is_finite()) {
            return Err(Error::domain("principal curvatures must be finite"));
        }
        Ok(BoundaryGeometry { n, kappas })
    }

    /// Round sphere of radius `R` bounding a ball: `κ_a = 1/R`.
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain("ball radius must be positive and finite"));
        }
        Self::umbilic(n, 1.0 / radius)
    }

    /// All principal curvatures equal to `kappa`; `kappa = 0` is a half-space.
    pub fn umbilic(n: usize, kappa: f64) -> Result<Self> {
        Self::new(n, vec![kappa; n.saturating_sub(1)])
    }

    pub fn flat(n: usize) -> Result<Self> {
        Self::umbilic(n, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    /// Common curvature when every `κ_a` agrees to `1e-12` (relative).
    pub fn umbilic_curvature(&self) -> Option<f64> {
        let k0 = self.kappas[0];
        let tol = 1e-12 * k0.abs().max(1.0);
        self.kappas.iter().all(|k| (k - k0).abs() <= tol).then_some(k0)
    }

    pub fn invariants(&self) -> Invariants {
        let mean: f64 = self.kappas.iter().sum();
        let pi_sq: f64 = self.kappas.iter().map(|k| k * k).sum();
        let m = mean / (self.n - 1) as f64;
        // summing the squared deviations keeps |Π̊|² ≥ 0 exactly
        let pi0_sq = self.kappas.iter().map(|k| (k - m) * (k - m)).sum();
        Invariants { mean, pi_sq, pi0_sq }
    }

    /// `c₁ = H / (2(n-1))`.
    pub fn c1_closed_form(&self) -> f64 {
        self.invariants().mean / (2.0 * (self.n - 1) as f64)
    }

    /// The `k`-independent part of `c₂` plus `k` times the slope
    /// [`Self::c2_k_slope`].
    pub fn c2_closed_form(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.n {
            return Err(Error::domain("k must lie in 1..=n"));
        }
        Ok(self.c2_base() + k as f64 * self.c2_k_slope())
    }

    fn c2_base(&self) -> f64 {
        let n = self.n as f64;
        let inv = self.invariants();
        let h_coef = (2.0 - 3.0 * n) / (4.0 * n * (n - 1.0) * (n - 1.0))
            - (n * n * n - 3.0 * n - n * n + 4.0) / (2.0 * n * libm::pow(n - 1.0, 4.0));
        let pi_coef = 2.0 / n + (n - 2.0) * (n - 2.0) / (2.0 * n * libm::pow(n - 1.0, 3.0));
        n / (6.0 * (n - 2.0)) * (h_coef * inv.mean * inv.mean + pi_coef * inv.pi_sq)
    }

    /// `∂c₂/∂k = -(n-2) |Π̊|² / (12 (n-1)³)`.
    pub fn c2_k_slope(&self) -> f64 {
        let n = self.n as f64;
        -(n - 2.0) / (12.0 * libm::pow(n - 1.0, 3.0)) * self.invariants().pi0_sq
    }
}

/// `c₁ … c_{n-1}` and the log coefficient `c_{n,1}` of
/// `u + log d = c₁d + ⋯ + c_{n-1}d^{n-1} + c_{n,1} dⁿ log d + O(dⁿ)`.
/// The constant term `c₀` is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoeffs {
    /// `c[0]` is `c₁`.
    pub c: Vec<f64>,
    pub c_log: f64,
}

impl ExpansionCoeffs {
    pub fn new(c: Vec<f64>, c_log: f64) -> Self {
        ExpansionCoeffs { c, c_log }
    }

    /// Ambient dimension implied by the number of regular coefficients.
    pub fn dim(&self) -> usize {
        self.c.len() + 1
    }

    /// `c_j` for `j ≥ 1`; `c₀ = 0`.
    pub fn get(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.c.get(j - 1).copied().unwrap_or(0.0)
        }
    }

    /// Evaluates `Σ c_j d^j + c_{n,1} dⁿ log d`.
    pub fn eval(&self, d: f64) -> f64 {
        let mut acc = 0.0;
        let mut p = d;
        for &c in &self.c {
            acc += c * p;
            p *= d;
        }
        acc + self.c_log * p * libm::log(d)
    }
}
