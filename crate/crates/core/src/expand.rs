//! Series form of the operator near an umbilic boundary and the
//! order-by-order recursion for the expansion coefficients.
//!
//! For a boundary of constant curvature `κ` (a sphere of radius `1/κ`, or a
//! hyperplane when `κ = 0`) a function `v(d)` of the distance alone gives
//! `A(v)` two distinct eigenvalues. Writing `g = κ/(1-κd)` for the mean
//! curvature term of the level sets,
//!
//! ```text
//! normal     = (n-1) v'' - (n-1) g v'
//! tangential = v'' - (2n-3) g v' + (n-2) v'²        (multiplicity n-1)
//! ```
//!
//! and `Ã = d² A` is a regular series once the poles of `v = -log d + …` are
//! cleared. `F̃(v) = σ_k(Ã) - (n-1)^k C(n,k) exp(2k(v + log d))` is then
//! expanded slot by slot and each `c_i` is chosen to kill the coefficient of
//! `d^i`.

use alloc::vec;
use alloc::vec::Vec;

use crate::geomodel::{BoundaryGeometry, ExpansionCoeffs};
use crate::phseries::PhSeries;
use crate::{binomial, rhs_constant, Error, Result};

/// Eigenvalue series of `Ã = d² A(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtildeEigens {
    pub tangential: PhSeries,
    pub normal: PhSeries,
    pub n: usize,
}

impl AtildeEigens {
    /// `σ_k` of the multiset `{tangential × (n-1), normal}`:
    /// `C(n-1,k) Tᵏ + C(n-1,k-1) T^{k-1} N`.
    pub fn sigma_k(&self, k: usize) -> Result<PhSeries> {
        let n = self.n;
        if k == 0 || k > n {
            return Err(Error::domain("k must lie in 1..=n"));
        }
        let order = self.tangential.order();
        let mut t_pow = PhSeries::constant(order, 1.0);
        for _ in 0..k - 1 {
            t_pow = t_pow.mul(&self.tangential)?;
        }
        let mixed = t_pow.mul(&self.normal)?.scale(binomial(n - 1, k - 1));
        if k == n {
            return Ok(mixed);
        }
        let pure = t_pow.mul(&self.tangential)?.scale(binomial(n - 1, k));
        pure.add(&mixed)
    }
}

fn umbilic_kappa(g: &BoundaryGeometry) -> Result<f64> {
    g.umbilic_curvature()
        .ok_or_else(|| Error::UnsupportedGeometry("the series recursion needs an umbilic boundary".into()))
}

/// Builds the eigenvalue series of `d² A(v)` for `v = -log d + …`.
pub fn assemble_atilde(v: &PhSeries, g: &BoundaryGeometry) -> Result<AtildeEigens> {
    if v.leading_log() != 1 {
        return Err(Error::domain("v must carry the -log d prefix"));
    }
    let kappa = umbilic_kappa(g)?;
    let n = g.dim();
    let nf = n as f64;
    let order = v.order();

    let dv = v.derivative();
    let d_dv = dv.times_d_pow(1)?;
    let d2_ddv = dv.derivative().times_d_pow(2)?;

    // d² g v' = d · (d v') · κ/(1 - κd)
    let curv = if kappa == 0.0 {
        PhSeries::zero(order)
    } else {
        PhSeries::geometric_inverse(1.0, &PhSeries::monomial(order, 1, 0, -kappa))?.scale(kappa)
    };
    let d2_g_dv = d_dv.mul(&curv)?.shift(1);

    let normal = d2_ddv.sub(&d2_g_dv)?.scale(nf - 1.0);
    let tangential = d2_ddv.sub(&d2_g_dv.scale(2.0 * nf - 3.0))?.add(&d_dv.mul(&d_dv)?.scale(nf - 2.0))?;
    Ok(AtildeEigens { tangential, normal, n })
}

/// `F̃(v) = d^{2k} F(v)` as a series.
pub fn ftilde(v: &PhSeries, g: &BoundaryGeometry, k: usize) -> Result<PhSeries> {
    let n = g.dim();
    let eig = assemble_atilde(v, g)?;
    let sigma = eig.sigma_k(k)?;
    // d^{2k} e^{2kv} = exp(2k (v + log d)); c₀ must vanish for exp_series
    let rhs = v.drop_prefix().scale(2.0 * k as f64).exp_series()?.scale(rhs_constant(n, k));
    sigma.sub(&rhs)
}

/// The formal solution `-log d + Σ c_j d^j + c_{n,1} dⁿ log d` at order `order`.
pub fn formal_solution(coeffs: &ExpansionCoeffs, order: usize) -> PhSeries {
    let n = coeffs.dim();
    let mut poly = vec![0.0];
    poly.extend_from_slice(&coeffs.c);
    PhSeries::formal_solution(order, &poly, n, coeffs.c_log)
}

/// Tolerance for "this slot of F̃ vanishes", scaled by the size of the
/// right-hand side.
pub fn slot_tolerance(n: usize, k: usize) -> f64 {
    1e-9 * rhs_constant(n, k)
}

/// Result of the recursion together with the diagnostics it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub coeffs: ExpansionCoeffs,
    /// Coefficient of `dⁿ log d` in `F̃(v)` before `c_{n,1}` was fixed.
    pub log_slot: f64,
    /// `F̃(v)` for the final coefficients (with `c_n = 0`).
    pub residual: PhSeries,
}

/// Solves for `c₁ … c_{n-1}, c_{n,1}` on an umbilic boundary at the default
/// truncation order `n + 1`.
pub fn solve_coefficients(g: &BoundaryGeometry, k: usize) -> Result<ExpansionCoeffs> {
    Ok(solve_with_order(g, k, g.dim() + 1)?.coeffs)
}

/// Full recursion at truncation order `n + 1 ≤ order < 2n`; at `2n` the
/// square of the log term would enter the window.
pub fn solve_with_order(g: &BoundaryGeometry, k: usize, order: usize) -> Result<Solution> {
    let n = g.dim();
    umbilic_kappa(g)?;
    if k == 0 || k > n {
        return Err(Error::domain("k must lie in 1..=n"));
    }
    if order < n + 1 || order >= 2 * n {
        return Err(Error::domain("truncation order must lie in n+1..2n"));
    }
    let tol = slot_tolerance(n, k);
    let mut coeffs = ExpansionCoeffs::new(vec![0.0; n - 1], 0.0);

    let f0 = ftilde(&formal_solution(&coeffs, order), g, k)?;
    if f0.get(0, 0).abs() > tol || f0.get(0, 1).abs() > tol {
        return Err(Error::Degenerate { order: 0, slope: f0.get(0, 0) });
    }

    for i in 1..n {
        let slot = |c: f64, coeffs: &mut ExpansionCoeffs| -> Result<f64> {
            coeffs.c[i - 1] = c;
            Ok(ftilde(&formal_solution(coeffs, order), g, k)?.get(i, 0))
        };
        let (f_at_0, f_at_1) = (slot(0.0, &mut coeffs)?, slot(1.0, &mut coeffs)?);
        let slope = f_at_1 - f_at_0;
        if slope.abs() <= tol {
            return Err(Error::Degenerate { order: i, slope });
        }
        coeffs.c[i - 1] = -f_at_0 / slope;
    }

    let before = ftilde(&formal_solution(&coeffs, order), g, k)?;
    let log_slot = before.get(n, 1);
    if log_slot.abs() > tol {
        return Err(Error::LogSlotNonzero { value: log_slot });
    }
    let f_at_0 = before.get(n, 0);
    coeffs.c_log = 1.0;
    let slope = ftilde(&formal_solution(&coeffs, order), g, k)?.get(n, 0) - f_at_0;
    if slope.abs() <= tol {
        return Err(Error::Degenerate { order: n, slope });
    }
    coeffs.c_log = -f_at_0 / slope;
    let residual = ftilde(&formal_solution(&coeffs, order), g, k)?;
    Ok(Solution { coeffs, log_slot, residual })
}

/// Coefficient of `d^i` in `F̃` as `c_i` is set to each of `values`, all
/// lower coefficients taken from `base`. Used to probe affinity.
pub fn slot_response(
    g: &BoundaryGeometry,
    k: usize,
    base: &ExpansionCoeffs,
    i: usize,
    values: &[f64],
) -> Result<Vec<f64>> {
    let n = g.dim();
    if i == 0 || i >= n {
        return Err(Error::domain("probe order must lie in 1..n"));
    }
    let mut coeffs = base.clone();
    values
        .iter()
        .map(|&c| {
            coeffs.c[i - 1] = c;
            Ok(ftilde(&formal_solution(&coeffs, n + 1), g, k)?.get(i, 0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    fn ball(n: usize, r: f64) -> BoundaryGeometry {
        BoundaryGeometry::ball(n, r).unwrap()
    }

    #[test]
    fn normal_leading_term() {
        for n in 3..7 {
            let v = PhSeries::formal_solution(n + 1, &[], n, 0.0);
            let eig = assemble_atilde(&v, &ball(n, 2.0)).unwrap();
            assert!((eig.normal.get(0, 0) - (n - 1) as f64).abs() < 1e-14);
            assert!((eig.tangential.get(0, 0) - (n - 1) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn tangential_linear_term_on_unit_ball() {
        let v = PhSeries::formal_solution(4, &[0.0, 0.5], 3, 0.0);
        let eig = assemble_atilde(&v, &ball(3, 1.0)).unwrap();
        // (n-2)κ + H - 2(n-2)c₁ = 1 + 2 - 1
        assert!((eig.tangential.get(1, 0) - 2.0).abs() < 1e-14);
        // Ã_nn = (n-1) + H d + …
        assert!((eig.normal.get(1, 0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn half_space_is_exact() {
        let n = 4;
        let g = BoundaryGeometry::flat(n).unwrap();
        let v = PhSeries::formal_solution(n + 1, &[], n, 0.0);
        let eig = assemble_atilde(&v, &g).unwrap();
        assert_eq!(eig.normal, PhSeries::constant(n + 1, 3.0));
        assert_eq!(eig.tangential, PhSeries::constant(n + 1, 3.0));
        for k in 1..=n {
            let f = ftilde(&v, &g, k).unwrap();
            assert!(f.first_nonzero_order(1e-12).is_none(), "k = {k}");
        }
    }

    #[test]
    fn bare_log_on_ball_fails_at_first_order() {
        let g = ball(3, 1.0);
        let v = PhSeries::formal_solution(4, &[], 3, 0.0);
        let f = ftilde(&v, &g, 1).unwrap();
        assert!(f.get(0, 0).abs() < 1e-13);
        assert!(f.get(1, 0).abs() > 1e-3);
    }

    #[test]
    fn unit_ball_coefficients() {
        for k in 1..=3 {
            let c = solve_coefficients(&ball(3, 1.0), k).unwrap();
            assert!((c.get(1) - 0.5).abs() < 1e-12);
            assert!((c.get(2) - 0.125).abs() < 1e-12);
            assert!(c.c_log.abs() < 1e-12);
        }
    }

    #[test]
    fn non_umbilic_is_unsupported() {
        let g = BoundaryGeometry::new(3, vec![0.0, 1.0]).unwrap();
        assert!(matches!(solve_coefficients(&g, 1), Err(Error::UnsupportedGeometry(_))));
        let v = PhSeries::formal_solution(4, &[], 3, 0.0);
        assert!(assemble_atilde(&v, &g).is_err());
    }

    #[test]
    fn needs_log_prefix() {
        let v = PhSeries::from_poly(4, &[0.0, 0.5]);
        assert!(assemble_atilde(&v, &ball(3, 1.0)).is_err());
    }
}
