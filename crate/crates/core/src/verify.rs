//! Checks of the boundary expansion against sampled solutions: least-squares
//! fitting over dyadic bands, remainder orders, conformal invariance of
//! coefficient differences, and first/second derivative decay.

use alloc::vec::Vec;

use crate::geomodel::ExpansionCoeffs;
use crate::linalg::{slope, weighted_lstsq};
use crate::phseries::PhSeries;
use crate::radial::HyperbolicBall;
use crate::{Error, Result};

/// Regular orders `dⁿ, d^{n+1}, …` fitted alongside the expansion basis and
/// reported separately. `c_n` is a global datum, not a local coefficient.
pub const FIT_NUISANCE_ORDERS: usize = 4;

/// Band residuals below this fraction of the band's values count as rounding.
pub const ROUNDING_LEVEL: f64 = 1e-10;

/// Band index `m` such that `d ∈ (2^{-m-1}, 2^{-m}]`.
pub fn dyadic_band(d: f64) -> i32 {
    libm::floor(-libm::log2(d)) as i32
}

/// `per_band` log-spaced samples `(d, f(d))` in each band `m_lo ..= m_hi`.
pub fn dyadic_samples(m_lo: i32, m_hi: i32, per_band: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for m in m_lo..=m_hi {
        let top = libm::exp2(-(m as f64));
        for i in 0..per_band {
            let d = top * libm::exp2(-(i as f64) / per_band as f64);
            out.push((d, f(d)));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub index: i32,
    /// Geometric centre `2^{-m-1/2}`.
    pub center: f64,
    pub count: usize,
    /// `sup |value|` over the band.
    pub scale: f64,
    /// `sup |value - Σ c_j d^j - c_{n,1} dⁿ log d|` over the band.
    pub residual_sup: f64,
    /// Same, with the fitted nuisance orders also subtracted.
    pub fit_residual_sup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub fitted: ExpansionCoeffs,
    /// Fitted `c_n, c_{n+1}, …`.
    pub nuisance: Vec<f64>,
    /// Bands ordered from large `d` to small `d`.
    pub bands: Vec<Band>,
    /// Log-log slope of `residual_sup` against band centre; `None` when the
    /// residuals are at rounding level and carry no decay information.
    pub slope: Option<f64>,
}

/// Least-squares fit of `u + log d ≈ Σ_{j<n} c_j d^j + c_{n,1} dⁿ log d`
/// (plus the nuisance orders) to `samples = [(d, u + log d)]`.
///
/// Each sample is weighted by `d^{-n}`, and every dyadic band carries the same
/// total weight, so the fit is driven by the small-`d` behaviour.
pub fn fit_expansion(samples: &[(f64, f64)], n: usize) -> Result<FitReport> {
    if n < 3 {
        return Err(Error::domain("dimension must be at least 3"));
    }
    if samples.iter().any(|&(d, v)| !(d > 0.0 && d < 1.0) || !v.is_finite()) {
        return Err(Error::domain("samples need d in (0, 1) and finite values"));
    }
    let mut band_ids: Vec<i32> = samples.iter().map(|&(d, _)| dyadic_band(d)).collect();
    band_ids.sort_unstable();
    band_ids.dedup();
    if samples.len() < 3 * (n + 1) || band_ids.len() < 4 {
        return Err(Error::domain("need at least 3(n+1) samples over 4 dyadic bands"));
    }
    let count = |m: i32| samples.iter().filter(|&&(d, _)| dyadic_band(d) == m).count();

    let cols = n + FIT_NUISANCE_ORDERS;
    let basis = |d: f64| -> Vec<f64> {
        let mut row = Vec::with_capacity(cols);
        let mut p = d;
        for _ in 1..n {
            row.push(p);
            p *= d;
        }
        row.push(p * libm::log(d));
        for _ in 0..FIT_NUISANCE_ORDERS {
            row.push(p);
            p *= d;
        }
        row
    };
    let x: Vec<f64> = samples.iter().flat_map(|&(d, _)| basis(d)).collect();
    let y: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    let w: Vec<f64> =
        samples.iter().map(|&(d, _)| libm::pow(d, -(n as f64)) / libm::sqrt(count(dyadic_band(d)) as f64)).collect();
    let beta = weighted_lstsq(&x, samples.len(), cols, &y, &w)?;

    let fitted = ExpansionCoeffs::new(beta[..n - 1].to_vec(), beta[n - 1]);
    let nuisance = beta[n..].to_vec();

    let mut bands: Vec<Band> = band_ids
        .iter()
        .map(|&m| Band {
            index: m,
            center: libm::exp2(-(m as f64) - 0.5),
            count: count(m),
            scale: 0.0,
            residual_sup: 0.0,
            fit_residual_sup: 0.0,
        })
        .collect();
    for (i, &(d, v)) in samples.iter().enumerate() {
        let row = &x[i * cols..(i + 1) * cols];
        let local: f64 = row[..n].iter().zip(&beta[..n]).map(|(a, b)| a * b).sum();
        let full: f64 = local + row[n..].iter().zip(&beta[n..]).map(|(a, b)| a * b).sum::<f64>();
        let band = bands.iter_mut().find(|b| b.index == dyadic_band(d)).expect("band exists");
        band.scale = band.scale.max(v.abs());
        band.residual_sup = band.residual_sup.max((v - local).abs());
        band.fit_residual_sup = band.fit_residual_sup.max((v - full).abs());
    }

    let slope = if bands.iter().all(|b| b.residual_sup <= ROUNDING_LEVEL * b.scale) {
        None
    } else {
        let usable: Vec<&Band> = bands.iter().filter(|b| b.residual_sup > 0.0).collect();
        let lx: Vec<f64> = usable.iter().map(|b| libm::log(b.center)).collect();
        let ly: Vec<f64> = usable.iter().map(|b| libm::log(b.residual_sup)).collect();
        slope(&lx, &ly)
    };
    Ok(FitReport { fitted, nuisance, bands, slope })
}

/// Coefficients of `w̃ = w - ρ` for a smooth conformal factor
/// `ρ = ρ₀ + ρ₁d + ⋯`: `c̃_j = c_j - ρ_j`.
pub fn conformal_shift(coeffs: &ExpansionCoeffs, rho: &PhSeries) -> Result<ExpansionCoeffs> {
    let n = coeffs.dim();
    if rho.has_log_content() {
        return Err(Error::domain("conformal factor must be log-free"));
    }
    if rho.order() + 1 < n {
        return Err(Error::domain("conformal factor series is shorter than the expansion"));
    }
    let c = (1..n).map(|j| coeffs.get(j) - rho.get(j, 0)).collect();
    Ok(ExpansionCoeffs::new(c, coeffs.c_log - rho.get(n, 1)))
}

/// Whether `c̃_j^k - c̃_j^1 = c_j^k - c_j^1` for every `j` to `tol`.
pub fn differences_agree(
    coeffs_k: &ExpansionCoeffs,
    coeffs_1: &ExpansionCoeffs,
    shifted_k: &ExpansionCoeffs,
    shifted_1: &ExpansionCoeffs,
    tol: f64,
) -> Result<bool> {
    let n = coeffs_k.dim();
    if [coeffs_1, shifted_k, shifted_1].iter().any(|c| c.dim() != n) {
        return Err(Error::domain("coefficient sets have different orders"));
    }
    Ok((1..n).all(|j| {
        let before = coeffs_k.get(j) - coeffs_1.get(j);
        let after = shifted_k.get(j) - shifted_1.get(j);
        (before - after).abs() <= tol
    }))
}

/// Tolerance of [`conformal_invariance_check`].
pub const INVARIANCE_TOL: f64 = 1e-13;

/// Shifts both coefficient sets by `ρ` and checks that their differences are
/// unchanged.
pub fn conformal_invariance_check(
    coeffs_k: &ExpansionCoeffs,
    coeffs_1: &ExpansionCoeffs,
    rho: &PhSeries,
) -> Result<bool> {
    if coeffs_k.dim() != coeffs_1.dim() {
        return Err(Error::domain("coefficient sets have different orders"));
    }
    let shifted_k = conformal_shift(coeffs_k, rho)?;
    let shifted_1 = conformal_shift(coeffs_1, rho)?;
    differences_agree(coeffs_k, coeffs_1, &shifted_k, &shifted_1, INVARIANCE_TOL)
}

/// Model solution used by the decay checks: the hyperbolic ball of radius
/// `R`, or the half-space `u = -log d` when `R` is infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Ball(HyperbolicBall),
    HalfSpace,
}

impl Model {
    fn new(radius: f64) -> Result<Self> {
        if radius == f64::INFINITY {
            Ok(Model::HalfSpace)
        } else {
            Ok(Model::Ball(HyperbolicBall::new(radius)?))
        }
    }

    /// `(c₁, ∂_d w, ∂²_d w, Δw)` for `w = u + log d - c₁d` at distance `d`,
    /// all computed from the radial derivatives of `u`.
    fn w_derivatives(&self, d: f64, n: usize) -> Result<(f64, f64, f64)> {
        match self {
            Model::HalfSpace => Ok((0.0, 0.0, 0.0)),
            Model::Ball(ball) => {
                let c1 = 1.0 / (2.0 * ball.radius);
                let (_, du, ddu) = ball.at_distance(d)?;
                let r = ball.radius - d;
                // ∂_r w = u' - 1/d + c₁, ∂_r² w = u'' - 1/d²
                let w_r = du - 1.0 / d + c1;
                let w_rr = ddu - 1.0 / (d * d);
                let lap = w_rr + (n - 1) as f64 * w_r / r;
                Ok((-w_r, w_rr, lap))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub n: usize,
    pub k: usize,
    /// Expected decay order: `1/2` for `n = 3`, `1` for `n ≥ 4`.
    pub alpha: f64,
    /// `(band centre, sup |∂_d(u + log d - c₁d)|)`, large `d` first.
    pub bands: Vec<(f64, f64)>,
    /// `None` when the quantity vanishes identically.
    pub slope: Option<f64>,
    pub passed: bool,
}

/// Bands used by [`gradient_decay_check`].
pub const DECAY_BANDS: (i32, i32) = (4, 13);
/// Safety margin on decay slopes.
pub const SLOPE_MARGIN: f64 = 0.1;

/// Log-log decay of `|∂_d(u + log d - c₁d)|` over dyadic bands for the
/// exact model solution (`R = ∞` for the half-space).
pub fn gradient_decay_check(radius: f64, n: usize, k: usize) -> Result<DecayReport> {
    if n < 3 || k == 0 || k > n {
        return Err(Error::domain("need n ≥ 3 and 1 ≤ k ≤ n"));
    }
    let model = Model::new(radius)?;
    let alpha = if n == 3 { 0.5 } else { 1.0 };
    let mut bands = Vec::new();
    for m in DECAY_BANDS.0..=DECAY_BANDS.1 {
        let mut sup = 0.0f64;
        for (d, _) in dyadic_samples(m, m, 16, |_| 0.0) {
            sup = sup.max(model.w_derivatives(d, n)?.0.abs());
        }
        bands.push((libm::exp2(-(m as f64) - 0.5), sup));
    }
    let slope_est = if bands.iter().all(|&(_, s)| s == 0.0) {
        None
    } else {
        let lx: Vec<f64> = bands.iter().map(|b| libm::log(b.0)).collect();
        let ly: Vec<f64> = bands.iter().map(|b| libm::log(b.1)).collect();
        slope(&lx, &ly)
    };
    let passed = match slope_est {
        None => true,
        Some(s) => s >= alpha - SLOPE_MARGIN,
    };
    Ok(DecayReport { n, k, alpha, bands, slope: slope_est, passed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianReport {
    pub n: usize,
    pub k: usize,
    /// `sup |∂²_d(u + log d - c₁d)|` over `d ∈ [10⁻⁴, 0.1]`.
    pub sup_hessian: f64,
    /// `inf Δ(u + log d - c₁d)` over the same band.
    pub inf_laplacian: f64,
    /// The second-derivative bound is only claimed for `n ≥ 8`; smaller
    /// dimensions are reported for consistency.
    pub consistency_only: bool,
    pub bounded: bool,
}

/// Sample points of [`hessian_bound_check`].
pub fn hessian_band() -> Vec<f64> {
    let (lo, hi) = (libm::log(1e-4), libm::log(0.1));
    (0..200).map(|i| libm::exp(lo + (hi - lo) * i as f64 / 199.0)).collect()
}

pub fn hessian_bound_check(radius: f64, n: usize, k: usize) -> Result<HessianReport> {
    if n < 3 || k == 0 || k > n {
        return Err(Error::domain("need n ≥ 3 and 1 ≤ k ≤ n"));
    }
    let model = Model::new(radius)?;
    let mut sup_hessian = 0.0f64;
    let mut inf_laplacian = f64::INFINITY;
    for d in hessian_band() {
        let (_, w_dd, lap) = model.w_derivatives(d, n)?;
        sup_hessian = sup_hessian.max(w_dd.abs());
        inf_laplacian = inf_laplacian.min(lap);
    }
    Ok(HessianReport {
        n,
        k,
        sup_hessian,
        inf_laplacian,
        consistency_only: n < 8,
        bounded: sup_hessian.is_finite() && inf_laplacian.is_finite(),
    })
}

/// `(d, u + log d)` samples of the hyperbolic ball on bands `m_lo ..= m_hi`.
pub fn ball_samples(radius: f64, m_lo: i32, m_hi: i32, per_band: usize) -> Result<Vec<(f64, f64)>> {
    let ball = HyperbolicBall::new(radius)?;
    Ok(dyadic_samples(m_lo, m_hi, per_band, |d| ball.offset(d)))
}

/// Default dyadic bands for fitting. Bands below `2^{-10}` add nothing: the
/// rounding error of the values, about `ε·d`, swamps the `dⁿ log d` column
/// there once weighted by `d^{-n}`.
pub const DEFAULT_BANDS: (i32, i32) = (3, 10);

/// Default sampling for fits against the exact ball: 16 points per band.
pub fn default_ball_samples(radius: f64) -> Result<Vec<(f64, f64)>> {
    ball_samples(radius, DEFAULT_BANDS.0, DEFAULT_BANDS.1, 16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    #[test]
    fn band_indexing() {
        assert_eq!(dyadic_band(0.5), 1);
        assert_eq!(dyadic_band(0.26), 1);
        assert_eq!(dyadic_band(0.25), 2);
        assert_eq!(dyadic_band(0.75), 0);
    }

    #[test]
    fn fit_recovers_ball_coefficients() {
        let report = fit_expansion(&default_ball_samples(1.0).unwrap(), 3).unwrap();
        assert!((report.fitted.get(1) - 0.5).abs() < 1e-6);
        assert!((report.fitted.get(2) - 0.125).abs() < 1e-6);
        assert!(report.fitted.c_log.abs() < 1e-6);
        assert!(report.slope.unwrap() >= 2.8);
    }

    #[test]
    fn pure_linear_data_is_underdetermined() {
        let samples = dyadic_samples(2, 8, 8, |d| 0.3 * d);
        let report = fit_expansion(&samples, 3).unwrap();
        assert!(report.slope.is_none());
        assert!(report.bands.iter().all(|b| b.residual_sup < 1e-11 * b.scale));
    }

    #[test]
    fn fit_preconditions() {
        let few = dyadic_samples(2, 3, 8, |d| d);
        assert!(matches!(fit_expansion(&few, 3), Err(Error::Domain(_))));
        // all samples at one point: rank deficient
        let same: Vec<(f64, f64)> =
            (0..4).flat_map(|m| core::iter::repeat_n((libm::exp2(-(m as f64) - 0.5), 1.0), 4)).collect();
        assert!(matches!(fit_expansion(&same, 3), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn invariance_examples() {
        let ck = ExpansionCoeffs::new(vec![0.5, 0.1], 0.0);
        let c1 = ExpansionCoeffs::new(vec![0.5, 0.125], 0.0);
        assert!(conformal_invariance_check(&ck, &c1, &PhSeries::zero(4)).unwrap());
        let rho = PhSeries::from_poly(4, &[0.3, -1.7, 2.2, 0.9, 0.1]);
        assert!(conformal_invariance_check(&ck, &c1, &rho).unwrap());

        let tk = conformal_shift(&ck, &rho).unwrap();
        let mut t1 = conformal_shift(&c1, &rho).unwrap();
        t1.c[1] += 1e-6;
        assert!(!differences_agree(&ck, &c1, &tk, &t1, INVARIANCE_TOL).unwrap());

        let short = ExpansionCoeffs::new(vec![0.5], 0.0);
        assert!(conformal_invariance_check(&ck, &short, &rho).is_err());
        assert!(conformal_invariance_check(&ck, &c1, &PhSeries::monomial(4, 2, 1, 1.0)).is_err());
    }

    #[test]
    fn gradient_decay_on_balls() {
        let r3 = gradient_decay_check(1.0, 3, 1).unwrap();
        assert!(r3.passed && (r3.slope.unwrap() - 1.0).abs() < 0.05);
        let r4 = gradient_decay_check(1.0, 4, 2).unwrap();
        assert!(r4.passed && r4.alpha == 1.0);
        let flat = gradient_decay_check(f64::INFINITY, 5, 2).unwrap();
        assert!(flat.slope.is_none() && flat.bands.iter().all(|b| b.1 == 0.0));
    }

    #[test]
    fn gradient_matches_closed_form() {
        let ball = HyperbolicBall::new(1.0).unwrap();
        let model = Model::new(1.0).unwrap();
        for (d, _) in dyadic_samples(4, 13, 4, |_| 0.0) {
            let g = model.w_derivatives(d, 3).unwrap().0;
            assert!((g - ball.offset_gradient(d)).abs() < 1e-9 * ball.offset_gradient(d) + 1e-11);
        }
    }

    #[test]
    fn hessian_on_balls() {
        let r8 = hessian_bound_check(1.0, 8, 3).unwrap();
        assert!(r8.sup_hessian <= 0.3 && !r8.consistency_only && r8.bounded);
        let r3 = hessian_bound_check(1.0, 3, 1).unwrap();
        assert!(r3.sup_hessian <= 0.3 && r3.consistency_only);
        let flat = hessian_bound_check(f64::INFINITY, 4, 1).unwrap();
        assert_eq!((flat.sup_hessian, flat.inf_laplacian), (0.0, 0.0));
    }
}
