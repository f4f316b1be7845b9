//! Radially symmetric solutions on balls.
//!
//! For `u = u(r)` the matrix `A(u)` has a radial eigenvalue
//! `(n-1)(u'' + u'/r)` and a tangential one,
//! `u'' + (2n-3) u'/r + (n-2) u'²`, of multiplicity `n-1`. Every quantity here
//! is built from that pair, so no eigensolve is needed.
//!
//! Residuals are reported in the frame of the conformal metric itself:
//! `e^{-2ku} F(u) = σ_k(e^{-2u} A(u)) - (n-1)^k C(n,k)`. This has the sign of
//! `F(u)` and stays O(1) where `u` blows up, which the raw `F` does not.
//! Dividing by the constant gives the relative residual used for tolerances.

use alloc::vec;
use alloc::vec::Vec;

use crate::geomodel::BoundaryGeometry;
use crate::symkit::Spectrum;
use crate::{binomial, rhs_constant, Error, Result};

/// `σ_j` of `{tangential × (n-1), normal}`.
pub fn two_valued_sigma(tangential: f64, normal: f64, n: usize, j: usize) -> f64 {
    if j == 0 {
        return 1.0;
    }
    if j > n {
        return 0.0;
    }
    let tp = libm::pow(tangential, (j - 1) as f64);
    binomial(n - 1, j) * tp * tangential + binomial(n - 1, j - 1) * tp * normal
}

/// Gårding cone test for `{tangential × (n-1), normal}`.
pub fn two_valued_in_cone(tangential: f64, normal: f64, n: usize, k: usize) -> bool {
    k <= n && (1..=k).all(|j| two_valued_sigma(tangential, normal, n, j) > 0.0)
}

/// `(normal, tangential)` eigenvalues of `A(u)` for radial `u`. At `r = 0`
/// the quotient `u'/r` is replaced by its limit `u''`.
pub fn radial_a_eigenvalues(du: f64, ddu: f64, r: f64, n: usize) -> Result<(f64, f64)> {
    if !(r >= 0.0) {
        return Err(Error::domain("radius must be non-negative"));
    }
    let du_over_r = if r == 0.0 { ddu } else { du / r };
    let nf = n as f64;
    let normal = (nf - 1.0) * (ddu + du_over_r);
    let tangential = ddu + (2.0 * nf - 3.0) * du_over_r + (nf - 2.0) * du * du;
    Ok((normal, tangential))
}

/// The hyperbolic (Poincaré) conformal factor `u = log(2R / (R² - r²))` of
/// the ball of radius `R`. It solves the equation for every `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicBall {
    pub radius: f64,
}

impl HyperbolicBall {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain("ball radius must be positive and finite"));
        }
        Ok(HyperbolicBall { radius })
    }

    /// `(u, u', u'')` at radius `r ∈ [0, R)`.
    pub fn at_radius(&self, r: f64) -> Result<(f64, f64, f64)> {
        if !(0.0..self.radius).contains(&r) {
            return Err(Error::domain("r must lie in [0, R)"));
        }
        Ok(self.eval(r, (self.radius - r) * (self.radius + r)))
    }

    /// `(u, u', u'')` at distance `d ∈ (0, R]` from the boundary; radial
    /// derivatives, so `∂_d = -∂_r`.
    pub fn at_distance(&self, d: f64) -> Result<(f64, f64, f64)> {
        if !(d > 0.0 && d <= self.radius) {
            return Err(Error::domain("d must lie in (0, R]"));
        }
        Ok(self.eval(self.radius - d, d * (2.0 * self.radius - d)))
    }

    fn eval(&self, r: f64, gap: f64) -> (f64, f64, f64) {
        let rr = self.radius;
        let u = libm::log(2.0 * rr / gap);
        let du = 2.0 * r / gap;
        let ddu = 2.0 * (rr * rr + r * r) / (gap * gap);
        (u, du, ddu)
    }

    /// `u + log d = -log(1 - d/(2R))`, without cancellation.
    pub fn offset(&self, d: f64) -> f64 {
        -libm::log1p(-d / (2.0 * self.radius))
    }

    /// `∂_d (u + log d - c₁ d)` with `c₁ = 1/(2R)`: `1/(2R-d) - 1/(2R)`.
    pub fn offset_gradient(&self, d: f64) -> f64 {
        let two_r = 2.0 * self.radius;
        d / (two_r * (two_r - d))
    }

    /// `∂²_d (u + log d - c₁ d) = 1/(2R-d)²`.
    pub fn offset_hessian(&self, d: f64) -> f64 {
        let t = 2.0 * self.radius - d;
        1.0 / (t * t)
    }
}

/// `(u, u', u'')` of the hyperbolic metric on the ball of radius `R`.
pub fn exact_hyperbolic(radius: f64, r: f64) -> Result<(f64, f64, f64)> {
    HyperbolicBall::new(radius)?.at_radius(r)
}

/// A sampled radial solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub radius: f64,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub ddu: Vec<f64>,
}

impl RadialProfile {
    /// Validates lengths, a strictly increasing grid inside `[0, radius]`,
    /// and `u'(0) = 0` when the grid starts at the centre.
    pub fn new(radius: f64, grid: Vec<f64>, u: Vec<f64>, du: Vec<f64>, ddu: Vec<f64>) -> Result<Self> {
        let m = grid.len();
        if m == 0 || u.len() != m || du.len() != m || ddu.len() != m {
            return Err(Error::domain("profile columns must be nonempty and of equal length"));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) || grid[m - 1] > radius {
            return Err(Error::domain("grid must increase strictly inside [0, R]"));
        }
        if grid[0] == 0.0 && du[0] != 0.0 {
            return Err(Error::domain("u'(0) must vanish"));
        }
        Ok(RadialProfile { radius, grid, u, du, ddu })
    }

    /// Exact hyperbolic profile on `points` nodes `r_i = iR/points`, so the
    /// last node stays inside the ball.
    pub fn hyperbolic(radius: f64, points: usize) -> Result<Self> {
        let ball = HyperbolicBall::new(radius)?;
        let grid: Vec<f64> = (0..points).map(|i| radius * i as f64 / points as f64).collect();
        let mut u = Vec::with_capacity(points);
        let mut du = Vec::with_capacity(points);
        let mut ddu = Vec::with_capacity(points);
        for &r in &grid {
            let (a, b, c) = ball.at_radius(r)?;
            u.push(a);
            du.push(b);
            ddu.push(c);
        }
        RadialProfile::new(radius, grid, u, du, ddu)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPoint {
    pub r: f64,
    /// `e^{-2ku} F(u) / ((n-1)^k C(n,k))`, the equation's residual relative
    /// to its right-hand side.
    pub residual: f64,
    /// `e^{-2ku} F(u)` itself.
    pub scaled: f64,
    /// Whether the spectrum of `A(u)` lies in `Γ_k⁺`.
    pub in_cone: bool,
}

/// Pointwise residual of the equation along a profile.
pub fn pde_residual(p: &RadialProfile, n: usize, k: usize) -> Result<Vec<ResidualPoint>> {
    if n < 3 || k == 0 || k > n {
        return Err(Error::domain("need n ≥ 3 and 1 ≤ k ≤ n"));
    }
    let rhs = rhs_constant(n, k);
    (0..p.len())
        .map(|i| {
            let (normal, tangential) = radial_a_eigenvalues(p.du[i], p.ddu[i], p.grid[i], n)?;
            let w = libm::exp(-2.0 * p.u[i]);
            let (normal, tangential) = (normal * w, tangential * w);
            let sigma = two_valued_sigma(tangential, normal, n, k);
            Ok(ResidualPoint {
                r: p.grid[i],
                residual: sigma / rhs - 1.0,
                scaled: sigma - rhs,
                in_cone: two_valued_in_cone(tangential, normal, n, k),
            })
        })
        .collect()
}

/// Spectrum of `A(u)` at one profile node, as a full `n`-vector.
pub fn spectrum_at(p: &RadialProfile, i: usize, n: usize) -> Result<Spectrum> {
    let (normal, tangential) = radial_a_eigenvalues(p.du[i], p.ddu[i], p.grid[i], n)?;
    Spectrum::two_valued(tangential, n - 1, normal, 1)
}

/// Finds `x` with `σ_k(T(x), N(x)) = target` on the admissible branch, where
/// both eigenvalues increase in `x`: `T = x + t0`, `N = (n-1)(x + n0)`.
fn solve_second_order(t0: f64, n0: f64, n: usize, k: usize, target: f64) -> Result<f64> {
    let nf = (n - 1) as f64;
    let above = |x: f64| {
        let (t, nn) = (x + t0, nf * (x + n0));
        two_valued_in_cone(t, nn, n, k) && two_valued_sigma(t, nn, n, k) >= target
    };
    let mut hi = 1.0f64.max(t0.abs()).max(n0.abs());
    let mut tries = 0;
    while !above(hi) {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::NonConvergence("no upper bracket for u''".into()));
        }
    }
    let mut step = hi.abs().max(1.0);
    let mut lo = hi - step;
    tries = 0;
    while above(lo) {
        step *= 2.0;
        lo = hi - step;
        tries += 1;
        if tries > 200 {
            return Err(Error::NonConvergence("no lower bracket for u''".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// State `(ψ, ψ')` with `ψ = e^{-u}`. In these variables the radial
/// equation is regular up to the blow-up radius, and
/// `x = ψ² u'' = ψ'² - ψψ''` is fixed by `σ_k(e^{-2u} A(u)) = (n-1)^k C(n,k)`.
///
/// Returns `(ψ'', x)`, or `None` once the state has overflowed, which only
/// happens as `u` blows up.
fn psi_second_derivative(r: f64, psi: f64, dpsi: f64, n: usize, k: usize) -> Result<Option<(f64, f64)>> {
    let nf = n as f64;
    let target = rhs_constant(n, k);
    let x = if r == 0.0 {
        // ψ² u'/r → x, so both eigenvalues are 2(n-1)x and C(n,k)(2(n-1)x)^k = target
        libm::pow(target / binomial(n, k), 1.0 / k as f64) / (2.0 * (nf - 1.0))
    } else {
        let q = -psi * dpsi / r;
        let t0 = (2.0 * nf - 3.0) * q + (nf - 2.0) * dpsi * dpsi;
        if !q.is_finite() || !t0.is_finite() {
            return Ok(None);
        }
        solve_second_order(t0, q, n, k, target)?
    };
    let ddpsi = (dpsi * dpsi - x) / psi;
    Ok(ddpsi.is_finite().then_some((ddpsi, x)))
}

enum Shot {
    Reached(Vec<[f64; 3]>),
    BlewUp,
}

/// Integrates from the centre with `u(0) = center` on `r_i = iR/grid_size`,
/// recording `(ψ, ψ', x)` at each node.
fn shoot(center: f64, radius: f64, grid_size: usize, n: usize, k: usize) -> Result<Shot> {
    let h = radius / grid_size as f64;
    let rhs = |r: f64, s: [f64; 2]| -> Result<Option<[f64; 2]>> {
        // ψ reaching zero, or overflowing derivatives on the way, is blow-up of u
        if !(s[0] > 0.0) || !s[1].is_finite() {
            return Ok(None);
        }
        Ok(psi_second_derivative(r, s[0], s[1], n, k)?.map(|(dd, _)| [s[1], dd]))
    };
    let mut state = [libm::exp(-center), 0.0];
    let mut nodes = Vec::with_capacity(grid_size + 1);
    for i in 0..=grid_size {
        let r = h * i as f64;
        let Some((_, x)) = psi_second_derivative(r, state[0], state[1], n, k)? else { return Ok(Shot::BlewUp) };
        nodes.push([state[0], state[1], x]);
        if i == grid_size {
            break;
        }
        let add = |s: [f64; 2], d: [f64; 2], f: f64| [s[0] + f * d[0], s[1] + f * d[1]];
        let Some(k1) = rhs(r, state)? else { return Ok(Shot::BlewUp) };
        let Some(k2) = rhs(r + h / 2.0, add(state, k1, h / 2.0))? else { return Ok(Shot::BlewUp) };
        let Some(k3) = rhs(r + h / 2.0, add(state, k2, h / 2.0))? else { return Ok(Shot::BlewUp) };
        let Some(k4) = rhs(r + h, add(state, k3, h))? else { return Ok(Shot::BlewUp) };
        state = [
            state[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            state[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if !(state[0] > 0.0) || !state[1].is_finite() {
            return Ok(Shot::BlewUp);
        }
    }
    Ok(Shot::Reached(nodes))
}

/// Radial solution of `F(u) = 0` on the ball of radius `R` with the finite
/// Dirichlet value `u(R) = J`, by bisection on the centre value `u(0)`.
///
/// The grid is `r_i = iR/grid_size`, `i = 0 … grid_size`; its last node is
/// the Dirichlet radius itself.
pub fn shoot_finite_bvp(
    n: usize,
    k: usize,
    radius: f64,
    boundary_value: f64,
    grid_size: usize,
) -> Result<RadialProfile> {
    if n < 3 || k == 0 || k > n {
        return Err(Error::domain("need n ≥ 3 and 1 ≤ k ≤ n"));
    }
    if !(radius > 0.0) || !radius.is_finite() || !boundary_value.is_finite() {
        return Err(Error::domain("radius and boundary value must be finite, radius positive"));
    }
    if grid_size < 100 {
        return Err(Error::domain("grid_size must be at least 100"));
    }
    let target_psi = libm::exp(-boundary_value);
    // ψ(R) as a function of the centre value; None when u blows up before R
    let end_psi = |a: f64| -> Result<Option<f64>> {
        Ok(match shoot(a, radius, grid_size, n, k)? {
            Shot::Reached(nodes) => Some(nodes[grid_size][0]),
            Shot::BlewUp => None,
        })
    };
    let overshoots = |a: f64| -> Result<bool> {
        Ok(match end_psi(a)? {
            Some(p) => p <= target_psi,
            None => true,
        })
    };

    // u is radially increasing, so u(0) < J
    let mut hi = boundary_value;
    if !overshoots(hi)? {
        return Err(Error::NoSolution("centre value J does not overshoot".into()));
    }
    let mut step = 1.0;
    let mut lo = hi - step;
    let mut tries = 0;
    while overshoots(lo)? {
        hi = lo;
        step *= 2.0;
        lo = hi - step;
        tries += 1;
        if tries > 60 {
            return Err(Error::NoSolution("could not bracket the centre value".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if overshoots(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let nodes = match shoot(lo, radius, grid_size, n, k)? {
        Shot::Reached(nodes) => nodes,
        Shot::BlewUp => return Err(Error::NoSolution("final shot blew up".into())),
    };

    let h = radius / grid_size as f64;
    let mut grid = Vec::with_capacity(nodes.len());
    let (mut u, mut du, mut ddu) = (vec![], vec![], vec![]);
    for (i, [psi, dpsi, x]) in nodes.into_iter().enumerate() {
        grid.push(if i == grid_size { radius } else { h * i as f64 });
        u.push(-libm::log(psi));
        du.push(if i == 0 { 0.0 } else { -dpsi / psi });
        ddu.push(x / (psi * psi));
    }
    let profile = RadialProfile::new(radius, grid, u, du, ddu)?;
    for pt in pde_residual(&profile, n, k)? {
        if !pt.in_cone {
            return Err(Error::Admissibility { r: pt.r });
        }
    }
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierPoint {
    pub d: f64,
    /// `d^{2k} F(φ)`, which has the sign of `F(φ)`.
    pub ftilde: f64,
    pub in_cone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierReport {
    pub c: f64,
    pub delta: f64,
    pub k: usize,
    pub points: Vec<BarrierPoint>,
    pub negative_everywhere: bool,
    pub admissible_everywhere: bool,
}

impl BarrierReport {
    pub fn is_supersolution(&self) -> bool {
        self.negative_everywhere && self.admissible_everywhere
    }
}

/// Number of sample points used by [`barrier_sign`] on `(0, δ]`.
pub const BARRIER_POINTS: usize = 400;

/// Sign of `F(φ)` and cone membership of `A(φ)` for `φ = -log d + C d` on
/// `d ∈ [10⁻⁶δ, δ]`, log-spaced, near an umbilic boundary.
pub fn barrier_sign(c: f64, delta: f64, g: &BoundaryGeometry, k: usize) -> Result<BarrierReport> {
    let n = g.dim();
    let kappa = g
        .umbilic_curvature()
        .ok_or_else(|| Error::UnsupportedGeometry("barrier check needs an umbilic boundary".into()))?;
    if k == 0 || k > n {
        return Err(Error::domain("k must lie in 1..=n"));
    }
    if !(delta > 0.0) || kappa * delta >= 1.0 || !c.is_finite() {
        return Err(Error::domain("delta must be positive and below the focal distance"));
    }
    let nf = n as f64;
    let rhs = rhs_constant(n, k);
    let lo = libm::log(delta * 1e-6);
    let hi = libm::log(delta);
    let mut points = Vec::with_capacity(BARRIER_POINTS);
    for i in 0..BARRIER_POINTS {
        let d = if i + 1 == BARRIER_POINTS {
            delta
        } else {
            libm::exp(lo + (hi - lo) * i as f64 / (BARRIER_POINTS - 1) as f64)
        };
        let curv = kappa / (1.0 - kappa * d);
        // d² φ_d and d² φ_dd
        let d2_dphi = -d + c * d * d;
        let normal = (nf - 1.0) * (1.0 - d2_dphi * curv);
        let d_dphi = -1.0 + c * d;
        let tangential = 1.0 - (2.0 * nf - 3.0) * d2_dphi * curv + (nf - 2.0) * d_dphi * d_dphi;
        let ftilde = two_valued_sigma(tangential, normal, n, k) - rhs * libm::exp(2.0 * k as f64 * c * d);
        points.push(BarrierPoint { d, ftilde, in_cone: two_valued_in_cone(tangential, normal, n, k) });
    }
    Ok(BarrierReport {
        c,
        delta,
        k,
        negative_everywhere: points.iter().all(|p| p.ftilde < 0.0),
        admissible_everywhere: points.iter().all(|p| p.in_cone),
        points,
    })
}

/// Searches `C ∈ {1, 2, 5, 10, 20, 50, 100}` (up to `c_max`) and
/// `δ ∈ {10⁻², 5·10⁻³, 2·10⁻³, 10⁻³}` (up to `delta_max`) for a barrier.
pub fn find_barrier(g: &BoundaryGeometry, k: usize, c_max: f64, delta_max: f64) -> Result<Option<BarrierReport>> {
    for &delta in &[1e-2, 5e-3, 2e-3, 1e-3] {
        if delta > delta_max {
            continue;
        }
        for &c in &[1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
            if c > c_max {
                continue;
            }
            let report = barrier_sign(c, delta, g, k)?;
            if report.is_supersolution() {
                return Ok(Some(report));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_values() {
        let (u, du, ddu) = exact_hyperbolic(1.0, 0.0).unwrap();
        assert!((u - libm::log(2.0)).abs() < 1e-15 && du == 0.0 && (ddu - 2.0).abs() < 1e-15);
        let (u, _, _) = exact_hyperbolic(2.0, 0.0).unwrap();
        assert!(u.abs() < 1e-15);
        assert!(exact_hyperbolic(1.0, 1.0).is_err());
        assert!(exact_hyperbolic(1.0, -0.1).is_err());
    }

    #[test]
    fn offset_vanishes_at_boundary() {
        let ball = HyperbolicBall::new(1.0).unwrap();
        for d in [1e-3, 1e-6, 1e-9] {
            let (u, _, _) = ball.at_distance(d).unwrap();
            assert!((u + libm::log(d) - ball.offset(d)).abs() < 1e-12);
            assert!(ball.offset(d) < d);
        }
    }

    #[test]
    fn eigenvalue_limits() {
        for n in 3..9 {
            let (normal, tangential) = radial_a_eigenvalues(0.0, 2.0, 0.0, n).unwrap();
            let want = 4.0 * (n - 1) as f64;
            assert!((normal - want).abs() < 1e-14 && (tangential - want).abs() < 1e-14);
        }
        assert_eq!(radial_a_eigenvalues(0.0, 0.0, 0.5, 4).unwrap(), (0.0, 0.0));
        assert!(radial_a_eigenvalues(0.0, 0.0, -1.0, 4).is_err());
    }

    #[test]
    fn constant_profile_residual() {
        let p = RadialProfile::new(1.0, vec![0.0, 0.5], vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]).unwrap();
        for n in 3..7 {
            for pt in pde_residual(&p, n, 1).unwrap() {
                assert!((pt.residual + 1.0).abs() < 1e-15);
                assert_eq!(pt.scaled, -((n * (n - 1)) as f64));
                assert!(!pt.in_cone);
            }
        }
    }

    #[test]
    fn shifted_hyperbolic_is_subsolution() {
        let mut p = RadialProfile::hyperbolic(1.0, 50).unwrap();
        for u in p.u.iter_mut() {
            *u += libm::log(2.0);
        }
        for k in 1..=3 {
            assert!(pde_residual(&p, 3, k).unwrap().iter().all(|pt| pt.residual < 0.0));
        }
    }

    #[test]
    fn profile_validation() {
        assert!(RadialProfile::new(1.0, vec![0.0, 0.0], vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]).is_err());
        assert!(RadialProfile::new(1.0, vec![0.0, 1.5], vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]).is_err());
        assert!(RadialProfile::new(1.0, vec![0.0, 0.5], vec![0.0; 2], vec![0.1, 0.0], vec![0.0; 2]).is_err());
    }

    #[test]
    fn flat_barrier_is_exact() {
        let g = BoundaryGeometry::flat(3).unwrap();
        for k in 1..=3 {
            let rep = barrier_sign(0.0, 1e-2, &g, k).unwrap();
            assert!(rep.points.iter().all(|p| p.ftilde.abs() < 1e-12));
            assert!(!rep.negative_everywhere);
        }
    }

    #[test]
    fn shooting_input_validation() {
        assert!(shoot_finite_bvp(3, 1, 1.0, 5.0, 50).is_err());
        assert!(shoot_finite_bvp(3, 4, 1.0, 5.0, 200).is_err());
        assert!(shoot_finite_bvp(3, 1, -1.0, 5.0, 200).is_err());
    }
}
