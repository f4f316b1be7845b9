use sigmak_core::radial::{
    exact_hyperbolic, find_barrier, pde_residual, shoot_finite_bvp, spectrum_at, HyperbolicBall, RadialProfile,
};
use sigmak_core::{BoundaryGeometry, Error};

#[test]
fn exact_solution_solves_the_equation() {
    for n in 3..=8 {
        for k in 1..=n {
            let p = RadialProfile::hyperbolic(1.0, 100).unwrap();
            for pt in pde_residual(&p, n, k).unwrap() {
                assert!(pt.residual.abs() < 1e-9, "n={n} k={k} r={} {}", pt.r, pt.residual);
                assert!(pt.in_cone);
            }
            for radius in [0.5, 3.0] {
                let p = RadialProfile::hyperbolic(radius, 100).unwrap();
                for pt in pde_residual(&p, n, k).unwrap() {
                    assert!(pt.residual.abs() < 1e-13);
                }
            }
        }
    }
}

#[test]
fn exact_spectrum_is_scalar() {
    // A(u) = (n-1) e^{2u} I for the hyperbolic metric
    let p = RadialProfile::hyperbolic(1.0, 50).unwrap();
    for i in [0, 10, 49] {
        let s = spectrum_at(&p, i, 5).unwrap();
        let want = 4.0 * (2.0 * p.u[i]).exp();
        assert!(s.values().iter().all(|v| (v - want).abs() < 1e-9 * want));
    }
}

#[test]
fn hyperbolic_ball_consistency() {
    let ball = HyperbolicBall::new(2.0).unwrap();
    for d in [1.5, 0.5, 1e-2, 1e-5] {
        let (u, du, ddu) = ball.at_distance(d).unwrap();
        let (u2, du2, ddu2) = exact_hyperbolic(2.0, 2.0 - d).unwrap();
        assert!((u - u2).abs() < 1e-12 * u.abs().max(1.0));
        assert!((du - du2).abs() < 1e-9 * du.abs());
        assert!((ddu - ddu2).abs() < 1e-9 * ddu.abs());
        assert!((u + d.ln() - ball.offset(d)).abs() < 1e-12);
    }
}

fn interior_deviation(p: &RadialProfile) -> f64 {
    // r ≤ R/2, away from the boundary layer
    p.grid
        .iter()
        .zip(&p.u)
        .filter(|(r, _)| **r <= 0.5 * p.radius)
        .map(|(&r, &u)| (u - exact_hyperbolic(p.radius, r).unwrap().0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn shooting_is_monotone_in_boundary_value() {
    let profiles: Vec<RadialProfile> =
        [5.0, 8.0, 11.0].iter().map(|&j| shoot_finite_bvp(3, 1, 1.0, j, 400).unwrap()).collect();
    for w in profiles.windows(2) {
        assert!(w[0].u.iter().zip(&w[1].u).all(|(a, b)| a <= b));
        assert!(interior_deviation(&w[1]) < interior_deviation(&w[0]));
    }
    for p in &profiles {
        for pt in pde_residual(p, 3, 1).unwrap() {
            assert!(pt.in_cone);
        }
    }
}

#[test]
fn shooting_recovers_the_exact_solution() {
    // data u_exact(r_end) imposed at r_end < 1 reproduces the unit-ball solution
    for grid in [100, 400] {
        let r_end = 1.0 - 1.0 / grid as f64;
        let j = exact_hyperbolic(1.0, r_end).unwrap().0;
        let p = shoot_finite_bvp(3, 1, r_end, j, grid).unwrap();
        let sup =
            p.grid.iter().zip(&p.u).map(|(&r, &u)| (u - exact_hyperbolic(1.0, r).unwrap().0).abs()).fold(0.0, f64::max);
        assert!(sup < 1e-5, "grid {grid}: {sup:e}");
    }
}

#[test]
fn shooting_matches_the_larger_hyperbolic_ball() {
    // with u'(0) = 0 every radial solution is a hyperbolic ball of some radius R' > R
    let p = shoot_finite_bvp(3, 2, 1.0, 5.0, 400).unwrap();
    // u(0) = log(2/R')
    let big_r = 2.0 * (-p.u[0]).exp();
    assert!(big_r > 1.0);
    for (i, &r) in p.grid.iter().enumerate() {
        let (u, _, _) = exact_hyperbolic(big_r, r).unwrap();
        assert!((p.u[i] - u).abs() < 1e-6, "r={r}");
    }
    assert!((p.u[p.len() - 1] - 5.0).abs() < 1e-6);
}

#[test]
fn shooting_validates_input() {
    assert!(matches!(shoot_finite_bvp(3, 1, 1.0, 5.0, 50), Err(Error::Domain(_))));
    assert!(matches!(shoot_finite_bvp(3, 4, 1.0, 5.0, 200), Err(Error::Domain(_))));
    assert!(matches!(shoot_finite_bvp(3, 1, -1.0, 5.0, 200), Err(Error::Domain(_))));
}

#[test]
fn barriers_exist_on_the_unit_ball() {
    for k in 1..=3 {
        let g = BoundaryGeometry::ball(3, 1.0).unwrap();
        let b = find_barrier(&g, k, 100.0, 1e-2).unwrap().expect("barrier");
        assert!(b.c <= 100.0 && b.delta <= 1e-2 && b.is_supersolution());
        assert!(b.points.iter().all(|p| p.ftilde < 0.0 && p.in_cone));
    }
}

#[test]
fn negative_barrier_constant_is_a_subsolution() {
    let g = BoundaryGeometry::ball(3, 1.0).unwrap();
    let b = sigmak_core::radial::barrier_sign(-10.0, 1e-2, &g, 1).unwrap();
    assert!(b.points.iter().all(|p| p.ftilde > 0.0));
    assert!(!b.is_supersolution());
}

#[test]
fn coarse_grid_shooting() {
    for j in [5.0, 8.0] {
        let p = shoot_finite_bvp(3, 1, 1.0, j, 100).unwrap();
        assert!((p.u[p.len() - 1] - j).abs() < 1e-6);
    }
}
