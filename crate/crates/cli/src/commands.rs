//! The pipelines behind each subcommand.

use serde_json::Value;
use sigmak_core::expand::{formal_solution, solve_with_order};
use sigmak_core::radial::{
    barrier_sign, find_barrier, pde_residual, shoot_finite_bvp, BarrierReport, RadialProfile, ResidualPoint,
};
use sigmak_core::verify::{default_ball_samples, fit_expansion};
use sigmak_core::{BoundaryGeometry, ExpansionCoeffs, Spectrum};

use crate::config::{Command, RunConfig};
use crate::output::{fmt_f64, num, nums, Obj, Table};
use crate::CliError;

/// Tolerances of `ball-verify`.
pub const BALL_COEFF_TOL: f64 = 1e-8;
pub const BALL_RESIDUAL_TOL: f64 = 1e-9;
/// Defaults when the corresponding flag is absent.
pub const DEFAULT_RESIDUAL_POINTS: usize = 100;
pub const DEFAULT_SHOOT_GRID: usize = 400;
pub const DEFAULT_BARRIER_C_MAX: f64 = 100.0;
pub const DEFAULT_BARRIER_DELTA_MAX: f64 = 1e-2;

pub struct Report {
    pub json: Value,
    pub table: Table,
    /// Printed on stdout when the data goes to a file.
    pub summary: Option<String>,
    /// False exits with the verification-failure status.
    pub passed: bool,
}

pub fn dispatch(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Coeffs => coeffs(cfg),
        Command::BallVerify => ball_verify(cfg),
        Command::Shoot => shoot(cfg),
        Command::Barrier => barrier(cfg),
        Command::Fit => fit(cfg),
        Command::Cone => cone(cfg),
    }
}

fn geometry(cfg: &RunConfig) -> &BoundaryGeometry {
    cfg.geometry.as_ref().expect("validated")
}

fn coeffs_json(c: &ExpansionCoeffs, with_log: bool) -> Obj {
    let mut obj = Obj::new();
    for (i, &v) in c.c.iter().enumerate() {
        obj = obj.float(&format!("c{}", i + 1), v);
    }
    if with_log {
        obj = obj.float("c_log", c.c_log);
    }
    obj
}

fn coeffs_table(c: &ExpansionCoeffs, with_log: bool) -> Table {
    let mut t = Table::new(vec!["j", "c_j"]);
    for (i, &v) in c.c.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), fmt_f64(v)]);
    }
    if with_log {
        t.push(vec!["log".into(), fmt_f64(c.c_log)]);
    }
    t
}

fn coeffs(cfg: &RunConfig) -> Result<Report, CliError> {
    let g = geometry(cfg);
    let (n, k) = (g.dim(), cfg.k.expect("validated"));
    let (c, umbilic) = match g.umbilic_curvature() {
        Some(_) => {
            let order = cfg.order.unwrap_or(n + 1);
            (solve_with_order(g, k, order).map_err(CliError::from_core)?.coeffs, true)
        }
        None => {
            // only the closed forms are available off the umbilic locus
            if cfg.emit_series {
                return Err(CliError::validation("series output needs an umbilic boundary"));
            }
            log::info!("non-umbilic boundary: reporting closed-form c1, c2 only");
            let c2 = g.c2_closed_form(k).map_err(CliError::from_core)?;
            (ExpansionCoeffs::new(vec![g.c1_closed_form(), c2], 0.0), false)
        }
    };
    let mut json = coeffs_json(&c, umbilic);
    let mut table = coeffs_table(&c, umbilic);
    if cfg.emit_series {
        let series = formal_solution(&c, cfg.order.unwrap_or(n + 1)).triples();
        json = json.put(
            "series",
            Value::Array(series.iter().map(|&(j, l, v)| Value::Array(vec![j.into(), l.into(), num(v)])).collect()),
        );
        table = Table::new(vec!["j", "l", "coefficient"]);
        for (j, l, v) in series {
            table.push(vec![j.to_string(), l.to_string(), fmt_f64(v)]);
        }
    }
    let summary = coeffs_table(&c, umbilic).rows.iter().map(|r| format!("c_{:<4}{}\n", r[0], r[1])).collect();
    Ok(Report { json: json.into(), table, summary: Some(summary), passed: true })
}

fn profile_table(p: &RadialProfile, residual: &[f64]) -> Table {
    let mut t = Table::new(vec!["r", "u", "du", "ddu", "residual"]);
    for (i, &res) in residual.iter().enumerate().take(p.len()) {
        t.push([p.grid[i], p.u[i], p.du[i], p.ddu[i], res].iter().map(|&x| fmt_f64(x)).collect());
    }
    t
}

fn max_abs_residual(pts: &[ResidualPoint]) -> f64 {
    pts.iter().fold(0.0, |m, p| m.max(p.residual.abs()))
}

fn ball_verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let (n, radius) = (cfg.n.expect("validated"), cfg.radius.expect("validated"));
    let points = cfg.grid.unwrap_or(DEFAULT_RESIDUAL_POINTS);
    let g = BoundaryGeometry::ball(n, radius).map_err(CliError::from_core)?;
    let profile = RadialProfile::hyperbolic(radius, points).map_err(CliError::from_core)?;
    let ks: Vec<usize> = match cfg.k {
        Some(k) => vec![k],
        None => (1..=n).collect(),
    };

    let mut checks = Vec::new();
    let mut all_passed = true;
    // signed residual of the worst k at each node
    let mut worst = vec![0.0f64; profile.len()];
    for &k in &ks {
        let c = solve_with_order(&g, k, n + 1).map_err(CliError::from_core)?.coeffs;
        let coeff_error = (1..n)
            .map(|j| (c.get(j) - 1.0 / (j as f64 * (2.0 * radius).powi(j as i32))).abs())
            .fold(c.c_log.abs(), f64::max);
        let pts = pde_residual(&profile, n, k).map_err(CliError::from_core)?;
        for (w, p) in worst.iter_mut().zip(&pts) {
            if p.residual.abs() > w.abs() {
                *w = p.residual;
            }
        }
        let max_residual = max_abs_residual(&pts);
        let in_cone = pts.iter().all(|p| p.in_cone);
        let passed = coeff_error <= BALL_COEFF_TOL && max_residual < BALL_RESIDUAL_TOL && in_cone;
        log::debug!("k={k}: coefficient error {coeff_error:e}, residual {max_residual:e}");
        all_passed &= passed;
        checks.push(
            Obj::new()
                .put("k", k)
                .put("coefficients", coeffs_json(&c, true))
                .float("coeff_error", coeff_error)
                .float("max_residual", max_residual)
                .put("in_cone", in_cone)
                .put("passed", passed),
        );
    }
    let summary = format!("ball-verify n={n} R={}: {}\n", fmt_f64(radius), if all_passed { "pass" } else { "FAIL" });
    let json = Obj::new()
        .put("n", n)
        .float("R", radius)
        .put("points", points)
        .put("checks", Value::Array(checks.into_iter().map(Value::from).collect()))
        .put("passed", all_passed);
    Ok(Report { json: json.into(), table: profile_table(&profile, &worst), summary: Some(summary), passed: all_passed })
}

fn shoot(cfg: &RunConfig) -> Result<Report, CliError> {
    let (n, k) = (cfg.n.expect("validated"), cfg.k.expect("validated"));
    let radius = cfg.radius.unwrap_or(1.0);
    let j = cfg.boundary_value.expect("validated");
    let grid = cfg.grid.unwrap_or(DEFAULT_SHOOT_GRID);
    let p = shoot_finite_bvp(n, k, radius, j, grid).map_err(CliError::from_core)?;
    let pts = pde_residual(&p, n, k).map_err(CliError::from_core)?;
    let residual: Vec<f64> = pts.iter().map(|q| q.residual).collect();
    let json = Obj::new()
        .put("n", n)
        .put("k", k)
        .float("R", radius)
        .float("J", j)
        .put("grid", grid)
        // full ball with finite boundary data, not the annular companion problem
        .put("model", "finite-dirichlet-surrogate (heuristic)")
        .float("u0", p.u[0])
        .float("max_residual", max_abs_residual(&pts))
        .put(
            "profile",
            Obj::new()
                .put("r", nums(&p.grid))
                .put("u", nums(&p.u))
                .put("du", nums(&p.du))
                .put("ddu", nums(&p.ddu))
                .put("residual", nums(&residual)),
        );
    let summary = format!(
        "shoot n={n} k={k} J={}: u(0) = {} (heuristic finite-Dirichlet surrogate)\n",
        fmt_f64(j),
        fmt_f64(p.u[0])
    );
    Ok(Report { json: json.into(), table: profile_table(&p, &residual), summary: Some(summary), passed: true })
}

fn barrier_json(n: usize, k: usize, report: Option<&BarrierReport>) -> Obj {
    let base = Obj::new().put("n", n).put("k", k).put("found", report.is_some_and(|r| r.is_supersolution()));
    match report {
        None => base,
        Some(r) => base
            .float("C", r.c)
            .float("delta", r.delta)
            .put("negative_everywhere", r.negative_everywhere)
            .put("admissible_everywhere", r.admissible_everywhere)
            .float("max_ftilde", r.points.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p.ftilde)))
            .put("points", r.points.len()),
    }
}

fn barrier(cfg: &RunConfig) -> Result<Report, CliError> {
    let g = geometry(cfg);
    let (n, k) = (g.dim(), cfg.k.expect("validated"));
    let report = match (cfg.c, cfg.delta) {
        (Some(c), Some(delta)) => Some(barrier_sign(c, delta, g, k).map_err(CliError::from_core)?),
        (c, delta) => {
            find_barrier(g, k, c.unwrap_or(DEFAULT_BARRIER_C_MAX), delta.unwrap_or(DEFAULT_BARRIER_DELTA_MAX))
                .map_err(CliError::from_core)?
        }
    };
    let passed = report.as_ref().is_some_and(|r| r.is_supersolution());
    let mut table = Table::new(vec!["d", "ftilde", "in_cone"]);
    if let Some(r) = &report {
        for p in &r.points {
            table.push(vec![fmt_f64(p.d), fmt_f64(p.ftilde), p.in_cone.to_string()]);
        }
    }
    let summary = match &report {
        Some(r) if passed => format!("barrier n={n} k={k}: C = {}, delta = {}\n", fmt_f64(r.c), fmt_f64(r.delta)),
        _ => format!("barrier n={n} k={k}: none found\n"),
    };
    Ok(Report { json: barrier_json(n, k, report.as_ref()).into(), table, summary: Some(summary), passed })
}

fn read_samples(path: &std::path::Path) -> Result<Vec<(f64, f64)>, CliError> {
    let bad = |e: &dyn std::fmt::Display| CliError::validation(format!("cannot read samples {}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(&e))?;
    let headers = rdr.headers().map_err(|e| bad(&e))?.clone();
    if headers.len() != 2 || &headers[0] != "d" || &headers[1] != "value" {
        return Err(bad(&"expected header d,value"));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| bad(&e))?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
            Ok((parse(&rec[0])?, parse(&rec[1])?))
        })
        .collect()
}

fn fit(cfg: &RunConfig) -> Result<Report, CliError> {
    let n = cfg.n.expect("validated");
    let samples = match &cfg.input {
        Some(path) => read_samples(path)?,
        None => default_ball_samples(cfg.radius.expect("validated")).map_err(CliError::from_core)?,
    };
    let report = fit_expansion(&samples, n).map_err(CliError::from_core)?;
    let bands = report.bands.iter().map(|b| {
        Value::from(
            Obj::new()
                .put("index", b.index)
                .float("center", b.center)
                .put("count", b.count)
                .float("residual_sup", b.residual_sup)
                .float("fit_residual_sup", b.fit_residual_sup),
        )
    });
    let json = coeffs_json(&report.fitted, true)
        .put("nuisance", nums(&report.nuisance))
        .put("slope", report.slope.map_or(Value::Null, num))
        .put("bands", Value::Array(bands.collect()));
    let mut table = Table::new(vec!["band_center", "residual_sup"]);
    for b in &report.bands {
        table.push(vec![fmt_f64(b.center), fmt_f64(b.residual_sup)]);
    }
    let slope = report.slope.map_or("underdetermined".to_string(), fmt_f64);
    let summary = format!("fit n={n}: {} samples, remainder slope {slope}\n", samples.len());
    Ok(Report { json: json.into(), table, summary: Some(summary), passed: true })
}

fn cone(cfg: &RunConfig) -> Result<Report, CliError> {
    let k = cfg.k.expect("validated");
    let s = Spectrum::new(cfg.lambda.clone().expect("validated")).map_err(CliError::from_core)?;
    let sigma = s.elementary_all();
    let upto = k.min(s.dim());
    let in_cone = s.in_gamma_cone(k);
    let json = Obj::new().put("k", k).put("in_cone", in_cone).put("sigma", nums(&sigma[1..=upto]));
    let mut table = Table::new(vec!["j", "sigma_j"]);
    for (j, &v) in sigma.iter().enumerate().take(upto + 1).skip(1) {
        table.push(vec![j.to_string(), fmt_f64(v)]);
    }
    let summary = format!("in_cone = {in_cone}\n");
    Ok(Report { json: json.into(), table, summary: Some(summary), passed: true })
}
