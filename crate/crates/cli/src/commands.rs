use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::io::Write;
use std::path::PathBuf;

use fraclap::dequad::{
    de_finite, de_oscillatory, de_semiinfinite, OscillatoryKind, QuadratureConfig,
};
use fraclap::hankel::{hankel_partitioned, wynn_epsilon, Engine, HankelConfig, PartialSumTable};
use fraclap::mellin::{hfun_contour, kernel_strip, mellin_kernel_c, ContourSpec};
use fraclap::model::{
    asymptotic_tail, log_grid, profile, solve_full, solve_integer, solve_point, Method,
    ModelParams, RadialProfile, SolverConfig,
};
use fraclap::specfun::{i0, i1, k0, k1};
use fraclap::Error;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::cli::{AsymptoteArgs, Format, GridArgs, ModelArgs, ProfileArgs};
use crate::output::{emit, Table};
use crate::Failure;

/// Everything that determines a run's output.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub params: ModelParams,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub methods: Vec<Method>,
    pub tol: f64,
    pub engine: Engine,
    pub format: Format,
    pub output: Option<PathBuf>,
}

fn params(m: &ModelArgs) -> Result<ModelParams, Failure> {
    ModelParams::new(m.sigma, m.q, m.d, m.l, m.alpha).map_err(|e| Failure::Usage(e.to_string()))
}

fn grid(g: &GridArgs, p: &ModelParams, lo: f64, hi: f64) -> Result<(f64, f64, Vec<f64>), Failure> {
    let r_min = g.rmin.unwrap_or(lo * p.l());
    let r_max = g.rmax.unwrap_or(hi * p.l());
    let radii = log_grid(r_min, r_max, g.points).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((r_min, r_max, radii))
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--tol must be positive, got {tol}")))
    }
}

fn solver(tol: f64, engine: Engine) -> SolverConfig {
    SolverConfig {
        engine,
        ..SolverConfig::with_tolerance(tol)
    }
}

fn run_profiles(cfg: &RunConfig, radii: &[f64]) -> Result<Vec<RadialProfile>, Failure> {
    let s = solver(cfg.tol, cfg.engine);
    cfg.methods
        .iter()
        .map(|&m| profile(m, &cfg.params, radii, &s).map_err(Failure::Eval))
        .collect()
}

fn setup(command: &'static str, a: &ProfileArgs) -> Result<(RunConfig, Vec<f64>), Failure> {
    let p = params(&a.model)?;
    check_tol(a.tol)?;
    if a.methods.is_empty() {
        return Err(Failure::Usage(
            "--methods must name at least one method".into(),
        ));
    }
    let (r_min, r_max, radii) = grid(&a.grid, &p, 0.05, 20.0)?;
    let cfg = RunConfig {
        command,
        params: p,
        r_min,
        r_max,
        points: a.grid.points,
        methods: a.methods.clone(),
        tol: a.tol,
        engine: a.engine,
        format: a.out.format,
        output: a.out.output.clone(),
    };
    Ok((cfg, radii))
}

pub fn cmd_profile(a: &ProfileArgs) -> Result<(), Failure> {
    let (cfg, radii) = setup("profile", a)?;
    let profiles = run_profiles(&cfg, &radii)?;

    let mut columns = vec!["r".to_string()];
    for m in &cfg.methods {
        columns.push(m.name().to_string());
        if m.has_error_estimate() {
            columns.push(format!("{}_err", m.name()));
        }
    }
    let rows = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mut row = vec![r];
            for prof in &profiles {
                let s = &prof.samples[i];
                row.push(s.c);
                if let Some(e) = s.err_est {
                    row.push(e);
                }
            }
            row
        })
        .collect();
    let table = Table { columns, rows };
    emit(&table, &cfg, None, cfg.format, cfg.output.as_deref()).map_err(Failure::Io)
}

pub fn cmd_compare(a: &ProfileArgs) -> Result<(), Failure> {
    if a.methods.len() != 2 {
        return Err(Failure::Usage(format!(
            "compare needs exactly two methods, got {}",
            a.methods.len()
        )));
    }
    let (cfg, radii) = setup("compare", a)?;
    let profiles = run_profiles(&cfg, &radii)?;
    let mut max_abs: f64 = 0.0;
    let rows = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let (va, vb) = (profiles[0].samples[i].c, profiles[1].samples[i].c);
            let abs = (va - vb).abs();
            let scale = va.abs().max(vb.abs());
            let rel = if scale > 0.0 { abs / scale } else { 0.0 };
            max_abs = max_abs.max(abs);
            vec![r, va, vb, abs, rel]
        })
        .collect();
    let columns = ["r", "value_a", "value_b", "abs_diff", "rel_diff"]
        .map(String::from)
        .to_vec();
    let summary = json!({ "max_abs_diff": max_abs });
    emit(
        &Table { columns, rows },
        &cfg,
        Some(summary),
        cfg.format,
        cfg.output.as_deref(),
    )
    .map_err(Failure::Io)
}

/// Smallest grid radius from which `|ratio − 1| ≤ 0.1` holds to the end of
/// the grid.
fn crossover(radii: &[f64], ratios: &[f64]) -> Option<f64> {
    let start = ratios
        .iter()
        .rposition(|x| !((x - 1.0).abs() <= 0.1))
        .map_or(0, |i| i + 1);
    radii.get(start).copied()
}

pub fn cmd_asymptote(a: &AsymptoteArgs) -> Result<(), Failure> {
    let p = params(&a.model)?;
    check_tol(a.tol)?;
    let (r_min, r_max, radii) = grid(&a.grid, &p, 1.0, 300.0)?;
    let cfg = RunConfig {
        command: "asymptote",
        params: p,
        r_min,
        r_max,
        points: a.grid.points,
        methods: vec![Method::PointAsymptotic, Method::TailAsymptotic],
        tol: a.tol,
        engine: Engine::Partitioned,
        format: a.out.format,
        output: a.out.output.clone(),
    };
    let s = solver(a.tol, Engine::Partitioned);
    let point = profile(Method::PointAsymptotic, &p, &radii, &s).map_err(Failure::Eval)?;
    let tail = profile(Method::TailAsymptotic, &p, &radii, &s).map_err(Failure::Eval)?;
    let ratios: Vec<f64> = point
        .samples
        .iter()
        .zip(&tail.samples)
        .map(|(x, t)| x.c / t.c)
        .collect();
    let rows = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| vec![r, point.samples[i].c, tail.samples[i].c, ratios[i]])
        .collect();
    let columns = ["r", "point", "tail", "ratio"].map(String::from).to_vec();
    let summary = json!({ "crossover_radius": crossover(&radii, &ratios) });
    emit(
        &Table { columns, rows },
        &cfg,
        Some(summary),
        cfg.format,
        cfg.output.as_deref(),
    )
    .map_err(Failure::Io)
}

struct Check {
    name: &'static str,
    nominal: f64,
    run: fn() -> Result<f64, Error>,
}

fn max_over<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn check_wronskian() -> Result<f64, Error> {
    let xs = log_grid(1e-3, 50.0, 50)?;
    Ok(max_over(xs.into_iter().map(|x| {
        (x * (k0(x) * i1(x) + i0(x) * k1(x)) - 1.0).abs()
    })))
}

fn check_k0_reduction() -> Result<f64, Error> {
    let p = ModelParams::default();
    let mut worst: f64 = 0.0;
    for r in log_grid(0.5, 5.0, 10)? {
        worst = worst.max(((solve_point(&p, r)?.value - k0(r)) / k0(r)).abs());
    }
    Ok(worst)
}

fn check_de_integrals() -> Result<f64, Error> {
    let c = QuadratureConfig::default();
    Ok(max_over([
        (de_semiinfinite(|x| (-x).exp(), &c)?.value - 1.0).abs(),
        (de_semiinfinite(|x| 1.0 / (1.0 + x * x), &c)?.value - FRAC_PI_2).abs(),
        (de_finite(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &c)?.value - 2.0).abs(),
    ]))
}

fn check_oscillatory_j0() -> Result<f64, Error> {
    let c = QuadratureConfig::default();
    Ok((de_oscillatory(|_| 1.0, OscillatoryKind::BesselJ0, 1.0, &c)?.value - 1.0).abs())
}

fn check_wynn_leibniz() -> Result<f64, Error> {
    let t = PartialSumTable::from_terms((0..21).map(|k| (-1f64).powi(k) / (2.0 * k as f64 + 1.0)))?;
    Ok((wynn_epsilon(&t)? - FRAC_PI_4).abs())
}

fn check_partitioned_k0() -> Result<f64, Error> {
    let v = hankel_partitioned(|x| x / (x * x + 1.0), 1.0, &HankelConfig::default())?;
    Ok((v.value - k0(1.0)).abs())
}

fn check_full_vs_closed() -> Result<f64, Error> {
    let p = ModelParams::default();
    let mut worst: f64 = 0.0;
    for r in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
        worst = worst
            .max((solve_full(&p, r, Engine::Partitioned)?.value - solve_integer(&p, r)?).abs());
    }
    Ok(worst)
}

fn check_contour_vs_quadrature() -> Result<f64, Error> {
    let mut worst: f64 = 0.0;
    for a in [1.5, 1.8, 2.0] {
        let p = ModelParams::default().with_alpha(a / 2.0)?;
        for r in [1.0, 2.0] {
            let h = hfun_contour(a, 1.0, r, &ContourSpec::default_for(a)?)?.value;
            worst = worst.max((h - solve_point(&p, r)?.value).abs());
        }
    }
    Ok(worst)
}

fn check_contour_abscissa() -> Result<f64, Error> {
    let (a, r) = (1.8, 2.0);
    let (lo, hi) = kernel_strip(a)?;
    let at = |f: f64| {
        let spec = ContourSpec {
            c: lo + f * (hi - lo),
            ..ContourSpec::default()
        };
        hfun_contour(a, 1.0, r, &spec).map(|v| v.value)
    };
    Ok((at(0.2)? - at(0.8)?).abs())
}

fn check_mellin_k0() -> Result<f64, Error> {
    let c = mellin_kernel_c(Complex64::new(1.0, 0.0), 2.0, 1.0)?;
    Ok((c - FRAC_PI_2).norm())
}

fn check_tail_ratio() -> Result<f64, Error> {
    let p = ModelParams::default().with_alpha(0.995)?;
    let ratio = solve_point(&p, 100.0)?.value / asymptotic_tail(&p, 100.0)?;
    Ok((ratio - 1.0).abs())
}

const CHECKS: [Check; 11] = [
    Check {
        name: "wronskian",
        nominal: 1e-11,
        run: check_wronskian,
    },
    Check {
        name: "k0_reduction",
        nominal: 1e-8,
        run: check_k0_reduction,
    },
    Check {
        name: "de_integrals",
        nominal: 1e-12,
        run: check_de_integrals,
    },
    Check {
        name: "oscillatory_j0",
        nominal: 1e-9,
        run: check_oscillatory_j0,
    },
    Check {
        name: "wynn_leibniz",
        nominal: 1e-8,
        run: check_wynn_leibniz,
    },
    Check {
        name: "partitioned_k0",
        nominal: 1e-8,
        run: check_partitioned_k0,
    },
    Check {
        name: "full_vs_closed",
        nominal: 1e-6,
        run: check_full_vs_closed,
    },
    Check {
        name: "contour_vs_quadrature",
        nominal: 1e-4,
        run: check_contour_vs_quadrature,
    },
    Check {
        name: "contour_abscissa",
        nominal: 1e-6,
        run: check_contour_abscissa,
    },
    Check {
        name: "mellin_k0",
        nominal: 1e-12,
        run: check_mellin_k0,
    },
    Check {
        name: "tail_ratio",
        nominal: 0.1,
        run: check_tail_ratio,
    },
];

/// Runs every check; returns whether all passed.
pub fn cmd_selftest(tol: f64) -> Result<bool, Failure> {
    check_tol(tol)?;
    let scale = tol / 1e-6;
    let mut all = true;
    let mut report = String::new();
    for c in &CHECKS {
        let threshold = c.nominal * scale;
        let line = match (c.run)() {
            Ok(err) if err <= threshold => {
                format!("PASS {}: error {err:.3e} <= {threshold:.3e}", c.name)
            }
            Ok(err) => {
                all = false;
                format!("FAIL {}: error {err:.3e} > {threshold:.3e}", c.name)
            }
            Err(e) => {
                all = false;
                format!("FAIL {}: {e}", c.name)
            }
        };
        report.push_str(&line);
        report.push('\n');
    }
    report.push_str(if all {
        "selftest: all checks passed\n"
    } else {
        "selftest: failures\n"
    });
    // a closed pipe on the reader side is not a selftest failure
    let _ = std::io::stdout().lock().write_all(report.as_bytes());
    Ok(all)
}
