//! Radial steady-state profiles.
//!
//! With `a = 2α`, effective source `σ' = σ/D` and effective rate `q' = q/D`:
//!
//! * full solution: `c(r) = σ' L ∫₀^∞ J0(ρr) J1(ρL) / (ρ^a + q') dρ`;
//! * integer order (α = 1), `x = √q'`:
//!   `c = σ'/q' − (σ'L/x) K1(xL) I0(xr)` inside the source,
//!   `c = (σ'L/x) I1(xL) K0(xr)` outside;
//! * ring source of intensity `σ_r` at `r = L`:
//!   `σ_r ∫₀^∞ J0(ρr) J0(ρL) ρ / (ρ^a + q') dρ`;
//! * point source at the origin: `c_a(r) = σ' ∫₀^∞ J0(ρr) ρ / (ρ^a + q') dρ`;
//! * large-r tail of `c_a`, the first residue of its Mellin-Barnes integral:
//!   `σ' q'^{−2} Γ(1 + a/2)² 2^{1+a} sin(πa/2) / (π r^{a+2})`.
//!
//! The tail is written in `r` itself, with the `q` dependence carried by the
//! `q'^{−2}` factor; at `q' = 1` this coincides with the textbook form in
//! the H-function argument.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dequad::{QuadratureConfig, QuadratureResult};
use crate::error::{Error, Result};
use crate::hankel::{bessel_integral, BesselFactor, Engine};
use crate::mellin::{self, ContourSpec, Strategy};
use crate::specfun::{bessel_i, k0, k1, BesselOrder};

/// Ring calibration integrals smaller than this are rejected.
pub const CALIBRATION_FLOOR: f64 = 1e-14;

/// Physical parameters. `D` is folded into `σ` and `q` on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    sigma: f64,
    q: f64,
    d: f64,
    l: f64,
    alpha: f64,
    sigma_eff: f64,
    q_eff: f64,
}

impl ModelParams {
    pub fn new(sigma: f64, q: f64, d: f64, l: f64, alpha: f64) -> Result<Self> {
        let finite = [sigma, q, d, l, alpha].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("parameters must be finite".into()));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha = {alpha} outside (0, 1]")));
        }
        if sigma < 0.0 {
            return Err(Error::Domain(format!("sigma = {sigma} is negative")));
        }
        for (name, v) in [("q", q), ("D", d), ("L", l)] {
            if v <= 0.0 {
                return Err(Error::Domain(format!("{name} = {v} must be positive")));
            }
        }
        let (sigma_eff, q_eff) = if d == 1.0 {
            (sigma, q)
        } else {
            (sigma / d, q / d)
        };
        Ok(Self {
            sigma,
            q,
            d,
            l,
            alpha,
            sigma_eff,
            q_eff,
        })
    }

    /// Same parameters with a different fractional order.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.sigma, self.q, self.d, self.l, alpha)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(sigma, self.q, self.d, self.l, self.alpha)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn l(&self) -> f64 {
        self.l
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// `σ/D`.
    pub fn sigma_eff(&self) -> f64 {
        self.sigma_eff
    }
    /// `q/D`.
    pub fn q_eff(&self) -> f64 {
        self.q_eff
    }
    /// `a = 2α`.
    pub fn a(&self) -> f64 {
        2.0 * self.alpha
    }
    /// `β = 2α − 1`.
    pub fn beta(&self) -> f64 {
        2.0 * self.alpha - 1.0
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::new(1.0, 1.0, 1.0, 1.0, 1.0).expect("unit parameters are valid")
    }
}

/// Solution routes a profile can be computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    IntegerClosed,
    FullQuadrature,
    Ring,
    PointAsymptotic,
    TailAsymptotic,
    Hfun,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::IntegerClosed,
        Method::FullQuadrature,
        Method::Ring,
        Method::PointAsymptotic,
        Method::TailAsymptotic,
        Method::Hfun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::IntegerClosed => "integer_closed",
            Method::FullQuadrature => "full_quadrature",
            Method::Ring => "ring",
            Method::PointAsymptotic => "point_asymptotic",
            Method::TailAsymptotic => "tail_asymptotic",
            Method::Hfun => "hfun",
        }
    }

    /// Whether samples carry an error estimate.
    pub fn has_error_estimate(self) -> bool {
        !matches!(self, Method::IntegerClosed | Method::TailAsymptotic)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub r: f64,
    pub c: f64,
    pub err_est: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub method: Method,
    pub params: ModelParams,
    pub samples: Vec<Sample>,
}

/// Numerical settings shared by the quadrature-backed solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Engine for the two-factor integrals (full solution, ring, calibration).
    pub engine: Engine,
    /// Engine for the point-source integral.
    pub point_engine: Engine,
    pub quad: QuadratureConfig,
    /// Ring intensity; calibrated against the full solution when `None`.
    pub sigma_ring: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            engine: Engine::Partitioned,
            point_engine: Engine::Oscillatory,
            quad: QuadratureConfig::with_tolerances(1e-14, 1e-12),
            sigma_ring: None,
        }
    }
}

impl SolverConfig {
    /// Default settings with both quadrature tolerances set to `tol`.
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            quad: QuadratureConfig::with_tolerances(tol, tol),
            ..Self::default()
        }
    }
}

fn check_r(r: f64, strict: bool) -> Result<()> {
    let ok = r.is_finite() && if strict { r > 0.0 } else { r >= 0.0 };
    if ok {
        Ok(())
    } else if strict {
        Err(Error::Domain(format!("r = {r} must be positive")))
    } else {
        Err(Error::Domain(format!("r = {r} must be nonnegative")))
    }
}

/// Closed-form solution for α = 1. At `r = L` the mean of the one-sided
/// limits is returned.
pub fn solve_integer(params: &ModelParams, r: f64) -> Result<f64> {
    if params.alpha != 1.0 {
        return Err(Error::Usage(format!(
            "closed form needs alpha = 1, got {}",
            params.alpha
        )));
    }
    check_r(r, false)?;
    let (sigma, q, l) = (params.sigma_eff, params.q_eff, params.l);
    let x = q.sqrt();
    let inner = |r: f64| -> Result<f64> {
        Ok(sigma / q - sigma * l / x * k1(x * l) * bessel_i(BesselOrder::Zero, x * r)?)
    };
    let outer = |r: f64| -> Result<f64> {
        Ok(sigma * l / x * bessel_i(BesselOrder::One, x * l)? * k0(x * r))
    };
    if r < l {
        inner(r)
    } else if r > l {
        outer(r)
    } else {
        Ok(0.5 * (inner(r)? + outer(r)?))
    }
}

/// The full solution by quadrature.
pub fn solve_full(params: &ModelParams, r: f64, engine: Engine) -> Result<QuadratureResult> {
    solve_full_with(
        params,
        r,
        &SolverConfig {
            engine,
            ..SolverConfig::default()
        },
    )
}

pub fn solve_full_with(
    params: &ModelParams,
    r: f64,
    cfg: &SolverConfig,
) -> Result<QuadratureResult> {
    check_r(r, false)?;
    if params.sigma_eff == 0.0 {
        return Ok(QuadratureResult::exact(0.0));
    }
    let (a, q, l) = (params.a(), params.q_eff, params.l);
    let weight = move |rho: f64| 1.0 / (rho.powf(a) + q);
    let factors = [
        BesselFactor::new(BesselOrder::Zero, r),
        BesselFactor::new(BesselOrder::One, l),
    ];
    let res = bessel_integral(&weight, &factors, cfg.engine, &cfg.quad)?.require_converged()?;
    Ok(res.scaled(params.sigma_eff * l))
}

/// `∫₀^∞ J0(ρr) J0(ρL) ρ / (ρ^a + q') dρ`, divergent at `r = L` for α ≤ 1/2.
fn ring_integral(params: &ModelParams, r: f64, cfg: &SolverConfig) -> Result<QuadratureResult> {
    let (a, q, l) = (params.a(), params.q_eff, params.l);
    if r == l && params.alpha <= 0.5 {
        return Err(Error::Divergent(format!(
            "ring integral at r = L needs alpha > 1/2, got {}",
            params.alpha
        )));
    }
    let weight = move |rho: f64| rho / (rho.powf(a) + q);
    let factors = [
        BesselFactor::new(BesselOrder::Zero, r),
        BesselFactor::new(BesselOrder::Zero, l),
    ];
    bessel_integral(&weight, &factors, cfg.engine, &cfg.quad)?.require_converged()
}

/// Ring-source solution with intensity `sigma_ring` (in the effective units
/// of `σ/D`).
pub fn solve_ring(params: &ModelParams, sigma_ring: f64, r: f64) -> Result<QuadratureResult> {
    solve_ring_with(params, sigma_ring, r, &SolverConfig::default())
}

pub fn solve_ring_with(
    params: &ModelParams,
    sigma_ring: f64,
    r: f64,
    cfg: &SolverConfig,
) -> Result<QuadratureResult> {
    check_r(r, true)?;
    if sigma_ring == 0.0 {
        return Ok(QuadratureResult::exact(0.0));
    }
    Ok(ring_integral(params, r, cfg)?.scaled(sigma_ring))
}

/// Ring intensity that makes the ring solution equal the full solution at
/// `r = L`: `σ' L I1 / I2` with `I1 = ∫ J0(ρL) J1(ρL)/(ρ^a + q') dρ` and
/// `I2 = ∫ J0(ρL)² ρ/(ρ^a + q') dρ`.
pub fn calibrate_ring(params: &ModelParams) -> Result<f64> {
    calibrate_ring_with(params, &SolverConfig::default())
}

pub fn calibrate_ring_with(params: &ModelParams, cfg: &SolverConfig) -> Result<f64> {
    if params.sigma_eff == 0.0 {
        return Ok(0.0);
    }
    let i2 = ring_integral(params, params.l, cfg)?.value;
    if i2.abs() < CALIBRATION_FLOOR {
        return Err(Error::DegenerateCalibration(i2));
    }
    let full = solve_full_with(params, params.l, cfg)?.value;
    Ok(full / i2)
}

/// Point-source solution `c_a(r)`; diverges at `r = 0` and for α ≤ 1/4.
pub fn solve_point(params: &ModelParams, r: f64) -> Result<QuadratureResult> {
    solve_point_with(params, r, &SolverConfig::default())
}

pub fn solve_point_with(
    params: &ModelParams,
    r: f64,
    cfg: &SolverConfig,
) -> Result<QuadratureResult> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "point-source solution diverges at r = 0; need r > 0, got {r}"
        )));
    }
    if params.alpha <= 0.25 {
        return Err(Error::Divergent(format!(
            "point-source integral needs alpha > 1/4, got {}",
            params.alpha
        )));
    }
    if params.sigma_eff == 0.0 {
        return Ok(QuadratureResult::exact(0.0));
    }
    let (a, q) = (params.a(), params.q_eff);
    let weight = move |rho: f64| rho / (rho.powf(a) + q);
    let factors = [BesselFactor::new(BesselOrder::Zero, r)];
    let res =
        bessel_integral(&weight, &factors, cfg.point_engine, &cfg.quad)?.require_converged()?;
    Ok(res.scaled(params.sigma_eff))
}

/// Leading algebraic term of the point-source solution for large `r`.
/// Needs `1 < a ≤ 2`; exactly zero at `a = 2`, where the decay is
/// exponential.
pub fn asymptotic_tail(params: &ModelParams, r: f64) -> Result<f64> {
    check_r(r, true)?;
    let a = params.a();
    if !(a > 1.0 && a <= 2.0) {
        return Err(Error::Domain(format!(
            "algebraic tail needs 1 < a <= 2, got a = {a}"
        )));
    }
    Ok(params.sigma_eff * mellin::residue_term(a, params.q_eff, r, 1)?)
}

/// Point-source solution through its H-function contour integral.
pub fn solve_hfun(params: &ModelParams, r: f64) -> Result<mellin::ContourResult> {
    check_r(r, true)?;
    let a = params.a();
    let spec = ContourSpec::default_for(a)?;
    let res = mellin::hfun_contour(a, params.q_eff, r, &spec)?;
    let s = params.sigma_eff;
    Ok(mellin::ContourResult {
        value: s * res.value,
        err_est: s * res.err_est,
        ..res
    })
}

/// Same as [`solve_hfun`] but with an explicit strategy, value only.
pub fn solve_hfun_strategy(params: &ModelParams, r: f64, strategy: &Strategy) -> Result<f64> {
    check_r(r, true)?;
    Ok(params.sigma_eff * mellin::hfun_point_solution(params.a(), params.q_eff, r, strategy)?)
}

/// `points` log-spaced radii from `r_min` to `r_max` inclusive.
pub fn log_grid(r_min: f64, r_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(Error::Usage(format!(
            "grid needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    if points < 2 {
        return Err(Error::Usage(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    let (lo, hi) = (r_min.ln(), r_max.ln());
    let step = (hi - lo) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| (lo + step * i as f64).exp()).collect();
    grid[0] = r_min;
    grid[points - 1] = r_max;
    Ok(grid)
}

/// Default grid: 200 points from `0.05 L` to `20 L`.
pub fn default_grid(params: &ModelParams) -> Vec<f64> {
    log_grid(0.05 * params.l, 20.0 * params.l, 200).expect("default grid is valid")
}

/// One sample of `method` at `r`. `sigma_ring` is used by [`Method::Ring`].
pub fn evaluate(
    method: Method,
    params: &ModelParams,
    r: f64,
    sigma_ring: f64,
    cfg: &SolverConfig,
) -> Result<Sample> {
    let quad = |q: QuadratureResult| Sample {
        r,
        c: q.value,
        err_est: Some(q.err_est),
    };
    Ok(match method {
        Method::IntegerClosed => Sample {
            r,
            c: solve_integer(params, r)?,
            err_est: None,
        },
        Method::FullQuadrature => quad(solve_full_with(params, r, cfg)?),
        Method::Ring => quad(solve_ring_with(params, sigma_ring, r, cfg)?),
        Method::PointAsymptotic => quad(solve_point_with(params, r, cfg)?),
        Method::TailAsymptotic => Sample {
            r,
            c: asymptotic_tail(params, r)?,
            err_est: None,
        },
        Method::Hfun => {
            let h = solve_hfun(params, r)?;
            Sample {
                r,
                c: h.value,
                err_est: Some(h.err_est),
            }
        }
    })
}

/// Evaluates `method` over `grid` (strictly increasing). Samples are
/// computed in parallel on the current rayon pool and returned in grid
/// order; the first failure in grid order is reported.
pub fn profile(
    method: Method,
    params: &ModelParams,
    grid: &[f64],
    cfg: &SolverConfig,
) -> Result<RadialProfile> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Usage("grid must be strictly increasing".into()));
    }
    let sigma_ring = match (method, cfg.sigma_ring) {
        (Method::Ring, Some(s)) => s,
        (Method::Ring, None) => calibrate_ring_with(params, cfg).map_err(|e| Error::Sample {
            r: params.l,
            method: "ring calibration".into(),
            source: Box::new(e),
        })?,
        _ => 0.0,
    };
    let results: Vec<Result<Sample>> = grid
        .par_iter()
        .map(|&r| {
            evaluate(method, params, r, sigma_ring, cfg).map_err(|e| Error::Sample {
                r,
                method: method.name().into(),
                source: Box::new(e),
            })
        })
        .collect();
    let samples = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RadialProfile {
        method,
        params: *params,
        samples,
    })
}
