//! Hankel-type integrals `∫₀^∞ W(ρ) J_ν(ρz) [J_μ(ρs)] dρ`.
//!
//! [`hankel_partitioned`] splits the axis at the McMahon zeros of `J_ν(ρz)`,
//! integrates each piece with the tanh-sinh rule and accelerates the partial
//! sums with [`wynn_epsilon`]. [`bessel_integral`] is the general driver used
//! by the solution layer and offers three engines, see [`Engine`].

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::dequad::{
    de_finite, de_fourier, de_semiinfinite, node_offset_for, ooura, QuadratureConfig,
    QuadratureResult,
};
use crate::error::{Error, Result};
use crate::specfun::{self, bessel_j_zero, hankel_amplitudes, BesselOrder, ASYMPTOTIC_THRESHOLD};

/// Cumulative partial sums of a series, oldest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSumTable {
    sums: Vec<f64>,
}

impl PartialSumTable {
    pub fn new(sums: Vec<f64>) -> Result<Self> {
        if sums.is_empty() {
            return Err(Error::Usage(
                "a partial-sum table needs at least one entry".into(),
            ));
        }
        Ok(Self { sums })
    }

    /// Builds the table from the individual terms of a series.
    pub fn from_terms(terms: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut acc = 0.0;
        Self::new(
            terms
                .into_iter()
                .map(|t| {
                    acc += t;
                    acc
                })
                .collect(),
        )
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn count(&self) -> usize {
        self.sums.len()
    }

    pub fn last(&self) -> f64 {
        self.sums[self.sums.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HankelConfig {
    pub n_intervals: usize,
    pub nu: BesselOrder,
    pub inner_cfg: QuadratureConfig,
    pub accelerate: bool,
}

impl Default for HankelConfig {
    fn default() -> Self {
        Self {
            n_intervals: 15,
            nu: BesselOrder::Zero,
            inner_cfg: QuadratureConfig::default(),
            accelerate: true,
        }
    }
}

/// Wynn's ε-algorithm. Returns the deepest even-column entry whose distance
/// to the previous even-column estimate has not grown by 10× or more.
///
/// Lozenges whose denominator vanishes (below 1e-300, or at the rounding
/// level of the entries) are frozen: the entry is treated as infinite, so
/// its reciprocal is zero and the lower-order entry propagates.
pub fn wynn_epsilon(table: &PartialSumTable) -> Result<f64> {
    let n = table.count();
    if n < 3 {
        return Err(Error::Usage(format!(
            "the ε-algorithm needs at least 3 partial sums, got {n}"
        )));
    }
    // None stands for an infinite entry.
    let mut prev: Vec<Option<f64>> = vec![Some(0.0); n + 1]; // ε_{-1}
    let mut cur: Vec<Option<f64>> = table.sums.iter().copied().map(Some).collect(); // ε_0
    let mut estimates = vec![table.last()];
    for k in 0..n - 1 {
        let next: Vec<Option<f64>> = (0..cur.len() - 1)
            .map(|i| {
                let inv = match (cur[i + 1], cur[i]) {
                    (Some(a), Some(b)) => {
                        let d = a - b;
                        if d.abs() < 1e-300 || d.abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs())
                        {
                            None
                        } else {
                            Some(1.0 / d)
                        }
                    }
                    _ => Some(0.0),
                };
                match (prev[i + 1], inv) {
                    (Some(p), Some(v)) => Some(p + v),
                    _ => None,
                }
            })
            .collect();
        prev = cur;
        cur = next;
        // k + 1 is the index of the column just built
        if (k + 1) % 2 == 0 {
            if let Some(Some(v)) = cur.last() {
                if v.is_finite() {
                    estimates.push(*v);
                }
            }
        }
        if cur.len() < 2 {
            break;
        }
    }

    let mut best = estimates[0];
    let mut last_diff: Option<f64> = None;
    for w in estimates.windows(2) {
        let d = (w[1] - w[0]).abs();
        if let Some(ld) = last_diff {
            let noise = 4.0 * f64::EPSILON * w[1].abs();
            if d >= 10.0 * ld && d > noise {
                break;
            }
        }
        best = w[1];
        last_diff = Some(d);
    }
    Ok(best)
}

/// Error bound reported by the partition method: the magnitude of the last
/// sub-integral.
pub fn tail_estimate(last_interval_value: f64) -> f64 {
    last_interval_value.abs()
}

/// `∫₀^∞ F(ρ) J_ν(ρz) dρ` by integration between the zeros `r_ν(k)/z`
/// (with `r_ν(0) = 0`), summing `n_intervals` pieces. Any `ρ` weight belongs
/// inside `F`.
pub fn hankel_partitioned(
    f: impl Fn(f64) -> f64,
    z: f64,
    cfg: &HankelConfig,
) -> Result<QuadratureResult> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!(
            "transform argument must be positive, got {z}"
        )));
    }
    if cfg.n_intervals < 2 {
        return Err(Error::Usage("n_intervals must be at least 2".into()));
    }
    let mut points = vec![0.0];
    for k in 1..=cfg.n_intervals {
        points.push(bessel_j_zero(cfg.nu, k as u32, true)?.value / z);
    }
    let integrand = |rho: f64| {
        let fx = f(rho);
        if fx == 0.0 {
            0.0
        } else {
            fx * bessel_j_order(cfg.nu, rho * z)
        }
    };

    let mut terms = Vec::with_capacity(cfg.n_intervals);
    let mut nodes = 0;
    for (index, w) in points.windows(2).enumerate() {
        let piece = de_finite(integrand, w[0], w[1], &cfg.inner_cfg)
            .and_then(QuadratureResult::require_converged)
            .map_err(|e| Error::Interval {
                index,
                source: Box::new(e),
            })?;
        nodes += piece.nodes_used;
        terms.push(piece.value);
    }
    let table = PartialSumTable::from_terms(terms.iter().copied())?;
    let value = if cfg.accelerate {
        wynn_epsilon(&table)?
    } else {
        table.last()
    };
    Ok(QuadratureResult {
        value,
        err_est: tail_estimate(terms[terms.len() - 1]),
        nodes_used: nodes,
        converged: true,
        discrepancies: Vec::new(),
    })
}

fn bessel_j_order(order: BesselOrder, x: f64) -> f64 {
    match order {
        BesselOrder::Zero => specfun::j0(x),
        BesselOrder::One => specfun::j1(x),
    }
}

/// One Bessel factor `J_ν(ρ·scale)` of an integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselFactor {
    pub order: BesselOrder,
    pub scale: f64,
}

impl BesselFactor {
    pub fn new(order: BesselOrder, scale: f64) -> Self {
        Self { order, scale }
    }

    fn eval(&self, rho: f64) -> f64 {
        bessel_j_order(self.order, rho * self.scale)
    }
}

/// Quadrature strategy for [`bessel_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Tanh-sinh between zeros of the faster factor up to a point where every
    /// factor is in its asymptotic regime; beyond it the Bessel factors are
    /// replaced by their amplitude-phase forms and each resulting Fourier
    /// integral is done with the Ooura map.
    #[default]
    Partitioned,
    /// Ooura map locked onto the zeros of the faster factor; any second
    /// factor rides along in the amplitude.
    Oscillatory,
    /// [`hankel_partitioned`] on the first factor with 15 intervals and Wynn
    /// acceleration; a second factor rides along in `F`.
    Accelerated,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partitioned" => Ok(Engine::Partitioned),
            "oscillatory" => Ok(Engine::Oscillatory),
            "accelerated" => Ok(Engine::Accelerated),
            _ => Err(Error::Usage(format!("unknown engine '{s}'"))),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::Partitioned => "partitioned",
            Engine::Oscillatory => "oscillatory",
            Engine::Accelerated => "accelerated",
        })
    }
}

/// Minimum number of zero intervals before the asymptotic tail takes over.
const MIN_INTERVALS: u32 = 15;
/// Above this frequency ratio the slower factor rides in the amplitude of
/// the Ooura tail instead of being expanded.
const RIDE_RATIO: f64 = 20.0;

/// `∫₀^∞ W(ρ) ∏ J_{ν_i}(ρ s_i) dρ` for one or two Bessel factors and a
/// smooth, non-oscillatory, decaying weight `W`.
pub fn bessel_integral(
    weight: &dyn Fn(f64) -> f64,
    factors: &[BesselFactor],
    engine: Engine,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    if factors.is_empty() || factors.len() > 2 {
        return Err(Error::Usage(
            "one or two Bessel factors are supported".into(),
        ));
    }
    let mut live = Vec::with_capacity(2);
    for f in factors {
        if !(f.scale >= 0.0 && f.scale.is_finite()) {
            return Err(Error::Domain(format!(
                "Bessel scale must be nonnegative, got {}",
                f.scale
            )));
        }
        if f.scale == 0.0 {
            match f.order {
                BesselOrder::Zero => continue, // J0(0) = 1
                BesselOrder::One => return Ok(QuadratureResult::exact(0.0)),
            }
        }
        live.push(*f);
    }
    if live.is_empty() {
        return Err(Error::Usage(
            "at least one oscillatory factor is required".into(),
        ));
    }
    match engine {
        Engine::Partitioned => partitioned_with_tail(weight, &live, cfg),
        Engine::Oscillatory => locked_ooura(weight, &live, cfg),
        Engine::Accelerated => {
            let kernel = live[0];
            let rider = live.get(1).copied();
            let f = |rho: f64| {
                let w = weight(rho);
                match rider {
                    Some(r) if w != 0.0 => w * r.eval(rho),
                    _ => w,
                }
            };
            let hcfg = HankelConfig {
                nu: kernel.order,
                inner_cfg: *cfg,
                ..HankelConfig::default()
            };
            hankel_partitioned(f, kernel.scale, &hcfg)
        }
    }
}

/// (fast, slow) ordering of the live factors.
fn split(live: &[BesselFactor]) -> (BesselFactor, Option<BesselFactor>) {
    match live {
        [a] => (*a, None),
        [a, b] if a.scale >= b.scale => (*a, Some(*b)),
        [a, b] => (*b, Some(*a)),
        _ => unreachable!("caller checks the factor count"),
    }
}

fn locked_ooura(
    weight: &dyn Fn(f64) -> f64,
    live: &[BesselFactor],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let (fast, slow) = split(live);
    let mut f = |rho: f64| {
        let k = fast.eval(rho);
        if k == 0.0 {
            return 0.0;
        }
        let w = weight(rho) * k;
        match slow {
            Some(s) => w * s.eval(rho),
            None => w,
        }
    };
    ooura(&mut f, fast.scale, node_offset_for(fast.order), cfg)
}

fn partitioned_with_tail(
    weight: &dyn Fn(f64) -> f64,
    live: &[BesselFactor],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let (fast, slow) = split(live);
    let ride = slow.is_some_and(|s| fast.scale > RIDE_RATIO * s.scale);
    let asym_start = match slow {
        Some(s) if !ride => ASYMPTOTIC_THRESHOLD / s.scale,
        _ => ASYMPTOTIC_THRESHOLD / fast.scale,
    };

    // Partition points: 0 and the zeros of the fast factor up to the tail start.
    let mut points = vec![0.0];
    let mut k = 1u32;
    loop {
        let z = bessel_j_zero(fast.order, k, true)?.value / fast.scale;
        points.push(z);
        if k >= MIN_INTERVALS && z >= asym_start {
            break;
        }
        k += 1;
    }
    let tail_start = points[points.len() - 1];

    let full = |rho: f64| {
        let w = weight(rho);
        if w == 0.0 {
            return 0.0;
        }
        let mut v = w * fast.eval(rho);
        if let Some(s) = slow {
            v *= s.eval(rho);
        }
        v
    };

    let mut total = Accumulator::default();
    for (index, w) in points.windows(2).enumerate() {
        let piece = de_finite(full, w[0], w[1], cfg).map_err(|e| Error::Interval {
            index,
            source: Box::new(e),
        })?;
        total.add(&piece);
    }

    if ride {
        // Ooura locked on the fast factor over [A, ∞) with the slow one in g.
        let offset = node_offset_for(fast.order) - fast.scale * tail_start / PI;
        let mut f = |y: f64| full(tail_start + y);
        total.add(&ooura(&mut f, fast.scale, offset, cfg)?);
    } else {
        for comp in tail_components(fast, slow) {
            total.add(&fourier_tail(weight, &comp, tail_start, cfg)?);
        }
    }
    Ok(total.finish())
}

#[derive(Default)]
struct Accumulator {
    value: f64,
    err: f64,
    nodes: usize,
    converged: bool,
    started: bool,
}

impl Accumulator {
    fn add(&mut self, r: &QuadratureResult) {
        if !self.started {
            self.converged = true;
            self.started = true;
        }
        self.value += r.value;
        self.err += r.err_est;
        self.nodes += r.nodes_used;
        self.converged &= r.converged;
    }

    fn finish(self) -> QuadratureResult {
        QuadratureResult {
            value: self.value,
            err_est: self.err,
            nodes_used: self.nodes,
            converged: self.converged,
            discrepancies: Vec::new(),
        }
    }
}

/// Amplitude combination of the Hankel amplitudes `(P, Q)` of each factor.
#[derive(Debug, Clone, Copy)]
enum Amp {
    /// single factor: P or Q
    P,
    Q,
    /// product: ½(P₁P₂ + Q₁Q₂), ½(P₁Q₂ − Q₁P₂), ½(P₁P₂ − Q₁Q₂), ½(P₁Q₂ + Q₁P₂)
    DiffCos,
    DiffSin,
    SumCos,
    SumSin,
}

/// `amp(ρ) · cos(ωρ + θ)` piece of the asymptotic integrand.
struct TailComponent {
    fast: BesselFactor,
    slow: Option<BesselFactor>,
    amp: Amp,
    omega: f64,
    theta: f64,
}

fn tail_components(fast: BesselFactor, slow: Option<BesselFactor>) -> Vec<TailComponent> {
    let pf = specfun::phase_offset(fast.order);
    let mk = |amp, omega: f64, theta: f64| {
        // cos is even: keep ω ≥ 0
        let (omega, theta) = if omega < 0.0 {
            (-omega, -theta)
        } else {
            (omega, theta)
        };
        TailComponent {
            fast,
            slow,
            amp,
            omega,
            theta,
        }
    };
    match slow {
        None => vec![
            // P cos χ − Q sin χ = P cos χ + Q cos(χ + π/2)
            mk(Amp::P, fast.scale, -pf),
            mk(Amp::Q, fast.scale, -pf + FRAC_PI_2),
        ],
        Some(s) => {
            let ps = specfun::phase_offset(s.order);
            let (wd, td) = (fast.scale - s.scale, -(pf - ps));
            let (wsum, tsum) = (fast.scale + s.scale, -(pf + ps));
            // sin u = cos(u − π/2), −sin u = cos(u + π/2); the sign of the
            // difference-phase sine must survive the ω ≥ 0 normalisation, so
            // it is attached before normalising.
            vec![
                mk(Amp::DiffCos, wd, td),
                mk(Amp::DiffSin, wd, td - FRAC_PI_2),
                mk(Amp::SumCos, wsum, tsum),
                mk(Amp::SumSin, wsum, tsum + FRAC_PI_2),
            ]
        }
    }
}

impl TailComponent {
    fn amplitude(&self, weight: &dyn Fn(f64) -> f64, rho: f64) -> f64 {
        let w = weight(rho);
        if w == 0.0 {
            return 0.0;
        }
        let (p1, q1) = hankel_amplitudes(self.fast.order, rho * self.fast.scale);
        match self.slow {
            None => {
                let env = (2.0 / (PI * rho * self.fast.scale)).sqrt();
                let a = match self.amp {
                    Amp::P => p1,
                    _ => q1,
                };
                w * env * a
            }
            Some(s) => {
                let (p2, q2) = hankel_amplitudes(s.order, rho * s.scale);
                let env = 2.0 / (PI * rho * (self.fast.scale * s.scale).sqrt());
                let a = match self.amp {
                    Amp::DiffCos => 0.5 * (p1 * p2 + q1 * q2),
                    Amp::DiffSin => 0.5 * (p1 * q2 - q1 * p2),
                    Amp::SumCos => 0.5 * (p1 * p2 - q1 * q2),
                    Amp::SumSin => 0.5 * (p1 * q2 + q1 * p2),
                    Amp::P | Amp::Q => unreachable!("single-factor amplitude on a product"),
                };
                w * env * a
            }
        }
    }
}

/// `∫_A^∞ amp(ρ) cos(ωρ + θ) dρ`.
fn fourier_tail(
    weight: &dyn Fn(f64) -> f64,
    comp: &TailComponent,
    start: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let g = |y: f64| comp.amplitude(weight, start + y);
    if comp.omega <= 1e-14 * comp.fast.scale {
        let c = comp.theta.cos();
        return Ok(de_semiinfinite(g, cfg)?.scaled(c));
    }
    let phase = (comp.omega * start + comp.theta).rem_euclid(2.0 * PI);
    de_fourier(g, comp.omega, phase, cfg)
}
