//! Double-exponential (DE) quadrature.
//!
//! * [`de_finite`]: tanh-sinh on `[a, b]`;
//! * [`de_semiinfinite`]: exp-sinh on `(0, ∞)`, `x = exp((π/2) sinh t)`;
//! * [`de_oscillatory`] / [`de_fourier`]: Ooura's map
//!   `x = M φ(t)/ω`, `φ(t) = t / (1 − exp(−6 sinh t))`, `M = π/h`, for
//!   integrands carrying a Bessel or trigonometric factor.
//!
//! All engines refine by halving the mesh `h` until two successive levels
//! agree within `max(abs_tol, rel_tol·|value|)`. The absolute tolerance is
//! floored at the rounding level of the sum (a small multiple of machine
//! epsilon times `Σ|terms|`), below which successive levels cannot agree any
//! better.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, BesselOrder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Initial mesh width.
    pub h0: f64,
    /// Number of times `h` may be halved.
    pub max_levels: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on integrand evaluations for one run.
    pub max_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            h0: 0.25,
            max_levels: 10,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_nodes: 200_000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return Err(Error::Usage(format!(
                "h0 must be positive, got {}",
                self.h0
            )));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Usage("tolerances must be positive".into()));
        }
        if self.max_levels < 1 {
            return Err(Error::Usage("max_levels must be at least 1".into()));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64, floor: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs()).max(floor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub err_est: f64,
    pub nodes_used: usize,
    pub converged: bool,
    /// Inter-level differences `|S_j − S_{j−1}|`, clamped below at the
    /// rounding floor of the sum.
    pub discrepancies: Vec<f64>,
}

impl QuadratureResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            err_est: 0.0,
            nodes_used: 0,
            converged: true,
            discrepancies: Vec::new(),
        }
    }

    /// Turns a non-converged result into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                value: self.value,
                err_est: self.err_est,
            })
        }
    }

    /// `self · factor`, with the error estimate scaled alike.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.value *= factor;
        self.err_est *= factor.abs();
        for d in &mut self.discrepancies {
            *d *= factor.abs();
        }
        self
    }
}

/// Oscillatory factor of [`de_oscillatory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OscillatoryKind {
    BesselJ0,
    BesselJ1,
    Sin,
    Cos,
}

impl OscillatoryKind {
    fn eval(self, x: f64) -> f64 {
        match self {
            OscillatoryKind::BesselJ0 => specfun::j0(x),
            OscillatoryKind::BesselJ1 => specfun::j1(x),
            OscillatoryKind::Sin => x.sin(),
            OscillatoryKind::Cos => x.cos(),
        }
    }

    /// Offset `δ ∈ [0, 1)` such that the large-argument zeros of the kernel
    /// sit at `π(k + δ)`.
    fn node_offset(self) -> f64 {
        match self {
            OscillatoryKind::BesselJ0 => node_offset_for(BesselOrder::Zero),
            OscillatoryKind::BesselJ1 => node_offset_for(BesselOrder::One),
            OscillatoryKind::Sin => 0.0,
            OscillatoryKind::Cos => 0.5,
        }
    }
}

/// Node offset locking Ooura nodes to the asymptotic zeros of `J_ν`
/// (`x − phase_offset = π/2 + nπ`).
pub fn node_offset_for(order: BesselOrder) -> f64 {
    cos_node_offset(-specfun::phase_offset(order))
}

/// Node offset for the zeros of `cos(x + θ)`.
pub fn cos_node_offset(theta: f64) -> f64 {
    (0.5 - theta / PI).rem_euclid(1.0)
}

/// Multiple of machine epsilon times `Σ|terms|` treated as rounding noise.
const NOISE_FACTOR: f64 = 16.0 * f64::EPSILON;
/// Terms below `tolerance · 2⁻⁶` count as negligible for truncation.
const TRUNCATION_FACTOR: f64 = 1.0 / 64.0;
const FINITE_T_CAP: f64 = 6.5;
const SEMI_INFINITE_T_CAP: f64 = 6.7;
/// Minimum stretch of `t` over which terms must stay negligible before a
/// side is truncated, so an isolated zero of the integrand cannot end it.
const MIN_SMALL_SPAN: f64 = 0.25;

/// Walks nodes outward on one side of `t = 0` and accumulates `f(x)·w`.
struct SideSum {
    sum: f64,
    abs_sum: f64,
    nodes: usize,
    /// Largest `|t|` evaluated.
    extent: f64,
}

/// Evaluates one side of a DE level. `node(t)` returns `(x, w)` or `None`
/// when the node has left the representable range. Stepping stops after two
/// consecutive negligible contributions beyond `min_extent` (the reach of
/// coarser levels, so every level covers the same range), or at `t_cap`.
#[allow(clippy::too_many_arguments)]
fn walk_side(
    f: &mut dyn FnMut(f64) -> f64,
    node: &dyn Fn(f64) -> Option<(f64, f64)>,
    ts: impl Iterator<Item = f64>,
    t_cap: f64,
    min_extent: f64,
    negligible: f64,
    h: f64,
    budget: &mut usize,
) -> Result<SideSum> {
    let mut out = SideSum {
        sum: 0.0,
        abs_sum: 0.0,
        nodes: 0,
        extent: 0.0,
    };
    let mut small_run = 0;
    let mut prev: [Option<f64>; 2] = [None, None];
    for t in ts {
        if t.abs() > t_cap || *budget == 0 {
            break;
        }
        let Some((x, w)) = node(t) else { break };
        *budget -= 1;
        out.nodes += 1;
        out.extent = t.abs();
        let fx = f(x);
        if !fx.is_finite() {
            // Tolerated only as an endpoint limit: the last two terms on this
            // side must be finite and shrinking.
            match prev {
                [Some(a), Some(b)] if b.abs() <= a.abs() => break,
                _ => return Err(Error::Evaluation { x }),
            }
        }
        let term = fx * w;
        out.sum += term;
        out.abs_sum += term.abs();
        let shrinking = prev[1].is_none_or(|p| term.abs() <= p.abs());
        prev = [prev[1], Some(term)];
        // Terms may grow again further out (mass concentrated far from
        // t = 0), so only a negligible and shrinking run ends the walk.
        if (term * h).abs() < negligible && shrinking && t.abs() > min_extent {
            small_run += 1;
            if small_run >= 2 && small_run as f64 * h >= MIN_SMALL_SPAN {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    Ok(out)
}

/// Shared level loop for the tanh-sinh and exp-sinh rules, with node reuse:
/// level `j` adds the odd multiples of `h_j = h0/2^j`.
fn de_levels(
    f: &mut dyn FnMut(f64) -> f64,
    node: &dyn Fn(f64) -> Option<(f64, f64)>,
    t_cap: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    let mut budget = cfg.max_nodes;
    let mut raw = 0.0; // Σ f·w over all nodes so far
    let mut abs_raw = 0.0;
    let mut nodes_used = 0;
    let mut estimate = 0.0;
    let mut prev_estimate: Option<f64> = None;
    let mut discrepancies = Vec::new();
    let mut converged = false;
    let mut err_est = f64::INFINITY;
    let (mut reach_right, mut reach_left) = (0.0f64, 0.0f64);

    for level in 0..=cfg.max_levels {
        let h = cfg.h0 / f64::from(1u32 << level.min(30));
        let negligible = TRUNCATION_FACTOR * cfg.tolerance(estimate, 0.0);
        let (first, stride) = if level == 0 { (0.0, h) } else { (h, 2.0 * h) };
        let right = walk_side(
            f,
            node,
            (0..).map(|k| first + k as f64 * stride),
            t_cap,
            reach_right,
            negligible,
            h,
            &mut budget,
        )?;
        let left_start = if level == 0 { h } else { first };
        let left = walk_side(
            f,
            node,
            (0..).map(|k| -(left_start + k as f64 * stride)),
            t_cap,
            reach_left,
            negligible,
            h,
            &mut budget,
        )?;
        reach_right = reach_right.max(right.extent);
        reach_left = reach_left.max(left.extent);
        raw += right.sum + left.sum;
        abs_raw += right.abs_sum + left.abs_sum;
        nodes_used += right.nodes + left.nodes;
        estimate = h * raw;
        let floor = NOISE_FACTOR * h * abs_raw;

        if let Some(p) = prev_estimate {
            let d = (estimate - p).abs().max(floor);
            discrepancies.push(d);
            err_est = d;
            if level >= 2 && d <= cfg.tolerance(estimate, floor) && monotone_tail(&discrepancies) {
                converged = true;
                break;
            }
        }
        prev_estimate = Some(estimate);
        if budget == 0 {
            break;
        }
    }
    Ok(QuadratureResult {
        value: estimate,
        err_est,
        nodes_used,
        converged,
        discrepancies,
    })
}

fn monotone_tail(d: &[f64]) -> bool {
    match d {
        [.., a, b] => b <= a,
        _ => true,
    }
}

/// `∫_a^b f(x) dx` by the tanh-sinh rule. Endpoint singularities that are
/// integrable are handled; the integrand is never evaluated at `a` or `b`
/// exactly unless the node spacing underflows, in which case that side stops.
pub fn de_finite(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Domain(format!(
            "de_finite needs finite a < b, got [{a}, {b}]"
        )));
    }
    let half = 0.5 * (b - a);
    let node = move |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        // distance from the nearer endpoint, computed without cancellation
        let e = (-2.0 * u.abs()).exp();
        let d = (b - a) * e / (1.0 + e);
        let c = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (c * c);
        let x = if t >= 0.0 { b - d } else { a + d };
        if (t >= 0.0 && x >= b) || (t < 0.0 && x <= a) || w == 0.0 {
            None
        } else {
            Some((x, w))
        }
    };
    de_levels(&mut f, &node, FINITE_T_CAP, cfg)
}

/// `∫₀^∞ f(x) dx` by the exp-sinh rule `x = exp((π/2) sinh t)`.
pub fn de_semiinfinite(
    mut f: impl FnMut(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let node = |t: f64| {
        let x = (FRAC_PI_2 * t.sinh()).exp();
        let w = x * FRAC_PI_2 * t.cosh();
        if x == 0.0 || !x.is_finite() || !w.is_finite() {
            None
        } else {
            Some((x, w))
        }
    };
    de_levels(&mut f, &node, SEMI_INFINITE_T_CAP, cfg)
}

/// `∫₀^∞ g(x)·K(ωx) dx` for `K` one of J0, J1, sin, cos, using the Ooura map
/// with nodes locked onto the asymptotic zeros of `K(ωx)`.
pub fn de_oscillatory(
    mut g: impl FnMut(f64) -> f64,
    kind: OscillatoryKind,
    omega: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let mut f = |x: f64| {
        let k = kind.eval(omega * x);
        if k == 0.0 {
            0.0
        } else {
            g(x) * k
        }
    };
    ooura(&mut f, omega, kind.node_offset(), cfg)
}

/// `∫₀^∞ g(x)·cos(ωx + θ) dx` by the Ooura map.
pub fn de_fourier(
    mut g: impl FnMut(f64) -> f64,
    omega: f64,
    theta: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let mut f = |x: f64| g(x) * (omega * x + theta).cos();
    ooura(&mut f, omega, cos_node_offset(theta), cfg)
}

/// `∫₀^∞ f(x) dx` where `f` oscillates like a function with zeros at
/// `ωx ≈ π(k + offset)` for large `x`. The caller supplies the whole
/// integrand; only the node placement depends on `omega` and `offset`.
pub fn ooura(
    f: &mut dyn FnMut(f64) -> f64,
    omega: f64,
    offset: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!(
            "oscillation frequency must be positive, got {omega}"
        )));
    }
    let offset = offset.rem_euclid(1.0);
    let mut budget = cfg.max_nodes;
    let mut nodes_used = 0;
    let mut prev: Option<f64> = None;
    let mut discrepancies = Vec::new();
    let mut estimate = 0.0;
    let mut err_est = f64::INFINITY;
    let mut converged = false;

    for level in 0..=cfg.max_levels {
        let h = cfg.h0 / f64::from(1u32 << level.min(30));
        let negligible = TRUNCATION_FACTOR * cfg.tolerance(estimate, 0.0);
        let level_sum = ooura_level(f, omega, offset, h, negligible, &mut budget)?;
        nodes_used += level_sum.nodes;
        estimate = level_sum.value;
        let floor = NOISE_FACTOR * level_sum.abs_sum;
        if let Some(p) = prev {
            let d = (estimate - p).abs().max(floor);
            discrepancies.push(d);
            err_est = d;
            if level >= 2 && d <= cfg.tolerance(estimate, floor) && monotone_tail(&discrepancies) {
                converged = true;
                break;
            }
        }
        prev = Some(estimate);
        if budget == 0 {
            break;
        }
    }
    Ok(QuadratureResult {
        value: estimate,
        err_est,
        nodes_used,
        converged,
        discrepancies,
    })
}

/// Past this `t` the map is the identity to within `exp(−6 sinh t) < 1e-26`,
/// so the nodes sit on the locked zeros.
const OOURA_T_LOCK: f64 = 3.0;
/// Nodes summed beyond the lock point before averaging.
const OOURA_TAIL_TERMS: usize = 512;
/// Passes of pairwise averaging of the final partial sums.
const OOURA_AVERAGING: usize = 12;
const OOURA_T_MIN: f64 = -6.0;
const OOURA_MIN_SMALL_SPAN: f64 = 0.5;

struct LevelSum {
    value: f64,
    abs_sum: f64,
    nodes: usize,
}

fn ooura_level(
    f: &mut dyn FnMut(f64) -> f64,
    omega: f64,
    offset: f64,
    h: f64,
    negligible: f64,
    budget: &mut usize,
) -> Result<LevelSum> {
    let scale = PI / (h * omega);
    let mut nodes = 0;
    let mut abs_sum = 0.0;

    let mut eval = |t: f64, budget: &mut usize| -> Result<Option<f64>> {
        let (phi, dphi) = ooura_phi(t);
        let x = scale * phi;
        if x == 0.0 || *budget == 0 {
            return Ok(None);
        }
        *budget -= 1;
        nodes += 1;
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::Evaluation { x });
        }
        Ok(Some(v * scale * dphi * h))
    };

    // t < 0: nodes approach x = 0 double exponentially.
    let mut left = 0.0;
    let mut k = 1i64;
    let mut small_run = 0;
    let mut prev: [Option<f64>; 2] = [None, None];
    loop {
        let t = (offset - k as f64) * h;
        if t < OOURA_T_MIN {
            break;
        }
        match eval(t, budget) {
            Ok(Some(term)) => {
                left += term;
                abs_sum += term.abs();
                let shrinking = prev[1].is_none_or(|p| term.abs() <= p.abs());
                prev = [prev[1], Some(term)];
                if term.abs() < negligible && shrinking {
                    small_run += 1;
                    // The run must span a stretch of t wider than a sign
                    // change of the oscillatory factor.
                    if small_run >= 3 && small_run as f64 * h >= OOURA_MIN_SMALL_SPAN {
                        break;
                    }
                } else {
                    small_run = 0;
                }
            }
            Ok(None) => break,
            Err(e) => match prev {
                // endpoint limit at x → 0
                [Some(a), Some(b)] if b.abs() <= a.abs() => break,
                _ => return Err(e),
            },
        }
        k += 1;
    }

    // t ≥ 0 up to the lock point, then a bounded tail with averaging.
    let mut partial = left;
    let mut tail_sums: Vec<f64> = Vec::with_capacity(OOURA_TAIL_TERMS + 1);
    let mut k = 0i64;
    let mut small_run = 0;
    loop {
        let t = (offset + k as f64) * h;
        let Some(term) = eval(t, budget)? else {
            break;
        };
        partial += term;
        abs_sum += term.abs();
        if t >= OOURA_T_LOCK {
            tail_sums.push(partial);
            if term.abs() < negligible {
                small_run += 1;
                if small_run >= 4 {
                    break;
                }
            } else {
                small_run = 0;
            }
            if tail_sums.len() > OOURA_TAIL_TERMS {
                break;
            }
        }
        k += 1;
    }

    let value = if tail_sums.len() > OOURA_AVERAGING {
        let mut s = tail_sums[tail_sums.len() - OOURA_AVERAGING - 1..].to_vec();
        for _ in 0..OOURA_AVERAGING {
            s = s.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        }
        s[0]
    } else {
        partial
    };
    Ok(LevelSum {
        value,
        abs_sum,
        nodes,
    })
}

/// `φ(t) = t / (1 − exp(−6 sinh t))` and its derivative.
fn ooura_phi(t: f64) -> (f64, f64) {
    if t > 30.0 {
        return (t, 1.0);
    }
    if t < -30.0 {
        return (0.0, 0.0);
    }
    let u = 6.0 * t.sinh();
    let e = (-u).exp();
    let d = -(-u).exp_m1();
    if t == 0.0 {
        return (1.0 / 6.0, 0.5);
    }
    let phi = t / d;
    let num = if t.abs() < 0.1 {
        // D − 6 t cosh t · e^{−u}, expanded to avoid cancellation:
        // [1 − (1+u)e^{−u}] + e^{−u}·6(sinh t − t cosh t)
        let mut a = 0.0;
        let mut pow = u;
        let mut fact = 1.0;
        for n in 2..30 {
            pow *= u;
            fact *= n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            a += sign * (n as f64 - 1.0) * pow / fact;
        }
        let mut b = 0.0;
        let t2 = t * t;
        let mut tp = t;
        let mut fact = 1.0;
        for k in 1..15 {
            tp *= t2;
            fact *= (2 * k) as f64 * (2 * k + 1) as f64;
            b -= 2.0 * k as f64 * tp / fact;
        }
        a + e * 6.0 * b
    } else {
        d - 6.0 * t * t.cosh() * e
    };
    if !num.is_finite() || !e.is_finite() {
        return (0.0, 0.0);
    }
    (phi, num / (d * d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_is_smooth_through_zero() {
        let (p0, d0) = ooura_phi(0.0);
        let (p1, d1) = ooura_phi(1e-9);
        assert!((p0 - p1).abs() < 1e-9 && (d0 - d1).abs() < 1e-8);
        for t in [-0.3, -0.099, 0.05, 0.0999, 0.1001, 0.7, 2.0] {
            let h = 1e-5;
            let fd = (ooura_phi(t + h).0 - ooura_phi(t - h).0) / (2.0 * h);
            assert!((fd - ooura_phi(t).1).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn offsets_match_kernel_zeros() {
        assert!((node_offset_for(BesselOrder::Zero) - 0.75).abs() < 1e-15);
        assert!((node_offset_for(BesselOrder::One) - 0.25).abs() < 1e-15);
        assert!((cos_node_offset(0.0) - 0.5).abs() < 1e-15);
        assert!(
            cos_node_offset(-FRAC_PI_2).abs() < 1e-15
                || (cos_node_offset(-FRAC_PI_2) - 1.0).abs() < 1e-15
        );
    }
}
