//! Mellin-Barnes representation of the point-source profile
//!
//! ```text
//! c_a(r)/σ = ∫₀^∞ J0(ρr) ρ / (ρ^a + q) dρ,     1 < a ≤ 2.
//! ```
//!
//! Its Mellin transform is
//!
//! ```text
//! C(s) = q^{(2−s)/a − 1} Γ(1 − (2−s)/a) Γ((2−s)/a) Γ(s/2) 2^{s−1} / (a Γ(1 − s/2)),
//! ```
//!
//! analytic in the strip `max(0, 2−a) < Re s < 2 + a` (the apparent pole of
//! `Γ((2−s)/a)` at `s = 2` is cancelled by the zero of `1/Γ(1 − s/2)`).
//! Writing `C(s) = λ 2^{s−1} q^{−s/a} H(s)` with `λ = q^{2/a}/(a q)` and
//!
//! ```text
//! H(s) = Γ(s/2) Γ(1 − 2/a + s/a) Γ(2/a − s/a) / Γ(1 − s/2)
//! ```
//!
//! gives `c_a(r)/σ = (λ/2) H^{2,1}_{1,3}(q^{1/a} r / 2)` with upper row
//! `(1−2/a, 1/a)` and lower row `(0, 1/2), (1−2/a, 1/a), (0, 1/2)`.
//!
//! Conventions: `H^{m,n}_{p,q}(z) = (1/2πi) ∫ Θ(s) z^{−s} ds` with
//! `Θ(s) = Π_{j≤m} Γ(b_j + B_j s) Π_{j≤n} Γ(1 − a_j − A_j s) /
//! (Π_{j>m} Γ(1 − b_j − B_j s) Π_{j>n} Γ(a_j + A_j s))`; the Meijer G-function
//! is the special case `A_j = B_j = 1`, so that
//! `G^{2,0}_{0,2}(x | 0, 0) = 2 K0(2√x)`.
//!
//! Everything here is per unit source intensity: multiply by σ.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, ln_gamma, ln_sin_pi};

/// Distance below which an argument counts as sitting on a pole.
pub const POLE_TOLERANCE: f64 = 1e-8;

/// Fox H-function parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HKernelSpec {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q_count: usize,
    /// `(a_j, A_j)`, `j = 1..p`.
    pub upper: Vec<(f64, f64)>,
    /// `(b_j, B_j)`, `j = 1..q`.
    pub lower: Vec<(f64, f64)>,
    /// Set when a pair of Gamma factors cancels and the function is a
    /// Meijer G-function in disguise.
    pub reduced: Option<Reduction>,
}

/// `H(z) = scale · G(z^power)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub g: MeijerGSpec,
    pub scale: f64,
    pub power: f64,
}

/// Meijer G-function parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q_count: usize,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

/// Vertical integration line `Re s = c` of a Mellin-Barnes integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub c: f64,
    /// Largest `|Im s|` the integration may reach before giving up.
    pub t_max: f64,
    /// Evaluation budget.
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourResult {
    pub value: f64,
    pub err_est: f64,
    /// Where the integrand envelope fell below the truncation threshold.
    pub t_end: f64,
    pub nodes_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Strategy {
    Contour(ContourSpec),
    /// Sum of the first `terms` right-half-plane residues.
    ResidueSeries {
        terms: usize,
    },
}

fn check_a(a: f64) -> Result<()> {
    if a > 1.0 && a <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("exponent a = {a} outside (1, 2]")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Fails when `z` is within [`POLE_TOLERANCE`] of a nonpositive integer.
fn near_gamma_pole(z: Complex64) -> bool {
    let k = z.re.round();
    k <= 0.0 && Complex64::new(z.re - k, z.im).norm() < POLE_TOLERANCE
}

/// `ln Γ(z)`, reporting `pole_at` when `z` is close to a pole.
fn ln_gamma_checked(z: Complex64, pole_at: Complex64) -> Result<Complex64> {
    if near_gamma_pole(z) {
        return Err(Error::Pole { location: pole_at });
    }
    ln_gamma(z)
}

/// `−ln Γ(z)`; `−∞` at the poles, where `1/Γ` vanishes.
fn ln_rgamma(z: Complex64) -> Result<Complex64> {
    if near_gamma_pole(z) {
        return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
    }
    ln_gamma(z).map(|v| -v)
}

fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `ln [sin(πv) / sin(πu)]` for `v = (a/2)·u`, `u = (2−s)/a`.
fn ln_sine_ratio(s: Complex64, a: f64) -> Result<Complex64> {
    let u = (2.0 - s) / a;
    let v = (2.0 - s) / 2.0;
    if a == 2.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if u.norm() < 0.5 {
        // removable point s = 2
        let r = (a / 2.0) * sinc(PI * v) / sinc(PI * u);
        return Ok(r.ln());
    }
    let k = u.re.round();
    let dist_u = Complex64::new(u.re - k, u.im).norm() * a;
    if dist_u < POLE_TOLERANCE {
        let j = v.re.round();
        let dist_v = Complex64::new(v.re - j, v.im).norm() * 2.0;
        if dist_v < POLE_TOLERANCE {
            // both sines vanish: ratio of derivatives
            let r = (a / 2.0) * (PI * v).cos() / (PI * u).cos();
            return Ok(r.ln());
        }
        return Err(Error::Pole {
            location: Complex64::new(2.0 - a * k, 0.0),
        });
    }
    Ok(ln_sin_pi(v) - ln_sin_pi(u))
}

/// `ln C(s)`: the form used by the contour integrator.
pub fn ln_mellin_kernel_c(s: Complex64, a: f64, q: f64) -> Result<Complex64> {
    check_a(a)?;
    check_positive("q", q)?;
    // Reflection collapses the kernel to
    // C(s) = q^{u−1}/a · 2^{s−1} Γ(s/2)² · sin(π(2−s)/2) / sin(π(2−s)/a).
    let half = s / 2.0;
    if near_gamma_pole(half) {
        return Err(Error::Pole {
            location: Complex64::new(2.0 * half.re.round(), 0.0),
        });
    }
    let ratio = ln_sine_ratio(s, a)?;
    let u = (2.0 - s) / a;
    Ok((u - 1.0) * q.ln() - a.ln()
        + (s - 1.0) * std::f64::consts::LN_2
        + 2.0 * ln_gamma(half)?
        + ratio)
}

/// The Mellin transform `C(s)` of the point-source profile (per unit σ).
pub fn mellin_kernel_c(s: Complex64, a: f64, q: f64) -> Result<Complex64> {
    ln_mellin_kernel_c(s, a, q).map(|v| v.exp())
}

/// Strip of analyticity of `C(s)`.
pub fn kernel_strip(a: f64) -> Result<(f64, f64)> {
    check_a(a)?;
    Ok(((2.0 - a).max(0.0), 2.0 + a))
}

/// `λ = q^{2/a} / (a q)`.
pub fn lambda(a: f64, q: f64) -> f64 {
    q.powf(2.0 / a) / (a * q)
}

/// Argument of the H-function for radius `r`: `q^{1/a} r / 2`.
pub fn hfun_argument(a: f64, q: f64, r: f64) -> f64 {
    q.powf(1.0 / a) * r / 2.0
}

impl MeijerGSpec {
    /// `Π_{j≤m} Γ(b_j + s) Π_{j≤n} Γ(1 − a_j − s) / (Π_{j>m} Γ(1 − b_j − s) Π_{j>n} Γ(a_j + s))`, as a logarithm.
    pub fn ln_kernel(&self, s: Complex64) -> Result<Complex64> {
        self.as_h().ln_kernel(s)
    }

    fn as_h(&self) -> HKernelSpec {
        HKernelSpec {
            m: self.m,
            n: self.n,
            p: self.p,
            q_count: self.q_count,
            upper: self.upper.iter().map(|&a| (a, 1.0)).collect(),
            lower: self.lower.iter().map(|&b| (b, 1.0)).collect(),
            reduced: None,
        }
    }

    /// Closed form for `G^{2,0}_{0,2}(x | b1, b2)` with `b1 − b2 ∈ {0, ±1}`:
    /// `2 x^{(b1+b2)/2} K_{b1−b2}(2√x)`.
    pub fn evaluate_closed(&self, x: f64) -> Result<f64> {
        check_positive("x", x)?;
        if (self.m, self.n, self.p, self.q_count) != (2, 0, 0, 2) {
            return Err(Error::Usage(
                "closed form only available for G^{2,0}_{0,2}".into(),
            ));
        }
        let (b1, b2) = (self.lower[0], self.lower[1]);
        let nu = (b1 - b2).abs();
        let y = 2.0 * x.sqrt();
        let k = if nu == 0.0 {
            specfun::k0(y)
        } else if nu == 1.0 {
            specfun::k1(y)
        } else {
            return Err(Error::Usage(format!("order {nu} has no closed form here")));
        };
        Ok(2.0 * x.powf((b1 + b2) / 2.0) * k)
    }

    pub fn evaluate(&self, x: f64, contour: &ContourSpec) -> Result<ContourResult> {
        let h = self.as_h();
        mellin_barnes(&|s| h.ln_kernel(s), x, contour)
    }
}

impl HKernelSpec {
    pub fn new(m: usize, n: usize, upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self> {
        let (p, q_count) = (upper.len(), lower.len());
        if n > p || m > q_count {
            return Err(Error::Usage(format!(
                "orders m = {m}, n = {n} exceed q = {q_count}, p = {p}"
            )));
        }
        if upper.iter().chain(&lower).any(|&(_, w)| !(w > 0.0)) {
            return Err(Error::Usage("scale parameters must be positive".into()));
        }
        Ok(Self {
            m,
            n,
            p,
            q_count,
            upper,
            lower,
            reduced: None,
        })
    }

    /// `ln Θ(s)`; `−∞` real part where a denominator Gamma has a pole.
    pub fn ln_kernel(&self, s: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &(b, bb)) in self.lower.iter().enumerate() {
            if j < self.m {
                acc += ln_gamma_checked(b + bb * s, s)?;
            } else {
                acc += ln_rgamma(1.0 - b - bb * s)?;
            }
        }
        for (j, &(a, aa)) in self.upper.iter().enumerate() {
            if j < self.n {
                acc += ln_gamma_checked(1.0 - a - aa * s, s)?;
            } else {
                acc += ln_rgamma(a + aa * s)?;
            }
        }
        Ok(acc)
    }

    pub fn kernel(&self, s: Complex64) -> Result<Complex64> {
        self.ln_kernel(s).map(|v| v.exp())
    }

    /// Open interval separating the left poles (from `Γ(b_j + B_j s)`,
    /// `j ≤ m`) from the right ones (from `Γ(1 − a_j − A_j s)`, `j ≤ n`).
    pub fn strip(&self) -> (f64, f64) {
        let lo = self.lower[..self.m]
            .iter()
            .map(|&(b, bb)| -b / bb)
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = self.upper[..self.n]
            .iter()
            .map(|&(a, aa)| (1.0 - a) / aa)
            .fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    /// `H(z)` by the contour integral, through the reduced G-function when
    /// one is flagged.
    pub fn evaluate(&self, z: f64, contour: &ContourSpec) -> Result<ContourResult> {
        match &self.reduced {
            Some(red) => {
                let g = red.g.evaluate(z.powf(red.power), contour)?;
                Ok(ContourResult {
                    value: red.scale * g.value,
                    err_est: red.scale * g.err_est,
                    ..g
                })
            }
            None => mellin_barnes(&|s| self.ln_kernel(s), z, contour),
        }
    }
}

/// The H-function parameters of the point-source profile for exponent `a`.
pub fn hkernel_for_ca(a: f64) -> Result<HKernelSpec> {
    check_a(a)?;
    let mid = (1.0 - 2.0 / a, 1.0 / a);
    let mut spec = HKernelSpec::new(2, 1, vec![mid], vec![(0.0, 0.5), mid, (0.0, 0.5)])?;
    // Γ(2/a − s/a) / Γ(1 − s/2) cancels when the two arguments coincide,
    // i.e. at a = 2. What remains, Γ(s/2)², is G^{2,0}_{0,2}(z² | 0, 0)
    // after s → 2s.
    let (a1, aa1) = spec.upper[0];
    let (b3, bb3) = spec.lower[2];
    if (1.0 - a1 - (1.0 - b3)).abs() < 1e-15 && (aa1 - bb3).abs() < 1e-15 {
        spec.reduced = Some(Reduction {
            g: MeijerGSpec {
                m: 2,
                n: 0,
                p: 0,
                q_count: 2,
                upper: vec![],
                lower: vec![0.0, 0.0],
            },
            scale: 2.0,
            power: 2.0,
        });
    }
    Ok(spec)
}

impl ContourSpec {
    /// Line through the middle of `(lo, hi)`.
    pub fn centered(lo: f64, hi: f64) -> Self {
        Self {
            c: 0.5 * (lo + hi),
            ..Self::default()
        }
    }

    /// Default line for `C(s)`: halfway between the last left pole and the
    /// removable point `s = 2`.
    pub fn default_for(a: f64) -> Result<Self> {
        let (lo, _) = kernel_strip(a)?;
        Ok(Self::centered(lo, 2.0))
    }
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            c: 1.0,
            t_max: 400.0,
            nodes: 1 << 16,
        }
    }
}

const CONTOUR_H0: f64 = 0.5;
const CONTOUR_CUTOFF: f64 = 1e-14;

/// `(1/2πi) ∫_{c−i∞}^{c+i∞} K(s) z^{−s} ds` for a kernel with
/// `K(s̄) = conj K(s)`, given as `ln K`. Computed as
/// `(1/π) ∫₀^∞ Re[K(c+it) z^{−c−it}] dt` by the trapezoid rule, truncated
/// where the integrand envelope drops below `1e-14` of its peak and refined
/// by halving the step.
pub fn mellin_barnes(
    ln_kernel: &dyn Fn(Complex64) -> Result<Complex64>,
    z: f64,
    contour: &ContourSpec,
) -> Result<ContourResult> {
    check_positive("z", z)?;
    check_positive("t_max", contour.t_max)?;
    let lz = z.ln();
    let c = contour.c;
    let term = |t: f64| -> Result<(f64, f64)> {
        let s = Complex64::new(c, t);
        let w = ln_kernel(s)? - s * lz;
        let env = w.re.exp();
        let v = w.exp().re;
        if !v.is_finite() {
            return Err(Error::Evaluation { x: t });
        }
        Ok((v, env))
    };

    // Extent: march until the envelope has decayed for good.
    let mut nodes = 0usize;
    let (f0, e0) = term(0.0)?;
    nodes += 1;
    let mut peak = e0;
    let mut t = 0.0;
    let mut values = vec![f0];
    let mut small_run = 0;
    let mut last_env = e0;
    loop {
        t += CONTOUR_H0;
        if t > contour.t_max {
            return Err(Error::ContourDecay {
                t_max: contour.t_max,
                magnitude: last_env / peak.max(f64::MIN_POSITIVE),
            });
        }
        let (f, e) = term(t)?;
        nodes += 1;
        values.push(f);
        peak = peak.max(e);
        if e < CONTOUR_CUTOFF * peak && e <= last_env {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
        last_env = e;
    }
    let t_end = t;

    let mut h = CONTOUR_H0;
    let mut sum = 0.5 * values[0] + values[1..].iter().sum::<f64>();
    let mut abs_sum = 0.5 * values[0].abs() + values[1..].iter().map(|v| v.abs()).sum::<f64>();
    let mut estimate = h * sum;
    let mut err = f64::INFINITY;
    for _ in 0..20 {
        let n_new = (t_end / h).round() as usize;
        let mut add = 0.0;
        let mut add_abs = 0.0;
        for k in 0..n_new {
            let (f, _) = term((k as f64 + 0.5) * h)?;
            add += f;
            add_abs += f.abs();
        }
        nodes += n_new;
        sum += add;
        abs_sum += add_abs;
        h *= 0.5;
        let next = h * sum;
        err = (next - estimate).abs();
        estimate = next;
        let floor = 64.0 * f64::EPSILON * h * abs_sum;
        if err <= floor.max(1e-13 * estimate.abs()) {
            return Ok(ContourResult {
                value: estimate / PI,
                err_est: err / PI,
                t_end,
                nodes_used: nodes,
            });
        }
        if nodes > contour.nodes {
            break;
        }
    }
    Err(Error::NotConverged {
        value: estimate / PI,
        err_est: err / PI,
    })
}

/// Contour value of `c_a(r)/σ`.
pub fn hfun_contour(a: f64, q: f64, r: f64, contour: &ContourSpec) -> Result<ContourResult> {
    check_a(a)?;
    check_positive("q", q)?;
    check_positive("r", r)?;
    let (lo, hi) = kernel_strip(a)?;
    if !(contour.c > lo && contour.c < hi) {
        return Err(Error::Domain(format!(
            "abscissa c = {} outside the strip ({lo}, {hi})",
            contour.c
        )));
    }
    mellin_barnes(&|s| ln_mellin_kernel_c(s, a, q), r, contour)
}

/// The `k`-th right-half-plane residue contribution to `c_a(r)/σ`, from the
/// pole of `Γ((2−s)/a)` at `s = 2 + a k`:
///
/// ```text
/// (−1)^{k+1} q^{−k−1} Γ(1 + ak/2)² 2^{1+ak} sin(πak/2) / (π r^{2+ak})
/// ```
///
/// assembled from the residue `a (−1)^k / k!` and the remaining factors of
/// `C(s)` at the pole. It vanishes when `ak` is even.
pub fn residue_term(a: f64, q: f64, r: f64, k: u32) -> Result<f64> {
    check_a(a)?;
    check_positive("q", q)?;
    check_positive("r", r)?;
    if k == 0 {
        return Err(Error::Usage("residue index starts at 1".into()));
    }
    let kf = k as f64;
    let sk = 2.0 + a * kf;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let k_fact = specfun::gamma_real(kf + 1.0)?;
    // Res_{s=s_k} Γ((2−s)/a) = −a (−1)^k / k!, and closing the contour to
    // the right picks up −Res[C(s) r^{−s}].
    let res = a * sign / k_fact;
    // the other factors of C at s_k, where u = (2−s)/a = −k
    let rest = q.powf(-kf - 1.0) / a
        * k_fact
        * specfun::gamma_real(sk / 2.0)?
        * 2f64.powf(sk - 1.0)
        * specfun::rgamma_real(1.0 - sk / 2.0);
    Ok(res * rest * r.powf(-sk))
}

/// Sum of the first `terms` residues. Errors when the magnitudes stop
/// decreasing, which happens once `r` is too small for the asymptotic series.
pub fn residue_series(a: f64, q: f64, r: f64, terms: usize) -> Result<f64> {
    if terms == 0 {
        return Err(Error::Usage("at least one residue term is required".into()));
    }
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for k in 1..=terms {
        let t = residue_term(a, q, r, k as u32)?;
        if t != 0.0 {
            if t.abs() >= last {
                return Err(Error::ResidueDivergence {
                    partial: sum,
                    terms: k - 1,
                });
            }
            last = t.abs();
        }
        sum += t;
    }
    Ok(sum)
}

/// `c_a(r)/σ` from its H-function representation.
pub fn hfun_point_solution(a: f64, q: f64, r: f64, strategy: &Strategy) -> Result<f64> {
    match strategy {
        Strategy::Contour(spec) => hfun_contour(a, q, r, spec).map(|v| v.value),
        Strategy::ResidueSeries { terms } => residue_series(a, q, r, *terms),
    }
}
