//! Steady-state radial profiles of a space-fractional reaction-diffusion
//! system with cylindrical symmetry.
//!
//! The steady state of
//!
//! ```text
//! ∂c/∂t = −D (−Δ)^α c + σ·1(L − r) − q c,    0 < α ≤ 1,   c(∞) = 0
//! ```
//!
//! is computed along several independent routes:
//!
//! * [`model::solve_integer`]: closed form in modified Bessel functions (α = 1);
//! * [`model::solve_full`]: the Hankel-domain solution
//!   `c(r) = σL ∫₀^∞ J0(ρr) J1(ρL) / (ρ^{2α} + q) dρ` by quadrature;
//! * [`model::solve_ring`] / [`model::solve_point`]: ring- and point-source
//!   approximations of the distal profile;
//! * [`mellin::hfun_point_solution`]: the point-source profile as a Fox
//!   H-function evaluated from its Mellin-Barnes integral or residue series;
//! * [`model::asymptotic_tail`]: the leading algebraic large-r term.
//!
//! Supporting machinery lives in [`specfun`] (Bessel, Gamma, Bessel zeros),
//! [`dequad`] (double-exponential quadrature) and [`hankel`] (partitioned
//! Hankel transforms with Wynn acceleration).

pub mod dequad;
pub mod error;
pub mod hankel;
pub mod mellin;
pub mod model;
pub mod specfun;

pub use error::{Error, Result};
