//! Special functions consumed by the solvers: Bessel J/I/K of orders 0 and 1,
//! complex Gamma, and McMahon estimates of the zeros of J0 and J1.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod gamma;
mod zeros;

pub use bessel::{
    bessel_i, bessel_j, bessel_k, hankel_amplitudes, i0, i1, j0, j1, k0, k1, phase_offset,
    ASYMPTOTIC_THRESHOLD, I_OVERFLOW_CUTOFF,
};
pub use gamma::{gamma, gamma_real, ln_gamma, ln_sin_pi, rgamma_real, sin_pi};
pub use zeros::{bessel_j_zero, ZeroEstimate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order of a Bessel function. Only orders 0 and 1 are needed anywhere in the
/// solution formulas, so only those are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    pub fn nu(self) -> u32 {
        match self {
            BesselOrder::Zero => 0,
            BesselOrder::One => 1,
        }
    }
}

impl TryFrom<u32> for BesselOrder {
    type Error = Error;

    fn try_from(nu: u32) -> Result<Self> {
        match nu {
            0 => Ok(BesselOrder::Zero),
            1 => Ok(BesselOrder::One),
            _ => Err(Error::Domain(format!(
                "Bessel order {nu} is not supported (only 0 and 1)"
            ))),
        }
    }
}
