//! McMahon-type estimates of the positive zeros of J0 and J1.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::BesselOrder;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroEstimate {
    pub k: u32,
    pub value: f64,
    pub refined: bool,
}

/// Estimate of the `k`-th positive zero of `J_ν`: `b = π(k + ν/2 − 1/4)`,
/// and with `refined` the first correction `b − (4ν² − 1)/(8b)`.
pub fn bessel_j_zero(order: BesselOrder, k: u32, refined: bool) -> Result<ZeroEstimate> {
    if k == 0 {
        return Err(Error::Domain("zero index must be at least 1".into()));
    }
    let nu = f64::from(order.nu());
    let b = PI * (f64::from(k) + 0.5 * nu - 0.25);
    let value = if refined {
        b - (4.0 * nu * nu - 1.0) / (8.0 * b)
    } else {
        b
    };
    Ok(ZeroEstimate { k, value, refined })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_zeros() {
        let z = bessel_j_zero(BesselOrder::Zero, 1, false).unwrap();
        assert!((z.value - 0.75 * PI).abs() < 1e-15);
        let z = bessel_j_zero(BesselOrder::Zero, 1, true).unwrap();
        assert!((z.value - (0.75 * PI + 1.0 / (6.0 * PI))).abs() < 1e-15);
        assert!(bessel_j_zero(BesselOrder::One, 0, true).is_err());
    }
}
