use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Fractional order `s` of the velocity operator, validated to lie in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s.is_finite() && s > 0.0 && s < 1.0 {
            Ok(Self(s))
        } else {
            Err(Error::InvalidOrder(s))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `2s`, the exponent of the Fourier symbol.
    #[inline]
    pub fn two_s(self) -> f64 {
        2.0 * self.0
    }

    /// `|k|^{2s}`, with `|0|^{2s} = 0`.
    #[inline]
    pub fn symbol(self, k: f64) -> f64 {
        let a = k.abs();
        if a == 0.0 {
            0.0
        } else {
            a.powf(2.0 * self.0)
        }
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = Error;
    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<FracOrder> for f64 {
    fn from(s: FracOrder) -> f64 {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_endpoints() {
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.0).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
        assert!(FracOrder::new(0.5).is_ok());
    }

    #[test]
    fn symbol_at_zero() {
        let s = FracOrder::new(0.3).unwrap();
        assert_eq!(s.symbol(0.0), 0.0);
        assert!((s.symbol(-2.0) - 2f64.powf(0.6)).abs() < 1e-15);
    }
}
