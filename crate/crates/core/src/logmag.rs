//! Log-space representation for astronomically large positive quantities.
//!
//! Region counts and output-vector bounds routinely exceed the f64 range
//! (think `rho^(W*M)` with M in the hundreds), so they are carried as
//! natural logarithms and only materialized when the value fits.

use serde::{Deserialize, Serialize};

/// A positive quantity stored as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMag {
    ln: f64,
}

impl LogMag {
    pub const ONE: LogMag = LogMag { ln: 0.0 };

    /// From a plain positive value.
    pub fn from_value(v: f64) -> Self {
        assert!(
            v > 0.0 && v.is_finite(),
            "LogMag requires a positive finite value"
        );
        Self { ln: v.ln() }
    }

    /// From a natural logarithm (any finite value allowed).
    pub fn from_ln(ln: f64) -> Self {
        assert!(ln.is_finite(), "LogMag requires a finite logarithm");
        Self { ln }
    }

    pub fn ln(&self) -> f64 {
        self.ln
    }

    /// Materialize the value, or `None` when exp would overflow.
    pub fn to_f64(&self) -> Option<f64> {
        // exp(709.78...) is the largest representable double.
        if self.ln <= 709.0 {
            Some(self.ln.exp())
        } else {
            None
        }
    }

    pub fn mul(&self, other: LogMag) -> LogMag {
        LogMag {
            ln: self.ln + other.ln,
        }
    }

    pub fn powi(&self, k: u64) -> LogMag {
        LogMag {
            ln: self.ln * k as f64,
        }
    }
}

impl std::fmt::Display for LogMag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.to_f64() {
            Some(v) => write!(f, "{v:.6e}"),
            None => write!(f, "exp({:.6})", self.ln),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_small_values() {
        let m = LogMag::from_value(42.0);
        let v = m.to_f64().unwrap();
        assert!((v - 42.0).abs() < 1e-12);
    }

    #[test]
    fn huge_values_stay_symbolic() {
        let m = LogMag::from_ln(5000.0);
        assert!(m.to_f64().is_none());
        assert_eq!(format!("{m}"), "exp(5000.000000)");
    }

    #[test]
    fn product_adds_logs() {
        let a = LogMag::from_value(3.0);
        let b = LogMag::from_value(7.0);
        assert!((a.mul(b).to_f64().unwrap() - 21.0).abs() < 1e-12);
        assert!((a.powi(4).to_f64().unwrap() - 81.0).abs() < 1e-10);
    }
}
