use crate::error::{Error, Result};

/// Constant-relative-risk-aversion utility with curvature `rho >= 0`.
///
/// `u(x) = ln x` at `rho = 1`, else `(x^(1-rho) - 1) / (1 - rho)`, evaluated
/// through `exp_m1` so the two branches agree near `rho = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Utility {
    rho: f64,
}

impl Utility {
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(Error::Domain(format!(
                "utility: rho must be finite and >= 0, got {rho}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Utility of consumption `x > 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!(
                "utility: consumption must be > 0, got {x}"
            )));
        }
        if self.rho == 1.0 {
            Ok(x.ln())
        } else {
            Ok(f64::exp_m1((1.0 - self.rho) * x.ln()) / (1.0 - self.rho))
        }
    }
}

/// One-shot evaluation of CRRA utility.
pub fn utility(rho: f64, x: f64) -> Result<f64> {
    Utility::new(rho)?.eval(x)
}
