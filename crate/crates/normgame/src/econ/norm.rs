use crate::error::{Error, Result};

/// Contribution norm `theta(w) = w^beta`: the share of income a player with
/// income `w` is expected to transfer.
///
/// `beta = 0` prescribes contributing everything, `beta = 1` a share equal to
/// one's income, and larger `beta` shifts the relative burden toward richer
/// positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContributionNorm {
    beta: f64,
}

impl ContributionNorm {
    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::Domain(format!(
                "contribution norm: beta must be finite and >= 0, got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Contribution share for income `w` in `[0, 1]`, with the conventions
    /// `0^0 = 1` and `0^beta = 0` for `beta > 0`.
    pub fn share(&self, w: f64) -> f64 {
        debug_assert!((0.0..=1.0 + 1e-12).contains(&w), "income share out of range: {w}");
        if w == 0.0 {
            return if self.beta == 0.0 { 1.0 } else { 0.0 };
        }
        w.powf(self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn named_cases() {
        assert_eq!(ContributionNorm::new(0.0).unwrap().share(0.3), 1.0);
        assert_abs_diff_eq!(ContributionNorm::new(1.0).unwrap().share(0.3), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(ContributionNorm::new(2.0).unwrap().share(0.5), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn zero_income_conventions() {
        assert_eq!(ContributionNorm::new(0.0).unwrap().share(0.0), 1.0);
        assert_eq!(ContributionNorm::new(2.5).unwrap().share(0.0), 0.0);
    }

    #[test]
    fn negative_beta_rejected() {
        assert!(matches!(ContributionNorm::new(-1.0), Err(Error::Domain(_))));
        assert!(matches!(ContributionNorm::new(f64::NAN), Err(Error::Domain(_))));
    }
}
