use crate::error::{Error, Result};

/// Income shares for `n` ranked positions under inequality parameter `alpha`.
///
/// Position `i` (1-based, richest first) receives the share
/// `w_i = exp(alpha (n - i + 1)) / sum_j exp(alpha (n - j + 1))`,
/// so shares sum to one, `alpha = 0` gives full equality, and the ratio of
/// consecutive shares is exactly `e^alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncomeDistribution {
    n: usize,
    alpha: f64,
    weights: Vec<f64>,
}

impl IncomeDistribution {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        let weights = income_weights(n, alpha)?;
        Ok(Self { n, alpha, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }
}

/// Income share vector, computed with the maximum exponent subtracted before
/// exponentiating so large `alpha` cannot overflow.
pub fn income_weights(n: usize, alpha: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Domain(format!("income_weights: n must be >= 2, got {n}")));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Domain(format!(
            "income_weights: alpha must be finite and >= 0, got {alpha}"
        )));
    }
    // The largest exponent is alpha * n (position 1); after subtracting it the
    // exponents are -alpha * (i - 1).
    let raw: Vec<f64> = (0..n).map(|i| (-alpha * i as f64).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|e| e / total).collect())
}
