//! Optimal proportional taxation before private transfers.
//!
//! The planner taxes every income at rate `tau`, loses a fraction `s` of the
//! revenue, and rebates the rest as an equal lump sum. Players then play the
//! repeated transfer game on their post-tax incomes, with the norm applied to
//! post-tax income levels. Welfare at a tax rate is average per-period
//! utility under the regime the discount factor supports: cooperative when
//! `delta` reaches the post-tax threshold, autarkic otherwise.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::threshold::sustainability_threshold;
use crate::value::{Economy, Scenario};

/// Proportional tax rate and cost of public funds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiscalPolicy {
    tau: f64,
    s: f64,
}

impl FiscalPolicy {
    pub fn new(tau: f64, s: f64) -> Result<Self> {
        if !tau.is_finite() || !(0.0..=1.0).contains(&tau) {
            return Err(Error::Domain(format!("fiscal policy: tau must lie in [0, 1], got {tau}")));
        }
        if !s.is_finite() || !(s > 0.0 && s <= 1.0) {
            return Err(Error::Domain(format!("fiscal policy: s must lie in (0, 1], got {s}")));
        }
        Ok(Self { tau, s })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Per-member lump-sum grant `(1 - s) tau / n` (total pre-tax income is 1,
    /// so collected revenue is exactly `tau`).
    pub fn grant_per_member(&self, n: usize) -> f64 {
        (1.0 - self.s) * self.tau / n as f64
    }
}

/// Which branch of the welfare function applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Autarkic,
    Cooperative,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Autarkic => "autarkic",
            Regime::Cooperative => "cooperative",
        })
    }
}

/// Post-tax economy: incomes scaled by `1 - tau`, the rebate added to the
/// grant, everything else unchanged. All downstream value and threshold
/// machinery applies unchanged to the result.
pub fn post_tax_economy(policy: &FiscalPolicy, base: &Economy) -> Result<Economy> {
    let incomes = base.incomes().iter().map(|w| (1.0 - policy.tau()) * w).collect();
    Economy::new(
        incomes,
        base.grant() + policy.grant_per_member(base.n()),
        *base.norm(),
        *base.utility(),
        base.mobility(),
    )
}

/// Post-tax scenario (same discount factor as the base).
pub fn post_tax_scenario(policy: &FiscalPolicy, base: &Scenario) -> Result<Scenario> {
    Scenario::new(post_tax_economy(policy, base.economy())?, base.delta())
}

/// Average per-period utility at tax rate `tau` and the regime that applies:
/// cooperative when `delta >= delta_min(tau)` on the post-tax economy, else
/// autarkic.
pub fn welfare(policy: &FiscalPolicy, delta: f64, base: &Economy) -> Result<(f64, Regime)> {
    if !delta.is_finite() || !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("welfare: delta must lie in [0, 1), got {delta}")));
    }
    let taxed = post_tax_economy(policy, base)?;
    let threshold = sustainability_threshold(&taxed)?;
    if delta >= threshold {
        Ok((taxed.profile().u_coop_mean, Regime::Cooperative))
    } else {
        Ok((taxed.profile().u_aut_mean, Regime::Autarkic))
    }
}

/// Tax grid resolution and optional golden-section polish of the winner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaxGrid {
    pub points: usize,
    pub golden_refine: bool,
}

impl Default for TaxGrid {
    fn default() -> Self {
        Self { points: 501, golden_refine: false }
    }
}

/// Welfare-maximizing tax rate and its companions.
#[derive(Debug, Clone, PartialEq)]
pub struct TaxResult {
    /// Grid argmax of the regime-dependent welfare (ties: smallest tau).
    pub tau_star: f64,
    /// Branch used at `tau_star`.
    pub regime: Regime,
    pub welfare_at_star: f64,
    /// Boundary rate where `delta_min(tau)` crosses `delta`, when the grid
    /// sees a sign change.
    pub tau_dagger: Option<f64>,
    /// Argmax of the autarky-branch welfare alone.
    pub tau_a: f64,
}

/// Grid maximization of regime-dependent welfare over `tau in [0, 1]`,
/// with the autarky-optimal rate and the cooperation boundary reported
/// alongside.
pub fn optimal_tax(delta: f64, s: f64, base: &Economy, grid: &TaxGrid) -> Result<TaxResult> {
    if grid.points < 2 {
        return Err(Error::Domain(format!("optimal_tax: need >= 2 grid points, got {}", grid.points)));
    }
    if !delta.is_finite() || !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("optimal_tax: delta must lie in [0, 1), got {delta}")));
    }
    let taus: Vec<f64> = (0..grid.points)
        .map(|k| k as f64 / (grid.points - 1) as f64)
        .collect();
    // Per grid point: (welfare, regime, post-tax threshold, autarky welfare).
    let rows: Vec<(f64, Regime, f64, f64)> = taus
        .par_iter()
        .map(|&tau| {
            let policy = FiscalPolicy::new(tau, s)?;
            let taxed = post_tax_economy(&policy, base)?;
            let threshold = sustainability_threshold(&taxed)?;
            let aut = taxed.profile().u_aut_mean;
            let (w, regime) = if delta >= threshold {
                (taxed.profile().u_coop_mean, Regime::Cooperative)
            } else {
                (aut, Regime::Autarkic)
            };
            Ok((w, regime, threshold, aut))
        })
        .collect::<Result<_>>()?;

    let mut star = 0usize;
    let mut aut_star = 0usize;
    for k in 1..rows.len() {
        if rows[k].0 > rows[star].0 {
            star = k;
        }
        if rows[k].3 > rows[aut_star].3 {
            aut_star = k;
        }
    }

    let mut tau_star = taus[star];
    let mut welfare_at_star = rows[star].0;
    let regime = rows[star].1;
    if grid.golden_refine {
        let lo = if star == 0 { taus[0] } else { taus[star - 1] };
        let hi = if star + 1 == taus.len() { taus[star] } else { taus[star + 1] };
        let (t, w) = golden_section_max(
            |tau| welfare(&FiscalPolicy::new(tau, s)?, delta, base).map(|r| r.0),
            lo,
            hi,
        )?;
        if w > welfare_at_star {
            tau_star = t;
            welfare_at_star = w;
        }
    }

    let tau_dagger = find_boundary(delta, s, base, &taus, &rows)?;

    Ok(TaxResult { tau_star, regime, welfare_at_star, tau_dagger, tau_a: taus[aut_star] })
}

/// First grid bracket where `delta_min(tau) - delta` changes sign, bisected to
/// the boundary rate.
fn find_boundary(
    delta: f64,
    s: f64,
    base: &Economy,
    taus: &[f64],
    rows: &[(f64, Regime, f64, f64)],
) -> Result<Option<f64>> {
    let h = |threshold: f64| threshold - delta;
    let threshold_at = |tau: f64| -> Result<f64> {
        sustainability_threshold(&post_tax_economy(&FiscalPolicy::new(tau, s)?, base)?)
    };
    for k in 0..rows.len() - 1 {
        let (a, b) = (h(rows[k].2), h(rows[k + 1].2));
        if (a <= 0.0) != (b <= 0.0) {
            let (mut lo, mut hi) = (taus[k], taus[k + 1]);
            let mut lo_nonpos = a <= 0.0;
            for _ in 0..60 {
                let mid = lo + 0.5 * (hi - lo);
                if mid <= lo || mid >= hi {
                    break;
                }
                let mid_nonpos = h(threshold_at(mid)?) <= 0.0;
                if mid_nonpos == lo_nonpos {
                    lo = mid;
                    lo_nonpos = mid_nonpos;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(lo + 0.5 * (hi - lo)));
        }
    }
    Ok(None)
}

fn golden_section_max(
    f: impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..80 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let mid = lo + 0.5 * (hi - lo);
    Ok((mid, f(mid)?))
}
