//! Minimum discount factor sustaining the contribution norm.
//!
//! The richest type's incentive constraint pins the threshold: cooperation is
//! an equilibrium at `delta` exactly when `V_1^c >= V_1^d`. The solver works
//! on the normalized gap `(V_1^c - V_1^d)(1 - delta)(1 - delta(1 - m))`, which
//! shares the sign of the raw gap and stays finite as `delta -> 1`. For
//! `beta = 0` the normalized gap is exactly the quadratic
//! `C + B delta + A delta^2` and the root comes from the closed formula;
//! otherwise a bracketed bisection is used.

use crate::error::{Error, Result};
use crate::value::{Economy, EconomyTemplate, Scenario};

/// Discount factor evaluated when probing sustainability as `delta -> 1`.
const PROBE_DELTA: f64 = 1.0 - 1e-9;

/// Points in the coarse sign-change scan that precedes bisection.
const COARSE_SCAN_POINTS: usize = 64;

/// Bisection iterations; 100 halvings of [0, 1) exhaust f64 resolution.
const BISECT_ITERS: usize = 100;

/// How a threshold was solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Quadratic,
    Bisection,
}

/// A solved minimum discount factor, or the flag that no `delta < 1` sustains
/// the norm (projected to 1 for numeric output).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaMin {
    Sustainable(f64),
    Unsustainable,
}

impl DeltaMin {
    /// Numeric projection: the threshold itself, or 1 when unsustainable.
    pub fn value(&self) -> f64 {
        match self {
            DeltaMin::Sustainable(d) => *d,
            DeltaMin::Unsustainable => 1.0,
        }
    }

    pub fn is_sustainable(&self) -> bool {
        matches!(self, DeltaMin::Sustainable(_))
    }
}

/// Threshold solution along with how it was obtained and which type binds.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub delta_min: DeltaMin,
    pub method: SolveMethod,
    /// Type with the strongest deviation incentive at the solution (1-based).
    pub binding_type: usize,
    /// Normalized gap at the solution (at the probe point when unsustainable).
    pub gap_at_solution: f64,
}

/// Coefficients of the `beta = 0` cooperation condition
/// `C + B delta + A delta^2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoefficients {
    /// Utility of the richest type's one-shot deviation consumption.
    pub c0: f64,
    /// Utility of the richest type's own income.
    pub c1: f64,
    /// Utility of mean income (the pooled cooperative consumption).
    pub c2: f64,
    /// Mean utility across types (the autarky flow average).
    pub c3: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticCoefficients {
    /// Normalized gap at `delta` under `beta = 0`.
    pub fn gap_at(&self, delta: f64) -> f64 {
        self.c + delta * (self.b + delta * self.a)
    }

    /// `(retained, discarded)` roots of `A d^2 + B d + C = 0`, the retained
    /// one being the root inside `[0, 1)`. Degenerates to the single linear
    /// root when `A = 0` (full mobility), where the discarded root is absent.
    pub fn roots(&self) -> (f64, Option<f64>) {
        if self.a == 0.0 {
            return (-self.c / self.b, None);
        }
        let disc = (self.b * self.b - 4.0 * self.a * self.c).max(0.0);
        let q = -0.5 * (self.b + disc.sqrt());
        (self.c / q, Some(q / self.a))
    }
}

/// Coefficients of the quadratic cooperation condition for a `beta = 0`
/// economy, grant folded into every consumption argument.
pub fn quadratic_coefficients(economy: &Economy) -> Result<QuadraticCoefficients> {
    if economy.norm().beta() != 0.0 {
        return Err(Error::Usage(format!(
            "quadratic coefficients require beta = 0, got beta = {}",
            economy.norm().beta()
        )));
    }
    let u = economy.utility();
    let w = economy.incomes();
    let g = economy.grant();
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let c0 = u.eval(w[0] + (w.iter().sum::<f64>() - w[0]) / n + g)?;
    let c1 = u.eval(w[0] + g)?;
    let c2 = u.eval(mean + g)?;
    let c3 = w.iter().map(|&wi| u.eval(wi + g)).sum::<Result<f64>>()? / n;
    let m = economy.mobility();
    let a = (1.0 - m) * (c1 - c0);
    let b = c0 - m * c3 - (1.0 - m) * (c2 - c0 + c1);
    let c = c2 - c0;
    Ok(QuadraticCoefficients { c0, c1, c2, c3, a, b, c })
}

/// Minimum discount factor sustaining the norm: closed-form quadratic when
/// `beta = 0`, bracketed bisection otherwise.
///
/// Returns [`DeltaMin::Unsustainable`] when `m = 0` or the normalized gap is
/// still non-positive as `delta -> 1`. Errors with
/// [`Error::BindingType`] when the solved type-1 root is not where the binding
/// constraint sits (observed at high risk aversion), and with
/// [`Error::MultipleSignChanges`] when the coarse scan sees a non-unique root.
pub fn delta_min(economy: &Economy) -> Result<ThresholdResult> {
    let method = if economy.norm().beta() == 0.0 {
        SolveMethod::Quadratic
    } else {
        SolveMethod::Bisection
    };
    solve(economy, method)
}

/// Threshold via bisection regardless of `beta`; cross-checks the quadratic.
pub fn delta_min_bisection(economy: &Economy) -> Result<ThresholdResult> {
    solve(economy, SolveMethod::Bisection)
}

fn solve(economy: &Economy, method: SolveMethod) -> Result<ThresholdResult> {
    let gap = |d: f64| economy.normalized_gap_at(d, 0);
    if economy.mobility() == 0.0 || gap(PROBE_DELTA) <= 0.0 {
        return Ok(unsustainable(economy, method));
    }
    let root = match method {
        SolveMethod::Quadratic => quadratic_coefficients(economy)?.roots().0,
        SolveMethod::Bisection => bisect_increasing(&gap, bracket(&gap)?),
    };
    let binding = binding_index(economy, root);
    if binding != 0 && economy.strictly_ranked() {
        return Err(Error::BindingType { binding_type: binding + 1, delta: root });
    }
    Ok(ThresholdResult {
        delta_min: DeltaMin::Sustainable(root),
        method,
        binding_type: binding + 1,
        gap_at_solution: gap(root),
    })
}

fn unsustainable(economy: &Economy, method: SolveMethod) -> ThresholdResult {
    ThresholdResult {
        delta_min: DeltaMin::Unsustainable,
        method,
        binding_type: binding_index(economy, PROBE_DELTA) + 1,
        gap_at_solution: economy.normalized_gap_at(PROBE_DELTA, 0),
    }
}

/// Coarse scan over [0, probe]: returns the single bracketing interval of the
/// sign change, or the non-uniqueness diagnostic.
fn bracket(gap: &dyn Fn(f64) -> f64) -> Result<(f64, f64)> {
    let step = PROBE_DELTA / (COARSE_SCAN_POINTS - 1) as f64;
    let mut changes = 0usize;
    let mut interval = (0.0, PROBE_DELTA);
    let mut prev = gap(0.0) > 0.0;
    for k in 1..COARSE_SCAN_POINTS {
        let d = step * k as f64;
        let pos = gap(d) > 0.0;
        if pos != prev {
            changes += 1;
            interval = (d - step, d);
            prev = pos;
        }
    }
    if changes > 1 {
        return Err(Error::MultipleSignChanges { count: changes });
    }
    Ok(interval)
}

/// Bisection on a gap known to be <= 0 at `lo` and > 0 at `hi`.
fn bisect_increasing(gap: &dyn Fn(f64) -> f64, (mut lo, mut hi): (f64, f64)) -> f64 {
    for _ in 0..BISECT_ITERS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo + 0.5 * (hi - lo)
}

fn binding_index(economy: &Economy, delta: f64) -> usize {
    let mut best = 0usize;
    let mut best_gap = -economy.normalized_gap_at(delta, 0);
    for i in 1..economy.n() {
        let g = -economy.normalized_gap_at(delta, i);
        if g > best_gap {
            best = i;
            best_gap = g;
        }
    }
    best
}

/// Type with the maximal deviation incentive `V^d - V^c` at the scenario's
/// discount factor; ties break toward the lowest index. 1-based.
pub fn binding_type_check(scenario: &Scenario) -> usize {
    binding_index(scenario.economy(), scenario.delta()) + 1
}

/// Threshold above which *every* type weakly prefers the norm: the root of
/// the minimum normalized gap over types. Coincides with [`delta_min`] when
/// the richest type binds; strictly larger in the high-risk-aversion corner
/// where a poorer type's constraint binds instead.
pub fn delta_min_all_types(economy: &Economy) -> DeltaMin {
    let gap = |d: f64| economy.min_normalized_gap_at(d);
    if economy.mobility() == 0.0 || gap(PROBE_DELTA) <= 0.0 {
        return DeltaMin::Unsustainable;
    }
    // The region where all types cooperate is an upper interval, so the last
    // sign change of the min-gap is the boundary.
    let step = PROBE_DELTA / (COARSE_SCAN_POINTS - 1) as f64;
    let mut interval = (0.0, PROBE_DELTA);
    let mut prev = gap(0.0) > 0.0;
    for k in 1..COARSE_SCAN_POINTS {
        let d = step * k as f64;
        let pos = gap(d) > 0.0;
        if pos != prev {
            interval = (d - step, d);
            prev = pos;
        }
    }
    DeltaMin::Sustainable(bisect_increasing(&gap, interval))
}

/// Numeric threshold for grid consumers: [`delta_min`]'s value with the
/// unsustainable flag projected to 1, falling back to the all-types threshold
/// when the type-1 root fails the binding check.
pub fn sustainability_threshold(economy: &Economy) -> Result<f64> {
    match delta_min(economy) {
        Ok(result) => Ok(result.delta_min.value()),
        Err(Error::BindingType { .. }) => Ok(delta_min_all_types(economy).value()),
        Err(other) => Err(other),
    }
}

/// Numeric two-alpha threshold for grid consumers, with the same recovery
/// behavior as [`sustainability_threshold`]: the unsustainable flag projects
/// to 1 and a failed binding check falls back to the root of the minimum
/// per-type gap.
pub fn two_alpha_sustainability_threshold(
    alpha0: f64,
    alpha1: f64,
    template: &EconomyTemplate,
) -> Result<f64> {
    match delta_min_two_alpha(alpha0, alpha1, template) {
        Ok(result) => Ok(result.delta_min.value()),
        Err(Error::BindingType { .. }) => {
            let e0 = template.economy(alpha0)?;
            let e1 = template.economy(alpha1)?;
            let m = template.mobility;
            let p0 = e0.profile().clone();
            let p1 = e1.profile().clone();
            let min_gap = move |d: f64| {
                (0..template.n)
                    .map(|i| {
                        (1.0 - d) * (1.0 - d * (1.0 - m)) * (p0.u_coop[i] - p0.u_dev[i])
                            + d * (1.0 - m) * (1.0 - d) * (p1.u_coop[i] - p1.u_aut[i])
                            + d * m * (p1.u_coop_mean - p1.u_aut_mean)
                    })
                    .fold(f64::INFINITY, f64::min)
            };
            if min_gap(PROBE_DELTA) <= 0.0 {
                return Ok(1.0);
            }
            let step = PROBE_DELTA / (COARSE_SCAN_POINTS - 1) as f64;
            let mut interval = (0.0, PROBE_DELTA);
            let mut prev = min_gap(0.0) > 0.0;
            for k in 1..COARSE_SCAN_POINTS {
                let d = step * k as f64;
                let pos = min_gap(d) > 0.0;
                if pos != prev {
                    interval = (d - step, d);
                    prev = pos;
                }
            }
            Ok(bisect_increasing(&min_gap, interval))
        }
        Err(other) => Err(other),
    }
}

/// Threshold for a once-and-for-all inequality change: incomes are drawn at
/// `alpha0` in the deviation period and at `alpha1` in every later period.
///
/// Solves, for the richest type, one-shot cooperation payoff at `alpha0` plus
/// the discounted expected cooperative continuation at `alpha1` equal to the
/// one-shot deviation payoff at `alpha0` plus the discounted expected autarky
/// continuation at `alpha1`, with expectations over next-period position.
/// Reduces exactly to [`delta_min`] when `alpha1 == alpha0`.
pub fn delta_min_two_alpha(
    alpha0: f64,
    alpha1: f64,
    template: &EconomyTemplate,
) -> Result<ThresholdResult> {
    let e0 = template.economy(alpha0)?;
    let e1 = template.economy(alpha1)?;
    let m = template.mobility;
    let p0 = e0.profile().clone();
    let p1 = e1.profile().clone();
    let gap_for = move |d: f64, i: usize| {
        (1.0 - d) * (1.0 - d * (1.0 - m)) * (p0.u_coop[i] - p0.u_dev[i])
            + d * (1.0 - m) * (1.0 - d) * (p1.u_coop[i] - p1.u_aut[i])
            + d * m * (p1.u_coop_mean - p1.u_aut_mean)
    };
    let gap = |d: f64| gap_for(d, 0);
    let binding_at = |d: f64| -> usize {
        let mut best = 0usize;
        let mut best_gap = -gap_for(d, 0);
        for i in 1..template.n {
            let g = -gap_for(d, i);
            if g > best_gap {
                best = i;
                best_gap = g;
            }
        }
        best
    };
    if m == 0.0 || gap(PROBE_DELTA) <= 0.0 {
        return Ok(ThresholdResult {
            delta_min: DeltaMin::Unsustainable,
            method: SolveMethod::Bisection,
            binding_type: binding_at(PROBE_DELTA) + 1,
            gap_at_solution: gap(PROBE_DELTA),
        });
    }
    let root = bisect_increasing(&gap, bracket(&gap)?);
    let binding = binding_at(root);
    if binding != 0 && e0.strictly_ranked() && e1.strictly_ranked() {
        return Err(Error::BindingType { binding_type: binding + 1, delta: root });
    }
    Ok(ThresholdResult {
        delta_min: DeltaMin::Sustainable(root),
        method: SolveMethod::Bisection,
        binding_type: binding + 1,
        gap_at_solution: gap(root),
    })
}
