//! Closed-form expected discounted values of cooperation, deviation, and
//! autarky for each income type.
//!
//! All three values are driven by the single-player position chain (stay with
//! probability `1 - (n-1)m/n`, move to each other position with `m/n`), which
//! makes the per-type recursions solvable in closed form:
//!
//! - autarky:     `V_i^a = u_i^a / D + delta m ubar_a / ((1 - delta) D)`
//! - cooperation: `V_i^c = ((1 - delta) u_i^c + delta m ubar_c) / ((1 - delta) D)`
//! - deviation:   `V_i^d = u_i^d + delta [(1 - m) V_i^a + m ubar_a / (1 - delta)]`
//!
//! with `D = 1 - delta (1 - m)`, `u_i^a`, `u_i^c`, `u_i^d` the per-period
//! utilities of the three regimes (grant folded in), and `ubar_a`, `ubar_c`
//! their cross-type means. The deviation continuation keeps the
//! `m ubar_a / (1 - delta)` form of the recursion algebra, where the sum of
//! autarky values collapses to `sum_j u_j^a / (1 - delta)`; the alternative
//! without the `1/(1 - delta)` factor does not solve the recursion and is not
//! used.

use crate::econ::{ContributionNorm, IncomeDistribution, Utility};
use crate::error::{Error, Result};

/// One fully specified economy except for the discount factor: incomes,
/// lump-sum grant, contribution norm, utility curvature, and mobility.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    incomes: Vec<f64>,
    grant: f64,
    norm: ContributionNorm,
    utility: Utility,
    mobility: f64,
    profile: ValueProfile,
}

/// Per-period utilities of the three regimes, precomputed once per economy.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ValueProfile {
    pub u_aut: Vec<f64>,
    pub u_coop: Vec<f64>,
    pub u_dev: Vec<f64>,
    pub u_aut_mean: f64,
    pub u_coop_mean: f64,
}

impl Economy {
    /// Builds an economy from raw income levels (non-negative, non-increasing).
    ///
    /// Every consumption value the model can feed to the utility function is
    /// evaluated here, so construction fails with a domain error whenever some
    /// regime would produce non-positive consumption (e.g. zero incomes with a
    /// zero grant).
    pub fn new(
        incomes: Vec<f64>,
        grant: f64,
        norm: ContributionNorm,
        utility: Utility,
        mobility: f64,
    ) -> Result<Self> {
        let n = incomes.len();
        if n < 2 {
            return Err(Error::Domain(format!("economy: need at least 2 income types, got {n}")));
        }
        if incomes.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Domain("economy: incomes must be finite and >= 0".into()));
        }
        if incomes.windows(2).any(|p| p[1] > p[0]) {
            return Err(Error::Domain("economy: incomes must be non-increasing".into()));
        }
        if !grant.is_finite() || grant < 0.0 {
            return Err(Error::Domain(format!("economy: grant must be >= 0, got {grant}")));
        }
        if !mobility.is_finite() || !(0.0..=1.0).contains(&mobility) {
            return Err(Error::Domain(format!(
                "economy: mobility must lie in [0, 1], got {mobility}"
            )));
        }
        let profile = ValueProfile::build(&incomes, grant, &norm, &utility)?;
        Ok(Self { incomes, grant, norm, utility, mobility, profile })
    }

    /// Convenience constructor from an income distribution.
    pub fn from_distribution(
        incomes: IncomeDistribution,
        grant: f64,
        norm: ContributionNorm,
        utility: Utility,
        mobility: f64,
    ) -> Result<Self> {
        Self::new(incomes.into_weights(), grant, norm, utility, mobility)
    }

    pub fn n(&self) -> usize {
        self.incomes.len()
    }

    pub fn incomes(&self) -> &[f64] {
        &self.incomes
    }

    pub fn grant(&self) -> f64 {
        self.grant
    }

    pub fn norm(&self) -> &ContributionNorm {
        &self.norm
    }

    pub fn utility(&self) -> &Utility {
        &self.utility
    }

    pub fn mobility(&self) -> f64 {
        self.mobility
    }

    /// True when incomes are strictly decreasing (positive inequality).
    pub fn strictly_ranked(&self) -> bool {
        self.incomes.windows(2).all(|p| p[1] < p[0])
    }

    /// Cooperative consumption of type `ty` (1-based): keep `1 - theta(w)` of
    /// income, receive an equal share of all contributions, plus the grant.
    pub fn coop_consumption(&self, ty: usize) -> f64 {
        let i = self.index(ty);
        let pool = self.contribution_pool();
        (1.0 - self.norm.share(self.incomes[i])) * self.incomes[i] + pool + self.grant
    }

    /// One-shot deviation consumption of type `ty`: keep everything, still
    /// receive the others' contributions, plus the grant.
    pub fn deviation_consumption(&self, ty: usize) -> f64 {
        let i = self.index(ty);
        let own = self.norm.share(self.incomes[i]) * self.incomes[i] / self.n() as f64;
        self.incomes[i] + (self.contribution_pool() - own) + self.grant
    }

    /// Autarky consumption of type `ty`: own income plus the grant.
    pub fn autarky_consumption(&self, ty: usize) -> f64 {
        self.incomes[self.index(ty)] + self.grant
    }

    /// Mean contribution `(1/n) sum_j theta(w_j) w_j`.
    fn contribution_pool(&self) -> f64 {
        let total: f64 = self.incomes.iter().map(|&w| self.norm.share(w) * w).sum();
        total / self.n() as f64
    }

    fn index(&self, ty: usize) -> usize {
        assert!(
            (1..=self.n()).contains(&ty),
            "type index {ty} out of range 1..={}",
            self.n()
        );
        ty - 1
    }

    pub(crate) fn profile(&self) -> &ValueProfile {
        &self.profile
    }

    /// Incentive gap `(V^c - V^d) (1 - delta)(1 - delta(1 - m))` for 0-based
    /// type `i`, evaluated directly so it stays finite as `delta -> 1`.
    pub(crate) fn normalized_gap_at(&self, delta: f64, i: usize) -> f64 {
        let p = &self.profile;
        let m = self.mobility;
        let d = delta;
        (1.0 - d) * p.u_coop[i] + d * m * p.u_coop_mean
            - (1.0 - d) * (1.0 - d * (1.0 - m)) * p.u_dev[i]
            - d * (1.0 - m) * (1.0 - d) * p.u_aut[i]
            - d * m * p.u_aut_mean
    }

    /// Minimum of the normalized gap over all types: positive exactly when
    /// every type weakly prefers the norm at `delta`.
    pub(crate) fn min_normalized_gap_at(&self, delta: f64) -> f64 {
        (0..self.n())
            .map(|i| self.normalized_gap_at(delta, i))
            .fold(f64::INFINITY, f64::min)
    }
}

impl ValueProfile {
    fn build(
        incomes: &[f64],
        grant: f64,
        norm: &ContributionNorm,
        utility: &Utility,
    ) -> Result<Self> {
        let n = incomes.len() as f64;
        let pool: f64 = incomes.iter().map(|&w| norm.share(w) * w).sum::<f64>() / n;
        let mut u_aut = Vec::with_capacity(incomes.len());
        let mut u_coop = Vec::with_capacity(incomes.len());
        let mut u_dev = Vec::with_capacity(incomes.len());
        for &w in incomes {
            let contribution = norm.share(w) * w;
            u_aut.push(utility.eval(w + grant)?);
            u_coop.push(utility.eval((1.0 - norm.share(w)) * w + pool + grant)?);
            u_dev.push(utility.eval(w + pool - contribution / n + grant)?);
        }
        let u_aut_mean = u_aut.iter().sum::<f64>() / n;
        let u_coop_mean = u_coop.iter().sum::<f64>() / n;
        Ok(Self { u_aut, u_coop, u_dev, u_aut_mean, u_coop_mean })
    }
}

/// An [`Economy`] bound to a discount factor `delta in [0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    economy: Economy,
    delta: f64,
}

impl Scenario {
    pub fn new(economy: Economy, delta: f64) -> Result<Self> {
        if !delta.is_finite() || !(0.0..1.0).contains(&delta) {
            return Err(Error::Domain(format!(
                "scenario: delta must lie in [0, 1), got {delta}"
            )));
        }
        Ok(Self { economy, delta })
    }

    pub fn economy(&self) -> &Economy {
        &self.economy
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.economy.n()
    }

    /// Expected discounted value of permanent autarky for type `ty` (1-based).
    pub fn value_autarky(&self, ty: usize) -> f64 {
        let i = self.economy.index(ty);
        let p = self.economy.profile();
        let m = self.economy.mobility;
        let d = self.delta;
        let dd = 1.0 - d * (1.0 - m);
        p.u_aut[i] / dd + d * m * p.u_aut_mean / ((1.0 - d) * dd)
    }

    /// Expected discounted value of following the norm forever.
    pub fn value_coop(&self, ty: usize) -> f64 {
        let i = self.economy.index(ty);
        let p = self.economy.profile();
        let m = self.economy.mobility;
        let d = self.delta;
        let dd = 1.0 - d * (1.0 - m);
        ((1.0 - d) * p.u_coop[i] + d * m * p.u_coop_mean) / ((1.0 - d) * dd)
    }

    /// Expected discounted value of the best one-shot deviation: free-ride for
    /// one period, then live in autarky.
    pub fn value_deviation(&self, ty: usize) -> f64 {
        let i = self.economy.index(ty);
        let p = self.economy.profile();
        let m = self.economy.mobility;
        let d = self.delta;
        let v_aut = self.value_autarky(ty);
        p.u_dev[i] + d * ((1.0 - m) * v_aut + m * p.u_aut_mean / (1.0 - d))
    }

    /// All three values for every type.
    pub fn value_triple(&self) -> ValueTriple {
        let n = self.n();
        ValueTriple {
            v_coop: (1..=n).map(|t| self.value_coop(t)).collect(),
            v_dev: (1..=n).map(|t| self.value_deviation(t)).collect(),
            v_aut: (1..=n).map(|t| self.value_autarky(t)).collect(),
        }
    }

    /// Raw incentive gap `V^c - V^d` and its normalized variant
    /// `(V^c - V^d)(1 - delta)(1 - delta(1 - m))`, which shares its sign and
    /// stays finite as `delta -> 1`.
    pub fn incentive_gap(&self, ty: usize) -> IncentiveGap {
        let i = self.economy.index(ty);
        IncentiveGap {
            raw: self.value_coop(ty) - self.value_deviation(ty),
            normalized: self.economy.normalized_gap_at(self.delta, i),
        }
    }
}

/// Expected discounted values per income type.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTriple {
    pub v_coop: Vec<f64>,
    pub v_dev: Vec<f64>,
    pub v_aut: Vec<f64>,
}

/// Incentive gap in raw and normalized form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentiveGap {
    pub raw: f64,
    pub normalized: f64,
}

/// Parameter bundle from which economies at different inequality levels are
/// built; used by the threshold, selection, and sweep layers.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomyTemplate {
    pub n: usize,
    pub grant: f64,
    pub norm: ContributionNorm,
    pub utility: Utility,
    pub mobility: f64,
}

impl EconomyTemplate {
    pub fn economy(&self, alpha: f64) -> Result<Economy> {
        let incomes = IncomeDistribution::new(self.n, alpha)?;
        Economy::from_distribution(incomes, self.grant, self.norm, self.utility, self.mobility)
    }

    pub fn economy_with_norm(&self, alpha: f64, norm: ContributionNorm) -> Result<Economy> {
        let incomes = IncomeDistribution::new(self.n, alpha)?;
        Economy::from_distribution(incomes, self.grant, norm, self.utility, self.mobility)
    }

    pub fn with_mobility(&self, mobility: f64) -> Self {
        Self { mobility, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::IncomeDistribution;
    use approx::assert_abs_diff_eq;

    fn economy(n: usize, alpha: f64, beta: f64, rho: f64, m: f64) -> Economy {
        Economy::from_distribution(
            IncomeDistribution::new(n, alpha).unwrap(),
            0.0,
            ContributionNorm::new(beta).unwrap(),
            Utility::new(rho).unwrap(),
            m,
        )
        .unwrap()
    }

    fn scenario(n: usize, alpha: f64, beta: f64, rho: f64, m: f64, delta: f64) -> Scenario {
        Scenario::new(economy(n, alpha, beta, rho, m), delta).unwrap()
    }

    #[test]
    fn coop_consumption_pools_everything_at_beta_zero() {
        let e = economy(3, 1.2, 0.0, 1.0, 0.5);
        for ty in 1..=3 {
            assert_abs_diff_eq!(e.coop_consumption(ty), 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn coop_consumption_is_neutral_under_equality() {
        let e = economy(4, 0.0, 2.0, 1.0, 0.5);
        for ty in 1..=4 {
            assert_abs_diff_eq!(e.coop_consumption(ty), 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn coop_consumption_two_types_proportional_norm() {
        // With n = 2 and beta = 1: x_i^c = (w1 + w2)/2 for both types.
        let e = economy(2, 1.0, 1.0, 1.0, 0.5);
        assert_abs_diff_eq!(e.coop_consumption(1), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(e.coop_consumption(2), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn autarky_value_closed_form_anchor() {
        // Frozen from a high-precision evaluation of the closed form:
        // u(w1) + delta * mean(u)/(1 - delta) at m = 1, delta = 0.5.
        let s = scenario(2, 1.0, 0.0, 1.0, 1.0, 0.5);
        assert_abs_diff_eq!(s.value_autarky(1), -1.126_523_375_036_445_6, epsilon = 1e-12);
        // The rounded value printed alongside the operation's contract.
        assert_abs_diff_eq!(s.value_autarky(1), -1.126_524, epsilon = 2e-6);
    }

    #[test]
    fn autarky_value_degenerate_chain() {
        let s = scenario(3, 0.8, 1.0, 2.0, 0.0, 0.6);
        let w = s.economy().incomes()[0];
        let expect = Utility::new(2.0).unwrap().eval(w).unwrap() / 0.4;
        assert_abs_diff_eq!(s.value_autarky(1), expect, epsilon = 1e-12);
    }

    #[test]
    fn autarky_value_no_future() {
        let s = scenario(3, 0.8, 1.0, 2.0, 0.4, 0.0);
        for ty in 1..=3 {
            let expect = Utility::new(2.0)
                .unwrap()
                .eval(s.economy().incomes()[ty - 1])
                .unwrap();
            assert_abs_diff_eq!(s.value_autarky(ty), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn coop_value_full_pooling_anchor() {
        // beta = 0, n = 2, rho = 1, delta = 0.5: u(1/2)/(1 - 1/2) for both types.
        let s = scenario(2, 1.0, 0.0, 1.0, 1.0, 0.5);
        for ty in 1..=2 {
            assert_abs_diff_eq!(s.value_coop(ty), -1.386_294_361_119_890_6, epsilon = 1e-12);
        }
    }

    #[test]
    fn coop_equals_autarky_under_equality() {
        // alpha = 0 means zero net transfers, so the two regimes coincide.
        for &beta in &[0.0, 1.0, 3.0] {
            let s = scenario(3, 0.0, beta, 2.0, 0.6, 0.8);
            for ty in 1..=3 {
                assert_abs_diff_eq!(s.value_coop(ty), s.value_autarky(ty), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn deviation_value_anchor() {
        // One-shot term ln(w1 + w2/2) plus the full-mobility autarky
        // continuation; frozen from high-precision evaluation.
        let s = scenario(2, 1.0, 0.0, 1.0, 1.0, 0.5);
        assert_abs_diff_eq!(s.economy().deviation_consumption(1), 0.865_529_289_315_002_4, epsilon = 1e-12);
        assert_abs_diff_eq!(s.value_deviation(1), -0.957_675_751_538_139_9, epsilon = 1e-12);
        assert_abs_diff_eq!(s.value_deviation(1), -0.957_672, epsilon = 1e-5);
    }

    #[test]
    fn deviation_value_no_future_and_frozen_chain() {
        let s0 = scenario(3, 1.0, 2.0, 0.5, 0.7, 0.0);
        assert_abs_diff_eq!(
            s0.value_deviation(2),
            s0.economy().utility().eval(s0.economy().deviation_consumption(2)).unwrap(),
            epsilon = 1e-12
        );
        // m = 0: one-shot term plus delta u(w_i)/(1 - delta).
        let s = scenario(3, 1.0, 2.0, 0.5, 0.0, 0.6);
        let e = s.economy();
        let u = e.utility();
        let expect = u.eval(e.deviation_consumption(1)).unwrap()
            + 0.6 * u.eval(e.incomes()[0]).unwrap() / 0.4;
        assert_abs_diff_eq!(s.value_deviation(1), expect, epsilon = 1e-12);
    }

    #[test]
    fn incentive_gap_anchors() {
        let s = scenario(2, 1.0, 0.0, 1.0, 1.0, 0.5);
        let gap = s.incentive_gap(1);
        assert_abs_diff_eq!(gap.raw, -0.428_618_609_581_750_7, epsilon = 1e-12);
        assert_abs_diff_eq!(gap.raw, -0.428_622, epsilon = 1e-5);
        assert!(gap.normalized < 0.0);

        let s9 = scenario(2, 1.0, 0.0, 1.0, 1.0, 0.9);
        let gap9 = s9.incentive_gap(1);
        assert_abs_diff_eq!(gap9.raw, 0.532_297_446_084_469_5, epsilon = 1e-12);
        assert_abs_diff_eq!(gap9.raw, 0.532_296, epsilon = 1e-5);
        assert!(gap9.normalized > 0.0);
    }

    #[test]
    fn gap_negative_under_equality_with_positive_norm() {
        // One-shot deviation gain with identical continuation values.
        for &delta in &[0.0, 0.5, 0.99] {
            let s = scenario(3, 0.0, 1.5, 1.0, 0.6, delta);
            assert!(s.incentive_gap(1).raw < 0.0);
            assert!(s.incentive_gap(1).normalized < 0.0);
        }
    }

    #[test]
    fn normalized_gap_matches_raw_scaled() {
        let s = scenario(4, 1.3, 2.0, 2.0, 0.45, 0.8);
        for ty in 1..=4 {
            let g = s.incentive_gap(ty);
            let scale = (1.0 - 0.8) * (1.0 - 0.8 * (1.0 - 0.45));
            assert_abs_diff_eq!(g.normalized, g.raw * scale, epsilon = 1e-10);
        }
    }

    #[test]
    fn zero_income_requires_grant() {
        let norm = ContributionNorm::new(1.0).unwrap();
        let u = Utility::new(1.0).unwrap();
        let err = Economy::new(vec![0.0, 0.0], 0.0, norm, u, 0.5);
        assert!(matches!(err, Err(Error::Domain(_))));
        // With a grant every consumption is the grant itself.
        let e = Economy::new(vec![0.0, 0.0], 0.25, norm, u, 0.5).unwrap();
        assert_abs_diff_eq!(e.coop_consumption(1), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(e.deviation_consumption(2), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(e.autarky_consumption(1), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn scenario_rejects_delta_one() {
        let e = economy(2, 1.0, 0.0, 1.0, 0.5);
        assert!(Scenario::new(e.clone(), 1.0).is_err());
        assert!(Scenario::new(e.clone(), -0.1).is_err());
        assert!(Scenario::new(e, 0.999_999).is_ok());
    }

    #[test]
    fn increasing_income_order_rejected() {
        let norm = ContributionNorm::new(1.0).unwrap();
        let u = Utility::new(1.0).unwrap();
        assert!(Economy::new(vec![0.2, 0.8], 0.0, norm, u, 0.5).is_err());
    }
}
