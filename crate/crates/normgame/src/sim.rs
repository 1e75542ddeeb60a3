//! Independent Monte Carlo oracle: simulates the position and ranking chains
//! and the three strategy regimes to validate the closed-form values.
//!
//! Replications are seeded individually from the base seed, the replication
//! index, the regime, and the type, so results are bit-identical regardless
//! of how the work is scheduled across threads. Aggregation uses pairwise
//! summation, which is order-insensitive by construction here because the
//! per-replication values are collected in index order first.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::econ::rotate_state;
use crate::error::{Error, Result};
use crate::value::Scenario;

/// Largest `n` for which the n!-state ranking chain is simulated.
pub const MAX_SIM_STATE_N: usize = 4;

/// Strategy regime simulated by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Everyone contributes the norm share every period.
    Cooperate,
    /// Zero contribution in period 0 while others follow the norm, then
    /// permanent autarky for everyone.
    Deviate,
    /// Zero contributions always.
    Autarky,
}

impl Strategy {
    fn seed_word(self) -> u64 {
        match self {
            Strategy::Cooperate => 1,
            Strategy::Deviate => 2,
            Strategy::Autarky => 3,
        }
    }
}

/// Simulation size: horizon per path, number of replications, base seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub horizon: usize,
    pub replications: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(horizon: usize, replications: usize, seed: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Domain("sim config: horizon must be >= 1".into()));
        }
        if replications == 0 {
            return Err(Error::Domain("sim config: replications must be >= 1".into()));
        }
        Ok(Self { horizon, replications, seed })
    }

    /// Horizon chosen so the truncation bound `delta^T u_range / (1 - delta)`
    /// falls below `tolerance` for this scenario.
    pub fn for_tolerance(
        scenario: &Scenario,
        tolerance: f64,
        replications: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "sim config: tolerance must be > 0, got {tolerance}"
            )));
        }
        let delta = scenario.delta();
        let u_range = utility_range(scenario);
        let horizon = if delta == 0.0 || u_range == 0.0 {
            1
        } else {
            let t = (tolerance * (1.0 - delta) / u_range).ln() / delta.ln();
            (t.ceil().max(1.0) as usize).min(100_000_000)
        };
        Self::new(horizon, replications, seed)
    }
}

/// Monte Carlo estimate with its sampling error and the analytic cap on the
/// truncation error from the finite horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by sqrt(replications).
    pub stderr: f64,
    /// `delta^T u_range / (1 - delta)`.
    pub truncation_bound: f64,
}

/// Deterministic seed derivation: absorbs each word into a splitmix64 chain.
pub fn derive_seed(base: u64, words: &[u64]) -> u64 {
    let mut state = splitmix64(base);
    for &w in words {
        state = splitmix64(state ^ w.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    }
    state
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Single-player position path (1-based positions), `path[0] = start`.
pub fn simulate_positions(
    n: usize,
    m: f64,
    start: usize,
    horizon: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if n < 2 {
        return Err(Error::Domain(format!("simulate_positions: n must be >= 2, got {n}")));
    }
    if !m.is_finite() || !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("simulate_positions: m must lie in [0, 1], got {m}")));
    }
    if !(1..=n).contains(&start) {
        return Err(Error::Domain(format!(
            "simulate_positions: start position {start} out of 1..={n}"
        )));
    }
    if horizon == 0 {
        return Err(Error::Domain("simulate_positions: horizon must be >= 1".into()));
    }
    let stay = 1.0 - (n - 1) as f64 * m / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = Vec::with_capacity(horizon);
    let mut pos = start - 1;
    path.push(start);
    for _ in 1..horizon {
        pos = step_position(&mut rng, pos, n, stay);
        path.push(pos + 1);
    }
    Ok(path)
}

#[inline]
fn step_position(rng: &mut ChaCha8Rng, pos: usize, n: usize, stay: f64) -> usize {
    let u: f64 = rng.random();
    if u < stay {
        pos
    } else {
        let k = rng.random_range(0..n - 1);
        if k < pos {
            k
        } else {
            k + 1
        }
    }
}

/// Ranking-state path; states are the player-by-position tuples of
/// [`crate::econ::enumerate_states`]. Capped at n = 4 (24 states).
pub fn simulate_states(
    n: usize,
    m: f64,
    start: &[usize],
    horizon: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(Error::Domain(format!("simulate_states: n must be >= 2, got {n}")));
    }
    if n > MAX_SIM_STATE_N {
        let states = (1..=n as u64).product();
        return Err(Error::Capacity { n, states, max_n: MAX_SIM_STATE_N });
    }
    if !m.is_finite() || !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("simulate_states: m must lie in [0, 1], got {m}")));
    }
    let mut sorted = start.to_vec();
    sorted.sort_unstable();
    if start.len() != n || sorted != (1..=n).collect::<Vec<_>>() {
        return Err(Error::Domain(format!(
            "simulate_states: start {start:?} is not a permutation of 1..={n}"
        )));
    }
    if horizon == 0 {
        return Err(Error::Domain("simulate_states: horizon must be >= 1".into()));
    }
    let stay = 1.0 - (n - 1) as f64 * m / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = Vec::with_capacity(horizon);
    let mut state = start.to_vec();
    path.push(state.clone());
    for _ in 1..horizon {
        let u: f64 = rng.random();
        if u >= stay {
            let k = rng.random_range(1..n);
            state = rotate_state(&state, k);
        }
        path.push(state.clone());
    }
    Ok(path)
}

/// Monte Carlo estimate of the expected discounted value of `strategy` for
/// type `ty` (1-based), over `config.replications` independent position paths
/// truncated at `config.horizon`.
pub fn estimate_value(
    strategy: Strategy,
    scenario: &Scenario,
    ty: usize,
    config: &SimConfig,
) -> SimEstimate {
    let economy = scenario.economy();
    let n = economy.n();
    assert!((1..=n).contains(&ty), "type index {ty} out of range 1..={n}");
    let profile = economy.profile();
    let delta = scenario.delta();
    let m = economy.mobility();
    let stay = 1.0 - (n - 1) as f64 * m / n as f64;
    let horizon = config.horizon;

    let u_flow: &[f64] = match strategy {
        Strategy::Cooperate => &profile.u_coop,
        _ => &profile.u_aut,
    };
    let u_first = match strategy {
        Strategy::Cooperate => profile.u_coop[ty - 1],
        Strategy::Deviate => profile.u_dev[ty - 1],
        Strategy::Autarky => profile.u_aut[ty - 1],
    };

    let values: Vec<f64> = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(
                config.seed,
                &[rep as u64, strategy.seed_word(), ty as u64],
            );
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pos = ty - 1;
            let mut discount = 1.0;
            let mut total = u_first;
            for _ in 1..horizon {
                pos = step_position(&mut rng, pos, n, stay);
                discount *= delta;
                total += discount * u_flow[pos];
            }
            total
        })
        .collect();

    let r = config.replications as f64;
    let mean = pairwise_sum(&values) / r;
    let stderr = if config.replications > 1 {
        let squares: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        (pairwise_sum(&squares) / (r - 1.0)).sqrt() / r.sqrt()
    } else {
        0.0
    };
    SimEstimate {
        mean,
        stderr,
        truncation_bound: truncation_bound(scenario, horizon),
    }
}

/// `delta^T u_range / (1 - delta)` for the scenario's flow utilities.
pub fn truncation_bound(scenario: &Scenario, horizon: usize) -> f64 {
    let delta = scenario.delta();
    if delta == 0.0 {
        return 0.0;
    }
    delta.powi(horizon as i32) * utility_range(scenario) / (1.0 - delta)
}

fn utility_range(scenario: &Scenario) -> f64 {
    let p = scenario.economy().profile();
    p.u_aut
        .iter()
        .chain(&p.u_coop)
        .chain(&p.u_dev)
        .fold(0.0f64, |acc, u| acc.max(u.abs()))
}

fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::{position_transition_matrix, ContributionNorm, IncomeDistribution, Utility};
    use crate::value::Economy;
    use approx::assert_abs_diff_eq;

    fn scenario(n: usize, alpha: f64, beta: f64, rho: f64, m: f64, delta: f64) -> Scenario {
        let economy = Economy::from_distribution(
            IncomeDistribution::new(n, alpha).unwrap(),
            0.0,
            ContributionNorm::new(beta).unwrap(),
            Utility::new(rho).unwrap(),
            m,
        )
        .unwrap();
        Scenario::new(economy, delta).unwrap()
    }

    #[test]
    fn zero_mobility_path_is_constant() {
        let path = simulate_positions(4, 0.0, 3, 500, 7).unwrap();
        assert_eq!(path.len(), 500);
        assert!(path.iter().all(|&p| p == 3));
    }

    #[test]
    fn full_mobility_switch_frequency() {
        // n = 2, m = 1: switching probability 1/2; binomial 3-sigma band.
        let steps = 100_000;
        let path = simulate_positions(2, 1.0, 1, steps + 1, 42).unwrap();
        let switches = path.windows(2).filter(|w| w[0] != w[1]).count() as f64;
        let freq = switches / steps as f64;
        let sigma = (0.25f64 / steps as f64).sqrt();
        assert!((freq - 0.5).abs() <= 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn one_step_frequencies_match_position_matrix() {
        let (n, m, steps) = (3usize, 0.6, 300_000usize);
        let path = simulate_positions(n, m, 1, steps + 1, 11).unwrap();
        let p = position_transition_matrix(n, m).unwrap();
        let mut counts = vec![vec![0usize; n]; n];
        for w in path.windows(2) {
            counts[w[0] - 1][w[1] - 1] += 1;
        }
        for i in 0..n {
            let row_total: usize = counts[i].iter().sum();
            for j in 0..n {
                let freq = counts[i][j] as f64 / row_total as f64;
                let sigma = (p[i][j] * (1.0 - p[i][j]) / row_total as f64).sqrt();
                assert!(
                    (freq - p[i][j]).abs() <= 3.0 * sigma,
                    "cell ({i},{j}): freq {freq} vs {}",
                    p[i][j]
                );
            }
        }
    }

    #[test]
    fn state_paths_constant_at_zero_mobility_and_capped() {
        let path = simulate_states(3, 0.0, &[2, 1, 3], 100, 5).unwrap();
        assert!(path.iter().all(|s| s == &[2, 1, 3]));
        assert!(matches!(
            simulate_states(5, 0.5, &[1, 2, 3, 4, 5], 10, 0),
            Err(Error::Capacity { .. })
        ));
        assert!(simulate_states(3, 0.5, &[1, 1, 3], 10, 0).is_err());
    }

    #[test]
    fn state_marginal_matches_position_chain() {
        // Player 1's position frequencies from the state chain vs the
        // single-player matrix, 3-sigma per cell.
        let (n, m, steps) = (3usize, 0.7, 200_000usize);
        let path = simulate_states(n, m, &[1, 2, 3], steps + 1, 123).unwrap();
        let p = position_transition_matrix(n, m).unwrap();
        let pos_of = |state: &[usize]| state.iter().position(|&pl| pl == 1).unwrap();
        let mut counts = vec![vec![0usize; n]; n];
        for w in path.windows(2) {
            counts[pos_of(&w[0])][pos_of(&w[1])] += 1;
        }
        for i in 0..n {
            let row_total: usize = counts[i].iter().sum();
            for j in 0..n {
                let freq = counts[i][j] as f64 / row_total as f64;
                let sigma = (p[i][j] * (1.0 - p[i][j]) / row_total as f64).sqrt();
                assert!((freq - p[i][j]).abs() <= 3.0 * sigma, "cell ({i},{j})");
            }
        }
    }

    #[test]
    fn two_player_states_agree_with_positions_in_distribution() {
        let steps = 50_000;
        let spath = simulate_states(2, 0.8, &[1, 2], steps, 9).unwrap();
        let share_first = spath.iter().filter(|s| s[0] == 1).count() as f64 / steps as f64;
        let sigma = (0.25f64 / steps as f64).sqrt();
        assert!((share_first - 0.5).abs() <= 4.0 * sigma);
    }

    #[test]
    fn myopic_estimate_is_exact_with_zero_variance() {
        let s = scenario(3, 1.0, 1.0, 1.0, 0.5, 0.0);
        let config = SimConfig::for_tolerance(&s, 1e-6, 50, 1).unwrap();
        assert_eq!(config.horizon, 1);
        let est = estimate_value(Strategy::Cooperate, &s, 2, &config);
        assert!(est.stderr <= 1e-12);
        assert_eq!(est.truncation_bound, 0.0);
        let expect = s
            .economy()
            .utility()
            .eval(s.economy().coop_consumption(2))
            .unwrap();
        assert_abs_diff_eq!(est.mean, expect, epsilon = 1e-15);
    }

    #[test]
    fn frozen_chain_autarky_is_a_geometric_sum() {
        let s = scenario(3, 0.9, 1.0, 2.0, 0.0, 0.6);
        let config = SimConfig::new(40, 8, 3).unwrap();
        let est = estimate_value(Strategy::Autarky, &s, 1, &config);
        let u1 = s.economy().utility().eval(s.economy().incomes()[0]).unwrap();
        let expect = u1 * (1.0 - 0.6f64.powi(40)) / 0.4;
        assert!(est.stderr <= 1e-12);
        assert_abs_diff_eq!(est.mean, expect, epsilon = 1e-10);
    }

    #[test]
    fn estimate_agrees_with_closed_form_anchor() {
        let s = scenario(2, 1.0, 0.0, 1.0, 1.0, 0.5);
        let config = SimConfig::for_tolerance(&s, 1e-4, 4000, 2024).unwrap();
        let est = estimate_value(Strategy::Autarky, &s, 1, &config);
        let closed = s.value_autarky(1);
        assert_abs_diff_eq!(closed, -1.126_523_375_036_445_6, epsilon = 1e-12);
        assert!(
            (est.mean - closed).abs() <= 3.0 * est.stderr + est.truncation_bound,
            "mean {} vs closed {closed} (stderr {}, trunc {})",
            est.mean,
            est.stderr,
            est.truncation_bound
        );
    }

    #[test]
    fn estimates_are_reproducible_across_pool_sizes() {
        let s = scenario(3, 1.0, 2.0, 1.5, 0.7, 0.8);
        let config = SimConfig::for_tolerance(&s, 1e-4, 3000, 77).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate_value(Strategy::Deviate, &s, 2, &config));
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| estimate_value(Strategy::Deviate, &s, 2, &config));
        assert_eq!(single.mean.to_bits(), multi.mean.to_bits());
        assert_eq!(single.stderr.to_bits(), multi.stderr.to_bits());
    }

    #[test]
    fn seed_derivation_separates_words() {
        let a = derive_seed(42, &[0, 1, 2]);
        let b = derive_seed(42, &[0, 1, 3]);
        let c = derive_seed(42, &[0, 1, 2]);
        assert_ne!(a, b);
        assert_eq!(a, c);
        assert_ne!(derive_seed(42, &[1, 0, 2]), derive_seed(42, &[0, 1, 2]));
    }

    #[test]
    fn input_validation() {
        assert!(simulate_positions(1, 0.5, 1, 10, 0).is_err());
        assert!(simulate_positions(3, 1.5, 1, 10, 0).is_err());
        assert!(simulate_positions(3, 0.5, 4, 10, 0).is_err());
        assert!(simulate_positions(3, 0.5, 1, 0, 0).is_err());
        assert!(SimConfig::new(0, 10, 0).is_err());
        assert!(SimConfig::new(10, 0, 0).is_err());
    }
}
