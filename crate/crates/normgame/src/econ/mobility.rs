use itertools::Itertools;

use crate::error::{Error, Result};

/// Largest `n` for which the n!-state ranking chain is materialized.
pub const MAX_STATE_N: usize = 6;

/// Exchange-mobility process over `n` ranked positions with parameter
/// `m in [0, 1]`: each period a player keeps their position with probability
/// `1 - (n-1) m / n` and moves to each other position with probability `m / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityProcess {
    n: usize,
    m: f64,
}

impl MobilityProcess {
    pub fn new(n: usize, m: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("mobility: n must be >= 2, got {n}")));
        }
        if !m.is_finite() || !(0.0..=1.0).contains(&m) {
            return Err(Error::Domain(format!("mobility: m must lie in [0, 1], got {m}")));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Probability of keeping the current position.
    pub fn stay_probability(&self) -> f64 {
        1.0 - (self.n - 1) as f64 * self.m / self.n as f64
    }

    /// Probability of moving to one specific other position.
    pub fn move_probability(&self) -> f64 {
        self.m / self.n as f64
    }

    /// The n x n single-player position transition matrix.
    pub fn position_matrix(&self) -> Vec<Vec<f64>> {
        let stay = self.stay_probability();
        let mov = self.move_probability();
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if i == j { stay } else { mov }).collect())
            .collect()
    }

    /// The n! x n! transition matrix over ranking states.
    ///
    /// Rows and columns follow [`enumerate_states`]. From a state, mass `m/n`
    /// is placed on each of its `n - 1` cyclic rotations (states in which no
    /// player keeps their position), and the remaining `1 - (n-1)m/n` on the
    /// diagonal. The per-player marginal of this chain is exactly
    /// [`Self::position_matrix`].
    pub fn state_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let states = checked_states(self.n)?;
        let index: std::collections::HashMap<&[usize], usize> = states
            .iter()
            .enumerate()
            .map(|(k, s)| (s.as_slice(), k))
            .collect();
        let stay = self.stay_probability();
        let mov = self.move_probability();
        let size = states.len();
        let mut matrix = vec![vec![0.0; size]; size];
        for (row, state) in states.iter().enumerate() {
            matrix[row][row] = stay;
            for k in 1..self.n {
                let rotated = rotate_state(state, k);
                let col = index[rotated.as_slice()];
                matrix[row][col] += mov;
            }
        }
        Ok(matrix)
    }
}

/// Ranking states for `n` players: all orderings, listed as the tuple of
/// players occupying positions `1..=n`, in lexicographic order.
pub fn enumerate_states(n: usize) -> Vec<Vec<usize>> {
    (1..=n).permutations(n).collect()
}

/// State reached when every player shifts `k` positions down the ranking,
/// wrapping around: the player at position `p` moves to position `p + k` mod n.
pub(crate) fn rotate_state(state: &[usize], k: usize) -> Vec<usize> {
    let n = state.len();
    (0..n).map(|q| state[(q + n - k % n) % n]).collect()
}

fn checked_states(n: usize) -> Result<Vec<Vec<usize>>> {
    if n > MAX_STATE_N {
        let states = (1..=n as u64).product();
        return Err(Error::Capacity { n, states, max_n: MAX_STATE_N });
    }
    Ok(enumerate_states(n))
}

/// Single-player position transition matrix (stay `1 - (n-1)m/n`, move `m/n`).
pub fn position_transition_matrix(n: usize, m: f64) -> Result<Vec<Vec<f64>>> {
    Ok(MobilityProcess::new(n, m)?.position_matrix())
}

/// Transition matrix over the n! ranking states; `n <= 6`.
pub fn state_transition_matrix(n: usize, m: f64) -> Result<Vec<Vec<f64>>> {
    MobilityProcess::new(n, m)?.state_matrix()
}

/// Prais mobility index `(K - trace) / (K - 1)` of a K x K row-stochastic
/// matrix.
pub fn prais_index(matrix: &[Vec<f64>]) -> Result<f64> {
    let k = matrix.len();
    if k < 2 {
        return Err(Error::Domain(format!("prais index: need K >= 2 rows, got {k}")));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != k {
            return Err(Error::Domain(format!(
                "prais index: matrix not square (row {i} has {} entries, expected {k})",
                row.len()
            )));
        }
        if row.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::Domain(format!("prais index: row {i} has a negative or non-finite entry")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "prais index: row {i} sums to {sum}, not 1 (matrix not stochastic)"
            )));
        }
    }
    let trace: f64 = (0..k).map(|i| matrix[i][i]).sum();
    Ok((k as f64 - trace) / (k as f64 - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_rows_stochastic(matrix: &[Vec<f64>]) {
        for row in matrix {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert!(row.iter().all(|p| *p >= 0.0));
        }
    }

    fn assert_symmetric(matrix: &[Vec<f64>]) {
        for i in 0..matrix.len() {
            for j in 0..matrix.len() {
                assert_abs_diff_eq!(matrix[i][j], matrix[j][i], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn position_matrix_full_mobility_is_uniform() {
        let p = position_transition_matrix(2, 1.0).unwrap();
        assert_eq!(p, vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    }

    #[test]
    fn position_matrix_zero_mobility_is_identity() {
        let p = position_transition_matrix(2, 0.0).unwrap();
        assert_eq!(p, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn position_matrix_three_types() {
        let p = position_transition_matrix(3, 0.6).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.6 } else { 0.2 };
                assert_abs_diff_eq!(p[i][j], expect, epsilon = 1e-15);
            }
        }
        assert_rows_stochastic(&p);
        assert_symmetric(&p);
    }

    #[test]
    fn state_matrix_matches_printed_three_type_pattern() {
        // States in lexicographic order: ijk, ikj, jik, jki, kij, kji.
        // Each row has the diagonal plus mass m/3 on the two states where
        // nobody keeps their position.
        let pattern: [(usize, [usize; 2]); 6] = [
            (0, [3, 4]), // ijk -> jki, kij
            (1, [2, 5]), // ikj -> jik, kji
            (2, [1, 5]), // jik -> ikj, kji
            (3, [0, 4]), // jki -> ijk, kij
            (4, [0, 3]), // kij -> ijk, jki
            (5, [1, 2]), // kji -> ikj, jik
        ];
        for m in [0.3, 0.6, 1.0] {
            let s = state_transition_matrix(3, m).unwrap();
            let diag = 1.0 - 2.0 * m / 3.0;
            let off = m / 3.0;
            for (row, cols) in pattern {
                for col in 0..6 {
                    let expect = if col == row {
                        diag
                    } else if cols.contains(&col) {
                        off
                    } else {
                        0.0
                    };
                    assert_abs_diff_eq!(s[row][col], expect, epsilon = 1e-15);
                }
            }
            assert_rows_stochastic(&s);
            assert_symmetric(&s);
        }
    }

    #[test]
    fn state_matrix_two_types_equals_position_matrix() {
        for &m in &[0.0, 0.3, 1.0] {
            let s = state_transition_matrix(2, m).unwrap();
            let p = position_transition_matrix(2, m).unwrap();
            assert_eq!(s, p);
        }
    }

    #[test]
    fn state_matrix_rows_sum_to_one_up_to_cap() {
        for n in 2..=MAX_STATE_N {
            let s = state_transition_matrix(n, 0.7).unwrap();
            assert_eq!(s.len(), (1..=n).product::<usize>());
            assert_rows_stochastic(&s);
            assert_symmetric(&s);
        }
    }

    #[test]
    fn state_matrix_marginal_equals_position_matrix() {
        // P(player at position p moves to position q) from the state chain.
        for n in 2..=4usize {
            for &m in &[0.25, 0.8] {
                let states = enumerate_states(n);
                let s = state_transition_matrix(n, m).unwrap();
                let p = position_transition_matrix(n, m).unwrap();
                let player = 1; // by symmetry any player works
                for from in 0..n {
                    let rows: Vec<usize> = states
                        .iter()
                        .enumerate()
                        .filter(|(_, st)| st[from] == player)
                        .map(|(k, _)| k)
                        .collect();
                    // Exact from every source state, not just on average.
                    for &r in &rows {
                        for to in 0..n {
                            let mass: f64 = states
                                .iter()
                                .enumerate()
                                .filter(|(_, st)| st[to] == player)
                                .map(|(c, _)| s[r][c])
                                .sum();
                            assert_abs_diff_eq!(mass, p[from][to], epsilon = 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn capacity_error_names_factorial_limit() {
        let err = state_transition_matrix(7, 0.5).unwrap_err();
        match err {
            Error::Capacity { n, states, max_n } => {
                assert_eq!((n, states, max_n), (7, 5040, 6));
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
        let msg = state_transition_matrix(7, 0.5).unwrap_err().to_string();
        assert!(msg.contains("5040") && msg.contains("n!"));
    }

    #[test]
    fn prais_of_identity_and_uniform() {
        let identity = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_abs_diff_eq!(prais_index(&identity).unwrap(), 0.0, epsilon = 1e-15);
        let uniform = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        assert_abs_diff_eq!(prais_index(&uniform).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn prais_of_position_matrix_is_m() {
        // trace = n - (n-1) m, so (n - trace)/(n - 1) = m. This is the value
        // the index actually takes on the position chain.
        for n in 2..=6usize {
            for &m in &[0.1, 0.5, 0.9] {
                let p = position_transition_matrix(n, m).unwrap();
                assert_abs_diff_eq!(prais_index(&p).unwrap(), m, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn prais_of_three_type_state_matrix_is_four_fifths_m() {
        // 6 states with diagonal 1 - 2m/3: (6 - (6 - 4m)) / 5 = 4m/5.
        let s = state_transition_matrix(3, 0.5).unwrap();
        assert_abs_diff_eq!(prais_index(&s).unwrap(), 0.4, epsilon = 1e-12);
    }

    #[test]
    fn prais_rejects_bad_input() {
        let ragged = vec![vec![1.0, 0.0], vec![1.0]];
        assert!(matches!(prais_index(&ragged), Err(Error::Domain(_))));
        let not_stochastic = vec![vec![0.9, 0.0], vec![0.0, 1.0]];
        assert!(matches!(prais_index(&not_stochastic), Err(Error::Domain(_))));
        let negative = vec![vec![1.2, -0.2], vec![0.0, 1.0]];
        assert!(matches!(prais_index(&negative), Err(Error::Domain(_))));
        let single = vec![vec![1.0]];
        assert!(matches!(prais_index(&single), Err(Error::Domain(_))));
    }
}
