//! Normal-form game representation and the exact regret / best-response /
//! expected-payoff kernel.
//!
//! Payoffs are stored as one dense row-major tensor per player (player 0 is
//! the slowest-varying axis). All operations are pure; every type is an
//! immutable value after construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the "weights sum to one" invariant of a mixed strategy.
pub const SUM_TOL: f64 = 1e-12;
/// Tolerance for the zero-sum payoff invariant on non-integer payoffs.
pub const ZERO_SUM_TOL: f64 = 1e-9;

/// A finite normal-form game `(N, (S_i), (u_i))` with dense payoff tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGame", into = "RawGame")]
pub struct NormalFormGame {
    num_players: usize,
    strategy_counts: Vec<usize>,
    /// One flattened row-major tensor of length `prod(strategy_counts)` per player.
    payoffs: Vec<Vec<f64>>,
    labels: Option<Vec<Vec<String>>>,
    zero_sum: bool,
}

/// Serialization mirror of [`NormalFormGame`]; validated on the way in.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawGame {
    num_players: usize,
    strategy_counts: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<Vec<String>>>,
    zero_sum: bool,
}

impl TryFrom<RawGame> for NormalFormGame {
    type Error = Error;
    fn try_from(raw: RawGame) -> Result<Self> {
        if raw.num_players != raw.strategy_counts.len() {
            return Err(Error::InvalidGame(format!(
                "num_players {} does not match {} strategy counts",
                raw.num_players,
                raw.strategy_counts.len()
            )));
        }
        NormalFormGame::new(raw.strategy_counts, raw.payoffs, raw.labels, raw.zero_sum)
    }
}

impl From<NormalFormGame> for RawGame {
    fn from(g: NormalFormGame) -> Self {
        RawGame {
            num_players: g.num_players,
            strategy_counts: g.strategy_counts,
            payoffs: g.payoffs,
            labels: g.labels,
            zero_sum: g.zero_sum,
        }
    }
}

impl NormalFormGame {
    /// Builds a game from per-player flattened payoff tensors.
    ///
    /// Tensors are row-major over pure profiles with player 0 slowest. The
    /// zero-sum flag is verified against the payoffs, not trusted.
    pub fn new(
        strategy_counts: Vec<usize>,
        payoffs: Vec<Vec<f64>>,
        labels: Option<Vec<Vec<String>>>,
        zero_sum: bool,
    ) -> Result<Self> {
        let num_players = strategy_counts.len();
        if num_players == 0 {
            return Err(Error::InvalidGame("at least one player required".into()));
        }
        if strategy_counts.contains(&0) {
            return Err(Error::InvalidGame("every player needs a strategy".into()));
        }
        if payoffs.len() != num_players {
            return Err(Error::InvalidGame(format!(
                "{} payoff tensors for {} players",
                payoffs.len(),
                num_players
            )));
        }
        let total: usize = strategy_counts.iter().product();
        for (p, tensor) in payoffs.iter().enumerate() {
            if tensor.len() != total {
                return Err(Error::InvalidGame(format!(
                    "player {p} tensor has {} entries, expected {total}",
                    tensor.len()
                )));
            }
            if tensor.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidGame(format!(
                    "player {p} tensor contains a non-finite entry"
                )));
            }
        }
        if let Some(ref ls) = labels {
            if ls.len() != num_players {
                return Err(Error::InvalidGame("label list per player required".into()));
            }
            for (p, l) in ls.iter().enumerate() {
                if l.len() != strategy_counts[p] {
                    return Err(Error::InvalidGame(format!(
                        "player {p} has {} labels for {} strategies",
                        l.len(),
                        strategy_counts[p]
                    )));
                }
            }
        }
        if zero_sum {
            for flat in 0..total {
                let s: f64 = payoffs.iter().map(|t| t[flat]).sum();
                if s.abs() > ZERO_SUM_TOL {
                    return Err(Error::InvalidGame(format!(
                        "zero_sum flag set but payoffs at flat index {flat} sum to {s}"
                    )));
                }
            }
        }
        Ok(NormalFormGame {
            num_players,
            strategy_counts,
            payoffs,
            labels,
            zero_sum,
        })
    }

    /// Convenience constructor for a 2-player zero-sum game from the row
    /// player's matrix; the column player's payoffs are the negation.
    pub fn zero_sum_from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 || rows[0].is_empty() {
            return Err(Error::InvalidGame("empty matrix".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGame("ragged matrix".into()));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let neg: Vec<f64> = flat.iter().map(|v| -v).collect();
        Self::new(vec![m, n], vec![flat, neg], None, true)
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.strategy_counts
    }

    pub fn num_strategies(&self, player: usize) -> usize {
        self.strategy_counts[player]
    }

    pub fn is_zero_sum(&self) -> bool {
        self.zero_sum
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    pub fn payoff_tensor(&self, player: usize) -> &[f64] {
        &self.payoffs[player]
    }

    /// Flat row-major index of a pure profile.
    pub fn flat_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.num_players);
        let mut idx = 0;
        for (p, &s) in profile.iter().enumerate() {
            debug_assert!(s < self.strategy_counts[p]);
            idx = idx * self.strategy_counts[p] + s;
        }
        idx
    }

    /// Payoff to `player` at a pure profile.
    pub fn payoff(&self, player: usize, profile: &[usize]) -> f64 {
        self.payoffs[player][self.flat_index(profile)]
    }

    fn check_profile(&self, profile: &MixedProfile) -> Result<()> {
        if profile.strategies().len() != self.num_players {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} strategies for {} players",
                profile.strategies().len(),
                self.num_players
            )));
        }
        for (p, s) in profile.strategies().iter().enumerate() {
            if s.len() != self.strategy_counts[p] {
                return Err(Error::DimensionMismatch(format!(
                    "player {p} mixture has {} weights for {} strategies",
                    s.len(),
                    self.strategy_counts[p]
                )));
            }
        }
        Ok(())
    }

    /// Exact multilinear expected payoff to `player` under a mixed profile.
    pub fn expected_payoff(&self, profile: &MixedProfile, player: usize) -> Result<f64> {
        self.check_profile(profile)?;
        if self.num_players == 2 {
            let x = profile.strategies()[0].weights();
            let y = profile.strategies()[1].weights();
            let n1 = self.strategy_counts[1];
            let t = &self.payoffs[player];
            let mut total = 0.0;
            for (i, &xi) in x.iter().enumerate() {
                if xi == 0.0 {
                    continue;
                }
                let row = &t[i * n1..(i + 1) * n1];
                let mut acc = 0.0;
                for (j, &yj) in y.iter().enumerate() {
                    acc += yj * row[j];
                }
                total += xi * acc;
            }
            return Ok(total);
        }
        let tensor = &self.payoffs[player];
        let mut total = 0.0;
        let mut indices = vec![0usize; self.num_players];
        for &v in tensor.iter() {
            let mut w = 1.0;
            for (p, &s) in indices.iter().enumerate() {
                w *= profile.strategies()[p].weights()[s];
            }
            total += w * v;
            advance(&mut indices, &self.strategy_counts);
        }
        Ok(total)
    }

    /// Payoff of each pure deviation for `player`, holding the other players
    /// to their mixtures. The player's own mixture is ignored.
    pub fn deviation_payoffs(&self, profile: &MixedProfile, player: usize) -> Result<Vec<f64>> {
        self.check_profile(profile)?;
        let n = self.strategy_counts[player];
        if self.num_players == 2 {
            let other = 1 - player;
            let w = profile.strategies()[other].weights();
            let n1 = self.strategy_counts[1];
            let t = &self.payoffs[player];
            let mut dev = vec![0.0; n];
            if player == 0 {
                for (k, d) in dev.iter_mut().enumerate() {
                    let row = &t[k * n1..(k + 1) * n1];
                    let mut acc = 0.0;
                    for (j, &wj) in w.iter().enumerate() {
                        acc += wj * row[j];
                    }
                    *d = acc;
                }
            } else {
                for (i, &wi) in w.iter().enumerate() {
                    if wi == 0.0 {
                        continue;
                    }
                    let row = &t[i * n1..(i + 1) * n1];
                    for (k, d) in dev.iter_mut().enumerate() {
                        *d += wi * row[k];
                    }
                }
            }
            return Ok(dev);
        }
        let tensor = &self.payoffs[player];
        let mut dev = vec![0.0; n];
        let mut indices = vec![0usize; self.num_players];
        for &v in tensor.iter() {
            let mut w = 1.0;
            for (p, &s) in indices.iter().enumerate() {
                if p != player {
                    w *= profile.strategies()[p].weights()[s];
                }
            }
            dev[indices[player]] += w * v;
            advance(&mut indices, &self.strategy_counts);
        }
        Ok(dev)
    }

    /// Best pure response for `player` against the other players' mixtures.
    /// Ties break toward the lowest strategy index.
    pub fn best_response(&self, profile: &MixedProfile, player: usize) -> Result<(usize, f64)> {
        let dev = self.deviation_payoffs(profile, player)?;
        let mut best = 0;
        let mut val = dev[0];
        for (k, &d) in dev.iter().enumerate().skip(1) {
            if d > val {
                best = k;
                val = d;
            }
        }
        Ok((best, val))
    }

    /// Maximum unilateral deviation gain for `player`; clamped at zero.
    pub fn player_regret(&self, profile: &MixedProfile, player: usize) -> Result<f64> {
        let (_, br) = self.best_response(profile, player)?;
        let u = self.expected_payoff(profile, player)?;
        Ok((br - u).max(0.0))
    }

    /// Regret of the profile: sum over player regrets.
    pub fn profile_regret_sum(&self, profile: &MixedProfile) -> Result<f64> {
        let mut total = 0.0;
        for p in 0..self.num_players {
            total += self.player_regret(profile, p)?;
        }
        Ok(total)
    }

    /// Max-over-players variant of profile regret.
    pub fn profile_regret_max(&self, profile: &MixedProfile) -> Result<f64> {
        let mut best = 0.0f64;
        for p in 0..self.num_players {
            best = best.max(self.player_regret(profile, p)?);
        }
        Ok(best)
    }

    /// Uniform mixed profile over this game's strategy sets.
    pub fn uniform_profile(&self) -> MixedProfile {
        MixedProfile::uniform(&self.strategy_counts)
    }

    /// Pure profile as a degenerate mixed profile.
    pub fn pure_profile(&self, strategies: &[usize]) -> MixedProfile {
        assert_eq!(strategies.len(), self.num_players);
        let mixed = strategies
            .iter()
            .zip(&self.strategy_counts)
            .map(|(&s, &n)| MixedStrategy::pure(n, s))
            .collect();
        MixedProfile::from_strategies(mixed)
    }
}

/// Odometer increment over a row-major index tuple.
fn advance(indices: &mut [usize], counts: &[usize]) {
    for p in (0..indices.len()).rev() {
        indices[p] += 1;
        if indices[p] < counts[p] {
            return;
        }
        indices[p] = 0;
    }
}

/// A probability distribution over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy {
    weights: Vec<f64>,
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;
    fn try_from(weights: Vec<f64>) -> Result<Self> {
        MixedStrategy::new(weights)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Self {
        s.weights
    }
}

impl MixedStrategy {
    /// Validates nonnegativity and that the weights sum to one within
    /// [`SUM_TOL`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weights must be finite and nonnegative: {weights:?}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(MixedStrategy { weights })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        MixedStrategy {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn pure(n: usize, index: usize) -> Self {
        assert!(index < n);
        let mut weights = vec![0.0; n];
        weights[index] = 1.0;
        MixedStrategy { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Support: indices with strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    strategies: Vec<MixedStrategy>,
}

impl MixedProfile {
    pub fn from_strategies(strategies: Vec<MixedStrategy>) -> Self {
        MixedProfile { strategies }
    }

    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        let strategies = weights
            .into_iter()
            .map(MixedStrategy::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(MixedProfile { strategies })
    }

    pub fn uniform(counts: &[usize]) -> Self {
        MixedProfile {
            strategies: counts.iter().map(|&n| MixedStrategy::uniform(n)).collect(),
        }
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn strategy(&self, player: usize) -> &MixedStrategy {
        &self.strategies[player]
    }

    pub fn num_players(&self) -> usize {
        self.strategies.len()
    }

    /// Compares two profiles coordinate-wise within `tol`.
    pub fn approx_eq(&self, other: &MixedProfile, tol: f64) -> bool {
        self.strategies.len() == other.strategies.len()
            && self.strategies.iter().zip(&other.strategies).all(|(a, b)| {
                a.len() == b.len()
                    && a.weights()
                        .iter()
                        .zip(b.weights())
                        .all(|(x, y)| (x - y).abs() <= tol)
            })
    }
}

/// Euclidean projection of `vector` onto `{x : x_k >= floor, sum x_k = 1}`.
///
/// Sort-based exact algorithm; `O(n log n)`. Feasible inputs are returned
/// unchanged, so the operator is idempotent. A floor of zero is the plain
/// probability simplex; positive floors implement the exploration bound used
/// by projected replicator dynamics.
pub fn project_to_simplex(vector: &[f64], floor: f64) -> Result<MixedStrategy> {
    let n = vector.len();
    if n == 0 {
        return Err(Error::InvalidDistribution("empty vector".into()));
    }
    if floor < 0.0 || !floor.is_finite() {
        return Err(Error::InvalidParameter(format!("negative floor {floor}")));
    }
    let mass = 1.0 - floor * n as f64;
    if mass < -SUM_TOL {
        return Err(Error::InfeasibleFloor { floor, dim: n });
    }
    // Already feasible: return verbatim. The acceptance band is tighter
    // than the MixedStrategy tolerance so iterated arithmetic on returned
    // points cannot drift past it.
    let sum: f64 = vector.iter().sum();
    if (sum - 1.0).abs() <= 1e-13 && vector.iter().all(|&v| v >= floor) {
        return MixedStrategy::new(vector.to_vec());
    }
    if mass <= 0.0 {
        // Only feasible point: everything at the floor.
        return MixedStrategy::new(vec![floor; n]);
    }
    // Project (vector - floor) onto the simplex scaled to `mass`.
    let shifted: Vec<f64> = vector.iter().map(|v| v - floor).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - mass) / (j + 1) as f64;
        if s - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    let mut projected: Vec<f64> = shifted
        .iter()
        .map(|&v| (v - theta).max(0.0) + floor)
        .collect();
    // Fold summation roundoff into the largest coordinate so downstream
    // sums stay exactly within tolerance even after long iteration chains.
    let total: f64 = projected.iter().sum();
    let residual = 1.0 - total;
    if residual != 0.0 {
        let top = projected
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        projected[top] = (projected[top] + residual).max(floor);
    }
    MixedStrategy::new(projected)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Table-style symmetric zero-sum 3x3 used throughout the tests.
    pub(crate) fn cyclic_game() -> NormalFormGame {
        NormalFormGame::zero_sum_from_matrix(vec![
            vec![0.0, -0.1, -3.0],
            vec![0.1, 0.0, 2.0],
            vec![3.0, -2.0, 0.0],
        ])
        .unwrap()
    }

    /// The handcrafted symmetric zero-sum game with an unstable empirical NE.
    pub(crate) fn unstable_game() -> NormalFormGame {
        NormalFormGame::zero_sum_from_matrix(vec![
            vec![0.0, -1.0, -2.0],
            vec![1.0, 0.0, -5.0],
            vec![2.0, 5.0, 0.0],
        ])
        .unwrap()
    }

    fn profile(ws: &[&[f64]]) -> MixedProfile {
        MixedProfile::new(ws.iter().map(|w| w.to_vec()).collect()).unwrap()
    }

    #[test]
    fn expected_payoff_on_pure_diagonal_is_zero() {
        let g = cyclic_game();
        let p = profile(&[&[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(g.expected_payoff(&p, 0).unwrap(), 0.0);
        assert_eq!(g.expected_payoff(&p, 1).unwrap(), 0.0);
    }

    #[test]
    fn expected_payoff_pure_profile_reads_entry_exactly() {
        let g = cyclic_game();
        for s0 in 0..3 {
            for s1 in 0..3 {
                let p = g.pure_profile(&[s0, s1]);
                assert_eq!(
                    g.expected_payoff(&p, 0).unwrap(),
                    g.payoff(0, &[s0, s1]),
                    "pure profile ({s0},{s1})"
                );
            }
        }
    }

    #[test]
    fn expected_payoff_mixed_half_half() {
        // Four corner entries 0, -3, 3, 0 each weighted 1/4.
        let g = cyclic_game();
        let p = profile(&[&[0.5, 0.0, 0.5], &[0.5, 0.0, 0.5]]);
        assert!(g.expected_payoff(&p, 0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn deviation_payoffs_against_pure_columns() {
        let g = cyclic_game();
        let opp_first = profile(&[&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]]);
        assert_eq!(
            g.deviation_payoffs(&opp_first, 0).unwrap(),
            vec![0.0, 0.1, 3.0]
        );
        let opp_third = profile(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(
            g.deviation_payoffs(&opp_third, 0).unwrap(),
            vec![-3.0, 2.0, 0.0]
        );
    }

    #[test]
    fn deviation_payoffs_against_mixture_average_columns() {
        let g = cyclic_game();
        let p = profile(&[&[1.0, 0.0, 0.0], &[0.5, 0.0, 0.5]]);
        let dev = g.deviation_payoffs(&p, 0).unwrap();
        assert!((dev[0] - -1.5).abs() < 1e-15);
        assert!((dev[1] - 1.05).abs() < 1e-15);
        assert!((dev[2] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn deviation_payoffs_ignore_own_mixture() {
        let g = cyclic_game();
        let a = profile(&[&[1.0, 0.0, 0.0], &[0.5, 0.0, 0.5]]);
        let b = profile(&[&[0.0, 0.0, 1.0], &[0.5, 0.0, 0.5]]);
        assert_eq!(
            g.deviation_payoffs(&a, 0).unwrap(),
            g.deviation_payoffs(&b, 0).unwrap()
        );
    }

    #[test]
    fn best_response_matches_exploration_steps() {
        let g = cyclic_game();
        let opp_first = g.pure_profile(&[0, 0]);
        assert_eq!(g.best_response(&opp_first, 0).unwrap(), (2, 3.0));
        let opp_third = g.pure_profile(&[0, 2]);
        assert_eq!(g.best_response(&opp_third, 0).unwrap(), (1, 2.0));
    }

    #[test]
    fn best_response_singleton_game() {
        let g = NormalFormGame::new(vec![1, 1], vec![vec![7.5], vec![-7.5]], None, true).unwrap();
        let p = g.pure_profile(&[0, 0]);
        assert_eq!(g.best_response(&p, 0).unwrap(), (0, 7.5));
    }

    #[test]
    fn best_response_ties_break_low() {
        let g = NormalFormGame::new(
            vec![3, 1],
            vec![vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 0.0]],
            None,
            false,
        )
        .unwrap();
        let p = MixedProfile::uniform(&[3, 1]);
        assert_eq!(g.best_response(&p, 0).unwrap().0, 0);
    }

    #[test]
    fn player_regret_values() {
        let unstable = unstable_game();
        let p = unstable.pure_profile(&[1, 1]);
        assert_eq!(unstable.player_regret(&p, 0).unwrap(), 5.0);

        let cyclic = cyclic_game();
        let q = cyclic.pure_profile(&[0, 0]);
        assert_eq!(cyclic.player_regret(&q, 0).unwrap(), 3.0);

        // Playing one's own best response yields zero regret.
        let r = cyclic.pure_profile(&[2, 0]);
        assert_eq!(cyclic.player_regret(&r, 0).unwrap(), 0.0);
    }

    #[test]
    fn pure_profile_regret_table() {
        let g = unstable_game();
        assert_eq!(g.profile_regret_sum(&g.pure_profile(&[0, 0])).unwrap(), 4.0);
        assert_eq!(g.profile_regret_sum(&g.pure_profile(&[1, 0])).unwrap(), 7.0);
        assert_eq!(g.profile_regret_sum(&g.pure_profile(&[0, 1])).unwrap(), 7.0);
        assert_eq!(
            g.profile_regret_sum(&g.pure_profile(&[1, 1])).unwrap(),
            10.0
        );
    }

    #[test]
    fn regret_zero_at_equilibrium() {
        let g = cyclic_game();
        let ne = g.pure_profile(&[1, 1]);
        assert_eq!(g.profile_regret_sum(&ne).unwrap(), 0.0);
        assert_eq!(g.profile_regret_max(&ne).unwrap(), 0.0);
    }

    #[test]
    fn regret_of_half_half_mixture() {
        let g = cyclic_game();
        let p = profile(&[&[0.5, 0.0, 0.5], &[0.5, 0.0, 0.5]]);
        assert!((g.profile_regret_sum(&p).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn regret_max_variant() {
        let g = unstable_game();
        // Player regrets at (a^2, a^1) are 1 and 6.
        let p = g.pure_profile(&[1, 0]);
        assert_eq!(g.profile_regret_max(&p).unwrap(), 6.0);

        // Symmetric profile in a symmetric game: max is half the sum.
        let cyclic = cyclic_game();
        let q = profile(&[&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]]);
        let sum = cyclic.profile_regret_sum(&q).unwrap();
        let max = cyclic.profile_regret_max(&q).unwrap();
        assert!((max - sum / 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_sum_flag_is_verified() {
        let bad = NormalFormGame::new(
            vec![2, 2],
            vec![vec![1.0; 4], vec![1.0; 4]],
            None,
            true,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = cyclic_game();
        let p = profile(&[&[1.0, 0.0], &[1.0, 0.0, 0.0]]);
        assert!(g.expected_payoff(&p, 0).is_err());
        assert!(g.deviation_payoffs(&p, 0).is_err());
    }

    /// Grid sweep over the floored simplex; the slow oracle the closed form
    /// is checked against.
    fn grid_project(vector: &[f64], floor: f64, step: f64) -> Vec<f64> {
        let n = vector.len();
        let ticks = (1.0 / step).round() as usize;
        let dist2 = |cand: &[f64]| -> f64 {
            cand.iter()
                .zip(vector)
                .map(|(a, b)| (a - b) * (a - b))
                .sum()
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut consider = |cand: Vec<f64>| {
            if cand.iter().any(|&c| c < floor - 1e-12) {
                return;
            }
            let d = dist2(&cand);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, cand));
            }
        };
        match n {
            2 => {
                for i in 0..=ticks {
                    let a = i as f64 * step;
                    consider(vec![a, 1.0 - a]);
                }
            }
            3 => {
                for i in 0..=ticks {
                    for j in 0..=(ticks - i) {
                        let a = i as f64 * step;
                        let b = j as f64 * step;
                        consider(vec![a, b, 1.0 - a - b]);
                    }
                }
            }
            _ => panic!("grid oracle supports dimension <= 3"),
        }
        best.unwrap().1
    }

    #[test]
    fn projection_known_points() {
        let p = project_to_simplex(&[0.5, 0.6], 0.0).unwrap();
        assert!((p.weights()[0] - 0.45).abs() < 1e-12);
        assert!((p.weights()[1] - 0.55).abs() < 1e-12);

        let q = project_to_simplex(&[2.0, -1.0], 0.0).unwrap();
        assert_eq!(q.weights(), &[1.0, 0.0]);
    }

    #[test]
    fn projection_feasible_input_returned_verbatim() {
        let v = [0.25, 0.35, 0.4];
        let p = project_to_simplex(&v, 0.0).unwrap();
        assert_eq!(p.weights(), &v);
        let p2 = project_to_simplex(&v, 0.05).unwrap();
        assert_eq!(p2.weights(), &v);
    }

    #[test]
    fn projection_matches_grid_oracle() {
        let cases: &[(&[f64], f64)] = &[
            (&[0.5, 0.6], 0.0),
            (&[2.0, -1.0], 0.0),
            (&[0.9, 0.9, 0.9], 0.0),
            (&[-0.2, 0.3, 0.1], 0.0),
            (&[0.8, 0.05, 0.4], 0.1),
            (&[1.4, -0.3], 0.25),
        ];
        for (v, floor) in cases {
            let exact = project_to_simplex(v, *floor).unwrap();
            let grid = grid_project(v, *floor, 1e-3);
            let d_exact: f64 = exact
                .weights()
                .iter()
                .zip(*v)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let d_grid: f64 = grid.iter().zip(*v).map(|(a, b)| (a - b) * (a - b)).sum();
            // The closed form can only be at least as close as the grid point,
            // and the grid resolves the objective to ~step^2.
            assert!(d_exact <= d_grid + 1e-12, "v={v:?} floor={floor}");
            assert!((d_exact - d_grid).abs() <= 1e-6, "v={v:?} floor={floor}");
        }
    }

    #[test]
    fn projection_floor_edge_cases() {
        assert!(matches!(
            project_to_simplex(&[0.5, 0.5, 0.5], 0.4),
            Err(Error::InfeasibleFloor { .. })
        ));
        // floor * n == 1: unique feasible point.
        let p = project_to_simplex(&[0.9, 0.1], 0.5).unwrap();
        assert_eq!(p.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn projection_output_feasible_and_idempotent() {
        let vs: Vec<Vec<f64>> = vec![
            vec![3.0, -2.0, 0.5, 0.1],
            vec![0.0, 0.0, 0.0],
            vec![-1.0, -2.0],
            vec![0.3, 0.3, 0.3, 0.3, 0.3],
        ];
        for v in vs {
            for floor in [0.0, 0.01, 0.1] {
                if floor * v.len() as f64 > 1.0 {
                    continue;
                }
                let p = project_to_simplex(&v, floor).unwrap();
                let sum: f64 = p.weights().iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12);
                assert!(p.weights().iter().all(|&w| w >= floor - 1e-15));
                let again = project_to_simplex(p.weights(), floor).unwrap();
                assert_eq!(again.weights(), p.weights());
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_mixture(n: usize) -> impl Strategy<Value = MixedStrategy> {
            proptest::collection::vec(0.0..1.0f64, n).prop_map(|raw| {
                let sum: f64 = raw.iter().sum();
                if sum <= 0.0 {
                    MixedStrategy::uniform(raw.len())
                } else {
                    project_to_simplex(
                        &raw.iter().map(|w| w / sum).collect::<Vec<_>>(),
                        0.0,
                    )
                    .unwrap()
                }
            })
        }

        fn arb_game_3x3() -> impl Strategy<Value = NormalFormGame> {
            proptest::collection::vec(-10.0..10.0f64, 9).prop_map(|flat| {
                NormalFormGame::zero_sum_from_matrix(
                    flat.chunks(3).map(|c| c.to_vec()).collect(),
                )
                .unwrap()
            })
        }

        proptest! {
            #[test]
            fn regret_ordering(game in arb_game_3x3(), a in arb_mixture(3), b in arb_mixture(3)) {
                let p = MixedProfile::from_strategies(vec![a, b]);
                let sum = game.profile_regret_sum(&p).unwrap();
                let max = game.profile_regret_max(&p).unwrap();
                prop_assert!(max >= 0.0);
                prop_assert!(max <= sum + 1e-12);
                prop_assert!(sum <= 2.0 * max + 1e-12);
            }

            #[test]
            fn expected_payoff_affine_in_one_mixture(
                game in arb_game_3x3(),
                a in arb_mixture(3),
                b in arb_mixture(3),
                opp in arb_mixture(3),
                lambda in 0.0..1.0f64,
            ) {
                let mix: Vec<f64> = a
                    .weights()
                    .iter()
                    .zip(b.weights())
                    .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                    .collect();
                let blend = project_to_simplex(&mix, 0.0).unwrap();
                let at = |s: MixedStrategy| {
                    let p = MixedProfile::from_strategies(vec![s, opp.clone()]);
                    game.expected_payoff(&p, 0).unwrap()
                };
                let lhs = at(blend);
                let rhs = lambda * at(a) + (1.0 - lambda) * at(b);
                prop_assert!((lhs - rhs).abs() < 1e-9);
            }

            #[test]
            fn best_response_dominates_expected(game in arb_game_3x3(), a in arb_mixture(3), b in arb_mixture(3)) {
                let p = MixedProfile::from_strategies(vec![a, b]);
                for player in 0..2 {
                    let (_, br) = game.best_response(&p, player).unwrap();
                    let u = game.expected_payoff(&p, player).unwrap();
                    prop_assert!(br >= u - 1e-12);
                }
            }

            #[test]
            fn zero_sum_payoffs_cancel(game in arb_game_3x3(), a in arb_mixture(3), b in arb_mixture(3)) {
                let p = MixedProfile::from_strategies(vec![a, b]);
                let total: f64 = (0..2)
                    .map(|pl| game.expected_payoff(&p, pl).unwrap())
                    .sum();
                prop_assert!(total.abs() < 1e-9);
            }

            #[test]
            fn projection_feasible(v in proptest::collection::vec(-5.0..5.0f64, 1..6)) {
                let p = project_to_simplex(&v, 0.0).unwrap();
                let sum: f64 = p.weights().iter().sum();
                prop_assert!((sum - 1.0).abs() <= 1e-12);
                prop_assert!(p.weights().iter().all(|&w| w >= 0.0));
                let again = project_to_simplex(p.weights(), 0.0).unwrap();
                prop_assert_eq!(again.weights(), p.weights());
            }
        }
    }
}
