//! Constructors for the games the toolkit experiments on: hand-crafted
//! matrices, seeded random zero-sum games, the Kuhn-poker normal form, and
//! random sub-game sampling.
//!
//! All generators are deterministic functions of their spec. Seeded
//! generators use `ChaCha8Rng::seed_from_u64`, which is portable across
//! platforms, so published seeds reproduce payoff tensors bit-exactly.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::restriction::{restrict, EmpiricalGame};

/// Declarative description of a generatable game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameSpec {
    Example1,
    UnstableNe,
    RandomZeroSum {
        strategies_per_player: usize,
        payoff_low: i64,
        payoff_high: i64,
        seed: u64,
    },
    KuhnNormalForm,
}

impl GameSpec {
    pub fn build(&self) -> Result<NormalFormGame> {
        match self {
            GameSpec::Example1 => Ok(example1_game()),
            GameSpec::UnstableNe => Ok(unstable_ne_game()),
            GameSpec::RandomZeroSum {
                strategies_per_player,
                payoff_low,
                payoff_high,
                seed,
            } => random_zero_sum(*strategies_per_player, *payoff_low, *payoff_high, *seed),
            GameSpec::KuhnNormalForm => Ok(kuhn_normal_form()),
        }
    }
}

fn strategy_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("a{i}")).collect()
}

/// The symmetric zero-sum 3x3 game with a cyclic off-equilibrium structure.
pub fn example1_game() -> NormalFormGame {
    let mut g = NormalFormGame::zero_sum_from_matrix(vec![
        vec![0.0, -0.1, -3.0],
        vec![0.1, 0.0, 2.0],
        vec![3.0, -2.0, 0.0],
    ])
    .unwrap();
    g = with_labels(g, strategy_labels(3));
    g
}

/// The handcrafted symmetric zero-sum game whose empirical NE at
/// `(a2, a2)` is the most unstable pure profile.
pub fn unstable_ne_game() -> NormalFormGame {
    let mut g = NormalFormGame::zero_sum_from_matrix(vec![
        vec![0.0, -1.0, -2.0],
        vec![1.0, 0.0, -5.0],
        vec![2.0, 5.0, 0.0],
    ])
    .unwrap();
    g = with_labels(g, strategy_labels(3));
    g
}

fn with_labels(g: NormalFormGame, labels: Vec<String>) -> NormalFormGame {
    let counts = g.strategy_counts().to_vec();
    let payoffs = (0..g.num_players())
        .map(|p| g.payoff_tensor(p).to_vec())
        .collect();
    let per_player = vec![labels; counts.len()];
    NormalFormGame::new(counts, payoffs, Some(per_player), g.is_zero_sum()).unwrap()
}

/// 2-player zero-sum game with i.i.d. uniform integer payoffs in
/// `[low, high]` for the row player. Deterministic for a fixed seed.
pub fn random_zero_sum(n: usize, low: i64, high: i64, seed: u64) -> Result<NormalFormGame> {
    if n == 0 {
        return Err(Error::InvalidGame("need at least one strategy".into()));
    }
    if low > high {
        return Err(Error::InvalidParameter(format!(
            "payoff_low {low} exceeds payoff_high {high}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(low..=high) as f64).collect())
        .collect();
    NormalFormGame::zero_sum_from_matrix(rows)
}

/// Number of pure strategies per player in the Kuhn normal form: one binary
/// decision at each of 6 information sets (3 cards x 2 decision points).
pub const KUHN_STRATEGIES: usize = 64;

/// Bit position of a card/decision pair in the 6-bit Kuhn strategy encoding.
///
/// Cards are ordered J=0, Q=1, K=2; `decision_point` is 0 or 1. A set bit is
/// the aggressive action (bet at the first point, call at the second).
/// Player 1's points are (initial check/bet, fold/call after check-then-bet);
/// player 2's are (check/bet after a check, fold/call after a bet).
pub fn kuhn_bit(card: usize, decision_point: usize) -> usize {
    debug_assert!(card < 3 && decision_point < 2);
    2 * card + decision_point
}

/// Net chips to player 1 when pure strategies `s1`, `s2` play out the deal
/// `(card1, card2)`. Ante 1, bet size 1; higher card wins showdowns.
fn kuhn_playout(s1: usize, s2: usize, card1: usize, card2: usize) -> i64 {
    let bit = |s: usize, card: usize, dp: usize| (s >> kuhn_bit(card, dp)) & 1;
    let showdown = |stake: i64| if card1 > card2 { stake } else { -stake };
    if bit(s1, card1, 0) == 1 {
        // Player 1 bets; player 2 faces a bet.
        if bit(s2, card2, 1) == 1 {
            showdown(2)
        } else {
            1
        }
    } else if bit(s2, card2, 0) == 1 {
        // Check then bet; player 1 faces a bet.
        if bit(s1, card1, 1) == 1 {
            showdown(2)
        } else {
            -1
        }
    } else {
        showdown(1)
    }
}

/// The 64x64 normal form of Kuhn's poker.
///
/// Payoffs are exact expectations over the 6 equiprobable deals, computed by
/// exhaustive play-out of every deal for every pure-strategy pair; each entry
/// is an exact multiple of 1/6.
pub fn kuhn_normal_form() -> NormalFormGame {
    let n = KUHN_STRATEGIES;
    let mut rows = vec![vec![0.0; n]; n];
    for (s1, row) in rows.iter_mut().enumerate() {
        for (s2, entry) in row.iter_mut().enumerate() {
            let mut total: i64 = 0;
            for card1 in 0..3 {
                for card2 in 0..3 {
                    if card1 != card2 {
                        total += kuhn_playout(s1, s2, card1, card2);
                    }
                }
            }
            *entry = total as f64 / 6.0;
        }
    }
    NormalFormGame::zero_sum_from_matrix(rows).unwrap()
}

/// Uniformly samples a sub-game with `size` strategies per player, without
/// replacement; indices are sorted ascending. Deterministic per seed.
pub fn sample_subgame(
    game: &Arc<NormalFormGame>,
    size: usize,
    seed: u64,
) -> Result<EmpiricalGame> {
    let min_count = game
        .strategy_counts()
        .iter()
        .copied()
        .min()
        .expect("game has players");
    if size == 0 || size > min_count {
        return Err(Error::InvalidParameter(format!(
            "subgame size {size} out of range 1..={min_count}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = Vec::with_capacity(game.num_players());
    for player in 0..game.num_players() {
        let mut picked = sample(&mut rng, game.num_strategies(player), size).into_vec();
        picked.sort_unstable();
        indices.push(picked);
    }
    restrict(game, indices)
}
