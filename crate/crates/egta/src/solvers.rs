//! Meta-strategy solvers: functions from an empirical game (plus PSRO
//! history where needed) to a profile within it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{project_to_simplex, MixedProfile, MixedStrategy};
use crate::lp::solve_matrix_game;
use crate::restriction::EmpiricalGame;

/// Default projected-replicator-dynamics parameters.
pub const PRD_DEFAULT_DT: f64 = 1e-3;
pub const PRD_DEFAULT_STEPS: u64 = 100_000;
pub const PRD_DEFAULT_FLOOR: f64 = 1e-10;

/// A meta-strategy solver and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetaSolver {
    /// Exact NE of the empirical game via the minimax LP (2-player zero-sum).
    Nash,
    /// Replicator dynamics from the uniform profile.
    Rd { dt: f64, steps: u64 },
    /// Replicator dynamics with a per-strategy probability floor, each step
    /// projected back onto the floored simplex.
    Prd { dt: f64, steps: u64, floor: f64 },
    /// Uniform distribution over the generation sequence (fictitious play).
    Uniform,
    /// Pure profile on each player's most recently generated strategy.
    SelfPlay,
}

impl MetaSolver {
    pub fn prd_default() -> Self {
        MetaSolver::Prd {
            dt: PRD_DEFAULT_DT,
            steps: PRD_DEFAULT_STEPS,
            floor: PRD_DEFAULT_FLOOR,
        }
    }

    /// CLI-facing name.
    pub fn name(&self) -> &'static str {
        match self {
            MetaSolver::Nash => "nash",
            MetaSolver::Rd { .. } => "rd",
            MetaSolver::Prd { .. } => "prd",
            MetaSolver::Uniform => "uniform",
            MetaSolver::SelfPlay => "self_play",
        }
    }

    /// Whether the solver reads the PSRO generation history rather than the
    /// empirical game payoffs.
    pub fn needs_history(&self) -> bool {
        matches!(self, MetaSolver::Uniform | MetaSolver::SelfPlay)
    }

    /// Applies the solver to an empirical game.
    ///
    /// `history` carries the per-player generation sequences and is required
    /// by the history-based solvers (`Uniform`, `SelfPlay`).
    pub fn solve(
        &self,
        emp: &EmpiricalGame,
        history: Option<&SolverHistory>,
    ) -> Result<MixedProfile> {
        match self {
            MetaSolver::Nash => nash_lp(emp),
            MetaSolver::Rd { dt, steps } => replicator_dynamics(emp, *dt, *steps),
            MetaSolver::Prd { dt, steps, floor } => prd(emp, *dt, *steps, *floor),
            MetaSolver::Uniform => {
                let h = history.ok_or(Error::EmptyTrace)?;
                uniform_fp(emp, h)
            }
            MetaSolver::SelfPlay => {
                let h = history.ok_or(Error::EmptyTrace)?;
                self_play(emp, h)
            }
        }
    }
}

/// Generation history a history-based solver needs: per player, the
/// full-game indices generated so far, initial strategy first, duplicates
/// included.
#[derive(Debug, Clone)]
pub struct SolverHistory<'a> {
    pub sequences: &'a [Vec<usize>],
}

/// Exact NE of a 2-player zero-sum empirical game by the minimax LP.
pub fn nash_lp(emp: &EmpiricalGame) -> Result<MixedProfile> {
    let game = emp.game();
    if game.num_players() != 2 || !game.is_zero_sum() {
        return Err(Error::Unsupported(
            "NE solver requires a 2-player zero-sum game".into(),
        ));
    }
    let (m, n) = (game.num_strategies(0), game.num_strategies(1));
    let tensor = game.payoff_tensor(0);
    let matrix: Vec<Vec<f64>> = (0..m).map(|i| tensor[i * n..(i + 1) * n].to_vec()).collect();
    let (row, col, _value) = solve_matrix_game(&matrix)?;
    // LP roundoff can leave coordinates a hair outside the simplex.
    let row = project_to_simplex(&row, 0.0)?;
    let col = project_to_simplex(&col, 0.0)?;
    Ok(MixedProfile::from_strategies(vec![row, col]))
}

/// Replicator dynamics on the empirical game, starting from uniform.
///
/// Each step applies `w(s) <- w(s) + dt * w(s) * (dev(s) - u)` per player
/// simultaneously, clamps any negative weight, and renormalizes.
pub fn replicator_dynamics(emp: &EmpiricalGame, dt: f64, steps: u64) -> Result<MixedProfile> {
    evolve(emp, dt, steps, None)
}

/// Projected replicator dynamics: a replicator step followed by Euclidean
/// projection onto the floored simplex, so every coordinate stays >= floor.
pub fn prd(emp: &EmpiricalGame, dt: f64, steps: u64, floor: f64) -> Result<MixedProfile> {
    for count in emp.strategy_counts() {
        if floor * count as f64 > 1.0 {
            return Err(Error::InfeasibleFloor {
                floor,
                dim: count,
            });
        }
    }
    evolve(emp, dt, steps, Some(floor))
}

fn evolve(emp: &EmpiricalGame, dt: f64, steps: u64, floor: Option<f64>) -> Result<MixedProfile> {
    if dt < 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("step size {dt}")));
    }
    let game = emp.game();
    let players = game.num_players();
    let mut profile = game.uniform_profile();
    if let Some(g) = floor {
        // Start from the projected uniform point so the floor invariant holds
        // from step zero.
        profile = project_profile(&profile, g)?;
    }
    for _ in 0..steps {
        let mut next = Vec::with_capacity(players);
        for p in 0..players {
            let dev = game.deviation_payoffs(&profile, p)?;
            let weights = profile.strategy(p).weights();
            let expected: f64 = dev.iter().zip(weights).map(|(d, w)| d * w).sum();
            let raw: Vec<f64> = weights
                .iter()
                .zip(&dev)
                .map(|(w, d)| w + dt * w * (d - expected))
                .collect();
            let updated = match floor {
                Some(g) => project_to_simplex(&raw, g)?,
                None => {
                    let clamped: Vec<f64> = raw.iter().map(|w| w.max(0.0)).collect();
                    let total: f64 = clamped.iter().sum();
                    MixedStrategy::new(clamped.iter().map(|w| w / total).collect())?
                }
            };
            next.push(updated);
        }
        profile = MixedProfile::from_strategies(next);
    }
    Ok(profile)
}

fn project_profile(profile: &MixedProfile, floor: f64) -> Result<MixedProfile> {
    let strategies = profile
        .strategies()
        .iter()
        .map(|s| project_to_simplex(s.weights(), floor))
        .collect::<Result<Vec<_>>>()?;
    Ok(MixedProfile::from_strategies(strategies))
}

/// Fictitious-play weights: per player, the empirical frequency of each
/// strategy in the generation sequence (initial strategy and duplicate best
/// responses both count).
pub fn uniform_fp(emp: &EmpiricalGame, history: &SolverHistory) -> Result<MixedProfile> {
    if history.sequences.len() != emp.num_players() {
        return Err(Error::DimensionMismatch(
            "history does not cover every player".into(),
        ));
    }
    let mut strategies = Vec::with_capacity(emp.num_players());
    for (player, sequence) in history.sequences.iter().enumerate() {
        if sequence.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let indices = &emp.indices()[player];
        let mut counts = vec![0usize; indices.len()];
        for &full_index in sequence {
            let pos = indices.iter().position(|&i| i == full_index).ok_or_else(|| {
                Error::InvalidDistribution(format!(
                    "generated strategy {full_index} missing from player {player}'s restriction"
                ))
            })?;
            counts[pos] += 1;
        }
        let len = sequence.len() as f64;
        strategies.push(MixedStrategy::new(
            counts.iter().map(|&c| c as f64 / len).collect(),
        )?);
    }
    Ok(MixedProfile::from_strategies(strategies))
}

/// Pure profile on each player's most recently generated strategy.
pub fn self_play(emp: &EmpiricalGame, history: &SolverHistory) -> Result<MixedProfile> {
    if history.sequences.len() != emp.num_players() {
        return Err(Error::DimensionMismatch(
            "history does not cover every player".into(),
        ));
    }
    let mut strategies = Vec::with_capacity(emp.num_players());
    for (player, sequence) in history.sequences.iter().enumerate() {
        let &last = sequence.last().ok_or(Error::EmptyTrace)?;
        let indices = &emp.indices()[player];
        let pos = indices.iter().position(|&i| i == last).ok_or_else(|| {
            Error::InvalidDistribution(format!(
                "latest strategy {last} missing from player {player}'s restriction"
            ))
        })?;
        strategies.push(MixedStrategy::pure(indices.len(), pos));
    }
    Ok(MixedProfile::from_strategies(strategies))
}
