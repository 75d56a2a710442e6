//! The PSRO driver: iteratively solve the empirical game with a
//! meta-strategy solver, best-respond in the full game, and extend the
//! strategy sets.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{MixedProfile, NormalFormGame};
use crate::restriction::{restrict, EmpiricalGame};
use crate::solvers::{MetaSolver, SolverHistory};

/// One PSRO iteration record.
///
/// `strategy_indices`, `meta_profile` and `generation_sequence` describe the
/// state the meta-strategy solver saw; `br_indices` / `br_was_new` describe
/// the best responses computed from it, which extend the sets for the next
/// iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// 1-based iteration number.
    pub iteration: usize,
    /// Per-player full-game strategy indices, in generation order.
    pub strategy_indices: Vec<Vec<usize>>,
    /// Solver output over the empirical game at this checkpoint.
    pub meta_profile: MixedProfile,
    /// Per-player full-game best response to the lifted meta-profile.
    pub br_indices: Vec<usize>,
    /// Whether each best response extended that player's set.
    pub br_was_new: Vec<bool>,
    /// Per-player generation sequence the solver saw (initial strategy
    /// first, duplicates included).
    pub generation_sequence: Vec<Vec<usize>>,
}

/// A complete PSRO run over a fixed full game.
#[derive(Debug, Clone)]
pub struct PsroTrace {
    full_game: Arc<NormalFormGame>,
    mss: MetaSolver,
    initial_indices: Vec<usize>,
    seed: u64,
    checkpoints: Vec<Checkpoint>,
    converged_at: Option<usize>,
}

impl PsroTrace {
    pub fn full_game(&self) -> &Arc<NormalFormGame> {
        &self.full_game
    }

    pub fn mss(&self) -> &MetaSolver {
        &self.mss
    }

    pub fn initial_indices(&self) -> &[usize] {
        &self.initial_indices
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    pub fn len(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }

    /// Iteration at which the run was flagged converged, if it stopped early.
    pub fn converged_at(&self) -> Option<usize> {
        self.converged_at
    }

    /// Strategy sets after the final iteration's additions.
    pub fn final_indices(&self) -> Vec<Vec<usize>> {
        let last = self.checkpoints.last().expect("nonempty trace");
        let mut sets = last.strategy_indices.clone();
        for (player, set) in sets.iter_mut().enumerate() {
            let br = last.br_indices[player];
            if last.br_was_new[player] {
                set.push(br);
            }
        }
        sets
    }

    /// Flat CSV rows: (iteration, player, added_index, was_new).
    pub fn csv_rows(&self) -> Vec<(usize, usize, usize, bool)> {
        self.checkpoints
            .iter()
            .flat_map(|cp| {
                cp.br_indices
                    .iter()
                    .zip(&cp.br_was_new)
                    .enumerate()
                    .map(move |(player, (&idx, &new))| (cp.iteration, player, idx, new))
            })
            .collect()
    }
}

/// Serializable form of a trace; the full game travels by reference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDocument {
    /// Path or name of the serialized full game, resolved by the caller.
    pub game_ref: Option<String>,
    pub mss: MetaSolver,
    pub initial_indices: Vec<usize>,
    pub seed: u64,
    pub converged_at: Option<usize>,
    pub checkpoints: Vec<Checkpoint>,
}

impl PsroTrace {
    pub fn to_document(&self, game_ref: Option<String>) -> TraceDocument {
        TraceDocument {
            game_ref,
            mss: self.mss.clone(),
            initial_indices: self.initial_indices.clone(),
            seed: self.seed,
            converged_at: self.converged_at,
            checkpoints: self.checkpoints.clone(),
        }
    }

    /// Reattaches a document to its full game, revalidating the structural
    /// invariants (monotone sets, meta-profile support, index ranges).
    pub fn from_document(doc: TraceDocument, full_game: Arc<NormalFormGame>) -> Result<Self> {
        if doc.checkpoints.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let players = full_game.num_players();
        let mut prev_sets: Option<&Vec<Vec<usize>>> = None;
        for cp in &doc.checkpoints {
            if cp.strategy_indices.len() != players
                || cp.br_indices.len() != players
                || cp.br_was_new.len() != players
                || cp.generation_sequence.len() != players
                || cp.meta_profile.num_players() != players
            {
                return Err(Error::InvalidGame(format!(
                    "checkpoint {} does not cover every player",
                    cp.iteration
                )));
            }
            for p in 0..players {
                let limit = full_game.num_strategies(p);
                if cp.strategy_indices[p].iter().any(|&i| i >= limit)
                    || cp.br_indices[p] >= limit
                {
                    return Err(Error::IndexOutOfRange {
                        player: p,
                        index: cp.br_indices[p],
                        limit,
                    });
                }
                if cp.meta_profile.strategy(p).len() != cp.strategy_indices[p].len() {
                    return Err(Error::DimensionMismatch(format!(
                        "checkpoint {} meta-profile does not match strategy set",
                        cp.iteration
                    )));
                }
                if let Some(prev) = prev_sets {
                    if !prev[p].iter().all(|i| cp.strategy_indices[p].contains(i)) {
                        return Err(Error::InvalidGame(format!(
                            "strategy sets shrink at checkpoint {}",
                            cp.iteration
                        )));
                    }
                }
            }
            prev_sets = Some(&cp.strategy_indices);
        }
        Ok(PsroTrace {
            full_game,
            mss: doc.mss,
            initial_indices: doc.initial_indices,
            seed: doc.seed,
            converged_at: doc.converged_at,
            checkpoints: doc.checkpoints,
        })
    }

    /// Builds a trace directly from checkpoints. Intended for synthetic
    /// evaluation scenarios; validates like [`PsroTrace::from_document`].
    pub fn from_checkpoints(
        full_game: Arc<NormalFormGame>,
        mss: MetaSolver,
        initial_indices: Vec<usize>,
        seed: u64,
        checkpoints: Vec<Checkpoint>,
    ) -> Result<Self> {
        let doc = TraceDocument {
            game_ref: None,
            mss,
            initial_indices,
            seed,
            converged_at: None,
            checkpoints,
        };
        Self::from_document(doc, full_game)
    }
}

/// Runs PSRO for up to `max_iterations` iterations.
///
/// Each iteration solves the current empirical game with the meta-strategy
/// solver, best-responds to the lifted profile in the full game for every
/// player simultaneously, and appends any best response not already present.
/// Duplicate best responses still advance the generation sequence (the
/// fictitious-play counts). The run stops early, flagged converged, once no
/// player adds a strategy and the meta-profile repeats within 1e-12.
///
/// The run is deterministic: the seed is recorded for provenance and feeds
/// nothing in the current solver set (best response is exact; all solvers
/// are deterministic).
pub fn run_psro(
    full_game: Arc<NormalFormGame>,
    mss: MetaSolver,
    initial_indices: Vec<usize>,
    max_iterations: usize,
    seed: u64,
) -> Result<PsroTrace> {
    let players = full_game.num_players();
    if initial_indices.len() != players {
        return Err(Error::DimensionMismatch(format!(
            "{} initial strategies for {} players",
            initial_indices.len(),
            players
        )));
    }
    for (player, &idx) in initial_indices.iter().enumerate() {
        if idx >= full_game.num_strategies(player) {
            return Err(Error::IndexOutOfRange {
                player,
                index: idx,
                limit: full_game.num_strategies(player),
            });
        }
    }
    if max_iterations == 0 {
        return Err(Error::InvalidParameter("max_iterations must be >= 1".into()));
    }

    let mut sets: Vec<Vec<usize>> = initial_indices.iter().map(|&i| vec![i]).collect();
    let mut sequences: Vec<Vec<usize>> = sets.clone();
    let mut checkpoints: Vec<Checkpoint> = Vec::new();
    let mut converged_at = None;

    for iteration in 1..=max_iterations {
        let step = || -> Result<Checkpoint> {
            let emp = restrict(&full_game, sets.clone())?;
            let history = SolverHistory {
                sequences: &sequences,
            };
            let meta_profile = mss.solve(&emp, Some(&history))?;
            let lifted = emp.lift_profile(&meta_profile)?;
            let mut br_indices = Vec::with_capacity(players);
            for player in 0..players {
                let (idx, _) = full_game.best_response(&lifted, player)?;
                br_indices.push(idx);
            }
            let br_was_new: Vec<bool> = br_indices
                .iter()
                .enumerate()
                .map(|(player, idx)| !sets[player].contains(idx))
                .collect();
            Ok(Checkpoint {
                iteration,
                strategy_indices: sets.clone(),
                meta_profile,
                br_indices,
                br_was_new,
                generation_sequence: sequences.clone(),
            })
        };
        let checkpoint = step().map_err(|source| Error::PsroIteration {
            iteration,
            source: Box::new(source),
        })?;

        let mut any_new = false;
        for player in 0..players {
            let idx = checkpoint.br_indices[player];
            if checkpoint.br_was_new[player] {
                sets[player].push(idx);
                any_new = true;
            }
            sequences[player].push(idx);
        }

        let repeated = !any_new
            && checkpoints
                .last()
                .is_some_and(|prev| prev.meta_profile.approx_eq(&checkpoint.meta_profile, 1e-12));
        checkpoints.push(checkpoint);
        if repeated {
            converged_at = Some(iteration);
            break;
        }
    }

    Ok(PsroTrace {
        full_game,
        mss,
        initial_indices,
        seed,
        checkpoints,
        converged_at,
    })
}

/// Reconstructs the empirical game a checkpoint's solver saw.
pub fn trace_empirical_game(trace: &PsroTrace, iteration: usize) -> Result<EmpiricalGame> {
    let cp = trace
        .checkpoints
        .iter()
        .find(|cp| cp.iteration == iteration)
        .ok_or_else(|| {
            Error::InvalidParameter(format!("trace has no checkpoint for iteration {iteration}"))
        })?;
    restrict(trace.full_game(), cp.strategy_indices.clone())
}
