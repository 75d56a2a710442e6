//! Empirical games: a full game restricted to explored strategy sets, with
//! payoffs projected exactly from the full game.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{MixedProfile, MixedStrategy, NormalFormGame};

/// A restriction of a full game to per-player strategy index sets.
///
/// The projected payoff tensor is materialized as a [`NormalFormGame`] of its
/// own, so every kernel operation applies to the empirical game directly.
/// Strategy order follows the index lists as given (PSRO appends in
/// generation order).
#[derive(Debug, Clone)]
pub struct EmpiricalGame {
    full: Arc<NormalFormGame>,
    indices: Vec<Vec<usize>>,
    projected: NormalFormGame,
}

impl EmpiricalGame {
    /// Full game this restriction was taken from.
    pub fn full_game(&self) -> &Arc<NormalFormGame> {
        &self.full
    }

    /// Per-player full-game strategy indices, in restriction order.
    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    /// The projected game over the restricted sets.
    pub fn game(&self) -> &NormalFormGame {
        &self.projected
    }

    pub fn num_players(&self) -> usize {
        self.indices.len()
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.indices.iter().map(Vec::len).collect()
    }

    /// Appends one full-game strategy for `player`.
    ///
    /// Returns `Ok(None)` when the index is already present — PSRO uses this
    /// to detect a no-add iteration. Existing payoff entries are unchanged.
    pub fn add_strategy(&self, player: usize, full_index: usize) -> Result<Option<EmpiricalGame>> {
        if player >= self.indices.len() {
            return Err(Error::DimensionMismatch(format!(
                "player {player} out of range"
            )));
        }
        if full_index >= self.full.num_strategies(player) {
            return Err(Error::IndexOutOfRange {
                player,
                index: full_index,
                limit: self.full.num_strategies(player),
            });
        }
        if self.indices[player].contains(&full_index) {
            return Ok(None);
        }
        let mut indices = self.indices.clone();
        indices[player].push(full_index);
        restrict(&self.full, indices).map(Some)
    }

    /// Maps a profile over the empirical game onto the full game, placing
    /// zero mass on unexplored strategies.
    pub fn lift_profile(&self, profile: &MixedProfile) -> Result<MixedProfile> {
        if profile.num_players() != self.indices.len() {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} players, empirical game {}",
                profile.num_players(),
                self.indices.len()
            )));
        }
        let mut lifted = Vec::with_capacity(self.indices.len());
        for (player, mixture) in profile.strategies().iter().enumerate() {
            if mixture.len() != self.indices[player].len() {
                return Err(Error::DimensionMismatch(format!(
                    "player {player} mixture has {} weights for {} strategies",
                    mixture.len(),
                    self.indices[player].len()
                )));
            }
            let mut weights = vec![0.0; self.full.num_strategies(player)];
            for (pos, &full_index) in self.indices[player].iter().enumerate() {
                weights[full_index] = mixture.weights()[pos];
            }
            lifted.push(MixedStrategy::new(weights)?);
        }
        Ok(MixedProfile::from_strategies(lifted))
    }

    /// Maps a full-game profile into this restriction. Errors if the profile
    /// places mass on a strategy outside the restricted sets.
    pub fn project_profile(&self, full_profile: &MixedProfile) -> Result<MixedProfile> {
        if full_profile.num_players() != self.indices.len() {
            return Err(Error::DimensionMismatch("player count mismatch".into()));
        }
        let mut projected = Vec::with_capacity(self.indices.len());
        for (player, mixture) in full_profile.strategies().iter().enumerate() {
            if mixture.len() != self.full.num_strategies(player) {
                return Err(Error::DimensionMismatch(format!(
                    "player {player} mixture is not over the full game"
                )));
            }
            let mut weights = vec![0.0; self.indices[player].len()];
            for (pos, &full_index) in self.indices[player].iter().enumerate() {
                weights[pos] = mixture.weights()[full_index];
            }
            let covered: f64 = weights.iter().sum();
            let total: f64 = mixture.weights().iter().sum();
            if (covered - total).abs() > 1e-12 {
                return Err(Error::InvalidDistribution(format!(
                    "player {player} profile has mass outside the restriction"
                )));
            }
            projected.push(MixedStrategy::new(weights)?);
        }
        Ok(MixedProfile::from_strategies(projected))
    }

    /// Re-expresses a profile over `from` in this (larger) restriction,
    /// assigning zero weight to strategies absent from `from`.
    pub fn transfer_profile(
        &self,
        from: &EmpiricalGame,
        profile: &MixedProfile,
    ) -> Result<MixedProfile> {
        self.project_profile(&from.lift_profile(profile)?)
    }
}

/// Restricts `full` to the given per-player index lists, copying payoffs.
pub fn restrict(full: &Arc<NormalFormGame>, indices: Vec<Vec<usize>>) -> Result<EmpiricalGame> {
    if indices.len() != full.num_players() {
        return Err(Error::DimensionMismatch(format!(
            "{} index lists for {} players",
            indices.len(),
            full.num_players()
        )));
    }
    for (player, list) in indices.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::InvalidGame(format!(
                "player {player} restriction is empty"
            )));
        }
        let mut seen = BTreeSet::new();
        for &idx in list {
            if idx >= full.num_strategies(player) {
                return Err(Error::IndexOutOfRange {
                    player,
                    index: idx,
                    limit: full.num_strategies(player),
                });
            }
            if !seen.insert(idx) {
                return Err(Error::DuplicateIndex { player, index: idx });
            }
        }
    }

    let counts: Vec<usize> = indices.iter().map(Vec::len).collect();
    let total: usize = counts.iter().product();
    let players = full.num_players();
    let mut payoffs = vec![Vec::with_capacity(total); players];
    let mut emp_profile = vec![0usize; players];
    let mut full_profile = vec![0usize; players];
    for _ in 0..total {
        for p in 0..players {
            full_profile[p] = indices[p][emp_profile[p]];
        }
        let flat = full.flat_index(&full_profile);
        for (p, tensor) in payoffs.iter_mut().enumerate() {
            tensor.push(full.payoff_tensor(p)[flat]);
        }
        // Odometer over the empirical profile space.
        for p in (0..players).rev() {
            emp_profile[p] += 1;
            if emp_profile[p] < counts[p] {
                break;
            }
            emp_profile[p] = 0;
        }
    }

    let labels = full.labels().map(|ls| {
        indices
            .iter()
            .zip(ls)
            .map(|(list, l)| list.iter().map(|&i| l[i].clone()).collect())
            .collect()
    });
    let projected = NormalFormGame::new(counts, payoffs, labels, full.is_zero_sum())?;
    Ok(EmpiricalGame {
        full: Arc::clone(full),
        indices,
        projected,
    })
}

/// Union of strategy sets across runs, restricted from the full game.
///
/// The per-player union is deduplicated and sorted ascending so combined
/// games are canonical regardless of input order.
pub fn combine(
    strategy_sets: &[Vec<Vec<usize>>],
    full: &Arc<NormalFormGame>,
) -> Result<EmpiricalGame> {
    let players = full.num_players();
    let mut union: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); players];
    for sets in strategy_sets {
        if sets.len() != players {
            return Err(Error::DimensionMismatch(format!(
                "strategy set covers {} players, game has {players}",
                sets.len()
            )));
        }
        for (player, list) in sets.iter().enumerate() {
            union[player].extend(list.iter().copied());
        }
    }
    if union.iter().any(BTreeSet::is_empty) {
        return Err(Error::InvalidGame("empty union".into()));
    }
    restrict(
        full,
        union.into_iter().map(|s| s.into_iter().collect()).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_game() -> Arc<NormalFormGame> {
        Arc::new(
            NormalFormGame::zero_sum_from_matrix(vec![
                vec![0.0, -0.1, -3.0],
                vec![0.1, 0.0, 2.0],
                vec![3.0, -2.0, 0.0],
            ])
            .unwrap(),
        )
    }

    #[test]
    fn restrict_to_single_strategy() {
        let full = cyclic_game();
        let emp = restrict(&full, vec![vec![0], vec![0]]).unwrap();
        assert_eq!(emp.game().strategy_counts(), &[1, 1]);
        assert_eq!(emp.game().payoff(0, &[0, 0]), 0.0);
        assert_eq!(emp.game().payoff(1, &[0, 0]), 0.0);
    }

    #[test]
    fn restrict_full_indices_is_identity() {
        let full = cyclic_game();
        let emp = restrict(&full, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        assert_eq!(emp.game(), full.as_ref());
    }

    #[test]
    fn restrict_of_restriction_is_identity_on_payoffs() {
        let full = cyclic_game();
        let emp = restrict(&full, vec![vec![0, 2], vec![1, 2]]).unwrap();
        let inner = Arc::new(emp.game().clone());
        let again = restrict(&inner, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(again.game().payoff_tensor(0), emp.game().payoff_tensor(0));
        assert_eq!(again.game().payoff_tensor(1), emp.game().payoff_tensor(1));
    }

    #[test]
    fn restrict_submatrix() {
        let full = cyclic_game();
        let emp = restrict(&full, vec![vec![0, 2], vec![0, 2]]).unwrap();
        assert_eq!(emp.game().payoff_tensor(0), &[0.0, -3.0, 3.0, 0.0]);
    }

    #[test]
    fn restrict_rejects_bad_indices() {
        let full = cyclic_game();
        assert!(matches!(
            restrict(&full, vec![vec![0, 0], vec![1]]),
            Err(Error::DuplicateIndex { .. })
        ));
        assert!(matches!(
            restrict(&full, vec![vec![3], vec![0]]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn add_strategy_appends_and_detects_duplicates() {
        let full = cyclic_game();
        let emp = restrict(&full, vec![vec![0], vec![0]]).unwrap();
        let grown = emp.add_strategy(0, 2).unwrap().unwrap();
        assert_eq!(grown.indices()[0], vec![0, 2]);
        // Prior entries unchanged.
        assert_eq!(grown.game().payoff(0, &[0, 0]), emp.game().payoff(0, &[0, 0]));
        assert!(grown.add_strategy(0, 2).unwrap().is_none());
    }

    #[test]
    fn lift_maps_mass_to_full_indices() {
        let full = cyclic_game();
        let emp = restrict(&full, vec![vec![0, 2], vec![0, 2]]).unwrap();
        let p = MixedProfile::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let lifted = emp.lift_profile(&p).unwrap();
        assert_eq!(lifted.strategy(0).weights(), &[0.5, 0.0, 0.5]);

        let pure = MixedProfile::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let lifted = emp.lift_profile(&pure).unwrap();
        assert_eq!(lifted.strategy(0).weights(), &[0.0, 0.0, 1.0]);
        assert_eq!(lifted.strategy(1).weights(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn lift_preserves_expected_payoff() {
        use rand::{Rng, SeedableRng};
        let full = cyclic_game();
        let emp = restrict(&full, vec![vec![0, 2], vec![1, 2]]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let a: f64 = rng.gen_range(0.0..1.0);
                MixedStrategy::new(vec![a, 1.0 - a]).unwrap()
            };
            let p = MixedProfile::from_strategies(vec![mk(&mut rng), mk(&mut rng)]);
            let lifted = emp.lift_profile(&p).unwrap();
            for player in 0..2 {
                let inner = emp.game().expected_payoff(&p, player).unwrap();
                let outer = full.expected_payoff(&lifted, player).unwrap();
                assert!((inner - outer).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn restricted_regret_lower_bounds_full_regret() {
        use rand::{Rng, SeedableRng};
        let full = cyclic_game();
        let emp = restrict(&full, vec![vec![0, 1], vec![0, 1]]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let a: f64 = rng.gen_range(0.0..1.0);
                MixedStrategy::new(vec![a, 1.0 - a]).unwrap()
            };
            let p = MixedProfile::from_strategies(vec![mk(&mut rng), mk(&mut rng)]);
            let inner = emp.game().profile_regret_sum(&p).unwrap();
            let outer = full
                .profile_regret_sum(&emp.lift_profile(&p).unwrap())
                .unwrap();
            assert!(inner <= outer + 1e-12);
        }
    }

    #[test]
    fn combine_unions_and_sorts() {
        let full = cyclic_game();
        let a = vec![vec![2, 0], vec![2]];
        let b = vec![vec![1], vec![0, 1]];
        let emp = combine(&[a.clone(), b], &full).unwrap();
        assert_eq!(emp.indices()[0], vec![0, 1, 2]);
        assert_eq!(emp.indices()[1], vec![0, 1, 2]);

        // Union with itself is idempotent.
        let same = combine(&[a.clone(), a.clone()], &full).unwrap();
        let once = combine(&[a], &full).unwrap();
        assert_eq!(same.indices(), once.indices());
    }

    #[test]
    fn combine_disjoint_sets() {
        let full = cyclic_game();
        let emp = combine(&[vec![vec![0], vec![0]], vec![vec![2], vec![2]]], &full).unwrap();
        assert_eq!(emp.indices()[0], vec![0, 2]);
    }

    #[test]
    fn project_profile_requires_support_inside() {
        let full = cyclic_game();
        let emp = restrict(&full, vec![vec![0, 2], vec![0, 2]]).unwrap();
        let inside =
            MixedProfile::new(vec![vec![0.5, 0.0, 0.5], vec![1.0, 0.0, 0.0]]).unwrap();
        let p = emp.project_profile(&inside).unwrap();
        assert_eq!(p.strategy(0).weights(), &[0.5, 0.5]);

        let outside =
            MixedProfile::new(vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
        assert!(emp.project_profile(&outside).is_err());
    }
}
