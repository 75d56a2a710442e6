//! Evaluation harness: solver-based regret curves, the consistency
//! criterion, evaluation-solver selection, and combined-game evaluation.
//!
//! The central idea: cross-MSS comparisons must use one fixed evaluation
//! solver, independent of the MSSs used for exploration. Reports label any
//! each-run-under-its-own-solver curve as an inconsistent comparison and
//! flag iterations where the two views disagree on ordering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::MixedProfile;
use crate::mrcp::{mrcp_amoeba_projected, AmoebaParams, Objective};
use crate::psro::{trace_empirical_game, PsroTrace};
use crate::restriction::{combine, EmpiricalGame};
use crate::solvers::{MetaSolver, SolverHistory};

/// Which game the regret of a curve point was measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    TrueGame,
    CombinedGame,
}

impl Reference {
    pub fn name(&self) -> &'static str {
        match self {
            Reference::TrueGame => "true_game",
            Reference::CombinedGame => "combined_game",
        }
    }
}

/// A solver applied at evaluation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvalSolver {
    /// Any meta-strategy solver (NE, uniform, PRD, ...).
    Solver(MetaSolver),
    /// The MRCP pseudo-solver: projected amoeba seeded with the candidate
    /// profiles at each checkpoint plus the previous checkpoint's result.
    Mrcp { params: AmoebaParams },
}

impl EvalSolver {
    pub fn name(&self) -> &'static str {
        match self {
            EvalSolver::Solver(s) => s.name(),
            EvalSolver::Mrcp { .. } => "mrcp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub iteration: usize,
    pub regret: f64,
    pub reference: Reference,
}

/// Per-iteration solver-based regret series for one (run, evaluation-solver)
/// pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub run_id: String,
    pub exploration_mss: String,
    pub eval_solver: String,
    pub points: Vec<CurvePoint>,
}

impl RegretCurve {
    pub fn regrets(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.regret).collect()
    }

    /// Regret at an iteration, holding the final value past the end of a
    /// converged run (a converged run is a fixed point, so the held value is
    /// exact for deterministic solvers).
    pub fn regret_at(&self, iteration: usize) -> Option<f64> {
        if self.points.is_empty() {
            return None;
        }
        self.points
            .iter()
            .find(|p| p.iteration == iteration)
            .map(|p| p.regret)
            .or_else(|| {
                let last = self.points.last().unwrap();
                (iteration > last.iteration).then_some(last.regret)
            })
    }
}

/// Role of a curve within a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveRole {
    /// Measured with the report's single fixed evaluation solver.
    Consistent,
    /// Measured with the run's own exploration MSS; kept for contrast only.
    InconsistentComparison,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledCurve {
    pub role: CurveRole,
    pub curve: RegretCurve,
}

/// One iteration where two measurements order a pair of runs differently.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderingDisagreement {
    pub iteration: usize,
    pub run_a: String,
    pub run_b: String,
    /// regret(a) - regret(b) under the consistent (or true-game) measurement.
    pub primary_delta: f64,
    /// regret(a) - regret(b) under the audited (inconsistent or
    /// combined-game) measurement.
    pub audited_delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseSelection {
    pub phase: usize,
    pub start_iteration: usize,
    pub end_iteration: usize,
    pub solver: String,
    pub mean_regret: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub curves: Vec<LabeledCurve>,
    pub selections: Vec<PhaseSelection>,
    pub disagreements: Vec<OrderingDisagreement>,
    /// True when no ordering disagreement was detected.
    pub consistency_ok: bool,
}

/// Strict-ordering margin for disagreement detection; ties are not flagged.
const ORDER_MARGIN: f64 = 1e-9;

/// Stable identifier for a run.
pub fn run_label(trace: &PsroTrace) -> String {
    format!("{}-s{}", trace.mss().name(), trace.seed())
}

/// True-game regret of the profile an evaluation solver extracts from an
/// empirical game. `history` is needed only by history-based solvers.
pub fn solver_based_regret(
    emp: &EmpiricalGame,
    solver: &MetaSolver,
    history: Option<&SolverHistory>,
) -> Result<f64> {
    let profile = solver.solve(emp, history)?;
    let lifted = emp.lift_profile(&profile)?;
    emp.full_game().profile_regret_sum(&lifted)
}

fn measure(
    emp: &EmpiricalGame,
    profile: &MixedProfile,
    reference: Option<&EmpiricalGame>,
) -> Result<(f64, Reference)> {
    let lifted = emp.lift_profile(profile)?;
    match reference {
        None => Ok((
            emp.full_game().profile_regret_sum(&lifted)?,
            Reference::TrueGame,
        )),
        Some(combined) => {
            let projected = combined.project_profile(&lifted)?;
            Ok((
                combined.game().profile_regret_sum(&projected)?,
                Reference::CombinedGame,
            ))
        }
    }
}

/// Curve plus the per-checkpoint profiles behind it, for seeding the MRCP
/// pseudo-solver with another solver's candidates.
pub fn solver_curve_with_profiles(
    trace: &PsroTrace,
    solver: &MetaSolver,
    reference: Option<&EmpiricalGame>,
) -> Result<(RegretCurve, Vec<MixedProfile>)> {
    let profiles = solver_profiles(trace, solver)?;
    let curve = curve_from_profiles(trace, &profiles, solver.name(), reference)?;
    Ok((curve, profiles))
}

/// Profiles an MSS-style evaluation solver extracts at every checkpoint.
fn solver_profiles(trace: &PsroTrace, solver: &MetaSolver) -> Result<Vec<MixedProfile>> {
    trace
        .checkpoints()
        .iter()
        .map(|cp| {
            let emp = trace_empirical_game(trace, cp.iteration)?;
            let history = SolverHistory {
                sequences: &cp.generation_sequence,
            };
            solver.solve(&emp, Some(&history))
        })
        .collect()
}

fn curve_from_profiles(
    trace: &PsroTrace,
    profiles: &[MixedProfile],
    eval_name: &str,
    reference: Option<&EmpiricalGame>,
) -> Result<RegretCurve> {
    let mut points = Vec::with_capacity(profiles.len());
    for (cp, profile) in trace.checkpoints().iter().zip(profiles) {
        let emp = trace_empirical_game(trace, cp.iteration)?;
        let (regret, reference) = measure(&emp, profile, reference)?;
        points.push(CurvePoint {
            iteration: cp.iteration,
            regret,
            reference,
        });
    }
    Ok(RegretCurve {
        run_id: run_label(trace),
        exploration_mss: trace.mss().name().to_string(),
        eval_solver: eval_name.to_string(),
        points,
    })
}

/// Solver-based regret at every checkpoint of a trace.
///
/// With a `reference` combined game, regret is measured with deviations
/// restricted to it instead of the full game (the solver itself is
/// unchanged). The MRCP pseudo-solver warm-starts from its previous
/// checkpoint and seeds with the checkpoint's recorded meta-profile.
pub fn regret_curve(
    trace: &PsroTrace,
    eval_solver: &EvalSolver,
    reference: Option<&EmpiricalGame>,
) -> Result<RegretCurve> {
    match eval_solver {
        EvalSolver::Solver(solver) => {
            let profiles = solver_profiles(trace, solver)?;
            curve_from_profiles(trace, &profiles, solver.name(), reference)
        }
        EvalSolver::Mrcp { params } => {
            Ok(mrcp_pseudo_curve(trace, params, None, reference)?.0)
        }
    }
}

/// The MRCP pseudo-solver curve.
///
/// At every checkpoint the projected amoeba is seeded with the checkpoint's
/// recorded meta-profile, any caller-supplied candidate profiles for that
/// checkpoint, and the previous checkpoint's minimizer carried into the
/// larger empirical game. Every seed is re-measured directly after the
/// search, so the returned value never exceeds any seed's regret and the
/// curve is non-increasing along the trace.
pub fn mrcp_pseudo_curve(
    trace: &PsroTrace,
    params: &AmoebaParams,
    candidate_profiles: Option<&[Vec<MixedProfile>]>,
    reference: Option<&EmpiricalGame>,
) -> Result<(RegretCurve, Vec<MixedProfile>)> {
    if let Some(cands) = candidate_profiles {
        if cands.len() != trace.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} candidate profile sets for {} checkpoints",
                cands.len(),
                trace.len()
            )));
        }
    }
    let mut chosen: Vec<MixedProfile> = Vec::with_capacity(trace.len());
    let mut points = Vec::with_capacity(trace.len());
    let mut previous: Option<(EmpiricalGame, MixedProfile)> = None;

    for (slot, cp) in trace.checkpoints().iter().enumerate() {
        let emp = trace_empirical_game(trace, cp.iteration)?;
        let mut seeds: Vec<MixedProfile> = vec![cp.meta_profile.clone()];
        if let Some(cands) = candidate_profiles {
            seeds.extend(cands[slot].iter().cloned());
        }
        if let Some((ref prev_emp, ref prev_profile)) = previous {
            seeds.push(emp.transfer_profile(prev_emp, prev_profile)?);
        }
        let result = mrcp_amoeba_projected(&emp, Objective::Sum, params, Some(&seeds))?;

        // Re-measure seeds directly so dominance over every seed is exact
        // even if the search's cache quantization merged nearby points.
        let mut best_profile = result.profile;
        let mut best_regret = emp
            .full_game()
            .profile_regret_sum(&emp.lift_profile(&best_profile)?)?;
        for seed in &seeds {
            let regret = emp
                .full_game()
                .profile_regret_sum(&emp.lift_profile(seed)?)?;
            if regret < best_regret {
                best_regret = regret;
                best_profile = seed.clone();
            }
        }

        let (regret, reference_kind) = measure(&emp, &best_profile, reference)?;
        points.push(CurvePoint {
            iteration: cp.iteration,
            regret,
            reference: reference_kind,
        });
        chosen.push(best_profile.clone());
        previous = Some((emp, best_profile));
    }

    let curve = RegretCurve {
        run_id: run_label(trace),
        exploration_mss: trace.mss().name().to_string(),
        eval_solver: "mrcp".to_string(),
        points,
    };
    Ok((curve, chosen))
}

fn detect_disagreements(
    primary_a: &RegretCurve,
    primary_b: &RegretCurve,
    audited_a: &RegretCurve,
    audited_b: &RegretCurve,
) -> Vec<OrderingDisagreement> {
    let last = [primary_a, primary_b, audited_a, audited_b]
        .iter()
        .filter_map(|c| c.points.last().map(|p| p.iteration))
        .max()
        .unwrap_or(0);
    let mut found = Vec::new();
    for iteration in 1..=last {
        let values = [
            primary_a.regret_at(iteration),
            primary_b.regret_at(iteration),
            audited_a.regret_at(iteration),
            audited_b.regret_at(iteration),
        ];
        let [Some(pa), Some(pb), Some(aa), Some(ab)] = values else {
            continue;
        };
        let primary_delta = pa - pb;
        let audited_delta = aa - ab;
        let flipped = (primary_delta > ORDER_MARGIN && audited_delta < -ORDER_MARGIN)
            || (primary_delta < -ORDER_MARGIN && audited_delta > ORDER_MARGIN);
        if flipped {
            found.push(OrderingDisagreement {
                iteration,
                run_a: primary_a.run_id.clone(),
                run_b: primary_b.run_id.clone(),
                primary_delta,
                audited_delta,
            });
        }
    }
    found
}

/// Evaluates two exploration runs under one fixed solver, alongside the
/// each-run-under-its-own-MSS curves for contrast.
///
/// The own-MSS curves are labeled [`CurveRole::InconsistentComparison`];
/// `consistency_ok` is false when the consistent and inconsistent views
/// disagree on the ordering of the runs at any iteration.
pub fn consistency_report(
    trace_a: &PsroTrace,
    trace_b: &PsroTrace,
    eval_solver: &EvalSolver,
) -> Result<EvaluationReport> {
    let consistent_a = regret_curve(trace_a, eval_solver, None)?;
    let consistent_b = regret_curve(trace_b, eval_solver, None)?;
    let own_a = regret_curve(trace_a, &EvalSolver::Solver(trace_a.mss().clone()), None)?;
    let own_b = regret_curve(trace_b, &EvalSolver::Solver(trace_b.mss().clone()), None)?;

    let disagreements = detect_disagreements(&consistent_a, &consistent_b, &own_a, &own_b);
    let consistency_ok = disagreements.is_empty();
    Ok(EvaluationReport {
        curves: vec![
            LabeledCurve {
                role: CurveRole::Consistent,
                curve: consistent_a,
            },
            LabeledCurve {
                role: CurveRole::Consistent,
                curve: consistent_b,
            },
            LabeledCurve {
                role: CurveRole::InconsistentComparison,
                curve: own_a,
            },
            LabeledCurve {
                role: CurveRole::InconsistentComparison,
                curve: own_b,
            },
        ],
        selections: Vec::new(),
        disagreements,
        consistency_ok,
    })
}

/// Chooses, per phase of `phase_length` iterations, the candidate solver
/// whose curves have the lowest mean regret across the given traces.
///
/// An MRCP pseudo-solver candidate is seeded with every other candidate's
/// profiles, so by the returned-best construction its curve is pointwise
/// dominant and it is selected whenever present. A `phase_length` covering
/// all iterations yields a single global choice.
pub fn select_eval_solver(
    traces: &[&PsroTrace],
    candidates: &[EvalSolver],
    phase_length: usize,
) -> Result<EvaluationReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate solvers".into()));
    }
    if traces.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if phase_length == 0 {
        return Err(Error::InvalidParameter("phase_length must be >= 1".into()));
    }

    // First pass: every MSS-style candidate, keeping profiles for seeding.
    let mut curves: Vec<Vec<RegretCurve>> = vec![Vec::new(); candidates.len()];
    let mut seed_profiles: Vec<Vec<Vec<MixedProfile>>> = Vec::new(); // [trace][checkpoint][candidate]
    for trace in traces {
        let mut per_checkpoint: Vec<Vec<MixedProfile>> = vec![Vec::new(); trace.len()];
        for (slot, candidate) in candidates.iter().enumerate() {
            if let EvalSolver::Solver(solver) = candidate {
                let profiles = solver_profiles(trace, solver)?;
                for (cp_slot, profile) in profiles.iter().enumerate() {
                    per_checkpoint[cp_slot].push(profile.clone());
                }
                curves[slot].push(curve_from_profiles(trace, &profiles, solver.name(), None)?);
            }
        }
        seed_profiles.push(per_checkpoint);
    }
    // Second pass: MRCP candidates, seeded with everything above.
    for (slot, candidate) in candidates.iter().enumerate() {
        if let EvalSolver::Mrcp { params } = candidate {
            for (trace_slot, trace) in traces.iter().enumerate() {
                let (curve, _) = mrcp_pseudo_curve(
                    trace,
                    params,
                    Some(&seed_profiles[trace_slot]),
                    None,
                )?;
                curves[slot].push(curve);
            }
        }
    }

    let horizon = traces.iter().map(|t| t.len()).max().unwrap_or(0);
    let mut selections = Vec::new();
    let mut phase = 0;
    let mut start = 1;
    while start <= horizon {
        let end = start.saturating_add(phase_length - 1).min(horizon);
        let mut best: Option<(usize, f64)> = None;
        for (slot, candidate_curves) in curves.iter().enumerate() {
            let mut total = 0.0;
            let mut count = 0usize;
            for curve in candidate_curves {
                for iteration in start..=end {
                    if let Some(r) = curve.regret_at(iteration) {
                        total += r;
                        count += 1;
                    }
                }
            }
            if count == 0 {
                continue;
            }
            let mean = total / count as f64;
            if best.is_none_or(|(_, b)| mean < b) {
                best = Some((slot, mean));
            }
        }
        let (slot, mean_regret) =
            best.ok_or_else(|| Error::InvalidParameter("no curve points in phase".into()))?;
        selections.push(PhaseSelection {
            phase,
            start_iteration: start,
            end_iteration: end,
            solver: candidates[slot].name().to_string(),
            mean_regret,
        });
        phase += 1;
        start = end + 1;
    }

    let labeled = curves
        .into_iter()
        .flatten()
        .map(|curve| LabeledCurve {
            role: CurveRole::Consistent,
            curve,
        })
        .collect();
    Ok(EvaluationReport {
        curves: labeled,
        selections,
        disagreements: Vec::new(),
        consistency_ok: true,
    })
}

/// Evaluates a batch of runs against the true game and against the combined
/// game built from all of their strategy sets.
///
/// Emits paired curves per run and flags iterations where the two references
/// order a pair of runs from different MSSs differently (the failure mode of
/// combined-game evaluation).
pub fn combined_game_eval(
    traces: &[&PsroTrace],
    eval_solver: &EvalSolver,
) -> Result<EvaluationReport> {
    if traces.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let full = traces[0].full_game();
    for trace in traces.iter().skip(1) {
        if trace.full_game().as_ref() != full.as_ref() {
            return Err(Error::InvalidGame(
                "combined-game evaluation needs a shared full game".into(),
            ));
        }
    }
    let sets: Vec<Vec<Vec<usize>>> = traces.iter().map(|t| t.final_indices()).collect();
    let combined = combine(&sets, full)?;

    let mut true_curves = Vec::with_capacity(traces.len());
    let mut combined_curves = Vec::with_capacity(traces.len());
    for trace in traces {
        match eval_solver {
            EvalSolver::Solver(solver) => {
                let profiles = solver_profiles(trace, solver)?;
                true_curves.push(curve_from_profiles(trace, &profiles, solver.name(), None)?);
                combined_curves.push(curve_from_profiles(
                    trace,
                    &profiles,
                    solver.name(),
                    Some(&combined),
                )?);
            }
            EvalSolver::Mrcp { params } => {
                let (true_curve, profiles) = mrcp_pseudo_curve(trace, params, None, None)?;
                true_curves.push(true_curve);
                combined_curves.push(curve_from_profiles(
                    trace,
                    &profiles,
                    "mrcp",
                    Some(&combined),
                )?);
            }
        }
    }

    let mut disagreements = Vec::new();
    for a in 0..traces.len() {
        for b in (a + 1)..traces.len() {
            if traces[a].mss().name() == traces[b].mss().name() {
                continue;
            }
            disagreements.extend(detect_disagreements(
                &true_curves[a],
                &true_curves[b],
                &combined_curves[a],
                &combined_curves[b],
            ));
        }
    }
    let consistency_ok = disagreements.is_empty();
    let curves = true_curves
        .into_iter()
        .chain(combined_curves)
        .map(|curve| LabeledCurve {
            role: CurveRole::Consistent,
            curve,
        })
        .collect();
    Ok(EvaluationReport {
        curves,
        selections: Vec::new(),
        disagreements,
        consistency_ok,
    })
}
