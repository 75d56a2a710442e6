use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use egta::eval::{regret_curve, CurveRole, EvalSolver, LabeledCurve, RegretCurve};
use egta::game::NormalFormGame;
use egta::psro::{run_psro, PsroTrace};
use egta::solvers::MetaSolver;

use crate::config::{parse_eval_solver, ExperimentConfig, GameSource, InitialStrategy};
use crate::errors::{usage, CliError, CliResult};
use crate::io::{
    curve_csv_rows, prepare_out_dir, save_game, save_trace, trace_csv_rows, write_csv,
    CURVE_HEADER,
};

#[derive(Parser)]
pub struct Args {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config's output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the config's run.workers.
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated seeds; overrides the config's run.seeds.
    #[arg(long)]
    seed_list: Option<String>,
    /// Allow writing into a non-empty output directory.
    #[arg(long)]
    overwrite: bool,
}

/// Derives the per-seed initial strategies. The distinct stream constant
/// decorrelates the draw from the payoff sampling that used the same seed.
pub fn initial_indices(
    policy: &InitialStrategy,
    game: &NormalFormGame,
    seed: u64,
) -> CliResult<Vec<usize>> {
    match policy {
        InitialStrategy::FixedIndex { index } => {
            for player in 0..game.num_players() {
                if *index >= game.num_strategies(player) {
                    return Err(usage(format!(
                        "run.initial.index {index} out of range for player {player}"
                    )));
                }
            }
            Ok(vec![*index; game.num_players()])
        }
        InitialStrategy::RandomPerSeed => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
            Ok((0..game.num_players())
                .map(|p| rng.gen_range(0..game.num_strategies(p)))
                .collect())
        }
    }
}

pub fn run(args: Args) -> CliResult<()> {
    let (mut config, hash) = ExperimentConfig::load(&args.config)?;
    if let Some(list) = &args.seed_list {
        config.run.seeds = list
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| usage(format!("bad seed '{t}' in --seed-list")))
            })
            .collect::<CliResult<Vec<u64>>>()?;
        if config.run.seeds.is_empty() {
            return Err(usage("--seed-list is empty"));
        }
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.output.dir.clone())
        .ok_or_else(|| usage("no output directory: pass --out or set output.dir"))?;
    prepare_out_dir(&out, args.overwrite)?;
    std::fs::copy(&args.config, out.join("config.toml"))?;

    let game = Arc::new(match &config.game {
        GameSource::Spec(spec) => spec.build()?,
        GameSource::File { path } => {
            crate::io::load_game(&crate::config::resolve_relative(&args.config, path))?
        }
    });
    save_game(&out.join("game.json"), &game)?;

    let jobs: Vec<(MetaSolver, u64)> = config
        .solvers
        .iter()
        .flat_map(|mss| config.run.seeds.iter().map(move |&s| (mss.clone(), s)))
        .collect();

    let workers = args.workers.unwrap_or(config.run.workers).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| usage(format!("worker pool: {e}")))?;

    let traces: Vec<PsroTrace> = pool.install(|| {
        jobs.par_iter()
            .map(|(mss, seed)| -> Result<PsroTrace, CliError> {
                let init = initial_indices(&config.run.initial, &game, *seed)?;
                Ok(run_psro(
                    Arc::clone(&game),
                    mss.clone(),
                    init,
                    config.run.iterations,
                    *seed,
                )?)
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    for trace in &traces {
        let stem = format!("trace_{}_s{}", trace.mss().name(), trace.seed());
        save_trace(&out.join(format!("{stem}.json")), trace, "game.json", &hash)?;
        write_csv(
            &out.join(format!("{stem}.csv")),
            &hash,
            &["iteration", "player", "added_index", "was_new"],
            trace_csv_rows(trace),
        )?;
        println!(
            "{stem}: {} iterations{}",
            trace.len(),
            trace
                .converged_at()
                .map(|at| format!(", converged at {at}"))
                .unwrap_or_default()
        );
    }

    if !config.eval.solvers.is_empty() {
        let mut labeled: Vec<LabeledCurve> = Vec::new();
        for name in &config.eval.solvers {
            let solver = parse_eval_solver(name, &config.mrcp)?;
            let curves: Vec<RegretCurve> = pool.install(|| {
                traces
                    .par_iter()
                    .map(|trace| regret_curve(trace, &solver, None))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            for curve in &curves {
                labeled.push(LabeledCurve {
                    role: CurveRole::Consistent,
                    curve: curve.clone(),
                });
            }
            labeled.extend(mean_curves(&curves, &solver));
        }
        write_csv(
            &out.join("curves.csv"),
            &hash,
            &CURVE_HEADER,
            curve_csv_rows(&labeled),
        )?;
        println!("curves.csv: {} curves", labeled.len());
    }
    Ok(())
}

/// Per-MSS mean across seeds; shorter curves hold their final value, which
/// is exact for converged runs.
fn mean_curves(curves: &[RegretCurve], solver: &EvalSolver) -> Vec<LabeledCurve> {
    use std::collections::BTreeMap;
    let mut by_mss: BTreeMap<&str, Vec<&RegretCurve>> = BTreeMap::new();
    for curve in curves {
        by_mss
            .entry(curve.exploration_mss.as_str())
            .or_default()
            .push(curve);
    }
    let mut out = Vec::new();
    for (mss, group) in by_mss {
        if group.len() < 2 {
            continue;
        }
        let horizon = group
            .iter()
            .filter_map(|c| c.points.last().map(|p| p.iteration))
            .max()
            .unwrap_or(0);
        let reference = group[0].points[0].reference;
        let points = (1..=horizon)
            .filter_map(|iteration| {
                let values: Vec<f64> =
                    group.iter().filter_map(|c| c.regret_at(iteration)).collect();
                (!values.is_empty()).then(|| egta::eval::CurvePoint {
                    iteration,
                    regret: values.iter().sum::<f64>() / values.len() as f64,
                    reference,
                })
            })
            .collect();
        out.push(LabeledCurve {
            role: CurveRole::Consistent,
            curve: RegretCurve {
                run_id: format!("mean-{mss}-{}", solver.name()),
                exploration_mss: mss.to_string(),
                eval_solver: solver.name().to_string(),
                points,
            },
        });
    }
    out
}
