use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;

use egta::library::sample_subgame;
use egta::mrcp::{
    approx_mrcp, mrcp_amoeba_binary_search, mrcp_amoeba_projected, mrcp_brute_force,
    AmoebaParams, MrcpResult, Objective,
};
use egta::restriction::{restrict, EmpiricalGame};
use egta::solvers::nash_lp;

use crate::config::hash_bytes;
use crate::errors::{usage, CliResult};
use crate::io::{format_float, load_game, write_csv, TraceLoader};

#[derive(Parser)]
pub struct Args {
    /// Full game file (JSON).
    #[arg(long)]
    game: PathBuf,
    /// Per-player strategy index lists, e.g. "0,1,2;0,3".
    #[arg(long)]
    indices: Option<String>,
    /// Trace file to take an empirical game from (with --iteration).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Checkpoint iteration within --trace.
    #[arg(long)]
    iteration: Option<usize>,
    /// Search method: projected, binary_search, brute_force, approx, compare.
    #[arg(long, default_value = "projected")]
    method: String,
    /// Objective: sum or max.
    #[arg(long, default_value = "sum")]
    objective: String,
    /// Grid spacing for brute_force.
    #[arg(long, default_value_t = 1e-2)]
    grid_step: f64,
    /// Amoeba iteration cap.
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Subgame sizes for compare mode, e.g. "5,7,9,11,13,15".
    #[arg(long, default_value = "5,7,9,11,13,15")]
    sizes: String,
    /// Instances per size for compare mode.
    #[arg(long, default_value_t = 5)]
    instances: u64,
    /// Base seed for compare-mode subgame sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn parse_indices(spec: &str) -> CliResult<Vec<Vec<usize>>> {
    spec.split(';')
        .map(|part| {
            part.split(',')
                .map(|token| {
                    token
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| usage(format!("bad index '{token}'")))
                })
                .collect()
        })
        .collect()
}

fn profile_string(result: &MrcpResult) -> String {
    result
        .profile
        .strategies()
        .iter()
        .map(|s| {
            s.weights()
                .iter()
                .map(|w| format_float(*w))
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn run(args: Args) -> CliResult<()> {
    let hash = hash_bytes(format!("{:?}", std::env::args().collect::<Vec<_>>()).as_bytes());
    let game = Arc::new(load_game(&args.game)?);

    if args.method == "compare" {
        return compare(&args, &hash, game);
    }

    let emp: EmpiricalGame = if let Some(spec) = &args.indices {
        restrict(&game, parse_indices(spec)?)?
    } else if let Some(trace_path) = &args.trace {
        let iteration = args
            .iteration
            .ok_or_else(|| usage("--iteration required with --trace"))?;
        let mut loader = TraceLoader::new();
        let trace = loader.load(trace_path)?;
        egta::psro::trace_empirical_game(&trace, iteration)?
    } else {
        return Err(usage("pass --indices or --trace/--iteration"));
    };

    let objective = match args.objective.as_str() {
        "sum" => Objective::Sum,
        "max" => Objective::Max,
        other => return Err(usage(format!("unknown objective '{other}'"))),
    };
    let params = AmoebaParams {
        max_iters: args.max_iters,
        ..Default::default()
    };
    let result = match args.method.as_str() {
        "projected" => mrcp_amoeba_projected(&emp, objective, &params, None)?,
        "binary_search" => mrcp_amoeba_binary_search(&emp, objective, &params)?,
        "brute_force" => mrcp_brute_force(&emp, objective, args.grid_step)?,
        "approx" => approx_mrcp(&emp, &params)?,
        other => return Err(usage(format!("unknown method '{other}'"))),
    };

    write_csv(
        &args.out,
        &hash,
        &[
            "method",
            "objective",
            "regret",
            "objective_value",
            "evaluations",
            "profile",
        ],
        [vec![
            args.method.clone(),
            args.objective.clone(),
            format_float(result.regret),
            format_float(result.objective_value),
            result.evaluations.to_string(),
            profile_string(&result),
        ]],
    )?;
    println!(
        "{}: regret {} after {} evaluations",
        args.method,
        format_float(result.regret),
        result.evaluations
    );
    Ok(())
}

/// Grid over (size x instance): projected vs binary-search vs empirical NE.
fn compare(args: &Args, hash: &str, game: Arc<egta::game::NormalFormGame>) -> CliResult<()> {
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| usage(format!("bad size '{t}'"))))
        .collect::<CliResult<_>>()?;
    let params = AmoebaParams {
        max_iters: args.max_iters,
        ..Default::default()
    };
    let mut rows = Vec::new();
    for &size in &sizes {
        for instance in 0..args.instances {
            let seed = args.seed * 1_000_000 + size as u64 * 1000 + instance;
            let emp = sample_subgame(&game, size, seed)?;
            let proj = mrcp_amoeba_projected(&emp, Objective::Sum, &params, None)?;
            let bs = mrcp_amoeba_binary_search(&emp, Objective::Sum, &params)?;
            let ne = nash_lp(&emp)?;
            let ne_regret = game.profile_regret_sum(&emp.lift_profile(&ne)?)?;
            println!(
                "size {size} instance {instance}: proj {:.4} bs {:.4} ne {:.4}",
                proj.regret, bs.regret, ne_regret
            );
            rows.push(vec![
                size.to_string(),
                instance.to_string(),
                format_float(proj.regret),
                format_float(bs.regret),
                format_float(ne_regret),
            ]);
        }
    }
    write_csv(
        &args.out,
        hash,
        &["size", "instance", "proj_regret", "bs_regret", "ne_regret"],
        rows,
    )?;
    Ok(())
}
