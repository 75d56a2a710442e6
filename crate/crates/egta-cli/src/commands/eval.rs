use std::path::PathBuf;

use clap::{Parser, Subcommand};

use egta::eval::{combined_game_eval, consistency_report, select_eval_solver};
use egta::psro::PsroTrace;

use crate::config::{hash_bytes, parse_eval_solver, MrcpSection};
use crate::errors::{usage, CliResult};
use crate::io::{prepare_out_dir, write_report, TraceLoader};

#[derive(Subcommand)]
pub enum Args {
    /// Evaluate two runs under one fixed solver, with the own-solver curves
    /// labeled as an inconsistent comparison.
    Consistency(ConsistencyArgs),
    /// Choose the lowest-mean-regret evaluation solver per phase.
    Select(SelectArgs),
    /// Evaluate runs against the combined game and the true game.
    Combined(CombinedArgs),
}

#[derive(Parser)]
pub struct ConsistencyArgs {
    /// Exactly two trace files.
    #[arg(long, num_args = 2)]
    traces: Vec<PathBuf>,
    /// Fixed evaluation solver name.
    #[arg(long, default_value = "nash")]
    solver: String,
    #[arg(long, default_value_t = 5000)]
    mrcp_iters: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    overwrite: bool,
}

#[derive(Parser)]
pub struct SelectArgs {
    #[arg(long, num_args = 1..)]
    traces: Vec<PathBuf>,
    /// Comma-separated candidate solver names, e.g. "nash,uniform,mrcp".
    #[arg(long)]
    candidates: String,
    #[arg(long, default_value_t = usize::MAX)]
    phase_length: usize,
    #[arg(long, default_value_t = 2000)]
    mrcp_iters: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    overwrite: bool,
}

#[derive(Parser)]
pub struct CombinedArgs {
    #[arg(long, num_args = 1..)]
    traces: Vec<PathBuf>,
    #[arg(long, default_value = "nash")]
    solver: String,
    #[arg(long, default_value_t = 2000)]
    mrcp_iters: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    overwrite: bool,
}

fn load_traces(paths: &[PathBuf]) -> CliResult<Vec<PsroTrace>> {
    let mut loader = TraceLoader::new();
    paths.iter().map(|p| loader.load(p)).collect()
}

fn args_hash() -> String {
    hash_bytes(format!("{:?}", std::env::args().collect::<Vec<_>>()).as_bytes())
}

pub fn run(args: Args) -> CliResult<()> {
    match args {
        Args::Consistency(a) => {
            prepare_out_dir(&a.out, a.overwrite)?;
            let traces = load_traces(&a.traces)?;
            let mrcp = MrcpSection {
                max_iters: a.mrcp_iters,
                ..Default::default()
            };
            let solver = parse_eval_solver(&a.solver, &mrcp)?;
            let report = consistency_report(&traces[0], &traces[1], &solver)?;
            write_report(&a.out, &args_hash(), &report)?;
            println!(
                "consistency_ok={} disagreements={}",
                report.consistency_ok,
                report.disagreements.len()
            );
            Ok(())
        }
        Args::Select(a) => {
            prepare_out_dir(&a.out, a.overwrite)?;
            let traces = load_traces(&a.traces)?;
            let refs: Vec<&PsroTrace> = traces.iter().collect();
            let mrcp = MrcpSection {
                max_iters: a.mrcp_iters,
                ..Default::default()
            };
            let candidates = a
                .candidates
                .split(',')
                .map(|name| parse_eval_solver(name.trim(), &mrcp))
                .collect::<CliResult<Vec<_>>>()?;
            if candidates.is_empty() {
                return Err(usage("empty candidate list"));
            }
            let report = select_eval_solver(&refs, &candidates, a.phase_length)?;
            write_report(&a.out, &args_hash(), &report)?;
            for s in &report.selections {
                println!(
                    "phase {} ({}..{}): {} (mean regret {:.6})",
                    s.phase, s.start_iteration, s.end_iteration, s.solver, s.mean_regret
                );
            }
            Ok(())
        }
        Args::Combined(a) => {
            prepare_out_dir(&a.out, a.overwrite)?;
            let traces = load_traces(&a.traces)?;
            let refs: Vec<&PsroTrace> = traces.iter().collect();
            let mrcp = MrcpSection {
                max_iters: a.mrcp_iters,
                ..Default::default()
            };
            let solver = parse_eval_solver(&a.solver, &mrcp)?;
            let report = combined_game_eval(&refs, &solver)?;
            write_report(&a.out, &args_hash(), &report)?;
            println!(
                "combined-game evaluation: {} curves, {} ordering disagreements",
                report.curves.len(),
                report.disagreements.len()
            );
            Ok(())
        }
    }
}
