use std::path::PathBuf;

use clap::Parser;

use egta::library::GameSpec;

use crate::errors::{usage, CliResult};
use crate::io::save_game;

#[derive(Parser)]
pub struct Args {
    /// Game kind: example1, unstable_ne, random_zero_sum, kuhn_normal_form.
    #[arg(long)]
    kind: String,
    /// Strategies per player (random_zero_sum only).
    #[arg(long)]
    strategies: Option<usize>,
    /// Lowest integer payoff (random_zero_sum only).
    #[arg(long)]
    low: Option<i64>,
    /// Highest integer payoff (random_zero_sum only).
    #[arg(long)]
    high: Option<i64>,
    /// Generator seed (random_zero_sum only).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output game file (JSON).
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: Args) -> CliResult<()> {
    let spec = match args.kind.as_str() {
        "example1" => GameSpec::Example1,
        "unstable_ne" => GameSpec::UnstableNe,
        "kuhn_normal_form" => GameSpec::KuhnNormalForm,
        "random_zero_sum" => GameSpec::RandomZeroSum {
            strategies_per_player: args
                .strategies
                .ok_or_else(|| usage("--strategies required for random_zero_sum"))?,
            payoff_low: args.low.ok_or_else(|| usage("--low required"))?,
            payoff_high: args.high.ok_or_else(|| usage("--high required"))?,
            seed: args.seed,
        },
        other => return Err(usage(format!("unknown game kind '{other}'"))),
    };
    let game = spec.build()?;
    save_game(&args.out, &game)?;
    println!(
        "wrote {} ({} players, strategies {:?}, zero_sum={})",
        args.out.display(),
        game.num_players(),
        game.strategy_counts(),
        game.is_zero_sum()
    );
    Ok(())
}
