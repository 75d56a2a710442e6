//! Experiment configuration: one TOML file per experiment, fully determining
//! the run. All randomness flows from the listed seeds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use egta::library::GameSpec;
use egta::mrcp::AmoebaParams;
use egta::solvers::MetaSolver;

use crate::errors::{usage, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameSource {
    Spec(GameSpec),
    File { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum InitialStrategy {
    FixedIndex { index: usize },
    RandomPerSeed,
}

impl Default for InitialStrategy {
    fn default() -> Self {
        InitialStrategy::FixedIndex { index: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSection {
    pub seeds: Vec<u64>,
    pub iterations: usize,
    #[serde(default)]
    pub initial: InitialStrategy,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvalSection {
    /// Evaluation solver names: nash, uniform, self_play, rd, prd, mrcp.
    #[serde(default)]
    pub solvers: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MrcpSection {
    #[serde(default = "default_mrcp_iters")]
    pub max_iters: usize,
    #[serde(default = "default_mrcp_tol")]
    pub tol: f64,
}

fn default_mrcp_iters() -> usize {
    AmoebaParams::default().max_iters
}

fn default_mrcp_tol() -> f64 {
    AmoebaParams::default().tol
}

impl Default for MrcpSection {
    fn default() -> Self {
        MrcpSection {
            max_iters: default_mrcp_iters(),
            tol: default_mrcp_tol(),
        }
    }
}

impl MrcpSection {
    pub fn params(&self) -> AmoebaParams {
        AmoebaParams {
            max_iters: self.max_iters,
            tol: self.tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: GameSource,
    pub run: RunSection,
    #[serde(rename = "mss")]
    pub solvers: Vec<MetaSolver>,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub mrcp: MrcpSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<(Self, String)> {
        let bytes = std::fs::read(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let hash = hash_bytes(&bytes);
        let text = String::from_utf8(bytes)
            .map_err(|_| usage(format!("config {} is not UTF-8", path.display())))?;
        let config: ExperimentConfig = toml::from_str(&text)?;
        config.validate(path)?;
        Ok((config, hash))
    }

    fn validate(&self, path: &Path) -> CliResult<()> {
        if self.run.seeds.is_empty() {
            return Err(usage("run.seeds must list at least one seed"));
        }
        if self.run.iterations == 0 {
            return Err(usage("run.iterations must be >= 1"));
        }
        if self.run.workers == 0 {
            return Err(usage("run.workers must be >= 1"));
        }
        if self.solvers.is_empty() {
            return Err(usage("at least one [[mss]] entry required"));
        }
        for solver in &self.solvers {
            match solver {
                MetaSolver::Rd { dt, steps } => {
                    if *dt <= 0.0 || *steps == 0 {
                        return Err(usage("mss.rd requires dt > 0 and steps >= 1"));
                    }
                }
                MetaSolver::Prd { dt, steps, floor }
                    if *dt <= 0.0 || *steps == 0 || *floor < 0.0 =>
                {
                    return Err(usage(
                        "mss.prd requires dt > 0, steps >= 1 and floor >= 0",
                    ));
                }
                _ => {}
            }
        }
        for name in &self.eval.solvers {
            parse_eval_solver(name, &self.mrcp)?;
        }
        if let GameSource::File { path: game_path } = &self.game {
            let resolved = resolve_relative(path, game_path);
            if !resolved.exists() {
                return Err(usage(format!(
                    "game file {} does not exist",
                    resolved.display()
                )));
            }
        }
        Ok(())
    }
}

/// Resolves a path mentioned inside a config or trace file relative to the
/// referencing file's directory.
pub fn resolve_relative(referencing_file: &Path, target: &Path) -> PathBuf {
    if target.is_absolute() {
        target.to_path_buf()
    } else {
        referencing_file
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(target)
    }
}

pub fn parse_eval_solver(name: &str, mrcp: &MrcpSection) -> CliResult<egta::eval::EvalSolver> {
    use egta::eval::EvalSolver;
    let solver = match name {
        "nash" => EvalSolver::Solver(MetaSolver::Nash),
        "uniform" => EvalSolver::Solver(MetaSolver::Uniform),
        "self_play" => EvalSolver::Solver(MetaSolver::SelfPlay),
        "rd" => EvalSolver::Solver(MetaSolver::Rd {
            dt: 1e-3,
            steps: 100_000,
        }),
        "prd" => EvalSolver::Solver(MetaSolver::prd_default()),
        "mrcp" => EvalSolver::Mrcp {
            params: mrcp.params(),
        },
        other => return Err(usage(format!("unknown evaluation solver '{other}'"))),
    };
    Ok(solver)
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(12);
    for byte in digest.iter().take(6) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}
