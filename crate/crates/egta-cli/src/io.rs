//! File formats: games and traces as JSON documents, curves and tables as
//! CSV with a `# config_hash=` header line.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use egta::eval::{EvaluationReport, LabeledCurve};
use egta::game::NormalFormGame;
use egta::psro::{PsroTrace, TraceDocument};

use crate::config::resolve_relative;
use crate::errors::{usage, CliResult};

pub fn load_game(path: &Path) -> CliResult<NormalFormGame> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read game {}: {e}", path.display())))?;
    let game: NormalFormGame = serde_json::from_str(&text)?;
    Ok(game)
}

pub fn save_game(path: &Path, game: &NormalFormGame) -> CliResult<()> {
    let text = serde_json::to_string_pretty(game)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Trace file: the serializable trace document plus the producing config's
/// hash for provenance.
#[derive(Debug, Serialize, Deserialize)]
pub struct TraceFile {
    pub config_hash: String,
    #[serde(flatten)]
    pub document: TraceDocument,
}

pub fn save_trace(path: &Path, trace: &PsroTrace, game_ref: &str, hash: &str) -> CliResult<()> {
    let file = TraceFile {
        config_hash: hash.to_string(),
        document: trace.to_document(Some(game_ref.to_string())),
    };
    std::fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}

/// Loads traces, sharing one game instance per distinct game file.
pub struct TraceLoader {
    games: HashMap<PathBuf, Arc<NormalFormGame>>,
}

impl TraceLoader {
    pub fn new() -> Self {
        TraceLoader {
            games: HashMap::new(),
        }
    }

    pub fn load(&mut self, path: &Path) -> CliResult<PsroTrace> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read trace {}: {e}", path.display())))?;
        let file: TraceFile = serde_json::from_str(&text)?;
        let game_ref = file
            .document
            .game_ref
            .clone()
            .ok_or_else(|| usage(format!("trace {} carries no game reference", path.display())))?;
        let game_path = resolve_relative(path, Path::new(&game_ref));
        let game = match self.games.get(&game_path) {
            Some(g) => Arc::clone(g),
            None => {
                let g = Arc::new(load_game(&game_path)?);
                self.games.insert(game_path.clone(), Arc::clone(&g));
                g
            }
        };
        Ok(PsroTrace::from_document(file.document, game)?)
    }
}

/// Writes rows as CSV under a `# config_hash=` comment and a header row.
pub fn write_csv(
    path: &Path,
    hash: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> CliResult<()> {
    let mut text = format!("# config_hash={hash}\n{}\n", header.join(","));
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn trace_csv_rows(trace: &PsroTrace) -> Vec<Vec<String>> {
    trace
        .csv_rows()
        .into_iter()
        .map(|(iteration, player, added_index, was_new)| {
            vec![
                iteration.to_string(),
                player.to_string(),
                added_index.to_string(),
                was_new.to_string(),
            ]
        })
        .collect()
}

pub const CURVE_HEADER: [&str; 6] = [
    "run_id",
    "mss",
    "eval_solver",
    "iteration",
    "regret",
    "reference",
];

pub fn curve_csv_rows(curves: &[LabeledCurve]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for labeled in curves {
        let c = &labeled.curve;
        let id = match labeled.role {
            egta::eval::CurveRole::Consistent => c.run_id.clone(),
            egta::eval::CurveRole::InconsistentComparison => {
                format!("{}[inconsistent-comparison]", c.run_id)
            }
        };
        for p in &c.points {
            rows.push(vec![
                id.clone(),
                c.exploration_mss.clone(),
                c.eval_solver.clone(),
                p.iteration.to_string(),
                format_float(p.regret),
                p.reference.name().to_string(),
            ]);
        }
    }
    rows
}

/// Shortest decimal that round-trips the f64 exactly.
pub fn format_float(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

pub fn write_report(dir: &Path, hash: &str, report: &EvaluationReport) -> CliResult<()> {
    std::fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(report)?,
    )?;
    write_csv(
        &dir.join("curves.csv"),
        hash,
        &CURVE_HEADER,
        curve_csv_rows(&report.curves),
    )?;

    let mut summary = String::new();
    summary.push_str(&format!("# config_hash={hash}\n"));
    summary.push_str(&format!(
        "consistency_ok: {}\ndisagreements: {}\n",
        report.consistency_ok,
        report.disagreements.len()
    ));
    for d in &report.disagreements {
        summary.push_str(&format!(
            "  iteration {:>4}  {} vs {}  primary_delta {:+.6}  audited_delta {:+.6}\n",
            d.iteration, d.run_a, d.run_b, d.primary_delta, d.audited_delta
        ));
    }
    if !report.selections.is_empty() {
        summary.push_str("selected solvers per phase:\n");
        for s in &report.selections {
            summary.push_str(&format!(
                "  phase {:>3} (iterations {:>4}..{:<4}) -> {:<10} mean regret {:.6}\n",
                s.phase, s.start_iteration, s.end_iteration, s.solver, s.mean_regret
            ));
        }
    }
    summary.push_str("curves:\n");
    for labeled in &report.curves {
        let c = &labeled.curve;
        let last = c.points.last().map(|p| p.regret).unwrap_or(f64::NAN);
        summary.push_str(&format!(
            "  {:<28} mss={:<9} eval={:<9} points={:>4} final={:.6} role={:?} ref={}\n",
            c.run_id,
            c.exploration_mss,
            c.eval_solver,
            c.points.len(),
            last,
            labeled.role,
            c.points
                .first()
                .map(|p| p.reference.name())
                .unwrap_or("-"),
        ));
    }
    std::fs::write(dir.join("summary.txt"), summary)?;
    Ok(())
}

/// Refuses to reuse a non-empty output directory unless overwriting was
/// requested; creates it when missing.
pub fn prepare_out_dir(dir: &Path, overwrite: bool) -> CliResult<()> {
    if dir.exists() {
        let non_empty = std::fs::read_dir(dir)?.next().is_some();
        if non_empty && !overwrite {
            return Err(usage(format!(
                "output directory {} is not empty; pass --overwrite to reuse it",
                dir.display()
            )));
        }
    } else {
        std::fs::create_dir_all(dir)?;
    }
    Ok(())
}
