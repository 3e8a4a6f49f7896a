//! Residual-to-front and iteration summaries of written runs.

use std::path::Path;

use anyhow::{anyhow, Result};
use psst_core::problems::{BundledProblem, FrontOracle};

use crate::output::{read_front, read_manifest, RunManifest, FRONT_FILE};

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run_id: String,
    pub command: String,
    pub points: usize,
    pub mean_residual: f64,
    pub max_residual: f64,
    pub best_main_loss: f64,
    pub total_iters: usize,
    pub total_tangent_solves: usize,
}

/// Problem named by a manifest.
pub fn manifest_problem(manifest: &RunManifest) -> Result<BundledProblem> {
    Ok(BundledProblem::by_name(&manifest.problem.name, manifest.problem.size)?)
}

/// Returns `Ok(None)` when the problem has no analytic front.
pub fn summarize(dir: &Path) -> Result<Option<RunSummary>> {
    let manifest = read_manifest(dir)?;
    let problem = manifest_problem(&manifest)?;
    let Some(curve) = problem.pareto_curve() else {
        return Ok(None);
    };
    let oracle = FrontOracle::new(curve)?;
    let records = read_front(&dir.join(FRONT_FILE))?;
    let residuals = records
        .iter()
        .map(|r| oracle.distance(&r.losses))
        .collect::<psst_core::Result<Vec<f64>>>()?;
    if residuals.is_empty() {
        return Err(anyhow!("{} holds no points", dir.join(FRONT_FILE).display()));
    }
    Ok(Some(RunSummary {
        run_id: manifest.run_id,
        command: manifest.command,
        points: residuals.len(),
        mean_residual: residuals.iter().sum::<f64>() / residuals.len() as f64,
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        best_main_loss: records.iter().map(|r| r.losses[0]).fold(f64::INFINITY, f64::min),
        total_iters: manifest.total_iters,
        total_tangent_solves: manifest.total_tangent_solves,
    }))
}

pub fn render(run: &RunSummary, baseline: Option<&RunSummary>) -> String {
    type Cell = Box<dyn Fn(&RunSummary) -> String>;
    let rows: [(&str, Cell); 6] = [
        ("points", Box::new(|s| s.points.to_string())),
        ("mean residual", Box::new(|s| format!("{:.6e}", s.mean_residual))),
        ("max residual", Box::new(|s| format!("{:.6e}", s.max_residual))),
        ("best main loss", Box::new(|s| format!("{:.9e}", s.best_main_loss))),
        ("descent iterations", Box::new(|s| s.total_iters.to_string())),
        ("tangent solves", Box::new(|s| s.total_tangent_solves.to_string())),
    ];
    let mut out = String::new();
    match baseline {
        None => {
            out.push_str(&format!("run {}\n", run.run_id));
            for (label, cell) in &rows {
                out.push_str(&format!("{label:<20} {}\n", cell(run)));
            }
        }
        Some(base) => {
            out.push_str(&format!("{:<20} {:>24} {:>24}\n", "", run.run_id, base.run_id));
            for (label, cell) in &rows {
                out.push_str(&format!("{label:<20} {:>24} {:>24}\n", cell(run), cell(base)));
            }
        }
    }
    out
}
