//! On-disk formats: `front.csv`, `manifest.json` and `best.json`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use psst_core::{ParetoPoint, SolverConfig};
use serde::{Deserialize, Serialize};

pub const FRONT_FILE: &str = "front.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const BEST_FILE: &str = "best.json";

/// Region label used for weighted-sum sweep rows.
pub const SWEEP_REGION: i64 = -1;

/// One row of `front.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontRecord {
    pub run_id: String,
    pub region_index: i64,
    pub point_index: usize,
    pub losses: Vec<f64>,
    pub angle: f64,
    pub stationarity: f64,
    pub iters_used: usize,
}

impl FrontRecord {
    pub fn from_point(run_id: &str, region_index: i64, point_index: usize, point: &ParetoPoint) -> Self {
        Self {
            run_id: run_id.to_owned(),
            region_index,
            point_index,
            losses: point.losses.to_vec(),
            angle: point.angle,
            stationarity: point.stationarity,
            iters_used: point.iters_used,
        }
    }
}

/// `run_id,region_index,point_index,L1,...,LM,angle,stationarity,iters_used`.
pub fn front_header(tasks: usize) -> Vec<String> {
    let mut header = vec!["run_id".to_owned(), "region_index".into(), "point_index".into()];
    header.extend((1..=tasks).map(|m| format!("L{m}")));
    header.extend(["angle".into(), "stationarity".into(), "iters_used".into()]);
    header
}

/// Seventeen significant digits: enough to recover every `f64` exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_front(path: &Path, tasks: usize, records: &[FrontRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    writer.write_record(front_header(tasks))?;
    for r in records {
        if r.losses.len() != tasks {
            bail!("record has {} losses, expected {tasks}", r.losses.len());
        }
        let mut row = vec![r.run_id.clone(), r.region_index.to_string(), r.point_index.to_string()];
        row.extend(r.losses.iter().map(|&x| format_float(x)));
        row.extend([format_float(r.angle), format_float(r.stationarity), r.iters_used.to_string()]);
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_front(path: &Path) -> Result<Vec<FrontRecord>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = reader.headers()?.clone();
    let width = header.len();
    if width < 7 {
        bail!("{}: header has {width} columns", path.display());
    }
    let tasks = width - 6;
    let expected = front_header(tasks);
    if header.iter().ne(expected.iter().map(String::as_str)) {
        bail!("{}: unexpected header {:?}", path.display(), header);
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let float = |i: usize| -> Result<f64> { row[i].parse::<f64>().with_context(|| format!("column {i}")) };
        records.push(FrontRecord {
            run_id: row[0].to_owned(),
            region_index: row[1].parse()?,
            point_index: row[2].parse()?,
            losses: (3..3 + tasks).map(float).collect::<Result<_>>()?,
            angle: float(3 + tasks)?,
            stationarity: float(4 + tasks)?,
            iters_used: row[5 + tasks].parse()?,
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub name: String,
    /// Dimension for the analytic problems, hidden width for `mlp`.
    pub size: usize,
    pub dim: usize,
    pub num_tasks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceSummary {
    pub pi0: f64,
    pub losses: Vec<f64>,
    pub iters_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCounters {
    pub region_index: i64,
    /// Angular bounds; absent for unrestricted exploration.
    pub bounds: Option<[f64; 2]>,
    pub descent_iters: usize,
    pub tangent_solves: usize,
    pub points: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCounters {
    pub weights: Vec<f64>,
    pub iters: usize,
    pub converged: bool,
    pub error: Option<String>,
}

/// Everything needed to reproduce a run. Timing is deliberately left out so
/// repeated runs produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub run_id: String,
    pub problem: ProblemInfo,
    pub master_seed: u64,
    pub config: SolverConfig,
    pub no_region: bool,
    pub balance: Option<BalanceSummary>,
    pub regions: Vec<RegionCounters>,
    pub sweep: Vec<SweepCounters>,
    pub total_iters: usize,
    pub total_tangent_solves: usize,
    pub point_count: usize,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(x: f64) -> FrontRecord {
        FrontRecord {
            run_id: "r".into(),
            region_index: -1,
            point_index: 3,
            losses: vec![x, 1.0 / 3.0],
            angle: std::f64::consts::FRAC_PI_3,
            stationarity: 1e-300,
            iters_used: 12,
        }
    }

    #[test]
    fn csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(FRONT_FILE);
        let records = vec![record(0.1 + 0.2), record(f64::MIN_POSITIVE), record(123456789.12345679)];
        write_front(&path, 2, &records).unwrap();
        assert_eq!(read_front(&path).unwrap(), records);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("run_id,region_index,point_index,L1,L2,angle,stationarity,iters_used\n"));
    }

    #[test]
    fn float_format_has_seventeen_digits() {
        let s = format_float(0.1);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn manifest_round_trips() {
        let manifest = RunManifest {
            tool_version: "0".into(),
            command: "run".into(),
            run_id: "x".into(),
            problem: ProblemInfo { name: "quadratic".into(), size: 3, dim: 3, num_tasks: 2 },
            master_seed: u64::MAX,
            config: SolverConfig { expand_step: 0.1 + 0.2, ..SolverConfig::default() },
            no_region: false,
            balance: Some(BalanceSummary { pi0: std::f64::consts::FRAC_PI_4 + 1e-3, losses: vec![1e-17, 2.0 / 3.0], iters_used: 4 }),
            regions: vec![RegionCounters {
                region_index: 0,
                bounds: Some([0.1, 0.2]),
                descent_iters: 5,
                tangent_solves: 2,
                points: 1,
                error: None,
            }],
            sweep: Vec::new(),
            total_iters: 9,
            total_tangent_solves: 2,
            point_count: 1,
        };
        let dir = tempfile::tempdir().unwrap();
        write_json(&dir.path().join(MANIFEST_FILE), &manifest).unwrap();
        assert_eq!(read_manifest(dir.path()).unwrap(), manifest);
    }
}
