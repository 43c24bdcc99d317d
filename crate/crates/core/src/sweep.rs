// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Grid sweeps of the truth-table objective over one or two parameters.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{self, Objective, RunConfig};
use crate::error::{Error, Result};
use crate::format::{float, sig12};
use crate::gates::{simulate_truth_table, TruthTable};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// Grid index along each axis.
    pub index: Vec<usize>,
    pub values: Vec<f64>,
    /// Success per input, ordered `00, 01, 10, 11`.
    pub success: [f64; 4],
    pub average_fidelity: f64,
    pub objective: f64,
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub objective: Objective,
    pub axes: Vec<(String, Vec<f64>)>,
    /// Row-major over the axes, first axis slowest.
    pub points: Vec<SweepPoint>,
    pub argmax: usize,
}

pub fn objective_value(objective: Objective, success: &[f64; 4], average: f64) -> f64 {
    match objective {
        Objective::AverageFidelity => average,
        Objective::Success00 => success[0],
        Objective::Success01 => success[1],
        Objective::Success10 => success[2],
        Objective::Success11 => success[3],
    }
}

/// Grid points in evaluation order, checked against the point budget.
pub fn plan(cfg: &RunConfig) -> Result<Vec<(Vec<usize>, Vec<f64>)>> {
    let grids: Vec<Vec<f64>> = cfg.sweep.axes.iter().map(|a| a.values()).collect();
    let total = grids
        .iter()
        .try_fold(1usize, |acc, g| acc.checked_mul(g.len()))
        .unwrap_or(usize::MAX);
    if total > cfg.sweep.max_points {
        return Err(Error::Budget {
            points: total,
            cap: cfg.sweep.max_points,
        });
    }
    let mut out = vec![(Vec::new(), Vec::new())];
    for grid in &grids {
        out = out
            .into_iter()
            .flat_map(|(idx, vals)| {
                grid.iter().enumerate().map(move |(k, v)| {
                    let mut i = idx.clone();
                    let mut x = vals.clone();
                    i.push(k);
                    x.push(*v);
                    (i, x)
                })
            })
            .collect();
    }
    Ok(out)
}

/// Configuration of one grid point.
pub fn point_config(cfg: &RunConfig, values: &[f64]) -> Result<RunConfig> {
    let mut c = cfg.clone();
    for (axis, v) in cfg.sweep.axes.iter().zip(values) {
        c = c.with_param(&axis.param, *v)?;
    }
    Ok(c)
}

/// A cached truth-table result, keyed by the full point configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheEntry {
    pub config: String,
    pub success: Vec<f64>,
    pub average_fidelity: f64,
}

impl CacheEntry {
    fn from_table(config: String, table: &TruthTable) -> Self {
        Self {
            config,
            success: table.rows.iter().map(|r| r.success).collect(),
            average_fidelity: table.average_fidelity,
        }
    }

    fn success_array(&self) -> [f64; 4] {
        [self.success[0], self.success[1], self.success[2], self.success[3]]
    }
}

/// Decodes and checks a cache file.
pub fn decode_cache_entry(bytes: &[u8]) -> Result<CacheEntry> {
    let entry: CacheEntry = serde_json::from_slice(bytes).map_err(|e| Error::Cache(e.to_string()))?;
    if entry.success.len() != 4 {
        return Err(Error::Cache(format!(
            "expected 4 success values, got {}",
            entry.success.len()
        )));
    }
    let in_range = |x: f64| x.is_finite() && (-1e-9..=1.0 + 1e-9).contains(&x);
    if !entry.success.iter().all(|&x| in_range(x)) || !in_range(entry.average_fidelity) {
        return Err(Error::Cache("probability outside [0, 1]".into()));
    }
    Ok(entry)
}

pub fn encode_cache_entry(entry: &CacheEntry) -> Vec<u8> {
    serde_json::to_vec_pretty(entry).expect("cache entry serializes")
}

fn cache_path(dir: &Path, index: &[usize]) -> PathBuf {
    let name: Vec<String> = index.iter().map(ToString::to_string).collect();
    dir.join(format!(
        "point-{}.json",
        if name.is_empty() { "0".into() } else { name.join("-") }
    ))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn load_cached(path: &Path, key: &str) -> Option<CacheEntry> {
    let bytes = fs::read(path).ok()?;
    decode_cache_entry(&bytes).ok().filter(|e| e.config == key)
}

/// Evaluates every grid point in parallel. With `cache_dir`, points whose
/// configuration is unchanged are read back instead of recomputed, and new
/// results are stored.
pub fn run_sweep(cfg: &RunConfig, cache_dir: Option<&Path>) -> Result<SweepResult> {
    let grid = plan(cfg)?;
    if let Some(dir) = cache_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let points = grid
        .into_par_iter()
        .map(|(index, values)| {
            let pc = point_config(cfg, &values)?;
            let key = config::serialize(&pc);
            let path = cache_dir.map(|d| cache_path(d, &index));
            let (entry, cached) = match path.as_deref().and_then(|p| load_cached(p, &key)) {
                Some(e) => (e, true),
                None => {
                    let table = simulate_truth_table(&pc.gate_spec(), &pc.system_params(), &pc.integrator())?;
                    let e = CacheEntry::from_table(key, &table);
                    if let Some(p) = &path {
                        fs::write(p, encode_cache_entry(&e)).map_err(io_err(p))?;
                    }
                    (e, false)
                }
            };
            let success = entry.success_array();
            let objective = objective_value(cfg.sweep.objective, &success, entry.average_fidelity);
            if !objective.is_finite() {
                return Err(Error::NonFinite { time: 0.0 });
            }
            Ok(SweepPoint {
                index,
                values,
                success,
                average_fidelity: entry.average_fidelity,
                objective,
                cached,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let argmax = argmax(&points);
    Ok(SweepResult {
        objective: cfg.sweep.objective,
        axes: cfg.sweep.axes.iter().map(|a| (a.param.clone(), a.values())).collect(),
        points,
        argmax,
    })
}

/// First maximum in grid order, which favours smaller axis values on ties.
fn argmax(points: &[SweepPoint]) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.objective > points[best].objective {
            best = i;
        }
    }
    best
}

impl SweepResult {
    pub fn best(&self) -> &SweepPoint {
        &self.points[self.argmax]
    }

    pub fn to_json(&self, params_echo: Value) -> Value {
        let axes: Vec<Value> = self
            .axes
            .iter()
            .map(
                |(name, values)| json!({"param": name, "values": values.iter().map(|v| sig12(*v)).collect::<Vec<_>>()}),
            )
            .collect();
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                json!({
                    "index": p.index,
                    "values": p.values.iter().map(|v| sig12(*v)).collect::<Vec<_>>(),
                    "objective": sig12(p.objective),
                    "success_per_input": p.success.iter().map(|v| sig12(*v)).collect::<Vec<_>>(),
                    "average_fidelity": sig12(p.average_fidelity),
                })
            })
            .collect();
        let best = self.best();
        json!({
            "objective": self.objective,
            "params_echo": params_echo,
            "axes": axes,
            "points": points,
            "argmax": {
                "index": best.index,
                "values": best.values.iter().map(|v| sig12(*v)).collect::<Vec<_>>(),
                "objective": sig12(best.objective),
            },
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header: Vec<String> = self.axes.iter().map(|(n, _)| n.clone()).collect();
        header.extend(
            [
                "objective",
                "success_00",
                "success_01",
                "success_10",
                "success_11",
                "average_fidelity",
            ]
            .map(String::from),
        );
        writeln!(w, "{}", header.join(","))?;
        for p in &self.points {
            let mut row: Vec<String> = p.values.iter().map(|v| float(*v)).collect();
            row.push(float(p.objective));
            row.extend(p.success.iter().map(|v| float(*v)));
            row.push(float(p.average_fidelity));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AxisScale, SweepAxis};

    fn axis(param: &str, min: f64, max: f64, points: usize) -> SweepAxis {
        SweepAxis {
            param: param.into(),
            min,
            max,
            points,
            scale: AxisScale::Linear,
        }
    }

    fn point(objective: f64) -> SweepPoint {
        SweepPoint {
            index: vec![],
            values: vec![],
            success: [0.0; 4],
            average_fidelity: 0.0,
            objective,
            cached: false,
        }
    }

    #[test]
    fn plan_is_row_major() {
        let mut cfg = RunConfig::default();
        cfg.sweep.axes = vec![axis("nbar", 0.0, 1.0, 2), axis("heating_rate_per_s", 0.0, 100.0, 3)];
        let p = plan(&cfg).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p[0].0, vec![0, 0]);
        assert_eq!(p[1].0, vec![0, 1]);
        assert_eq!(p[3].1, vec![1.0, 0.0]);
    }

    #[test]
    fn budget_guard_fires_before_work() {
        let mut cfg = RunConfig::default();
        cfg.sweep.max_points = 10;
        cfg.sweep.axes = vec![axis("nbar", 0.0, 1.0, 4), axis("heating_rate_per_s", 0.0, 100.0, 3)];
        assert!(matches!(
            run_sweep(&cfg, None),
            Err(Error::Budget { points: 12, cap: 10 })
        ));
    }

    #[test]
    fn no_axes_is_one_point() {
        assert_eq!(plan(&RunConfig::default()).unwrap(), vec![(vec![], vec![])]);
    }

    #[test]
    fn argmax_prefers_first() {
        let pts = vec![point(0.5), point(0.9), point(0.9), point(0.1)];
        assert_eq!(argmax(&pts), 1);
    }

    #[test]
    fn cache_round_trip_and_rejection() {
        let e = CacheEntry {
            config: "x = 1".into(),
            success: vec![0.9, 0.8, 1.0, 0.0],
            average_fidelity: 0.675,
        };
        assert_eq!(decode_cache_entry(&encode_cache_entry(&e)).unwrap(), e);
        assert!(decode_cache_entry(b"{}").is_err());
        assert!(decode_cache_entry(b"not json").is_err());
        let bad = CacheEntry {
            success: vec![0.5; 3],
            ..e.clone()
        };
        assert!(decode_cache_entry(&encode_cache_entry(&bad)).is_err());
        let bad = CacheEntry {
            success: vec![2.0; 4],
            ..e
        };
        assert!(decode_cache_entry(&encode_cache_entry(&bad)).is_err());
    }

    #[test]
    fn cached_points_are_reused() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig::default();
        cfg.system.fock_cutoff = 1;
        cfg.integrator.rel_tol = 1e-5;
        cfg.integrator.abs_tol = 1e-7;
        cfg.sweep.axes = vec![axis("nbar", 0.0, 0.1, 2)];
        let first = run_sweep(&cfg, Some(dir.path())).unwrap();
        assert!(first.points.iter().all(|p| !p.cached));
        let second = run_sweep(&cfg, Some(dir.path())).unwrap();
        assert!(second.points.iter().all(|p| p.cached));
        // cached values round-trip exactly
        for (a, b) in first.points.iter().zip(&second.points) {
            for (x, y) in a.success.iter().zip(&b.success) {
                assert_eq!(x, y);
            }
        }
        // a changed configuration invalidates the entry
        cfg.system.heating_rate_per_s = 0.0;
        let third = run_sweep(&cfg, Some(dir.path())).unwrap();
        assert!(third.points.iter().all(|p| !p.cached));
    }
}
