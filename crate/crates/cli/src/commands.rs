// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use dissgate::analytics;
use dissgate::config::RunConfig;
use dissgate::dynamics::{self, convergence_check, PulseSequence};
use dissgate::format::{float, sig12};
use dissgate::gates::{self, GateKind, LogicalPair};
use dissgate::model::{cyclic, DensityState, SystemParams};
use dissgate::operators::{BasisLabel, Level};
use dissgate::spectral::{self, SpectrumExport};
use dissgate::sweep;
use serde_json::{json, Value};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Dressed,
    Scan,
    TruthTable,
    ErrorTable,
    Converge,
    Sweep,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Dressed => "dressed",
            Kind::Scan => "scan",
            Kind::TruthTable => "truth-table",
            Kind::ErrorTable => "error-table",
            Kind::Converge => "converge",
            Kind::Sweep => "sweep",
        }
    }

    fn outputs(self) -> &'static [&'static str] {
        match self {
            Kind::Dressed => &["dressed.json"],
            Kind::Scan => &["scan.json", "probe_scan.csv", "cooling_scan.csv"],
            Kind::TruthTable => &[
                "truth_table.json",
                "trajectory_00.csv",
                "trajectory_01.csv",
                "trajectory_10.csv",
                "trajectory_11.csv",
            ],
            Kind::ErrorTable => &["error_table.json", "error_table.txt"],
            Kind::Converge => &["converge.json"],
            Kind::Sweep => &["sweep.json", "sweep.csv", "cache/"],
        }
    }
}

/// Input states whose dressed structure is reported.
const DRESSED_INPUTS: [(Level, Level, usize); 4] = [
    (Level::Zero, Level::Zero, 0),
    (Level::Zero, Level::One, 0),
    (Level::Zero, Level::Zero, 1),
    (Level::Zero, Level::One, 1),
];

pub fn params_echo(cfg: &RunConfig) -> Value {
    let p = cfg.system_params();
    json!({
        "config": cfg,
        "model": {
            "omega_f_rad_s": sig12(p.omega_f),
            "omega_sb_rad_s": sig12(p.omega_sb),
            "delta_probe_rad_s": sig12(p.delta_probe),
            "delta_mode_rad_s": sig12(p.delta_mode),
            "gamma_f_per_s": sig12(p.gamma_f),
            "gamma_e_per_s": sig12(p.gamma_e),
            "nbar": sig12(p.nbar),
            "heating_rate_per_s": sig12(p.heating_rate),
            "fock_cutoff": p.fock_cutoff,
        },
        "gate_probe_duration_s": sig12(cfg.gate_spec().probe_duration),
    })
}

fn write(out: &Path, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    let path = out.join(name);
    fs::write(&path, bytes).map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))
}

fn write_json(out: &Path, name: &str, v: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(v).expect("json serializes");
    text.push('\n');
    write(out, name, text.as_bytes())
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

fn prepare(out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out).map_err(|e| Failure::Compute(format!("cannot create {}: {e}", out.display())))
}

/// Dry run: validation already happened while loading; describe the work.
pub fn plan(kind: Kind, cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let spec = cfg.gate_spec();
    let p = cfg.system_params();
    spec.validate(&p)?;
    p.validate()?;
    let work = match kind {
        Kind::Dressed => format!("{} dressed-state analyses", DRESSED_INPUTS.len()),
        Kind::Scan => format!(
            "probe scan of 4 inputs over {} points, cooling scan over {} points",
            cfg.scan.probe_points, cfg.scan.cooling_points
        ),
        Kind::TruthTable => format!(
            "{} gate on 4 inputs at Fock cutoff {}, {} quadrature nodes",
            spec.kind,
            p.fock_cutoff,
            if cfg.analysis.rabi_spread == 0.0 {
                1
            } else {
                cfg.analysis.quadrature_nodes
            }
        ),
        Kind::ErrorTable => format!(
            "OR gate on 2 inputs at {} quadrature nodes",
            if cfg.analysis.rabi_spread == 0.0 {
                1
            } else {
                cfg.analysis.quadrature_nodes
            }
        ),
        Kind::Converge => format!("{} gate on 4 inputs at cutoffs {:?}", spec.kind, cfg.converge.cutoffs),
        Kind::Sweep => {
            let points = sweep::plan(cfg)?;
            format!("{} grid points x 4 inputs (cap {})", points.len(), cfg.sweep.max_points)
        }
    };
    println!("dry run: {}", kind.name());
    println!("  configuration valid");
    println!("  work: {work}");
    for f in kind.outputs() {
        println!("  would write {}", out.join(f).display());
    }
    Ok(())
}

pub fn run(kind: Kind, cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    prepare(out)?;
    match kind {
        Kind::Dressed => dressed(cfg, out),
        Kind::Scan => scan(cfg, out),
        Kind::TruthTable => truth_table(cfg, out),
        Kind::ErrorTable => error_table(cfg, out),
        Kind::Converge => converge(cfg, out),
        Kind::Sweep => run_sweep(cfg, out),
    }
}

/// Spectra are reported at zero probe detuning, where the eigenvalues are
/// the pure sideband splittings; resonances use the gate's detuning.
fn dressed(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let params = cfg.system_params();
    let spec = cfg.gate_spec();
    let bare = SystemParams {
        delta_probe: 0.0,
        ..params.clone()
    };
    let gate_params = spec.gate_params(&params);
    let mut entries = Vec::new();
    for (k, l, n) in DRESSED_INPUTS {
        let initial = BasisLabel::new(k, l, n);
        let sub = spectral::excited_subspace(initial, &bare)?;
        let states = spectral::dressed_spectrum(&sub)?;
        let export = SpectrumExport::new(&sub, &states);
        println!(
            "{initial}: splittings [{}] Hz",
            export
                .eigenvalues_hz
                .iter()
                .map(|e| format!("{e:.3}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
        let resonances: Vec<Value> = spectral::resonances_at(initial, &gate_params)?
            .iter()
            .map(|r| {
                json!({
                    "ground_energy_hz": sig12(cyclic(r.ground.energy)),
                    "excited_energy_hz": sig12(cyclic(r.excited.energy)),
                    "ground_weight": sig12(r.ground_weight),
                    "detuning_hz": sig12(cyclic(r.detuning)),
                    "rabi_hz": sig12(cyclic(r.rabi)),
                })
            })
            .collect();
        entries.push(json!({
            "initial": initial.to_string(),
            "spectrum": export,
            "ground_labels": sub.ground.labels.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "resonances": resonances,
        }));
    }
    write_json(
        out,
        "dressed.json",
        &json!({
            "gate": spec.kind.name(),
            "probe_detuning_hz": sig12(cyclic(gate_params.delta_probe)),
            "params_echo": params_echo(cfg),
            "subspaces": entries,
        }),
    )
}

fn grid(duration: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| duration * k as f64 / (points - 1) as f64).collect()
}

fn scan_spec(cfg: &RunConfig, params: &SystemParams) -> gates::GateSpec {
    let mut spec = gates::GateSpec::experimental(GateKind::Nor);
    spec.probe_detuning = Some(
        cfg.scan
            .probe_detuning_hz
            .map(dissgate::model::angular)
            .unwrap_or(params.omega_sb / 2.0),
    );
    spec.probe_duration = cfg.scan.prep_duration_s;
    spec.readout = cfg.gate.readout;
    spec
}

fn scan(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let params = cfg.system_params();
    let icfg = cfg.integrator();
    let spec = scan_spec(cfg, &params);
    let probe_times = grid(cfg.scan.probe_duration_s, cfg.scan.probe_points);
    let probe = gates::probe_scan(&spec, &params, &icfg, &probe_times)?;
    let cool_times = grid(cfg.scan.cooling_duration_s, cfg.scan.cooling_points);
    let cool = gates::cooling_scan(&spec, &params, &icfg, &cool_times)?;
    write(out, "probe_scan.csv", &csv_bytes(|w| probe.write_csv(w)))?;
    write(out, "cooling_scan.csv", &csv_bytes(|w| cool.write_csv(w)))?;

    let last = |v: &Vec<f64>| sig12(*v.last().expect("non-empty grid"));
    let depletion: serde_json::Map<String, Value> = LogicalPair::ALL
        .iter()
        .map(|i| (i.to_string(), json!(sig12(probe.depletion(*i, probe_times.len() - 1)))))
        .collect();
    println!("probe depletion after {} s:", float(cfg.scan.probe_duration_s));
    for (k, v) in &depletion {
        println!("  |{k}>  {v}");
    }
    println!(
        "after {} s of cooling: P_10 = {}, P(10,n=0) = {}, ground fraction = {}",
        float(cfg.scan.cooling_duration_s),
        last(&cool.p_10),
        last(&cool.p_10_ground),
        last(&cool.ground_fraction)
    );
    write_json(
        out,
        "scan.json",
        &json!({
            "params_echo": params_echo(cfg),
            "probe_detuning_hz": sig12(cyclic(probe.detuning)),
            "probe": {"duration_s": sig12(cfg.scan.probe_duration_s), "final_depletion": depletion},
            "cooling": {
                "prep_duration_s": sig12(cfg.scan.prep_duration_s),
                "duration_s": sig12(cfg.scan.cooling_duration_s),
                "final_p_f0": last(&cool.p_f0),
                "final_p_10": last(&cool.p_10),
                "final_p_10_ground": last(&cool.p_10_ground),
                "final_ground_fraction": last(&cool.ground_fraction),
            },
        }),
    )
}

/// The table is averaged over the configured Rabi-frequency spread;
/// trajectories are written for the nominal parameters.
fn truth_table(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let params = cfg.system_params();
    let spec = cfg.gate_spec();
    let icfg = cfg.integrator();
    let merged = spec.readout == gates::Readout::Merged;
    for input in LogicalPair::ALL {
        let (_, traj) = gates::run_input_traced(&spec, &params, &icfg, input)?;
        write(
            out,
            &format!("trajectory_{input}.csv"),
            &csv_bytes(|w| traj.write_csv(w, merged)),
        )?;
    }
    let (sigma, nodes) = (cfg.analysis.rabi_spread, cfg.analysis.quadrature_nodes);
    let table = analytics::spread_truth_table(&spec, &params, &icfg, sigma, nodes)?;
    println!(
        "{} truth table, {}% Rabi spread (rows: input, columns: output 00 01 10 11)",
        spec.kind,
        float(100.0 * sigma)
    );
    for r in &table.rows {
        println!(
            "  |{}>  {}   success {:.3}",
            r.input,
            r.outputs
                .iter()
                .map(|p| format!("{p:.3}"))
                .collect::<Vec<_>>()
                .join(" "),
            r.success
        );
    }
    println!("average fidelity {:.3}", table.average_fidelity);
    let mut v = table.to_json(params_echo(cfg));
    v["rabi_spread"] = json!(sig12(sigma));
    v["quadrature_nodes"] = json!(if sigma == 0.0 { 1 } else { nodes });
    write_json(out, "truth_table.json", &v)
}

fn error_table(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let params = cfg.system_params();
    let report = analytics::table_s1(&params, &cfg.integrator(), &cfg.table_options())?;
    let table = report.table();
    print!("{table}");
    write(out, "error_table.txt", table.as_bytes())?;
    write_json(out, "error_table.json", &report.to_json(params_echo(cfg)))
}

fn converge(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let params = cfg.system_params();
    let spec = cfg.gate_spec();
    let icfg = cfg.integrator();
    let mut reports = serde_json::Map::new();
    let mut all_passed = true;
    for input in LogicalPair::ALL {
        let build = |p: &SystemParams| -> dissgate::Result<(DensityState, PulseSequence)> {
            let gp = spec.gate_params(p);
            Ok((
                gates::initial_state(&spec, &gp, input)?,
                gates::build_sequence(&spec, &gp)?,
            ))
        };
        let report = convergence_check(&params, &icfg, &cfg.converge.cutoffs, build)?;
        all_passed &= report.passed();
        println!(
            "|{input}>: successive max population differences {} ({})",
            report
                .differences
                .iter()
                .map(|d| format!("{d:.2e}"))
                .collect::<Vec<_>>()
                .join(", "),
            if report.passed() { "converged" } else { "not converged" }
        );
        let pops: Vec<Vec<f64>> = report
            .populations
            .iter()
            .map(|p| p.0.iter().flatten().map(|x| sig12(*x)).collect())
            .collect();
        reports.insert(
            input.to_string(),
            json!({
                "cutoffs": report.cutoffs,
                "populations": pops,
                "differences": report.differences.iter().map(|d| sig12(*d)).collect::<Vec<_>>(),
                "threshold": report.threshold,
                "passed": report.passed(),
            }),
        );
    }
    write_json(
        out,
        "converge.json",
        &json!({
            "gate": spec.kind.name(),
            "params_echo": params_echo(cfg),
            "population_order": dynamics::Trajectory::csv_header().split(',').skip(1).take(16).collect::<Vec<_>>(),
            "inputs": reports,
            "passed": all_passed,
        }),
    )
}

fn run_sweep(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let cache: PathBuf = out.join("cache");
    let result = sweep::run_sweep(cfg, Some(&cache))?;
    write(out, "sweep.csv", &csv_bytes(|w| result.write_csv(w)))?;
    let best = result.best();
    let cached = result.points.iter().filter(|p| p.cached).count();
    println!("{} points evaluated ({} from cache)", result.points.len(), cached);
    let names: Vec<&str> = result.axes.iter().map(|(n, _)| n.as_str()).collect();
    println!(
        "best objective {:.4} at {}",
        best.objective,
        names
            .iter()
            .zip(&best.values)
            .map(|(n, v)| format!("{n} = {}", float(*v)))
            .collect::<Vec<_>>()
            .join(", ")
    );
    write_json(out, "sweep.json", &result.to_json(params_echo(cfg)))
}
