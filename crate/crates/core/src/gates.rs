// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! OR and NOR pulse sequences, truth tables and the probe/cooling scans.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{
    self, basis_population, evolve_sampled, ground_state_fraction, populations, IntegratorConfig, PulseSegment,
    PulseSequence, Trajectory,
};
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::model::{thermal_initial_state, DensityState, SystemParams};
use crate::operators::{ComplexMatrix, HilbertSpace, Ion, Level, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Or,
    Nor,
}

impl GateKind {
    /// Probe detuning that puts the gate's target dressed state on resonance.
    pub fn probe_detuning(self, omega_sb: f64) -> f64 {
        match self {
            GateKind::Or => omega_sb / SQRT_2,
            GateKind::Nor => omega_sb / 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
        }
    }

    /// Probe time of a resonant π-pulse on the addressed dressed state:
    /// `Ω_d = Ω_f/2` for OR and `Ω_f/√2` for NOR.
    pub fn pi_time(self, omega_f: f64) -> f64 {
        match self {
            GateKind::Or => 2.0 * PI / omega_f,
            GateKind::Nor => SQRT_2 * PI / omega_f,
        }
    }

    /// Probe durations used in the experiment.
    pub fn experimental_probe_duration(self) -> f64 {
        match self {
            GateKind::Or => 900e-6,
            GateKind::Nor => 600e-6,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "or" => Ok(GateKind::Or),
            "nor" => Ok(GateKind::Nor),
            other => Err(format!("unknown gate kind `{other}`, expected `or` or `nor`")),
        }
    }
}

/// Two logical bits, ion 1 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalPair(pub bool, pub bool);

impl LogicalPair {
    pub const ALL: [LogicalPair; 4] = [
        LogicalPair(false, false),
        LogicalPair(false, true),
        LogicalPair(true, false),
        LogicalPair(true, true),
    ];

    pub fn index(self) -> usize {
        2 * usize::from(self.0) + usize::from(self.1)
    }

    pub fn levels(self) -> (Level, Level) {
        let l = |b: bool| if b { Level::One } else { Level::Zero };
        (l(self.0), l(self.1))
    }

    pub fn flip_first(self) -> Self {
        LogicalPair(!self.0, self.1)
    }
}

impl fmt::Display for LogicalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", u8::from(self.0), u8::from(self.1))
    }
}

impl FromStr for LogicalPair {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bit = |c: u8| match c {
            b'0' => Ok(false),
            b'1' => Ok(true),
            _ => Err(format!("invalid logical pair `{s}`")),
        };
        match s.as_bytes() {
            [a, b] => Ok(LogicalPair(bit(*a)?, bit(*b)?)),
            _ => Err(format!("invalid logical pair `{s}`")),
        }
    }
}

pub fn intended_output(kind: GateKind, input: LogicalPair) -> LogicalPair {
    let or = LogicalPair(input.0 || input.1, input.1);
    match kind {
        GateKind::Or => or,
        GateKind::Nor => or.flip_first(),
    }
}

/// How electronic levels map to logical bits at readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    /// `0` is bright; `1`, `f` and `e` are all dark and read as 1.
    Merged,
    /// Only `0` and `1` are logical; the rest is reported as leakage.
    Exact,
}

impl FromStr for Readout {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "merged" => Ok(Readout::Merged),
            "exact" => Ok(Readout::Exact),
            other => Err(format!("unknown readout `{other}`, expected `merged` or `exact`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    /// Overrides the gate's resonance detuning (rad/s).
    pub probe_detuning: Option<f64>,
    pub probe_duration: f64,
    pub dissipation_duration: f64,
    /// NOR only; `None` means `5/Γ_e`.
    pub pump_duration: Option<f64>,
    pub readout: Readout,
    /// Probability of preparing the intended input; the rest starts in `|00⟩`.
    pub init_fidelity: f64,
}

impl GateSpec {
    pub const DEFAULT_DISSIPATION: f64 = 1e-3;

    /// Probe time is the π-time of the addressed dressed state.
    pub fn new(kind: GateKind, params: &SystemParams) -> Self {
        Self::with_probe_duration(kind, kind.pi_time(params.omega_f))
    }

    /// Probe time as used in the experiment.
    pub fn experimental(kind: GateKind) -> Self {
        Self::with_probe_duration(kind, kind.experimental_probe_duration())
    }

    pub fn with_probe_duration(kind: GateKind, probe_duration: f64) -> Self {
        Self {
            kind,
            probe_detuning: None,
            probe_duration,
            dissipation_duration: Self::DEFAULT_DISSIPATION,
            pump_duration: None,
            readout: Readout::Merged,
            init_fidelity: 1.0,
        }
    }

    pub fn detuning(&self, params: &SystemParams) -> f64 {
        self.probe_detuning
            .unwrap_or_else(|| self.kind.probe_detuning(params.omega_sb))
    }

    /// `params` with the probe detuning of this gate.
    pub fn gate_params(&self, params: &SystemParams) -> SystemParams {
        SystemParams {
            delta_probe: self.detuning(params),
            ..params.clone()
        }
    }

    pub fn pump_time(&self, params: &SystemParams) -> f64 {
        self.pump_duration.unwrap_or(5.0 / params.gamma_e)
    }

    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive, got {v}"),
                })
            }
        };
        positive("probe_duration", self.probe_duration)?;
        positive("dissipation_duration", self.dissipation_duration)?;
        if self.kind == GateKind::Nor {
            positive("pump_duration", self.pump_time(params))?;
        }
        if let Some(d) = self.probe_detuning {
            if !d.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "probe_detuning",
                    reason: format!("must be finite, got {d}"),
                });
            }
        }
        if !(0.0..=1.0).contains(&self.init_fidelity) {
            return Err(Error::InvalidParameter {
                name: "init_fidelity",
                reason: format!("must lie in [0, 1], got {}", self.init_fidelity),
            });
        }
        Ok(())
    }
}

/// π-pulse swapping `|1⟩` and `|e⟩` on one ion.
pub fn shelving_unitary(space: HilbertSpace, ion: Ion) -> ComplexMatrix {
    let mut u = space.identity();
    u -= space.ion_op(ion, Level::One, Level::One);
    u -= space.ion_op(ion, Level::E, Level::E);
    u += space.ion_op(ion, Level::E, Level::One);
    u += space.ion_op(ion, Level::One, Level::E);
    u
}

pub fn build_sequence(spec: &GateSpec, params: &SystemParams) -> Result<PulseSequence> {
    spec.validate(params)?;
    let probe = PulseSegment::new("probe", spec.probe_duration).probe().sideband();
    let cool = PulseSegment::new("dissipation", spec.dissipation_duration)
        .sideband()
        .cooling();
    let segments = match spec.kind {
        GateKind::Or => vec![probe, cool],
        GateKind::Nor => vec![
            probe.with_unitary(shelving_unitary(params.space(), Ion::First)),
            cool,
            PulseSegment::new("pump", spec.pump_time(params)).pump(&[Ion::First]),
        ],
    };
    PulseSequence::new(segments)
}

/// Thermal initial state for a logical input, mixed with `|00⟩` according
/// to the preparation fidelity.
pub fn initial_state(spec: &GateSpec, params: &SystemParams, input: LogicalPair) -> Result<DensityState> {
    let (a, b) = input.levels();
    let target = thermal_initial_state(params, a, b)?;
    if spec.init_fidelity >= 1.0 || input == LogicalPair(false, false) {
        return Ok(target);
    }
    let fallback = thermal_initial_state(params, Level::Zero, Level::Zero)?;
    let f = spec.init_fidelity;
    let rho = target.rho() * (ONE * f) + fallback.rho() * (ONE * (1.0 - f));
    DensityState::new(params.space(), rho)
}

/// Runs the gate on one input and returns the final state.
pub fn run_input(
    spec: &GateSpec,
    params: &SystemParams,
    cfg: &IntegratorConfig,
    input: LogicalPair,
) -> Result<DensityState> {
    let p = spec.gate_params(params);
    let seq = build_sequence(spec, &p)?;
    let mut state = initial_state(spec, &p, input)?;
    for (i, segment) in seq.segments().iter().enumerate() {
        state = evolve_sampled(&state, segment, &p, cfg, &[], 0.0, i)?.0;
    }
    Ok(state)
}

/// Runs the gate on one input with the trajectory sampled on a common clock.
pub fn run_input_traced(
    spec: &GateSpec,
    params: &SystemParams,
    cfg: &IntegratorConfig,
    input: LogicalPair,
) -> Result<(DensityState, Trajectory)> {
    let p = spec.gate_params(params);
    let seq = build_sequence(spec, &p)?;
    let initial = initial_state(spec, &p, input)?;
    dynamics::run_sequence(&initial, &seq, &p, cfg)
}

/// Logical output distribution of a final state, ordered `00, 01, 10, 11`,
/// plus the population outside the logical readout.
pub fn logical_distribution(state: &DensityState, readout: Readout) -> ([f64; 4], f64) {
    let pops = populations(state, false);
    let bit = |l: Level| match (l, readout) {
        (Level::Zero, _) => Some(false),
        (_, Readout::Merged) | (Level::One, Readout::Exact) => Some(true),
        _ => None,
    };
    let mut out = [0.0; 4];
    let mut leakage = 0.0;
    for (a, b, p) in pops.iter() {
        match (bit(a), bit(b)) {
            (Some(x), Some(y)) => out[LogicalPair(x, y).index()] += p,
            _ => leakage += p,
        }
    }
    (out, leakage)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthRow {
    pub input: LogicalPair,
    pub outputs: [f64; 4],
    pub leakage: f64,
    pub success: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable {
    pub gate: GateKind,
    pub readout: Readout,
    /// Ordered `00, 01, 10, 11`.
    pub rows: Vec<TruthRow>,
    pub average_fidelity: f64,
}

impl TruthTable {
    pub fn row(&self, input: LogicalPair) -> &TruthRow {
        &self.rows[input.index()]
    }

    pub fn success(&self, input: LogicalPair) -> f64 {
        self.row(input).success
    }

    pub fn to_json(&self, params_echo: Value) -> Value {
        let mut rows = serde_json::Map::new();
        let mut success = serde_json::Map::new();
        let mut leakage = serde_json::Map::new();
        for r in &self.rows {
            let outputs: serde_json::Map<String, Value> = LogicalPair::ALL
                .iter()
                .map(|o| (o.to_string(), json!(sig12(r.outputs[o.index()]))))
                .collect();
            rows.insert(r.input.to_string(), Value::Object(outputs));
            success.insert(r.input.to_string(), json!(sig12(r.success)));
            leakage.insert(r.input.to_string(), json!(sig12(r.leakage)));
        }
        json!({
            "gate": self.gate.name(),
            "readout": self.readout,
            "params_echo": params_echo,
            "rows": rows,
            "success_per_input": success,
            "leakage_per_input": leakage,
            "average_fidelity": sig12(self.average_fidelity),
        })
    }
}

pub fn truth_row(spec: &GateSpec, state: &DensityState, input: LogicalPair) -> TruthRow {
    let (outputs, leakage) = logical_distribution(state, spec.readout);
    TruthRow {
        input,
        outputs,
        leakage,
        success: outputs[intended_output(spec.kind, input).index()],
    }
}

/// Runs all four inputs, in parallel, and tabulates the outputs.
pub fn simulate_truth_table(spec: &GateSpec, params: &SystemParams, cfg: &IntegratorConfig) -> Result<TruthTable> {
    params.validate()?;
    spec.validate(params)?;
    let rows = LogicalPair::ALL
        .par_iter()
        .map(|&input| run_input(spec, params, cfg, input).map(|s| truth_row(spec, &s, input)))
        .collect::<Result<Vec<_>>>()?;
    let average_fidelity = rows.iter().map(|r| r.success).sum::<f64>() / rows.len() as f64;
    Ok(TruthTable {
        gate: spec.kind,
        readout: spec.readout,
        rows,
        average_fidelity,
    })
}

/// Population left in each input state during the probe pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeScan {
    pub detuning: f64,
    pub times: Vec<f64>,
    /// Indexed by input, ordered `00, 01, 10, 11`.
    pub remaining: Vec<Vec<f64>>,
    pub trajectories: Vec<Trajectory>,
}

impl ProbeScan {
    pub fn depletion(&self, input: LogicalPair, k: usize) -> f64 {
        1.0 - self.remaining[input.index()][k]
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "time_s,remaining_00,remaining_01,remaining_10,remaining_11")?;
        for (k, t) in self.times.iter().enumerate() {
            write!(w, "{}", crate::format::float(*t))?;
            for curve in &self.remaining {
                write!(w, ",{}", crate::format::float(curve[k]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    let sorted = times.windows(2).all(|w| w[0] <= w[1]);
    if times.is_empty() || !sorted || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidParameter {
            name: "time_grid",
            reason: "must be a non-empty ascending list of non-negative times".into(),
        });
    }
    Ok(())
}

/// Probe plus sideband from every thermal input at the spec's detuning,
/// reading the remaining input population with the spec's readout.
pub fn probe_scan(spec: &GateSpec, params: &SystemParams, cfg: &IntegratorConfig, times: &[f64]) -> Result<ProbeScan> {
    check_grid(times)?;
    let p = spec.gate_params(params);
    p.validate()?;
    let duration = times[times.len() - 1].max(f64::MIN_POSITIVE);
    let segment = PulseSegment::new("probe", duration).probe().sideband();
    let runs = LogicalPair::ALL
        .par_iter()
        .map(|&input| {
            let (a, b) = input.levels();
            let initial = thermal_initial_state(&p, a, b)?;
            let (_, traj) = evolve_sampled(&initial, &segment, &p, cfg, times, 0.0, 0)?;
            let remaining = traj
                .samples
                .iter()
                .map(|s| {
                    let pops = match spec.readout {
                        Readout::Merged => s.populations.merged(),
                        Readout::Exact => s.populations,
                    };
                    pops.get(a, b)
                })
                .collect::<Vec<_>>();
            Ok((remaining, traj))
        })
        .collect::<Result<Vec<_>>>()?;
    let (remaining, trajectories) = runs.into_iter().unzip();
    Ok(ProbeScan {
        detuning: p.delta_probe,
        times: times.to_vec(),
        remaining,
        trajectories,
    })
}

/// Observables during the dissipation step after a probe transfer from `|00⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoolingScan {
    pub times: Vec<f64>,
    pub p_f0: Vec<f64>,
    pub p_10: Vec<f64>,
    pub ground_fraction: Vec<f64>,
    /// Joint population of `|10⟩|0⟩`.
    pub p_10_ground: Vec<f64>,
}

impl CoolingScan {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::format::float;
        writeln!(w, "time_s,P_f0,P_10,ground_frac,P_10_n0")?;
        for k in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                float(self.times[k]),
                float(self.p_f0[k]),
                float(self.p_10[k]),
                float(self.ground_fraction[k]),
                float(self.p_10_ground[k])
            )?;
        }
        Ok(())
    }
}

/// Prepares the dressed state with the spec's probe pulse from thermal
/// `|00⟩`, then samples sideband plus cooling on `times` (measured from the
/// end of the probe). Populations are read exactly.
pub fn cooling_scan(
    spec: &GateSpec,
    params: &SystemParams,
    cfg: &IntegratorConfig,
    times: &[f64],
) -> Result<CoolingScan> {
    check_grid(times)?;
    let p = spec.gate_params(params);
    p.validate()?;
    let initial = thermal_initial_state(&p, Level::Zero, Level::Zero)?;
    let probe = PulseSegment::new("probe", spec.probe_duration).probe().sideband();
    let (mut state, _) = evolve_sampled(&initial, &probe, &p, cfg, &[], 0.0, 0)?;

    let mut scan = CoolingScan {
        times: times.to_vec(),
        p_f0: Vec::with_capacity(times.len()),
        p_10: Vec::with_capacity(times.len()),
        ground_fraction: Vec::with_capacity(times.len()),
        p_10_ground: Vec::with_capacity(times.len()),
    };
    let mut t = 0.0;
    for &target in times {
        if target > t {
            let seg = PulseSegment::new("dissipation", target - t).sideband().cooling();
            state = evolve_sampled(&state, &seg, &p, cfg, &[], 0.0, 1)?.0;
            t = target;
        }
        let pops = populations(&state, false);
        scan.p_f0.push(pops.get(Level::F, Level::Zero));
        scan.p_10.push(pops.get(Level::One, Level::Zero));
        scan.ground_fraction.push(ground_state_fraction(&state));
        scan.p_10_ground
            .push(basis_population(&state, Level::One, Level::Zero, 0)?);
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SystemParams {
        SystemParams {
            fock_cutoff: 3,
            ..SystemParams::default()
        }
    }

    #[test]
    fn intended_maps() {
        let p = |s: &str| s.parse::<LogicalPair>().unwrap();
        let or: Vec<_> = LogicalPair::ALL
            .iter()
            .map(|&i| intended_output(GateKind::Or, i))
            .collect();
        assert_eq!(or, vec![p("00"), p("11"), p("10"), p("11")]);
        let nor: Vec<_> = LogicalPair::ALL
            .iter()
            .map(|&i| intended_output(GateKind::Nor, i))
            .collect();
        assert_eq!(nor, vec![p("10"), p("01"), p("00"), p("01")]);
        for i in LogicalPair::ALL {
            assert_eq!(
                intended_output(GateKind::Nor, i),
                intended_output(GateKind::Or, i).flip_first()
            );
        }
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("10".parse::<LogicalPair>().unwrap(), LogicalPair(true, false));
        assert!("1".parse::<LogicalPair>().is_err());
        assert!("2a".parse::<LogicalPair>().is_err());
        assert_eq!(LogicalPair(false, true).to_string(), "01");
    }

    #[test]
    fn or_sequence_shape() {
        let params = small();
        let seq = build_sequence(&GateSpec::new(GateKind::Or, &params), &params).unwrap();
        let segs = seq.segments();
        assert_eq!(segs.len(), 2);
        assert!(segs[0].probe_on && segs[0].sideband_on && !segs[0].cooling_on);
        assert!(segs[1].sideband_on && segs[1].cooling_on && !segs[1].probe_on);
        assert!(segs.iter().all(|s| s.pump_ions.is_empty() && s.unitaries.is_empty()));
        assert!((segs[1].duration - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn nor_sequence_shape() {
        let params = small();
        let seq = build_sequence(&GateSpec::new(GateKind::Nor, &params), &params).unwrap();
        let segs = seq.segments();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[0].unitaries.len(), 1);
        let last = segs.last().unwrap();
        assert_eq!(last.pump_ions, vec![Ion::First]);
        assert!((last.duration - 5.0 / params.gamma_e).abs() < 1e-18);
    }

    #[test]
    fn default_probe_times() {
        let params = SystemParams::default();
        let or = GateSpec::new(GateKind::Or, &params);
        assert!((or.probe_duration - 1.0 / 1150.0).abs() < 1e-15);
        assert_eq!(GateSpec::experimental(GateKind::Or).probe_duration, 900e-6);
        assert_eq!(GateSpec::experimental(GateKind::Nor).probe_duration, 600e-6);
    }

    #[test]
    fn invalid_durations_rejected() {
        let params = small();
        let mut spec = GateSpec::new(GateKind::Or, &params);
        spec.probe_duration = 0.0;
        assert!(build_sequence(&spec, &params).is_err());
        let mut spec = GateSpec::new(GateKind::Or, &params);
        spec.init_fidelity = 1.5;
        assert!(spec.validate(&params).is_err());
    }

    #[test]
    fn shelving_is_unitary_swap() {
        let space = HilbertSpace::new(1).unwrap();
        let u = shelving_unitary(space, Ion::First);
        let prod = &u * u.adjoint();
        assert!((prod - space.identity()).norm() < 1e-15);
        let from = space.basis_index(Level::One, Level::Zero, 1).unwrap();
        let to = space.basis_index(Level::E, Level::Zero, 1).unwrap();
        assert_eq!(u[(to, from)], ONE);
    }

    #[test]
    fn merged_readout_counts_dark_levels_as_one() {
        let space = HilbertSpace::new(1).unwrap();
        let s = DensityState::pure(space, Level::F, Level::E, 0).unwrap();
        let (out, leak) = logical_distribution(&s, Readout::Merged);
        assert_eq!(out, [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(leak, 0.0);
        let (out, leak) = logical_distribution(&s, Readout::Exact);
        assert_eq!(out, [0.0; 4]);
        assert_eq!(leak, 1.0);
    }

    #[test]
    fn init_fidelity_mixes_in_ground() {
        let params = small();
        let mut spec = GateSpec::new(GateKind::Or, &params);
        spec.init_fidelity = 0.98;
        let s = initial_state(&spec, &params, LogicalPair(false, true)).unwrap();
        let (out, _) = logical_distribution(&s, Readout::Merged);
        assert!((out[1] - 0.98).abs() < 1e-12);
        assert!((out[0] - 0.02).abs() < 1e-12);
    }

    #[test]
    fn truth_table_rows_are_distributions() {
        let params = SystemParams {
            fock_cutoff: 2,
            ..SystemParams::default()
        };
        let cfg = IntegratorConfig {
            rel_tol: 1e-6,
            abs_tol: 1e-8,
            ..IntegratorConfig::default()
        };
        for kind in [GateKind::Or, GateKind::Nor] {
            let table = simulate_truth_table(&GateSpec::experimental(kind), &params, &cfg).unwrap();
            for r in &table.rows {
                assert!((r.outputs.iter().sum::<f64>() - 1.0).abs() < 1e-6);
                assert!((0.0..=1.0).contains(&r.success));
            }
            let json = table.to_json(json!({}));
            assert_eq!(json["rows"].as_object().unwrap().len(), 4);
        }
    }

    #[test]
    fn probe_scan_starts_full() {
        let params = SystemParams {
            fock_cutoff: 2,
            ..SystemParams::default()
        };
        let mut spec = GateSpec::experimental(GateKind::Nor);
        spec.probe_detuning = Some(params.omega_sb / 2.0);
        let scan = probe_scan(&spec, &params, &IntegratorConfig::default(), &[0.0, 1e-4]).unwrap();
        for curve in &scan.remaining {
            assert!((curve[0] - 1.0).abs() < 1e-12);
        }
        assert!(probe_scan(&spec, &params, &IntegratorConfig::default(), &[1e-4, 0.0]).is_err());
    }

    #[test]
    fn no_cooling_means_no_trapping() {
        let params = SystemParams {
            gamma_f: 0.0,
            nbar: 0.0,
            heating_rate: 0.0,
            fock_cutoff: 2,
            ..SystemParams::default()
        };
        let spec = GateSpec::experimental(GateKind::Nor);
        let times: Vec<f64> = (0..=40).map(|k| k as f64 * 25e-6).collect();
        let scan = cooling_scan(&spec, &params, &IntegratorConfig::default(), &times).unwrap();
        // |10,1⟩ never loses its phonon, so nothing reaches |10,0⟩
        assert!(scan.p_10_ground.iter().all(|&p| p < 1e-9));
        assert!(scan.p_10.iter().all(|&p| p < 0.6));
    }

    #[test]
    fn cooling_traps_in_ground_state() {
        let params = SystemParams {
            nbar: 0.0,
            heating_rate: 0.0,
            fock_cutoff: 2,
            ..SystemParams::default()
        };
        let spec = GateSpec::experimental(GateKind::Nor);
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 50e-6).collect();
        let scan = cooling_scan(&spec, &params, &IntegratorConfig::default(), &times).unwrap();
        assert!(scan.ground_fraction.last().unwrap() > &0.9);
        assert!(scan.p_10_ground.last().unwrap() > &0.8);

        // once cooling outpaces the sideband exchange the approach is monotone
        let overdamped = SystemParams {
            gamma_f: 10.0 * params.omega_sb,
            ..params
        };
        let scan = cooling_scan(&spec, &overdamped, &IntegratorConfig::default(), &times).unwrap();
        for w in scan.ground_fraction.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{w:?}");
        }
    }
}
