// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration.
//!
//! The document is TOML with one table per section (`system`, `gate`,
//! `integrator`, `scan`, `analysis`, `converge`, `sweep`, `output`); dotted
//! keys such as `system.nbar = 0.1` are equivalent. Frequencies are given
//! as `Ω/2π` in Hz, rates in 1/s and times in s. Missing keys take their
//! defaults and unknown keys are rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::TableOptions;
use crate::dynamics::IntegratorConfig;
use crate::gates::{GateKind, GateSpec, Readout};
use crate::model::{angular, SystemParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config value `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

impl ConfigError {
    fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub omega_f_hz: f64,
    pub omega_sb_hz: f64,
    /// Defaults to the resonance detuning of the configured gate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_detuning_hz: Option<f64>,
    pub mode_detuning_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_f_per_s: Option<f64>,
    /// Cooling rate given as `Γ_f/2π`; exclusive with `gamma_f_per_s`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_f_angular_hz: Option<f64>,
    pub gamma_e_per_s: f64,
    pub nbar: f64,
    pub heating_rate_per_s: f64,
    pub fock_cutoff: usize,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            omega_f_hz: 1150.0,
            omega_sb_hz: 8000.0,
            probe_detuning_hz: None,
            mode_detuning_hz: 0.0,
            gamma_f_per_s: None,
            gamma_f_angular_hz: None,
            gamma_e_per_s: 1e5,
            nbar: 0.14,
            heating_rate_per_s: 106.0,
            fock_cutoff: 5,
        }
    }
}

pub const DEFAULT_GAMMA_F: f64 = 4.5e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateSection {
    pub kind: GateKind,
    /// Defaults to the experimental probe time of the gate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_duration_s: Option<f64>,
    pub dissipation_duration_s: f64,
    /// Defaults to `5/Γ_e`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_duration_s: Option<f64>,
    pub readout: Readout,
    pub init_fidelity: f64,
}

impl Default for GateSection {
    fn default() -> Self {
        Self {
            kind: GateKind::Or,
            probe_duration_s: None,
            dissipation_duration_s: GateSpec::DEFAULT_DISSIPATION,
            pump_duration_s: None,
            readout: Readout::Merged,
            init_fidelity: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_step_s: Option<f64>,
    pub samples_per_segment: usize,
    pub track_positivity: bool,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_step_s: d.max_step,
            samples_per_segment: d.samples_per_segment,
            track_positivity: d.track_positivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    /// Probe detuning of the scans; defaults to `Ω_SB/2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_detuning_hz: Option<f64>,
    pub probe_duration_s: f64,
    pub probe_points: usize,
    /// Probe time preparing the dressed state before the cooling scan.
    pub prep_duration_s: f64,
    pub cooling_duration_s: f64,
    pub cooling_points: usize,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            probe_detuning_hz: None,
            probe_duration_s: 1e-3,
            probe_points: 101,
            prep_duration_s: 600e-6,
            cooling_duration_s: 1e-3,
            cooling_points: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub rabi_spread: f64,
    pub quadrature_nodes: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            rabi_spread: 0.04,
            quadrature_nodes: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeSection {
    pub cutoffs: Vec<usize>,
}

impl Default for ConvergeSection {
    fn default() -> Self {
        Self { cutoffs: vec![4, 5, 6] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "linear")]
    pub scale: AxisScale,
}

fn linear() -> AxisScale {
    AxisScale::Linear
}

impl SweepAxis {
    /// Grid values, ascending from `min`.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let s = k as f64 / n;
                match self.scale {
                    AxisScale::Linear => self.min + (self.max - self.min) * s,
                    AxisScale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * s).exp(),
                }
            })
            .collect()
    }
}

/// Sweepable parameters, named as in the `system` and `gate` sections.
pub const SWEEP_PARAMS: &[&str] = &[
    "omega_f_hz",
    "omega_sb_hz",
    "probe_detuning_hz",
    "mode_detuning_hz",
    "gamma_f_per_s",
    "gamma_e_per_s",
    "nbar",
    "heating_rate_per_s",
    "probe_duration_s",
    "dissipation_duration_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    AverageFidelity,
    Success00,
    Success01,
    Success10,
    Success11,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub objective: Objective,
    pub max_points: usize,
    pub axes: Vec<SweepAxis>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            objective: Objective::AverageFidelity,
            max_points: 400,
            axes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    pub gate: GateSection,
    pub integrator: IntegratorSection,
    pub scan: ScanSection,
    pub analysis: AnalysisSection,
    pub converge: ConvergeSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("config serializes")
}

fn finite(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, format!("must be finite, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<(), ConfigError> {
    finite(key, v)?;
    if v < 0.0 {
        return Err(ConfigError::invalid(key, format!("must be non-negative, got {v}")));
    }
    Ok(())
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    finite(key, v)?;
    if v <= 0.0 {
        return Err(ConfigError::invalid(key, format!("must be positive, got {v}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.system;
        non_negative("system.omega_f_hz", s.omega_f_hz)?;
        non_negative("system.omega_sb_hz", s.omega_sb_hz)?;
        if let Some(d) = s.probe_detuning_hz {
            finite("system.probe_detuning_hz", d)?;
        }
        finite("system.mode_detuning_hz", s.mode_detuning_hz)?;
        match (s.gamma_f_per_s, s.gamma_f_angular_hz) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::invalid(
                    "system.gamma_f_angular_hz",
                    "give either gamma_f_per_s or gamma_f_angular_hz, not both",
                ))
            }
            (Some(v), None) => non_negative("system.gamma_f_per_s", v)?,
            (None, Some(v)) => non_negative("system.gamma_f_angular_hz", v)?,
            (None, None) => {}
        }
        non_negative("system.gamma_e_per_s", s.gamma_e_per_s)?;
        non_negative("system.nbar", s.nbar)?;
        non_negative("system.heating_rate_per_s", s.heating_rate_per_s)?;
        if s.fock_cutoff < 1 {
            return Err(ConfigError::invalid("system.fock_cutoff", "must be at least 1"));
        }

        let g = &self.gate;
        if let Some(t) = g.probe_duration_s {
            positive("gate.probe_duration_s", t)?;
        }
        positive("gate.dissipation_duration_s", g.dissipation_duration_s)?;
        if let Some(t) = g.pump_duration_s {
            positive("gate.pump_duration_s", t)?;
        }
        if g.kind == GateKind::Nor && g.pump_duration_s.is_none() && s.gamma_e_per_s == 0.0 {
            return Err(ConfigError::invalid(
                "system.gamma_e_per_s",
                "a NOR gate needs a pump rate or an explicit gate.pump_duration_s",
            ));
        }
        finite("gate.init_fidelity", g.init_fidelity)?;
        if !(0.0..=1.0).contains(&g.init_fidelity) {
            return Err(ConfigError::invalid("gate.init_fidelity", "must lie in [0, 1]"));
        }

        let i = &self.integrator;
        positive("integrator.rel_tol", i.rel_tol)?;
        positive("integrator.abs_tol", i.abs_tol)?;
        if let Some(h) = i.max_step_s {
            positive("integrator.max_step_s", h)?;
        }
        if i.samples_per_segment == 0 {
            return Err(ConfigError::invalid(
                "integrator.samples_per_segment",
                "must be at least 1",
            ));
        }

        let sc = &self.scan;
        if let Some(d) = sc.probe_detuning_hz {
            finite("scan.probe_detuning_hz", d)?;
        }
        positive("scan.probe_duration_s", sc.probe_duration_s)?;
        positive("scan.prep_duration_s", sc.prep_duration_s)?;
        positive("scan.cooling_duration_s", sc.cooling_duration_s)?;
        for (key, n) in [
            ("scan.probe_points", sc.probe_points),
            ("scan.cooling_points", sc.cooling_points),
        ] {
            if n < 2 {
                return Err(ConfigError::invalid(key, "need at least 2 points"));
            }
        }

        non_negative("analysis.rabi_spread", self.analysis.rabi_spread)?;
        if self.analysis.quadrature_nodes < 1 {
            return Err(ConfigError::invalid("analysis.quadrature_nodes", "must be at least 1"));
        }

        let cutoffs = &self.converge.cutoffs;
        if cutoffs.len() < 2 || cutoffs.windows(2).any(|w| w[0] >= w[1]) || cutoffs[0] < 1 {
            return Err(ConfigError::invalid(
                "converge.cutoffs",
                "need at least two strictly increasing cutoffs, all >= 1",
            ));
        }

        let sw = &self.sweep;
        if sw.axes.len() > 2 {
            return Err(ConfigError::invalid("sweep.axes", "at most two axes are supported"));
        }
        if sw.max_points == 0 {
            return Err(ConfigError::invalid("sweep.max_points", "must be at least 1"));
        }
        for (k, axis) in sw.axes.iter().enumerate() {
            let key = |f: &str| format!("sweep.axes[{k}].{f}");
            if !SWEEP_PARAMS.contains(&axis.param.as_str()) {
                return Err(ConfigError::invalid(
                    key("param"),
                    format!(
                        "unknown sweep parameter `{}`; expected one of {}",
                        axis.param,
                        SWEEP_PARAMS.join(", ")
                    ),
                ));
            }
            finite(&key("min"), axis.min)?;
            finite(&key("max"), axis.max)?;
            if axis.min > axis.max {
                return Err(ConfigError::invalid(key("max"), "must not be below min"));
            }
            match axis.points {
                0 => return Err(ConfigError::invalid(key("points"), "must be at least 1")),
                1 if axis.min != axis.max => {
                    return Err(ConfigError::invalid(
                        key("points"),
                        "a single point requires min == max",
                    ))
                }
                _ => {}
            }
            if axis.scale == AxisScale::Log && axis.min <= 0.0 {
                return Err(ConfigError::invalid(key("min"), "log axes need a positive range"));
            }
            if sw.axes[..k].iter().any(|a| a.param == axis.param) {
                return Err(ConfigError::invalid(key("param"), "axis repeated"));
            }
        }
        if self.output.dir.is_empty() {
            return Err(ConfigError::invalid("output.dir", "must not be empty"));
        }
        Ok(())
    }

    pub fn gamma_f(&self) -> f64 {
        match (self.system.gamma_f_per_s, self.system.gamma_f_angular_hz) {
            (_, Some(hz)) => angular(hz),
            (Some(rate), None) => rate,
            (None, None) => DEFAULT_GAMMA_F,
        }
    }

    /// Model parameters; the probe detuning defaults to the gate's resonance.
    pub fn system_params(&self) -> SystemParams {
        let s = &self.system;
        let omega_sb = angular(s.omega_sb_hz);
        SystemParams {
            omega_f: angular(s.omega_f_hz),
            omega_sb,
            delta_probe: s
                .probe_detuning_hz
                .map(angular)
                .unwrap_or_else(|| self.gate.kind.probe_detuning(omega_sb)),
            delta_mode: angular(s.mode_detuning_hz),
            gamma_f: self.gamma_f(),
            gamma_e: s.gamma_e_per_s,
            nbar: s.nbar,
            heating_rate: s.heating_rate_per_s,
            fock_cutoff: s.fock_cutoff,
        }
    }

    pub fn gate_spec(&self) -> GateSpec {
        let g = &self.gate;
        let mut spec = GateSpec::with_probe_duration(
            g.kind,
            g.probe_duration_s
                .unwrap_or_else(|| g.kind.experimental_probe_duration()),
        );
        spec.probe_detuning = self.system.probe_detuning_hz.map(angular);
        spec.dissipation_duration = g.dissipation_duration_s;
        spec.pump_duration = g.pump_duration_s;
        spec.readout = g.readout;
        spec.init_fidelity = g.init_fidelity;
        spec
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let i = &self.integrator;
        IntegratorConfig {
            rel_tol: i.rel_tol,
            abs_tol: i.abs_tol,
            max_step: i.max_step_s,
            samples_per_segment: i.samples_per_segment,
            track_positivity: i.track_positivity,
        }
    }

    pub fn table_options(&self) -> TableOptions {
        TableOptions {
            sigma_frac: self.analysis.rabi_spread,
            nodes: self.analysis.quadrature_nodes,
            probe_duration: self
                .gate
                .probe_duration_s
                .unwrap_or_else(|| GateKind::Or.experimental_probe_duration()),
        }
    }

    /// Copy with one sweepable parameter replaced.
    pub fn with_param(&self, name: &str, value: f64) -> Result<RunConfig, ConfigError> {
        let mut c = self.clone();
        let s = &mut c.system;
        match name {
            "omega_f_hz" => s.omega_f_hz = value,
            "omega_sb_hz" => s.omega_sb_hz = value,
            "probe_detuning_hz" => s.probe_detuning_hz = Some(value),
            "mode_detuning_hz" => s.mode_detuning_hz = value,
            "gamma_f_per_s" => {
                s.gamma_f_per_s = Some(value);
                s.gamma_f_angular_hz = None;
            }
            "gamma_e_per_s" => s.gamma_e_per_s = value,
            "nbar" => s.nbar = value,
            "heating_rate_per_s" => s.heating_rate_per_s = value,
            "probe_duration_s" => c.gate.probe_duration_s = Some(value),
            "dissipation_duration_s" => c.gate.dissipation_duration_s = value,
            other => {
                return Err(ConfigError::invalid(
                    "sweep.axes.param",
                    format!("unknown sweep parameter `{other}`"),
                ))
            }
        }
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let p = cfg.system_params();
        let d = SystemParams::default();
        assert_eq!(p.omega_f, d.omega_f);
        assert_eq!(p.omega_sb, d.omega_sb);
        assert_eq!(p.delta_probe, d.delta_probe);
        assert_eq!(p.gamma_f, 4.5e3);
        assert_eq!(cfg.gate_spec().probe_duration, 9e-4);
    }

    #[test]
    fn dotted_keys_are_accepted() {
        let cfg = parse_config("system.nbar = 0.3\ngate.kind = \"nor\"\n").unwrap();
        assert_eq!(cfg.system.nbar, 0.3);
        assert_eq!(cfg.gate.kind, GateKind::Nor);
        assert_eq!(cfg.gate_spec().probe_duration, 6e-4);
        let p = cfg.system_params();
        assert_eq!(p.delta_probe, p.omega_sb / 2.0);
    }

    #[test]
    fn negative_sideband_rejected() {
        let err = parse_config("[system]\nomega_sb_hz = -1\n").unwrap_err();
        assert!(
            matches!(&err, ConfigError::Invalid { key, .. } if key == "system.omega_sb_hz"),
            "{err}"
        );
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        let err = parse_config("[system]\nnbar = 0.1\nomega_x = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("omega_x"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
        assert!(parse_config("[nonsense]\n").is_err());
    }

    #[test]
    fn unknown_sweep_parameter_named() {
        let doc = "[[sweep.axes]]\nparam = \"omega_x\"\nmin = 0\nmax = 1\npoints = 3\n";
        let err = parse_config(doc).unwrap_err();
        assert!(err.to_string().contains("omega_x"), "{err}");
    }

    #[test]
    fn sweep_axis_grids() {
        let axis = SweepAxis {
            param: "nbar".into(),
            min: 0.0,
            max: 1.0,
            points: 5,
            scale: AxisScale::Linear,
        };
        assert_eq!(axis.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = SweepAxis {
            min: 1.0,
            max: 100.0,
            points: 3,
            scale: AxisScale::Log,
            ..axis.clone()
        };
        let v = log.values();
        assert!((v[1] - 10.0).abs() < 1e-12);
        let single = SweepAxis {
            min: 0.5,
            max: 0.5,
            points: 1,
            ..axis
        };
        assert_eq!(single.values(), vec![0.5]);
    }

    #[test]
    fn single_point_needs_degenerate_range() {
        let doc = "[[sweep.axes]]\nparam = \"nbar\"\nmin = 0\nmax = 1\npoints = 1\n";
        assert!(parse_config(doc).is_err());
    }

    #[test]
    fn gamma_f_units() {
        let cfg = parse_config("system.gamma_f_angular_hz = 1000\n").unwrap();
        assert!((cfg.gamma_f() - angular(1000.0)).abs() < 1e-9);
        assert!(parse_config("system.gamma_f_angular_hz = 1\nsystem.gamma_f_per_s = 1\n").is_err());
    }

    #[test]
    fn converge_cutoffs_must_increase() {
        assert!(parse_config("converge.cutoffs = [5, 4]\n").is_err());
        assert!(parse_config("converge.cutoffs = [5]\n").is_err());
    }

    #[test]
    fn with_param_validates() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.with_param("nbar", 0.5).unwrap().system.nbar, 0.5);
        assert!(cfg.with_param("nbar", -0.5).is_err());
        assert!(cfg.with_param("fock_cutoff", 3.0).is_err());
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            (
                0.0f64..1e5,
                0.0f64..1e5,
                proptest::option::of(-1e5f64..1e5),
                0.0f64..10.0,
            ),
            (
                proptest::option::of(0.0f64..1e6),
                1usize..12,
                prop_oneof![Just(GateKind::Or), Just(GateKind::Nor)],
            ),
            (proptest::option::of(1e-6f64..1e-2), 0.0f64..=1.0, 1e-12f64..1e-3),
            proptest::collection::vec(
                (0usize..SWEEP_PARAMS.len(), 0.0f64..10.0, 0.0f64..10.0, 2usize..30),
                0..=2,
            ),
        )
            .prop_map(|((wf, wsb, det, nbar), (gf, cutoff, kind), (tp, fid, rtol), axes)| {
                let mut c = RunConfig::default();
                c.system.omega_f_hz = wf;
                c.system.omega_sb_hz = wsb;
                c.system.probe_detuning_hz = det;
                c.system.nbar = nbar;
                c.system.gamma_f_per_s = gf;
                c.system.fock_cutoff = cutoff;
                c.gate.kind = kind;
                c.gate.probe_duration_s = tp;
                c.gate.init_fidelity = fid;
                c.integrator.rel_tol = rtol;
                let mut used = Vec::new();
                for (k, a, b, n) in axes {
                    if used.contains(&k) {
                        continue;
                    }
                    used.push(k);
                    c.sweep.axes.push(SweepAxis {
                        param: SWEEP_PARAMS[k].into(),
                        min: a.min(b),
                        max: a.max(b),
                        points: n,
                        scale: AxisScale::Linear,
                    });
                }
                c
            })
            .prop_filter("valid", |c| c.validate().is_ok())
    }

    proptest! {
        #[test]
        fn round_trip(cfg in arb_config()) {
            let text = serialize(&cfg);
            prop_assert_eq!(parse_config(&text).unwrap(), cfg);
        }

        #[test]
        fn parser_never_panics(text in "\\PC{0,200}") {
            let _ = parse_config(&text);
        }
    }
}
