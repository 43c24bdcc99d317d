// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form error model for the OR gate and its comparison with the
//! numeric simulation.
//!
//! The probe error on `|00⟩` and `|01⟩` is modelled as detuned Rabi
//! excitation of the nearest dressed state, summed over the first two Fock
//! states of a thermal mode.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::gates::{run_input, simulate_truth_table, truth_row, GateKind, GateSpec, LogicalPair, TruthTable};
use crate::model::SystemParams;

/// Excitation probability of a two-level system driven at Rabi frequency
/// `omega_d` and detuning `delta_d` for a time `t`.
pub fn detuned_rabi_excitation(omega_d: f64, delta_d: f64, t: f64) -> f64 {
    let gen = omega_d * omega_d + delta_d * delta_d;
    if gen == 0.0 {
        return 0.0;
    }
    let s = (0.5 * gen.sqrt() * t).sin();
    omega_d * omega_d / gen * s * s
}

/// `(P0, P1)`: weight of the motional ground state of a thermal mode and
/// the rest, lumped into `n = 1`.
pub fn thermal_weights(nbar: f64) -> Result<(f64, f64)> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "nbar",
            reason: format!("must be finite and non-negative, got {nbar}"),
        });
    }
    let p0 = 1.0 / (1.0 + nbar);
    Ok((p0, 1.0 - p0))
}

/// Default probe time of the analytic model, `2π/Ω_f`.
pub fn analytic_pulse_time(params: &SystemParams) -> f64 {
    2.0 * PI / params.omega_f
}

/// One dressed transition the probe may drive by mistake.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub name: &'static str,
    pub phonons: usize,
    /// rad/s
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub delta_d: f64,
    /// rad/s
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub omega_d: f64,
    /// Probability of starting in this branch.
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub weight: f64,
    /// Excitation probability within the branch.
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub excitation: f64,
    /// Whether excitation is the intended outcome, so that the error is
    /// the probability of not exciting.
    pub wants_transfer: bool,
}

impl Branch {
    pub fn error(&self) -> f64 {
        if self.wants_transfer {
            1.0 - self.excitation
        } else {
            self.excitation
        }
    }

    pub fn contribution(&self) -> f64 {
        self.weight * self.error()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBreakdown {
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub total: f64,
    pub branches: Vec<Branch>,
}

impl ErrorBreakdown {
    fn from_branches(branches: Vec<Branch>) -> Self {
        Self {
            total: branches.iter().map(Branch::contribution).sum(),
            branches,
        }
    }

    /// Weighted Lorentzian envelope `Ω_d²/(Δ_d²+Ω_d²)` of the branch
    /// excitations, an upper bound on the excitation at any pulse time.
    pub fn envelope(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| {
                let g = b.omega_d * b.omega_d + b.delta_d * b.delta_d;
                if g == 0.0 {
                    0.0
                } else {
                    b.weight * b.omega_d * b.omega_d / g
                }
            })
            .sum()
    }
}

/// Branch parameters of the `|00⟩` error at the OR detuning.
///
/// `n = 0`: the lower dressed state of `{|f0,0⟩, |10,1⟩}` sits
/// `Ω_SB(√2−1)/2` from the probe and is driven at `Ω_f/√2`.
/// `n = 1`: the three-state manifold of `|00,1⟩` is resonant, also driven
/// at `Ω_f/√2`.
pub fn or_branches_00(params: &SystemParams) -> [(f64, f64); 2] {
    let w = params.omega_f / SQRT_2;
    [(params.omega_sb * (SQRT_2 - 1.0) / 2.0, w), (0.0, w)]
}

/// Branch parameters of the `|01,1⟩` error at the OR detuning, for the
/// lower and upper sideband dressings of the initial state.
pub fn or_branches_01(params: &SystemParams) -> [(f64, f64); 2] {
    let minus = (
        (1.0 + SQRT_2 - 6f64.sqrt()) * params.omega_sb / 2.0,
        params.omega_f * (1.0 / 8f64.sqrt() + 1.0 / 12f64.sqrt()),
    );
    let plus = ((SQRT_2 - 1.0) * params.omega_sb / 2.0, params.omega_f / 2.0);
    [minus, plus]
}

pub fn or_error_00(params: &SystemParams, t: f64) -> Result<ErrorBreakdown> {
    let (p0, p1) = thermal_weights(params.nbar)?;
    let [(d0, w0), (d1, w1)] = or_branches_00(params);
    Ok(ErrorBreakdown::from_branches(vec![
        Branch {
            name: "n0",
            phonons: 0,
            delta_d: d0,
            omega_d: w0,
            weight: p0,
            excitation: detuned_rabi_excitation(w0, d0, t),
            wants_transfer: false,
        },
        Branch {
            name: "n1",
            phonons: 1,
            delta_d: d1,
            omega_d: w1,
            weight: p1,
            excitation: detuned_rabi_excitation(w1, d1, t),
            wants_transfer: false,
        },
    ]))
}

/// The `|01,0⟩` component completes its transfer at `t = 2π/Ω_f`, so only
/// the thermal `n = 1` part fails; each sideband dressing of `|01,1⟩`
/// carries half of it, and the error is the part left untransferred.
pub fn or_error_01(params: &SystemParams, t: f64) -> Result<ErrorBreakdown> {
    let (_, p1) = thermal_weights(params.nbar)?;
    let [(dm, wm), (dp, wp)] = or_branches_01(params);
    Ok(ErrorBreakdown::from_branches(vec![
        Branch {
            name: "n1_minus",
            phonons: 1,
            delta_d: dm,
            omega_d: wm,
            weight: 0.5 * p1,
            excitation: detuned_rabi_excitation(wm, dm, t),
            wants_transfer: true,
        },
        Branch {
            name: "n1_plus",
            phonons: 1,
            delta_d: dp,
            omega_d: wp,
            weight: 0.5 * p1,
            excitation: detuned_rabi_excitation(wp, dp, t),
            wants_transfer: true,
        },
    ]))
}

/// Gauss–Hermite nodes and weights for `∫ f(x) e^{−x²} dx`, from the
/// eigen-decomposition of the Jacobi matrix. Nodes ascend.
pub fn gauss_hermite(nodes: usize) -> Result<Vec<(f64, f64)>> {
    if nodes == 0 {
        return Err(Error::InvalidParameter {
            name: "nodes",
            reason: "need at least one quadrature node".into(),
        });
    }
    let jacobi = DMatrix::<f64>::from_fn(nodes, nodes, |i, j| {
        if i + 1 == j || j + 1 == i {
            ((i.max(j)) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut out: Vec<(f64, f64)> = (0..nodes)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], PI.sqrt() * v0 * v0)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize away round-off so odd integrands vanish exactly
    let n = out.len();
    for k in 0..n / 2 {
        let x = 0.5 * (out[n - 1 - k].0 - out[k].0);
        let w = 0.5 * (out[k].1 + out[n - 1 - k].1);
        out[k] = (-x, w);
        out[n - 1 - k] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    Ok(out)
}

/// Points `Ω_f (1 + σ √2 x_k)` and normalized weights of the Gaussian
/// average over the probe Rabi frequency.
pub fn spread_points(omega_f: f64, sigma_frac: f64, nodes: usize) -> Result<Vec<(f64, f64)>> {
    if !(sigma_frac.is_finite() && sigma_frac >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma_frac",
            reason: format!("must be finite and non-negative, got {sigma_frac}"),
        });
    }
    Ok(gauss_hermite(nodes)?
        .into_iter()
        .map(|(x, w)| (omega_f * (1.0 + sigma_frac * SQRT_2 * x), w / PI.sqrt()))
        .collect())
}

/// Average of `f` over a Gaussian spread of the probe Rabi frequency with
/// relative standard deviation `sigma_frac`.
pub fn rabi_spread_average<F>(f: F, omega_f: f64, sigma_frac: f64, nodes: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if sigma_frac == 0.0 {
        return Ok(f(omega_f));
    }
    Ok(spread_points(omega_f, sigma_frac, nodes)?
        .into_iter()
        .map(|(w_f, weight)| weight * f(w_f))
        .sum())
}

/// Truth table averaged over a Gaussian spread of the probe Rabi frequency.
/// The probe duration stays fixed while `Ω_f` varies.
pub fn spread_truth_table(
    spec: &GateSpec,
    params: &SystemParams,
    cfg: &IntegratorConfig,
    sigma_frac: f64,
    nodes: usize,
) -> Result<TruthTable> {
    if sigma_frac == 0.0 {
        return simulate_truth_table(spec, params, cfg);
    }
    let tables = spread_points(params.omega_f, sigma_frac, nodes)?
        .par_iter()
        .map(|&(w, weight)| {
            let p = SystemParams {
                omega_f: w,
                ..params.clone()
            };
            simulate_truth_table(spec, &p, cfg).map(|t| (weight, t))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut avg = tables[0].1.clone();
    for row in &mut avg.rows {
        row.outputs = [0.0; 4];
        row.leakage = 0.0;
        row.success = 0.0;
    }
    avg.average_fidelity = 0.0;
    for (weight, t) in &tables {
        for (acc, row) in avg.rows.iter_mut().zip(&t.rows) {
            for k in 0..4 {
                acc.outputs[k] += weight * row.outputs[k];
            }
            acc.leakage += weight * row.leakage;
            acc.success += weight * row.success;
        }
        avg.average_fidelity += weight * t.average_fidelity;
    }
    Ok(avg)
}

/// Literature fidelities of the OR gate for inputs `|00⟩` and `|01⟩`.
pub mod reference {
    pub const MEASURED_00: f64 = 0.86;
    pub const MEASURED_01: f64 = 0.84;
    pub const MEASURED_ERROR_00: f64 = 0.14;
    pub const MEASURED_ERROR_01: f64 = 0.16;
    /// Published numeric column, for side-by-side reporting.
    pub const NUMERIC_00: f64 = 0.79;
    pub const NUMERIC_01: f64 = 0.86;
    /// Published analytic column, for side-by-side reporting.
    pub const ANALYTIC_00: f64 = 0.79;
    pub const ANALYTIC_01: f64 = 0.82;
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableOptions {
    pub sigma_frac: f64,
    pub nodes: usize,
    /// Probe duration of the numeric runs; the analytic model uses `2π/Ω_f`.
    pub probe_duration: f64,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            sigma_frac: 0.04,
            nodes: 7,
            probe_duration: GateKind::Or.experimental_probe_duration(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub input: String,
    /// Without the Rabi-frequency spread.
    pub analytic: ErrorBreakdown,
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub analytic_fidelity: f64,
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub numeric_fidelity: f64,
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub measured_fidelity: f64,
}

impl ErrorRow {
    pub fn analytic_error(&self) -> f64 {
        1.0 - self.analytic_fidelity
    }

    pub fn numeric_error(&self) -> f64 {
        1.0 - self.numeric_fidelity
    }

    pub fn measured_error(&self) -> f64 {
        1.0 - self.measured_fidelity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub sigma_frac: f64,
    pub nodes: usize,
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub probe_duration_s: f64,
    #[serde(serialize_with = "crate::format::serde_sig12::serialize")]
    pub analytic_pulse_time_s: f64,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn row(&self, input: &str) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.input == input)
    }

    pub fn to_json(&self, params_echo: Value) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["params_echo"] = params_echo;
        v
    }

    /// Fidelities in integer percent, one row per input.
    pub fn table(&self) -> String {
        let pct = |x: f64| format!("{:.0}", 100.0 * x);
        let mut s = format!("{:<8}{:>10}{:>10}{:>10}\n", "input", "measured", "analytic", "numeric");
        for r in &self.rows {
            s.push_str(&format!(
                "|{}>{:>5}{:>10}{:>10}{:>10}\n",
                r.input,
                "",
                pct(r.measured_fidelity),
                pct(r.analytic_fidelity),
                pct(r.numeric_fidelity)
            ));
        }
        s
    }
}

/// Analytic, numeric and measured OR fidelities for inputs `00` and `01`,
/// both model columns averaged over the Rabi-frequency spread.
pub fn table_s1(params: &SystemParams, cfg: &IntegratorConfig, opts: &TableOptions) -> Result<ErrorReport> {
    params.validate()?;
    let t = analytic_pulse_time(params);
    let points = spread_points(params.omega_f, opts.sigma_frac, opts.nodes)?;
    let points = if opts.sigma_frac == 0.0 {
        vec![(params.omega_f, 1.0)]
    } else {
        points
    };
    let with_f = |w: f64| SystemParams {
        omega_f: w,
        ..params.clone()
    };

    let analytic = |err: fn(&SystemParams, f64) -> Result<ErrorBreakdown>| -> Result<f64> {
        let mut acc = 0.0;
        for &(w, weight) in &points {
            acc += weight * (1.0 - err(&with_f(w), t)?.total);
        }
        Ok(acc)
    };
    let fid_00 = analytic(or_error_00)?;
    let fid_01 = analytic(or_error_01)?;

    let spec = GateSpec::with_probe_duration(GateKind::Or, opts.probe_duration);
    let inputs = [LogicalPair(false, false), LogicalPair(false, true)];
    let jobs: Vec<(usize, f64, f64)> = inputs
        .iter()
        .enumerate()
        .flat_map(|(i, _)| points.iter().map(move |&(w, weight)| (i, w, weight)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(i, w, weight)| {
            let p = with_f(w);
            let state = run_input(&spec, &p, cfg, inputs[i])?;
            Ok((i, weight * truth_row(&spec, &state, inputs[i]).success))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut numeric = [0.0; 2];
    for (i, v) in runs {
        numeric[i] += v;
    }

    Ok(ErrorReport {
        sigma_frac: opts.sigma_frac,
        nodes: opts.nodes,
        probe_duration_s: opts.probe_duration,
        analytic_pulse_time_s: t,
        rows: vec![
            ErrorRow {
                input: "00".into(),
                analytic: or_error_00(params, t)?,
                analytic_fidelity: fid_00,
                numeric_fidelity: numeric[0],
                measured_fidelity: reference::MEASURED_00,
            },
            ErrorRow {
                input: "01".into(),
                analytic: or_error_01(params, t)?,
                analytic_fidelity: fid_01,
                numeric_fidelity: numeric[1],
                measured_fidelity: reference::MEASURED_01,
            },
        ],
    })
}

/// JSON summary of the closed-form branches, used by reports.
pub fn branches_json(params: &SystemParams, t: f64) -> Result<Value> {
    Ok(json!({
        "pulse_time_s": sig12(t),
        "or_error_00": or_error_00(params, t)?,
        "or_error_01": or_error_01(params, t)?,
    }))
}
