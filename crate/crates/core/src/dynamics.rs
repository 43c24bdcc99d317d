// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Lindblad master-equation integration over piecewise-constant pulse
//! segments.
//!
//! The density matrix is stepped directly with an embedded Dormand–Prince
//! 5(4) scheme. The right-hand side
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_k L_k ρ L_k† - ½{L_k†L_k, ρ}
//! ```
//!
//! is evaluated as `-i H_eff ρ + i ρ H_eff† + Σ_k L_k ρ L_k†` with
//! `H_eff = H - i/2 Σ_k L_k†L_k`, using the nonzero entries of the operators
//! only. No dim²×dim² superoperator is ever formed.

use std::fmt::Write as _;
use std::io;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{self, DensityState, SystemParams};
use crate::operators::{ComplexMatrix, HilbertSpace, Ion, Level, N_LEVELS, ZERO};

/// One piecewise-constant step of a pulse program.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSegment {
    pub label: String,
    /// Seconds.
    pub duration: f64,
    pub probe_on: bool,
    pub sideband_on: bool,
    pub cooling_on: bool,
    pub pump_ions: Vec<Ion>,
    /// Ideal instantaneous unitaries applied, in order, before the segment.
    pub unitaries: Vec<ComplexMatrix>,
}

impl PulseSegment {
    pub fn new(label: impl Into<String>, duration: f64) -> Self {
        Self {
            label: label.into(),
            duration,
            probe_on: false,
            sideband_on: false,
            cooling_on: false,
            pump_ions: Vec::new(),
            unitaries: Vec::new(),
        }
    }

    pub fn probe(mut self) -> Self {
        self.probe_on = true;
        self
    }

    pub fn sideband(mut self) -> Self {
        self.sideband_on = true;
        self
    }

    pub fn cooling(mut self) -> Self {
        self.cooling_on = true;
        self
    }

    pub fn pump(mut self, ions: &[Ion]) -> Self {
        self.pump_ions = ions.to_vec();
        self
    }

    pub fn with_unitary(mut self, u: ComplexMatrix) -> Self {
        self.unitaries.push(u);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "duration",
                reason: format!("segment `{}` has duration {}", self.label, self.duration),
            });
        }
        Ok(())
    }

    /// Hamiltonian and jump operators active during this segment.
    pub fn operators(&self, params: &SystemParams) -> (ComplexMatrix, Vec<ComplexMatrix>) {
        let h = model::total_hamiltonian(params, self.probe_on, self.sideband_on);
        let mut jumps = Vec::new();
        if self.cooling_on && params.gamma_f > 0.0 {
            jumps.push(model::cooling_jump(params));
        }
        if params.gamma_e > 0.0 {
            jumps.extend(model::pump_jumps(params, &self.pump_ions));
        }
        if params.heating_rate > 0.0 {
            jumps.extend(model::heating_jumps(params));
        }
        (h, jumps)
    }

    /// Largest frequency or rate active during the segment, in 1/s.
    pub fn max_rate(&self, params: &SystemParams) -> f64 {
        let mut rate = params.heating_rate;
        if self.probe_on {
            rate = rate.max(params.omega_f);
        }
        if self.probe_on || self.sideband_on {
            rate = rate.max(params.delta_probe.abs()).max(params.phonon_energy().abs());
        }
        if self.sideband_on {
            rate = rate.max(params.omega_sb);
        }
        if self.cooling_on {
            rate = rate.max(params.gamma_f);
        }
        if !self.pump_ions.is_empty() {
            rate = rate.max(params.gamma_e);
        }
        rate
    }
}

/// Ordered, non-empty list of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn new(segments: Vec<PulseSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter {
                name: "segments",
                reason: "a pulse sequence needs at least one segment".into(),
            });
        }
        for s in &segments {
            s.validate()?;
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step; `None` uses `1/(50 · max rate)` of each segment.
    pub max_step: Option<f64>,
    /// Trajectory samples per segment (the segment start is sampled in addition).
    pub samples_per_segment: usize,
    /// Record the smallest eigenvalue of ρ at every sample. Costs one
    /// Hermitian eigendecomposition per sample.
    pub track_positivity: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: None,
            samples_per_segment: 200,
            track_positivity: false,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        if let Some(h) = self.max_step {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "max_step",
                    reason: format!("must be positive, got {h}"),
                });
            }
        }
        if self.samples_per_segment == 0 {
            return Err(Error::InvalidParameter {
                name: "samples_per_segment",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Electronic populations `P_kl`, indexed by level (order `0, 1, f, e`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations(pub [[f64; N_LEVELS]; N_LEVELS]);

impl Populations {
    pub fn get(&self, ion1: Level, ion2: Level) -> f64 {
        self.0[ion1.index()][ion2.index()]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().flatten().sum()
    }

    /// Folds `|f⟩` into `|1⟩` on both ions, as the fluorescence readout does.
    pub fn merged(&self) -> Populations {
        let mut out = [[0.0; N_LEVELS]; N_LEVELS];
        let fold = |l: usize| if l == Level::F.index() { Level::One.index() } else { l };
        for k in 0..N_LEVELS {
            for l in 0..N_LEVELS {
                out[fold(k)][fold(l)] += self.0[k][l];
            }
        }
        Populations(out)
    }

    pub fn max_abs_diff(&self, other: &Populations) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Level, Level, f64)> + '_ {
        Level::ALL
            .into_iter()
            .flat_map(move |k| Level::ALL.into_iter().map(move |l| (k, l, self.get(k, l))))
    }
}

/// Electronic populations after tracing out the mode.
pub fn populations(state: &DensityState, readout_merge_1f: bool) -> Populations {
    let space = state.space();
    let rho = state.rho();
    let mut out = [[0.0; N_LEVELS]; N_LEVELS];
    for (i, label) in space.labels().enumerate() {
        out[label.ion1.index()][label.ion2.index()] += rho[(i, i)].re;
    }
    let p = Populations(out);
    if readout_merge_1f {
        p.merged()
    } else {
        p
    }
}

/// Phonon number distribution `P(n)` after tracing out both ions.
pub fn phonon_distribution(state: &DensityState) -> Vec<f64> {
    let space = state.space();
    let mut out = vec![0.0; space.n_fock()];
    for (i, label) in space.labels().enumerate() {
        out[label.phonons] += state.rho()[(i, i)].re;
    }
    out
}

pub fn ground_state_fraction(state: &DensityState) -> f64 {
    phonon_distribution(state)[0]
}

pub fn mean_phonon(state: &DensityState) -> f64 {
    phonon_distribution(state)
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// Joint population of one product basis state.
pub fn basis_population(state: &DensityState, ion1: Level, ion2: Level, phonons: usize) -> Result<f64> {
    let i = state.space().basis_index(ion1, ion2, phonons)?;
    Ok(state.rho()[(i, i)].re)
}

fn check_square(m: &ComplexMatrix, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Dense evaluation of the Lindblad right-hand side.
pub fn lindblad_rhs(h: &ComplexMatrix, jumps: &[ComplexMatrix], rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = rho.nrows();
    check_square(rho, d)?;
    check_square(h, d)?;
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = (h * rho - rho * h) * minus_i;
    for l in jumps {
        check_square(l, d)?;
        let ldl = l.adjoint() * l;
        out += l * rho * l.adjoint() - (&ldl * rho + rho * &ldl) * Complex64::new(0.5, 0.0);
    }
    Ok(out)
}

/// Nonzero entries of an operator, `(row, col, value)`.
#[derive(Debug, Clone)]
struct SparseOp {
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }

    /// `out += alpha · S · M`, column-major `d×d` slices.
    fn left_mul_add(&self, alpha: Complex64, m: &[Complex64], out: &mut [Complex64], d: usize) {
        for (mc, oc) in m.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
            for &(r, c, v) in &self.entries {
                oc[r] += alpha * v * mc[c];
            }
        }
    }

    /// `out += alpha · M · S†`.
    fn right_adj_mul_add(&self, alpha: Complex64, m: &[Complex64], out: &mut [Complex64], d: usize) {
        for &(r, c, v) in &self.entries {
            let coef = alpha * v.conj();
            let src = &m[c * d..(c + 1) * d];
            let dst = &mut out[r * d..(r + 1) * d];
            for (o, x) in dst.iter_mut().zip(src) {
                *o += coef * x;
            }
        }
    }
}

/// Sparse form of the generator of one segment.
#[derive(Debug, Clone)]
struct Generator {
    dim: usize,
    h_eff: SparseOp,
    jumps: Vec<SparseOp>,
}

impl Generator {
    fn new(h: &ComplexMatrix, jumps: &[ComplexMatrix]) -> Self {
        let mut h_eff = h.clone();
        for l in jumps {
            h_eff -= l.adjoint() * l * Complex64::new(0.0, 0.5);
        }
        Self {
            dim: h.nrows(),
            h_eff: SparseOp::from_dense(&h_eff),
            jumps: jumps.iter().map(SparseOp::from_dense).collect(),
        }
    }

    fn apply(&self, rho: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        let d = self.dim;
        out.fill(ZERO);
        self.h_eff.left_mul_add(Complex64::new(0.0, -1.0), rho, out, d);
        self.h_eff.right_adj_mul_add(Complex64::new(0.0, 1.0), rho, out, d);
        for l in &self.jumps {
            scratch.fill(ZERO);
            l.left_mul_add(Complex64::new(1.0, 0.0), rho, scratch, d);
            l.right_adj_mul_add(Complex64::new(1.0, 0.0), scratch, out, d);
        }
    }
}

// Dormand–Prince 5(4) tableau; the generator is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<'a> {
    gen: &'a Generator,
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
    k: [Vec<Complex64>; 7],
    stage: Vec<Complex64>,
    y_new: Vec<Complex64>,
    scratch: Vec<Complex64>,
    fsal_valid: bool,
    h: f64,
}

impl<'a> Stepper<'a> {
    fn new(gen: &'a Generator, rel_tol: f64, abs_tol: f64, max_step: f64) -> Self {
        let n = gen.dim * gen.dim;
        let buf = || vec![ZERO; n];
        Self {
            gen,
            rel_tol,
            abs_tol,
            max_step,
            k: [buf(), buf(), buf(), buf(), buf(), buf(), buf()],
            stage: buf(),
            y_new: buf(),
            scratch: buf(),
            fsal_valid: false,
            h: 0.0,
        }
    }

    fn initial_step(&mut self, y: &[Complex64], span: f64) -> f64 {
        self.gen.apply(y, &mut self.k[0], &mut self.scratch);
        self.fsal_valid = true;
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for (yi, fi) in y.iter().zip(&self.k[0]) {
            let sc = self.abs_tol + self.rel_tol * yi.norm();
            d0 += (yi.norm() / sc).powi(2);
            d1 += (fi.norm() / sc).powi(2);
        }
        let h = if d0 < 1e-10 || d1 < 1e-10 {
            1e-6 * span
        } else {
            0.01 * (d0 / d1).sqrt()
        };
        h.min(self.max_step).min(span)
    }

    /// Advances `y` from `t` to exactly `t_end`.
    fn advance(&mut self, y: &mut Vec<Complex64>, t: &mut f64, t_end: f64) -> Result<()> {
        let span = t_end - *t;
        if span <= 0.0 {
            return Ok(());
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(y, span);
        }
        let min_step = 1e-13 * t_end.abs().max(span);
        while *t < t_end {
            let remaining = t_end - *t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h < min_step && !last {
                return Err(Error::StepUnderflow { time: *t, step: h });
            }
            let err = self.try_step(y, h);
            if !err.is_finite() {
                return Err(Error::NonFinite { time: *t });
            }
            if err <= 1.0 {
                *t = if last { t_end } else { *t + h };
                std::mem::swap(y, &mut self.y_new);
                self.k.swap(0, 6);
                self.fsal_valid = true;
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // a step clipped to hit t_end says little about the natural size
                if !last || h >= self.h {
                    self.h = (h * fac).min(self.max_step);
                }
            } else {
                self.fsal_valid = true;
                self.h = h * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if self.h < min_step {
                    return Err(Error::StepUnderflow { time: *t, step: self.h });
                }
            }
        }
        Ok(())
    }

    /// Computes a trial step into `y_new`, returning the scaled error norm.
    fn try_step(&mut self, y: &[Complex64], h: f64) -> f64 {
        if !self.fsal_valid {
            self.gen.apply(y, &mut self.k[0], &mut self.scratch);
        }
        for s in 1..7 {
            self.stage.copy_from_slice(y);
            for (j, &a) in A[s][..s].iter().enumerate() {
                if a != 0.0 {
                    let ha = h * a;
                    for (st, kj) in self.stage.iter_mut().zip(&self.k[j]) {
                        *st += kj * ha;
                    }
                }
            }
            self.gen.apply(&self.stage, &mut self.k[s], &mut self.scratch);
        }
        // stage 7 is evaluated at the fifth-order solution
        self.y_new.copy_from_slice(&self.stage);
        let mut acc = 0.0;
        for (i, (yi, yn)) in y.iter().zip(&self.y_new).enumerate() {
            let mut e = ZERO;
            for (s, &es) in E.iter().enumerate() {
                if es != 0.0 {
                    e += self.k[s][i] * es;
                }
            }
            let sc = self.abs_tol + self.rel_tol * yi.norm().max(yn.norm());
            let r = h * e.norm() / sc;
            // NaN sticks so the step is rejected
            if r > acc || r.is_nan() {
                acc = r;
            }
        }
        acc
    }
}

/// Observables recorded along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Seconds since the start of the run.
    pub time: f64,
    pub segment: usize,
    /// Unmerged electronic populations.
    pub populations: Populations,
    pub mean_phonon: f64,
    pub ground_fraction: f64,
    pub trace_defect: f64,
    pub hermiticity_defect: f64,
    /// Smallest eigenvalue of ρ, when tracked.
    pub min_eigenvalue: Option<f64>,
}

impl Sample {
    fn record(state: &DensityState, time: f64, segment: usize, track_positivity: bool) -> Self {
        Self {
            time,
            segment,
            populations: populations(state, false),
            mean_phonon: mean_phonon(state),
            ground_fraction: ground_state_fraction(state),
            trace_defect: (state.trace() - Complex64::new(1.0, 0.0)).norm(),
            hermiticity_defect: state.hermiticity_defect(),
            min_eigenvalue: track_positivity.then(|| state.min_eigenvalue()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn extend(&mut self, other: Trajectory) {
        self.samples.extend(other.samples);
    }

    pub fn max_trace_defect(&self) -> f64 {
        self.samples.iter().map(|s| s.trace_defect).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.samples.iter().map(|s| s.hermiticity_defect).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.samples.iter().filter_map(|s| s.min_eigenvalue).reduce(f64::min)
    }

    pub fn csv_header() -> String {
        let mut h = String::from("time_s");
        for k in Level::ALL {
            for l in Level::ALL {
                let _ = write!(h, ",P_{k}{l}");
            }
        }
        h.push_str(",mean_n,ground_frac");
        h
    }

    /// Writes `time_s, P_kl (16 columns, level order), mean_n, ground_frac`.
    pub fn write_csv<W: io::Write>(&self, mut w: W, readout_merge_1f: bool) -> io::Result<()> {
        writeln!(w, "{}", Self::csv_header())?;
        for s in &self.samples {
            let pops = if readout_merge_1f {
                s.populations.merged()
            } else {
                s.populations
            };
            let mut line = crate::format::float(s.time);
            for (_, _, p) in pops.iter() {
                line.push(',');
                line.push_str(&crate::format::float(p));
            }
            let _ = write!(
                line,
                ",{},{}",
                crate::format::float(s.mean_phonon),
                crate::format::float(s.ground_fraction)
            );
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn to_vec(m: &ComplexMatrix) -> Vec<Complex64> {
    m.as_slice().to_vec()
}

fn from_vec(space: HilbertSpace, v: Vec<Complex64>) -> Result<DensityState> {
    let d = space.dim();
    DensityState::new_unchecked(space, ComplexMatrix::from_vec(d, d, v))
}

fn max_step_for(segment: &PulseSegment, params: &SystemParams, cfg: &IntegratorConfig) -> f64 {
    let auto = {
        let rate = segment.max_rate(params);
        if rate > 0.0 {
            1.0 / rate
        } else {
            f64::INFINITY
        }
    };
    cfg.max_step
        .unwrap_or(auto)
        .min(segment.duration.max(f64::MIN_POSITIVE))
}

/// Evolves `state` through `segment` and records observables at the given
/// times, measured from the start of the segment and sorted ascending.
/// `time_offset` is added to the recorded times. The segment's unitaries
/// are applied first.
pub fn evolve_sampled(
    state: &DensityState,
    segment: &PulseSegment,
    params: &SystemParams,
    cfg: &IntegratorConfig,
    sample_times: &[f64],
    time_offset: f64,
    segment_index: usize,
) -> Result<(DensityState, Trajectory)> {
    segment.validate()?;
    cfg.validate()?;
    params.validate()?;
    if state.space() != params.space() {
        return Err(Error::DimensionMismatch {
            expected: params.space().dim(),
            rows: state.space().dim(),
            cols: state.space().dim(),
        });
    }
    let mut current = state.clone();
    for u in &segment.unitaries {
        current = current.conjugated(u)?;
    }
    let space = current.space();
    let mut traj = Trajectory::default();
    let (h, jumps) = segment.operators(params);
    let gen = Generator::new(&h, &jumps);
    let mut stepper = Stepper::new(&gen, cfg.rel_tol, cfg.abs_tol, max_step_for(segment, params, cfg));
    let mut y = to_vec(current.rho());
    let mut t = 0.0;

    for &ts in sample_times {
        let target = ts.clamp(0.0, segment.duration);
        stepper.advance(&mut y, &mut t, target)?;
        let snapshot = from_vec(space, y.clone())?;
        traj.samples.push(Sample::record(
            &snapshot,
            time_offset + target,
            segment_index,
            cfg.track_positivity,
        ));
    }
    stepper.advance(&mut y, &mut t, segment.duration)?;
    Ok((from_vec(space, y)?, traj))
}

fn uniform_times(duration: f64, samples: usize) -> Vec<f64> {
    (0..=samples).map(|k| duration * k as f64 / samples as f64).collect()
}

/// Evolves one segment, sampling `cfg.samples_per_segment + 1` evenly spaced
/// points including both ends.
pub fn evolve(
    state: &DensityState,
    segment: &PulseSegment,
    params: &SystemParams,
    cfg: &IntegratorConfig,
) -> Result<(DensityState, Trajectory)> {
    let times = uniform_times(segment.duration, cfg.samples_per_segment);
    evolve_sampled(state, segment, params, cfg, &times, 0.0, 0)
}

/// Applies the segments in order and concatenates their trajectories on a
/// common clock.
pub fn run_sequence(
    initial: &DensityState,
    seq: &PulseSequence,
    params: &SystemParams,
    cfg: &IntegratorConfig,
) -> Result<(DensityState, Trajectory)> {
    let mut state = initial.clone();
    let mut traj = Trajectory::default();
    let mut offset = 0.0;
    for (i, segment) in seq.segments().iter().enumerate() {
        let times = uniform_times(segment.duration, cfg.samples_per_segment);
        let (next, part) = evolve_sampled(&state, segment, params, cfg, &times, offset, i)?;
        traj.extend(part);
        state = next;
        offset += segment.duration;
    }
    Ok((state, traj))
}

/// Result of running the same program at increasing Fock cutoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub cutoffs: Vec<usize>,
    /// Final unmerged electronic populations per cutoff.
    pub populations: Vec<Populations>,
    /// Max population difference between successive cutoffs.
    pub differences: Vec<f64>,
    pub threshold: f64,
}

impl ConvergenceReport {
    pub const THRESHOLD: f64 = 1e-4;

    pub fn passed(&self) -> bool {
        self.differences.last().is_some_and(|&d| d < self.threshold)
    }
}

/// Runs the program built by `build` at every cutoff. `build` receives
/// `params` with the cutoff substituted, since both the initial state and
/// any unitaries depend on the space.
pub fn convergence_check<F>(
    params: &SystemParams,
    cfg: &IntegratorConfig,
    cutoffs: &[usize],
    build: F,
) -> Result<ConvergenceReport>
where
    F: Fn(&SystemParams) -> Result<(DensityState, PulseSequence)>,
{
    let mut pops = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        let p = params.with_cutoff(cutoff);
        let (initial, seq) = build(&p)?;
        let (fin, _) = run_sequence(&initial, &seq, &p, cfg)?;
        pops.push(populations(&fin, false));
    }
    let differences = pops.windows(2).map(|w| w[0].max_abs_diff(&w[1])).collect();
    Ok(ConvergenceReport {
        cutoffs: cutoffs.to_vec(),
        populations: pops,
        differences,
        threshold: ConvergenceReport::THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::thermal_initial_state;
    use crate::operators::{BasisLabel, ONE};
    use approx::assert_relative_eq;
    use Level::{One as L1, Zero as L0, F as LF};

    fn quiet() -> SystemParams {
        SystemParams {
            nbar: 0.0,
            heating_rate: 0.0,
            fock_cutoff: 2,
            ..SystemParams::default()
        }
    }

    #[test]
    fn rhs_vanishes_without_generator() {
        let s = HilbertSpace::new(1).unwrap();
        let rho = DensityState::pure(s, L0, L1, 1).unwrap();
        let out = lindblad_rhs(&s.zeros(), &[], rho.rho()).unwrap();
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn rhs_cooling_rate() {
        let p = SystemParams {
            gamma_f: 2500.0,
            ..quiet()
        };
        let s = p.space();
        let rho = DensityState::pure(s, L1, L0, 1).unwrap();
        let out = lindblad_rhs(&s.zeros(), &[model::cooling_jump(&p)], rho.rho()).unwrap();
        let dn = (s.number_op() * &out).trace().re;
        assert_relative_eq!(dn, -2500.0, max_relative = 1e-12);
        assert!(out.trace().norm() < 1e-10);
    }

    #[test]
    fn rhs_pure_commutator() {
        let p = quiet();
        let h = model::total_hamiltonian(&p, true, true);
        let rho = thermal_initial_state(&SystemParams { nbar: 0.3, ..p.clone() }, L0, L1).unwrap();
        let mut mixed = rho.rho().clone();
        let i = p.space().index_of(BasisLabel::new(LF, L1, 0)).unwrap();
        mixed[(0, i)] = Complex64::new(0.01, 0.02);
        mixed[(i, 0)] = Complex64::new(0.01, -0.02);
        let out = lindblad_rhs(&h, &[], &mixed).unwrap();
        let expected = (&h * &mixed - &mixed * &h) * Complex64::new(0.0, -1.0);
        assert_eq!(out, expected);
    }

    #[test]
    fn rhs_dimension_mismatch() {
        let a = ComplexMatrix::zeros(4, 4);
        let b = ComplexMatrix::zeros(3, 3);
        assert!(matches!(
            lindblad_rhs(&a, &[], &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sparse_generator_matches_dense_rhs() {
        let p = SystemParams {
            nbar: 0.4,
            fock_cutoff: 2,
            ..SystemParams::default()
        };
        let seg = PulseSegment::new("all", 1e-4)
            .probe()
            .sideband()
            .cooling()
            .pump(&[Ion::First, Ion::Second]);
        let (h, jumps) = seg.operators(&p);
        let s = p.space();
        // a generic Hermitian matrix, not a valid state, exercises every entry
        let mut rho = s.zeros();
        for j in 0..s.dim() {
            for i in 0..=j {
                let z = Complex64::new(
                    ((i * 7 + j * 3) % 11) as f64 * 0.01,
                    if i == j { 0.0 } else { ((i + 2 * j) % 5) as f64 * 0.003 },
                );
                rho[(i, j)] = z;
                rho[(j, i)] = z.conj();
            }
        }
        let dense = lindblad_rhs(&h, &jumps, &rho).unwrap();
        let gen = Generator::new(&h, &jumps);
        let mut out = vec![ZERO; s.dim() * s.dim()];
        let mut scratch = out.clone();
        gen.apply(rho.as_slice(), &mut out, &mut scratch);
        let sparse = ComplexMatrix::from_vec(s.dim(), s.dim(), out);
        assert!((sparse - &dense).norm() <= 1e-9 * dense.norm());
    }

    #[test]
    fn zero_duration_is_identity() {
        let p = quiet();
        let st = thermal_initial_state(&p, L0, L1).unwrap();
        let seg = PulseSegment::new("noop", 0.0).probe().sideband();
        let (out, traj) = evolve(&st, &seg, &p, &IntegratorConfig::default()).unwrap();
        assert_eq!(out, st);
        assert_eq!(traj.samples.len(), 201);
    }

    #[test]
    fn resonant_probe_rabi_oscillation() {
        let p = SystemParams {
            omega_sb: 0.0,
            delta_probe: 0.0,
            gamma_f: 0.0,
            ..quiet()
        };
        let st = thermal_initial_state(&p, L0, L1).unwrap();
        let seg = PulseSegment::new("probe", 1.3e-3).probe().sideband();
        let cfg = IntegratorConfig {
            samples_per_segment: 40,
            ..IntegratorConfig::default()
        };
        let (_, traj) = evolve(&st, &seg, &p, &cfg).unwrap();
        for s in &traj.samples {
            let expected = (p.omega_f * s.time / 2.0).sin().powi(2);
            assert_relative_eq!(s.populations.get(LF, L1), expected, epsilon = 1e-7);
        }
    }

    #[test]
    fn unitary_composition() {
        let p = quiet();
        let s = p.space();
        let swap = |ion, a: Level, b: Level| {
            let mut u = s.identity() - s.ion_op(ion, a, a) - s.ion_op(ion, b, b);
            u += s.ion_op(ion, a, b) + s.ion_op(ion, b, a);
            u
        };
        let u1 = swap(Ion::First, L0, LF);
        let u2 = swap(Ion::Second, L1, Level::E) * Complex64::new(0.0, 1.0);
        let st = thermal_initial_state(&SystemParams { nbar: 0.2, ..p.clone() }, L0, L1).unwrap();
        let seq = PulseSequence::new(vec![
            PulseSegment::new("a", 0.0).with_unitary(u1.clone()),
            PulseSegment::new("b", 0.0).with_unitary(u2.clone()),
        ])
        .unwrap();
        let (out, _) = run_sequence(
            &st,
            &seq,
            &SystemParams { nbar: 0.2, ..p.clone() },
            &IntegratorConfig::default(),
        )
        .unwrap();
        let u = &u2 * &u1;
        let expected = &u * st.rho() * u.adjoint();
        assert!((out.rho() - expected).norm() < 1e-14);
        assert_relative_eq!(populations(&out, false).get(LF, Level::E), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn single_segment_sequence_equals_evolve() {
        let p = SystemParams {
            fock_cutoff: 2,
            ..SystemParams::default()
        };
        let st = thermal_initial_state(&p, L0, L0).unwrap();
        let seg = PulseSegment::new("probe", 2e-4).probe().sideband();
        let cfg = IntegratorConfig::default();
        let (a, ta) = evolve(&st, &seg, &p, &cfg).unwrap();
        let (b, tb) = run_sequence(&st, &PulseSequence::new(vec![seg]).unwrap(), &p, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(PulseSequence::new(vec![]).is_err());
        assert!(PulseSequence::new(vec![PulseSegment::new("neg", -1.0)]).is_err());
    }

    #[test]
    fn population_bookkeeping() {
        let s = HilbertSpace::new(3).unwrap();
        let pure = DensityState::pure(s, L0, L0, 0).unwrap();
        assert_eq!(populations(&pure, true).get(L0, L0), 1.0);

        let mut rho = s.zeros();
        rho[(s.basis_index(LF, L1, 0).unwrap(), s.basis_index(LF, L1, 0).unwrap())] = Complex64::new(0.5, 0.0);
        rho[(s.basis_index(L1, L1, 0).unwrap(), s.basis_index(L1, L1, 0).unwrap())] = Complex64::new(0.5, 0.0);
        let mix = DensityState::new(s, rho).unwrap();
        let merged = populations(&mix, true);
        assert_eq!(merged.get(L1, L1), 1.0);
        assert_eq!(merged.get(LF, L1), 0.0);
        assert_relative_eq!(populations(&mix, false).total(), 1.0);

        let p = SystemParams {
            nbar: 0.14,
            fock_cutoff: 3,
            ..SystemParams::default()
        };
        let th = thermal_initial_state(&p, L1, L0).unwrap();
        assert_relative_eq!(populations(&th, false).get(L1, L0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(mean_phonon(&th), 0.14, epsilon = 1e-3);
    }

    #[test]
    fn phonon_observables() {
        let s = HilbertSpace::new(3).unwrap();
        let vac = DensityState::pure(s, L0, L1, 0).unwrap();
        assert_eq!(ground_state_fraction(&vac), 1.0);
        assert_eq!(mean_phonon(&vac), 0.0);
        let one = DensityState::pure(s, L0, L1, 1).unwrap();
        assert_eq!(ground_state_fraction(&one), 0.0);
        assert_eq!(mean_phonon(&one), 1.0);
        assert_eq!(one.trace(), ONE);
    }

    #[test]
    fn heating_from_vacuum() {
        // ⟨n⟩(t) = ṅ t exactly for the symmetric jump pair until the cutoff is felt
        let p = SystemParams {
            heating_rate: 106.0,
            nbar: 0.0,
            fock_cutoff: 6,
            ..SystemParams::default()
        };
        let st = thermal_initial_state(&p, L1, L1).unwrap();
        let seg = PulseSegment::new("idle", 1e-3);
        let cfg = IntegratorConfig {
            samples_per_segment: 10,
            ..IntegratorConfig::default()
        };
        let (_, traj) = evolve(&st, &seg, &p, &cfg).unwrap();
        for s in &traj.samples {
            assert_relative_eq!(s.mean_phonon, 106.0 * s.time, max_relative = 1e-6);
        }
    }

    #[test]
    fn single_cutoff_has_no_differences() {
        let p = quiet();
        let rep = convergence_check(&p, &IntegratorConfig::default(), &[2], |q| {
            Ok((
                thermal_initial_state(q, L0, L1)?,
                PulseSequence::new(vec![PulseSegment::new("idle", 1e-5)])?,
            ))
        })
        .unwrap();
        assert!(rep.differences.is_empty());
        assert!(!rep.passed());
    }

    #[test]
    fn csv_layout() {
        let p = quiet();
        let st = thermal_initial_state(&p, L0, L1).unwrap();
        let cfg = IntegratorConfig {
            samples_per_segment: 2,
            ..IntegratorConfig::default()
        };
        let (_, traj) = evolve(&st, &PulseSegment::new("idle", 1e-5), &p, &cfg).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0].split(',').count(), 19);
        assert!(lines[0].starts_with("time_s,P_00,P_01,P_0f,P_0e,P_10"));
        assert!(lines[0].ends_with("mean_n,ground_frac"));
    }
}
