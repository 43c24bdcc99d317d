// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Hamiltonians, jump operators and initial states of the ion-oscillator
//! model.
//!
//! Energies are written in the frame co-rotating with the probe. A red
//! sideband drive that is resonant (`delta_mode = 0`) makes `|f,n⟩` and
//! `|1,n+1⟩` degenerate, so in this frame every phonon carries the probe
//! detuning:
//!
//! ```text
//! H = (Δ + δ) a†a + Σ_j [ Ω_SB/2 (a |f⟩⟨1|_j + a† |1⟩⟨f|_j) + Δ |f⟩⟨f|_j ]
//!     + Ω_f/2 (|f⟩⟨0|_1 + |0⟩⟨f|_1)
//! ```

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{hermitian_eigenvalues, hermiticity_defect, ComplexMatrix, HilbertSpace, Ion, Level, ONE};

/// Converts a frequency given as `Ω/2π` in Hz to an angular frequency.
pub fn angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// Converts an angular frequency back to `Ω/2π` in Hz.
pub fn cyclic(rad_per_s: f64) -> f64 {
    rad_per_s / (2.0 * PI)
}

/// Physical parameters of the model. Frequencies are angular (rad/s),
/// rates are in 1/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Probe Rabi frequency Ω_f.
    pub omega_f: f64,
    /// Sideband Rabi frequency Ω_SB of the `|f,0⟩ ↔ |1,1⟩` transition.
    pub omega_sb: f64,
    /// Probe detuning Δ.
    pub delta_probe: f64,
    /// Detuning δ of the sideband drive from the red-sideband resonance.
    pub delta_mode: f64,
    /// Sympathetic cooling rate Γ_f.
    pub gamma_f: f64,
    /// Optical pumping rate Γ_e of the `|e⟩ → |0⟩` channel.
    pub gamma_e: f64,
    /// Mean phonon number of the initial thermal state.
    pub nbar: f64,
    /// Motional heating rate in phonons per second.
    pub heating_rate: f64,
    /// Highest phonon number kept.
    pub fock_cutoff: usize,
}

impl Default for SystemParams {
    /// Experimental values: Ω_SB/2π = 8 kHz, Ω_f/2π = 1.15 kHz, n̄ = 0.14,
    /// 106 phonons/s heating, Γ_f = 4.5e3/s, probe at the OR detuning.
    fn default() -> Self {
        let omega_sb = angular(8.0e3);
        Self {
            omega_f: angular(1.15e3),
            omega_sb,
            delta_probe: omega_sb / SQRT_2,
            delta_mode: 0.0,
            gamma_f: 4.5e3,
            gamma_e: 1.0e5,
            nbar: 0.14,
            heating_rate: 106.0,
            fock_cutoff: 5,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("omega_f", self.omega_f),
            ("omega_sb", self.omega_sb),
            ("gamma_f", self.gamma_f),
            ("gamma_e", self.gamma_e),
            ("nbar", self.nbar),
            ("heating_rate", self.heating_rate),
        ];
        for (name, value) in non_negative {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and non-negative, got {value}"),
                });
            }
        }
        for (name, value) in [("delta_probe", self.delta_probe), ("delta_mode", self.delta_mode)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        HilbertSpace::new(self.fock_cutoff).map(|_| ())
    }

    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::new(self.fock_cutoff.max(1)).expect("cutoff clamped to >= 1")
    }

    pub fn with_cutoff(&self, fock_cutoff: usize) -> Self {
        Self {
            fock_cutoff,
            ..self.clone()
        }
    }

    /// Energy of one phonon in the probe frame.
    pub fn phonon_energy(&self) -> f64 {
        self.delta_probe + self.delta_mode
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Probe drive `Ω_f/2 (|f⟩⟨0|_1 + |0⟩⟨f|_1)` on the first ion.
pub fn probe_hamiltonian(params: &SystemParams) -> ComplexMatrix {
    let s = params.space();
    let raise = s.ion_op(Ion::First, Level::F, Level::Zero);
    (&raise + raise.adjoint()) * real(params.omega_f / 2.0)
}

/// Sideband coupling on `ion` plus the probe-frame detuning of its `|f⟩`
/// level.
pub fn sideband_hamiltonian(params: &SystemParams, ion: Ion) -> ComplexMatrix {
    let s = params.space();
    let a = s.ladder_down();
    let lower = &a * s.ion_op(ion, Level::F, Level::One);
    let coupling = (&lower + lower.adjoint()) * real(params.omega_sb / 2.0);
    coupling + s.ion_op(ion, Level::F, Level::F) * real(params.delta_probe)
}

/// `(Δ + δ) a†a`.
pub fn mode_hamiltonian(params: &SystemParams) -> ComplexMatrix {
    params.space().number_op() * real(params.phonon_energy())
}

/// Sum of the enabled drive terms. With either drive on, the probe-frame
/// energies of `|f⟩` and of the phonons are included; with both off the
/// result is zero.
pub fn total_hamiltonian(params: &SystemParams, probe_on: bool, sideband_on: bool) -> ComplexMatrix {
    let s = params.space();
    let mut h = s.zeros();
    if !(probe_on || sideband_on) {
        return h;
    }
    h += mode_hamiltonian(params);
    if sideband_on {
        for ion in Ion::BOTH {
            h += sideband_hamiltonian(params, ion);
        }
    } else {
        for ion in Ion::BOTH {
            h += s.ion_op(ion, Level::F, Level::F) * real(params.delta_probe);
        }
    }
    if probe_on {
        h += probe_hamiltonian(params);
    }
    h
}

/// Sympathetic cooling `√Γ_f a`.
pub fn cooling_jump(params: &SystemParams) -> ComplexMatrix {
    params.space().ladder_down() * real(params.gamma_f.sqrt())
}

/// Optical pumping `√Γ_e |0⟩⟨e|_j`, one operator per requested ion.
pub fn pump_jumps(params: &SystemParams, ions: &[Ion]) -> Vec<ComplexMatrix> {
    let s = params.space();
    let amp = real(params.gamma_e.sqrt());
    ions.iter()
        .map(|&ion| s.ion_op(ion, Level::Zero, Level::E) * amp)
        .collect()
}

/// Heating towards an infinite-temperature bath: `{√ṅ a†, √ṅ a}`, which
/// gives `d⟨n⟩/dt = ṅ` exactly.
pub fn heating_jumps(params: &SystemParams) -> Vec<ComplexMatrix> {
    let s = params.space();
    let amp = real(params.heating_rate.sqrt());
    let a = s.ladder_down();
    vec![a.adjoint() * amp, a * amp]
}

/// Geometric phonon distribution `n̄ⁿ/(1+n̄)ⁿ⁺¹`, renormalized over
/// `0..=cutoff`.
pub fn thermal_probabilities(nbar: f64, cutoff: usize) -> Vec<f64> {
    let ratio = nbar / (1.0 + nbar);
    let mut p: Vec<f64> = (0..=cutoff)
        .scan(1.0 / (1.0 + nbar), |acc, _| {
            let v = *acc;
            *acc *= ratio;
            Some(v)
        })
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// Density matrix on the ion-oscillator space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    space: HilbertSpace,
    rho: ComplexMatrix,
}

/// Tolerances of the density-matrix invariants.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

impl DensityState {
    /// Wraps `rho` after checking dimension, Hermiticity, trace and
    /// positivity.
    pub fn new(space: HilbertSpace, rho: ComplexMatrix) -> Result<Self> {
        let state = Self::new_unchecked(space, rho)?;
        state.validate(HERMITICITY_TOL, TRACE_TOL, POSITIVITY_TOL)?;
        Ok(state)
    }

    /// Only the dimension is checked.
    pub fn new_unchecked(space: HilbertSpace, rho: ComplexMatrix) -> Result<Self> {
        let d = space.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                rows: rho.nrows(),
                cols: rho.ncols(),
            });
        }
        Ok(Self { space, rho })
    }

    pub fn pure(space: HilbertSpace, ion1: Level, ion2: Level, phonons: usize) -> Result<Self> {
        let rho = space.projector(crate::operators::BasisLabel::new(ion1, ion2, phonons))?;
        Ok(Self { space, rho })
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> ComplexMatrix {
        self.rho
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.rho)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.rho)
            .first()
            .copied()
            .unwrap_or(f64::INFINITY)
    }

    pub fn validate(&self, herm_tol: f64, trace_tol: f64, pos_tol: f64) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect.is_nan() || defect > herm_tol {
            return Err(Error::InvalidState(format!("max |rho - rho^dag| = {defect:e}")));
        }
        let tr = self.trace();
        let off = (tr - ONE).norm();
        if off.is_nan() || off > trace_tol {
            return Err(Error::InvalidState(format!("trace = {tr}")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig.is_nan() || min_eig < -pos_tol {
            return Err(Error::InvalidState(format!("smallest eigenvalue {min_eig:e}")));
        }
        Ok(())
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let d = self.space.dim();
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                rows: u.nrows(),
                cols: u.ncols(),
            });
        }
        Ok(Self {
            space: self.space,
            rho: u * &self.rho * u.adjoint(),
        })
    }
}

/// `|ion1 ion2⟩⟨ion1 ion2| ⊗ Σ_n p_n |n⟩⟨n|` with the truncated thermal
/// distribution of `params.nbar`.
pub fn thermal_initial_state(params: &SystemParams, ion1: Level, ion2: Level) -> Result<DensityState> {
    params.validate()?;
    let space = params.space();
    let mut rho = space.zeros();
    for (n, p) in thermal_probabilities(params.nbar, params.fock_cutoff)
        .into_iter()
        .enumerate()
    {
        let i = space.basis_index(ion1, ion2, n)?;
        rho[(i, i)] = real(p);
    }
    DensityState::new(space, rho)
}
