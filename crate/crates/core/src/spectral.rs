// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Dressed-state analysis of the probe resonances.
//!
//! Starting from a product state, the sideband coupling dresses the initial
//! state with the states it connects to (the ground manifold), and the probe
//! opens an excited manifold that the sideband closes in turn. Diagonalizing
//! both manifolds gives the dressed energies, and the probe matrix elements
//! between them give the effective Rabi frequencies.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::GateKind;
use crate::model::{self, cyclic, SystemParams};
use crate::operators::{BasisLabel, ComplexMatrix, ZERO};

/// States closed under the sideband coupling, with the restricted
/// Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifold {
    pub labels: Vec<BasisLabel>,
    pub hamiltonian: ComplexMatrix,
}

/// Excited subspace reached from `initial` by the probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    pub initial: BasisLabel,
    pub labels: Vec<BasisLabel>,
    pub hamiltonian: ComplexMatrix,
    /// Probe matrix elements from the bare initial state into `labels` (rad/s).
    pub probe_vector: DVector<Complex64>,
    /// The initial state and everything the sideband couples it to.
    pub ground: Manifold,
    /// Probe matrix elements, excited × ground.
    pub probe_couplings: ComplexMatrix,
}

impl Subspace {
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// An eigenstate of a manifold Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedState {
    /// rad/s, in the probe frame.
    pub energy: f64,
    pub vector: DVector<Complex64>,
    /// `|⟨state|probe_vector⟩|`, the probe matrix element into this state.
    pub probe_overlap: f64,
}

fn sparse_neighbors(h: &ComplexMatrix, col: usize) -> impl Iterator<Item = usize> + '_ {
    (0..h.nrows()).filter(move |&r| r != col && h[(r, col)] != ZERO)
}

/// Breadth-first closure of `seeds` under the off-diagonal entries of `h`.
fn closure(h: &ComplexMatrix, seeds: &[usize], exclude: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in seeds {
        if !seen.contains(&s) && !exclude.contains(&s) {
            seen.push(s);
            queue.push_back(s);
        }
    }
    while let Some(c) = queue.pop_front() {
        for r in sparse_neighbors(h, c) {
            if !seen.contains(&r) && !exclude.contains(&r) {
                seen.push(r);
                queue.push_back(r);
            }
        }
    }
    seen
}

fn restrict(h: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| h[(rows[i], cols[j])])
}

/// Builds the excited subspace of `initial` with the sideband and detuning
/// terms of `params`. The subspace is empty when the probe reaches nothing.
pub fn excited_subspace(initial: BasisLabel, params: &SystemParams) -> Result<Subspace> {
    let space = params.space();
    let start = space.index_of(initial)?;
    let h_sb = model::total_hamiltonian(params, false, true);
    let probe = model::probe_hamiltonian(params);

    let ground_idx = closure(&h_sb, &[start], &[]);
    let mut seeds = Vec::new();
    for &g in &ground_idx {
        seeds.extend(sparse_neighbors(&probe, g).filter(|r| !ground_idx.contains(r)));
    }
    let excited_idx = closure(&h_sb, &seeds, &ground_idx);

    let label = |i: &usize| space.label(*i).expect("index within space");
    let probe_couplings = restrict(&probe, &excited_idx, &ground_idx);
    Ok(Subspace {
        initial,
        labels: excited_idx.iter().map(label).collect(),
        hamiltonian: restrict(&h_sb, &excited_idx, &excited_idx),
        probe_vector: probe_couplings.column(0).into_owned(),
        ground: Manifold {
            labels: ground_idx.iter().map(label).collect(),
            hamiltonian: restrict(&h_sb, &ground_idx, &ground_idx),
        },
        probe_couplings,
    })
}

/// Eigen-decomposition with ascending eigenvalues and reproducible
/// eigenvectors: within a degenerate cluster the basis is obtained by
/// projecting the unit vectors in label order and orthonormalizing; every
/// vector's largest component is made real and positive.
pub fn canonical_eigen(h: &ComplexMatrix) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let raw: Vec<DVector<Complex64>> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();

    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale;
    let mut vectors = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        if end - start == 1 {
            vectors.push(raw[start].clone());
        } else {
            let cluster = &raw[start..end];
            let mut basis: Vec<DVector<Complex64>> = Vec::new();
            for k in 0..n {
                if basis.len() == cluster.len() {
                    break;
                }
                // projection of e_k onto the cluster
                let mut v = DVector::<Complex64>::zeros(n);
                for c in cluster {
                    v += c * c[k].conj();
                }
                for b in &basis {
                    let proj = b.dotc(&v);
                    v -= b * proj;
                }
                let norm = v.norm();
                if norm > 1e-6 {
                    basis.push(v / Complex64::new(norm, 0.0));
                }
            }
            // rank deficiency cannot happen for an orthonormal cluster
            debug_assert_eq!(basis.len(), cluster.len());
            vectors.extend(basis);
        }
        start = end;
    }
    for v in &mut vectors {
        fix_phase(v);
    }
    (values, vectors)
}

fn fix_phase(v: &mut DVector<Complex64>) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_norm * (1.0 + 1e-9) {
            best = i;
            best_norm = m;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best] / Complex64::new(best_norm, 0.0);
        *v *= phase.conj();
    }
}

/// Dressed states of the excited subspace, ascending in energy.
pub fn dressed_spectrum(sub: &Subspace) -> Result<Vec<DressedState>> {
    if sub.is_empty() {
        return Err(Error::EmptySubspace(format!(
            "the probe couples {} to nothing",
            sub.initial
        )));
    }
    let (values, vectors) = canonical_eigen(&sub.hamiltonian);
    Ok(values
        .into_iter()
        .zip(vectors)
        .map(|(energy, vector)| {
            let probe_overlap = vector.dotc(&sub.probe_vector).norm();
            DressedState {
                energy,
                vector,
                probe_overlap,
            }
        })
        .collect())
}

/// One probe transition between a dressed ground component of the initial
/// state and a dressed excited state.
#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub ground: DressedState,
    pub excited: DressedState,
    /// `|⟨ground|initial⟩|²`.
    pub ground_weight: f64,
    /// Excited minus ground energy; zero means the probe is resonant (rad/s).
    pub detuning: f64,
    /// Effective Rabi frequency, twice the probe matrix element (rad/s).
    pub rabi: f64,
}

/// Probe transitions out of `initial` at the detuning fixed by `gate`.
/// Transitions with a vanishing matrix element are omitted.
pub fn resonance_offsets(initial: BasisLabel, params: &SystemParams, gate: GateKind) -> Result<Vec<Resonance>> {
    let p = SystemParams {
        delta_probe: gate.probe_detuning(params.omega_sb),
        ..params.clone()
    };
    resonances_at(initial, &p)
}

/// Same as [`resonance_offsets`] with the probe detuning taken from `params`.
pub fn resonances_at(initial: BasisLabel, params: &SystemParams) -> Result<Vec<Resonance>> {
    let sub = excited_subspace(initial, params)?;
    let excited = dressed_spectrum(&sub)?;
    let (g_values, g_vectors) = canonical_eigen(&sub.ground.hamiltonian);
    let threshold = 1e-12 * params.omega_f.max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for (g_energy, g_vec) in g_values.into_iter().zip(g_vectors) {
        // the initial state is the first ground label
        let weight = g_vec[0].norm_sqr();
        if weight < 1e-12 {
            continue;
        }
        let driven = &sub.probe_couplings * &g_vec;
        let ground = DressedState {
            energy: g_energy,
            probe_overlap: driven.norm(),
            vector: g_vec,
        };
        for e in &excited {
            let rabi = 2.0 * e.vector.dotc(&driven).norm();
            if rabi > threshold {
                out.push(Resonance {
                    ground: ground.clone(),
                    excited: e.clone(),
                    ground_weight: weight,
                    detuning: e.energy - g_energy,
                    rabi,
                });
            }
        }
    }
    Ok(out)
}

/// JSON form of a spectrum: energies and probe matrix elements in Hz.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumExport {
    pub initial: String,
    pub labels: Vec<String>,
    #[serde(with = "crate::format::serde_sig12::vec")]
    pub eigenvalues_hz: Vec<f64>,
    #[serde(with = "crate::format::serde_sig12::vec")]
    pub overlaps_hz: Vec<f64>,
    /// Eigenvector components, `[state][label]` as `[re, im]`.
    pub eigenvectors: Vec<Vec<[f64; 2]>>,
}

impl SpectrumExport {
    pub fn new(sub: &Subspace, states: &[DressedState]) -> Self {
        Self {
            initial: sub.initial.to_string(),
            labels: sub.labels.iter().map(ToString::to_string).collect(),
            eigenvalues_hz: states.iter().map(|s| cyclic(s.energy)).collect(),
            overlaps_hz: states.iter().map(|s| cyclic(s.probe_overlap)).collect(),
            eigenvectors: states
                .iter()
                .map(|s| {
                    s.vector
                        .iter()
                        .map(|z| [crate::format::sig12(z.re), crate::format::sig12(z.im)])
                        .collect()
                })
                .collect(),
        }
    }
}

/// Label → component lookup, handy for matching eigenvectors in tests and reports.
pub fn components(labels: &[BasisLabel], v: &DVector<Complex64>) -> HashMap<BasisLabel, Complex64> {
    labels.iter().copied().zip(v.iter().copied()).collect()
}
