// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Reference propagators built from dense superoperators.

#![allow(dead_code)]

use dissgate::dynamics::PulseSequence;
use dissgate::model::{DensityState, SystemParams};
use dissgate::operators::{ComplexMatrix, HilbertSpace};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Column-stacking Liouvillian: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
pub fn liouvillian(h: &ComplexMatrix, jumps: &[ComplexMatrix]) -> ComplexMatrix {
    let d = h.nrows();
    let id = ComplexMatrix::identity(d, d);
    let i = Complex64::new(0.0, 1.0);
    let mut l = (kron(&id, h) - kron(&h.transpose(), &id)) * (-i);
    for j in jumps {
        let jdj = j.adjoint() * j;
        l += kron(&j.conjugate(), j);
        l -= kron(&id, &jdj) * Complex64::new(0.5, 0.0);
        l -= kron(&jdj.transpose(), &id) * Complex64::new(0.5, 0.0);
    }
    l
}

fn vec_of(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(m.len(), 1, m.as_slice())
}

fn one_norm(m: &ComplexMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(A t) v` by scaling and a Taylor series run to machine precision:
/// the interval is split so that every piece has `‖A‖₁ Δt ≤ 1/2`.
pub fn expmv(a: &ComplexMatrix, t: f64, v: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let pieces = (2.0 * one_norm(a) * t.abs()).ceil().max(1.0) as usize;
    let dt = Complex64::new(t / pieces as f64, 0.0);
    let mut x = v.clone();
    for _ in 0..pieces {
        let mut term = x.clone();
        let mut sum = x.clone();
        for k in 1..200 {
            term = (a * &term) * (dt / k as f64);
            sum += &term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        x = sum;
    }
    x
}

/// `exp(L t) ρ` with the dense Liouvillian.
pub fn propagate(rho: &ComplexMatrix, h: &ComplexMatrix, jumps: &[ComplexMatrix], t: f64) -> ComplexMatrix {
    let d = rho.nrows();
    let v = expmv(&liouvillian(h, jumps), t, &vec_of(rho));
    ComplexMatrix::from_column_slice(d, d, v.as_slice())
}

/// Runs a whole sequence with the dense propagator, all initial states at
/// once as columns of one block.
pub fn run_exact(initials: &[&ComplexMatrix], seq: &PulseSequence, params: &SystemParams) -> Vec<ComplexMatrix> {
    let d = initials[0].nrows();
    let mut rhos: Vec<ComplexMatrix> = initials.iter().map(|r| (*r).clone()).collect();
    for seg in seq.segments() {
        for r in &mut rhos {
            for u in &seg.unitaries {
                *r = u * &*r * u.adjoint();
            }
        }
        let mut block = DMatrix::<Complex64>::zeros(d * d, rhos.len());
        for (k, r) in rhos.iter().enumerate() {
            block.column_mut(k).copy_from_slice(r.as_slice());
        }
        let (h, jumps) = seg.operators(params);
        let out = expmv(&liouvillian(&h, &jumps), seg.duration, &block);
        for (k, r) in rhos.iter_mut().enumerate() {
            *r = ComplexMatrix::from_column_slice(d, d, out.column(k).as_slice());
        }
    }
    rhos
}

/// `exp(−iHt) ψ` for a pure state.
pub fn unitary(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    (h * Complex64::new(0.0, -t)).exp()
}

pub fn state(space: HilbertSpace, rho: ComplexMatrix) -> DensityState {
    DensityState::new_unchecked(space, rho).expect("square matrix")
}
