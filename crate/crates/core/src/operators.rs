// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Hilbert space of two four-level ions and one motional mode.
//!
//! Basis ordering is fixed: ion 1 outermost, ion 2 in the middle, phonon
//! number innermost, so
//!
//! ```text
//! index(k, l, n) = (4 k + l) (n_max + 1) + n
//! ```
//!
//! with electronic levels ordered `0, 1, f, e`. Every matrix and every
//! serialized output in this crate uses this ordering.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix used for operators and density matrices.
pub type ComplexMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Number of electronic levels kept per ion.
pub const N_LEVELS: usize = 4;

/// Electronic level of a single ion.
///
/// `Zero` and `One` are the logical qubit states, `F` the auxiliary level
/// used for the engineered resonance and `E` the shelving level used by the
/// NOR pump step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    Zero,
    One,
    F,
    E,
}

impl Level {
    pub const ALL: [Level; N_LEVELS] = [Level::Zero, Level::One, Level::F, Level::E];

    pub const fn index(self) -> usize {
        match self {
            Level::Zero => 0,
            Level::One => 1,
            Level::F => 2,
            Level::E => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Level> {
        Level::ALL.get(i).copied()
    }

    pub const fn symbol(self) -> char {
        match self {
            Level::Zero => '0',
            Level::One => '1',
            Level::F => 'f',
            Level::E => 'e',
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// One of the two data ions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ion {
    First,
    Second,
}

impl Ion {
    pub const BOTH: [Ion; 2] = [Ion::First, Ion::Second];

    /// 1-based ion number as used in configuration files.
    pub const fn number(self) -> u8 {
        match self {
            Ion::First => 1,
            Ion::Second => 2,
        }
    }

    pub fn from_number(n: i64) -> Option<Ion> {
        match n {
            1 => Some(Ion::First),
            2 => Some(Ion::Second),
            _ => None,
        }
    }
}

/// Product basis label `|k l⟩|n⟩_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    pub ion1: Level,
    pub ion2: Level,
    pub phonons: usize,
}

impl BasisLabel {
    pub const fn new(ion1: Level, ion2: Level, phonons: usize) -> Self {
        Self { ion1, ion2, phonons }
    }

    pub fn level(&self, ion: Ion) -> Level {
        match ion {
            Ion::First => self.ion1,
            Ion::Second => self.ion2,
        }
    }

    pub fn with_level(mut self, ion: Ion, level: Level) -> Self {
        match ion {
            Ion::First => self.ion1 = level,
            Ion::Second => self.ion2 = level,
        }
        self
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{},{}>", self.ion1, self.ion2, self.phonons)
    }
}

/// Two ions with four levels each, times a motional mode truncated at
/// `fock_cutoff` phonons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    fock_cutoff: usize,
}

impl HilbertSpace {
    pub fn new(fock_cutoff: usize) -> Result<Self> {
        if fock_cutoff < 1 {
            return Err(Error::InvalidParameter {
                name: "fock_cutoff",
                reason: format!("must be at least 1, got {fock_cutoff}"),
            });
        }
        Ok(Self { fock_cutoff })
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    /// Number of Fock states kept, `n_max + 1`.
    pub fn n_fock(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        N_LEVELS * N_LEVELS * self.n_fock()
    }

    pub fn basis_index(&self, ion1: Level, ion2: Level, phonons: usize) -> Result<usize> {
        if phonons > self.fock_cutoff {
            return Err(Error::Truncation {
                phonons,
                cutoff: self.fock_cutoff,
            });
        }
        Ok((ion1.index() * N_LEVELS + ion2.index()) * self.n_fock() + phonons)
    }

    pub fn index_of(&self, label: BasisLabel) -> Result<usize> {
        self.basis_index(label.ion1, label.ion2, label.phonons)
    }

    /// Inverse of [`HilbertSpace::basis_index`].
    pub fn label(&self, index: usize) -> Option<BasisLabel> {
        if index >= self.dim() {
            return None;
        }
        let nf = self.n_fock();
        let phonons = index % nf;
        let electronic = index / nf;
        Some(BasisLabel {
            ion1: Level::ALL[electronic / N_LEVELS],
            ion2: Level::ALL[electronic % N_LEVELS],
            phonons,
        })
    }

    pub fn labels(&self) -> impl Iterator<Item = BasisLabel> + '_ {
        (0..self.dim()).map(move |i| self.label(i).expect("index within dim"))
    }

    pub fn zeros(&self) -> ComplexMatrix {
        ComplexMatrix::zeros(self.dim(), self.dim())
    }

    pub fn identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim(), self.dim())
    }

    /// Annihilation operator of the motional mode, identity on both ions.
    pub fn ladder_down(&self) -> ComplexMatrix {
        let mut a = self.zeros();
        for (i, label) in self.labels().enumerate() {
            if label.phonons > 0 {
                let j = i - 1;
                a[(j, i)] = Complex64::new((label.phonons as f64).sqrt(), 0.0);
            }
        }
        a
    }

    /// Creation operator, the conjugate transpose of [`HilbertSpace::ladder_down`].
    pub fn ladder_up(&self) -> ComplexMatrix {
        self.ladder_down().adjoint()
    }

    /// Phonon number operator `a†a`.
    pub fn number_op(&self) -> ComplexMatrix {
        let mut n = self.zeros();
        for (i, label) in self.labels().enumerate() {
            n[(i, i)] = Complex64::new(label.phonons as f64, 0.0);
        }
        n
    }

    /// `|bra⟩⟨ket|` on `ion`, identity on the other ion and on the mode.
    pub fn ion_op(&self, ion: Ion, bra: Level, ket: Level) -> ComplexMatrix {
        let mut op = self.zeros();
        for (i, label) in self.labels().enumerate() {
            if label.level(ion) == ket {
                let target = label.with_level(ion, bra);
                let j = self.index_of(target).expect("same phonon number");
                op[(j, i)] = ONE;
            }
        }
        op
    }

    /// Unitary acting as `u` (4×4, in level order) on `ion` and identity elsewhere.
    pub fn embed_single_ion(&self, ion: Ion, u: &nalgebra::Matrix4<Complex64>) -> ComplexMatrix {
        let mut op = self.zeros();
        for (i, label) in self.labels().enumerate() {
            let ket = label.level(ion).index();
            for bra in Level::ALL {
                let amp = u[(bra.index(), ket)];
                if amp != ZERO {
                    let j = self.index_of(label.with_level(ion, bra)).expect("same phonon number");
                    op[(j, i)] += amp;
                }
            }
        }
        op
    }

    /// Projector onto the product basis state `label`.
    pub fn projector(&self, label: BasisLabel) -> Result<ComplexMatrix> {
        let i = self.index_of(label)?;
        let mut p = self.zeros();
        p[(i, i)] = ONE;
        Ok(p)
    }
}

/// Ascending eigenvalues of the Hermitian part of `a`, computed from the real
/// symmetric embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is that of
/// `a` with every eigenvalue doubled. nalgebra's complex solver can return
/// `-inf` for matrices with vanishing rows.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.nrows();
    let mut r = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            r[(i, j)] = z.re;
            r[(i + n, j + n)] = z.re;
            r[(i, j + n)] = -z.im;
            r[(i + n, j)] = z.im;
        }
    }
    let mut values: Vec<f64> = r.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values.into_iter().step_by(2).collect()
}

/// Largest entry of `|A - A†|`.
pub fn hermiticity_defect(a: &ComplexMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
pub(crate) fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ket(space: &HilbertSpace, label: BasisLabel) -> nalgebra::DVector<Complex64> {
        let mut v = nalgebra::DVector::zeros(space.dim());
        v[space.index_of(label).unwrap()] = ONE;
        v
    }

    #[test]
    fn first_basis_element_is_zero() {
        let s = HilbertSpace::new(5).unwrap();
        assert_eq!(s.basis_index(Level::Zero, Level::Zero, 0).unwrap(), 0);
    }

    #[test]
    fn dimension_arithmetic() {
        let s = HilbertSpace::new(2).unwrap();
        assert_eq!(s.dim(), 48);
        assert_eq!(HilbertSpace::new(5).unwrap().dim(), 96);
    }

    #[test]
    fn index_round_trip() {
        for cutoff in 1..=3 {
            let s = HilbertSpace::new(cutoff).unwrap();
            for i in 0..s.dim() {
                let l = s.label(i).unwrap();
                assert_eq!(s.index_of(l).unwrap(), i);
            }
            assert!(s.label(s.dim()).is_none());
        }
    }

    #[test]
    fn out_of_range_phonon_is_truncation_error() {
        let s = HilbertSpace::new(2).unwrap();
        assert!(matches!(
            s.basis_index(Level::One, Level::F, 3),
            Err(Error::Truncation { phonons: 3, cutoff: 2 })
        ));
        assert!(HilbertSpace::new(0).is_err());
    }

    #[test]
    fn ladder_lowers_phonon_number() {
        let s = HilbertSpace::new(3).unwrap();
        let a = s.ladder_down();
        let out = &a * ket(&s, BasisLabel::new(Level::Zero, Level::Zero, 1));
        assert_eq!(out, ket(&s, BasisLabel::new(Level::Zero, Level::Zero, 0)));
        let vac = &a * ket(&s, BasisLabel::new(Level::Zero, Level::Zero, 0));
        assert!(vac.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn number_operator_spectrum() {
        let s = HilbertSpace::new(4).unwrap();
        let a = s.ladder_down();
        let n = a.adjoint() * &a;
        // a†a is diagonal in this basis; count multiplicities directly
        let mut counts = vec![0usize; s.n_fock()];
        for i in 0..s.dim() {
            let v = n[(i, i)].re;
            assert_relative_eq!(v, v.round(), epsilon = 1e-12);
            counts[v.round() as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c == 16));
        assert_relative_eq!((n - s.number_op()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ladder_up_is_adjoint() {
        let s = HilbertSpace::new(3).unwrap();
        let down = s.ladder_down();
        let up = s.ladder_up();
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                assert_eq!(up[(i, j)], down[(j, i)].conj());
            }
        }
    }

    #[test]
    fn ion_op_addresses_one_ion() {
        let s = HilbertSpace::new(2).unwrap();
        let op = s.ion_op(Ion::First, Level::F, Level::Zero);
        let out = &op * ket(&s, BasisLabel::new(Level::Zero, Level::One, 0));
        assert_eq!(out, ket(&s, BasisLabel::new(Level::F, Level::One, 0)));

        let op2 = s.ion_op(Ion::Second, Level::F, Level::Zero);
        let out2 = &op2 * ket(&s, BasisLabel::new(Level::Zero, Level::One, 0));
        assert!(out2.iter().all(|z| z.norm() == 0.0));

        let sym = &op + op.adjoint();
        assert_eq!(hermiticity_defect(&sym), 0.0);
    }

    #[test]
    fn embeddings_match_direct_index_computation() {
        for cutoff in 1..=3 {
            let s = HilbertSpace::new(cutoff).unwrap();
            let a = s.ladder_down();
            for bra in Level::ALL {
                for ket_level in Level::ALL {
                    let op1 = s.ion_op(Ion::First, bra, ket_level);
                    let op2 = s.ion_op(Ion::Second, bra, ket_level);
                    for (i, li) in s.labels().enumerate() {
                        for (j, lj) in s.labels().enumerate() {
                            let e1 = li.ion1 == bra
                                && lj.ion1 == ket_level
                                && li.ion2 == lj.ion2
                                && li.phonons == lj.phonons;
                            let e2 = li.ion2 == bra
                                && lj.ion2 == ket_level
                                && li.ion1 == lj.ion1
                                && li.phonons == lj.phonons;
                            assert_eq!(op1[(i, j)].re, e1 as u8 as f64);
                            assert_eq!(op2[(i, j)].re, e2 as u8 as f64);
                        }
                    }
                }
            }
            for (i, li) in s.labels().enumerate() {
                for (j, lj) in s.labels().enumerate() {
                    let expected = if li.ion1 == lj.ion1 && li.ion2 == lj.ion2 && li.phonons + 1 == lj.phonons {
                        (lj.phonons as f64).sqrt()
                    } else {
                        0.0
                    };
                    assert_eq!(a[(i, j)].re, expected);
                }
            }
        }
    }

    #[test]
    fn ion_operators_on_different_ions_commute() {
        let s = HilbertSpace::new(1).unwrap();
        for a in Level::ALL {
            for b in Level::ALL {
                let x = s.ion_op(Ion::First, a, b);
                for c in Level::ALL {
                    for d in Level::ALL {
                        let y = s.ion_op(Ion::Second, c, d);
                        assert_eq!(commutator(&x, &y).norm(), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn hermitian_eigenvalues_with_empty_rows() {
        let mut a = ComplexMatrix::zeros(4, 4);
        a[(1, 1)] = Complex64::new(0.25, 0.0);
        a[(2, 2)] = Complex64::new(0.75, 0.0);
        a[(1, 2)] = Complex64::new(0.0, 0.25);
        a[(2, 1)] = Complex64::new(0.0, -0.25);
        let e = hermitian_eigenvalues(&a);
        let d = (0.25f64 * 0.25 + 0.25 * 0.25).sqrt();
        let want = [0.0, 0.0, 0.5 - d, 0.5 + d];
        for (x, y) in e.iter().zip(want) {
            assert!((x - y).abs() < 1e-14, "{e:?}");
        }
    }
}
