// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and analysis of dissipative OR/NOR gates on two trapped ions
//! sharing a motional mode.
//!
//! * [`operators`]: truncated Hilbert space and elementary operators.
//! * [`model`]: Hamiltonians, jump operators and thermal initial states.
//! * [`dynamics`]: Lindblad integration over pulse segments.
//! * [`spectral`]: dressed-state analysis of the engineered resonances.
//! * [`gates`]: OR/NOR pulse programs, truth tables and scans.
//! * [`analytics`]: closed-form error model and the fidelity comparison table.
//! * [`config`] and [`sweep`]: run configuration and parameter sweeps.

pub mod analytics;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod gates;
pub mod model;
pub mod operators;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
