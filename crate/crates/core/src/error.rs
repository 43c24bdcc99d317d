// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("phonon number {phonons} exceeds the Fock cutoff {cutoff}")]
    Truncation { phonons: usize, cutoff: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("integrator step size underflow at t = {time:e} s (h = {step:e} s)")]
    StepUnderflow { time: f64, step: f64 },

    #[error("non-finite state encountered at t = {time:e} s")]
    NonFinite { time: f64 },

    #[error("empty subspace: {0}")]
    EmptySubspace(String),

    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),

    #[error("sweep budget exceeded: {points} points requested, cap is {cap}")]
    Budget { points: usize, cap: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed cache entry: {0}")]
    Cache(String),
}
