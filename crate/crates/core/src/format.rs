// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixed float formatting for every file this crate writes.

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal representation of `x` rounded to 12 significant digits.
pub fn float(x: f64) -> String {
    let r = sig12(x);
    if r == 0.0 {
        "0".to_owned()
    } else {
        format!("{r}")
    }
}

/// Serde helpers that apply [`sig12`] on output.
pub mod serde_sig12 {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(super::sig12(*x))
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&super::super::sig12(*x))?;
            }
            seq.end()
        }
    }
}
