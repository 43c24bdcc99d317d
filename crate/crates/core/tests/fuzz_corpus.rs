// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Replays the checked-in fuzz seeds through the fuzz targets' checks.

use std::fs;
use std::path::PathBuf;

use dissgate::config::{parse_config, serialize};
use dissgate::sweep::{decode_cache_entry, encode_cache_entry};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.display().to_string(), fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn parse_config_seeds_round_trip() {
    let mut accepted = 0;
    for (name, bytes) in seeds("parse_config") {
        let Ok(text) = std::str::from_utf8(&bytes) else {
            continue;
        };
        if let Ok(cfg) = parse_config(text) {
            assert_eq!(parse_config(&serialize(&cfg)).unwrap(), cfg, "{name}");
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn cache_seeds_round_trip() {
    let mut accepted = 0;
    for (name, bytes) in seeds("decode_cache_entry") {
        if let Ok(entry) = decode_cache_entry(&bytes) {
            assert_eq!(
                decode_cache_entry(&encode_cache_entry(&entry)).unwrap(),
                entry,
                "{name}"
            );
            accepted += 1;
        }
    }
    assert_eq!(accepted, 2);
}
