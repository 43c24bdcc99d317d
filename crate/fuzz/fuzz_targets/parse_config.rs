// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use dissgate::config::{parse_config, serialize};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_config(text) {
        let again = parse_config(&serialize(&cfg)).expect("serialized config parses");
        assert_eq!(again, cfg);
    }
});
