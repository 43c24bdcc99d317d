// Copyright 2026 The dissgate Authors
// SPDX-License-Identifier: Apache-2.0

#![no_main]

use dissgate::sweep::{decode_cache_entry, encode_cache_entry};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(entry) = decode_cache_entry(data) {
        let again = decode_cache_entry(&encode_cache_entry(&entry)).expect("encoded entry decodes");
        assert_eq!(again, entry);
    }
});
