#![no_main]

use knice::lattice::{is_k_nice, NiceSet};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(q) = NiceSet::from_json(s) {
        assert!(is_k_nice(q.points(), q.k()));
        assert_eq!(NiceSet::from_json(&q.to_json()).unwrap(), q);
    }
});
