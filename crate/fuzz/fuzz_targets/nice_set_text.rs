#![no_main]

use knice::lattice::{is_k_nice, NiceSet};
use libfuzzer_sys::fuzz_target;

// First byte picks k, the rest is the point list.
fuzz_target!(|data: &[u8]| {
    let Some((&k, rest)) = data.split_first() else {
        return;
    };
    let Ok(s) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(q) = NiceSet::from_text(s, u64::from(k)) {
        assert!(is_k_nice(q.points(), q.k()));
        assert_eq!(NiceSet::from_text(&q.to_text(), q.k()).unwrap(), q);
    }
});
