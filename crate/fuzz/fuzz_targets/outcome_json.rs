#![no_main]

use knice::lattice::is_k_nice;
use knice::search::SearchOutcome;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(o) = SearchOutcome::from_json(s) {
        if let Some(w) = &o.witness {
            assert!(is_k_nice(w.points(), o.k));
            assert_eq!(w.len() as u64, o.max_size);
        }
        assert_eq!(SearchOutcome::from_json(&o.to_json()).unwrap(), o);
    }
});
