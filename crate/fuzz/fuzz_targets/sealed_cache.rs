#![no_main]

use knice::cache::{seal, unseal};
use libfuzzer_sys::fuzz_target;

// First line is the tag, the rest the sealed text.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let (tag, body) = s.split_once('\n').unwrap_or((s, ""));
    if let Ok(recs) = unseal(tag, body) {
        let recs: Vec<&str> = recs.into_iter().map(|(_, r)| r).collect();
        let resealed = seal(tag, &recs);
        let again: Vec<&str> = unseal(tag, &resealed)
            .unwrap()
            .into_iter()
            .map(|(_, r)| r)
            .collect();
        assert_eq!(again, recs);
    }
});
