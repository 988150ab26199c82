#![no_main]

use knice::lp::gamma::parse_gamma_cache;
use knice::lp::GammaCache;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if parse_gamma_cache(s).is_ok() {
        // A small budget keeps re-certification cheap.
        if let Ok(c) = GammaCache::from_cache_text(s, 24, true) {
            let again = GammaCache::from_cache_text(&c.to_cache_text(), 24, true).unwrap();
            assert_eq!(again.len(), c.len());
        }
    }
});
