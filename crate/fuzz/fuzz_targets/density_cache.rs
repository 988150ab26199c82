#![no_main]

use knice::numtheory::{density, parse_density_cache, DensityTable};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_density_cache(s) {
        for r in rows.iter().take(64) {
            assert_eq!(*r, density(r.ell));
        }
        let t = DensityTable::from_cache_text(s).unwrap();
        assert_eq!(t.len(), rows.len());
    }
});
