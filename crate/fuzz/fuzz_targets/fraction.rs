#![no_main]

use knice::rational::{parse_fraction, to_decimal, to_fraction_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(q) = parse_fraction(s) {
        assert_eq!(parse_fraction(&to_fraction_string(&q)).unwrap(), q);
        let _ = to_decimal(&q, 6);
    }
});
