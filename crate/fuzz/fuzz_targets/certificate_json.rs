#![no_main]

use knice::lp::DualCertificate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(c) = DualCertificate::from_json(s) {
        c.verify().unwrap();
        assert_eq!(DualCertificate::from_json(&c.to_json()).unwrap(), c);
    }
});
