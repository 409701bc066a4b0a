#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(rec) = morphid::io::parse_trajectory(s) {
            assert!(rec.times.windows(2).all(|w| w[1] > w[0]));
        }
    }
});
