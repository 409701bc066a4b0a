#![no_main]

use libfuzzer_sys::fuzz_target;
use morphid::MorphologyVector;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(m) = s.parse::<MorphologyVector>() {
            let again: MorphologyVector = m.to_literal().parse().expect("printed literal must parse");
            assert_eq!(again, m);
        }
    }
});
