#![no_main]

use libfuzzer_sys::fuzz_target;
use morphid::config::PipelineConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = PipelineConfig::from_toml_str(s) {
            let _ = cfg.settings();
        }
    }
});
