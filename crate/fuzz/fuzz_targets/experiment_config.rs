#![no_main]
use libfuzzer_sys::fuzz_target;
use psdpack_cli::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::from_json_str(text) {
        // accepted configs revalidate after a serde roundtrip
        let json = serde_json::to_string(&cfg).expect("config serializes");
        let back = ExperimentConfig::from_json_str(&json).expect("roundtrip parses");
        assert_eq!(back.n, cfg.n);
        assert_eq!(back.trials, cfg.trials);
    }
});
