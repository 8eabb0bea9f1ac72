#![no_main]
use libfuzzer_sys::fuzz_target;
use psdpack::symmat::SymMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = SymMatrix::from_json_str(text) {
        // accepted matrices satisfy the type invariants and roundtrip
        assert!(m.dim() >= 1);
        let back = SymMatrix::from_json_str(&m.to_json()).expect("roundtrip parses");
        assert_eq!(m.as_matrix(), back.as_matrix());
    }
});
