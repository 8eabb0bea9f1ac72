#![no_main]
use libfuzzer_sys::fuzz_target;
use psdpack::coneapprox::RestrictedSdp;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = RestrictedSdp::from_json_str(text) {
        for block in &doc.blocks {
            assert!(block.s >= 1 && block.s <= doc.n);
            assert_eq!(block.frame.len(), doc.n * block.s);
            assert_eq!(block.constraints.len(), doc.rhs.len());
        }
        let back = RestrictedSdp::from_json_str(&doc.to_json()).expect("roundtrip parses");
        assert_eq!(back.blocks.len(), doc.blocks.len());
    }
});
