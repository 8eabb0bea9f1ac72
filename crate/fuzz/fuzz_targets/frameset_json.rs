#![no_main]
use libfuzzer_sys::fuzz_target;
use psdpack::frames::FrameSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = FrameSet::from_json_str(text) {
        // every accepted frame passes the Stiefel invariant
        for frame in set.frames() {
            assert!(frame.orthonormality_defect() <= 1e-9);
            assert!(frame.sub_dim() <= frame.ambient_dim());
        }
        let back = FrameSet::from_json_str(&set.to_json()).expect("roundtrip parses");
        assert_eq!(set.len(), back.len());
    }
});
