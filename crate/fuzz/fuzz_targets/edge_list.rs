#![no_main]
use libfuzzer_sys::fuzz_target;
use psdpack::generators::{chordal_frames, parse_edge_list, verify_chordal};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok((n, edges)) = parse_edge_list(text) else { return };
    // chordality verification is cubic-ish in the worst case; bound the work
    if n > 64 || edges.len() > 512 {
        return;
    }
    match verify_chordal(n, &edges) {
        Ok(graph) => {
            let set = chordal_frames(&graph).expect("cliques make valid frames");
            assert_eq!(set.len(), graph.maximal_cliques().len());
            // every edge is covered by some clique
            for &(u, v) in graph.edges() {
                assert!(graph
                    .maximal_cliques()
                    .iter()
                    .any(|c| c.contains(&u) && c.contains(&v)));
            }
        }
        Err(psdpack::Error::NotChordal { cycle }) => {
            assert!(cycle.len() >= 4);
        }
        Err(psdpack::Error::InvalidArgument(_)) => {}
        Err(other) => panic!("unexpected error: {other:?}"),
    }
});
