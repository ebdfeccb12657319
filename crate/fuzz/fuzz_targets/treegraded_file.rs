#![no_main]

use cayleylab::treegraded::TreeGradedGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = TreeGradedGraph::parse(s) {
        if g.vertex_count() <= 64 && g.verify_axioms().pass {
            for m in 0..g.pieces().len() {
                for x in 0..g.vertex_count() {
                    g.project_to_piece(x, m).unwrap();
                }
            }
        }
    }
});
