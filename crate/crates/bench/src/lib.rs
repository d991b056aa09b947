//! Benchmark inputs shared by the bench targets.

use bifrac::harness::{corpus, CorpusConfig, CorpusItem, CorpusKind};
use bifrac::GridSpec;

pub fn grid(cells: usize) -> GridSpec {
    GridSpec::new(1, 2.0, cells).expect("power of two")
}

/// The first random-steps item on a 1-D grid with `cells` cells.
pub fn item(cells: usize) -> CorpusItem {
    corpus(
        7,
        CorpusKind::RandomSteps,
        grid(cells),
        1,
        &CorpusConfig::default(),
    )
    .remove(0)
}
