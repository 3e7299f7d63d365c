//! Criterion benchmarks live under `benches/`; this library only hosts the
//! shared fixture loader.

use passage_prm_core::fixtures::{self, MapSpec};

/// Builds a committed fixture, panicking on an unknown id.
pub fn fixture(id: &str) -> MapSpec {
    fixtures::build(id).unwrap_or_else(|e| panic!("fixture {id}: {e}"))
}
