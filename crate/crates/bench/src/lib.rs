//! Criterion benchmarks for the search pipeline; see `benches/pipeline.rs`.
