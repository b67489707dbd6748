//! Criterion benchmarks for trendlab live under `benches/`.
