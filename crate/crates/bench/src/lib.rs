//! Criterion benchmarks for lafair live in `benches/`.
