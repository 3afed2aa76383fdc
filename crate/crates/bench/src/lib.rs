//! Criterion benchmarks for the simulator and the estimators; see `benches/`.
