//! Benchmarks for the mission-mesh pipeline live in `benches/`.
