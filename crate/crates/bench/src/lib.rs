//! Benchmarks for the propagator live in `benches/`.
