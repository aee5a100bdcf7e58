//! Criterion benchmarks for the `grav-core` hot paths; see `benches/`.
