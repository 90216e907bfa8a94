//! Criterion benchmarks for `ssp-spectral`; the code lives under `benches/`.
