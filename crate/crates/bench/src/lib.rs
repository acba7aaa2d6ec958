//! Criterion benchmarks for `ratfourier-core`; see `benches/`.
