//! Criterion benchmarks for the fitting and quadrature kernels; see `benches/`.
