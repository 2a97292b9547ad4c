//! Benchmark harness; the benchmarks live in the `benches` directory.
