//! Criterion benchmarks for trajscore; see `benches/`.
