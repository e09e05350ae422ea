//! Library side of the `hades` binary: synthetic dataset generation and CSV
//! ingestion, the per-operation benchmark driver, and the frequency-analysis
//! statistical suite. The binary in `main.rs` is a thin clap layer over
//! these and over `hades_core`.

pub mod bench;
pub mod dataset;
pub mod fatest;
