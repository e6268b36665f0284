//! Benchmark harness: test matrices, Matrix Market files, experiment
//! configuration and drivers.

pub mod config;
pub mod experiment;
pub mod generate;
pub mod mtx;

pub use config::{Experiment, ExperimentConfig, MatrixSource, Method, SketchSpec, DEFAULT_SEED};
pub use experiment::{
    run_and_write, run_experiment, start_block, write_block_qr, CsvRow, ExperimentOutcome, EXIT_CERT_FAILED,
    EXIT_ERROR, EXIT_OK, GATE_THRESHOLD,
};
pub use generate::{gen_laplacian, gen_synthetic, laplacian_eigenvalues, parametric_function};
pub use mtx::{format_array, format_coordinate, parse_matrix_market, read_matrix_market, write_array, write_coordinate, MtxMatrix};
