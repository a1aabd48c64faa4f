//! Dense symmetric matrices, the Jacobi eigensolver, functional calculus and
//! Loewner-order predicates.

mod calculus;
mod eigen;
mod interval;
mod matrix;
pub mod text;

pub use calculus::{
    block2_psd, block2_slack, lambda_min, loewner_leq, matrix_function, operator_norm, spectrum_in, LoewnerCheck,
    SpectralFn,
};
pub use eigen::{spectral_decompose, SpectralDecomposition, MAX_SWEEPS};
pub use interval::Interval;
pub use matrix::{Matrix, SymMatrix};
pub use text::{format_matrix, parse_matrix, read_matrix_file, write_matrix_file};
