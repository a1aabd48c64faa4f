//! Weighted operator geometric means, spectral functional calculus and
//! matrix-valued quadrature, together with a registry of Hermite-Hadamard
//! type operator inequalities and the machinery to check them on random
//! positive-definite inputs.
//!
//! The numerical core is generic over [`Real`] (`f32`, `f64`); the aliases
//! below fix the common `f64` instantiation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod chains;
pub mod error;
pub mod funcat;
pub mod gen;
pub mod linalg;
pub mod means;
pub mod quad;
pub mod scalar;

pub use chains::{chain, check_chain, registry, ChainReport, ChainSpec, Env, Verdict};
pub use error::{Error, Result};
pub use funcat::{catalogue_fn, FnFlag, PositiveLinearMap, ScalarFn};
pub use linalg::{Interval, Matrix, SpectralDecomposition, SymMatrix};
pub use means::{gmean, gmean_t, GeodesicPath};
pub use quad::QuadratureSpec;
pub use scalar::Real;

pub type Mat = SymMatrix<f64>;
pub type Mat32 = SymMatrix<f32>;
pub type Spectral = SpectralDecomposition<f64>;
pub type Quad = QuadratureSpec<f64>;
pub type Fn64 = ScalarFn<f64>;
pub type Gen = gen::GenConfig<f64>;
