//! Projector frames for reconstructing density matrices of
//! finite-dimensional quantum systems.
//!
//! The crate builds families of rank-1 projector sets (the shift-and-clock
//! mutually unbiased construction in prime dimension among them), classifies
//! them (representative / complete / almost perfect / perfect / mutually
//! unbiased / symmetric), simulates projective measurements, reconstructs
//! states by linear inversion, and decomposes states over tensor-product
//! frames into the explicitly separable form `rho = alpha*rho_s - beta*Id`,
//! with a linear program minimizing `beta`.
//!
//! With the default `parallel` feature the hot loops (shot sampling, overlap
//! scans, measurement-map assembly) run on rayon; disabling it gives a fully
//! sequential build with identical results.

pub mod classify;
pub mod eigen;
pub mod error;
pub mod json;
pub mod matrix;
mod par;
pub mod random;
mod rng;
pub mod separability;
pub mod sets;
pub mod tomography;
pub mod weyl;

pub use error::{Error, ErrorClass, Result};
pub use matrix::{
    matrix_power, projector_of, tensor_product, trace_inner, unit_cell_basis, ComplexMatrix,
    Spectrum, StateVector, DEFAULT_TOL,
};
