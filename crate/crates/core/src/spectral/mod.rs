//! Periodic grids, discrete Fourier transforms, spectral differential
//! operators and the compressible/incompressible projectors.
//!
//! Forward transforms are unscaled; inverse transforms divide by the node
//! count.

mod fft;
mod field;
mod grid;
pub mod io;
pub mod ops;
pub mod random;

pub use field::{Field, Spectrum, VectorField};
pub use grid::Grid;
pub use ops::{
    curl, derivative, divergence, forward_transform, gradient, hessian, inverse_transform,
    jacobian, laplacian, project_p, project_q, vector_laplacian,
};
