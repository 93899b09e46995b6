//! Hamiltonian lattice QED in 2+1 dimensions on small periodic lattices.
//!
//! The gauge group U(1) is regularized by Z_{2L+1} and truncated to `l`
//! levels per register. Hamiltonians can be built in the electric basis,
//! where the electric energy is diagonal, or in the Fourier-dual magnetic
//! basis, where the plaquette energy is diagonal.

pub mod analysis;
pub mod basis;
pub mod builder;
pub mod coefficients;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod link;
pub mod model;
pub mod matter;
pub mod mtx;
pub mod operator;
pub mod params;
pub mod scan;
pub mod sparse;
pub mod torus;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{LgtError, Result};
pub use num_complex::Complex64;
pub use params::{CouplingParams, GroupParams, Representation};
