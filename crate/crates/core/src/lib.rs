//! Numerical toolkit for 2D compressible ideal MHD on domains with corners.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: model corner domains (square, circular sector), grids,
//!   normals, the tangential frame and the corner matrices `h^1`, `h^2`.
//! * [`stencil`], [`field`], [`discrete_calc`]: finite-difference operators,
//!   sampled fields, anisotropic and plain Sobolev norms.
//! * [`elliptic`]: Poisson solvers, Helmholtz decomposition, div-curl
//!   reconstruction and the Hodge-ratio probe.
//! * [`mhd_linear`]: the linearized IBVP solver and its structural
//!   diagnostics.
//! * [`eos`], [`mhd_nonlinear`]: equations of state and the Picard
//!   iteration for the nonlinear system.
//! * [`singularity_lab`]: corner-singularity counterexamples on sectors.
//! * [`data`]: built-in analytic data generators.

pub mod data;
pub mod discrete_calc;
pub mod elliptic;
pub mod eos;
pub mod error;
pub mod field;
pub mod geometry;
pub mod jet;
pub mod mhd_linear;
pub mod mhd_nonlinear;
pub mod singularity_lab;
pub mod stencil;

pub use error::{Error, Result};
pub use field::{Basis, ScalarField, VectorField};
pub use geometry::{make_grid, DomainKind, DomainSpec, Face, Grid};
pub use jet::Jet;
