//! Two-mode Bose-Hubbard dimer: the geometry of its mean-field orbits as
//! sphere–cylinder intersection curves, the areas they enclose, the
//! pendulum form of the dynamics, the exact N-particle spectrum and its
//! semiclassical quantization.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod action;
pub mod error;
pub mod geometry;
pub mod meanfield;
pub mod ode;
pub mod oracles;
pub mod quad;
pub mod quantum;
pub mod semiclassics;
pub mod specfun;
pub mod tridiag;

pub use error::{Error, Result};
