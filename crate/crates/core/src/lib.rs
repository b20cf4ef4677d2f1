//! Harmonic oscillator with a stochastically fluctuating frequency: phase SDE
//! ensembles, stationary Fokker–Planck densities, local S-matrices, vacuum
//! transition probabilities and vacuum thermodynamics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fokker_planck;
pub mod io;
pub mod special;
pub mod stochastic;
pub mod thermo;
pub mod transitions;
pub mod wavefunc;

pub use error::{Error, Result};
