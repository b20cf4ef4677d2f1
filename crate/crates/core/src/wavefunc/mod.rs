//! Stochastic wave functionals, their ensemble average and local S-matrices.

pub mod frame;
pub mod psi;
pub mod smatrix;

pub use frame::FrameState;
pub use psi::{gram_matrix, psi_br, psi_in, psi_stc, PsiBr, N_MAX};
pub use smatrix::{closed_forms, generating_overlap, s_local, ClosedForms, OverlapForm, SMatrixLocal};
