//! Stationary Fokker–Planck objects in scaled units θ̄ = θ/ε^(1/3):
//! the short-time kernel, Q̄_s, the flux J̄₀f and the spectral counts.

mod kernel;
mod spectral;
mod stationary;

pub use kernel::{transition_kernel, KernelValue};
pub use spectral::{n_e, n_sigma, p_e, spectral_counts, SpectralCounts};
pub use stationary::{
    flux_residual, flux_scaled, flux_scaled_quadrature, integrate_line, ln_flux_scaled, stationary_density,
    stationary_density_derivative, StationaryDist,
};
