//! Airy functions, Hermite polynomials and quadrature.

pub mod airy;
pub mod hermite;
pub mod quad;

pub use airy::{
    a_p_integral, airy, airy_modulus_sq, ln_a_p_integral, ln_airy_modulus_derivs, ln_airy_modulus_sq,
    ln_laplace_airy, AiryValues, LnModulus, Sign, AIRY_BOUND,
};
pub use hermite::{factorial, gauss_hermite, hermite, hermite_all};
pub use quad::{integrate, integrate_pieces, integrate_sqrt_singular, Domain, Estimate, QuadratureSpec, RayMapping};
