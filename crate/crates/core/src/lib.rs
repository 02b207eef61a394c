//! Discrete q-ultraspherical polynomials, their duals, and numerical
//! certification of the su_q(1,1) operator whose eigenvectors they encode.
//!
//! The crate is layered bottom-up:
//!
//! - [`qseries`]: q-Pochhammer symbols, terminating ₃φ₂ sums, compensated
//!   summation and log-scaled reals.
//! - [`ultraspherical`]: the polynomial family C̃ₙ⁽ᶜ⁾(x;q), the dual family
//!   D̃ₙ, special values and the q-difference equation.
//! - [`repops`]: the Jacobi matrix of the operator `I`, eigenvector
//!   coefficients, the diagonal operator `J`, normalization constants and
//!   the candidate unitary frame.
//! - [`spectral`]: Sturm-bisection eigensolver and spectral-measure
//!   extraction for symmetric tridiagonal matrices.
//! - [`verify`]: orthogonality sums, norm identities and the discrepancy
//!   ledger, aggregated into a [`verify::CertificationReport`].

pub mod error;
pub mod qseries;
pub mod repops;
pub mod spectral;
pub mod ultraspherical;
pub mod verify;

pub use error::{Error, Result};
pub use qseries::{LogScaledReal, SeriesTolerance};
pub use repops::RepParams;
pub use ultraspherical::{FamilyParams, Method, Node, SpectralPoint};

#[cfg(test)]
mod properties;
