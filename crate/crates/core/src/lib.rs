//! Numerical laboratory for the singular Liouville equation
//! Δu + |y|^{2N} H(y) e^u = 0 on planar disks, built around concentrating solutions that carry N+1
//! simultaneous peaks on a small ring. The crate provides
//!
//! - exact multi-peak profiles and their conserved integrals ([`profiles`]),
//! - Green's functions and harmonic extensions on disks ([`green`]),
//! - graded polar grids, band factorization and a damped Newton continuation
//!   solver for the full nonlinear problem ([`grid`], [`solver`]),
//! - diagnostics that measure how far a computed solution is from the profile
//!   family: peak detection, Harnack-type deficits, Pohozaev balances and
//!   vanishing-rate fits ([`diagnostics`]).
//!
//! Everything is deterministic: given identical inputs and thread-independent
//! settings, every routine reproduces bitwise identical output.

pub mod coefficient;
pub mod expr;
pub mod green;
pub mod grid;
pub mod ode;
pub mod profiles;
pub mod quad;
pub mod solver;

pub use num_complex::Complex64;

/// A scalar field on the plane with an evaluable gradient.
///
/// Implementors promise `gradient` is the true derivative of `value` (up to
/// roundoff), so consumers may mix the two in integrals without consistency
/// checks.
pub trait SmoothField {
    fn value(&self, y: Complex64) -> f64;
    /// Gradient as a complex number, (∂_1 f) + i (∂_2 f).
    fn gradient(&self, y: Complex64) -> Complex64;
}
