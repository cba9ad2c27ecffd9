//! Closed-form profiles and their invariants.
//!
//! Submodule map:
//! - [`bubble`]: flat and multi-peak profiles, gradients, peak locations.
//! - [`integrals`]: mass quantization and the vanishing parameter-derivative
//!   integrals, via adaptive quadrature.
//! - [`kernel`]: the radial linearized operator at the flat bubble, its
//!   bounded and growing solutions, and inhomogeneous radial solves.
//! - [`roots`]: unit-modulus root configurations, their logarithmic energy,
//!   and splitting a profile into singular and locally harmonic parts.

pub mod bubble;
pub mod integrals;
pub mod kernel;
pub mod roots;

pub use bubble::{
    far_field_value, flat_profile, profile_residual, BubbleParams, CoreOffset, PerturbedProfile,
    ProfileError,
};
pub use integrals::{bubble_mass, core_mass, integral_identity, IdentityKind, IdentityValue};
pub use kernel::{
    kernel_basis, second_radial_solution, solve_radial_projection, KernelBasis, KernelError,
    RadialFunction,
};
pub use roots::{local_harmonic_part, roots_log_identity, RootConfiguration, RootsError};
