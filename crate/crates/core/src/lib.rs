//! Numerical engine for the time-dependent harmonic oscillator and the
//! Paul trap.
//!
//! The pipeline runs from the drive Ω(t) to the complex mode function ε(t),
//! the time-dependent ladder operators `A(t) = μa + νa†`, the Gaussian
//! coherent states they generate, and their reinterpretation as squeezed
//! states of the static oscillator. The [`fock`] module checks the operator
//! identities behind that reinterpretation by brute-force matrix arithmetic.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod floquet;
pub mod fock;
pub mod gaussian;
pub mod integrator;
pub mod ladder;
pub mod mode;
pub mod trap;

pub use error::{Error, Result};
pub use floquet::{floquet_stability, Stability, StabilityVerdict};
pub use gaussian::{
    coherent_state, evaluate_wavefunction, moments, muss_residual, squeeze_factor,
    uncertainty_products, GaussianState, GridPolicy, MomentSet, UncertaintyProducts, UniformGrid,
};
pub use ladder::{
    bch_gamma, bogoliubov_decompose, displacement_map, ladder_coeffs, quadrature_coeffs,
    transform_uv, BchGamma, LadderCoeffs, QuadratureCoeffs, SqueezeParams,
};
pub use mode::{classical_trajectory, integrate_epsilon, wronskian, ModeSample, ModeSolution};
pub use trap::{mathieu_params, omega_profile, Axis, Drive, TrapConfig};
