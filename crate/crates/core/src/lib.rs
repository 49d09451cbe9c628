//! Causal, retarded and advanced Green operators for `d_t^2 + A` on the
//! half-space `R+ x R^n`, where the self-adjoint realization of `A` is
//! selected by a boundary condition through a boundary triple.
//!
//! The crate is organised in layers:
//!
//! * [`model`] — geometry, boundary conditions, warped profiles and the
//!   conformal reduction of a static metric to `d_t^2 + A`;
//! * [`triple`] — trace maps, Green's identity, Weyl function and the
//!   spectral test for extensions;
//! * [`spectral`] — eigenfunction expansions per transverse mode;
//! * [`propagator`] — functional calculus for the wave propagators;
//! * [`oracle`] — independent finite-difference and closed-form references;
//! * [`verify`] — energy, causality, boundary and exact-sequence checks.
//!
//! All numerical code is generic over the scalar (`f32` or `f64`); the
//! `*64` aliases below fix it to `f64`.

// `!(x > 0)` is used on purpose throughout: unlike `x <= 0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod model;
pub mod oracle;
pub mod propagator;
pub mod scalar;
pub mod special;
pub mod spectral;
pub mod suite;
pub mod triple;
pub mod verify;

pub use error::{Error, Result, Warning};
pub use grid::Grid1;
pub use model::{
    assemble_a_potential, conformal_factors, mode_problem, BoundaryCondition, HalfSpaceModel,
    ModeCondition, ModeProblem, Symbol, WarpedProfile,
};
pub use oracle::{assemble_fd, fd_spectrum, images_kernel, leapfrog, FdKind, FdSystem, Trajectory};
pub use propagator::{
    apply_advanced, apply_causal, apply_retarded, causal_kernel, conformal_wrap, evolve_cauchy,
    propagation_factor, wentzell_apply, ExtendedState, KernelGrid, SpaceTimeField,
};
pub use scalar::Real;
pub use spectral::{
    bound_state, completeness_residual, resolve, robin_continuum_mode, wentzell_mode, Basis,
    BoundState, Family, Quadrature, SineTransform, SpectralResolution, WentzellMode, Window,
};
pub use triple::{
    cayley_unitary, deficiency_decay, extension_membership, greens_identity_residual,
    lower_bound_estimate, spectrum_scan, spectrum_test, weyl_function, BoundaryTraces, KRange,
    TraceMaps, Verdict, WeylValue,
};
pub use verify::{
    bc_residual, causality_report, energy, exact_sequence_residuals, gronwall_check, EnergyReport,
};

pub type HalfSpaceModel64 = HalfSpaceModel<f64>;
pub type BoundaryCondition64 = BoundaryCondition<f64>;
pub type WarpedProfile64 = WarpedProfile<f64>;
pub type Quadrature64 = Quadrature<f64>;
pub type SpectralResolution64 = SpectralResolution<f64>;
pub type KernelGrid64 = KernelGrid<f64>;
pub type SpaceTimeField64 = SpaceTimeField<f64>;
pub type FdSystem64 = FdSystem<f64>;
pub type Grid64 = Grid1<f64>;
