//! Numerical toolkit for the large-time evolution of a nonrelativistic
//! electron embedded in a thermal photon bath.
//!
//! The crate covers the closed-form and quadrature machinery needed to study
//! infrared decoherence of the momentum-space density matrix and the slower
//! kinetic relaxation of the momentum distribution:
//!
//! - [`units`]: natural-unit bookkeeping (ħ = c = 1, energies in eV) and the
//!   characteristic time scales of the two relaxation stages.
//! - [`density_matrix`]: momentum-space density matrices and the closed-form
//!   infrared propagator damping off-diagonal elements.
//! - [`observables`]: effective charge density, Coulomb potential and the
//!   Gauss-law residual of a state.
//! - [`wavepacket`]: Gaussian packet spreading laws, focused packets and the
//!   minimal-uncertainty width.
//! - [`twoslit`]: fringe visibility loss in the two-slit experiment and the
//!   detectability threshold.
//! - [`ir_kernel`]: direct quadrature of the light-cone exponent integrals
//!   g_rs, asymptotic fits, and the factorization / delta identities.
//! - [`kinetics`]: Compton collision kernel, norm-conserving kinetic stepper
//!   and equilibrium diagnostics.
//! - [`gauss_law`]: tree-level effective field with and without the
//!   non-covariant vertex term; divergence residual and the causal front.
//!
//! The crate is `no_std` (with `alloc`); all floating-point transcendentals
//! go through `libm` so results are bit-reproducible across platforms. IO,
//! parallel orchestration and the CLI live in the companion `ebath-lab`
//! crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod density_matrix;
pub mod error;
pub mod fit;
pub mod fourvec;
pub mod gauss_law;
pub mod ir_kernel;
pub mod kinetics;
pub mod math;
pub mod observables;
pub mod quad;
pub mod twoslit;
pub mod units;
pub mod wavepacket;

pub use error::Error;
pub use units::PhysicalParams;

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
