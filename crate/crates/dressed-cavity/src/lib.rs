//! Time evolution of a harmonic oscillator linearly coupled to the field
//! modes of a perfectly reflecting spherical cavity.
//!
//! The coupled oscillator-field system is diagonalized exactly: the normal
//! frequencies are roots of a cotangent transcendental equation, and the
//! principal-axis transformation gives the survival amplitude `f00(t)` of the
//! first excited level of the physical (dressed) oscillator. From `f00(t)`
//! the crate builds the reduced 2x2 density matrix of an initial
//! superposition of the ground and first excited levels, together with its
//! impurity `D = 1 - Tr(rho^2)`.
//!
//! Three evaluation routes are provided and cross-validated against each
//! other:
//!
//! - [`spectrum`] + [`coupling`] + [`evolution`]: exact mode summation over a
//!   finite truncation of the discrete cavity spectrum;
//! - [`continuum`]: the infinite-cavity limit, with closed forms for the real
//!   part of `f00` and oscillatory quadrature for the imaginary part;
//! - [`small_cavity`]: the small-cavity expansion in `delta = g R / (pi c)`,
//!   including the analytic lower bound that shows the system is not
//!   dissipative in that regime.
//!
//! All computations are deterministic: fixed summation orders, compensated
//! accumulation for the long oscillatory sums, and bracketed root refinement.
//! The crate is `no_std`-compatible (with `alloc`): disable default features
//! and enable `libm` to build without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("dressed-cavity requires either the `std` or the `libm` feature");

pub mod config;
pub mod continuum;
pub mod coupling;
pub mod evolution;
pub mod small_cavity;
pub mod spectrum;

mod math;
mod quad;
mod sum;

pub use num_complex::Complex64;

pub use config::{CavityConfig, ConfigError};
pub use continuum::{
    classify_regime, f00_continuum, f00_real_closed, g_asymptotic, g_integral, AsymptoticState,
    ContinuumError, KappaRegime, QuadratureReport, Regime,
};
pub use coupling::{
    alpha_matrix, build_couplings, overlap_coefficient, AlphaMatrix, CouplingError, CouplingTable,
};
pub use evolution::{
    f00_mode_sum, f_amplitude, impurity_identity_check, reduced_density, AmplitudeMethod,
    EvolutionError, ReducedState, SuperpositionSpec, SurvivalAmplitude,
};
pub use small_cavity::{
    dissipation_classifier, f00_small, rho11_lower_bound, rho11_small, Classification, Evidence,
    SmallCavityModel, Verdict,
};
pub use spectrum::{solve_spectrum, small_cavity_spectrum, Spectrum, SpectrumError, SpectrumMethod};
