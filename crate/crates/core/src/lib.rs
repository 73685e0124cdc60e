#![cfg_attr(test, allow(clippy::needless_range_loop))]
//! Asymptotic Gaussian states and photon-number statistics of partially
//! distinguishable single photons (and Gaussian inputs) sent through an
//! unbiased interferometer.
//!
//! The usual pipeline: build a [`GramMatrix`], factor it into an
//! [`InternalFactor`], form [`gamma_of`], assemble the limiting state with
//! [`build_asymptotic`], then extract photon-number statistics from
//! [`photonstats`]. The [`oracle`] module provides exact finite-`n` results.

pub mod asymptotic;
pub mod cli;
pub mod distinguishability;
pub mod error;
pub mod matcore;
pub mod oracle;
pub mod photonstats;
pub mod quadrature;
pub mod reduce;

pub use asymptotic::{
    build_asymptotic, char_fn_asymptotic, char_fn_finite, convergence_sweep, plancherel_distance,
    AsymptoticState, CharacteristicFunction, FiniteOutput, InputKind, InputMoments, PhaseSpacePoint,
    PlancherelOptions,
};
pub use distinguishability::{
    factor_gram, gamma_of, gram_from_states, interpolation_spectrum, validate_gram, GammaMatrix, GramInput,
    GramMatrix, InternalFactor, InterpolationModel, ModelSize, DEFAULT_RANK_TOL,
};
pub use error::{Error, Result};
pub use matcore::{eig_hermitian, ComplexMatrix, HermitianEigen};
pub use oracle::{classical_binomial, exact_output_distribution, tv_distance, unbiased_unitary, OracleConfig};
pub use photonstats::{
    generating_function, moments, pnd_general, pnd_interpolation, pnd_quadrature, pnd_recursive,
    OccupationSpectrum, PhotonNumberDistribution, Truncation,
};

pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
