//! Dimension theory of Bedford-McMullen carpets whose digit maps may
//! reflect either coordinate.
//!
//! - [`carpet`]: carpet descriptions, exact cylinder geometry, chaos-game
//!   sampling.
//! - [`dimension`]: row profiles, entropies, the closed-form Hausdorff
//!   dimension, Ledrappier-Young dimension of Bernoulli measures and the
//!   optimal weights.
//! - [`numopt`]: numerical re-derivation of the optimal weights.
//! - [`boxlab`]: exact and sampled box counting, slope fits and partition
//!   entropies.
//! - [`cli`]: file formats, rendering, the invariance experiment and the
//!   command-line driver.

pub mod boxlab;
pub mod carpet;
pub mod cli;
pub mod dimension;
pub mod numopt;

pub use carpet::{reference_carpet, validate_spec, CarpetSpec, Digit, RawDigit, RawSpec, Sign};
pub use dimension::{hausdorff_dimension, ly_dimension, optimal_weights, row_profile, Weights};
