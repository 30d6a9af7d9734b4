//! Bound states of `-Δ + Σ_j α_j δ(|x| - R_j)` on ℝ³ for concentric spherical shells
//! with constant strengths.
//!
//! The spectrum is found channel by channel: in each angular momentum ℓ the
//! negative eigenvalues `E = -κ²` are the zeros of `det(I + m_ℓ(-κ²) Θ)`
//! ([`boundary`]). Two-shell s-wave closed forms, large-separation expansions and
//! the tunnelling splitting live in [`secular`]; [`oracle`] re-derives every root
//! by transfer matrices for cross-checking. [`solver`] brackets and refines the
//! roots, and [`calibrate`] maps physical interface data onto couplings.

pub mod error;
pub mod model;
pub mod boundary;
pub mod specfun;
pub mod roots;
pub mod secular;
pub mod oracle;
pub mod solver;
pub mod calibrate;

pub use error::{Error, Result};
pub use model::{separation, validate_config, BoundState, Channel, Kappa, ShellConfig};
pub use solver::{enumerate_spectrum, find_channel_roots, splitting_curve, ScanPlan, Spectrum, SplittingReport};
