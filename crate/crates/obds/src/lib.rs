//! Removal of oblique (non-axis-aligned) stripe noise from single-band
//! raster imagery.
//!
//! Stripe noise in pushbroom and whiskbroom sensors is usually modeled as
//! strictly horizontal or vertical, but geometric correction and resampling
//! leave stripes at arbitrary angles where axis-aligned destriping methods
//! break down. This crate estimates the stripe orientation from the Fourier
//! spectrum of a background-suppressed residual, then separates the stripe
//! layer from the image by minimizing a convex objective that combines
//! isotropic total variation on the image, an oriented-variation penalty on
//! the stripe layer along the estimated direction, and an l1 penalty on the
//! stripe magnitudes. The minimization runs as an ADMM splitting with a
//! closed-form FFT step for the image update.
//!
//! The pieces are usable on their own:
//!
//! - [`image`](crate::image): the dense [`Image`] grid, periodic directional
//!   difference operators, their adjoints and spectra, and interior-crop
//!   rotation.
//! - [`guided`]: self-guided edge-preserving filtering and background
//!   elimination.
//! - [`orientation`]: candidate direction enumeration and spectral stripe
//!   angle estimation.
//! - [`solver`]: the ADMM decomposition returning image and stripe layers
//!   plus a per-iteration trace.
//! - [`metrics`]: MAE / PSNR / SSIM and the non-reference ICV / MRD window
//!   metrics.
//! - [`simulator`]: seeded synthetic stripe generation and oblique
//!   rotation of aligned degraded/truth pairs.
//!
//! See the `examples/` directory for one runnable program per capability,
//! and the `obds` binary for a batch-friendly command line front end.

pub mod cli;
pub mod error;
pub mod fft;
pub mod guided;
pub mod image;
pub mod io;
pub mod metrics;
pub mod orientation;
pub mod simulator;
pub mod solver;

pub use error::{Error, Result};
pub use image::{Image, Interpolation, OffsetOperator};
pub use orientation::{CandidateDirection, OrientationEstimate};
pub use solver::{DestripeResult, SolverParams};
