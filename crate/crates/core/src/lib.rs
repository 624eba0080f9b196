//! Virtual gear generation and tooth-flank surface metrology.
//!
//! The crate simulates straight spur gear flanks produced by hobbing and by
//! Fellows shaping as discrete envelopes of tool passes, then characterises
//! the resulting (or measured) flanks with profile and areal surface-texture
//! parameters and gear accuracy deviations.
//!
//! Module map:
//!
//! - [`geometry`]: gear and tool specs, involute helpers, closed-form
//!   kinematic deviation estimates for hobbing.
//! - [`sim`]: pass planning, per-pass clearance and the min-envelope over a
//!   flank grid.
//! - [`profile`]: 1D metrology (form removal, Gaussian filter, amplitude,
//!   spacing, slope, peak, ACF, PSD, material ratio, anisotropy, conregular).
//! - [`areal`]: 3D metrology over heightmaps.
//! - [`accuracy`]: profile, helix, pitch, runout and thickness deviations.
//! - [`io`]: text file formats, reports, plot series, config, comparison.

pub mod accuracy;
pub mod areal;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod profile;
pub mod sim;

pub(crate) mod linalg;
pub(crate) mod spectral;

pub use error::{Error, Result};
