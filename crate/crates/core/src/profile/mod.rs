//! Profile (1D) surface-texture metrology.
//!
//! All heights are in μm and all lateral lengths in μm, except filter
//! cutoffs, which follow the usual convention and are given in mm.

mod conregular;
mod filter;
mod form;
mod material;
mod params;
mod spectrum;

pub use conregular::{conregular_analysis, ConregularResult, SegmentClass, SegmentStats};
pub use filter::{exact_split, gaussian_filter, gaussian_kernel, FilteredProfile, GAUSS_ALPHA};
pub(crate) use filter::smooth;
pub use form::{fit_reference, fit_reference_detailed, FormFit, ReferenceForm};
pub use material::{
    material_curve_analysis, material_curve_from_samples, probability_family, secant_family,
    three_parameter_fit, MaterialAnalysis, MaterialRatioCurve, ProbabilityFamily, SecantFamily,
    ThreeParameterFit,
};
pub use params::{
    amplitude_params, kalpha, local_peaks, peak_params, slope_params, spacing_params,
    AmplitudeParams, AnisotropyResult, PeakParams, SlopeParams, SlopeStencil, SpacingParams,
};
pub use spectrum::{acf_analysis, cumulated_knee, psd_analysis, AcfResult, PsdResult, SpectrumSeries};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_PROFILE_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Primitive,
    Roughness,
    Waviness,
}

impl ProfileKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileKind::Primitive => "primitive",
            ProfileKind::Roughness => "roughness",
            ProfileKind::Waviness => "waviness",
        }
    }
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primitive" => Ok(ProfileKind::Primitive),
            "roughness" => Ok(ProfileKind::Roughness),
            "waviness" => Ok(ProfileKind::Waviness),
            other => Err(Error::InvalidParams(format!("unknown profile kind '{other}'"))),
        }
    }
}

/// Uniformly sampled height trace `z(x)`, heights in μm, step in μm.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    z: Vec<f64>,
    dx: f64,
    kind: ProfileKind,
}

impl Profile {
    pub fn new(z: Vec<f64>, dx: f64, kind: ProfileKind) -> Result<Self> {
        if z.len() < MIN_PROFILE_SAMPLES {
            return Err(Error::InsufficientData(format!(
                "profile needs at least {MIN_PROFILE_SAMPLES} samples, got {}",
                z.len()
            )));
        }
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::InvalidParams(format!("sampling step must be positive, got {dx}")));
        }
        if let Some(i) = z.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite ordinate at sample {i}")));
        }
        Ok(Self { z, dx, kind })
    }

    pub fn primitive(z: Vec<f64>, dx: f64) -> Result<Self> {
        Self::new(z, dx, ProfileKind::Primitive)
    }

    /// Samples `f(x)` at `x = i·dx` for `i < n`.
    pub fn from_fn(n: usize, dx: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::primitive((0..n).map(|i| f(i as f64 * dx)).collect(), dx)
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Trace length `(n − 1)·dx` in μm.
    pub fn length(&self) -> f64 {
        (self.z.len() - 1) as f64 * self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn mean(&self) -> f64 {
        mean(&self.z)
    }

    pub fn with_kind(mut self, kind: ProfileKind) -> Self {
        self.kind = kind;
        self
    }

    pub(crate) fn with_z(&self, z: Vec<f64>) -> Self {
        Self {
            z,
            dx: self.dx,
            kind: self.kind,
        }
    }

    /// Ordinates relative to the mean line.
    pub fn centered(&self) -> Vec<f64> {
        let m = self.mean();
        self.z.iter().map(|v| v - m).collect()
    }

    /// Linear resampling onto a new step, keeping the trace start.
    pub fn resample(&self, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidParams(format!("resampling step must be positive, got {step}")));
        }
        let n = (self.length() / step).floor() as usize + 1;
        let z = (0..n)
            .map(|i| {
                let pos = i as f64 * step / self.dx;
                let j = (pos.floor() as usize).min(self.z.len() - 2);
                let t = pos - j as f64;
                self.z[j] * (1.0 - t) + self.z[j + 1] * t
            })
            .collect();
        Self::new(z, step, self.kind)
    }
}

pub(crate) fn mean(z: &[f64]) -> f64 {
    z.iter().sum::<f64>() / z.len() as f64
}

pub(crate) fn variance(z: &[f64]) -> f64 {
    let m = mean(z);
    z.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / z.len() as f64
}
