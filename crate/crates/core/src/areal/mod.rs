//! Areal (3D) surface-texture metrology over heightmaps.
//!
//! Maps are row-major `ny × nx`; `x` runs along the face width (helix) and
//! `y` along the tooth height (profile). Heights and steps are in μm.

mod form;
mod params;
mod texture;

use std::collections::BTreeMap;

pub use form::{remove_form_areal, ArealForm};
pub use params::{
    areal_height_params, areal_material_params, gaussian_filter_areal, hybrid_params, summit_params, summits,
    volume_params, ArealFiltered, ArealMaterialParams, HeightParams, HybridParams, Summit, SummitParams,
    VolumeParams,
};
pub use texture::{
    areal_acf, areal_psd_params, fractal_dimension, texture_params, ArealPsd, TextureParams, DEFAULT_DECAY_THRESHOLD,
};

use crate::error::{Error, Result};

pub const MIN_MAP_SIDE: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Heightmap {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    /// Heights, `z[iy * nx + ix]`.
    pub z: Vec<f64>,
    /// Free-form `key=value` annotations carried through file round trips.
    pub metadata: BTreeMap<String, String>,
}

impl Heightmap {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, z: Vec<f64>) -> Result<Self> {
        if nx < MIN_MAP_SIDE || ny < MIN_MAP_SIDE {
            return Err(Error::InsufficientData(format!(
                "heightmap must be at least {MIN_MAP_SIDE}x{MIN_MAP_SIDE}, got {nx}x{ny}"
            )));
        }
        if !(dx > 0.0 && dy > 0.0) || !dx.is_finite() || !dy.is_finite() {
            return Err(Error::InvalidParams(format!("steps must be positive, got dx={dx} dy={dy}")));
        }
        if z.len() != nx * ny {
            return Err(Error::InvalidParams(format!(
                "expected {} heights for {nx}x{ny}, got {}",
                nx * ny,
                z.len()
            )));
        }
        if let Some(i) = z.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite height at row {}, column {}",
                i / nx,
                i % nx
            )));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            z,
            metadata: BTreeMap::new(),
        })
    }

    /// Samples `f(x, y)` at `(ix·dx, iy·dy)`.
    pub fn from_fn(nx: usize, ny: usize, dx: f64, dy: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut z = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                z.push(f(ix as f64 * dx, iy as f64 * dy));
            }
        }
        Self::new(nx, ny, dx, dy, z)
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.z[iy * self.nx + ix]
    }

    pub fn row(&self, iy: usize) -> &[f64] {
        &self.z[iy * self.nx..(iy + 1) * self.nx]
    }

    pub fn column(&self, ix: usize) -> Vec<f64> {
        (0..self.ny).map(|iy| self.at(ix, iy)).collect()
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn mean(&self) -> f64 {
        crate::profile::mean(&self.z)
    }

    pub(crate) fn with_z(&self, z: Vec<f64>) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            dx: self.dx,
            dy: self.dy,
            z,
            metadata: self.metadata.clone(),
        }
    }

    /// Heights relative to the mean plane level.
    pub fn centered(&self) -> Vec<f64> {
        let m = self.mean();
        self.z.iter().map(|v| v - m).collect()
    }

    /// Quarter turn: the old `y` axis becomes the new `x` axis.
    pub fn rotate90(&self) -> Self {
        let (nx, ny) = (self.ny, self.nx);
        let mut z = Vec::with_capacity(self.z.len());
        for r in 0..ny {
            for c in 0..nx {
                z.push(self.at(self.nx - 1 - r, c));
            }
        }
        Self {
            nx,
            ny,
            dx: self.dy,
            dy: self.dx,
            z,
            metadata: self.metadata.clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.with_z(self.z.iter().map(|v| v * s).collect())
    }
}
