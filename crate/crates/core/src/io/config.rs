//! TOML run configuration and tooth-set manifests. Every length key names
//! its unit.
//!
//! ```toml
//! [gear]
//! module_mm = 1.814
//! teeth = 86
//! pressure_angle_deg = 20.0
//! face_width_mm = 6.3
//!
//! [hob]
//! diameter_mm = 70.0
//! flutes = 14
//! starts = 1
//! fa_mm_per_rev = 2.0
//!
//! [simulation]
//! grid_nu = 500
//! grid_nv = 500
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::text::read_heightmap;
use crate::accuracy::{DeviationOptions, FlankData, FlankSurface, ToothData, ToothSet};
use crate::error::{Error, Result};
use crate::geometry::{FlankSide, GearSpec, HobSpec, ShaperSpec, Tool};
use crate::sim::GenerationParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GearSection {
    pub module_mm: f64,
    pub teeth: u32,
    #[serde(default = "default_pressure_angle")]
    pub pressure_angle_deg: f64,
    pub face_width_mm: f64,
}

fn default_pressure_angle() -> f64 {
    crate::geometry::DEFAULT_PRESSURE_ANGLE_DEG
}

impl GearSection {
    pub fn spec(&self) -> Result<GearSpec> {
        GearSpec::new(self.module_mm, self.teeth, self.pressure_angle_deg, self.face_width_mm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HobSection {
    pub diameter_mm: f64,
    pub flutes: u32,
    #[serde(default = "one")]
    pub starts: u32,
    pub fa_mm_per_rev: f64,
    pub tip_rounding_mm: Option<f64>,
    #[serde(default)]
    pub protuberance: bool,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShaperSection {
    pub teeth: u32,
    pub double_strokes_per_pitch: u32,
    pub tip_rounding_mm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(default)]
    pub side: Option<FlankSide>,
    /// Wheel rotation per stroke; defaults to the tool's own step.
    pub step_deg: Option<f64>,
    pub grid_nu: Option<usize>,
    pub grid_nv: Option<usize>,
    pub margin_strokes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub lc_mm: Option<f64>,
    pub profile_form: Option<String>,
    pub areal_form: Option<String>,
    pub slope_points: Option<u32>,
    pub decay_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gear: GearSection,
    pub hob: Option<HobSection>,
    pub shaper: Option<ShaperSection>,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hob,
    Fellows,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hob" => Ok(Method::Hob),
            "fellows" => Ok(Method::Fellows),
            other => Err(Error::InvalidParams(format!("unknown method '{other}', use hob or fellows"))),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn gear(&self) -> Result<GearSpec> {
        self.gear.spec()
    }

    pub fn tool(&self, method: Method) -> Result<Tool> {
        let gear = self.gear()?;
        match method {
            Method::Hob => {
                let h = self.hob.ok_or_else(|| Error::Config("method hob needs a [hob] section".into()))?;
                let mut hob = HobSpec::new(&gear, h.diameter_mm, h.flutes, h.starts, h.fa_mm_per_rev)?;
                if let Some(r) = h.tip_rounding_mm {
                    hob.tip_rounding = r;
                }
                hob.protuberance_enabled = h.protuberance;
                hob.validate()?;
                Ok(Tool::Hob(hob))
            }
            Method::Fellows => {
                let s = self
                    .shaper
                    .ok_or_else(|| Error::Config("method fellows needs a [shaper] section".into()))?;
                let mut sh = ShaperSpec::new(&gear, s.teeth, s.double_strokes_per_pitch)?;
                if let Some(r) = s.tip_rounding_mm {
                    sh.tip_rounding = r;
                }
                sh.validate()?;
                Ok(Tool::Shaper(sh))
            }
        }
    }

    pub fn params(&self, tool: &Tool) -> Result<GenerationParams> {
        let gear = self.gear()?;
        let s = &self.simulation;
        let mut p = GenerationParams::for_tool(&gear, tool);
        if let Some(step) = s.step_deg {
            p = p.with_step(step);
        }
        p = p.with_grid(s.grid_nu.unwrap_or(p.grid_nu), s.grid_nv.unwrap_or(p.grid_nv));
        if let Some(m) = s.margin_strokes {
            p.passes_margin = m;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn side(&self) -> FlankSide {
        self.simulation.side.unwrap_or(FlankSide::Drive)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToothEntry {
    pub index: usize,
    #[serde(default)]
    pub drive_offset_um: f64,
    #[serde(default)]
    pub non_drive_offset_um: f64,
    /// Heightmap files, relative to the manifest.
    pub drive_map: Option<PathBuf>,
    pub non_drive_map: Option<PathBuf>,
    /// Flanks with no data: "drive" and/or "non-drive".
    #[serde(default)]
    pub missing: Vec<FlankSide>,
}

/// `toothset.toml` in a tooth-set directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToothSetManifest {
    pub gear: GearSection,
    pub reference_radius_mm: Option<f64>,
    pub eccentricity_um: Option<[f64; 2]>,
    pub probe_diameter_mm: Option<f64>,
    pub eval_range: Option<[f64; 2]>,
    /// Unlisted teeth are nominal when set; otherwise every tooth must be
    /// listed.
    #[serde(default)]
    pub fill_nominal: bool,
    #[serde(default, rename = "tooth")]
    pub teeth: Vec<ToothEntry>,
}

pub const TOOTHSET_MANIFEST: &str = "toothset.toml";

impl ToothSetManifest {
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let path = dir.join(TOOTHSET_MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        let path = dir.join(TOOTHSET_MANIFEST);
        let text = toml::to_string(self).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    pub fn options(&self, gear: &GearSpec) -> DeviationOptions {
        let mut o = DeviationOptions::for_gear(gear);
        if let Some(d) = self.probe_diameter_mm {
            o.probe_diameter_mm = d;
        }
        if let Some([a, b]) = self.eval_range {
            o.eval_range = (a, b);
        }
        o
    }

    /// Builds the tooth set, loading flank maps relative to `dir`.
    pub fn load(&self, dir: &Path) -> Result<ToothSet> {
        let gear = self.gear.spec()?;
        let z = gear.tooth_count_z2 as usize;
        let mut slots: Vec<Option<ToothData>> = vec![None; z];
        for e in &self.teeth {
            if e.index >= z {
                return Err(Error::Config(format!("tooth index {} outside 0..{z}", e.index)));
            }
            if slots[e.index].is_some() {
                return Err(Error::Config(format!("tooth {} listed twice", e.index)));
            }
            let flank = |side: FlankSide, offset: f64, map: &Option<PathBuf>| -> Result<Option<FlankData>> {
                if e.missing.contains(&side) {
                    return Ok(None);
                }
                let surface = match map {
                    Some(p) => Some(FlankSurface::Grid(read_heightmap(&dir.join(p))?)),
                    None => None,
                };
                Ok(Some(FlankData { offset_um: offset, surface }))
            };
            slots[e.index] = Some(ToothData {
                index: e.index,
                drive: flank(FlankSide::Drive, e.drive_offset_um, &e.drive_map)?,
                non_drive: flank(FlankSide::NonDrive, e.non_drive_offset_um, &e.non_drive_map)?,
            });
        }
        let teeth = slots
            .into_iter()
            .enumerate()
            .map(|(i, t)| match t {
                Some(t) => Ok(t),
                None if self.fill_nominal => Ok(ToothData::nominal(i)),
                None => Err(Error::InsufficientData(format!("tooth {i} is missing from the manifest"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut set = ToothSet::new(gear, teeth)?;
        if let Some(r) = self.reference_radius_mm {
            set = set.with_reference_radius(r)?;
        }
        if let Some([ex, ey]) = self.eccentricity_um {
            set = set.with_eccentricity(ex, ey);
        }
        Ok(set)
    }
}
