//! Nominal spur gear geometry, generating tool profiles and closed-form
//! kinematic deviation estimates for hobbing.
//!
//! Lengths are in millimetres unless a name says otherwise, public angles
//! are in degrees. Internally everything is radians.
//!
//! The involute used throughout is written in its canonical frame:
//!
//! ```text
//! I(ξ) = rb · (cos ξ + ξ sin ξ,  sin ξ − ξ cos ξ)
//! ```
//!
//! with unit normal `n(ξ) = (sin ξ, −cos ξ)` pointing away from the tooth
//! material. Its support function is `⟨I(ξ), n(ξ)⟩ = rb·ξ`, which is what
//! lets tool-flank lines and the nominal flank be compared in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rack (and cutter) addendum over the module.
pub const TOOL_ADDENDUM_FACTOR: f64 = 1.25;
/// Default tool tip rounding radius over the module.
pub const TIP_ROUNDING_FACTOR: f64 = 0.38;
/// Default pressure angle in degrees.
pub const DEFAULT_PRESSURE_ANGLE_DEG: f64 = 20.0;
/// Protuberance amount over the module when a hob has one enabled.
pub const PROTUBERANCE_AMOUNT_FACTOR: f64 = 0.02;
/// Depth below the rack pitch line, over the module, where the protuberance
/// starts.
pub const PROTUBERANCE_START_FACTOR: f64 = 0.8;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GearSpec {
    pub module_mn: f64,
    pub tooth_count_z2: u32,
    pub pressure_angle_an: f64,
    pub pitch_diameter_dt: f64,
    pub face_width: f64,
    pub tip_diameter: f64,
    pub root_diameter: f64,
}

impl GearSpec {
    /// Standard full-depth spur gear: addendum `mn`, dedendum `1.25·mn`.
    pub fn new(module_mn: f64, tooth_count_z2: u32, pressure_angle_deg: f64, face_width: f64) -> Result<Self> {
        let dt = module_mn * tooth_count_z2 as f64;
        let spec = Self {
            module_mn,
            tooth_count_z2,
            pressure_angle_an: pressure_angle_deg,
            pitch_diameter_dt: dt,
            face_width,
            tip_diameter: dt + 2.0 * module_mn,
            root_diameter: dt - 2.0 * TOOL_ADDENDUM_FACTOR * module_mn,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGeometry(m));
        if !(self.module_mn > 0.0) {
            return bad(format!("module must be positive, got {}", self.module_mn));
        }
        if self.tooth_count_z2 < 4 {
            return bad(format!("need at least 4 teeth, got {}", self.tooth_count_z2));
        }
        if !(self.pressure_angle_an > 0.0 && self.pressure_angle_an < 45.0) {
            return bad(format!("pressure angle {} deg outside (0, 45)", self.pressure_angle_an));
        }
        let expected = self.module_mn * self.tooth_count_z2 as f64;
        if (self.pitch_diameter_dt - expected).abs() > 1e-9 {
            return bad(format!(
                "pitch diameter {} mm differs from mn*z2 = {} mm",
                self.pitch_diameter_dt, expected
            ));
        }
        if !(self.root_diameter < self.pitch_diameter_dt && self.pitch_diameter_dt < self.tip_diameter) {
            return bad("diameters must satisfy root < pitch < tip".into());
        }
        if !(self.face_width > 0.0) {
            return bad(format!("face width must be positive, got {}", self.face_width));
        }
        Ok(())
    }

    pub fn pressure_angle_rad(&self) -> f64 {
        self.pressure_angle_an.to_radians()
    }

    pub fn pitch_radius(&self) -> f64 {
        0.5 * self.pitch_diameter_dt
    }

    pub fn base_radius(&self) -> f64 {
        self.pitch_radius() * self.pressure_angle_rad().cos()
    }

    pub fn tip_radius(&self) -> f64 {
        0.5 * self.tip_diameter
    }

    pub fn root_radius(&self) -> f64 {
        0.5 * self.root_diameter
    }

    /// Angular pitch in degrees.
    pub fn pitch_angle_deg(&self) -> f64 {
        360.0 / self.tooth_count_z2 as f64
    }

    /// Circular pitch at the reference circle.
    pub fn circular_pitch(&self) -> f64 {
        std::f64::consts::PI * self.module_mn
    }

    /// Roll angle (rad) of the nominal involute at radius `r`.
    pub fn roll_at_radius(&self, r: f64) -> Result<f64> {
        roll_at_radius(self.base_radius(), r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HobSpec {
    pub pitch_diameter_d0: f64,
    pub flute_count_ni: u32,
    pub coil_count_z1: u32,
    /// Axial feed per gear revolution (mm/rev).
    pub axial_feed_fa: f64,
    pub tip_rounding: f64,
    pub protuberance_enabled: bool,
}

impl HobSpec {
    /// Hob with the default tip rounding for `gear`'s module and no protuberance.
    pub fn new(gear: &GearSpec, d0: f64, ni: u32, z1: u32, fa: f64) -> Result<Self> {
        let hob = Self {
            pitch_diameter_d0: d0,
            flute_count_ni: ni,
            coil_count_z1: z1,
            axial_feed_fa: fa,
            tip_rounding: TIP_ROUNDING_FACTOR * gear.module_mn,
            protuberance_enabled: false,
        };
        hob.validate()?;
        Ok(hob)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pitch_diameter_d0 > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "hob diameter must be positive, got {}",
                self.pitch_diameter_d0
            )));
        }
        if self.flute_count_ni == 0 || self.coil_count_z1 == 0 {
            return Err(Error::InvalidGeometry("hob needs at least one flute and one coil".into()));
        }
        if !(self.axial_feed_fa >= 0.0) || self.axial_feed_fa >= self.pitch_diameter_d0 {
            return Err(Error::InvalidFeed {
                feed_mm: self.axial_feed_fa,
                d0_mm: self.pitch_diameter_d0,
            });
        }
        if !(self.tip_rounding >= 0.0) {
            return Err(Error::InvalidGeometry("tip rounding must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShaperSpec {
    pub tooth_count_z0: u32,
    pub double_strokes_per_pitch: u32,
    /// Rotary feed along the cutter pitch circle per double stroke (mm).
    pub rotary_feed: f64,
    pub tip_rounding: f64,
}

impl ShaperSpec {
    pub fn new(gear: &GearSpec, z0: u32, double_strokes_per_pitch: u32) -> Result<Self> {
        let pitch = gear.circular_pitch();
        let shaper = Self {
            tooth_count_z0: z0,
            double_strokes_per_pitch,
            rotary_feed: if double_strokes_per_pitch > 0 {
                pitch / double_strokes_per_pitch as f64
            } else {
                0.0
            },
            tip_rounding: TIP_ROUNDING_FACTOR * gear.module_mn,
        };
        shaper.validate()?;
        Ok(shaper)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tooth_count_z0 < 4 {
            return Err(Error::InvalidGeometry(format!(
                "shaper cutter needs at least 4 teeth, got {}",
                self.tooth_count_z0
            )));
        }
        if self.double_strokes_per_pitch == 0 {
            return Err(Error::InvalidGeometry("need at least one double stroke per pitch".into()));
        }
        Ok(())
    }

    /// Cutter pitch radius for a gear of the same module.
    pub fn pitch_radius(&self, gear: &GearSpec) -> f64 {
        0.5 * gear.module_mn * self.tooth_count_z0 as f64
    }

    pub fn base_radius(&self, gear: &GearSpec) -> f64 {
        self.pitch_radius(gear) * gear.pressure_angle_rad().cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlankSide {
    Drive,
    NonDrive,
}

impl FlankSide {
    pub fn as_str(&self) -> &'static str {
        match self {
            FlankSide::Drive => "drive",
            FlankSide::NonDrive => "non-drive",
        }
    }
}

impl std::str::FromStr for FlankSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drive" => Ok(FlankSide::Drive),
            "non-drive" => Ok(FlankSide::NonDrive),
            other => Err(Error::InvalidParams(format!("unknown flank side '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tool {
    Hob(HobSpec),
    Shaper(ShaperSpec),
}

/// Analytic description of the cutting part of a tool flank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToolShape {
    /// Straight rack flank. Depths are measured from the rack pitch line
    /// towards the gear centre; the straight part spans
    /// `[min_depth, max_depth]`.
    Rack {
        pressure_angle: f64,
        min_depth: f64,
        max_depth: f64,
    },
    /// Involute flank of a pinion cutter; the cutting part spans roll
    /// angles `[min_roll, max_roll]`.
    Involute {
        base_radius: f64,
        pitch_radius: f64,
        min_roll: f64,
        max_roll: f64,
    },
}

/// Sampled tool flank in the tool's transverse frame plus its analytic shape.
///
/// Rack frame: `x` along the pitch line, `y` depth towards the gear centre.
/// Cutter frame: centred on the cutter axis, canonical involute orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolFlankCurve {
    pub points: Vec<Point>,
    pub side: FlankSide,
    pub shape: ToolShape,
}

/// Closed-form hobbing deviation estimates for one gear/hob pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicDeviationEstimate {
    /// Feed-mark (helix) deviation, μm.
    pub delta_x: f64,
    /// Profile scallop deviation, μm.
    pub delta_y: f64,
    /// Spacing of feed marks along the helix, mm.
    pub valley_spacing: f64,
}

impl KinematicDeviationEstimate {
    pub fn for_hobbing(gear: &GearSpec, hob: &HobSpec) -> Result<Self> {
        Ok(Self {
            delta_x: helix_feed_mark_height(gear.pressure_angle_an, hob.pitch_diameter_d0, hob.axial_feed_fa)?,
            delta_y: profile_scallop_height(
                hob.coil_count_z1,
                gear.module_mn,
                gear.pressure_angle_an,
                gear.tooth_count_z2,
                hob.flute_count_ni,
            )?,
            valley_spacing: hob.axial_feed_fa,
        })
    }
}

/// Involute function `inv α = tan α − α` (radians in and out).
pub fn involute_function(alpha: f64) -> f64 {
    alpha.tan() - alpha
}

/// Point on the canonical involute of `base_radius` at `roll_angle` (rad).
pub fn involute_point(base_radius: f64, roll_angle: f64) -> Result<Point> {
    if !(base_radius > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "base radius must be positive, got {base_radius}"
        )));
    }
    if !(roll_angle >= 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "roll angle must be non-negative, got {roll_angle}"
        )));
    }
    Ok(involute_point_unchecked(base_radius, roll_angle))
}

#[inline]
pub(crate) fn involute_point_unchecked(rb: f64, xi: f64) -> Point {
    let (s, c) = xi.sin_cos();
    [rb * (c + xi * s), rb * (s - xi * c)]
}

/// Outward unit normal of the canonical involute at roll angle `xi`.
#[inline]
pub(crate) fn involute_normal(xi: f64) -> Point {
    let (s, c) = xi.sin_cos();
    [s, -c]
}

/// Roll angle (rad) at which the involute of `base_radius` reaches `radius`.
pub fn roll_at_radius(base_radius: f64, radius: f64) -> Result<f64> {
    if !(base_radius > 0.0) || radius < base_radius {
        return Err(Error::InvalidGeometry(format!(
            "radius {radius} mm is inside the base circle {base_radius} mm"
        )));
    }
    Ok(((radius / base_radius).powi(2) - 1.0).sqrt())
}

/// Signed normal distance from `q` to the canonical involute of `rb`, and
/// the roll angle of the foot point. Positive on the outward-normal side.
/// Returns `None` inside the base circle.
#[inline]
pub(crate) fn involute_distance(rb: f64, q: Point) -> Option<(f64, f64)> {
    let r = q[0].hypot(q[1]);
    if r < rb {
        return None;
    }
    let beta = q[1].atan2(q[0]);
    let t = beta + (rb / r).acos();
    let n = involute_normal(t);
    Some((q[0] * n[0] + q[1] * n[1] - rb * t, t))
}

/// Height of the axial feed marks left by a hob (μm):
/// `tan αn · (d0/2 − √((d0² − fa²)/4))`.
pub fn helix_feed_mark_height(pressure_angle_deg: f64, d0: f64, fa: f64) -> Result<f64> {
    if !(fa >= 0.0) || fa >= d0 {
        return Err(Error::InvalidFeed { feed_mm: fa, d0_mm: d0 });
    }
    let sag = 0.5 * d0 - ((d0 * d0 - fa * fa) / 4.0).sqrt();
    Ok(pressure_angle_deg.to_radians().tan() * sag * 1000.0)
}

/// Profile scallop left by discrete hob flutes (μm):
/// `π² z1² mn sin αn / (4 z2 ni²)`.
pub fn profile_scallop_height(z1: u32, mn: f64, pressure_angle_deg: f64, z2: u32, ni: u32) -> Result<f64> {
    if z2 == 0 || ni == 0 {
        return Err(Error::InvalidGeometry("tooth and flute counts must be positive".into()));
    }
    let pi2 = std::f64::consts::PI.powi(2);
    let z1 = z1 as f64;
    let ni = ni as f64;
    Ok(pi2 * z1 * z1 * mn * pressure_angle_deg.to_radians().sin() / (4.0 * z2 as f64 * ni * ni) * 1000.0)
}

/// Tangential tool shift (mm) that rolls without slip with a wheel turn of
/// `phi_deg` on the turning diameter `dt`.
pub fn tangent_shift(dt: f64, phi_deg: f64) -> f64 {
    std::f64::consts::PI * dt * phi_deg / 360.0
}

/// Depth (from the rack pitch line) at which the straight rack flank ends
/// and the tip rounding begins.
pub fn rack_straight_depth(mn: f64, tip_rounding: f64, pressure_angle: f64) -> f64 {
    TOOL_ADDENDUM_FACTOR * mn - tip_rounding * (1.0 - pressure_angle.sin())
}

const RACK_FLANK_SAMPLES: usize = 64;
const ROUNDING_SAMPLES: usize = 24;
const INVOLUTE_FLANK_SAMPLES: usize = 400;

/// Sampled cutting flank of `tool` for `gear`.
///
/// A hob is treated as a rack without lead angle: straight flank at the
/// pressure angle, tip rounding, optional protuberance. A shaper cutter is
/// the involute of its base circle.
pub fn tool_flank(tool: &Tool, gear: &GearSpec, side: FlankSide) -> Result<ToolFlankCurve> {
    gear.validate()?;
    let alpha = gear.pressure_angle_rad();
    let mn = gear.module_mn;
    let mut curve = match tool {
        Tool::Hob(hob) => {
            hob.validate()?;
            rack_flank(alpha, mn, hob.tip_rounding, hob.protuberance_enabled)
        }
        Tool::Shaper(shaper) => {
            shaper.validate()?;
            cutter_flank(gear, shaper)?
        }
    };
    if side == FlankSide::NonDrive {
        for p in &mut curve.points {
            p[0] = -p[0];
        }
    }
    curve.side = side;
    Ok(curve)
}

fn rack_flank(alpha: f64, mn: f64, tip_rounding: f64, protuberance: bool) -> ToolFlankCurve {
    let (sa, ca) = alpha.sin_cos();
    let ta = alpha.tan();
    let top = -TOOL_ADDENDUM_FACTOR * mn;
    let straight_end = rack_straight_depth(mn, tip_rounding, alpha);
    let prot_start = PROTUBERANCE_START_FACTOR * mn;
    let prot = PROTUBERANCE_AMOUNT_FACTOR * mn;

    let max_depth = if protuberance { prot_start.min(straight_end) } else { straight_end };
    let mut points = Vec::with_capacity(RACK_FLANK_SAMPLES + ROUNDING_SAMPLES + 2);
    for i in 0..RACK_FLANK_SAMPLES {
        let y = top + (max_depth - top) * i as f64 / (RACK_FLANK_SAMPLES - 1) as f64;
        points.push([y * ta, y]);
    }
    // Protuberance: flank offset by `prot` into the gap below its start depth.
    let shift = if protuberance { -prot / ca } else { 0.0 };
    if protuberance {
        for i in 1..=8 {
            let y = prot_start + (straight_end - prot_start) * i as f64 / 8.0;
            points.push([y * ta + shift, y]);
        }
    }
    if tip_rounding > 0.0 {
        // Centre lies on the tooth side of the flank, tangent to the tip line.
        let p = [straight_end * ta + shift, straight_end];
        let c = [p[0] + tip_rounding * ca, p[1] - tip_rounding * sa];
        let start = std::f64::consts::PI - alpha;
        let end = 0.5 * std::f64::consts::PI;
        for i in 1..=ROUNDING_SAMPLES {
            let t = start + (end - start) * i as f64 / ROUNDING_SAMPLES as f64;
            // Depth grows towards the tip line, so the arc bulges towards +y.
            points.push([c[0] + tip_rounding * t.cos(), c[1] + tip_rounding * t.sin()]);
        }
    }
    ToolFlankCurve {
        points,
        side: FlankSide::Drive,
        shape: ToolShape::Rack {
            pressure_angle: alpha,
            min_depth: top,
            max_depth,
        },
    }
}

fn cutter_flank(gear: &GearSpec, shaper: &ShaperSpec) -> Result<ToolFlankCurve> {
    let alpha = gear.pressure_angle_rad();
    let mn = gear.module_mn;
    let r0 = shaper.pitch_radius(gear);
    let rb0 = shaper.base_radius(gear);
    let r_low = (r0 - TOOL_ADDENDUM_FACTOR * mn).max(rb0);
    let r_high = r0 + rack_straight_depth(mn, shaper.tip_rounding, alpha);
    let min_roll = roll_at_radius(rb0, r_low)?;
    let max_roll = roll_at_radius(rb0, r_high)?;
    let points = (0..INVOLUTE_FLANK_SAMPLES)
        .map(|i| {
            let t = min_roll + (max_roll - min_roll) * i as f64 / (INVOLUTE_FLANK_SAMPLES - 1) as f64;
            involute_point_unchecked(rb0, t)
        })
        .collect();
    Ok(ToolFlankCurve {
        points,
        side: FlankSide::Drive,
        shape: ToolShape::Involute {
            base_radius: rb0,
            pitch_radius: r0,
            min_roll,
            max_roll,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_gear() -> GearSpec {
        GearSpec::new(1.814, 86, 20.0, 6.3).unwrap()
    }

    #[test]
    fn involute_starts_on_base_circle() {
        let p = involute_point(10.0, 0.0).unwrap();
        assert!((p[0].hypot(p[1]) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn involute_radius_at_one_radian() {
        let p = involute_point(10.0, 1.0).unwrap();
        assert!((p[0].hypot(p[1]) - 14.142135623730951).abs() < 1e-9);
    }

    #[test]
    fn involute_function_of_twenty_degrees() {
        let inv = involute_function(20f64.to_radians());
        assert!((inv - 0.014904).abs() < 5e-7, "{inv}");
    }

    #[test]
    fn involute_rejects_bad_input() {
        assert!(matches!(involute_point(0.0, 1.0), Err(Error::InvalidGeometry(_))));
        assert!(matches!(involute_point(-2.0, 1.0), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn involute_distance_is_zero_on_curve_and_signed_off_it() {
        let rb = 30.0;
        for &xi in &[0.1, 0.3, 0.7] {
            let p = involute_point_unchecked(rb, xi);
            let (d, t) = involute_distance(rb, p).unwrap();
            assert!(d.abs() < 1e-12 && (t - xi).abs() < 1e-12);
            let n = involute_normal(xi);
            let out = [p[0] + 0.01 * n[0], p[1] + 0.01 * n[1]];
            let (d, _) = involute_distance(rb, out).unwrap();
            assert!((d - 0.01).abs() < 1e-9, "{d}");
        }
    }

    #[test]
    fn gear_spec_validation() {
        assert!(GearSpec::new(1.814, 3, 20.0, 5.0).is_err());
        assert!(GearSpec::new(1.814, 40, 50.0, 5.0).is_err());
        let mut g = reference_gear();
        g.pitch_diameter_dt += 1e-6;
        assert!(g.validate().is_err());
        let g = reference_gear();
        assert!((g.pitch_diameter_dt - 156.004).abs() < 1e-9);
    }

    #[test]
    fn feed_mark_height_examples() {
        assert_eq!(helix_feed_mark_height(20.0, 70.0, 0.0).unwrap(), 0.0);
        let dx = helix_feed_mark_height(20.0, 70.0, 2.0).unwrap();
        assert!((dx - 5.2004).abs() < 5e-4, "{dx}");
        assert!(matches!(
            helix_feed_mark_height(20.0, 70.0, 70.0),
            Err(Error::InvalidFeed { .. })
        ));
    }

    #[test]
    fn feed_mark_small_feed_expansion() {
        let ta = 20f64.to_radians().tan();
        for &fa in &[0.1, 1.0, 2.0, 3.4] {
            let exact = helix_feed_mark_height(20.0, 70.0, fa).unwrap();
            let approx = ta * fa * fa / (4.0 * 70.0) * 1000.0;
            assert!((exact - approx).abs() / exact < 0.01);
        }
    }

    #[test]
    fn scallop_height_examples() {
        assert_eq!(profile_scallop_height(1, 1.814, 0.0, 86, 14).unwrap(), 0.0);
        let dy = profile_scallop_height(1, 1.814, 20.0, 86, 14).unwrap();
        assert!((dy - 0.0908).abs() < 5e-4, "{dy}");
        let dy2 = profile_scallop_height(2, 1.814, 20.0, 86, 14).unwrap();
        assert!((dy2 / dy - 4.0).abs() < 1e-12);
        assert!((dy2 - 0.363).abs() < 1e-3);
        let half = profile_scallop_height(1, 1.814, 20.0, 86, 28).unwrap();
        assert_eq!(dy / half, 4.0);
        assert!(profile_scallop_height(1, 1.814, 20.0, 0, 14).is_err());
        assert!(profile_scallop_height(1, 1.814, 20.0, 86, 0).is_err());
    }

    #[test]
    fn tangent_shift_examples() {
        assert_eq!(tangent_shift(156.0297, 0.0), 0.0);
        assert!((tangent_shift(156.0297, 0.299) - 0.40713).abs() < 1e-5);
        let full = tangent_shift(156.0297, 360.0);
        assert!((full - std::f64::consts::PI * 156.0297).abs() < 1e-12);
    }

    #[test]
    fn kinematic_estimate_uses_feed_as_spacing() {
        let g = reference_gear();
        let hob = HobSpec::new(&g, 70.0, 14, 1, 2.0).unwrap();
        let est = KinematicDeviationEstimate::for_hobbing(&g, &hob).unwrap();
        assert_eq!(est.valley_spacing, 2.0);
        assert!(est.delta_x > 5.0 && est.delta_y > 0.09);
    }

    #[test]
    fn rack_flank_is_a_straight_line_at_the_pressure_angle() {
        let g = reference_gear();
        let mut hob = HobSpec::new(&g, 70.0, 14, 1, 2.0).unwrap();
        hob.tip_rounding = 0.0;
        let curve = tool_flank(&Tool::Hob(hob), &g, FlankSide::Drive).unwrap();
        let a = curve.points[0];
        let b = *curve.points.last().unwrap();
        let angle = (b[0] - a[0]).atan2(b[1] - a[1]);
        assert!((angle - 20f64.to_radians()).abs() < 1e-12);
        for p in &curve.points {
            let cross = (p[0] - a[0]) * (b[1] - a[1]) - (p[1] - a[1]) * (b[0] - a[0]);
            assert!(cross.abs() < 1e-12);
        }
    }

    #[test]
    fn rack_flank_sides_mirror() {
        let g = reference_gear();
        let hob = HobSpec::new(&g, 70.0, 14, 1, 2.0).unwrap();
        let drive = tool_flank(&Tool::Hob(hob), &g, FlankSide::Drive).unwrap();
        let other = tool_flank(&Tool::Hob(hob), &g, FlankSide::NonDrive).unwrap();
        assert_eq!(other.side, FlankSide::NonDrive);
        for (p, q) in drive.points.iter().zip(&other.points) {
            assert_eq!(p[0], -q[0]);
            assert_eq!(p[1], q[1]);
        }
    }

    #[test]
    fn rack_tip_rounding_meets_tip_line() {
        let g = reference_gear();
        let hob = HobSpec::new(&g, 70.0, 14, 1, 2.0).unwrap();
        let curve = tool_flank(&Tool::Hob(hob), &g, FlankSide::Drive).unwrap();
        let last = curve.points.last().unwrap();
        assert!((last[1] - 1.25 * g.module_mn).abs() < 1e-12);
        let ToolShape::Rack { max_depth, .. } = curve.shape else { panic!() };
        assert!((max_depth - 1.0 * g.module_mn).abs() < 0.01);
    }

    #[test]
    fn shaper_flank_lies_on_cutter_involute() {
        let g = GearSpec::new(1.814, 49, 20.0, 5.1).unwrap();
        let shaper = ShaperSpec::new(&g, 56, 55).unwrap();
        let rb0 = shaper.base_radius(&g);
        assert!((rb0 - 47.72).abs() < 0.01, "{rb0}");
        let curve = tool_flank(&Tool::Shaper(shaper), &g, FlankSide::Drive).unwrap();
        assert!(curve.points.len() >= 2);
        for p in &curve.points {
            let (d, t) = involute_distance(rb0, *p).unwrap();
            assert!(d.abs() < 1e-6);
            let r = p[0].hypot(p[1]);
            assert!((r - rb0 * (1.0 + t * t).sqrt()).abs() < 1e-6);
        }
    }
}
