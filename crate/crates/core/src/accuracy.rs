//! Gear accuracy deviations: total profile and helix deviation, single and
//! cumulative pitch deviation, runout and tooth thickness variation.
//!
//! A wheel is described by the rigid position of each flank plus optional
//! measured deviations over the flank surface. Flank positions are given as
//! arc offsets on the reference circle (μm, positive counter-clockwise) from
//! the nominal involute. The wheel body may also sit off the rotation axis.
//!
//! Tooth `i` is centred at polar angle `2πi/z`. Its drive flank is the
//! canonical involute (material on the counter-clockwise side); the
//! non-drive flank is its mirror image about the tooth axis.

use serde::Serialize;

use crate::areal::Heightmap;
use crate::error::{Error, Result};
use crate::geometry::{involute_distance, involute_function, involute_normal, FlankSide, GearSpec, Point};

/// Default evaluation window, as fractions of the trace length.
pub const DEFAULT_EVAL_RANGE: (f64, f64) = (0.05, 0.95);
/// Default runout probe diameter over the module.
pub const PROBE_DIAMETER_FACTOR: f64 = 1.75;

/// Measured deviations over one flank, μm.
#[derive(Debug, Clone, PartialEq)]
pub enum FlankSurface {
    /// Full flank map, `x` along the face width and `y` along the profile.
    Grid(Heightmap),
    /// One trace along the profile and one along the helix.
    Traces { profile: Vec<f64>, helix: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlankData {
    /// Arc offset of the flank on the reference circle, μm, CCW positive.
    pub offset_um: f64,
    pub surface: Option<FlankSurface>,
}

impl FlankData {
    pub fn at_offset(offset_um: f64) -> Self {
        Self { offset_um, surface: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToothData {
    pub index: usize,
    pub drive: Option<FlankData>,
    pub non_drive: Option<FlankData>,
}

impl ToothData {
    pub fn nominal(index: usize) -> Self {
        Self {
            index,
            drive: Some(FlankData::default()),
            non_drive: Some(FlankData::default()),
        }
    }

    pub fn flank(&self, side: FlankSide) -> Option<&FlankData> {
        match side {
            FlankSide::Drive => self.drive.as_ref(),
            FlankSide::NonDrive => self.non_drive.as_ref(),
        }
    }

    pub fn flank_mut(&mut self, side: FlankSide) -> Option<&mut FlankData> {
        match side {
            FlankSide::Drive => self.drive.as_mut(),
            FlankSide::NonDrive => self.non_drive.as_mut(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToothSet {
    gear: GearSpec,
    reference_radius: f64,
    /// Offset of the wheel centre from the rotation axis, μm.
    eccentricity_um: [f64; 2],
    teeth: Vec<ToothData>,
}

impl ToothSet {
    /// Teeth must cover `0..z2` once each, in order.
    pub fn new(gear: GearSpec, teeth: Vec<ToothData>) -> Result<Self> {
        gear.validate()?;
        let z = gear.tooth_count_z2 as usize;
        if teeth.len() != z {
            return Err(Error::InsufficientData(format!(
                "tooth set has {} teeth, the gear has {z}",
                teeth.len()
            )));
        }
        for (k, t) in teeth.iter().enumerate() {
            if t.index != k {
                return Err(Error::InvalidParams(format!(
                    "tooth at position {k} has index {}; indices must be 0..{z} in order",
                    t.index
                )));
            }
        }
        Ok(Self {
            gear,
            reference_radius: gear.pitch_radius(),
            eccentricity_um: [0.0, 0.0],
            teeth,
        })
    }

    /// Perfect wheel: every flank at its nominal position.
    pub fn nominal(gear: GearSpec) -> Result<Self> {
        Self::new(gear, (0..gear.tooth_count_z2 as usize).map(ToothData::nominal).collect())
    }

    /// Reference circle radius in mm; defaults to the pitch radius.
    pub fn with_reference_radius(mut self, r: f64) -> Result<Self> {
        if !(r > self.gear.base_radius() && r < self.gear.tip_radius()) {
            return Err(Error::OutOfRange(format!(
                "reference radius {r} mm must lie between the base and tip circles"
            )));
        }
        self.reference_radius = r;
        Ok(self)
    }

    pub fn with_eccentricity(mut self, ex_um: f64, ey_um: f64) -> Self {
        self.eccentricity_um = [ex_um, ey_um];
        self
    }

    pub fn gear(&self) -> &GearSpec {
        &self.gear
    }

    pub fn reference_radius(&self) -> f64 {
        self.reference_radius
    }

    pub fn eccentricity_um(&self) -> [f64; 2] {
        self.eccentricity_um
    }

    pub fn teeth(&self) -> &[ToothData] {
        &self.teeth
    }

    pub fn teeth_mut(&mut self) -> &mut [ToothData] {
        &mut self.teeth
    }

    fn flank_or_err(&self, i: usize, side: FlankSide) -> Result<&FlankData> {
        self.teeth[i]
            .flank(side)
            .ok_or_else(|| Error::InsufficientData(format!("tooth {i} has no {} flank", side.as_str())))
    }

    fn centre(&self) -> Point {
        [self.eccentricity_um[0] / 1000.0, self.eccentricity_um[1] / 1000.0]
    }

    /// Rotation taking the canonical (drive) or mirrored (non-drive)
    /// involute onto the flank of tooth `i`, in the wheel frame.
    fn flank_angle(&self, i: usize, side: FlankSide, offset_um: f64) -> f64 {
        let z = self.gear.tooth_count_z2 as f64;
        let phi = 2.0 * std::f64::consts::PI * i as f64 / z;
        let half = std::f64::consts::PI / (2.0 * z);
        let inv = involute_function(self.gear.pressure_angle_rad());
        let shift = offset_um / 1000.0 / self.reference_radius;
        match side {
            FlankSide::Drive => phi - half - inv + shift,
            FlankSide::NonDrive => phi + half + inv + shift,
        }
    }

    /// Polar angle in the wheel frame of the flank point at radius `rho`.
    fn flank_polar(&self, beta: f64, side: FlankSide, rho: f64) -> f64 {
        let a = (self.gear.base_radius() / rho).acos();
        match side {
            FlankSide::Drive => beta + involute_function(a),
            FlankSide::NonDrive => beta - involute_function(a),
        }
    }

    /// Signed distance (mm, positive into the tooth space) from `q` in the
    /// rotation-axis frame to a flank, with its gradient and foot roll.
    fn flank_distance(&self, beta: f64, side: FlankSide, q: Point) -> Option<(f64, Point, f64)> {
        let e = self.centre();
        let w = rotate([q[0] - e[0], q[1] - e[1]], -beta);
        let w = match side {
            FlankSide::Drive => w,
            FlankSide::NonDrive => [w[0], -w[1]],
        };
        let (d, t) = involute_distance(self.gear.base_radius(), w)?;
        let n = involute_normal(t);
        let n = match side {
            FlankSide::Drive => n,
            FlankSide::NonDrive => [n[0], -n[1]],
        };
        Some((d, rotate(n, beta), t))
    }
}

fn rotate(p: Point, a: f64) -> Point {
    let (s, c) = a.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

fn range(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

/// Sample standard deviation; zero for fewer than two values.
fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormDeviations {
    /// Total profile deviation, μm.
    pub f_alpha: f64,
    /// Total helix deviation, μm.
    pub f_beta: f64,
}

fn window<'a>(trace: &'a [f64], eval_range: (f64, f64), what: &str) -> Result<&'a [f64]> {
    let (a, b) = eval_range;
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a >= b {
        return Err(Error::InvalidParams(format!("evaluation range ({a}, {b}) must satisfy 0 <= a < b <= 1")));
    }
    if trace.is_empty() {
        return Err(Error::InsufficientData(format!("empty {what} trace")));
    }
    let last = (trace.len() - 1) as f64;
    let lo = (a * last).ceil() as usize;
    let hi = (b * last).floor() as usize;
    if hi <= lo {
        return Err(Error::InsufficientData(format!(
            "evaluation window ({a}, {b}) holds fewer than two {what} samples"
        )));
    }
    Ok(&trace[lo..=hi])
}

/// Range of each trace inside the evaluation window. Offsetting a trace by
/// its mean leaves the range unchanged, so no alignment step is needed.
pub fn form_deviations_from_traces(profile: &[f64], helix: &[f64], eval_range: (f64, f64)) -> Result<FormDeviations> {
    Ok(FormDeviations {
        f_alpha: range(window(profile, eval_range, "profile")?),
        f_beta: range(window(helix, eval_range, "helix")?),
    })
}

/// Uses the profile trace at mid face width and the helix trace at mid
/// profile height.
pub fn form_deviations(map: &Heightmap, eval_range: (f64, f64)) -> Result<FormDeviations> {
    let profile = map.column(map.nx / 2);
    let helix = map.row(map.ny / 2);
    form_deviations_from_traces(&profile, helix, eval_range)
}

fn surface_deviations(s: &FlankSurface, eval_range: (f64, f64)) -> Result<FormDeviations> {
    match s {
        FlankSurface::Grid(m) => form_deviations(m, eval_range),
        FlankSurface::Traces { profile, helix } => form_deviations_from_traces(profile, helix, eval_range),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PitchDeviations {
    /// Largest single pitch deviation magnitude, μm.
    pub f_pt: f64,
    /// Range of the cumulative series, μm.
    pub f_p: f64,
    /// Actual minus nominal pitch from tooth `i` to `i+1`, μm.
    pub single: Vec<f64>,
    /// Position of tooth `k` relative to tooth 0 minus `k` nominal pitches, μm.
    pub cumulative: Vec<f64>,
    pub single_std: f64,
}

/// Angular position about the rotation axis where a flank crosses the
/// circle of radius `r`.
fn crossing_angle(set: &ToothSet, i: usize, side: FlankSide, r: f64) -> Result<f64> {
    let flank = set.flank_or_err(i, side)?;
    let beta = set.flank_angle(i, side, flank.offset_um);
    let e = set.centre();
    let rb = set.gear.base_radius();
    let point = |rho: f64| {
        let th = set.flank_polar(beta, side, rho);
        [e[0] + rho * th.cos(), e[1] + rho * th.sin()]
    };
    // |point(rho)| − rho depends on rho only through the small offset, so
    // plain fixed-point iteration contracts quickly.
    let mut rho = r;
    for _ in 0..200 {
        if rho < rb {
            return Err(Error::OutOfRange(format!(
                "flank of tooth {i} does not reach radius {r} mm above the base circle"
            )));
        }
        let p = point(rho);
        let step = p[0].hypot(p[1]) - r;
        rho -= step;
        if step.abs() <= 1e-15 * r {
            break;
        }
    }
    let p = point(rho);
    Ok(p[1].atan2(p[0]))
}

fn wrap(a: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    a - tau * (a / tau + 0.5).floor()
}

/// Pitch deviations from same-side flank crossings of the reference circle
/// about the rotation axis.
pub fn pitch_deviations(teeth: &ToothSet, side: FlankSide) -> Result<PitchDeviations> {
    let z = teeth.teeth.len();
    if z < 3 {
        return Err(Error::InsufficientData(format!("pitch needs at least 3 teeth, got {z}")));
    }
    let r = teeth.reference_radius;
    let angles = (0..z).map(|i| crossing_angle(teeth, i, side, r)).collect::<Result<Vec<_>>>()?;
    let step = 2.0 * std::f64::consts::PI / z as f64;
    let nominal = r * step;
    let single: Vec<f64> = (0..z)
        .map(|i| {
            let d = wrap(angles[(i + 1) % z] - angles[i] - step);
            1000.0 * (r * (step + d) - nominal)
        })
        .collect();
    let cumulative: Vec<f64> = (0..z)
        .map(|k| 1000.0 * r * wrap(angles[k] - angles[0] - k as f64 * step))
        .collect();
    Ok(PitchDeviations {
        f_pt: single.iter().fold(0.0, |m, v| m.max(v.abs())),
        f_p: range(&cumulative),
        single_std: std_dev(&single),
        single,
        cumulative,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunoutResult {
    /// Range of the ball positions, μm.
    pub f_r: f64,
    /// Radial ball position per tooth space minus their mean, μm. Space
    /// `i` lies between tooth `i` and tooth `i+1`.
    pub positions: Vec<f64>,
    pub std: f64,
}

/// Centre of a ball of radius `rad` touching both flanks of space `i`, in
/// the rotation-axis frame.
fn ball_centre(set: &ToothSet, i: usize, rad: f64) -> Result<Point> {
    let z = set.teeth.len();
    let j = (i + 1) % z;
    let left = set.flank_or_err(i, FlankSide::NonDrive)?;
    let right = set.flank_or_err(j, FlankSide::Drive)?;
    let b_left = set.flank_angle(i, FlankSide::NonDrive, left.offset_um);
    // Tooth z−1 to tooth 0 wraps once round the wheel.
    let b_right = set.flank_angle(i + 1, FlankSide::Drive, right.offset_um);
    let mid = 0.5 * (b_left + b_right);
    let r0 = set.gear.pitch_radius();
    let mut c = [r0 * mid.cos(), r0 * mid.sin()];
    let bad = || {
        Error::OutOfRange(format!(
            "probe of diameter {} mm does not touch both flanks of tooth space {i}",
            2.0 * rad
        ))
    };
    let roll_tip = set.gear.roll_at_radius(set.gear.tip_radius())?;
    let eval = |c: Point| -> Result<[(f64, Point, f64); 2]> {
        let a = set.flank_distance(b_left, FlankSide::NonDrive, c).ok_or_else(bad)?;
        let b = set.flank_distance(b_right, FlankSide::Drive, c).ok_or_else(bad)?;
        Ok([a, b])
    };
    for _ in 0..100 {
        let [(d1, g1, _), (d2, g2, _)] = eval(c)?;
        let f = [d1 - rad, d2 - rad];
        let det = g1[0] * g2[1] - g1[1] * g2[0];
        if det.abs() < 1e-12 {
            return Err(bad());
        }
        let dx = (f[0] * g2[1] - f[1] * g1[1]) / det;
        let dy = (g1[0] * f[1] - g2[0] * f[0]) / det;
        // Keep each step within a module so a poor start cannot jump gaps.
        let len = dx.hypot(dy);
        let lim = set.gear.module_mn;
        let s = if len > lim { lim / len } else { 1.0 };
        c = [c[0] - s * dx, c[1] - s * dy];
        if len < 1e-13 * r0 {
            break;
        }
    }
    let [(d1, _, t1), (d2, _, t2)] = eval(c)?;
    let ok = |d: f64, t: f64| (d - rad).abs() < 1e-9 && t > 0.0 && t <= roll_tip;
    if !ok(d1, t1) || !ok(d2, t2) {
        return Err(bad());
    }
    Ok(c)
}

/// Runout from the radial position of a ball seated in every tooth space.
pub fn runout_fr(teeth: &ToothSet, probe_diameter_mm: f64) -> Result<RunoutResult> {
    if !(probe_diameter_mm > 0.0) {
        return Err(Error::InvalidParams(format!(
            "probe diameter must be positive, got {probe_diameter_mm}"
        )));
    }
    let rad = 0.5 * probe_diameter_mm;
    let radial = (0..teeth.teeth.len())
        .map(|i| ball_centre(teeth, i, rad).map(|c| c[0].hypot(c[1])))
        .collect::<Result<Vec<_>>>()?;
    let mean = radial.iter().sum::<f64>() / radial.len() as f64;
    let positions: Vec<f64> = radial.iter().map(|r| 1000.0 * (r - mean)).collect();
    Ok(RunoutResult {
        f_r: range(&positions),
        std: std_dev(&positions),
        positions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThicknessResult {
    /// Range of the chordal thickness, μm.
    pub r_s: f64,
    /// Chordal thickness per tooth at the reference circle, mm.
    pub thickness: Vec<f64>,
    pub std: f64,
}

/// Chordal tooth thickness at the reference circle of the wheel body.
pub fn thickness_variation_rs(teeth: &ToothSet) -> Result<ThicknessResult> {
    let r = teeth.reference_radius;
    let thickness = (0..teeth.teeth.len())
        .map(|i| {
            let d = teeth.flank_or_err(i, FlankSide::Drive)?;
            let n = teeth.flank_or_err(i, FlankSide::NonDrive)?;
            let td = teeth.flank_polar(teeth.flank_angle(i, FlankSide::Drive, d.offset_um), FlankSide::Drive, r);
            let tn = teeth.flank_polar(
                teeth.flank_angle(i, FlankSide::NonDrive, n.offset_um),
                FlankSide::NonDrive,
                r,
            );
            Ok(2.0 * r * (0.5 * (tn - td)).sin())
        })
        .collect::<Result<Vec<_>>>()?;
    let um: Vec<f64> = thickness.iter().map(|t| 1000.0 * t).collect();
    Ok(ThicknessResult {
        r_s: range(&um),
        std: std_dev(&um),
        thickness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideDeviations {
    pub side: FlankSide,
    /// Worst tooth, μm; `None` without flank surfaces.
    pub f_alpha: Option<f64>,
    pub f_alpha_std: Option<f64>,
    pub f_beta: Option<f64>,
    pub f_beta_std: Option<f64>,
    pub pitch: PitchDeviations,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub drive: SideDeviations,
    pub non_drive: SideDeviations,
    pub runout: RunoutResult,
    pub thickness: ThicknessResult,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationOptions {
    pub eval_range: (f64, f64),
    pub probe_diameter_mm: f64,
}

impl DeviationOptions {
    pub fn for_gear(gear: &GearSpec) -> Self {
        Self {
            eval_range: DEFAULT_EVAL_RANGE,
            probe_diameter_mm: PROBE_DIAMETER_FACTOR * gear.module_mn,
        }
    }
}

fn side_deviations(teeth: &ToothSet, side: FlankSide, opts: &DeviationOptions) -> Result<SideDeviations> {
    let mut fa = Vec::new();
    let mut fb = Vec::new();
    for t in &teeth.teeth {
        if let Some(s) = t.flank(side).and_then(|f| f.surface.as_ref()) {
            let d = surface_deviations(s, opts.eval_range)?;
            fa.push(d.f_alpha);
            fb.push(d.f_beta);
        }
    }
    let worst = |v: &[f64]| (!v.is_empty()).then(|| v.iter().cloned().fold(0.0, f64::max));
    let spread = |v: &[f64]| (!v.is_empty()).then(|| std_dev(v));
    Ok(SideDeviations {
        side,
        f_alpha: worst(&fa),
        f_alpha_std: spread(&fa),
        f_beta: worst(&fb),
        f_beta_std: spread(&fb),
        pitch: pitch_deviations(teeth, side)?,
    })
}

pub fn deviation_report(teeth: &ToothSet, opts: &DeviationOptions) -> Result<DeviationReport> {
    Ok(DeviationReport {
        drive: side_deviations(teeth, FlankSide::Drive, opts)?,
        non_drive: side_deviations(teeth, FlankSide::NonDrive, opts)?,
        runout: runout_fr(teeth, opts.probe_diameter_mm)?,
        thickness: thickness_variation_rs(teeth)?,
    })
}
