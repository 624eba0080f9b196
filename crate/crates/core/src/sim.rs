//! Discrete-envelope simulation of hobbing and Fellows shaping.
//!
//! Each tool pass leaves a clearance ("gap") above every nominal flank
//! point. The generated flank is the pointwise minimum of those gaps over
//! all passes, sampled on a `u × v` grid: `u` is arc length along the
//! involute measured from the form point, `v` the axial position.

use rayon::prelude::*;
use serde::Serialize;

use crate::areal::Heightmap;
use crate::error::{Error, Result};
use crate::geometry::{
    involute_distance, involute_normal, involute_point_unchecked, rack_straight_depth, roll_at_radius,
    tangent_shift, tool_flank, FlankSide, GearSpec, HobSpec, Point, ShaperSpec, Tool, ToolFlankCurve,
    ToolShape,
};
use crate::profile::Profile;

pub const DEFAULT_GRID: usize = 500;
pub const DEFAULT_MARGIN: usize = 2;
pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationParams {
    /// Wheel rotation per stroke, degrees.
    pub wheel_step_dphi: f64,
    pub grid_nu: usize,
    pub grid_nv: usize,
    /// Extra strokes on each side of the engagement window.
    pub passes_margin: usize,
}

impl GenerationParams {
    /// Stroke step matching the tool: one hob flute, or one shaper double
    /// stroke.
    pub fn for_tool(gear: &GearSpec, tool: &Tool) -> Self {
        let dphi = match tool {
            Tool::Hob(h) => gear.pitch_angle_deg() * h.coil_count_z1 as f64 / h.flute_count_ni as f64,
            Tool::Shaper(s) => gear.pitch_angle_deg() / s.double_strokes_per_pitch as f64,
        };
        Self {
            wheel_step_dphi: dphi,
            grid_nu: DEFAULT_GRID,
            grid_nv: DEFAULT_GRID,
            passes_margin: DEFAULT_MARGIN,
        }
    }

    pub fn for_hob(gear: &GearSpec, hob: &HobSpec) -> Self {
        Self::for_tool(gear, &Tool::Hob(*hob))
    }

    pub fn for_shaper(gear: &GearSpec, shaper: &ShaperSpec) -> Self {
        Self::for_tool(gear, &Tool::Shaper(*shaper))
    }

    pub fn with_grid(mut self, nu: usize, nv: usize) -> Self {
        self.grid_nu = nu;
        self.grid_nv = nv;
        self
    }

    pub fn with_step(mut self, dphi: f64) -> Self {
        self.wheel_step_dphi = dphi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wheel_step_dphi > 0.0) || !self.wheel_step_dphi.is_finite() {
            return Err(Error::InvalidParams(format!(
                "wheel step must be positive, got {} deg",
                self.wheel_step_dphi
            )));
        }
        if self.grid_nu < MIN_GRID || self.grid_nv < MIN_GRID {
            return Err(Error::InvalidParams(format!(
                "grid must be at least {MIN_GRID}x{MIN_GRID}, got {}x{}",
                self.grid_nu, self.grid_nv
            )));
        }
        Ok(())
    }
}

/// One tool stroke positioned relative to the wheel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationPass {
    pub index: usize,
    /// Stroke number within a wheel revolution.
    pub stroke: i64,
    /// Completed wheel revolutions (hobbing axial rows).
    pub revolution: i64,
    /// Total wheel angle φk, degrees.
    pub wheel_angle_deg: f64,
    /// Wheel angle with whole revolutions removed, `stroke·dφ`.
    pub phase_deg: f64,
    /// Tangential tool shift b_k for φk, mm.
    pub tool_shift_mm: f64,
    /// Axial tool centre v_k, mm.
    pub axial_center_mm: f64,
    /// Cutter rotation, degrees (shaping only, 0 for hobbing).
    pub tool_angle_deg: f64,
}

/// Simulated flank deviations on a `nu × nv` grid, row-major by `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlankGrid {
    pub nu: usize,
    pub nv: usize,
    /// Gap above the nominal flank, μm.
    pub deviations: Vec<f64>,
    /// Arc length from the form point, μm.
    pub u_axis: Vec<f64>,
    /// Axial position, μm.
    pub v_axis: Vec<f64>,
    pub side: FlankSide,
    pub gear: GearSpec,
}

impl FlankGrid {
    #[inline]
    pub fn at(&self, iu: usize, iv: usize) -> f64 {
        self.deviations[iu * self.nv + iv]
    }

    pub fn du(&self) -> f64 {
        self.u_axis[1] - self.u_axis[0]
    }

    pub fn dv(&self) -> f64 {
        self.v_axis[1] - self.v_axis[0]
    }

    /// Trace along `u` at column `iv`.
    pub fn row_along_u(&self, iv: usize) -> Vec<f64> {
        (0..self.nu).map(|iu| self.at(iu, iv)).collect()
    }

    /// Trace along `v` at row `iu`.
    pub fn row_along_v(&self, iu: usize) -> Vec<f64> {
        self.deviations[iu * self.nv..(iu + 1) * self.nv].to_vec()
    }

    /// Heightmap with `x` along the face width (`v`) and `y` along the
    /// profile (`u`); the grid layout already matches.
    pub fn to_heightmap(&self) -> Result<Heightmap> {
        let mut hm = Heightmap::new(self.nv, self.nu, self.dv(), self.du(), self.deviations.clone())?;
        hm.metadata.insert("flank".into(), self.side.as_str().into());
        hm.metadata.insert("module_mm".into(), fmt_num(self.gear.module_mn));
        hm.metadata.insert("teeth".into(), self.gear.tooth_count_z2.to_string());
        Ok(hm)
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceDirection {
    AlongProfile,
    AlongHelix,
}

/// Grid plus the pass list and which passes formed the envelope.
#[derive(Debug, Clone)]
pub struct GenerationRun {
    pub grid: FlankGrid,
    pub passes: Vec<GenerationPass>,
    /// `engaged[k]` is true when pass `k` attains the minimum at one or
    /// more grid points (ties included).
    pub engaged: Vec<bool>,
}

/// Geometry of one flank and one tool, shared by planning and gap
/// evaluation.
#[derive(Debug, Clone)]
pub struct FlankModel {
    gear: GearSpec,
    tool: Tool,
    side: FlankSide,
    curve: ToolFlankCurve,
    rb: f64,
    alpha: f64,
    /// Reference roll angle of the generating contact at zero wheel angle.
    xi_ref: f64,
    xi_form: f64,
    xi_tip: f64,
    /// Involute arc length at the form point, mm.
    s_form: f64,
    s_tip: f64,
    kind: ModelKind,
}

#[derive(Debug, Clone, Copy)]
enum ModelKind {
    Hob {
        d0: f64,
        fa: f64,
        /// Depth where the straight flank meets the tip rounding.
        rounding_depth: f64,
        tip_rounding: f64,
        top_depth: f64,
    },
    Shaper {
        rb0: f64,
        z_ratio: f64,
        center0: Point,
        gamma0: f64,
        min_roll: f64,
        max_roll: f64,
        tip_rounding: f64,
    },
}

impl FlankModel {
    pub fn new(gear: &GearSpec, tool: &Tool, side: FlankSide) -> Result<Self> {
        gear.validate()?;
        let curve = tool_flank(tool, gear, side)?;
        let alpha = gear.pressure_angle_rad();
        let sa = alpha.sin();
        let r = gear.pitch_radius();
        let rb = gear.base_radius();
        let mn = gear.module_mn;
        let xi_ref = alpha.tan();
        let rho_tip = roll_at_radius(rb, gear.tip_radius())? * rb;

        let (rho_form, kind) = match (tool, curve.shape) {
            (
                Tool::Hob(hob),
                ToolShape::Rack {
                    min_depth, max_depth, ..
                },
            ) => {
                let rho_form = r * sa - max_depth / sa;
                let kind = ModelKind::Hob {
                    d0: hob.pitch_diameter_d0,
                    fa: hob.axial_feed_fa,
                    rounding_depth: rack_straight_depth(mn, hob.tip_rounding, alpha),
                    tip_rounding: hob.tip_rounding,
                    top_depth: min_depth,
                };
                (rho_form, kind)
            }
            (
                Tool::Shaper(shaper),
                ToolShape::Involute {
                    base_radius: rb0,
                    min_roll,
                    max_roll,
                    ..
                },
            ) => {
                let z0 = shaper.tooth_count_z0 as f64;
                let z2 = gear.tooth_count_z2 as f64;
                let a = 0.5 * (z2 + z0) * mn;
                let l = a * sa;
                let rho_form = l - rb0 * max_roll;
                // Centre and orientation of the cutter at zero wheel angle so
                // that the two involutes touch at roll `xi_ref`.
                let u = [xi_ref.cos(), xi_ref.sin()];
                let n = involute_normal(xi_ref);
                let tc = [rb * u[0] + l * n[0], rb * u[1] + l * n[1]];
                let center0 = [tc[0] + rb0 * u[0], tc[1] + rb0 * u[1]];
                let t_c = (l - rb * xi_ref) / rb0;
                let gamma0 = xi_ref + std::f64::consts::PI - t_c;
                let kind = ModelKind::Shaper {
                    rb0,
                    z_ratio: z2 / z0,
                    center0,
                    gamma0,
                    min_roll,
                    max_roll,
                    tip_rounding: shaper.tip_rounding,
                };
                (rho_form, kind)
            }
            _ => unreachable!("tool shape always matches the tool kind"),
        };
        let rho_base_form = rho_form.max(0.0);
        if rho_base_form >= rho_tip {
            return Err(Error::InvalidGeometry(format!(
                "form point (roll length {rho_form:.4} mm) lies above the tip ({rho_tip:.4} mm)"
            )));
        }
        let xi_form = rho_base_form / rb;
        let xi_tip = rho_tip / rb;
        Ok(Self {
            gear: *gear,
            tool: *tool,
            side,
            curve,
            rb,
            alpha,
            xi_ref,
            xi_form,
            xi_tip,
            s_form: 0.5 * rb * xi_form * xi_form,
            s_tip: 0.5 * rb * xi_tip * xi_tip,
            kind,
        })
    }

    pub fn gear(&self) -> &GearSpec {
        &self.gear
    }

    pub fn tool(&self) -> &Tool {
        &self.tool
    }

    pub fn tool_curve(&self) -> &ToolFlankCurve {
        &self.curve
    }

    /// Roll angles (rad) of the form point and the tip.
    pub fn roll_range(&self) -> (f64, f64) {
        (self.xi_form, self.xi_tip)
    }

    /// Involute length between form point and tip, μm.
    pub fn flank_length_um(&self) -> f64 {
        (self.s_tip - self.s_form) * 1000.0
    }

    /// Roll angle of the flank point at arc length `u_um` from the form point.
    pub fn roll_at(&self, u_um: f64) -> f64 {
        (2.0 * (self.s_form + u_um / 1000.0) / self.rb).sqrt()
    }

    pub fn flank_point(&self, u_um: f64) -> Point {
        involute_point_unchecked(self.rb, self.roll_at(u_um))
    }

    /// Wheel angle (rad) at which the generating contact sits at roll `xi`.
    pub fn contact_wheel_angle(&self, xi: f64) -> f64 {
        self.xi_ref - xi
    }

    /// In-plane clearance (μm) between nominal flank point `u_um` and the
    /// tool in the position of `pass`; `+∞` when the tool cannot reach it.
    pub fn in_plane_gap(&self, pass: &GenerationPass, u_um: f64) -> f64 {
        let q = self.flank_point(u_um);
        let psi = pass.phase_deg.to_radians();
        match self.kind {
            ModelKind::Hob {
                rounding_depth,
                tip_rounding,
                top_depth,
                ..
            } => {
                let (sa, ca) = self.alpha.sin_cos();
                let theta = self.xi_ref - psi;
                let b = tangent_shift(self.gear.pitch_diameter_dt, pass.phase_deg);
                let n = involute_normal(theta);
                let offset = self.rb * self.xi_ref - b * ca;
                let eta = offset - (q[0] * n[0] + q[1] * n[1]);
                // Position along the flank line relative to its tangency
                // point, and the rack depth there.
                let c = involute_point_unchecked(self.rb, theta);
                let t = [theta.cos(), theta.sin()];
                let s = (q[0] - c[0]) * t[0] + (q[1] - c[1]) * t[1];
                let depth_c = (self.gear.pitch_radius() * sa - self.rb * theta) * sa;
                let depth = depth_c - s * ca;
                if depth < top_depth {
                    return f64::INFINITY;
                }
                let gap = if depth <= rounding_depth || tip_rounding <= 0.0 {
                    eta
                } else {
                    let s_r = (depth_c - rounding_depth) / ca;
                    (eta + tip_rounding).hypot(s - s_r) - tip_rounding
                };
                gap * 1000.0
            }
            ModelKind::Shaper {
                rb0,
                z_ratio,
                center0,
                gamma0,
                min_roll,
                max_roll,
                tip_rounding,
            } => {
                let (sp, cp) = (-psi).sin_cos();
                let o = [cp * center0[0] - sp * center0[1], sp * center0[0] + cp * center0[1]];
                let gamma = gamma0 - psi - psi * z_ratio;
                let (sg, cg) = (-gamma).sin_cos();
                let d = [q[0] - o[0], q[1] - o[1]];
                let ql = [cg * d[0] - sg * d[1], sg * d[0] + cg * d[1]];
                let Some((dist, t)) = involute_distance(rb0, ql) else {
                    return f64::INFINITY;
                };
                if t < min_roll {
                    return f64::INFINITY;
                }
                let gap = if t <= max_roll || tip_rounding <= 0.0 {
                    dist
                } else {
                    let p = involute_point_unchecked(rb0, max_roll);
                    let nn = involute_normal(max_roll);
                    let c = [p[0] - tip_rounding * nn[0], p[1] - tip_rounding * nn[1]];
                    (ql[0] - c[0]).hypot(ql[1] - c[1]) - tip_rounding
                };
                gap * 1000.0
            }
        }
    }

    /// Axial clearance (μm) from the hob-cylinder sagitta; zero for shaping
    /// and for hobbing without feed.
    pub fn axial_gap(&self, pass: &GenerationPass, v_um: f64) -> f64 {
        match self.kind {
            ModelKind::Hob { d0, fa, .. } if fa > 0.0 => {
                let w = v_um / 1000.0 - pass.axial_center_mm;
                let r0 = 0.5 * d0;
                if w.abs() > r0 {
                    f64::INFINITY
                } else {
                    self.alpha.tan() * (r0 - (r0 * r0 - w * w).sqrt()) * 1000.0
                }
            }
            _ => 0.0,
        }
    }

    /// Clearance of flank point `(u, v)` (μm) for one pass.
    pub fn cut_depth(&self, pass: &GenerationPass, u_um: f64, v_um: f64) -> f64 {
        self.in_plane_gap(pass, u_um) + self.axial_gap(pass, v_um)
    }

    pub fn u_axis(&self, nu: usize) -> Vec<f64> {
        let len = self.flank_length_um();
        (0..nu).map(|i| len * i as f64 / (nu - 1) as f64).collect()
    }

    pub fn v_axis(&self, nv: usize) -> Vec<f64> {
        let w = self.gear.face_width * 1000.0;
        (0..nv).map(|i| w * i as f64 / (nv - 1) as f64).collect()
    }

    fn stroke_window(&self, params: &GenerationParams) -> (i64, i64) {
        let step = params.wheel_step_dphi.to_radians();
        let lo = ((self.xi_ref - self.xi_tip) / step).floor() as i64 - params.passes_margin as i64;
        let hi = ((self.xi_ref - self.xi_form) / step).ceil() as i64 + params.passes_margin as i64;
        (lo, hi)
    }

    fn revolution_window(&self) -> (i64, i64) {
        match self.kind {
            ModelKind::Hob { d0, fa, .. } if fa > 0.0 => {
                let r0 = 0.5 * d0;
                let lo = (-r0 / fa).floor() as i64 - 1;
                let hi = ((self.gear.face_width + r0) / fa).ceil() as i64 + 1;
                (lo, hi)
            }
            _ => (0, 0),
        }
    }

    fn make_pass(&self, index: usize, stroke: i64, revolution: i64, dphi: f64) -> GenerationPass {
        let phase = stroke as f64 * dphi;
        let wheel = phase + 360.0 * revolution as f64;
        let (axial, tool_angle) = match self.kind {
            ModelKind::Hob { fa, .. } => (fa * wheel / 360.0, 0.0),
            ModelKind::Shaper { z_ratio, .. } => (0.0, wheel * z_ratio),
        };
        GenerationPass {
            index,
            stroke,
            revolution,
            wheel_angle_deg: wheel,
            phase_deg: phase,
            tool_shift_mm: tangent_shift(self.gear.pitch_diameter_dt, wheel),
            axial_center_mm: axial,
            tool_angle_deg: tool_angle,
        }
    }

    /// Passes covering the engagement window plus margin, ordered by wheel
    /// angle.
    pub fn plan_passes(&self, params: &GenerationParams) -> Result<Vec<GenerationPass>> {
        params.validate()?;
        let (j0, j1) = self.stroke_window(params);
        let (m0, m1) = self.revolution_window();
        let mut passes = Vec::with_capacity(((j1 - j0 + 1) * (m1 - m0 + 1)) as usize);
        for m in m0..=m1 {
            for j in j0..=j1 {
                passes.push(self.make_pass(passes.len(), j, m, params.wheel_step_dphi));
            }
        }
        Ok(passes)
    }
}

pub fn plan_passes(gear: &GearSpec, tool: &Tool, params: &GenerationParams) -> Result<Vec<GenerationPass>> {
    FlankModel::new(gear, tool, FlankSide::Drive)?.plan_passes(params)
}

/// Gap of one flank point for one pass, μm.
pub fn cut_depth(model: &FlankModel, pass: &GenerationPass, u_um: f64, v_um: f64) -> f64 {
    model.cut_depth(pass, u_um, v_um)
}

fn check_envelope(deviations: &[f64]) -> Result<()> {
    let uncut = deviations.iter().filter(|d| !d.is_finite()).count();
    if uncut > 0 {
        return Err(Error::EmptyEnvelope(format!(
            "{uncut} of {} grid cells are not reached by any pass",
            deviations.len()
        )));
    }
    Ok(())
}

/// Envelope over an explicit pass list. Evaluates every pass at every cell.
pub fn simulate_with_passes(
    model: &FlankModel,
    passes: &[GenerationPass],
    nu: usize,
    nv: usize,
) -> Result<GenerationRun> {
    if nu < MIN_GRID || nv < MIN_GRID {
        return Err(Error::InvalidParams(format!("grid must be at least {MIN_GRID}x{MIN_GRID}")));
    }
    if passes.is_empty() {
        return Err(Error::EmptyEnvelope("no passes".into()));
    }
    let u_axis = model.u_axis(nu);
    let v_axis = model.v_axis(nv);
    let rows: Vec<(Vec<f64>, Vec<usize>)> = u_axis
        .par_iter()
        .map(|&u| {
            let g: Vec<f64> = passes.iter().map(|p| model.in_plane_gap(p, u)).collect();
            let mut row = vec![f64::INFINITY; nv];
            let mut winners = Vec::new();
            for (iv, &v) in v_axis.iter().enumerate() {
                let mut best = f64::INFINITY;
                let mut first = winners.len();
                for (k, p) in passes.iter().enumerate() {
                    if !g[k].is_finite() {
                        continue;
                    }
                    let d = g[k] + model.axial_gap(p, v);
                    if d < best {
                        best = d;
                        winners.truncate(first);
                        first = winners.len();
                        winners.push(k);
                    } else if d == best && d.is_finite() {
                        winners.push(k);
                    }
                }
                row[iv] = best;
            }
            (row, winners)
        })
        .collect();
    finish(model, passes.to_vec(), u_axis, v_axis, rows)
}

fn finish(
    model: &FlankModel,
    passes: Vec<GenerationPass>,
    u_axis: Vec<f64>,
    v_axis: Vec<f64>,
    rows: Vec<(Vec<f64>, Vec<usize>)>,
) -> Result<GenerationRun> {
    let mut engaged = vec![false; passes.len()];
    let mut deviations = Vec::with_capacity(u_axis.len() * v_axis.len());
    for (row, winners) in rows {
        deviations.extend(row);
        for k in winners {
            engaged[k] = true;
        }
    }
    check_envelope(&deviations)?;
    Ok(GenerationRun {
        grid: FlankGrid {
            nu: u_axis.len(),
            nv: v_axis.len(),
            deviations,
            u_axis,
            v_axis,
            side: model.side,
            gear: model.gear,
        },
        passes,
        engaged,
    })
}

/// Envelope for planned passes. Uses the separable form
/// `min_j [G_j(u) + min_m S_{j,m}(v)]`, which equals the pass-by-pass
/// minimum because the in-plane gap depends only on the stroke.
fn simulate_planned(model: &FlankModel, params: &GenerationParams) -> Result<GenerationRun> {
    let passes = model.plan_passes(params)?;
    let nu = params.grid_nu;
    let nv = params.grid_nv;
    let u_axis = model.u_axis(nu);
    let v_axis = model.v_axis(nv);

    // Group pass indices by stroke; all revolutions share a phase.
    let (j0, j1) = model.stroke_window(params);
    let nj = (j1 - j0 + 1) as usize;
    let mut by_stroke: Vec<Vec<usize>> = vec![Vec::new(); nj];
    for p in &passes {
        by_stroke[(p.stroke - j0) as usize].push(p.index);
    }
    // Best axial clearance per stroke and v, with the tied passes.
    let axial: Vec<Vec<(f64, Vec<usize>)>> = by_stroke
        .par_iter()
        .map(|ks| {
            v_axis
                .iter()
                .map(|&v| {
                    let mut best = f64::INFINITY;
                    let mut who = Vec::new();
                    for &k in ks {
                        let s = model.axial_gap(&passes[k], v);
                        if s < best {
                            best = s;
                            who.clear();
                            who.push(k);
                        } else if s == best && s.is_finite() {
                            who.push(k);
                        }
                    }
                    (best, who)
                })
                .collect()
        })
        .collect();
    let reps: Vec<usize> = by_stroke.iter().map(|ks| ks[0]).collect();

    let rows: Vec<(Vec<f64>, Vec<usize>)> = u_axis
        .par_iter()
        .map(|&u| {
            let g: Vec<f64> = reps.iter().map(|&k| model.in_plane_gap(&passes[k], u)).collect();
            let mut row = vec![f64::INFINITY; nv];
            let mut winners = Vec::new();
            let mut tied: Vec<usize> = Vec::new();
            for iv in 0..nv {
                let mut best = f64::INFINITY;
                tied.clear();
                for j in 0..nj {
                    if !g[j].is_finite() {
                        continue;
                    }
                    let d = g[j] + axial[j][iv].0;
                    if d < best {
                        best = d;
                        tied.clear();
                        tied.push(j);
                    } else if d == best && d.is_finite() {
                        tied.push(j);
                    }
                }
                row[iv] = best;
                for &j in &tied {
                    winners.extend_from_slice(&axial[j][iv].1);
                }
            }
            winners.sort_unstable();
            winners.dedup();
            (row, winners)
        })
        .collect();
    finish(model, passes, u_axis, v_axis, rows)
}

pub fn simulate_hobbing(gear: &GearSpec, hob: &HobSpec, params: &GenerationParams) -> Result<GenerationRun> {
    let model = FlankModel::new(gear, &Tool::Hob(*hob), FlankSide::Drive)?;
    simulate_planned(&model, params)
}

pub fn simulate_fellows(gear: &GearSpec, shaper: &ShaperSpec, params: &GenerationParams) -> Result<GenerationRun> {
    let model = FlankModel::new(gear, &Tool::Shaper(*shaper), FlankSide::Drive)?;
    simulate_planned(&model, params)
}

pub fn simulate(gear: &GearSpec, tool: &Tool, side: FlankSide, params: &GenerationParams) -> Result<GenerationRun> {
    let model = FlankModel::new(gear, tool, side)?;
    simulate_planned(&model, params)
}

/// Number of distinct strokes whose passes form part of the envelope.
pub fn engagement_count(run: &GenerationRun) -> usize {
    let mut strokes: Vec<i64> = run
        .passes
        .iter()
        .zip(&run.engaged)
        .filter(|(_, &e)| e)
        .map(|(p, _)| p.stroke)
        .collect();
    strokes.sort_unstable();
    strokes.dedup();
    strokes.len()
}

pub fn extract_profile(grid: &FlankGrid, direction: TraceDirection, position: usize) -> Result<Profile> {
    match direction {
        TraceDirection::AlongProfile => {
            if position >= grid.nv {
                return Err(Error::OutOfRange(format!(
                    "axial index {position} outside 0..{}",
                    grid.nv
                )));
            }
            Profile::primitive(grid.row_along_u(position), grid.du())
        }
        TraceDirection::AlongHelix => {
            if position >= grid.nu {
                return Err(Error::OutOfRange(format!(
                    "profile index {position} outside 0..{}",
                    grid.nu
                )));
            }
            Profile::primitive(grid.row_along_v(position), grid.dv())
        }
    }
}

/// Largest cusp height along `u` (μm), read at the axial column lying on
/// the feed-mark floor (smallest mean deviation). A cusp is a local maximum
/// measured against the mean of the minima on either side.
pub fn profile_scallop_height(grid: &FlankGrid) -> f64 {
    let floor = (0..grid.nv)
        .map(|iv| (iv, (0..grid.nu).map(|iu| grid.at(iu, iv)).sum::<f64>()))
        .fold((0, f64::INFINITY), |b, (iv, s)| if s < b.1 { (iv, s) } else { b })
        .0;
    max_cusp(&grid.row_along_u(floor))
}

pub(crate) fn max_cusp(d: &[f64]) -> f64 {
    let n = d.len();
    let mut best = 0.0f64;
    for i in 1..n - 1 {
        if !(d[i] > d[i - 1] && d[i] >= d[i + 1]) {
            continue;
        }
        let mut l = i;
        while l > 0 && d[l - 1] <= d[l] {
            l -= 1;
        }
        let mut r = i;
        while r + 1 < n && d[r + 1] <= d[r] {
            r += 1;
        }
        best = best.max(d[i] - 0.5 * (d[l] + d[r]));
    }
    best
}

/// Largest peak-to-valley along `v` over all `u` (μm).
pub fn feed_mark_height(grid: &FlankGrid) -> f64 {
    (0..grid.nu)
        .map(|iu| {
            let row = &grid.deviations[iu * grid.nv..(iu + 1) * grid.nv];
            let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .fold(0.0, f64::max)
}
