//! End-to-end analysis pipelines producing reports and plot series.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::report::{ParameterReport, Status};
use super::sig;
use crate::accuracy::DeviationReport;
use crate::areal::{
    areal_height_params, areal_material_params, areal_psd_params, fractal_dimension, gaussian_filter_areal,
    hybrid_params, remove_form_areal, summit_params, texture_params, ArealForm, ArealMaterialParams, ArealPsd,
    HeightParams, Heightmap, HybridParams, SummitParams, TextureParams, VolumeParams, DEFAULT_DECAY_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::profile::{
    acf_analysis, amplitude_params, conregular_analysis, fit_reference_detailed, gaussian_filter, kalpha,
    material_curve_analysis, peak_params, psd_analysis, slope_params, spacing_params, AcfResult, AmplitudeParams,
    ConregularResult, MaterialAnalysis, MaterialRatioCurve, PeakParams, Profile, PsdResult,
    ReferenceForm, SlopeParams, SlopeStencil, SpacingParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    Acf,
    Psd,
    Cumpsd,
    MaterialCurve,
    SlopeIncrease,
    AngularPsd,
}

impl PlotKind {
    pub const ALL: [PlotKind; 6] = [
        PlotKind::Acf,
        PlotKind::Psd,
        PlotKind::Cumpsd,
        PlotKind::MaterialCurve,
        PlotKind::SlopeIncrease,
        PlotKind::AngularPsd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PlotKind::Acf => "acf",
            PlotKind::Psd => "psd",
            PlotKind::Cumpsd => "cumpsd",
            PlotKind::MaterialCurve => "material-curve",
            PlotKind::SlopeIncrease => "slope-increase",
            PlotKind::AngularPsd => "angular-psd",
        }
    }
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown plot kind '{s}'")))
    }
}

/// Two-column numeric series with named axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub kind: PlotKind,
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PlotSeries {
    fn new(kind: PlotKind, x_label: &str, y_label: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self {
            kind,
            x_label: x_label.into(),
            y_label: y_label.into(),
            x,
            y,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.x.len() * 32 + 64);
        writeln!(out, "# kind={}", self.kind.as_str()).unwrap();
        writeln!(out, "# {} {}", self.x_label, self.y_label).unwrap();
        for (x, y) in self.x.iter().zip(&self.y) {
            writeln!(out, "{} {}", sig(*x), sig(*y)).unwrap();
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

const CURVE_POINTS: usize = 1001;

fn material_series(curve: &MaterialRatioCurve) -> PlotSeries {
    let ratio: Vec<f64> = (0..CURVE_POINTS).map(|k| k as f64 / (CURVE_POINTS - 1) as f64).collect();
    let height = ratio.iter().map(|&p| curve.height_at(p)).collect();
    PlotSeries::new(PlotKind::MaterialCurve, "ratio", "height_um", ratio, height)
}

fn msg<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn push_result<T>(
    rep: &mut ParameterReport,
    r: &std::result::Result<T, String>,
    name: &str,
    unit: &str,
    get: impl Fn(&T) -> Option<f64>,
) -> Result<()> {
    match r {
        Ok(v) => rep.push(name, get(v), unit),
        Err(e) => rep.push_status(name, None, unit, Status::Undefined, Some(e.clone())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    pub form: ReferenceForm,
    /// Gaussian cutoff, mm; without one the form-removed primitive profile
    /// is evaluated.
    pub lc_mm: Option<f64>,
    pub slope: SlopeStencil,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            form: ReferenceForm::Poly5,
            lc_mm: None,
            slope: SlopeStencil::Seven,
        }
    }
}

/// Every profile result, with per-analysis failures kept as messages.
#[derive(Debug, Clone)]
pub struct ProfileAnalysis {
    pub evaluated: Profile,
    pub form_radius: Option<f64>,
    pub amplitude: AmplitudeParams,
    pub spacing: std::result::Result<SpacingParams, String>,
    pub slope: std::result::Result<SlopeParams, String>,
    pub peaks: std::result::Result<PeakParams, String>,
    pub acf: std::result::Result<AcfResult, String>,
    pub psd: std::result::Result<PsdResult, String>,
    pub material: std::result::Result<MaterialAnalysis, String>,
    pub conregular: ConregularResult,
}

/// Form removal and filtering failures abort; later analyses degrade to
/// undefined entries.
pub fn analyze_profile(profile: &Profile, opts: &ProfileOptions) -> Result<ProfileAnalysis> {
    let fit = fit_reference_detailed(profile, opts.form)?;
    let evaluated = match opts.lc_mm {
        Some(lc) => gaussian_filter(&fit.residual, lc)?.roughness,
        None => fit.residual,
    };
    Ok(ProfileAnalysis {
        form_radius: fit.radius,
        amplitude: amplitude_params(&evaluated),
        spacing: msg(spacing_params(&evaluated)),
        slope: msg(slope_params(&evaluated, opts.slope)),
        peaks: msg(peak_params(&evaluated)),
        acf: msg(acf_analysis(&evaluated)),
        psd: msg(psd_analysis(&evaluated)),
        material: msg(material_curve_analysis(&evaluated)),
        conregular: conregular_analysis(&evaluated),
        evaluated,
    })
}

impl ProfileAnalysis {
    pub fn report(&self) -> Result<ParameterReport> {
        let mut r = ParameterReport::new();
        let a = &self.amplitude;
        let p = &self.evaluated;
        r.push("length", Some(p.length()), "μm")?;
        r.push("dx", Some(p.dx()), "μm")?;
        if let Some(rad) = self.form_radius {
            r.push("form radius", Some(rad / 1000.0), "mm")?;
        }
        r.push("Pa", Some(a.pa), "μm")?;
        r.push("Pq", Some(a.pq), "μm")?;
        r.push("Pt", Some(a.pt), "μm")?;
        r.push("PzJIS", Some(a.pz_jis), "μm")?;
        r.push("Pp", Some(a.pp), "μm")?;
        r.push("Pv", Some(a.pv), "μm")?;
        r.push("Pp/Pt", a.pp_over_pt, "-")?;
        r.push("Psk", a.psk, "-")?;
        r.push("Pku", a.pku, "-")?;
        let m = &self.material;
        push_result(&mut r, m, "Pk", "μm", |m| Some(m.secant.pk))?;
        push_result(&mut r, m, "Ppk", "μm", |m| Some(m.secant.ppk))?;
        push_result(&mut r, m, "Pvk", "μm", |m| Some(m.secant.pvk))?;
        push_result(&mut r, m, "Mr1", "%", |m| Some(100.0 * m.secant.mr1))?;
        push_result(&mut r, m, "Mr2", "%", |m| Some(100.0 * m.secant.mr2))?;
        push_result(&mut r, m, "Ppq", "μm", |m| m.probability.map(|q| q.ppq))?;
        push_result(&mut r, m, "Pvq", "μm", |m| m.probability.map(|q| q.pvq))?;
        push_result(&mut r, m, "Pmq", "%", |m| m.probability.map(|q| 100.0 * q.pmq))?;
        push_result(&mut r, &self.spacing, "PS", "μm", |s| Some(s.ps))?;
        push_result(&mut r, &self.spacing, "PSm", "μm", |s| Some(s.psm))?;
        push_result(&mut r, &self.slope, "PΔq", "μm/μm", |s| Some(s.pdq))?;
        push_result(&mut r, &self.slope, "PΔa", "μm/μm", |s| Some(s.pda))?;
        push_result(&mut r, &self.slope, "Pλq", "μm", |s| s.plq)?;
        push_result(&mut r, &self.psd, "P(1/f)", "μm", |s| Some(s.knee_wavelength))?;
        match &self.acf {
            Ok(acf) => match acf.correlation_length {
                Some(l) => r.push("Pβ0.1", Some(l), "μm")?,
                None => r.push_status(
                    "Pβ0.1",
                    None,
                    "μm",
                    Status::NotReached,
                    Some("ACF stays above 0.1 within half the trace".into()),
                )?,
            },
            Err(e) => r.push_status("Pβ0.1", None, "μm", Status::Undefined, Some(e.clone()))?,
        }
        r.push("Pq²", Some(a.pq * a.pq), "μm²")?;
        push_result(&mut r, &self.peaks, "Ppc3", "1/μm", |s| Some(s.ppc3))?;
        push_result(&mut r, &self.peaks, "Pds3", "1/mm", |s| Some(s.pds3))?;
        push_result(&mut r, &self.peaks, "Pδ*", "μm", |s| Some(s.pdelta_star))?;
        push_result(&mut r, m, "dp1", "-", |m| m.three_parameter.map(|t| t.dp1))?;
        push_result(&mut r, m, "ypp", "-", |m| m.three_parameter.map(|t| t.ypp))?;
        push_result(&mut r, &self.psd, "G²(λ)", "μm²", |s| Some(s.total_power))?;
        let c = &self.conregular;
        let status = if c.warning.is_some() { Status::Warning } else { Status::Ok };
        r.push_status("rising runs", Some(c.rising.count as f64), "-", status, c.warning.clone())?;
        r.push_status("falling runs", Some(c.falling.count as f64), "-", status, None)?;
        r.push_status("rising slope", Some(c.rising.mean_slope), "μm/μm", status, None)?;
        r.push_status("falling slope", Some(c.falling.mean_slope), "μm/μm", status, None)?;
        Ok(r)
    }

    pub fn plot(&self, kind: PlotKind) -> Option<PlotSeries> {
        match kind {
            PlotKind::Acf => self.acf.as_ref().ok().map(|a| {
                let x = (0..a.acf.len()).map(|i| i as f64 * a.lag_step).collect();
                PlotSeries::new(kind, "lag_um", "acf", x, a.acf.clone())
            }),
            PlotKind::Psd => self.psd.as_ref().ok().map(|p| {
                PlotSeries::new(kind, "wavelength_um", "power_um2", p.power.wavelength.clone(), p.power.value.clone())
            }),
            PlotKind::Cumpsd => self.psd.as_ref().ok().map(|p| {
                PlotSeries::new(
                    kind,
                    "wavelength_um",
                    "cumulated_power_um2",
                    p.cumulated.wavelength.clone(),
                    p.cumulated.value.clone(),
                )
            }),
            PlotKind::MaterialCurve => self.material.as_ref().ok().map(|m| material_series(&m.curve)),
            PlotKind::SlopeIncrease => {
                let x = (0..self.evaluated.len()).map(|i| self.evaluated.x(i)).collect();
                Some(PlotSeries::new(kind, "x_um", "cumulative_rise_um", x, self.conregular.cumulative_rise.clone()))
            }
            PlotKind::AngularPsd => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArealOptions {
    pub form: ArealForm,
    pub lc_mm: Option<f64>,
    pub decay_threshold: f64,
}

impl Default for ArealOptions {
    fn default() -> Self {
        Self {
            form: ArealForm::Plane,
            lc_mm: None,
            decay_threshold: DEFAULT_DECAY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ArealAnalysis {
    pub evaluated: Heightmap,
    pub height: HeightParams,
    pub summits: std::result::Result<SummitParams, String>,
    pub hybrid: HybridParams,
    pub volume: std::result::Result<VolumeParams, String>,
    pub texture: std::result::Result<TextureParams, String>,
    pub psd: std::result::Result<ArealPsd, String>,
    pub sfd: std::result::Result<f64, String>,
    pub material: std::result::Result<ArealMaterialParams, String>,
    /// Kα from the mean variance of the helix traces (rows) against that
    /// of the profile traces (columns).
    pub kalpha: std::result::Result<f64, String>,
}

fn trace_variance(t: &[f64]) -> f64 {
    let m = t.iter().sum::<f64>() / t.len() as f64;
    t.iter().map(|v| (v - m).powi(2)).sum::<f64>() / t.len() as f64
}

/// Mean per-trace variance along rows and along columns.
pub fn directional_variances(map: &Heightmap) -> [f64; 2] {
    let rows = (0..map.ny).map(|iy| trace_variance(map.row(iy))).sum::<f64>() / map.ny as f64;
    let cols = (0..map.nx).map(|ix| trace_variance(&map.column(ix))).sum::<f64>() / map.nx as f64;
    [rows, cols]
}

pub fn analyze_areal(map: &Heightmap, opts: &ArealOptions) -> Result<ArealAnalysis> {
    let levelled = remove_form_areal(map, opts.form)?;
    let evaluated = match opts.lc_mm {
        Some(lc) => gaussian_filter_areal(&levelled, lc)?.roughness,
        None => levelled,
    };
    Ok(ArealAnalysis {
        height: areal_height_params(&evaluated),
        summits: msg(summit_params(&evaluated)),
        hybrid: hybrid_params(&evaluated),
        volume: msg(crate::areal::volume_params(&evaluated)),
        texture: msg(texture_params(&evaluated, opts.decay_threshold)),
        psd: msg(areal_psd_params(&evaluated)),
        sfd: msg(fractal_dimension(&evaluated)),
        material: msg(areal_material_params(&evaluated)),
        kalpha: msg(kalpha(&directional_variances(&evaluated)).map(|k| k.k_alpha)),
        evaluated,
    })
}

impl ArealAnalysis {
    pub fn report(&self) -> Result<ParameterReport> {
        let mut r = ParameterReport::new();
        let h = &self.height;
        let e = &self.evaluated;
        r.push("nx", Some(e.nx as f64), "-")?;
        r.push("ny", Some(e.ny as f64), "-")?;
        r.push("dx", Some(e.dx), "μm")?;
        r.push("dy", Some(e.dy), "μm")?;
        r.push("Sa", Some(h.sa), "μm")?;
        r.push("Sq", Some(h.sq), "μm")?;
        r.push("St", Some(h.st), "μm")?;
        r.push("Sp", Some(h.sp), "μm")?;
        r.push("Sv", Some(h.sv), "μm")?;
        r.push("Ssk", h.ssk, "-")?;
        r.push("Sku", h.sku, "-")?;
        push_result(&mut r, &self.volume, "Smmr", "mm³/mm²", |v| Some(v.smmr))?;
        push_result(&mut r, &self.volume, "Smvr", "mm³/mm²", |v| Some(v.smvr))?;
        push_result(&mut r, &self.summits, "Sds", "1/mm²", |s| Some(s.sds))?;
        let t = &self.texture;
        push_result(&mut r, t, "Str", "-", |t| Some(t.str_ratio))?;
        match t {
            Ok(t) if t.not_reached.iter().all(|&m| m) => r.push_status(
                "Sal",
                Some(t.sal),
                "μm",
                Status::NotReached,
                Some(format!("ACF stays above {} in every direction", t.threshold)),
            )?,
            _ => push_result(&mut r, t, "Sal", "μm", |t| Some(t.sal))?,
        }
        push_result(&mut r, t, "Std", "°", |t| Some(t.std_deg))?;
        push_result(&mut r, t, "isotropy", "%", |t| Some(t.isotropy_pct))?;
        push_result(&mut r, &self.sfd, "Sfd", "-", |v| Some(*v))?;
        let y = &self.hybrid;
        r.push("SΔq", Some(y.sdq), "μm/μm")?;
        push_result(&mut r, &self.summits, "Ssc", "1/μm", |s| Some(s.ssc))?;
        r.push("Sdr", Some(y.sdr), "%")?;
        push_result(&mut r, &self.volume, "Sbi", "-", |v| v.sbi)?;
        push_result(&mut r, &self.volume, "Sci", "-", |v| v.sci)?;
        push_result(&mut r, &self.volume, "Svi", "-", |v| v.svi)?;
        push_result(&mut r, &self.psd, "S(1/fx)", "μm", |p| p.knee_x)?;
        push_result(&mut r, &self.psd, "S(1/fy)", "μm", |p| p.knee_y)?;
        r.push("SΔax", Some(y.sdax), "μm/μm")?;
        r.push("SΔay", Some(y.sday), "μm/μm")?;
        push_result(&mut r, &self.summits, "Sqsum", "μm", |s| Some(s.sqsum))?;
        push_result(&mut r, &self.summits, "Sscx", "1/μm", |s| Some(s.sscx))?;
        push_result(&mut r, &self.summits, "Sscy", "1/μm", |s| Some(s.sscy))?;
        let m = &self.material;
        push_result(&mut r, m, "Spq", "μm", |m| m.probability.map(|q| q.ppq))?;
        push_result(&mut r, m, "Svq", "μm", |m| m.probability.map(|q| q.pvq))?;
        push_result(&mut r, m, "Smq", "-", |m| m.probability.map(|q| q.pmq))?;
        push_result(&mut r, m, "Spk", "μm", |m| Some(m.secant.ppk))?;
        push_result(&mut r, m, "Svk", "μm", |m| Some(m.secant.pvk))?;
        push_result(&mut r, m, "Sk", "μm", |m| Some(m.secant.pk))?;
        push_result(&mut r, m, "Sr1", "-", |m| Some(m.secant.mr1))?;
        push_result(&mut r, m, "Sr2", "-", |m| Some(m.secant.mr2))?;
        push_result(&mut r, m, "dp1", "-", |m| m.three_parameter.map(|t| t.dp1))?;
        push_result(&mut r, m, "ypp", "-", |m| m.three_parameter.map(|t| t.ypp))?;
        push_result(&mut r, &self.kalpha, "Kα", "-", |k| Some(*k))?;
        Ok(r)
    }

    /// Areal plots; `Psd` and `Cumpsd` return the spectrum along `x`.
    pub fn plot(&self, kind: PlotKind) -> Option<PlotSeries> {
        match kind {
            PlotKind::AngularPsd => self.psd.as_ref().ok().map(|p| {
                let x = (0..p.angular.len()).map(|d| d as f64).collect();
                PlotSeries::new(kind, "angle_deg", "power_um2", x, p.angular.clone())
            }),
            PlotKind::MaterialCurve => self.material.as_ref().ok().map(|m| material_series(&m.curve)),
            PlotKind::Psd => self.psd.as_ref().ok().map(|p| {
                PlotSeries::new(kind, "wavelength_x_um", "power_um2", p.wavelength_x.clone(), p.power_x.clone())
            }),
            PlotKind::Cumpsd => self.psd.as_ref().ok().map(|p| {
                let mut acc = 0.0;
                let y = p
                    .power_x
                    .iter()
                    .rev()
                    .map(|v| {
                        acc += v;
                        acc
                    })
                    .collect::<Vec<_>>()
                    .into_iter()
                    .rev()
                    .collect();
                PlotSeries::new(kind, "wavelength_x_um", "cumulated_power_um2", p.wavelength_x.clone(), y)
            }),
            PlotKind::Acf | PlotKind::SlopeIncrease => None,
        }
    }
}

pub fn deviation_parameters(rep: &DeviationReport) -> Result<ParameterReport> {
    let mut r = ParameterReport::new();
    for s in [&rep.drive, &rep.non_drive] {
        let tag = s.side.as_str();
        r.push(&format!("Fα {tag}"), s.f_alpha, "μm")?;
        r.push(&format!("Fα {tag} std"), s.f_alpha_std, "μm")?;
        r.push(&format!("Fβ {tag}"), s.f_beta, "μm")?;
        r.push(&format!("Fβ {tag} std"), s.f_beta_std, "μm")?;
        r.push(&format!("fpt {tag}"), Some(s.pitch.f_pt), "μm")?;
        r.push(&format!("fpt {tag} std"), Some(s.pitch.single_std), "μm")?;
        r.push(&format!("Fp {tag}"), Some(s.pitch.f_p), "μm")?;
    }
    r.push("Fr", Some(rep.runout.f_r), "μm")?;
    r.push("Fr std", Some(rep.runout.std), "μm")?;
    r.push("Rs", Some(rep.thickness.r_s), "μm")?;
    r.push("Rs std", Some(rep.thickness.std), "μm")?;
    Ok(r)
}
