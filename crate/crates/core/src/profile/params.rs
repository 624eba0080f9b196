use serde::Serialize;

use super::{mean, Profile};
use crate::error::{Error, Result};

/// Elementary (sampling) length used for PzJIS, μm.
pub const PZ_SAMPLING_LENGTH: f64 = 800.0;

/// Relative hysteresis (fraction of Pt) used when picking local peaks.
pub const PEAK_HYSTERESIS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeParams {
    pub pa: f64,
    pub pq: f64,
    pub pt: f64,
    pub pp: f64,
    pub pv: f64,
    /// `None` when Pt = 0.
    pub pp_over_pt: Option<f64>,
    /// `None` when Pq = 0.
    pub psk: Option<f64>,
    /// `None` when Pq = 0.
    pub pku: Option<f64>,
    pub pz_jis: f64,
    /// Number of sampling lengths used for PzJIS (3 or 5).
    pub pz_segments: usize,
}

/// Height parameters about the mean line.
pub fn amplitude_params(profile: &Profile) -> AmplitudeParams {
    let z = profile.centered();
    let n = z.len() as f64;
    let pa = z.iter().map(|v| v.abs()).sum::<f64>() / n;
    let m2 = z.iter().map(|v| v * v).sum::<f64>() / n;
    let pq = m2.sqrt();
    let pp = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pv = -z.iter().cloned().fold(f64::INFINITY, f64::min);
    let pt = pp + pv;
    let (psk, pku) = if pq > 0.0 {
        let m3 = z.iter().map(|v| v * v * v).sum::<f64>() / n;
        let m4 = z.iter().map(|v| v * v * v * v).sum::<f64>() / n;
        (Some(m3 / (pq * pq * pq)), Some(m4 / (m2 * m2)))
    } else {
        (None, None)
    };
    let (pz_jis, pz_segments) = pz_jis(&z, profile.dx());
    AmplitudeParams {
        pa,
        pq,
        pt,
        pp,
        pv,
        pp_over_pt: (pt > 0.0).then(|| pp / pt),
        psk,
        pku,
        pz_jis,
        pz_segments,
    }
}

fn pz_jis(z: &[f64], dx: f64) -> (f64, usize) {
    let length = (z.len() - 1) as f64 * dx;
    let (count, seg_len) = if length >= 5.0 * PZ_SAMPLING_LENGTH {
        (5, PZ_SAMPLING_LENGTH)
    } else if length >= 3.0 * PZ_SAMPLING_LENGTH {
        (3, PZ_SAMPLING_LENGTH)
    } else {
        (3, length / 3.0)
    };
    let per = ((seg_len / dx).round() as usize).max(3);
    let mut sum = 0.0;
    for s in 0..count {
        let lo = s * per;
        let hi = ((s + 1) * per + 1).min(z.len());
        let seg = &z[lo..hi];
        sum += five_extreme_mean(seg, true) - five_extreme_mean(seg, false);
    }
    (sum / count as f64, count)
}

/// Mean of up to five highest local peaks (or deepest valleys) in a segment,
/// falling back to the segment extreme when it has no interior extremum.
fn five_extreme_mean(seg: &[f64], peaks: bool) -> f64 {
    let sign = if peaks { 1.0 } else { -1.0 };
    let mut vals: Vec<f64> = (1..seg.len() - 1)
        .filter(|&i| {
            let (a, b, c) = (sign * seg[i - 1], sign * seg[i], sign * seg[i + 1]);
            b > a && b >= c
        })
        .map(|i| sign * seg[i])
        .collect();
    if vals.is_empty() {
        vals.push(seg.iter().map(|v| sign * v).fold(f64::NEG_INFINITY, f64::max));
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    vals.truncate(5);
    sign * mean(&vals)
}

/// Indices of 3-point local maxima that stand at least `hysteresis` above
/// the deepest point separating them from their neighbouring candidates.
pub fn local_peaks(z: &[f64], hysteresis: f64) -> Vec<usize> {
    let n = z.len();
    if n < 3 {
        return Vec::new();
    }
    let cand: Vec<usize> = (1..n - 1).filter(|&i| z[i] > z[i - 1] && z[i] >= z[i + 1]).collect();
    if hysteresis <= 0.0 {
        return cand;
    }
    let min_in = |a: usize, b: usize| z[a..=b].iter().cloned().fold(f64::INFINITY, f64::min);
    cand.iter()
        .enumerate()
        .filter(|&(k, &i)| {
            let left = if k == 0 { 0 } else { cand[k - 1] };
            let right = if k + 1 == cand.len() { n - 1 } else { cand[k + 1] };
            let floor = min_in(left, i).max(min_in(i, right));
            z[i] - floor >= hysteresis
        })
        .map(|(_, &i)| i)
        .collect()
}

fn peak_hysteresis(z: &[f64]) -> f64 {
    let hi = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = z.iter().cloned().fold(f64::INFINITY, f64::min);
    PEAK_HYSTERESIS * (hi - lo)
}

/// Sub-sample peak position from the parabola through three ordinates.
fn vertex_offset(z: &[f64], i: usize) -> f64 {
    let d = z[i - 1] - 2.0 * z[i] + z[i + 1];
    if d == 0.0 {
        0.0
    } else {
        0.5 * (z[i - 1] - z[i + 1]) / d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacingParams {
    pub psm: f64,
    pub ps: f64,
}

pub fn spacing_params(profile: &Profile) -> Result<SpacingParams> {
    let z = profile.centered();
    let dx = profile.dx();
    let ups: Vec<f64> = (0..z.len() - 1)
        .filter(|&i| z[i] < 0.0 && z[i + 1] >= 0.0)
        .map(|i| (i as f64 + z[i] / (z[i] - z[i + 1])) * dx)
        .collect();
    if ups.len() < 2 {
        return Err(Error::NoFeatures("fewer than two mean-line up-crossings".into()));
    }
    let psm = (ups[ups.len() - 1] - ups[0]) / (ups.len() - 1) as f64;

    let peaks = local_peaks(&z, peak_hysteresis(&z));
    if peaks.len() < 2 {
        return Err(Error::NoFeatures("fewer than two local peaks".into()));
    }
    let first = peaks[0] as f64 + vertex_offset(&z, peaks[0]);
    let last = *peaks.last().unwrap();
    let last = last as f64 + vertex_offset(&z, last);
    let ps = (last - first) * dx / (peaks.len() - 1) as f64;
    Ok(SpacingParams { psm, ps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeStencil {
    Two,
    Three,
    Seven,
}

impl SlopeStencil {
    pub fn from_points(points: u32) -> Result<Self> {
        match points {
            2 => Ok(SlopeStencil::Two),
            3 => Ok(SlopeStencil::Three),
            7 => Ok(SlopeStencil::Seven),
            p => Err(Error::InvalidParams(format!("slope stencil must use 2, 3 or 7 points, got {p}"))),
        }
    }

    pub fn points(&self) -> usize {
        match self {
            SlopeStencil::Two => 2,
            SlopeStencil::Three => 3,
            SlopeStencil::Seven => 7,
        }
    }
}

/// Local slopes of `z` with the given stencil (interior points only).
pub(crate) fn slopes(z: &[f64], dx: f64, stencil: SlopeStencil) -> Vec<f64> {
    let n = z.len();
    match stencil {
        SlopeStencil::Two => (0..n - 1).map(|i| (z[i + 1] - z[i]) / dx).collect(),
        SlopeStencil::Three => (1..n - 1).map(|i| (z[i + 1] - z[i - 1]) / (2.0 * dx)).collect(),
        SlopeStencil::Seven => (3..n - 3)
            .map(|i| {
                (z[i + 3] - 9.0 * z[i + 2] + 45.0 * z[i + 1] - 45.0 * z[i - 1] + 9.0 * z[i - 2] - z[i - 3])
                    / (60.0 * dx)
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeParams {
    pub pda: f64,
    pub pdq: f64,
    /// `None` when PΔq = 0.
    pub plq: Option<f64>,
}

pub fn slope_params(profile: &Profile, stencil: SlopeStencil) -> Result<SlopeParams> {
    if profile.len() < stencil.points() + 1 {
        return Err(Error::InsufficientData(format!(
            "{}-point slope needs more than {} samples",
            stencil.points(),
            stencil.points()
        )));
    }
    let s = slopes(profile.z(), profile.dx(), stencil);
    let n = s.len() as f64;
    let pda = s.iter().map(|v| v.abs()).sum::<f64>() / n;
    let pdq = (s.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    let pq = super::variance(profile.z()).sqrt();
    Ok(SlopeParams {
        pda,
        pdq,
        plq: (pdq > 0.0).then(|| 2.0 * std::f64::consts::PI * pq / pdq),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakParams {
    /// Mean peak curvature, 1/μm.
    pub ppc3: f64,
    /// Peaks per mm.
    pub pds3: f64,
    /// RMS peak height about the mean line, μm.
    pub pdelta_star: f64,
    pub peak_count: usize,
    /// Sampling step the parameters were computed at, μm.
    pub step: f64,
}

pub fn peak_params(profile: &Profile) -> Result<PeakParams> {
    let z = profile.centered();
    let dx = profile.dx();
    let peaks = local_peaks(&z, peak_hysteresis(&z));
    if peaks.is_empty() {
        return Err(Error::NoFeatures("no local peaks".into()));
    }
    let k = peaks.len() as f64;
    let ppc3 = peaks
        .iter()
        .map(|&i| (z[i - 1] - 2.0 * z[i] + z[i + 1]).abs() / (dx * dx))
        .sum::<f64>()
        / k;
    let pdelta_star = (peaks.iter().map(|&i| z[i] * z[i]).sum::<f64>() / k).sqrt();
    Ok(PeakParams {
        ppc3,
        pds3: k / (profile.length() / 1000.0),
        pdelta_star,
        peak_count: peaks.len(),
        step: dx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnisotropyResult {
    pub pq2_max: f64,
    pub pq2_min: f64,
    pub k_alpha: f64,
}

/// Anisotropy index from a set of directional variances (μm²).
pub fn kalpha(variances: &[f64]) -> Result<AnisotropyResult> {
    if variances.len() < 2 {
        return Err(Error::InsufficientData("anisotropy needs at least two variances".into()));
    }
    if variances.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParams("variances must be finite and non-negative".into()));
    }
    let max = variances.iter().cloned().fold(0.0, f64::max);
    let min = variances.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return Err(Error::UndefinedAnisotropy);
    }
    Ok(AnisotropyResult {
        pq2_max: max,
        pq2_min: min,
        k_alpha: (max - min) / max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(a: f64, lambda: f64, dx: f64, periods: usize) -> Profile {
        let n = (periods as f64 * lambda / dx).round() as usize;
        Profile::from_fn(n, dx, |x| a * (2.0 * PI * x / lambda).sin()).unwrap()
    }

    fn triangle(a: f64, lambda: f64, dx: f64, periods: usize) -> Profile {
        let n = (periods as f64 * lambda / dx).round() as usize;
        Profile::from_fn(n, dx, |x| {
            let t = (x / lambda).fract();
            a * (1.0 - 4.0 * (t - 0.5).abs())
        })
        .unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn sine_moments() {
        let p = sine(1.0, 100.0, 0.1, 10);
        let a = amplitude_params(&p);
        assert!(close(a.pa, 2.0 / PI, 0.005));
        assert!(close(a.pq, 0.5f64.sqrt(), 0.005));
        assert!(close(a.pt, 2.0, 0.005));
        assert!(a.psk.unwrap().abs() < 0.005);
        assert!(close(a.pku.unwrap(), 1.5, 0.005));
        assert!(close(a.pz_jis, 2.0, 0.005));
    }

    #[test]
    fn triangle_moments() {
        let p = triangle(1.0, 100.0, 0.1, 10);
        let a = amplitude_params(&p);
        assert!(close(a.pa, 0.5, 0.005));
        assert!(close(a.pq, 1.0 / 3f64.sqrt(), 0.005));
        assert!(close(a.pku.unwrap(), 1.8, 0.005));
        assert!(a.psk.unwrap().abs() < 0.005);
    }

    #[test]
    fn constant_amplitude_is_zero_and_moments_undefined() {
        let p = Profile::primitive(vec![2.0; 100], 1.0).unwrap();
        let a = amplitude_params(&p);
        assert_eq!((a.pa, a.pq, a.pt), (0.0, 0.0, 0.0));
        assert!(a.psk.is_none() && a.pku.is_none() && a.pp_over_pt.is_none());
    }

    #[test]
    fn pz_uses_five_lengths_on_long_traces() {
        let long = sine(1.0, 100.0, 1.0, 45);
        assert_eq!(amplitude_params(&long).pz_segments, 5);
        let short = sine(1.0, 100.0, 1.0, 30);
        assert_eq!(amplitude_params(&short).pz_segments, 3);
    }

    #[test]
    fn sine_spacing() {
        let p = sine(1.0, 100.0, 0.5, 20);
        let s = spacing_params(&p).unwrap();
        assert!((s.psm - 100.0).abs() < 0.05, "{}", s.psm);
        assert!((s.ps - 100.0).abs() < 0.05, "{}", s.ps);
    }

    #[test]
    fn constant_spacing_has_no_features() {
        let p = Profile::primitive(vec![1.0; 100], 1.0).unwrap();
        assert!(matches!(spacing_params(&p), Err(Error::NoFeatures(_))));
    }

    #[test]
    fn ramp_slope_exact() {
        let p = Profile::from_fn(100, 2.0, |x| 0.05 * x).unwrap();
        for st in [SlopeStencil::Two, SlopeStencil::Three, SlopeStencil::Seven] {
            let s = slope_params(&p, st).unwrap();
            assert!((s.pda - 0.05).abs() < 1e-12 && (s.pdq - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_slope_rms_and_wavelength() {
        let p = sine(1.0, 100.0, 0.1, 10);
        let s3 = slope_params(&p, SlopeStencil::Three).unwrap();
        let s7 = slope_params(&p, SlopeStencil::Seven).unwrap();
        let expect = 2f64.sqrt() * PI / 100.0;
        assert!(close(s3.pdq, expect, 0.005));
        assert!(close(s3.plq.unwrap(), 100.0, 0.005));
        assert!(close(s7.pdq, s3.pdq, 0.01));
    }

    #[test]
    fn stencil_longer_than_trace() {
        assert!(SlopeStencil::from_points(5).is_err());
    }

    #[test]
    fn parabola_curvature() {
        let r = 250.0;
        let p = Profile::from_fn(201, 0.5, |x| -(x - 50.0) * (x - 50.0) / (2.0 * r)).unwrap();
        let pk = peak_params(&p).unwrap();
        assert_eq!(pk.peak_count, 1);
        assert!(close(pk.ppc3, 1.0 / r, 0.001));
    }

    #[test]
    fn sine_peak_curvature() {
        let p = sine(1.0, 100.0, 1.0, 10);
        let pk = peak_params(&p).unwrap();
        assert!(close(pk.ppc3, (2.0 * PI / 100.0f64).powi(2), 0.002), "{}", pk.ppc3);
        assert!(close(pk.pds3, 10.0, 0.02));
    }

    #[test]
    fn ramp_has_no_peaks() {
        let p = Profile::from_fn(100, 1.0, |x| x).unwrap();
        assert!(matches!(peak_params(&p), Err(Error::NoFeatures(_))));
    }

    #[test]
    fn hysteresis_drops_quantisation_bumps() {
        let mut z: Vec<f64> = (0..200).map(|i| (i as f64 * 2.0 * PI / 100.0).sin()).collect();
        z[30] += 1e-4;
        z[31] -= 1e-4;
        assert_eq!(local_peaks(&z, 0.02).len(), 2);
    }

    #[test]
    fn kalpha_cases() {
        assert_eq!(kalpha(&[3.0, 3.0, 3.0]).unwrap().k_alpha, 0.0);
        assert_eq!(kalpha(&[4.0, 2.0]).unwrap().k_alpha, 0.5);
        assert_eq!(kalpha(&[1.0, 0.0]).unwrap().k_alpha, 1.0);
        assert!(matches!(kalpha(&[0.0, 0.0]), Err(Error::UndefinedAnisotropy)));
    }
}
