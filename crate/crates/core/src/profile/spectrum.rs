use serde::Serialize;

use super::Profile;
use crate::error::{Error, Result};
use crate::spectral::{autocovariance, dft_real, discrete_curvature};

/// ACF threshold defining the correlation length.
pub const ACF_THRESHOLD: f64 = 0.1;

pub const MIN_PSD_SAMPLES: usize = 32;

#[derive(Debug, Clone, Serialize)]
pub struct AcfResult {
    /// Normalised autocorrelation for lags `0..n`, step `lag_step`.
    pub acf: Vec<f64>,
    pub lag_step: f64,
    /// Pβ0.1 in μm; `None` when the ACF stays above the threshold within
    /// half the trace.
    pub correlation_length: Option<f64>,
}

pub fn acf_analysis(profile: &Profile) -> Result<AcfResult> {
    let z = profile.centered();
    let cov = autocovariance(&z);
    if cov[0] <= 0.0 {
        return Err(Error::DegenerateCurve("zero-variance profile has no autocorrelation".into()));
    }
    let acf: Vec<f64> = cov.iter().map(|c| (c / cov[0]).clamp(-1.0, 1.0)).collect();
    let dx = profile.dx();
    let correlation_length = correlation_length(&acf, dx, ACF_THRESHOLD);
    Ok(AcfResult {
        acf,
        lag_step: dx,
        correlation_length,
    })
}

/// First lag (interpolated, μm) where `acf` drops to `threshold`, searched
/// over the first half of the series.
pub(crate) fn correlation_length(acf: &[f64], dx: f64, threshold: f64) -> Option<f64> {
    let half = acf.len() / 2;
    (1..=half).find(|&k| acf[k] <= threshold).map(|k| {
        let (a, b) = (acf[k - 1], acf[k]);
        let t = if a == b { 0.0 } else { (a - threshold) / (a - b) };
        (k as f64 - 1.0 + t) * dx
    })
}

/// Spectrum ordered by ascending wavelength (descending frequency).
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSeries {
    pub wavelength: Vec<f64>,
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsdResult {
    /// Power per frequency bin (μm²); sums to Pq².
    pub power: SpectrumSeries,
    /// Power spectral density (μm³), power divided by the bin width.
    pub density: SpectrumSeries,
    /// Cumulated power G²(λ) from short to long wavelengths (μm²).
    pub cumulated: SpectrumSeries,
    /// P(1/f): wavelength at the knee of the cumulated curve (μm).
    pub knee_wavelength: f64,
    pub total_power: f64,
}

pub fn psd_analysis(profile: &Profile) -> Result<PsdResult> {
    let n = profile.len();
    if n < MIN_PSD_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "spectrum needs at least {MIN_PSD_SAMPLES} samples, got {n}"
        )));
    }
    let z = profile.centered();
    let spec = dft_real(&z);
    let dx = profile.dx();
    let len = n as f64 * dx;
    let nn = (n * n) as f64;
    let mut wavelength = Vec::with_capacity(n / 2);
    let mut power = Vec::with_capacity(n / 2);
    for k in (1..=n / 2).rev() {
        let p = spec[k].norm_sqr() / nn;
        let p = if 2 * k == n { p } else { 2.0 * p };
        wavelength.push(len / k as f64);
        power.push(p);
    }
    let df = 1.0 / len;
    let density = power.iter().map(|p| p / df).collect();
    let mut acc = 0.0;
    let cum: Vec<f64> = power
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let total = acc;
    if total <= 0.0 {
        return Err(Error::DegenerateCurve("zero-power profile has no spectral knee".into()));
    }
    let knee_wavelength = cumulated_knee(&wavelength, &cum);
    Ok(PsdResult {
        power: SpectrumSeries {
            wavelength: wavelength.clone(),
            value: power,
        },
        density: SpectrumSeries {
            wavelength: wavelength.clone(),
            value: density,
        },
        cumulated: SpectrumSeries {
            wavelength,
            value: cum,
        },
        knee_wavelength,
        total_power: total,
    })
}

/// Knee of a cumulated curve given on ascending wavelengths: the point of
/// greatest concave curvature of the normalised curve against log10(λ),
/// first (shortest λ) on ties. Falls back to greatest absolute curvature if
/// the curve has no concave point.
pub fn cumulated_knee(wavelength: &[f64], cumulated: &[f64]) -> f64 {
    let total = *cumulated.last().unwrap();
    let x: Vec<f64> = wavelength.iter().map(|l| l.log10()).collect();
    let y: Vec<f64> = cumulated.iter().map(|c| c / total).collect();
    let k = discrete_curvature(&x, &y);
    let pick = |f: &dyn Fn(f64) -> f64| {
        let mut best = 0;
        let mut bv = 0.0;
        for (i, &ki) in k.iter().enumerate() {
            let v = f(ki);
            if v > bv {
                bv = v;
                best = i;
            }
        }
        (bv > 0.0).then_some(best)
    };
    let idx = pick(&|c| -c).or_else(|| pick(&|c: f64| c.abs())).unwrap_or(0);
    wavelength[idx]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(lambda: f64, dx: f64, n: usize) -> Profile {
        Profile::from_fn(n, dx, |x| (2.0 * PI * x / lambda).sin()).unwrap()
    }

    #[test]
    fn acf_of_sine() {
        let p = sine(100.0, 0.5, 4000);
        let r = acf_analysis(&p).unwrap();
        assert_eq!(r.acf[0], 1.0);
        assert!(r.acf.iter().all(|v| v.abs() <= 1.0));
        let expect = 100.0 / (2.0 * PI) * 0.1f64.acos();
        let got = r.correlation_length.unwrap();
        assert!((got - expect).abs() / expect < 0.01, "{got} vs {expect}");
    }

    #[test]
    fn correlation_length_not_reached_within_half_trace() {
        let acf: Vec<f64> = (0..100).map(|k| 1.0 - 0.015 * k as f64).collect();
        assert!(correlation_length(&acf, 1.0, 0.1).is_none());
        let got = correlation_length(&acf, 2.0, 0.41).unwrap();
        assert!((got - 2.0 * (39.0 + 0.005 / 0.015)).abs() < 1e-6, "{got}");
    }

    #[test]
    fn sine_psd_single_bin_and_knee() {
        let p = sine(100.0, 1.0, 2000);
        let r = psd_analysis(&p).unwrap();
        let (imax, pmax) = r
            .power
            .value
            .iter()
            .enumerate()
            .fold((0, 0.0), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        assert!((r.power.wavelength[imax] - 100.0).abs() < 1e-9);
        assert!(pmax / r.total_power >= 0.99);
        assert!((r.knee_wavelength - 100.0).abs() < 1e-9);
        assert!((r.total_power - 0.5).abs() < 1e-3 * 0.5);
    }

    #[test]
    fn short_profile_rejected() {
        let p = sine(10.0, 1.0, 31);
        assert!(matches!(psd_analysis(&p), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn cumulated_is_nondecreasing() {
        let p = Profile::from_fn(512, 1.0, |x| (x * 0.37).sin() + (x * 0.011).cos()).unwrap();
        let r = psd_analysis(&p).unwrap();
        assert!(r.cumulated.value.windows(2).all(|w| w[1] >= w[0]));
        assert!(r.cumulated.wavelength.windows(2).all(|w| w[1] > w[0]));
    }
}
