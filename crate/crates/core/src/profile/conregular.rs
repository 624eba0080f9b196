use serde::Serialize;

use super::params::{local_peaks, slopes, SlopeStencil, PEAK_HYSTERESIS};
use super::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentClass {
    Rising,
    Falling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentStats {
    pub count: usize,
    /// μm.
    pub total_length: f64,
    /// Mean 7-point slope over the samples of this class (signed).
    pub mean_slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConregularResult {
    pub rising: SegmentStats,
    pub falling: SegmentStats,
    /// Runs as `(start index, end index, class)`.
    pub segments: Vec<(usize, usize, SegmentClass)>,
    /// Cumulative height gained on rising runs at each sample (μm).
    pub cumulative_rise: Vec<f64>,
    /// Cumulative height lost on falling runs at each sample (μm).
    pub cumulative_fall: Vec<f64>,
    pub warning: Option<String>,
}

/// Split the profile at its local extrema into rising and falling runs.
pub fn conregular_analysis(profile: &Profile) -> ConregularResult {
    let z = profile.z();
    let n = z.len();
    let dx = profile.dx();
    let hi = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = z.iter().cloned().fold(f64::INFINITY, f64::min);
    let hyst = PEAK_HYSTERESIS * (hi - lo);

    let mut cumulative_rise = vec![0.0; n];
    let mut cumulative_fall = vec![0.0; n];
    for i in 1..n {
        let d = z[i] - z[i - 1];
        cumulative_rise[i] = cumulative_rise[i - 1] + d.max(0.0);
        cumulative_fall[i] = cumulative_fall[i - 1] + (-d).max(0.0);
    }

    let empty = SegmentStats {
        count: 0,
        total_length: 0.0,
        mean_slope: 0.0,
    };
    if hi == lo {
        return ConregularResult {
            rising: empty,
            falling: empty,
            segments: Vec::new(),
            cumulative_rise,
            cumulative_fall,
            warning: Some("constant profile has no slope runs".into()),
        };
    }

    let neg: Vec<f64> = z.iter().map(|v| -v).collect();
    let mut cuts: Vec<usize> = local_peaks(z, hyst);
    cuts.extend(local_peaks(&neg, hyst));
    cuts.sort_unstable();
    let warning = (cuts.len() < 2).then(|| format!("only {} local extrema; profile is nearly monotone", cuts.len()));

    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(0);
    bounds.extend(cuts.iter().copied().filter(|&c| c > 0 && c < n - 1));
    bounds.push(n - 1);
    bounds.dedup();

    let segments: Vec<(usize, usize, SegmentClass)> = bounds
        .windows(2)
        .map(|w| {
            let class = if z[w[1]] >= z[w[0]] {
                SegmentClass::Rising
            } else {
                SegmentClass::Falling
            };
            (w[0], w[1], class)
        })
        .collect();

    let s7 = if n > 7 {
        slopes(z, dx, SlopeStencil::Seven)
    } else {
        slopes(z, dx, SlopeStencil::Three)
    };
    let offset = if n > 7 { 3 } else { 1 };
    let stats = |class: SegmentClass| {
        let runs: Vec<_> = segments.iter().filter(|s| s.2 == class).collect();
        let total_length = runs.iter().map(|s| (s.1 - s.0) as f64 * dx).sum();
        let mut sum = 0.0;
        let mut cnt = 0usize;
        for s in &runs {
            for i in s.0 + 1..s.1 {
                if i >= offset && i - offset < s7.len() {
                    sum += s7[i - offset];
                    cnt += 1;
                }
            }
        }
        SegmentStats {
            count: runs.len(),
            total_length,
            mean_slope: if cnt > 0 { sum / cnt as f64 } else { 0.0 },
        }
    };
    ConregularResult {
        rising: stats(SegmentClass::Rising),
        falling: stats(SegmentClass::Falling),
        segments,
        cumulative_rise,
        cumulative_fall,
        warning,
    }
}
