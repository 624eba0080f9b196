use super::{Profile, ProfileKind};
use crate::error::{Error, Result};

/// `α = √(ln 2 / π)`, giving 50 % amplitude transmission at the cutoff.
pub const GAUSS_ALPHA: f64 = 0.469_718_639_349_825_9;

/// Output of the Gaussian mean-line filter.
#[derive(Debug, Clone)]
pub struct FilteredProfile {
    pub waviness: Profile,
    pub roughness: Profile,
    /// Width (μm) of the zone at each end where the kernel is truncated by
    /// the trace boundary and renormalised.
    pub edge_zone: f64,
}

/// Half-kernel weights `s(j·dx)·dx` for `j = 0..=⌊lc/dx⌋`, lc and dx in μm.
pub fn gaussian_kernel(lc_um: f64, dx: f64) -> Vec<f64> {
    let half = (lc_um / dx).floor() as usize;
    let a = GAUSS_ALPHA * lc_um;
    (0..=half)
        .map(|j| {
            let x = j as f64 * dx;
            (-std::f64::consts::PI * (x / a) * (x / a)).exp() * dx / a
        })
        .collect()
}

/// Convolve with a symmetric half kernel, renormalising the weights that
/// fall inside the trace.
pub(crate) fn smooth(z: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = z.len() as isize;
    let h = kernel.len() as isize - 1;
    (0..n)
        .map(|i| {
            let lo = (i - h).max(0);
            let hi = (i + h).min(n - 1);
            // Weighted mean of differences, so a flat window returns z[i] exactly.
            let zi = z[i as usize];
            let mut acc = 0.0;
            let mut wsum = 0.0;
            for j in lo..=hi {
                let w = kernel[(j - i).unsigned_abs()];
                acc += w * (z[j as usize] - zi);
                wsum += w;
            }
            zi + acc / wsum
        })
        .collect()
}

/// Split `z` into `(w', r)` with `w'[i] + r[i] == z[i]` exactly in floating
/// point, `w'` staying within an ulp or two of the smooth component `w`.
pub fn exact_split(z: &[f64], w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut wo = Vec::with_capacity(z.len());
    let mut ro = Vec::with_capacity(z.len());
    for (&zi, &wi) in z.iter().zip(w) {
        let (a, b) = split_one(zi, wi);
        wo.push(a);
        ro.push(b);
    }
    (wo, ro)
}

fn split_one(z: f64, w: f64) -> (f64, f64) {
    let mut w = w;
    for _ in 0..8 {
        let r = z - w;
        if w + r == z {
            return (w, r);
        }
        // Move w to the value implied by the rounded residual.
        let w2 = z - r;
        if w2 + r == z {
            return (w2, r);
        }
        w = w2;
    }
    (z, 0.0)
}

/// Gaussian profile filter with cutoff `lc_mm` (mm).
pub fn gaussian_filter(profile: &Profile, lc_mm: f64) -> Result<FilteredProfile> {
    if !(lc_mm > 0.0) {
        return Err(Error::InvalidParams(format!("cutoff must be positive, got {lc_mm} mm")));
    }
    let lc = lc_mm * 1000.0;
    let available = profile.length();
    if available < 2.0 * lc {
        return Err(Error::FilterLength {
            cutoff_um: lc,
            needed_um: 2.0 * lc,
            available_um: available,
        });
    }
    let kernel = gaussian_kernel(lc, profile.dx());
    let w = smooth(profile.z(), &kernel);
    let (w, r) = exact_split(profile.z(), &w);
    Ok(FilteredProfile {
        waviness: profile.with_z(w).with_kind(ProfileKind::Waviness),
        roughness: profile.with_z(r).with_kind(ProfileKind::Roughness),
        edge_zone: 0.5 * lc,
    })
}
