use rustfft::num_complex::Complex;
use serde::Serialize;

use super::Heightmap;
use crate::error::{Error, Result};
use crate::linalg::fit_line;
use crate::profile::cumulated_knee;
use crate::spectral::dft2;

/// Default ACF level defining the areal decay length.
pub const DEFAULT_DECAY_THRESHOLD: f64 = 0.2;

const ANGLE_BINS: usize = 180;

/// Normalised areal autocorrelation on lags `(-(nx-1)..nx, -(ny-1)..ny)`,
/// stored with the zero lag at `(nx-1, ny-1)` in a `(2nx-1) × (2ny-1)` grid.
#[derive(Debug, Clone)]
pub struct ArealAcf {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub values: Vec<f64>,
}

impl ArealAcf {
    fn width(&self) -> usize {
        2 * self.nx - 1
    }

    /// ACF at integer lag.
    pub fn at(&self, lx: isize, ly: isize) -> f64 {
        let ix = (lx + self.nx as isize - 1) as usize;
        let iy = (ly + self.ny as isize - 1) as usize;
        self.values[iy * self.width() + ix]
    }

    /// Bilinear interpolation at a physical lag (μm).
    pub fn sample(&self, tx: f64, ty: f64) -> f64 {
        let fx = tx / self.dx;
        let fy = ty / self.dy;
        let x0 = fx.floor();
        let y0 = fy.floor();
        let (ax, ay) = (fx - x0, fy - y0);
        let (x0, y0) = (x0 as isize, y0 as isize);
        let lim = |v: isize, n: usize| v.clamp(-(n as isize - 1), n as isize - 1);
        let g = |x: isize, y: isize| self.at(lim(x, self.nx), lim(y, self.ny));
        (1.0 - ay) * ((1.0 - ax) * g(x0, y0) + ax * g(x0 + 1, y0)) + ay * ((1.0 - ax) * g(x0, y0 + 1) + ax * g(x0 + 1, y0 + 1))
    }
}

/// Biased, normalised areal ACF via a zero-padded 2D FFT.
pub fn areal_acf(map: &Heightmap) -> Result<ArealAcf> {
    let z = map.centered();
    let (nx, ny) = (map.nx, map.ny);
    let (px, py) = (2 * nx, 2 * ny);
    let mut buf = vec![Complex::new(0.0, 0.0); px * py];
    for iy in 0..ny {
        for ix in 0..nx {
            buf[iy * px + ix].re = z[iy * nx + ix];
        }
    }
    dft2(&mut buf, px, py, false);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    dft2(&mut buf, px, py, true);
    let c0 = buf[0].re;
    if !(c0 > 0.0) {
        return Err(Error::DegenerateCurve("zero-variance map has no autocorrelation".into()));
    }
    let w = 2 * nx - 1;
    let mut values = vec![0.0; w * (2 * ny - 1)];
    for ly in -(ny as isize - 1)..ny as isize {
        for lx in -(nx as isize - 1)..nx as isize {
            let sx = lx.rem_euclid(px as isize) as usize;
            let sy = ly.rem_euclid(py as isize) as usize;
            let v = (buf[sy * px + sx].re / c0).clamp(-1.0, 1.0);
            values[(ly + ny as isize - 1) as usize * w + (lx + nx as isize - 1) as usize] = v;
        }
    }
    Ok(ArealAcf {
        nx,
        ny,
        dx: map.dx,
        dy: map.dy,
        values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TextureParams {
    /// Shortest decay length, μm.
    pub sal: f64,
    pub str_ratio: f64,
    /// Direction of slowest decay, degrees from the `x` axis in [0, 180).
    pub std_deg: f64,
    pub isotropy_pct: f64,
    pub threshold: f64,
    /// Decay length per direction (1° steps); not-reached directions carry
    /// the half-extent floor.
    pub decay_lengths: Vec<f64>,
    pub not_reached: Vec<bool>,
}

pub fn texture_params(map: &Heightmap, threshold: f64) -> Result<TextureParams> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParams(format!("decay threshold must be in (0, 1), got {threshold}")));
    }
    let acf = areal_acf(map)?;
    let hx = 0.5 * (map.nx - 1) as f64 * map.dx;
    let hy = 0.5 * (map.ny - 1) as f64 * map.dy;
    let dr = 0.05 * map.dx.min(map.dy);
    let common = hx.min(hy);
    let mut lengths = Vec::with_capacity(ANGLE_BINS);
    let mut missed = Vec::with_capacity(ANGLE_BINS);
    // Mean ACF along each ray out to a common radius; ranks directions
    // whose decay is not reached.
    let mut persistence = Vec::with_capacity(ANGLE_BINS);
    for a in 0..ANGLE_BINS {
        let th = (a as f64).to_radians();
        let (s, c) = th.sin_cos();
        let rx = if c.abs() > 1e-12 { hx / c.abs() } else { f64::INFINITY };
        let ry = if s.abs() > 1e-12 { hy / s.abs() } else { f64::INFINITY };
        let rmax = rx.min(ry);
        let steps = (rmax / dr).floor() as usize;
        let mut prev = 1.0;
        let mut found = None;
        for k in 1..=steps {
            let r = k as f64 * dr;
            let v = acf.sample(r * c, r * s);
            if v <= threshold {
                let t = if prev == v { 0.0 } else { (prev - threshold) / (prev - v) };
                found = Some(r - dr + t * dr);
                break;
            }
            prev = v;
        }
        lengths.push(found.unwrap_or(rmax));
        missed.push(found.is_none());
        let m = (common / dr).floor() as usize;
        persistence.push((1..=m).map(|k| acf.sample(k as f64 * dr * c, k as f64 * dr * s)).sum::<f64>() / m as f64);
    }
    let sal = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    let lmax = lengths.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pick = |score: &dyn Fn(usize) -> Option<f64>| {
        (0..ANGLE_BINS)
            .filter_map(|i| score(i).map(|v| (i, v)))
            .fold(None, |b: Option<(usize, f64)>, (i, v)| match b {
                Some((_, bv)) if bv >= v => b,
                _ => Some((i, v)),
            })
            .map(|(i, _)| i)
    };
    let imax = if missed.iter().any(|&m| m) {
        pick(&|i| missed[i].then_some(persistence[i]))
    } else {
        pick(&|i| Some(lengths[i]))
    }
    .unwrap_or(0);
    let str_ratio = sal / lmax;
    Ok(TextureParams {
        sal,
        str_ratio,
        std_deg: imax as f64,
        isotropy_pct: 100.0 * str_ratio,
        threshold,
        decay_lengths: lengths,
        not_reached: missed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArealPsd {
    /// Power per 1° direction bin over [0, 180), inscribed disk only.
    pub angular: Vec<f64>,
    /// Marginal spectra along `x` and `y` on ascending wavelength.
    pub wavelength_x: Vec<f64>,
    pub power_x: Vec<f64>,
    pub wavelength_y: Vec<f64>,
    pub power_y: Vec<f64>,
    /// Knee wavelengths of the cumulated marginal spectra, μm; `None` when
    /// that axis carries no power.
    pub knee_x: Option<f64>,
    pub knee_y: Option<f64>,
    /// Total power over all non-zero frequencies (equals Sq²).
    pub total_power: f64,
}

pub fn areal_psd_params(map: &Heightmap) -> Result<ArealPsd> {
    let (nx, ny) = (map.nx, map.ny);
    if nx < 32 || ny < 32 {
        return Err(Error::InsufficientData(format!("areal spectrum needs 32x32 samples, got {nx}x{ny}")));
    }
    let z = map.centered();
    let mut buf: Vec<Complex<f64>> = z.iter().map(|&v| Complex::new(v, 0.0)).collect();
    dft2(&mut buf, nx, ny, false);
    let norm = ((nx * ny) as f64).powi(2);
    let power: Vec<f64> = buf.iter().map(|c| c.norm_sqr() / norm).collect();

    let signed = |k: usize, n: usize| if k <= n / 2 { k as isize } else { k as isize - n as isize };
    let fx_nyq = 0.5 / map.dx;
    let fy_nyq = 0.5 / map.dy;
    let radius = fx_nyq.min(fy_nyq);
    let mut angular = vec![0.0; ANGLE_BINS];
    let mut px = vec![0.0; nx / 2 + 1];
    let mut py = vec![0.0; ny / 2 + 1];
    let mut total = 0.0;
    for ky in 0..ny {
        let sy = signed(ky, ny);
        let fy = sy as f64 / (ny as f64 * map.dy);
        for kx in 0..nx {
            let sx = signed(kx, nx);
            if sx == 0 && sy == 0 {
                continue;
            }
            let p = power[ky * nx + kx];
            total += p;
            px[sx.unsigned_abs()] += p;
            py[sy.unsigned_abs()] += p;
            let fx = sx as f64 / (nx as f64 * map.dx);
            if fx.hypot(fy) <= radius {
                let ang = fy.atan2(fx).to_degrees().rem_euclid(180.0);
                let bin = (ang.floor() as usize).min(ANGLE_BINS - 1);
                // Axes and diagonals are whole lattice lines: share them
                // between the bins they separate.
                if (ang - ang.round()).abs() < 1e-9 {
                    let edge = ang.round() as usize % ANGLE_BINS;
                    angular[edge] += 0.5 * p;
                    angular[(edge + ANGLE_BINS - 1) % ANGLE_BINS] += 0.5 * p;
                } else {
                    angular[bin] += p;
                }
            }
        }
    }
    let marginal = |p: &[f64], n: usize, d: f64| {
        let mut wl = Vec::new();
        let mut pw = Vec::new();
        for k in (1..p.len()).rev() {
            wl.push(n as f64 * d / k as f64);
            pw.push(p[k]);
        }
        (wl, pw)
    };
    let (wavelength_x, power_x) = marginal(&px, nx, map.dx);
    let (wavelength_y, power_y) = marginal(&py, ny, map.dy);
    let knee = |wl: &[f64], pw: &[f64]| {
        let mut acc = 0.0;
        let cum: Vec<f64> = pw
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        (acc > 1e-12 * total.max(f64::MIN_POSITIVE)).then(|| cumulated_knee(wl, &cum))
    };
    Ok(ArealPsd {
        knee_x: knee(&wavelength_x, &power_x),
        knee_y: knee(&wavelength_y, &power_y),
        angular,
        wavelength_x,
        power_x,
        wavelength_y,
        power_y,
        total_power: total,
    })
}

/// Structure-function fractal dimension over lags 1..=10 along both axes.
pub fn fractal_dimension(map: &Heightmap) -> Result<f64> {
    if map.nx < 64 || map.ny < 64 {
        return Err(Error::InsufficientData(format!(
            "fractal dimension needs 64x64 samples, got {}x{}",
            map.nx, map.ny
        )));
    }
    let mut lx = Vec::new();
    let mut ls = Vec::new();
    let mut any = false;
    for lag in 1..=10usize {
        let mut sx = 0.0;
        for iy in 0..map.ny {
            for ix in 0..map.nx - lag {
                let d = map.at(ix + lag, iy) - map.at(ix, iy);
                sx += d * d;
            }
        }
        sx /= (map.ny * (map.nx - lag)) as f64;
        let mut sy = 0.0;
        for iy in 0..map.ny - lag {
            for ix in 0..map.nx {
                let d = map.at(ix, iy + lag) - map.at(ix, iy);
                sy += d * d;
            }
        }
        sy /= ((map.ny - lag) * map.nx) as f64;
        for (s, step) in [(sx, map.dx), (sy, map.dy)] {
            if s > 0.0 {
                any = true;
                lx.push((lag as f64 * step).ln());
                ls.push(s.ln());
            }
        }
    }
    if !any {
        return Ok(2.0);
    }
    let (slope, _) = fit_line(&lx, &ls).ok_or_else(|| Error::InsufficientData("degenerate lag range".into()))?;
    Ok((3.0 - 0.5 * slope).clamp(2.0, 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn acf_zero_lag_is_one() {
        let m = Heightmap::from_fn(40, 40, 1.0, 1.0, |x, y| (x * 0.4).sin() + (y * 0.9).cos() * 0.3).unwrap();
        let a = areal_acf(&m).unwrap();
        assert!((a.at(0, 0) - 1.0).abs() < 1e-12);
        assert!(a.values.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn sine_along_x_is_fully_anisotropic() {
        let m = Heightmap::from_fn(128, 128, 1.0, 1.0, |x, _| (2.0 * PI * x / 16.0).sin()).unwrap();
        let t = texture_params(&m, DEFAULT_DECAY_THRESHOLD).unwrap();
        assert!(t.str_ratio < 0.1, "{}", t.str_ratio);
        assert_eq!(t.std_deg, 90.0);
        assert!(t.decay_lengths.iter().all(|&l| t.sal <= l));
    }

    #[test]
    fn sine_psd_knee_and_direction() {
        let m = Heightmap::from_fn(200, 64, 1.0, 1.0, |x, _| (2.0 * PI * x / 100.0).sin()).unwrap();
        let p = areal_psd_params(&m).unwrap();
        assert!((p.knee_x.unwrap() - 100.0).abs() < 1e-9);
        assert!(p.knee_y.is_none());
        let peak = p.angular.iter().cloned().enumerate().fold((0, 0.0), |b, (i, v)| if v > b.1 { (i, v) } else { b });
        assert_eq!(peak.0, 0);
        let sq2 = crate::profile::variance(&m.z);
        assert!((p.total_power - sq2).abs() / sq2 < 1e-3);
    }

    #[test]
    fn plane_fractal_dimension_is_two() {
        let m = Heightmap::from_fn(64, 64, 1.0, 1.0, |_, _| 1.0).unwrap();
        assert_eq!(fractal_dimension(&m).unwrap(), 2.0);
    }
}
