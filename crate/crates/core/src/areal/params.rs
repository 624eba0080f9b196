use serde::Serialize;

use super::Heightmap;
use crate::error::{Error, Result};
use crate::profile::{
    exact_split, gaussian_kernel, material_curve_from_samples, probability_family, secant_family,
    three_parameter_fit, MaterialRatioCurve, ProbabilityFamily, SecantFamily, ThreeParameterFit,
};

#[derive(Debug, Clone)]
pub struct ArealFiltered {
    pub waviness: Heightmap,
    pub roughness: Heightmap,
}

/// Separable Gaussian filter: the profile kernel along `x`, then along `y`.
pub fn gaussian_filter_areal(map: &Heightmap, lc_mm: f64) -> Result<ArealFiltered> {
    if !(lc_mm > 0.0) {
        return Err(Error::InvalidParams(format!("cutoff must be positive, got {lc_mm} mm")));
    }
    let lc = lc_mm * 1000.0;
    let ex = (map.nx - 1) as f64 * map.dx;
    let ey = (map.ny - 1) as f64 * map.dy;
    if ex.min(ey) < 2.0 * lc {
        return Err(Error::FilterLength {
            cutoff_um: lc,
            needed_um: 2.0 * lc,
            available_um: ex.min(ey),
        });
    }
    let kx = gaussian_kernel(lc, map.dx);
    let ky = gaussian_kernel(lc, map.dy);
    let mut w = Vec::with_capacity(map.len());
    for iy in 0..map.ny {
        w.extend(crate::profile::smooth(map.row(iy), &kx));
    }
    for ix in 0..map.nx {
        let col: Vec<f64> = (0..map.ny).map(|iy| w[iy * map.nx + ix]).collect();
        for (iy, v) in crate::profile::smooth(&col, &ky).into_iter().enumerate() {
            w[iy * map.nx + ix] = v;
        }
    }
    let (w, r) = exact_split(&map.z, &w);
    Ok(ArealFiltered {
        waviness: map.with_z(w),
        roughness: map.with_z(r),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeightParams {
    pub sa: f64,
    pub sq: f64,
    pub st: f64,
    pub sp: f64,
    pub sv: f64,
    pub ssk: Option<f64>,
    pub sku: Option<f64>,
}

pub fn areal_height_params(map: &Heightmap) -> HeightParams {
    let z = map.centered();
    let n = z.len() as f64;
    let sa = z.iter().map(|v| v.abs()).sum::<f64>() / n;
    let m2 = z.iter().map(|v| v * v).sum::<f64>() / n;
    let sq = m2.sqrt();
    let sp = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sv = -z.iter().cloned().fold(f64::INFINITY, f64::min);
    let (ssk, sku) = if sq > 0.0 {
        let m3 = z.iter().map(|v| v * v * v).sum::<f64>() / n;
        let m4 = z.iter().map(|v| v * v * v * v).sum::<f64>() / n;
        (Some(m3 / (sq * sq * sq)), Some(m4 / (m2 * m2)))
    } else {
        (None, None)
    };
    HeightParams {
        sa,
        sq,
        st: sp + sv,
        sp,
        sv,
        ssk,
        sku,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summit {
    pub ix: usize,
    pub iy: usize,
    /// Height above the mean plane, μm.
    pub height: f64,
    /// Curvatures, 1/μm, positive for a cap.
    pub kx: f64,
    pub ky: f64,
    pub mean_curvature: f64,
}

/// Points strictly higher than their 8 neighbours, border ring excluded.
pub fn summits(map: &Heightmap) -> Vec<Summit> {
    let mean = map.mean();
    let mut out = Vec::new();
    for iy in 1..map.ny - 1 {
        for ix in 1..map.nx - 1 {
            let c = map.at(ix, iy);
            let mut top = true;
            'n: for dy in [-1isize, 0, 1] {
                for dx in [-1isize, 0, 1] {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let v = map.at((ix as isize + dx) as usize, (iy as isize + dy) as usize);
                    if v >= c {
                        top = false;
                        break 'n;
                    }
                }
            }
            if !top {
                continue;
            }
            let kx = -(map.at(ix - 1, iy) - 2.0 * c + map.at(ix + 1, iy)) / (map.dx * map.dx);
            let ky = -(map.at(ix, iy - 1) - 2.0 * c + map.at(ix, iy + 1)) / (map.dy * map.dy);
            out.push(Summit {
                ix,
                iy,
                height: c - mean,
                kx,
                ky,
                mean_curvature: 0.5 * (kx + ky),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummitParams {
    pub count: usize,
    /// Summits per mm².
    pub sds: f64,
    pub sqsum: f64,
    pub ssc: f64,
    pub sscx: f64,
    pub sscy: f64,
}

pub fn summit_params(map: &Heightmap) -> Result<SummitParams> {
    let s = summits(map);
    if s.is_empty() {
        return Err(Error::NoFeatures("no summits".into()));
    }
    let k = s.len() as f64;
    let area_mm2 = (map.nx - 2) as f64 * map.dx * (map.ny - 2) as f64 * map.dy / 1e6;
    Ok(SummitParams {
        count: s.len(),
        sds: k / area_mm2,
        sqsum: (s.iter().map(|p| p.height * p.height).sum::<f64>() / k).sqrt(),
        ssc: s.iter().map(|p| p.mean_curvature).sum::<f64>() / k,
        sscx: s.iter().map(|p| p.kx).sum::<f64>() / k,
        sscy: s.iter().map(|p| p.ky).sum::<f64>() / k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HybridParams {
    pub sdq: f64,
    pub sdax: f64,
    pub sday: f64,
    /// Developed interfacial area ratio, %.
    pub sdr: f64,
}

/// Central-difference gradients over interior points.
pub fn hybrid_params(map: &Heightmap) -> HybridParams {
    let mut sq = 0.0;
    let mut ax = 0.0;
    let mut ay = 0.0;
    let mut dr = 0.0;
    for iy in 1..map.ny - 1 {
        for ix in 1..map.nx - 1 {
            let gx = (map.at(ix + 1, iy) - map.at(ix - 1, iy)) / (2.0 * map.dx);
            let gy = (map.at(ix, iy + 1) - map.at(ix, iy - 1)) / (2.0 * map.dy);
            let g2 = gx * gx + gy * gy;
            sq += g2;
            ax += gx.abs();
            ay += gy.abs();
            dr += (1.0 + g2).sqrt() - 1.0;
        }
    }
    let n = ((map.nx - 2) * (map.ny - 2)) as f64;
    HybridParams {
        sdq: (sq / n).sqrt(),
        sdax: ax / n,
        sday: ay / n,
        sdr: 100.0 * dr / n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeParams {
    /// Mean − min, mm³/mm².
    pub smmr: f64,
    /// Max − mean, mm³/mm².
    pub smvr: f64,
    pub sbi: Option<f64>,
    pub sci: Option<f64>,
    pub svi: Option<f64>,
}

/// Void volume per unit area (μm) below the plane at material ratio `mr`.
pub fn void_volume(curve: &MaterialRatioCurve, mr: f64) -> f64 {
    curve.area_below(curve.height_at(mr))
}

pub fn volume_params(map: &Heightmap) -> Result<VolumeParams> {
    let z = map.centered();
    let hi = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = z.iter().cloned().fold(f64::INFINITY, f64::min);
    let sq = (z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64).sqrt();
    let curve = material_curve_from_samples(&z)?;
    let (sbi, sci, svi) = if sq > 0.0 {
        let z05 = curve.height_at(0.05);
        let vv05 = void_volume(&curve, 0.05);
        let vv80 = void_volume(&curve, 0.80);
        (
            (z05 != 0.0).then(|| sq / z05),
            Some((vv05 - vv80) / sq),
            Some(vv80 / sq),
        )
    } else {
        (None, None, None)
    };
    Ok(VolumeParams {
        smmr: -lo / 1000.0,
        smvr: hi / 1000.0,
        sbi,
        sci,
        svi,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArealMaterialParams {
    pub curve: MaterialRatioCurve,
    pub secant: SecantFamily,
    pub probability: Option<ProbabilityFamily>,
    pub three_parameter: Option<ThreeParameterFit>,
}

/// Material-curve families on the flattened map.
pub fn areal_material_params(map: &Heightmap) -> Result<ArealMaterialParams> {
    let curve = material_curve_from_samples(&map.centered())?;
    let secant = secant_family(&curve);
    let flat = curve.height[0] == *curve.height.last().unwrap();
    Ok(ArealMaterialParams {
        secant,
        probability: if flat { None } else { probability_family(&curve).ok() },
        three_parameter: three_parameter_fit(&curve).ok(),
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn plane() -> Heightmap {
        Heightmap::from_fn(32, 32, 5.0, 5.0, |_, _| 4.0).unwrap()
    }

    #[test]
    fn plane_is_featureless() {
        let p = plane();
        let h = areal_height_params(&p);
        assert_eq!((h.sa, h.sq, h.st), (0.0, 0.0, 0.0));
        assert!(h.ssk.is_none() && h.sku.is_none());
        assert!(summits(&p).is_empty());
        assert!(matches!(summit_params(&p), Err(Error::NoFeatures(_))));
        let hy = hybrid_params(&p);
        assert_eq!((hy.sdq, hy.sdax, hy.sday, hy.sdr), (0.0, 0.0, 0.0, 0.0));
        let m = areal_material_params(&p).unwrap();
        assert_eq!((m.secant.pk, m.secant.ppk, m.secant.pvk), (0.0, 0.0, 0.0));
    }

    #[test]
    fn egg_crate_mean_height() {
        // |sin u · sin v| averages to (2/π)² over whole periods.
        let m = Heightmap::from_fn(400, 400, 1.0, 1.0, |x, y| (2.0 * PI * x / 100.0).sin() * (2.0 * PI * y / 100.0).sin())
            .unwrap();
        let h = areal_height_params(&m);
        assert!((h.sa - (2.0 / PI).powi(2)).abs() < 1e-3, "{}", h.sa);
    }

    #[test]
    fn gaussian_bump_single_summit() {
        let (a, s) = (1.0, 50.0);
        let m = Heightmap::from_fn(201, 201, 2.0, 2.0, |x, y| {
            let (u, v) = (x - 200.0, y - 200.0);
            a * (-(u * u + v * v) / (2.0 * s * s)).exp()
        })
        .unwrap();
        let sm = summits(&m);
        assert_eq!(sm.len(), 1);
        let k = a / (s * s);
        assert!((sm[0].kx - k).abs() / k < 0.02 && (sm[0].ky - k).abs() / k < 0.02);
    }

    #[test]
    fn sum_of_sines_has_one_summit_per_cell() {
        let p = 5;
        let n = 200;
        let m = Heightmap::from_fn(n, n, 1.0, 1.0, |x, y| {
            let w = 2.0 * PI * p as f64 / n as f64;
            (w * x).sin() + (w * y).sin()
        })
        .unwrap();
        assert_eq!(summits(&m).len(), p * p);
    }

    #[test]
    fn slopes_of_ramp_and_sine() {
        let r = Heightmap::from_fn(50, 40, 2.0, 2.0, |x, _| 0.05 * x).unwrap();
        let h = hybrid_params(&r);
        assert!((h.sdax - 0.05).abs() < 1e-12 && h.sday == 0.0);
        let s = Heightmap::from_fn(1000, 20, 0.5, 0.5, |x, _| (2.0 * PI * x / 100.0).sin()).unwrap();
        let h = hybrid_params(&s);
        assert!((h.sdax - 0.04).abs() < 0.0004, "{}", h.sdax);
    }

    #[test]
    fn volume_identity() {
        let m = Heightmap::from_fn(64, 64, 1.0, 1.0, |x, y| (x * 0.3).sin() * 2.0 + (y * 0.17).cos()).unwrap();
        let v = volume_params(&m).unwrap();
        let h = areal_height_params(&m);
        assert!(((v.smmr + v.smvr) * 1000.0 - h.st).abs() < 1e-12);
    }

    #[test]
    fn filter_constant_and_transmission() {
        let c = Heightmap::from_fn(64, 64, 50.0, 50.0, |_, _| 2.5).unwrap();
        let f = gaussian_filter_areal(&c, 0.8).unwrap();
        assert!(f.roughness.z.iter().all(|v| *v == 0.0));
        for along_x in [true, false] {
            let m = Heightmap::from_fn(400, 400, 20.0, 20.0, |x, y| {
                let t = if along_x { x } else { y };
                (2.0 * PI * t / 800.0).sin()
            })
            .unwrap();
            let f = gaussian_filter_areal(&m, 0.8).unwrap();
            let amp = (150..250)
                .flat_map(|iy| (150..250).map(move |ix| (ix, iy)))
                .map(|(ix, iy)| f.roughness.at(ix, iy).abs())
                .fold(0.0f64, f64::max);
            assert!((amp - 0.5).abs() < 0.005, "{amp}");
            for i in 0..m.len() {
                assert_eq!(f.waviness.z[i] + f.roughness.z[i], m.z[i]);
            }
        }
    }
}
