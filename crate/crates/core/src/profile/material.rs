use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::Profile;
use crate::error::{Error, Result};

/// Width of the secant window as a fraction of the ratio axis.
pub const SECANT_WINDOW: f64 = 0.4;

/// Half-width of the excluded transition zone, in standard-normal units.
pub const TRANSITION_EXCLUSION: f64 = 0.5;

/// Upper bound on the points used by the sigmoid fit.
const SIGMOID_MAX_POINTS: usize = 1000;

/// Material ratio (bearing) curve: `ratio[i] = i/(n−1)`, heights sorted
/// from highest to lowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaterialRatioCurve {
    pub ratio: Vec<f64>,
    pub height: Vec<f64>,
}

pub fn material_curve_from_samples(z: &[f64]) -> Result<MaterialRatioCurve> {
    if z.len() < 2 {
        return Err(Error::InsufficientData("material curve needs at least two samples".into()));
    }
    let mut height = z.to_vec();
    height.sort_by(|a, b| b.total_cmp(a));
    let n = height.len();
    let ratio = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    Ok(MaterialRatioCurve { ratio, height })
}

impl MaterialRatioCurve {
    pub fn len(&self) -> usize {
        self.ratio.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratio.is_empty()
    }

    /// Height `c(p)` by linear interpolation.
    pub fn height_at(&self, p: f64) -> f64 {
        let n = self.len();
        let pos = p.clamp(0.0, 1.0) * (n - 1) as f64;
        let j = (pos.floor() as usize).min(n - 2);
        let t = pos - j as f64;
        self.height[j] * (1.0 - t) + self.height[j + 1] * t
    }

    /// Ratio at which the curve first drops to `c`; 0 above the highest
    /// point and 1 below the lowest.
    pub fn ratio_at(&self, c: f64) -> f64 {
        let h = &self.height;
        if h[0] <= c {
            return 0.0;
        }
        if *h.last().unwrap() >= c {
            return 1.0;
        }
        // First j with h[j+1] < c <= h[j].
        let j = h.partition_point(|&v| v >= c) - 1;
        let t = (h[j] - c) / (h[j] - h[j + 1]);
        self.ratio[j] + t * (self.ratio[j + 1] - self.ratio[j])
    }

    /// `∫₀¹ max(c(p) − level, 0) dp`, exact for the piecewise-linear curve.
    pub fn area_above(&self, level: f64) -> f64 {
        self.clipped_area(|h| h - level)
    }

    /// `∫₀¹ max(level − c(p), 0) dp`.
    pub fn area_below(&self, level: f64) -> f64 {
        self.clipped_area(|h| level - h)
    }

    fn clipped_area(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut area = 0.0;
        for j in 0..self.len() - 1 {
            let w = self.ratio[j + 1] - self.ratio[j];
            let (a, b) = (f(self.height[j]), f(self.height[j + 1]));
            area += if a >= 0.0 && b >= 0.0 {
                0.5 * (a + b) * w
            } else if a <= 0.0 && b <= 0.0 {
                0.0
            } else {
                let pos = a.max(b);
                0.5 * pos * pos / (a.abs() + b.abs()) * w
            };
        }
        area
    }
}

/// Secant (Rk-style) construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecantFamily {
    pub pk: f64,
    pub ppk: f64,
    pub pvk: f64,
    pub mr1: f64,
    pub mr2: f64,
    /// Equivalent-line intercepts at ratio 0 and 1.
    pub c_top: f64,
    pub c_bottom: f64,
    /// Start ratio of the flattest window.
    pub window_start: f64,
}

pub fn secant_family(curve: &MaterialRatioCurve) -> SecantFamily {
    let n = curve.len();
    let h = &curve.height;
    let p = &curve.ratio;
    let m = ((SECANT_WINDOW * (n - 1) as f64).round() as usize).clamp(1, n - 1);
    let mut best = 0;
    let mut best_drop = f64::INFINITY;
    for i in 0..n - m {
        let drop = h[i] - h[i + m];
        if drop < best_drop {
            best_drop = drop;
            best = i;
        }
    }
    let slope = -best_drop / (p[best + m] - p[best]);
    let c_top = h[best] - slope * p[best];
    let c_bottom = c_top + slope;
    let mr1 = curve.ratio_at(c_top);
    let mr2 = curve.ratio_at(c_bottom);
    let a1 = curve.area_above(c_top);
    let a2 = curve.area_below(c_bottom);
    SecantFamily {
        pk: c_top - c_bottom,
        ppk: if mr1 > 0.0 { 2.0 * a1 / mr1 } else { 0.0 },
        pvk: if mr2 < 1.0 { 2.0 * a2 / (1.0 - mr2) } else { 0.0 },
        mr1,
        mr2,
        c_top,
        c_bottom,
        window_start: p[best],
    }
}

/// Two-line analysis of the curve on the Gaussian probability axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityFamily {
    pub ppq: f64,
    pub pvq: f64,
    pub pmq: f64,
}

struct Sums {
    x: Vec<f64>,
    y: Vec<f64>,
    xx: Vec<f64>,
    xy: Vec<f64>,
    yy: Vec<f64>,
}

impl Sums {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let mut s = Sums {
            x: vec![0.0; n + 1],
            y: vec![0.0; n + 1],
            xx: vec![0.0; n + 1],
            xy: vec![0.0; n + 1],
            yy: vec![0.0; n + 1],
        };
        for i in 0..n {
            s.x[i + 1] = s.x[i] + x[i];
            s.y[i + 1] = s.y[i] + y[i];
            s.xx[i + 1] = s.xx[i] + x[i] * x[i];
            s.xy[i + 1] = s.xy[i] + x[i] * y[i];
            s.yy[i + 1] = s.yy[i] + y[i] * y[i];
        }
        s
    }

    /// Residual sum of squares of the least-squares line over `a..b`.
    fn sse(&self, a: usize, b: usize) -> f64 {
        let n = (b - a) as f64;
        let sx = self.x[b] - self.x[a];
        let sy = self.y[b] - self.y[a];
        let sxx = self.xx[b] - self.xx[a] - sx * sx / n;
        let sxy = self.xy[b] - self.xy[a] - sx * sy / n;
        let syy = self.yy[b] - self.yy[a] - sy * sy / n;
        if sxx <= 0.0 {
            return syy.max(0.0);
        }
        (syy - sxy * sxy / sxx).max(0.0)
    }
}

fn slope_of(x: &[f64], y: &[f64]) -> Option<f64> {
    crate::linalg::fit_line(x, y).map(|(s, _)| s)
}

pub fn probability_family(curve: &MaterialRatioCurve) -> Result<ProbabilityFamily> {
    let n = curve.len();
    if n < 20 {
        return Err(Error::InsufficientData("probability analysis needs at least 20 samples".into()));
    }
    let normal = Normal::standard();
    let h = &curve.height;
    let pr: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    let x: Vec<f64> = pr.iter().map(|&p| normal.inverse_cdf(p)).collect();
    let sums = Sums::new(&x, h);
    let min_part = (n / 50).max(5);
    let mut b = n / 2;
    let mut best = f64::INFINITY;
    for k in min_part..=n - min_part {
        let s = sums.sse(0, k) + sums.sse(k, n);
        if s < best {
            best = s;
            b = k;
        }
    }
    let pmq = b as f64 / n as f64;
    let xb = normal.inverse_cdf(pmq);

    let keep = |i: usize| (x[i] - xb).abs() >= TRANSITION_EXCLUSION;
    let pick = |range: std::ops::Range<usize>, map: &dyn Fn(f64) -> f64| {
        let mut idx: Vec<usize> = range.clone().filter(|&i| keep(i)).collect();
        if idx.len() < 3 {
            idx = range.collect();
        }
        let xs: Vec<f64> = idx.iter().map(|&i| normal.inverse_cdf(map(pr[i]))).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| h[i]).collect();
        slope_of(&xs, &ys).map(|s| -s)
    };
    let ppq = pick(0..b, &|p| p / pmq)
        .ok_or_else(|| Error::FitFailure("plateau line is undetermined".into()))?;
    let pvq = pick(b..n, &|p| (p - pmq) / (1.0 - pmq))
        .ok_or_else(|| Error::FitFailure("valley line is undetermined".into()))?;
    Ok(ProbabilityFamily { ppq, pvq, pmq })
}

/// Sigmoid fit of the normalised material curve,
/// `p(y) = 1 − (1 + exp(−(y − μ)/s))^(−ν)` with heights and ratios in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeParameterFit {
    pub location: f64,
    pub scale: f64,
    pub shape: f64,
    /// |dy/dp| at the inflexion point.
    pub dp1: f64,
    /// Normalised height of the inflexion point.
    pub ypp: f64,
    pub rms_residual: f64,
}

fn sigmoid_ratio(y: f64, mu: f64, s: f64, nu: f64) -> f64 {
    1.0 - (1.0 + (-(y - mu) / s).exp()).powf(-nu)
}

fn sigmoid_cost(y: &[f64], p: &[f64], th: &[f64; 3]) -> f64 {
    let (mu, s, nu) = (th[0], th[1].exp(), th[2].exp());
    y.iter()
        .zip(p)
        .map(|(&yi, &pi)| {
            let r = sigmoid_ratio(yi, mu, s, nu) - pi;
            r * r
        })
        .sum()
}

/// Levenberg–Marquardt over `(μ, ln s, ln ν)`.
pub(crate) fn fit_sigmoid(y: &[f64], p: &[f64]) -> Result<ThreeParameterFit> {
    let n = y.len();
    let median = {
        let k = p.partition_point(|&v| v < 0.5).min(n - 1);
        y[k]
    };
    let mut th = [median, (0.1f64).ln(), 0.0];
    let mut cost = sigmoid_cost(y, p, &th);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        let (mu, s, nu) = (th[0], th[1].exp(), th[2].exp());
        for (&yi, &pi) in y.iter().zip(p) {
            let r = sigmoid_ratio(yi, mu, s, nu) - pi;
            let mut g = [0.0; 3];
            for (k, gk) in g.iter_mut().enumerate() {
                let h = 1e-7;
                let mut tp = th;
                tp[k] += h;
                let mut tm = th;
                tm[k] -= h;
                let fp = sigmoid_ratio(yi, tp[0], tp[1].exp(), tp[2].exp());
                let fm = sigmoid_ratio(yi, tm[0], tm[1].exp(), tm[2].exp());
                *gk = (fp - fm) / (2.0 * h);
            }
            for a in 0..3 {
                jtr[a] += g[a] * r;
                for b in 0..3 {
                    jtj[a][b] += g[a] * g[b];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut m = nalgebra::Matrix3::<f64>::zeros();
            for a in 0..3 {
                for b in 0..3 {
                    m[(a, b)] = jtj[a][b];
                }
                m[(a, a)] += lambda * (jtj[a][a] + 1e-12);
            }
            let rhs = nalgebra::Vector3::new(-jtr[0], -jtr[1], -jtr[2]);
            let Some(step) = m.lu().solve(&rhs) else {
                lambda *= 10.0;
                continue;
            };
            let mut cand = [th[0] + step[0], th[1] + step[1], th[2] + step[2]];
            cand[1] = cand[1].clamp(-12.0, 3.0);
            cand[2] = cand[2].clamp(-6.0, 6.0);
            let c = sigmoid_cost(y, p, &cand);
            if c.is_finite() && c < cost {
                let rel = (cost - c) / cost.max(1e-300);
                th = cand;
                cost = c;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel < 1e-14 {
                    lambda = 1e12;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved || lambda >= 1e12 {
            break;
        }
    }
    let (mu, s, nu) = (th[0], th[1].exp(), th[2].exp());
    if !(s.is_finite() && nu.is_finite()) {
        return Err(Error::FitFailure("sigmoid fit diverged".into()));
    }
    Ok(ThreeParameterFit {
        location: mu,
        scale: s,
        shape: nu,
        dp1: s * (1.0 + 1.0 / nu).powf(nu + 1.0),
        ypp: mu + s * nu.ln(),
        rms_residual: (cost / n as f64).sqrt(),
    })
}

pub fn three_parameter_fit(curve: &MaterialRatioCurve) -> Result<ThreeParameterFit> {
    let hi = curve.height[0];
    let lo = *curve.height.last().unwrap();
    if !(hi > lo) {
        return Err(Error::DegenerateCurve("flat material curve has no inflexion".into()));
    }
    let n = curve.len();
    let m = n.min(SIGMOID_MAX_POINTS);
    let idx: Vec<usize> = (0..m).map(|k| ((k as f64 / (m - 1) as f64) * (n - 1) as f64).round() as usize).collect();
    let y: Vec<f64> = idx.iter().map(|&i| (curve.height[i] - lo) / (hi - lo)).collect();
    let p: Vec<f64> = idx.iter().map(|&i| curve.ratio[i]).collect();
    // Fit wants ascending ratio with descending height, which the curve is.
    fit_sigmoid(&y, &p)
}

#[derive(Debug, Clone, Serialize)]
pub struct MaterialAnalysis {
    pub curve: MaterialRatioCurve,
    pub secant: SecantFamily,
    /// `None` when the two-line fit is undetermined.
    pub probability: Option<ProbabilityFamily>,
    /// `None` for a flat curve.
    pub three_parameter: Option<ThreeParameterFit>,
}

pub fn material_curve_analysis(profile: &Profile) -> Result<MaterialAnalysis> {
    let curve = material_curve_from_samples(&profile.centered())?;
    let secant = secant_family(&curve);
    let flat = curve.height[0] == *curve.height.last().unwrap();
    let probability = if flat { None } else { probability_family(&curve).ok() };
    let three_parameter = three_parameter_fit(&curve).ok();
    Ok(MaterialAnalysis {
        curve,
        secant,
        probability,
        three_parameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_has_zero_secant_family() {
        let p = Profile::primitive(vec![1.5; 200], 1.0).unwrap();
        let a = material_curve_analysis(&p).unwrap();
        assert_eq!((a.secant.pk, a.secant.ppk, a.secant.pvk), (0.0, 0.0, 0.0));
        assert!(a.three_parameter.is_none());
        assert!(matches!(three_parameter_fit(&a.curve), Err(Error::DegenerateCurve(_))));
    }

    #[test]
    fn curve_endpoints_are_extremes() {
        let z = [0.3, -1.0, 2.0, 0.5, 0.0];
        let c = material_curve_from_samples(&z).unwrap();
        assert_eq!(c.height[0], 2.0);
        assert_eq!(*c.height.last().unwrap(), -1.0);
        assert_eq!((c.ratio[0], c.ratio[4]), (0.0, 1.0));
        assert!((c.ratio_at(1.25) - 0.125).abs() < 1e-12);
    }

    #[test]
    fn linear_curve_secant_spans_everything() {
        let z: Vec<f64> = (0..101).map(|i| 1.0 - 0.02 * i as f64).collect();
        let c = material_curve_from_samples(&z).unwrap();
        let s = secant_family(&c);
        assert!((s.pk - 2.0).abs() < 1e-9);
        assert!(s.mr1.abs() < 1e-9 && (s.mr2 - 1.0).abs() < 1e-9);
        assert!(s.ppk.abs() < 1e-9 && s.pvk.abs() < 1e-9);
    }

    #[test]
    fn clipped_area_of_triangle() {
        let c = MaterialRatioCurve {
            ratio: vec![0.0, 0.5, 1.0],
            height: vec![1.0, 0.0, -1.0],
        };
        assert!((c.area_above(0.0) - 0.25).abs() < 1e-12);
        assert!((c.area_above(0.5) - 0.0625).abs() < 1e-12);
        assert!((c.area_below(-0.5) - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn sigmoid_fit_recovers_exact_model() {
        let (mu, s, nu) = (0.45, 0.09, 2.5);
        let y: Vec<f64> = (0..400).map(|i| 1.0 - i as f64 / 399.0).collect();
        let p: Vec<f64> = y.iter().map(|&v| sigmoid_ratio(v, mu, s, nu)).collect();
        let f = fit_sigmoid(&y, &p).unwrap();
        assert!((f.location - mu).abs() < 1e-4, "{f:?}");
        assert!((f.scale - s).abs() < 1e-4);
        assert!((f.shape - nu).abs() < 1e-2);
        let dp1 = s * (1.0 + 1.0 / nu).powf(nu + 1.0);
        assert!((f.dp1 - dp1).abs() / dp1 < 1e-3);
        assert!((f.ypp - (mu + s * nu.ln())).abs() < 1e-3);
    }
}
