use nalgebra::{DMatrix, DVector};

use super::Profile;
use crate::error::{Error, Result};
use crate::linalg::{legendre, solve_normal, unit_coord};

/// Reference (form) shape removed before texture analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceForm {
    Line,
    Poly5,
    Circle,
}

impl std::str::FromStr for ReferenceForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(ReferenceForm::Line),
            "poly5" => Ok(ReferenceForm::Poly5),
            "circle" => Ok(ReferenceForm::Circle),
            other => Err(Error::InvalidParams(format!("unknown form '{other}'"))),
        }
    }
}

/// Result of a form fit: residual trace plus the fitted circle radius when
/// the form is a circle (μm).
#[derive(Debug, Clone)]
pub struct FormFit {
    pub residual: Profile,
    pub radius: Option<f64>,
}

/// Remove a least-squares reference form and return the residual profile.
pub fn fit_reference(profile: &Profile, form: ReferenceForm) -> Result<Profile> {
    Ok(fit_reference_detailed(profile, form)?.residual)
}

pub fn fit_reference_detailed(profile: &Profile, form: ReferenceForm) -> Result<FormFit> {
    match form {
        ReferenceForm::Line => polynomial_residual(profile, 1).map(|r| FormFit { residual: r, radius: None }),
        ReferenceForm::Poly5 => polynomial_residual(profile, 5).map(|r| FormFit { residual: r, radius: None }),
        ReferenceForm::Circle => circle_residual(profile),
    }
}

fn polynomial_residual(profile: &Profile, degree: usize) -> Result<Profile> {
    let n = profile.len();
    if n < degree + 2 {
        return Err(Error::InsufficientData(format!(
            "degree-{degree} fit needs at least {} samples",
            degree + 2
        )));
    }
    let m = degree + 1;
    let mut ata = DMatrix::<f64>::zeros(m, m);
    let mut atb = DVector::<f64>::zeros(m);
    let mut basis = vec![0.0; m];
    let z = profile.z();
    for (i, &zi) in z.iter().enumerate() {
        legendre(degree, unit_coord(i, n), &mut basis);
        for a in 0..m {
            atb[a] += basis[a] * zi;
            for b in 0..m {
                ata[(a, b)] += basis[a] * basis[b];
            }
        }
    }
    let coef = solve_normal(ata, atb)?;
    let mut residual: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            legendre(degree, unit_coord(i, n), &mut basis);
            zi - basis.iter().zip(coef.iter()).map(|(b, c)| b * c).sum::<f64>()
        })
        .collect();
    // Remove the rounding-level mean left by the solve.
    let m0 = super::mean(&residual);
    residual.iter_mut().for_each(|v| *v -= m0);
    Ok(profile.with_z(residual))
}

/// Algebraic (Kåsa) circle fit refined by Gauss–Newton on geometric
/// distances. Residuals are radial, signed so that material above the arc
/// is positive.
fn circle_residual(profile: &Profile) -> Result<FormFit> {
    let n = profile.len();
    if n < 4 {
        return Err(Error::InsufficientData("circle fit needs at least 4 samples".into()));
    }
    let z = profile.z();
    // Work in centred coordinates for conditioning.
    let x0 = 0.5 * profile.length();
    let z0 = profile.mean();
    let pts: Vec<(f64, f64)> = z.iter().enumerate().map(|(i, &zi)| (profile.x(i) - x0, zi - z0)).collect();

    // x² + y² + D x + E y + F = 0
    let mut ata = DMatrix::<f64>::zeros(3, 3);
    let mut atb = DVector::<f64>::zeros(3);
    let scale = x0.max(1.0);
    for &(x, y) in &pts {
        let (xs, ys) = (x / scale, y / scale);
        let row = [xs, ys, 1.0];
        let rhs = -(xs * xs + ys * ys);
        for a in 0..3 {
            atb[a] += row[a] * rhs;
            for b in 0..3 {
                ata[(a, b)] += row[a] * row[b];
            }
        }
    }
    let sol = solve_normal(ata, atb).map_err(|_| Error::FitFailure("degenerate data for circle fit".into()))?;
    let mut cx = -0.5 * sol[0] * scale;
    let mut cy = -0.5 * sol[1] * scale;
    let r2 = cx * cx + cy * cy - sol[2] * scale * scale;
    if !(r2 > 0.0) || !r2.is_finite() {
        return Err(Error::FitFailure("collinear data: no finite circle".into()));
    }
    let mut r = r2.sqrt();
    // Beyond this the centre and radius are no longer separable.
    if r > 1e3 * profile.length().max(1.0) {
        return Err(Error::FitFailure("collinear data: circle radius diverges".into()));
    }

    for _ in 0..50 {
        let mut jtj = DMatrix::<f64>::zeros(3, 3);
        let mut jtr = DVector::<f64>::zeros(3);
        for &(x, y) in &pts {
            let d = (x - cx).hypot(y - cy);
            if d == 0.0 {
                continue;
            }
            let res = d - r;
            let j = [-(x - cx) / d, -(y - cy) / d, -1.0];
            for a in 0..3 {
                jtr[a] += j[a] * res;
                for b in 0..3 {
                    jtj[(a, b)] += j[a] * j[b];
                }
            }
        }
        let step = solve_normal(jtj, -jtr)
            .map_err(|e| Error::FitFailure(format!("nearly collinear data for circle fit: {e}")))?;
        cx += step[0];
        cy += step[1];
        r += step[2];
        if step.norm() < 1e-12 * r.max(1.0) {
            break;
        }
    }
    let sign = if cy < 0.0 { 1.0 } else { -1.0 };
    let residual = pts.iter().map(|&(x, y)| sign * ((x - cx).hypot(y - cy) - r)).collect();
    Ok(FormFit {
        residual: profile.with_z(residual),
        radius: Some(r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_removes_ramp_exactly() {
        let p = Profile::from_fn(200, 2.0, |x| 0.05 * x - 3.0).unwrap();
        let r = fit_reference(&p, ReferenceForm::Line).unwrap();
        assert!(r.z().iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn line_residual_has_zero_mean() {
        let p = Profile::from_fn(300, 1.0, |x| (x / 7.0).sin() + 0.01 * x).unwrap();
        let r = fit_reference(&p, ReferenceForm::Line).unwrap();
        assert!(r.mean().abs() < 1e-9);
    }

    #[test]
    fn poly5_reproduces_quintic() {
        let p = Profile::from_fn(500, 4.0, |x| {
            let t = x / 1000.0 - 1.0;
            3.0 - 2.0 * t + 0.5 * t * t - 4.0 * t.powi(3) + 1.5 * t.powi(4) + 2.0 * t.powi(5)
        })
        .unwrap();
        let r = fit_reference(&p, ReferenceForm::Poly5).unwrap();
        let worst = r.z().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn circle_with_ripple_recovers_radius_and_ripple() {
        let radius = 15_084.4;
        // Whole periods of a ripple that is even about the arc centre.
        let ripple = |x: f64| 0.2 * (2.0 * std::f64::consts::PI * (x - 1500.0) / 50.0).cos();
        let n = 3001;
        let dx = 1.0;
        let xc = 0.5 * (n - 1) as f64 * dx;
        let p = Profile::from_fn(n, dx, |x| {
            let u = x - xc;
            (radius * radius - u * u).sqrt() - radius + ripple(x)
        })
        .unwrap();
        let fit = fit_reference_detailed(&p, ReferenceForm::Circle).unwrap();
        let r = fit.radius.unwrap();
        assert!((r - radius).abs() / radius < 1e-3, "{r}");
        let amp = 0.2;
        let err = fit
            .residual
            .z()
            .iter()
            .enumerate()
            .fold(0.0f64, |m, (i, v)| m.max((v - ripple(i as f64 * dx)).abs()));
        assert!(err < 0.01 * amp, "{err}");
    }

    #[test]
    fn collinear_points_fail_circle_fit() {
        let p = Profile::from_fn(100, 1.0, |x| 0.3 * x).unwrap();
        assert!(matches!(fit_reference(&p, ReferenceForm::Circle), Err(Error::FitFailure(_))));
    }
}
