use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const RANK_TOL: f64 = 1e-10;

/// Solve the normal equations `ata · c = atb` with an SVD, rejecting
/// rank-deficient systems.
pub(crate) fn solve_normal(ata: DMatrix<f64>, atb: DVector<f64>) -> Result<DVector<f64>> {
    let svd = ata.svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax > 0.0) {
        return Err(Error::FitFailure("design matrix is zero".into()));
    }
    let smin = svd.singular_values.min();
    if smin <= smax * RANK_TOL {
        return Err(Error::FitFailure(format!(
            "rank-deficient fit (condition {:.3e})",
            smax / smin.max(f64::MIN_POSITIVE)
        )));
    }
    svd.solve(&atb, 0.0).map_err(|e| Error::FitFailure(e.to_string()))
}

/// Legendre polynomials `P_0..=P_degree` at `x`.
pub(crate) fn legendre(degree: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if degree >= 1 {
        out[1] = x;
    }
    for n in 2..=degree {
        let nf = n as f64;
        out[n] = ((2.0 * nf - 1.0) * x * out[n - 1] - (nf - 1.0) * out[n - 2]) / nf;
    }
}

/// Map index `i` of `n` samples onto `[-1, 1]`.
#[inline]
pub(crate) fn unit_coord(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        2.0 * i as f64 / (n - 1) as f64 - 1.0
    }
}

/// Ordinary least-squares line through `(x, y)`: returns (slope, intercept).
pub(crate) fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_low_orders() {
        let mut p = [0.0; 4];
        legendre(3, 0.5, &mut p);
        assert_eq!(p[0], 1.0);
        assert_eq!(p[1], 0.5);
        assert!((p[2] - (-0.125)).abs() < 1e-15);
        assert!((p[3] - (-0.4375)).abs() < 1e-15);
    }

    #[test]
    fn singular_system_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(solve_normal(a, b), Err(Error::FitFailure(_))));
    }

    #[test]
    fn line_fit_recovers_ramp() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let (s, c) = fit_line(&x, &y).unwrap();
        assert!((s - 3.0).abs() < 1e-12 && (c + 2.0).abs() < 1e-12);
    }
}
