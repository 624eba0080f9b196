use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Forward DFT of a real sequence (unnormalised).
pub(crate) fn dft_real(data: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = data.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// In-place 2D DFT of a row-major `ny × nx` buffer.
pub(crate) fn dft2(buf: &mut [Complex<f64>], nx: usize, ny: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let row = if inverse {
        planner.plan_fft_inverse(nx)
    } else {
        planner.plan_fft_forward(nx)
    };
    for r in buf.chunks_exact_mut(nx) {
        row.process(r);
    }
    let col = if inverse {
        planner.plan_fft_inverse(ny)
    } else {
        planner.plan_fft_forward(ny)
    };
    let mut tmp = vec![Complex::new(0.0, 0.0); ny];
    for c in 0..nx {
        for r in 0..ny {
            tmp[r] = buf[r * nx + c];
        }
        col.process(&mut tmp);
        for r in 0..ny {
            buf[r * nx + c] = tmp[r];
        }
    }
}

/// Biased autocovariance `Σ z_i z_{i+k} / n` for lags `0..n` via a
/// zero-padded FFT.
pub(crate) fn autocovariance(z: &[f64]) -> Vec<f64> {
    let n = z.len();
    let m = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = z
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)).take(m - n))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    buf[..n].iter().map(|c| c.re / (m as f64 * n as f64)).collect()
}

/// Discrete curvature of `y(x)` at interior points of a non-uniform series,
/// `y'' / (1 + y'^2)^{3/2}` (signed) with three-point differences. End
/// points get 0.
pub(crate) fn discrete_curvature(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut k = vec![0.0; n];
    for i in 1..n.saturating_sub(1) {
        let h1 = x[i] - x[i - 1];
        let h2 = x[i + 1] - x[i];
        if h1 <= 0.0 || h2 <= 0.0 {
            continue;
        }
        let d2 = 2.0 * ((y[i + 1] - y[i]) / h2 - (y[i] - y[i - 1]) / h1) / (h1 + h2);
        let d1 = (y[i + 1] - y[i - 1]) / (h1 + h2);
        k[i] = d2 / (1.0 + d1 * d1).powf(1.5);
    }
    k
}
