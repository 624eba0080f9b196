//! Oracles shared by the integration tests.

/// Exhaustive secant search on the sorted heights: every window of 40% of
/// the ratio axis, then crossings and areas by direct scans.
pub fn secant_oracle(z: &[f64]) -> [f64; 5] {
    let mut h = z.to_vec();
    h.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let n = h.len();
    let p = |i: usize| i as f64 / (n - 1) as f64;
    let m = ((n - 1) as f64 * 0.4).round() as usize;
    let (mut best, mut best_drop) = (0, f64::INFINITY);
    for i in 0..n - m {
        let drop = h[i] - h[i + m];
        if drop < best_drop {
            best_drop = drop;
            best = i;
        }
    }
    let slope = -best_drop / (p(best + m) - p(best));
    let top = h[best] - slope * p(best);
    let bottom = top + slope;
    let cross = |c: f64| -> f64 {
        if h[0] <= c {
            return 0.0;
        }
        for j in 0..n - 1 {
            if h[j] >= c && h[j + 1] < c {
                return p(j) + (h[j] - c) / (h[j] - h[j + 1]) * (p(j + 1) - p(j));
            }
        }
        1.0
    };
    // Exact area of a positive part of a piecewise-linear function.
    let area = |f: &dyn Fn(f64) -> f64| -> f64 {
        let mut a = 0.0;
        for j in 0..n - 1 {
            let (u, v) = (f(h[j]), f(h[j + 1]));
            let w = p(j + 1) - p(j);
            if u >= 0.0 && v >= 0.0 {
                a += w * (u + v) / 2.0;
            } else if u > 0.0 || v > 0.0 {
                let pos = u.max(v);
                a += w * pos / (u - v).abs() * pos / 2.0;
            }
        }
        a
    };
    let mr1 = cross(top);
    let mr2 = cross(bottom);
    let a1 = area(&|x| x - top);
    let a2 = area(&|x| bottom - x);
    let ppk = if mr1 > 0.0 { 2.0 * a1 / mr1 } else { 0.0 };
    let pvk = if mr2 < 1.0 { 2.0 * a2 / (1.0 - mr2) } else { 0.0 };
    [top - bottom, ppk, pvk, mr1, mr2]
}
