use gearflank::geometry::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn involute_radius_and_inverse(rb in 1.0f64..200.0, xi in 0.0f64..1.5) {
        let p = involute_point(rb, xi).unwrap();
        let r = p[0].hypot(p[1]);
        prop_assert!((r - rb * (1.0 + xi * xi).sqrt()).abs() < 1e-9 * r);
        prop_assert!((roll_at_radius(rb, r).unwrap() - xi).abs() < 1e-6);
    }

    /// The involute's tangent at any point is perpendicular to the line
    /// touching the base circle there.
    #[test]
    fn involute_tangent_is_normal_to_generating_line(rb in 1.0f64..200.0, xi in 0.01f64..1.5) {
        let h = 1e-6;
        let (a, b) = (involute_point(rb, xi - h).unwrap(), involute_point(rb, xi + h).unwrap());
        let t = [b[0] - a[0], b[1] - a[1]];
        let line = [xi.sin(), -xi.cos()];
        let dot = (t[0] * line[0] + t[1] * line[1]) / t[0].hypot(t[1]);
        prop_assert!(dot.abs() < 1e-6);
    }

    #[test]
    fn tangent_shift_is_linear(dt in 10.0f64..500.0, a in -720.0f64..720.0, b in -720.0f64..720.0) {
        let lhs = tangent_shift(dt, a + b);
        let rhs = tangent_shift(dt, a) + tangent_shift(dt, b);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn feed_marks_grow_with_feed(d0 in 20.0f64..200.0, fa in 0.01f64..5.0) {
        let small = helix_feed_mark_height(20.0, d0, fa).unwrap();
        let large = helix_feed_mark_height(20.0, d0, 1.5 * fa).unwrap();
        prop_assert!(large > small);
        // Small-feed limit of the sagitta: fa² / (4 d0) · tan α.
        let approx = 20f64.to_radians().tan() * fa * fa / (4.0 * d0) * 1000.0;
        prop_assert!((small - approx).abs() <= 0.05 * approx);
    }

    #[test]
    fn scallop_scales_with_starts_squared(z1 in 1u32..4, ni in 6u32..20, z2 in 12u32..200) {
        let one = profile_scallop_height(1, 2.0, 20.0, z2, ni).unwrap();
        let many = profile_scallop_height(z1, 2.0, 20.0, z2, ni).unwrap();
        prop_assert!((many - one * (z1 * z1) as f64).abs() < 1e-12 * many);
    }
}

#[test]
fn reference_gear_sizes() {
    let g = GearSpec::new(1.814, 86, 20.0, 6.3).unwrap();
    assert!((g.pitch_radius() - 78.002).abs() < 1e-9);
    assert!((g.base_radius() - 78.002 * 20f64.to_radians().cos()).abs() < 1e-9);
    assert!((g.pitch_angle_deg() - 360.0 / 86.0).abs() < 1e-12);
    let s = ShaperSpec::new(&g, 56, 55).unwrap();
    assert!((s.base_radius(&g) - 47.72).abs() < 0.01);
}
