use std::f64::consts::PI;

use gearflank::accuracy::*;
use gearflank::geometry::{FlankSide, GearSpec, ShaperSpec};
use gearflank::sim::{simulate_fellows, GenerationParams};
use proptest::prelude::*;

fn gear() -> GearSpec {
    GearSpec::new(1.814, 86, 20.0, 6.3).unwrap()
}

fn inv(a: f64) -> f64 {
    a.tan() - a
}

/// Flank of one tooth as a dense polyline about the rotation axis, built
/// straight from the polar form of the involute.
fn flank_polyline(g: &GearSpec, i: usize, side: FlankSide, offset_um: f64, e_um: [f64; 2]) -> Vec<[f64; 2]> {
    let z = g.tooth_count_z2 as f64;
    let alpha = g.pressure_angle_an.to_radians();
    let rb = g.base_radius();
    let rt = g.tip_radius();
    let rref = g.pitch_radius();
    let phi = 2.0 * PI * i as f64 / z;
    let shift = offset_um / 1000.0 / rref;
    let n = 2000;
    (0..=n)
        .map(|k| {
            let rho = rb + (rt - rb) * k as f64 / n as f64;
            let ar = (rb / rho).acos();
            let th = match side {
                FlankSide::Drive => phi - PI / (2.0 * z) - inv(alpha) + inv(ar) + shift,
                FlankSide::NonDrive => phi + PI / (2.0 * z) + inv(alpha) - inv(ar) + shift,
            };
            [e_um[0] / 1000.0 + rho * th.cos(), e_um[1] / 1000.0 + rho * th.sin()]
        })
        .collect()
}

fn polyline_distance(poly: &[[f64; 2]], p: [f64; 2]) -> f64 {
    poly.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let ab = [b[0] - a[0], b[1] - a[1]];
            let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1])).clamp(0.0, 1.0);
            (p[0] - a[0] - t * ab[0]).hypot(p[1] - a[1] - t * ab[1])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Radial ball position in space `i` by zooming grid search.
fn brute_force_ball_radius(
    g: &GearSpec,
    i: usize,
    offsets: &[(f64, f64)],
    e_um: [f64; 2],
    rad: f64,
) -> f64 {
    let z = g.tooth_count_z2 as usize;
    let left = flank_polyline(g, i, FlankSide::NonDrive, offsets[i].1, e_um);
    let right = flank_polyline(g, i + 1, FlankSide::Drive, offsets[(i + 1) % z].0, e_um);
    let mid = 2.0 * PI * (i as f64 + 0.5) / z as f64;
    let cost = |r: f64, th: f64| {
        let c = [r * th.cos(), r * th.sin()];
        (polyline_distance(&left, c) - rad).powi(2) + (polyline_distance(&right, c) - rad).powi(2)
    };
    let (mut r0, mut th0) = (g.pitch_radius(), mid);
    let (mut hr, mut ht) = (2.0 * g.module_mn, PI / z as f64);
    for _ in 0..14 {
        let mut best = (f64::INFINITY, r0, th0);
        for a in -10..=10 {
            for b in -10..=10 {
                let r = r0 + hr * a as f64 / 10.0;
                let th = th0 + ht * b as f64 / 10.0;
                let c = cost(r, th);
                if c < best.0 {
                    best = (c, r, th);
                }
            }
        }
        r0 = best.1;
        th0 = best.2;
        hr *= 0.3;
        ht *= 0.3;
    }
    r0
}

#[test]
fn eccentric_wheel_runout_is_twice_the_eccentricity() {
    let set = ToothSet::nominal(gear()).unwrap().with_eccentricity(20.0, 0.0);
    let fr = runout_fr(&set, 1.75 * 1.814).unwrap().f_r;
    assert!((fr - 40.0).abs() <= 0.8, "{fr}");
    let set = ToothSet::nominal(gear()).unwrap().with_eccentricity(12.0, -16.0);
    let fr = runout_fr(&set, 1.75 * 1.814).unwrap().f_r;
    assert!((fr - 40.0).abs() <= 0.8, "{fr}");
}

#[test]
fn runout_matches_brute_force_ball_search() {
    let g = gear();
    let z = g.tooth_count_z2 as usize;
    let e = [20.0, 0.0];
    let mut offsets = vec![(0.0, 0.0); z];
    // One deep space: both flanks of space 10 moved 15 μm away from it.
    offsets[10].1 = -15.0;
    offsets[11].0 = 15.0;
    let mut set = ToothSet::nominal(g).unwrap().with_eccentricity(e[0], e[1]);
    for (t, &(d, n)) in set.teeth_mut().iter_mut().zip(&offsets) {
        t.drive = Some(FlankData::at_offset(d));
        t.non_drive = Some(FlankData::at_offset(n));
    }
    let rad = 0.5 * 1.75 * g.module_mn;
    let got = runout_fr(&set, 2.0 * rad).unwrap();
    // Positions are relative to their mean, so compare differences to
    // space 0 on a sample of spaces.
    let base = brute_force_ball_radius(&g, 0, &offsets, e, rad);
    for i in [9, 10, 11, 21, 43, 64, 85] {
        let want = 1000.0 * (brute_force_ball_radius(&g, i, &offsets, e, rad) - base);
        let p = got.positions[i] - got.positions[0];
        assert!((want - p).abs() < 0.05, "space {i}: {want} vs {p}");
    }
}

#[test]
fn deep_space_alone_lowers_one_ball() {
    let g = gear();
    let mut set = ToothSet::nominal(g).unwrap();
    set.teeth_mut()[10].non_drive = Some(FlankData::at_offset(-15.0));
    set.teeth_mut()[11].drive = Some(FlankData::at_offset(15.0));
    let r = runout_fr(&set, 1.75 * g.module_mn).unwrap();
    let offsets: Vec<(f64, f64)> = (0..86)
        .map(|i| match i {
            10 => (0.0, -15.0),
            11 => (15.0, 0.0),
            _ => (0.0, 0.0),
        })
        .collect();
    let rad = 0.875 * g.module_mn;
    let deep = brute_force_ball_radius(&g, 10, &offsets, [0.0, 0.0], rad);
    let flat = brute_force_ball_radius(&g, 40, &offsets, [0.0, 0.0], rad);
    let want = 1000.0 * (flat - deep);
    assert!((r.f_r - want).abs() < 0.05, "{} vs {want}", r.f_r);
    // A flank moved along the arc by s drops the ball by about s / (2 sin α).
    assert!(r.f_r > 15.0, "{}", r.f_r);
}

#[test]
fn sinusoidal_pitch_error() {
    let g = gear();
    let z = g.tooth_count_z2 as usize;
    let a = 8.0;
    let pos: Vec<f64> = (0..z).map(|k| a * (2.0 * PI * k as f64 / z as f64).sin()).collect();
    let mut set = ToothSet::nominal(g).unwrap();
    for (t, &p) in set.teeth_mut().iter_mut().zip(&pos) {
        t.drive = Some(FlankData::at_offset(p));
        t.non_drive = Some(FlankData::at_offset(p));
    }
    // Direct scan of the constructed positions.
    let fp_scan = pos.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - pos.iter().cloned().fold(f64::INFINITY, f64::min);
    let fpt_scan = (0..z).map(|k| (pos[(k + 1) % z] - pos[k]).abs()).fold(0.0, f64::max);
    for side in [FlankSide::Drive, FlankSide::NonDrive] {
        let p = pitch_deviations(&set, side).unwrap();
        assert!((p.f_p - fp_scan).abs() < 1e-8, "{} {fp_scan}", p.f_p);
        assert!((p.f_pt - fpt_scan).abs() < 1e-8, "{} {fpt_scan}", p.f_pt);
        assert!((p.f_p - 2.0 * a).abs() <= 0.02 * 2.0 * a);
        let closed = a * 2.0 * (PI / z as f64).sin();
        assert!((p.f_pt - closed).abs() <= 0.02 * closed, "{} {closed}", p.f_pt);
    }
    assert!(thickness_variation_rs(&set).unwrap().r_s < 1e-6);
}

#[test]
fn fellows_grid_has_no_helix_deviation() {
    let g = GearSpec::new(1.814, 49, 20.0, 5.1).unwrap();
    let s = ShaperSpec::new(&g, 56, 55).unwrap();
    let params = GenerationParams::for_shaper(&g, &s).with_grid(64, 32);
    let map = simulate_fellows(&g, &s, &params).unwrap().grid.to_heightmap().unwrap();
    let d = form_deviations(&map, DEFAULT_EVAL_RANGE).unwrap();
    assert_eq!(d.f_beta, 0.0);
    assert!(d.f_alpha > 0.0);
}

#[test]
fn report_collects_surface_deviations() {
    let g = gear();
    let mut set = ToothSet::nominal(g).unwrap();
    let n = 101;
    for (k, t) in set.teeth_mut().iter_mut().enumerate() {
        let amp = 1.0 + k as f64 * 0.01;
        let profile: Vec<f64> = (0..n).map(|i| amp * (2.0 * PI * i as f64 / 25.0).sin()).collect();
        t.drive.as_mut().unwrap().surface = Some(FlankSurface::Traces { profile, helix: vec![0.0; n] });
    }
    let rep = deviation_report(&set, &DeviationOptions::for_gear(&g)).unwrap();
    let fa = rep.drive.f_alpha.unwrap();
    assert!((fa - 2.0 * 1.85).abs() < 0.01, "{fa}");
    assert!(rep.drive.f_alpha_std.unwrap() > 0.0);
    assert_eq!(rep.drive.f_beta, Some(0.0));
    assert!(rep.non_drive.f_alpha.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn deviations_ignore_rigid_rotation(
        offs in prop::collection::vec((-20.0f64..20.0, -20.0f64..20.0), 86),
        turn in -500.0f64..500.0,
    ) {
        let g = gear();
        let build = |c: f64| {
            let mut set = ToothSet::nominal(g).unwrap();
            for (t, &(d, n)) in set.teeth_mut().iter_mut().zip(&offs) {
                t.drive = Some(FlankData::at_offset(d + c));
                t.non_drive = Some(FlankData::at_offset(n + c));
            }
            set
        };
        let opts = DeviationOptions::for_gear(&g);
        let a = deviation_report(&build(0.0), &opts).unwrap();
        let b = deviation_report(&build(turn), &opts).unwrap();
        for (x, y) in [
            (a.drive.pitch.f_pt, b.drive.pitch.f_pt),
            (a.drive.pitch.f_p, b.drive.pitch.f_p),
            (a.non_drive.pitch.f_pt, b.non_drive.pitch.f_pt),
            (a.non_drive.pitch.f_p, b.non_drive.pitch.f_p),
            (a.runout.f_r, b.runout.f_r),
            (a.thickness.r_s, b.thickness.r_s),
        ] {
            prop_assert!((x - y).abs() < 1e-6, "{} {}", x, y);
        }
        let c = &a.drive.pitch.cumulative;
        let scan = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - c.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(a.drive.pitch.f_p, scan);
        prop_assert!(a.drive.pitch.f_pt >= 0.0 && a.runout.f_r >= 0.0 && a.thickness.r_s >= 0.0);
    }
}
