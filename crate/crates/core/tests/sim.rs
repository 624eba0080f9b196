use gearflank::geometry::{FlankSide, GearSpec, HobSpec, ShaperSpec, Tool};
use gearflank::sim::*;
use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hob_model(fa: f64) -> (FlankModel, GenerationParams) {
    let gear = GearSpec::new(1.814, 86, 20.0, 6.3).unwrap();
    let hob = HobSpec::new(&gear, 70.0, 14, 1, fa).unwrap();
    let params = GenerationParams::for_hob(&gear, &hob);
    (FlankModel::new(&gear, &Tool::Hob(hob), FlankSide::Drive).unwrap(), params)
}

fn shaper_model() -> (FlankModel, GenerationParams) {
    let gear = GearSpec::new(1.814, 49, 20.0, 5.1).unwrap();
    let shaper = ShaperSpec::new(&gear, 56, 55).unwrap();
    let params = GenerationParams::for_shaper(&gear, &shaper);
    (FlankModel::new(&gear, &Tool::Shaper(shaper), FlankSide::Drive).unwrap(), params)
}

#[test]
fn zero_feed_leaves_no_axial_marks() {
    let (model, params) = hob_model(0.0);
    let run = simulate_with_passes(&model, &model.plan_passes(&params).unwrap(), 40, 24).unwrap();
    for iu in 0..run.grid.nu {
        let row = run.grid.row_along_v(iu);
        assert!(row.iter().all(|&d| d == row[0]), "u index {iu}");
    }
}

#[test]
fn shaping_gap_does_not_depend_on_axial_position() {
    let (model, params) = shaper_model();
    let passes = model.plan_passes(&params).unwrap();
    let us = model.u_axis(30);
    let vs = model.v_axis(9);
    for pass in passes.iter().step_by(7) {
        for &u in &us {
            let g0 = cut_depth(&model, pass, u, vs[0]);
            for &v in &vs[1..] {
                assert_eq!(cut_depth(&model, pass, u, v), g0);
            }
        }
    }
}

#[test]
fn single_pass_envelope_is_that_pass() {
    let (model, params) = hob_model(2.0);
    let passes = model.plan_passes(&params).unwrap();
    let pass = passes[passes.len() / 2];
    let run = simulate_with_passes(&model, &[pass], 20, 18).unwrap();
    let (us, vs) = (model.u_axis(20), model.v_axis(18));
    for (iu, &u) in us.iter().enumerate() {
        for (iv, &v) in vs.iter().enumerate() {
            assert_eq!(run.grid.at(iu, iv), cut_depth(&model, &pass, u, v));
        }
    }
    assert_eq!(engagement_count(&run), 1);
}

#[test]
fn pass_order_does_not_matter() {
    let (model, params) = shaper_model();
    let passes = model.plan_passes(&params.with_grid(32, 16)).unwrap();
    let a = simulate_with_passes(&model, &passes, 32, 16).unwrap();
    let mut shuffled = passes.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    let b = simulate_with_passes(&model, &shuffled, 32, 16).unwrap();
    assert_eq!(a.grid.deviations, b.grid.deviations);
    assert_eq!(engagement_count(&a), engagement_count(&b));
}

#[test]
fn hob_marks_repeat_every_feed_step() {
    // 64 axial samples over 6.3 mm put one sample every 100 μm, so the
    // 2 mm feed is 20 samples.
    let (model, params) = hob_model(2.0);
    let run = simulate_planned_grid(&model, &params.with_grid(24, 64));
    let g = &run.grid;
    for iu in 0..g.nu {
        for iv in 0..g.nv - 20 {
            let (a, b) = (g.at(iu, iv), g.at(iu, iv + 20));
            assert!((a - b).abs() < 1e-6, "u {iu} v {iv}: {a} vs {b}");
        }
    }
}

fn simulate_planned_grid(model: &FlankModel, params: &GenerationParams) -> GenerationRun {
    simulate_with_passes(model, &model.plan_passes(params).unwrap(), params.grid_nu, params.grid_nv).unwrap()
}

#[test]
fn scallop_spacing_follows_roll_increment() {
    let gear = GearSpec::new(1.814, 86, 20.0, 6.3).unwrap();
    let hob = HobSpec::new(&gear, 70.0, 14, 1, 2.0).unwrap();
    let params = GenerationParams::for_hob(&gear, &hob).with_grid(3000, 16);
    let run = simulate_hobbing(&gear, &hob, &params).unwrap();
    let model = FlankModel::new(&gear, &Tool::Hob(hob), FlankSide::Drive).unwrap();
    let row = run.grid.row_along_u(0);
    let u = &run.grid.u_axis;
    let cusps: Vec<usize> = (1..row.len() - 1).filter(|&i| row[i] > row[i - 1] && row[i] >= row[i + 1]).collect();
    assert!(cusps.len() > 20, "{}", cusps.len());
    let step = params.wheel_step_dphi.to_radians();
    let rb = gear.base_radius() * 1000.0;
    for w in cusps.windows(2).skip(2).take(cusps.len() - 6) {
        let mid = 0.5 * (u[w[0]] + u[w[1]]);
        let expect = rb * model.roll_at(mid) * step;
        let got = u[w[1]] - u[w[0]];
        assert!((got - expect).abs() / expect < 0.05, "at {mid}: {got} vs {expect}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn more_passes_never_raise_the_envelope(seed in 0u64..1000, keep in 0.3f64..0.9) {
        let (model, params) = hob_model(2.0);
        let all = model.plan_passes(&params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut subset: Vec<GenerationPass> = all.choose_multiple(&mut rng, (keep * all.len() as f64) as usize).cloned().collect();
        subset.sort_by_key(|p| p.index);
        let full = simulate_with_passes(&model, &all, 20, 16).unwrap();
        if let Ok(part) = simulate_with_passes(&model, &subset, 20, 16) {
            for (a, b) in full.grid.deviations.iter().zip(&part.grid.deviations) {
                prop_assert!(a <= b);
            }
        }
    }
}
