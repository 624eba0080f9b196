//! Write two helix reports to JSON, read them back and compare them.

use gearflank::geometry::{GearSpec, HobSpec};
use gearflank::io::*;
use gearflank::profile::{Profile, ReferenceForm};
use gearflank::sim::{simulate_hobbing, GenerationParams};

fn helix_report(fa: f64) -> gearflank::Result<ParameterReport> {
    let gear = GearSpec::new(1.814, 86, 20.0, 6.3)?;
    let hob = HobSpec::new(&gear, 70.0, 14, 1, fa)?;
    let params = GenerationParams::for_hob(&gear, &hob).with_grid(64, 400);
    let map = simulate_hobbing(&gear, &hob, &params)?.grid.to_heightmap()?;
    let trace = Profile::primitive(map.row(map.ny / 2).to_vec(), map.dx)?;
    let opts = ProfileOptions { form: ReferenceForm::Line, ..Default::default() };
    let mut rep = analyze_profile(&trace, &opts)?.report()?;
    rep.provenance("feed_mm", sig(fa));
    Ok(rep)
}

fn main() -> gearflank::Result<()> {
    let dir = std::env::temp_dir();
    let (a, b) = (dir.join("feed_2.0.json"), dir.join("feed_3.0.json"));
    helix_report(2.0)?.write(&a)?;
    helix_report(3.0)?.write(&b)?;

    let c = compare_reports(&ParameterReport::read(&a)?, &ParameterReport::read(&b)?)?;
    if let Some(pt) = c.get("Pt").and_then(|d| d.ratio) {
        println!("Pt grows {pt:.3}x for 1.5x the feed");
    }
    print!("{}", c.to_table());
    Ok(())
}
