//! Shape a flank with a Fellows cutter. Strokes run along the face width, so
//! every helix trace is straight.

use gearflank::geometry::{GearSpec, ShaperSpec};
use gearflank::sim::*;

fn main() -> gearflank::Result<()> {
    let gear = GearSpec::new(1.814, 49, 20.0, 5.1)?;
    let shaper = ShaperSpec::new(&gear, 56, 55)?;
    let params = GenerationParams::for_shaper(&gear, &shaper).with_grid(300, 40);
    let run = simulate_fellows(&gear, &shaper, &params)?;

    println!("{} strokes planned, {} engaged", run.passes.len(), engagement_count(&run));
    println!("profile scallops {:.4} um", profile_scallop_height(&run.grid));

    let worst = (0..run.grid.nu)
        .map(|iu| {
            let row = run.grid.row_along_v(iu);
            row.iter().fold(0.0f64, |m, d| m.max((d - row[0]).abs()))
        })
        .fold(0.0, f64::max);
    println!("largest change along any helix trace {worst:e} um");
    Ok(())
}
