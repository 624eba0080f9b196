//! Hob a flank, then read feed marks, scallops and engaged flutes off the grid.

use gearflank::geometry::{GearSpec, HobSpec};
use gearflank::sim::*;

fn main() -> gearflank::Result<()> {
    let gear = GearSpec::new(1.814, 86, 20.0, 6.3)?;
    let hob = HobSpec::new(&gear, 70.0, 14, 1, 2.0)?;
    let params = GenerationParams::for_hob(&gear, &hob).with_grid(400, 200);
    let run = simulate_hobbing(&gear, &hob, &params)?;

    println!("{} passes planned, {} engaged", run.passes.len(), engagement_count(&run));
    println!("feed marks {:.4} um", feed_mark_height(&run.grid));
    println!("profile scallops {:.4} um", profile_scallop_height(&run.grid));

    let helix = extract_profile(&run.grid, TraceDirection::AlongHelix, run.grid.nu / 2)?;
    println!("mid-height helix trace: {} samples over {:.1} um", helix.len(), helix.length());

    let out = std::env::temp_dir().join("hobbed_flank.txt");
    gearflank::io::write_heightmap(&out, &run.grid.to_heightmap()?)?;
    println!("heightmap written to {}", out.display());
    Ok(())
}
