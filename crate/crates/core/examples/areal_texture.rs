//! Areal parameters of a hobbed flank next to a crossed-sine texture.

use std::f64::consts::PI;

use gearflank::areal::Heightmap;
use gearflank::geometry::{GearSpec, HobSpec};
use gearflank::io::{analyze_areal, ArealOptions};
use gearflank::sim::{simulate_hobbing, GenerationParams};

const KEYS: [&str; 10] = ["Sa", "Sq", "St", "Ssk", "Sku", "Str", "Sal", "Sdr", "Sfd", "Kα"];

fn main() -> gearflank::Result<()> {
    let gear = GearSpec::new(1.814, 86, 20.0, 6.3)?;
    let hob = HobSpec::new(&gear, 70.0, 14, 1, 2.0)?;
    let params = GenerationParams::for_hob(&gear, &hob).with_grid(256, 256);
    let hobbed = simulate_hobbing(&gear, &hob, &params)?.grid.to_heightmap()?;

    let crossed = Heightmap::from_fn(256, 256, 2.0, 2.0, |x, y| {
        (2.0 * PI * x / 64.0).sin() + (2.0 * PI * y / 64.0).sin()
    })?;

    for (label, map) in [("hobbed", &hobbed), ("crossed", &crossed)] {
        let rep = analyze_areal(map, &ArealOptions::default())?.report()?;
        print!("{label:>8}:");
        for k in KEYS {
            match rep.value(k) {
                Some(v) => print!(" {k} {v:.4}"),
                None => print!(" {k} -"),
            }
        }
        println!();
    }
    Ok(())
}
