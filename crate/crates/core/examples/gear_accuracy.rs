//! Pitch, runout and thickness deviations of a wheel with a bore offset and
//! one displaced tooth.

use gearflank::accuracy::*;
use gearflank::geometry::{FlankSide, GearSpec};

fn main() -> gearflank::Result<()> {
    let gear = GearSpec::new(1.814, 86, 20.0, 6.3)?;
    let mut teeth = ToothSet::nominal(gear)?.with_eccentricity(20.0, 0.0);
    if let Some(f) = teeth.teeth_mut()[10].flank_mut(FlankSide::Drive) {
        f.offset_um = 5.0;
    }

    let rep = deviation_report(&teeth, &DeviationOptions::for_gear(&gear))?;
    for side in [&rep.drive, &rep.non_drive] {
        println!("{}: fpt {:.3} um, Fp {:.3} um", side.side.as_str(), side.pitch.f_pt, side.pitch.f_p);
    }
    println!("Fr {:.3} um (twice the 20 um offset)", rep.runout.f_r);
    println!("Rs {:.3} um", rep.thickness.r_s);
    Ok(())
}
