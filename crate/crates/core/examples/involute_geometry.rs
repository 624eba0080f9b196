//! Involute helpers and the closed-form hobbing estimates.

use gearflank::geometry::*;

fn main() -> gearflank::Result<()> {
    let gear = GearSpec::new(1.814, 86, 20.0, 6.3)?;
    let hob = HobSpec::new(&gear, 70.0, 14, 1, 2.0)?;
    println!("pitch radius {:.4} mm, base radius {:.4} mm", gear.pitch_radius(), gear.base_radius());
    println!("tip {:.4} mm, root {:.4} mm", gear.tip_radius(), gear.root_radius());

    let rb = gear.base_radius();
    for r in [rb, gear.pitch_radius(), gear.tip_radius()] {
        let xi = gear.roll_at_radius(r)?;
        let p = involute_point(rb, xi)?;
        println!("r {r:.4}: roll {:.5} rad, point ({:.4}, {:.4})", xi, p[0], p[1]);
    }

    let est = KinematicDeviationEstimate::for_hobbing(&gear, &hob)?;
    println!("feed marks {:.4} um every {} mm", est.delta_x, est.valley_spacing);
    println!("profile scallops {:.4} um", est.delta_y);
    Ok(())
}
