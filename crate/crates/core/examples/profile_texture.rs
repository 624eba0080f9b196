//! Profile parameters of a two-tone trace, with and without a Gaussian
//! cutoff.

use std::f64::consts::PI;

use gearflank::io::{analyze_profile, PlotKind, ProfileOptions};
use gearflank::profile::{Profile, ReferenceForm};

fn main() -> gearflank::Result<()> {
    let trace = Profile::from_fn(4000, 1.0, |x| {
        0.8 * (2.0 * PI * x / 50.0).sin() + 2.0 * (2.0 * PI * x / 800.0).sin()
    })?;

    let raw = ProfileOptions { form: ReferenceForm::Line, ..Default::default() };
    let filtered = ProfileOptions { lc_mm: Some(0.25), ..raw };
    for (label, opts) in [("primitive", raw), ("roughness", filtered)] {
        let rep = analyze_profile(&trace, &opts)?.report()?;
        print!("{label:>10}:");
        for k in ["Pa", "Pq", "Pt", "Psk", "Pku", "PSm", "PΔq", "Pλq", "Pmq"] {
            match rep.value(k) {
                Some(v) => print!(" {k} {v:.4}"),
                None => print!(" {k} -"),
            }
        }
        println!();
    }

    let a = analyze_profile(&trace, &raw)?;
    if let Some(acf) = a.plot(PlotKind::Acf) {
        println!("ACF series has {} points", acf.x.len());
    }
    Ok(())
}
