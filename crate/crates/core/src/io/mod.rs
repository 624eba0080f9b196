//! File formats, reports, plot series and run configuration.
//!
//! Numbers are written with 9 significant digits throughout.

mod analysis;
mod config;
mod report;
mod text;

pub use analysis::{
    analyze_areal, analyze_profile, deviation_parameters, directional_variances, ArealAnalysis, ArealOptions,
    PlotKind, PlotSeries, ProfileAnalysis, ProfileOptions,
};
pub use config::{
    AnalysisSection, GearSection, HobSection, Method, RunConfig, ShaperSection, SimulationSection, ToothEntry,
    ToothSetManifest, TOOTHSET_MANIFEST,
};
pub use report::{compare_reports, Comparison, Delta, Parameter, ParameterReport, ReportFormat, Status};
pub use text::{
    heightmap_from_str, heightmap_to_string, profile_from_str, profile_to_string, read_heightmap, read_profile,
    write_heightmap, write_profile,
};

/// `v` in scientific notation with 9 significant digits.
pub fn sig(v: f64) -> String {
    format!("{v:.8e}")
}

/// `v` rounded to 9 significant digits.
pub fn round_sig(v: f64) -> f64 {
    sig(v).parse().expect("formatted float parses")
}
