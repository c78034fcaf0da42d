//! The complete desk-scale study: all four shading cases, three families
//! each, with stability, fold landmarks, CSV tables, profiles and SVG
//! diagrams. Takes a few minutes.
//!
//! ```bash
//! cargo run --release --example full_scenario
//! ```

use drypatch::config::ScenarioConfig;
use drypatch::scenario::cmd_scenario;

fn main() {
    let cfg = ScenarioConfig::default(); // desk preset, rho in {1.5, 2, 2.5, 2.7}
    let out = std::path::Path::new("out_scenario");
    let manifest = cmd_scenario(&cfg, out).expect("scenario run");
    println!(
        "{} branches traced, {} failed; outputs in {}",
        manifest.total_branches,
        manifest.failed_branches,
        out.display()
    );
    for case in &manifest.cases {
        println!("rho = {}: p1 = {:?}", case.rho, case.p1);
        for b in &case.branches {
            println!(
                "  {:10} points = {:3?} folds = {:?} extent = {:?}",
                b.family, b.points, b.folds, b.extent_in_p
            );
        }
    }
}
