//! Closed-form bifurcation data for the four shading cases: critical
//! precipitation, reduced constants, normal-form coefficients and the
//! Turing onset of the full model.
//!
//! ```bash
//! cargo run --release --example bifurcation_points
//! ```

use drypatch::config::ScenarioConfig;
use drypatch::scenario::{bifpoints_records, bifpoints_table};

fn main() {
    let cfg = ScenarioConfig::default();
    let records = bifpoints_records(&cfg).expect("valid default parameters");
    print!("{}", bifpoints_table(&records));
    println!();
    for r in &records {
        println!(
            "rho = {}: onset p1 = {:.8} (reduced estimate {:.8}), k1 = {:.6} (estimate {:.6})",
            r.rho,
            r.p1.unwrap(),
            r.p1_reduced_estimate.unwrap(),
            r.k1.unwrap(),
            r.k1_reduced_estimate.unwrap(),
        );
    }
}
