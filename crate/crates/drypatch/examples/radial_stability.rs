//! Radial spectral stability of a converged spot: full dense spectrum and
//! shift-invert Arnoldi agree on the rightmost eigenvalue.
//!
//! ```bash
//! cargo run --release --example radial_stability
//! ```

use drypatch::config::ScenarioConfig;
use drypatch::grid::{build_grid, radial_laplacian};
use drypatch::model::{turing_onset_full, ModelParams};
use drypatch::scenario::converge_spot;
use drypatch::solver::SystemDef;
use drypatch::stability::{radial_stability, EigenOpts};

fn main() {
    let params = ModelParams::default();
    let cfg = ScenarioConfig::default();
    let grid = build_grid(200.0, 500).unwrap();
    let lap = radial_laplacian(&grid);
    let onset = turing_onset_full(&params).unwrap();
    let prof = converge_spot(&params, &onset, &grid, &lap, &cfg).unwrap();
    let sys = SystemDef::FullVonHardenberg(params);

    let dense = radial_stability(&sys, &prof, &grid, &EigenOpts::default()).unwrap();
    let iterative = radial_stability(&sys, &prof, &grid, &EigenOpts::iterative()).unwrap();

    println!("profile at p = {:.6} (amplitude {:.4})", prof.param, prof.amplitude());
    println!(
        "dense      ({:?}): rightmost Re = {:+.6e} -> {:?}",
        dense.method,
        dense.rightmost_real(),
        dense.classification
    );
    println!(
        "iterative  ({:?}): rightmost Re = {:+.6e} -> {:?}",
        iterative.method,
        iterative.rightmost_real(),
        iterative.classification
    );
    println!("leading eigenvalues (dense):");
    for z in dense.rightmost.iter().take(6) {
        println!("  {:+.6e} {:+.6e}i", z.re, z.im);
    }
    println!("note: radial stability is necessary but not sufficient for planar stability");
}
