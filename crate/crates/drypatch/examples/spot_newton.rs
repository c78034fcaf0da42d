//! Converge a localised spot of the full model with the damped Newton
//! solver, starting from a leading-order-informed seed near the Turing
//! onset, and measure its oscillatory tail wavenumber.
//!
//! ```bash
//! cargo run --release --example spot_newton
//! ```

use drypatch::config::ScenarioConfig;
use drypatch::grid::{build_grid, radial_laplacian};
use drypatch::model::{turing_onset_full, ModelParams};
use drypatch::scenario::converge_spot;

fn main() {
    let params = ModelParams::default(); // rho = 1.5
    let cfg = ScenarioConfig::default();
    let grid = build_grid(300.0, 1000).unwrap();
    let lap = radial_laplacian(&grid);

    let onset = turing_onset_full(&params).unwrap();
    println!("Turing onset: p1 = {:.8}, k1 = {:.6}", onset.p1, onset.k1);

    let prof = converge_spot(&params, &onset, &grid, &lap, &cfg).unwrap();
    println!(
        "converged spot at p = {:.6}: residual {:.2e} after {} iterations",
        prof.param, prof.residual_norm, prof.newton_iterations
    );
    println!(
        "core n(0) = {:.6}, far field n = {:.6}, amplitude = {:.6}, ||n|| = {:.6}",
        prof.n[0],
        prof.n.last().unwrap(),
        prof.amplitude(),
        prof.l2norm
    );
    if let Some(k_tail) = prof.tail_wavenumber(&grid.r) {
        println!(
            "tail wavenumber = {:.6} ({:+.2}% of k1)",
            k_tail,
            100.0 * (k_tail - onset.k1) / onset.k1
        );
    }
}
