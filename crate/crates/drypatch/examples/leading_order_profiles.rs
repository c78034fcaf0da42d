//! Leading-order localised profiles (spot A, spot B, rings, gaps) in
//! unscaled model variables, written as CSV files.
//!
//! ```bash
//! cargo run --release --example leading_order_profiles
//! ```

use drypatch::amplitude::{
    leading_order_gap, leading_order_spot, solve_gl_quadratic, GapBranch, ProfileFamily,
};
use drypatch::grid::build_grid;
use drypatch::model::{reduced_params, ModelParams};
use std::fmt::Write;

fn main() {
    let params = ModelParams::default();
    let rp = reduced_params(&params).unwrap();
    let grid = build_grid(200.0, 800).unwrap();
    let out = std::path::Path::new("out_leading_order");
    std::fs::create_dir_all(out).unwrap();

    let eps = 0.4;
    for family in [
        ProfileFamily::SpotA,
        ProfileFamily::SpotB,
        ProfileFamily::RingPlus,
        ProfileFamily::RingMinus,
    ] {
        let prof = leading_order_spot(&params, &rp, eps, family, &grid).unwrap();
        let mut csv = String::from("r,n,w\n");
        for i in 0..grid.t {
            writeln!(csv, "{},{},{}", grid.r[i], prof.n_of_r[i], prof.w_of_r[i]).unwrap();
        }
        let path = out.join(format!("{}.csv", family.label()));
        std::fs::write(&path, csv).unwrap();
        println!(
            "{}: p = {:.6}, n(0) = {:.6}, physical = {} -> {}",
            family.label(),
            prof.p,
            prof.n_of_r[0],
            prof.physical,
            path.display()
        );
    }

    let ground = solve_gl_quadratic(1500).unwrap();
    for branch in [GapBranch::SubBare, GapBranch::SuperVegetated] {
        let prof = leading_order_gap(&params, &rp, 0.5, branch, &grid, &ground).unwrap();
        let mut csv = String::from("r,n,w\n");
        for i in 0..grid.t {
            writeln!(csv, "{},{},{}", grid.r[i], prof.n_of_r[i], prof.w_of_r[i]).unwrap();
        }
        let path = out.join(format!("{}.csv", prof.family.label()));
        std::fs::write(&path, csv).unwrap();
        println!(
            "{}: p = {:.6}, min n = {:.6}, physical = {} -> {}",
            prof.family.label(),
            prof.p,
            prof.n_of_r.iter().cloned().fold(f64::MAX, f64::min),
            prof.physical,
            path.display()
        );
    }
}
