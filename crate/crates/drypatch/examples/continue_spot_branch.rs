//! Trace the localised spot branch at rho = 1.5 through its fold with
//! pseudo-arclength continuation, detect the fold and the bifurcation
//! point, and write the branch table plus an SVG diagram.
//!
//! ```bash
//! cargo run --release --example continue_spot_branch
//! ```

use drypatch::config::{Family, ScenarioConfig};
use drypatch::continuation::branch_extent_in_p;
use drypatch::grid::{build_grid, radial_laplacian};
use drypatch::model::{critical_precipitation, turing_onset_full};
use drypatch::report::{write_bifurcation_svg, write_branch_csv, Curve};
use drypatch::scenario::trace_family;
use drypatch::amplitude::solve_gl_quadratic;
use drypatch::continuation::PointStability;

fn main() {
    let cfg = ScenarioConfig::default();
    let params = cfg.params.with_rho(1.5);
    let p_c = critical_precipitation(&params).unwrap();
    let grid = build_grid(300.0, 1000).unwrap();
    let lap = radial_laplacian(&grid);
    let onset = turing_onset_full(&params).unwrap();
    let ground = solve_gl_quadratic(1500).unwrap();

    let branch = trace_family(&params, &cfg, &grid, &lap, Family::SpotA, Some(&onset), &ground)
        .expect("spot branch");
    println!(
        "{} points, terminated {:?}, p in [{:.6}, {:.6}]",
        branch.points.len(),
        branch.terminated,
        branch.min_param(),
        branch.max_param()
    );
    for (i, p) in &branch.folds {
        println!("fold at index {i}, p = {p:.6} (tipping point)");
    }
    println!("dispersion onset p1 = {:.6}", onset.p1);
    if let Some(p_bif) = branch.onset_p {
        println!("extrapolated bifurcation point = {p_bif:.6}");
    }
    if let Ok(extent) = branch_extent_in_p(&branch) {
        println!("branch extent in p (detected onset - fold) = {extent:.6}");
    }
    if let Some((_, fold_p)) = branch.folds.first() {
        println!("extent against the dispersion onset = {:.6}", onset.p1 - fold_p);
    }

    let out = std::path::Path::new("out_branch");
    std::fs::create_dir_all(out).unwrap();
    write_branch_csv(&out.join("spot_a_rho_1_5.csv"), &branch, p_c).unwrap();
    let curve = Curve {
        points: branch
            .points
            .iter()
            .map(|pt| {
                (
                    pt.param - p_c,
                    pt.l2norm,
                    match pt.stability {
                        PointStability::Stable => Some(true),
                        PointStability::Unstable => Some(false),
                        PointStability::Unknown => None,
                    },
                )
            })
            .collect(),
        color: "#1f3b99",
        label: "spot_a".into(),
    };
    write_bifurcation_svg(&out.join("spot_a_rho_1_5.svg"), &[curve], "spot A, rho = 1.5").unwrap();
    println!("wrote out_branch/spot_a_rho_1_5.{{csv,svg}}");
}
