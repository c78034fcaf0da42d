//! Scenario execution behind the command-line front end: bifurcation-point
//! reports, single solves, branch tracing with stability, and the four-case
//! shading study with its file outputs.

use crate::amplitude::{
    leading_order_gap, solve_gl_cubic, solve_gl_quadratic, GLGroundState, GapBranch,
};
use crate::bessel::j0;
use crate::config::{Family, ScenarioConfig};
use crate::continuation::{
    branch_extent_in_p, continue_branch, detect_onset, Branch, BranchFamily, ContinueOpts,
    Direction, PointStability,
};
use crate::error::{Error, Result};
use crate::grid::{build_grid, radial_laplacian, RadialGrid, RadialLaplacian};
use crate::model::{
    critical_precipitation, normal_form_homogeneous, normal_form_turing, reduced_params,
    temporal_growth, turing_onset_full, vegetated_state, ModelParams, TuringOnset, UniformKind,
    OMEGA_STAR,
};
use crate::report::{
    write_bifurcation_svg, write_branch_csv, write_json, write_profile_csv, Curve,
};
use crate::solver::{newton_solve, NewtonOpts, Profile, SystemDef};
use crate::stability::EigenOpts;
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Per-rho record written by `bifpoints`.
#[derive(Debug, Clone, Serialize)]
pub struct BifpointsRecord {
    pub rho: f64,
    pub p_c: f64,
    pub a: f64,
    pub b: f64,
    pub ab: f64,
    pub big_k: f64,
    pub k: Option<f64>,
    pub omega: Option<f64>,
    pub p0: Option<f64>,
    pub c0_homogeneous: f64,
    pub c2: f64,
    pub c0_turing: Option<f64>,
    pub c3: Option<f64>,
    pub nu_core: Option<f64>,
    pub omega_star: f64,
    /// Rings and spot B exist only above the omega threshold.
    pub spot_b_rings_available: bool,
    pub p1: Option<f64>,
    pub k1: Option<f64>,
    pub p1_reduced_estimate: Option<f64>,
    pub k1_reduced_estimate: Option<f64>,
}

/// Computes the closed-form constants and the Turing onset per rho case.
pub fn bifpoints_records(cfg: &ScenarioConfig) -> Result<Vec<BifpointsRecord>> {
    let mut out = Vec::new();
    for &rho in &cfg.rho_cases {
        let params = cfg.params.with_rho(rho);
        params.validate()?;
        let p_c = critical_precipitation(&params)?;
        let rp = reduced_params(&params)?;
        let nf_h = normal_form_homogeneous(&rp);
        let nf_t = normal_form_turing(&rp).ok();
        let onset = turing_onset_full(&params).ok();
        out.push(BifpointsRecord {
            rho,
            p_c,
            a: rp.a,
            b: rp.b,
            ab: rp.a * rp.b,
            big_k: rp.big_k,
            k: rp.turing.map(|t| t.k),
            omega: rp.turing.map(|t| t.omega),
            p0: rp.turing.map(|t| t.p0),
            c0_homogeneous: nf_h.c0,
            c2: nf_h.c2.unwrap(),
            c0_turing: nf_t.as_ref().map(|n| n.c0),
            c3: nf_t.as_ref().and_then(|n| n.c3),
            nu_core: nf_t.as_ref().and_then(|n| n.nu_core),
            omega_star: OMEGA_STAR,
            spot_b_rings_available: rp.turing.map(|t| t.omega > OMEGA_STAR).unwrap_or(false),
            p1: onset.as_ref().map(|o| o.p1),
            k1: onset.as_ref().map(|o| o.k1),
            p1_reduced_estimate: onset.as_ref().and_then(|o| o.p1_reduced),
            k1_reduced_estimate: onset.as_ref().and_then(|o| o.k1_reduced),
        });
    }
    Ok(out)
}

/// Renders the records as an aligned text table.
pub fn bifpoints_table(records: &[BifpointsRecord]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:>6} {:>9} {:>10} {:>8} {:>8} {:>10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>10} {:>10}\n",
        "rho", "p_c", "K", "k", "omega", "P0", "c0_hom", "c2", "c0_tur", "c3", "nu_core", "p1", "k1"
    ));
    for r in records {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
        s.push_str(&format!(
            "{:>6.3} {:>9.6} {:>10.6} {:>8} {:>8} {:>10} {:>9.6} {:>9.6} {:>9} {:>9} {:>9} {:>10} {:>10}\n",
            r.rho,
            r.p_c,
            r.big_k,
            f(r.k),
            f(r.omega),
            f(r.p0),
            r.c0_homogeneous,
            r.c2,
            f(r.c0_turing),
            f(r.c3),
            f(r.nu_core),
            f(r.p1),
            f(r.k1),
        ));
    }
    s
}

/// `bifpoints`: writes the JSON record and aligned table.
pub fn cmd_bifpoints(cfg: &ScenarioConfig, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let records = bifpoints_records(cfg)?;
    write_json(&out_dir.join("bifpoints.json"), &records)?;
    let table = bifpoints_table(&records);
    std::fs::write(out_dir.join("bifpoints.txt"), &table)?;
    print!("{table}");
    Ok(())
}

/// `uniform`: uniform states over a precipitation sweep per rho case.
pub fn cmd_uniform(cfg: &ScenarioConfig, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let mut out = String::from("rho,p,kind,n_star,w_star,physical\n");
    for &rho in &cfg.rho_cases {
        let params = cfg.params.with_rho(rho);
        let p_c = critical_precipitation(&params)?;
        let n_sweep = 60;
        for i in 0..=n_sweep {
            let p = 2.5 * p_c * i as f64 / n_sweep as f64;
            for st in crate::model::uniform_states(&params.with_p(p)) {
                let kind = match st.kind {
                    UniformKind::Bare => "bare",
                    UniformKind::Vegetated => "vegetated",
                };
                out.push_str(&format!(
                    "{rho},{p:.8},{kind},{:.12e},{:.12e},{}\n",
                    st.n_star, st.w_star, st.physical
                ));
            }
        }
    }
    let path = out_dir.join("uniform_states.csv");
    std::fs::write(&path, out)?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct AmplitudeReport {
    pub quadratic_q_at_0: f64,
    pub quadratic_decay_rate: f64,
    pub cubic_c0: f64,
    pub cubic_c3: f64,
    pub cubic_q0: f64,
    pub cubic_decay_rate: f64,
}

/// `amplitude`: both ground states with their fitted constants. The cubic
/// coefficients default to the Turing normal form of the first rho case.
pub fn cmd_amplitude(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    c0_override: Option<f64>,
    c3_override: Option<f64>,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let quad = solve_gl_quadratic(2000)?;
    let (c0, c3) = match (c0_override, c3_override) {
        (Some(c0), Some(c3)) => (c0, c3),
        _ => {
            let rho = cfg.rho_cases.first().copied().unwrap_or(1.5);
            let rp = reduced_params(&cfg.params.with_rho(rho))?;
            let nf = normal_form_turing(&rp)?;
            (nf.c0, nf.c3.unwrap())
        }
    };
    let cubic = solve_gl_cubic(c0, c3, 2000)?;
    let mut qcsv = String::from("s,q\n");
    for (s, q) in quad.s_grid.iter().zip(&quad.q) {
        qcsv.push_str(&format!("{s:.8e},{q:.12e}\n"));
    }
    std::fs::write(out_dir.join("gl_quadratic.csv"), qcsv)?;
    let mut ccsv = String::from("s,q\n");
    for (s, q) in cubic.s_grid.iter().zip(&cubic.q) {
        ccsv.push_str(&format!("{s:.8e},{q:.12e}\n"));
    }
    std::fs::write(out_dir.join("gl_cubic.csv"), ccsv)?;
    let report = AmplitudeReport {
        quadratic_q_at_0: quad.q_at_0,
        quadratic_decay_rate: quad.decay_rate,
        cubic_c0: c0,
        cubic_c3: c3,
        cubic_q0: cubic.q_at_0,
        cubic_decay_rate: cubic.decay_rate,
    };
    write_json(&out_dir.join("gl_report.json"), &report)?;
    println!(
        "quadratic q(0) = {:.8} (decay {:.4}); cubic q0 = {:.8} (decay {:.4})",
        report.quadratic_q_at_0,
        report.quadratic_decay_rate,
        report.cubic_q0,
        report.cubic_decay_rate
    );
    Ok(())
}

/// Builds a localised spot seed anchored at the computed onset: the
/// leading-order perturbation shape (Bessel core, exponential envelope)
/// at finite amplitude on the exact uniform background.
pub fn spot_seed(
    params: &ModelParams,
    onset: &TuringOnset,
    grid: &RadialGrid,
    p_offset: f64,
    amplitude: f64,
    envelope: f64,
) -> Result<(Vec<f64>, f64)> {
    let p = onset.p1 - p_offset;
    let rp = reduced_params(params)?;
    let t = rp.turing.ok_or(Error::NoTuringPoint)?;
    let veg = vegetated_state(&params.with_p(p)).ok_or_else(|| {
        Error::InvalidParams(format!("no vegetated state at p = {p}"))
    })?;
    let ab = rp.a * rp.b;
    let (k, omega) = (t.k, t.omega);
    // w/n perturbation ratio of the leading-order spot core
    let n_base = k.powi(4) / (1.0 - ab);
    let w_ratio = params.beta * (k * k / (rp.b * (1.0 - ab)) + 1.0 / rp.b)
        / (n_base / (k * k));
    let _ = omega;
    let tn = grid.t;
    let mut u = vec![0.0; 2 * tn];
    for i in 0..tn {
        let bump = amplitude * j0(onset.k1 * grid.r[i]) * (-envelope * grid.r[i]).exp();
        u[i] = veg.n_star + bump;
        u[tn + i] = veg.w_star + w_ratio * bump;
    }
    Ok((u, p))
}

/// Converges a spot A profile near the onset, walking a small retry
/// ladder of seed offsets and amplitudes.
pub fn converge_spot(
    params: &ModelParams,
    onset: &TuringOnset,
    grid: &RadialGrid,
    lap: &RadialLaplacian,
    cfg: &ScenarioConfig,
) -> Result<Profile> {
    let sys = SystemDef::FullVonHardenberg(*params);
    let newton = NewtonOpts {
        tol: cfg.tolerances.newton_tol,
        ..Default::default()
    };
    for offset_mult in [1.0, 1.5, 2.2] {
        for amp_mult in [1.0, 1.6] {
            let (u, p) = spot_seed(
                params,
                onset,
                grid,
                cfg.seeds.spot_p_offset * offset_mult,
                cfg.seeds.spot_amplitude * amp_mult,
                cfg.seeds.spot_envelope,
            )?;
            let prof = newton_solve(&sys, &u, p, grid, lap, &newton)?;
            if prof.converged && prof.amplitude() > 25.0 * cfg.tolerances.amp_tol {
                return Ok(prof);
            }
        }
    }
    Err(Error::ShootingFailed(
        "spot seed did not converge to a localised profile".into(),
    ))
}

/// Converges a gap profile from its leading-order construction.
pub fn converge_gap(
    params: &ModelParams,
    grid: &RadialGrid,
    lap: &RadialLaplacian,
    cfg: &ScenarioConfig,
    branch: GapBranch,
    ground: &GLGroundState,
) -> Result<Profile> {
    let rp = reduced_params(params)?;
    let sys = SystemDef::FullVonHardenberg(*params);
    let newton = NewtonOpts {
        tol: cfg.tolerances.newton_tol,
        ..Default::default()
    };
    for eps_mult in [1.0, 0.7, 1.3] {
        let eps = cfg.seeds.gap_eps * eps_mult;
        let lead = leading_order_gap(params, &rp, eps, branch, grid, ground)?;
        let u = [lead.n_of_r.clone(), lead.w_of_r.clone()].concat();
        let prof = newton_solve(&sys, &u, lead.p, grid, lap, &newton)?;
        if prof.converged && prof.amplitude() > 10.0 * cfg.tolerances.amp_tol {
            return Ok(prof);
        }
    }
    Err(Error::ShootingFailed(
        "gap seed did not converge to a localised profile".into(),
    ))
}

fn continue_opts(cfg: &ScenarioConfig, p_c: f64, with_stability: bool) -> ContinueOpts {
    ContinueOpts {
        ds_init: cfg.continuation.ds_init,
        ds_min: cfg.continuation.ds_min,
        ds_max: cfg.continuation.ds_max.min(3e-3),
        max_steps: cfg.continuation.max_steps,
        corrector_tol: cfg.tolerances.newton_tol,
        amp_tol: cfg.tolerances.amp_tol,
        osc_tol: cfg.tolerances.osc_tol,
        param_min: 0.02,
        param_max: 0.45,
        stability: if with_stability {
            Some(EigenOpts::iterative())
        } else {
            None
        },
        transcritical_pc: Some(p_c),
        ..Default::default()
    }
}

/// Traces one family branch for one rho case; returns the stitched
/// branch with onset landmark filled where detectable.
pub fn trace_family(
    params: &ModelParams,
    cfg: &ScenarioConfig,
    grid: &RadialGrid,
    lap: &RadialLaplacian,
    family: Family,
    onset: Option<&TuringOnset>,
    ground: &GLGroundState,
) -> Result<Branch> {
    let sys = SystemDef::FullVonHardenberg(*params);
    let p_c = critical_precipitation(params)?;
    let mut opts = continue_opts(cfg, p_c, cfg.stability_along_branches);
    let (start, bfam, uniform_kind) = match family {
        Family::SpotA => {
            let onset = onset.ok_or(Error::NoOnsetFound(0.0, 0.0))?;
            (
                converge_spot(params, onset, grid, lap, cfg)?,
                BranchFamily::SpotA,
                UniformKind::Vegetated,
            )
        }
        Family::GapSub => (
            converge_gap(params, grid, lap, cfg, GapBranch::SubBare, ground)?,
            BranchFamily::GapSub,
            UniformKind::Bare,
        ),
        Family::GapSuper => (
            converge_gap(params, grid, lap, cfg, GapBranch::SuperVegetated, ground)?,
            BranchFamily::GapSuper,
            UniformKind::Vegetated,
        ),
    };
    // each gap family is defined about its own base state, on its own side
    // of the critical precipitation
    match family {
        Family::GapSub => opts.param_max = p_c + 0.005,
        Family::GapSuper => opts.param_min = p_c - 0.005,
        Family::SpotA => {}
    }
    let down = continue_branch(&sys, &start, Direction::Decreasing, bfam, grid, lap, &opts)?;
    let up = continue_branch(&sys, &start, Direction::Increasing, bfam, grid, lap, &opts)?;
    let mut branch = Branch::stitch(down, up);
    let amp_near = match family {
        Family::SpotA => 0.15,
        _ => 0.05,
    };
    if let Ok(p_bif) = detect_onset(&sys, &branch, uniform_kind, amp_near) {
        branch.onset_p = Some(p_bif);
    }
    Ok(branch)
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchSummary {
    pub family: String,
    pub ok: bool,
    pub error: Option<String>,
    pub points: usize,
    pub terminated: Option<String>,
    pub p_range: Option<(f64, f64)>,
    pub folds: Vec<f64>,
    pub onset_p: Option<f64>,
    pub extent_in_p: Option<f64>,
    pub stable_range: Option<(f64, f64)>,
    pub all_unstable: Option<bool>,
    pub branch_csv: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoOutcome {
    pub rho: f64,
    pub p_c: f64,
    pub p1: Option<f64>,
    pub k1: Option<f64>,
    pub branches: Vec<BranchSummary>,
}

/// Runs the full scenario for one rho case and writes its files.
pub fn run_rho_case(cfg: &ScenarioConfig, rho: f64, out_dir: &Path) -> Result<RhoOutcome> {
    let params = cfg.params.with_rho(rho);
    params.validate()?;
    let p_c = critical_precipitation(&params)?;
    let grid = build_grid(cfg.grid.r_star, cfg.grid.t)?;
    let lap = radial_laplacian(&grid);
    let ground = solve_gl_quadratic(1500)?;
    let onset = turing_onset_full(&params).ok();
    let rho_tag = format!("rho_{rho:.2}").replace('.', "_");
    std::fs::create_dir_all(out_dir)?;

    let mut outcome = RhoOutcome {
        rho,
        p_c,
        p1: onset.as_ref().map(|o| o.p1),
        k1: onset.as_ref().map(|o| o.k1),
        branches: Vec::new(),
    };
    let mut curves: Vec<Curve> = Vec::new();

    // uniform reference curves for the diagram
    curves.push(uniform_curve(&params, p_c, UniformKind::Bare, grid.t));
    curves.push(uniform_curve(&params, p_c, UniformKind::Vegetated, grid.t));

    for family in &cfg.families {
        let label = family.label();
        match trace_family(&params, cfg, &grid, &lap, *family, onset.as_ref(), &ground) {
            Ok(branch) => {
                let csv_name = format!("branch_{rho_tag}_{label}.csv");
                write_branch_csv(&out_dir.join(&csv_name), &branch, p_c)?;
                write_landmark_profiles(out_dir, &rho_tag, label, &branch, &grid)?;
                let stable_ps: Vec<f64> = branch
                    .points
                    .iter()
                    .filter(|pt| pt.stability == PointStability::Stable)
                    .map(|pt| pt.param)
                    .collect();
                let stable_range = if stable_ps.is_empty() {
                    None
                } else {
                    Some((
                        stable_ps.iter().cloned().fold(f64::INFINITY, f64::min),
                        stable_ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    ))
                };
                let all_unstable = if cfg.stability_along_branches {
                    Some(
                        branch
                            .points
                            .iter()
                            .all(|pt| pt.stability == PointStability::Unstable),
                    )
                } else {
                    None
                };
                curves.push(branch_curve(&branch, p_c, *family));
                outcome.branches.push(BranchSummary {
                    family: label.to_string(),
                    ok: true,
                    error: None,
                    points: branch.points.len(),
                    terminated: Some(format!("{:?}", branch.terminated)),
                    p_range: Some((branch.min_param(), branch.max_param())),
                    folds: branch.folds.iter().map(|(_, p)| *p).collect(),
                    onset_p: branch.onset_p,
                    extent_in_p: branch_extent_in_p(&branch).ok(),
                    stable_range,
                    all_unstable,
                    branch_csv: Some(csv_name),
                });
            }
            Err(err) => outcome.branches.push(BranchSummary {
                family: label.to_string(),
                ok: false,
                error: Some(err.to_string()),
                points: 0,
                terminated: None,
                p_range: None,
                folds: Vec::new(),
                onset_p: None,
                extent_in_p: None,
                stable_range: None,
                all_unstable: None,
                branch_csv: None,
            }),
        }
    }
    write_bifurcation_svg(
        &out_dir.join(format!("diagram_{rho_tag}.svg")),
        &curves,
        &format!("localised radial branches, rho = {rho}"),
    )?;
    Ok(outcome)
}

fn uniform_curve(params: &ModelParams, p_c: f64, kind: UniformKind, t: usize) -> Curve {
    let sqrt_t = (t as f64).sqrt();
    let mut pts = Vec::new();
    let n_samples = 80;
    for i in 0..=n_samples {
        let p = 0.02 + (0.30 - 0.02) * i as f64 / n_samples as f64;
        match kind {
            UniformKind::Bare => {
                pts.push((p - p_c, 0.0, Some(p < p_c)));
            }
            UniformKind::Vegetated => {
                if let Some(st) = vegetated_state(&params.with_p(p)) {
                    // temporal stability from the dispersion relation
                    let qmax = 1.5 / (params.delta / 30.0).sqrt();
                    let mut gmax = f64::NEG_INFINITY;
                    for j in 1..=60 {
                        let q = qmax * j as f64 / 60.0;
                        gmax = gmax.max(temporal_growth(
                            &params.with_p(p),
                            st.n_star,
                            st.w_star,
                            q,
                        ));
                    }
                    pts.push((p - p_c, st.n_star * sqrt_t, Some(gmax < 0.0)));
                }
            }
        }
    }
    Curve {
        points: pts,
        color: match kind {
            UniformKind::Bare => "#64b5e0",
            UniformKind::Vegetated => "#e08f2e",
        },
        label: match kind {
            UniformKind::Bare => "bare".into(),
            UniformKind::Vegetated => "vegetated".into(),
        },
    }
}

fn branch_curve(branch: &Branch, p_c: f64, family: Family) -> Curve {
    let pts = branch
        .points
        .iter()
        .map(|pt| {
            let stable = match pt.stability {
                PointStability::Stable => Some(true),
                PointStability::Unstable => Some(false),
                PointStability::Unknown => None,
            };
            (pt.param - p_c, pt.l2norm, stable)
        })
        .collect();
    Curve {
        points: pts,
        color: match family {
            Family::SpotA => "#1f3b99",
            Family::GapSub => "#8040a0",
            Family::GapSuper => "#d9c32b",
        },
        label: family.label().into(),
    }
}

fn write_landmark_profiles(
    out_dir: &Path,
    rho_tag: &str,
    label: &str,
    branch: &Branch,
    grid: &RadialGrid,
) -> Result<()> {
    let mut marks: Vec<(String, usize)> = vec![("first".into(), 0)];
    if let Some((idx, _)) = branch.folds.first() {
        marks.push(("fold".into(), *idx));
    }
    // largest-amplitude point
    if let Some(imax) = (0..branch.points.len())
        .max_by(|&i, &j| branch.points[i].amplitude.partial_cmp(&branch.points[j].amplitude).unwrap())
    {
        marks.push(("max_amplitude".into(), imax));
    }
    marks.push(("last".into(), branch.points.len().saturating_sub(1)));
    for (name, idx) in marks {
        if let Some(pt) = branch.points.get(idx) {
            let path = out_dir.join(format!("profile_{rho_tag}_{label}_{name}.csv"));
            write_profile_csv(&path, &pt.profile, &grid.r, label)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub grid_r_star: f64,
    pub grid_t: usize,
    pub cases: Vec<RhoOutcome>,
    pub failed_branches: usize,
    pub total_branches: usize,
}

/// `scenario`: all rho cases (in a bounded worker pool) with per-branch
/// CSVs, landmark profiles, per-case SVG diagrams, and a run manifest.
/// Per-branch failures are recorded in the manifest; the run errors only
/// when every branch fails.
pub fn cmd_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunManifest> {
    std::fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(if cfg.max_workers == 0 {
            rayon::current_num_threads().min(4)
        } else {
            cfg.max_workers
        })
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<RhoOutcome>> = pool.install(|| {
        cfg.rho_cases
            .par_iter()
            .map(|&rho| run_rho_case(cfg, rho, out_dir))
            .collect()
    });
    let mut cases = Vec::new();
    for (rho, res) in cfg.rho_cases.iter().zip(results) {
        match res {
            Ok(outcome) => cases.push(outcome),
            Err(err) => cases.push(RhoOutcome {
                rho: *rho,
                p_c: f64::NAN,
                p1: None,
                k1: None,
                branches: vec![BranchSummary {
                    family: "all".into(),
                    ok: false,
                    error: Some(err.to_string()),
                    points: 0,
                    terminated: None,
                    p_range: None,
                    folds: Vec::new(),
                    onset_p: None,
                    extent_in_p: None,
                    stable_range: None,
                    all_unstable: None,
                    branch_csv: None,
                }],
            }),
        }
    }
    let total: usize = cases.iter().map(|c| c.branches.len()).sum();
    let failed: usize = cases
        .iter()
        .map(|c| c.branches.iter().filter(|b| !b.ok).count())
        .sum();
    let manifest = RunManifest {
        grid_r_star: cfg.grid.r_star,
        grid_t: cfg.grid.t,
        cases,
        failed_branches: failed,
        total_branches: total,
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// `solve`: one converged profile (spot near onset or gap near p_c).
pub fn cmd_solve(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    rho: f64,
    family: Family,
) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let params = cfg.params.with_rho(rho);
    let grid = build_grid(cfg.grid.r_star, cfg.grid.t)?;
    let lap = radial_laplacian(&grid);
    let prof = match family {
        Family::SpotA => {
            let onset = turing_onset_full(&params)?;
            converge_spot(&params, &onset, &grid, &lap, cfg)?
        }
        Family::GapSub => {
            let ground = solve_gl_quadratic(1500)?;
            converge_gap(&params, &grid, &lap, cfg, GapBranch::SubBare, &ground)?
        }
        Family::GapSuper => {
            let ground = solve_gl_quadratic(1500)?;
            converge_gap(&params, &grid, &lap, cfg, GapBranch::SuperVegetated, &ground)?
        }
    };
    let rho_tag = format!("rho_{rho:.2}").replace('.', "_");
    let path = out_dir.join(format!("profile_{rho_tag}_{}.csv", family.label()));
    write_profile_csv(&path, &prof, &grid.r, family.label())?;
    println!(
        "converged {} at p = {:.6} (|n| = {:.4}, residual {:.2e}); wrote {}",
        family.label(),
        prof.param,
        prof.l2norm,
        prof.residual_norm,
        path.display()
    );
    Ok(path)
}

/// `continue`: one stitched branch for a family at one rho.
pub fn cmd_continue(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    rho: f64,
    family: Family,
) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let params = cfg.params.with_rho(rho);
    let p_c = critical_precipitation(&params)?;
    let grid = build_grid(cfg.grid.r_star, cfg.grid.t)?;
    let lap = radial_laplacian(&grid);
    let ground = solve_gl_quadratic(1500)?;
    let onset = turing_onset_full(&params).ok();
    let branch = trace_family(&params, cfg, &grid, &lap, family, onset.as_ref(), &ground)?;
    let rho_tag = format!("rho_{rho:.2}").replace('.', "_");
    let path = out_dir.join(format!("branch_{rho_tag}_{}.csv", family.label()));
    write_branch_csv(&path, &branch, p_c)?;
    write_landmark_profiles(out_dir, &rho_tag, family.label(), &branch, &grid)?;
    println!(
        "{}: {} points, terminated {:?}, p in [{:.6}, {:.6}], folds at {:?}",
        family.label(),
        branch.points.len(),
        branch.terminated,
        branch.min_param(),
        branch.max_param(),
        branch.folds.iter().map(|(_, p)| *p).collect::<Vec<_>>()
    );
    Ok(path)
}

/// `stability`: reload a stored profile, confirm its residual, and write
/// the eigenvalue report.
pub fn cmd_stability(cfg: &ScenarioConfig, out_dir: &Path, profile_path: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let (mut profile, r, family) = crate::report::read_profile_csv(profile_path)?;
    let t = r.len();
    if t < 4 {
        return Err(Error::BadGrid(format!("{profile_path:?} has {t} rows")));
    }
    let r_star = *r.last().unwrap();
    let grid = build_grid(r_star, t)?;
    let lap = radial_laplacian(&grid);
    // the round trip must reproduce the stored residual
    let rho = cfg.params.rho;
    let params = cfg.params.with_rho(rho);
    let sys = SystemDef::FullVonHardenberg(params);
    let res = crate::solver::residual(&sys, &profile.state(), profile.param, &lap)?;
    let rnorm = crate::solver::norm2(&res);
    if profile.residual_norm.is_finite() && (rnorm - profile.residual_norm).abs() > 1e-12 {
        eprintln!(
            "note: stored residual {:.3e} vs recomputed {:.3e} (check that the configured parameters match the file)",
            profile.residual_norm, rnorm
        );
    }
    profile.residual_norm = rnorm;
    profile.converged = rnorm < 1e-8;
    let report = crate::stability::radial_stability(&sys, &profile, &grid, &EigenOpts::default())?;
    let out = out_dir.join("stability_report.json");
    write_json(&out, &report)?;
    println!(
        "{} profile at p = {:.6}: {:?} (rightmost Re = {:+.3e}); wrote {}",
        family,
        profile.param,
        report.classification,
        report.rightmost_real(),
        out.display()
    );
    Ok(())
}
