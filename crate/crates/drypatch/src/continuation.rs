//! Pseudo-arclength continuation of stationary profiles in the active
//! parameter, with fold detection, per-point stability and the
//! bifurcation-point landmarks used by the scenario driver.
//!
//! The corrector solves the bordered system (residual plus a secant
//! arclength constraint) with the banded bordered factorisation, so folds
//! are traversed without special casing. State components enter the
//! arclength metric with weight `1/T`, which makes step lengths live in
//! the `(p, norm/sqrt(T))` plane regardless of resolution.

use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialLaplacian};
use crate::linalg::BorderedFactors;
use crate::model::{vegetated_state, UniformKind};
use crate::solver::{
    deinterleave, interleave, jacobian, newton_solve, norm2, residual, NewtonOpts, Profile,
    SystemDef,
};
use crate::stability::{radial_stability, Classification, EigenOpts};
use serde::{Deserialize, Serialize};

/// Stability tag attached to branch points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointStability {
    Stable,
    Unstable,
    Unknown,
}

/// Which solution family a branch belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchFamily {
    SpotA,
    GapSub,
    GapSuper,
    UniformVegetated,
    UniformBare,
}

impl BranchFamily {
    pub fn label(&self) -> &'static str {
        match self {
            BranchFamily::SpotA => "spot_a",
            BranchFamily::GapSub => "gap_sub",
            BranchFamily::GapSuper => "gap_super",
            BranchFamily::UniformVegetated => "uniform_vegetated",
            BranchFamily::UniformBare => "uniform_bare",
        }
    }
}

/// Why a branch trace stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    HitParameterBound,
    AmplitudeBelowTol,
    OscillationsReachBoundary,
    StepFailure,
    MaxSteps,
}

/// One accepted continuation point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchPoint {
    pub param: f64,
    pub l2norm: f64,
    pub amplitude: f64,
    pub stability: PointStability,
    pub fold_here: bool,
    pub profile: Profile,
}

/// An ordered branch with its landmarks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Branch {
    pub family: BranchFamily,
    pub points: Vec<BranchPoint>,
    pub terminated: Termination,
    /// Refined fold locations `(index of the accepted point, param)`.
    pub folds: Vec<(usize, f64)>,
    /// Bifurcation-from-uniform estimate filled in by [`detect_onset`].
    pub onset_p: Option<f64>,
}

impl Branch {
    pub fn params(&self) -> Vec<f64> {
        self.points.iter().map(|pt| pt.param).collect()
    }

    pub fn min_param(&self) -> f64 {
        self.points
            .iter()
            .map(|pt| pt.param)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_param(&self) -> f64 {
        self.points
            .iter()
            .map(|pt| pt.param)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Joins a decreasing-direction trace and an increasing-direction
    /// trace that share the same start point into one ordered branch.
    pub fn stitch(down: Branch, up: Branch) -> Branch {
        let mut points: Vec<BranchPoint> = down.points.into_iter().rev().collect();
        points.extend(up.points.into_iter().skip(1));
        let mut joined = Branch {
            family: up.family,
            points,
            terminated: up.terminated,
            folds: Vec::new(),
            onset_p: None,
        };
        mark_folds(&mut joined);
        joined
    }
}

/// Direction of the initial step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    fn sign(&self) -> f64 {
        match self {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        }
    }
}

/// Options controlling a branch trace.
#[derive(Debug, Clone)]
pub struct ContinueOpts {
    pub ds_init: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub max_steps: usize,
    pub corrector_tol: f64,
    pub corrector_iters: usize,
    pub param_min: f64,
    pub param_max: f64,
    /// Branch ends when a shrinking amplitude falls below this.
    pub amp_tol: f64,
    /// Oscillation amplitude in the outer 5% that ends the branch.
    pub osc_tol: f64,
    /// Cap on the step as a fraction of the current amplitude.
    pub amp_step_frac: f64,
    /// Compute stability per accepted point with these options.
    pub stability: Option<EigenOpts>,
    /// Critical parameter of the transcritical background exchange; when
    /// crossing it the far field is snapped onto the exchanged uniform
    /// state (full system only).
    pub transcritical_pc: Option<f64>,
}

impl Default for ContinueOpts {
    fn default() -> Self {
        ContinueOpts {
            ds_init: 1e-3,
            ds_min: 1e-6,
            ds_max: 5e-2,
            max_steps: 700,
            corrector_tol: 1e-10,
            corrector_iters: 10,
            param_min: 0.0,
            param_max: 0.5,
            amp_tol: 2e-4,
            osc_tol: 1e-6,
            amp_step_frac: 0.25,
            stability: None,
            transcritical_pc: None,
        }
    }
}

fn weighted_norm(du: &[f64], dp: f64, w: f64) -> f64 {
    (w * du.iter().map(|x| x * x).sum::<f64>() + dp * dp).sqrt()
}

/// True when the tail of `n` oscillates with amplitude above `tol` in the
/// outer 5% of the domain. Sign changes about the boundary value are
/// counted over the outer 15% so that a tail wavelength comparable to the
/// window is still recognised as oscillatory, while a slow monotone
/// background adjustment (no sign changes) is not.
fn oscillations_at_boundary(profile: &Profile, tol: f64) -> bool {
    let t = profile.n.len();
    let far = *profile.n.last().unwrap();
    let amp_window = &profile.n[(95 * t) / 100..];
    let maxdev = amp_window
        .iter()
        .fold(0.0f64, |acc, v| acc.max((v - far).abs()));
    if maxdev <= tol {
        return false;
    }
    let sign_window = &profile.n[(85 * t) / 100..];
    let mut changes = 0;
    let mut last_sign = 0i8;
    for v in sign_window {
        let d = v - far;
        if d.abs() > 1e-14 {
            let s = if d > 0.0 { 1 } else { -1 };
            if last_sign != 0 && s != last_sign {
                changes += 1;
            }
            last_sign = s;
        }
    }
    changes >= 2
}

/// The expected uniform background of the full system at precipitation
/// `p`: vegetated above the transcritical point, bare below.
fn expected_background(sys: &SystemDef, p: f64, p_c: f64) -> Option<(f64, f64)> {
    match sys {
        SystemDef::FullVonHardenberg(mp) => {
            if p >= p_c {
                vegetated_state(&mp.with_p(p)).map(|s| (s.n_star, s.w_star))
            } else {
                Some((0.0, p))
            }
        }
        SystemDef::ReducedNW { .. } => None,
    }
}

/// One bordered corrector solve: Newton on `[F; arclength constraint]`.
#[allow(clippy::too_many_arguments)]
fn correct(
    sys: &SystemDef,
    lap: &RadialLaplacian,
    u_pred: &[f64],
    p_pred: f64,
    tan_u: &[f64],
    tan_p: f64,
    w: f64,
    opts: &ContinueOpts,
) -> Result<Option<(Vec<f64>, f64)>> {
    let t2 = u_pred.len();
    let t = t2 / 2;
    let mut u = u_pred.to_vec();
    let mut p = p_pred;
    for _ in 0..opts.corrector_iters {
        let res = residual(sys, &u, p, lap)?;
        let g: f64 = w
            * tan_u
                .iter()
                .zip(u.iter().zip(u_pred))
                .map(|(ti, (ui, upi))| ti * (ui - upi))
                .sum::<f64>()
            + tan_p * (p - p_pred);
        let rnorm = (res.iter().map(|x| x * x).sum::<f64>() + g * g).sqrt();
        if rnorm < opts.corrector_tol {
            return Ok(Some((u, p)));
        }
        if !rnorm.is_finite() {
            return Ok(None);
        }
        let jac = jacobian(sys, &u, p, lap)?;
        let band = jac.to_banded();
        // border column: dF/dparam, border row: weighted tangent
        let (n, wv) = u.split_at(t);
        let mut dfdp = vec![0.0; t2];
        for i in 0..t {
            let (d1, d2) = sys.dresidual_dparam(n[i], wv[i]);
            dfdp[i] = d1;
            dfdp[t + i] = d2;
        }
        let col = interleave(&dfdp);
        let row: Vec<f64> = interleave(&tan_u.iter().map(|x| w * x).collect::<Vec<_>>());
        let rhs = interleave(&res.iter().map(|x| -x).collect::<Vec<_>>());
        let factors = match BorderedFactors::new(band, &col, &row, tan_p) {
            Ok(f) => f,
            Err(_) => return Ok(None),
        };
        let (dx, dp) = match factors.solve(&rhs, -g) {
            Ok(sol) => sol,
            Err(_) => return Ok(None),
        };
        let dx = deinterleave(&dx);
        for (ui, di) in u.iter_mut().zip(&dx) {
            *ui += di;
        }
        p += dp;
    }
    Ok(None)
}

/// Traces one branch from a converged start profile.
pub fn continue_branch(
    sys: &SystemDef,
    start: &Profile,
    direction: Direction,
    family: BranchFamily,
    grid: &RadialGrid,
    lap: &RadialLaplacian,
    opts: &ContinueOpts,
) -> Result<Branch> {
    if !start.converged {
        return Err(Error::InvalidParams(
            "continuation must start from a converged profile".into(),
        ));
    }
    let t = grid.t;
    let w = 1.0 / t as f64;
    let newton_opts = NewtonOpts {
        tol: opts.corrector_tol,
        ..Default::default()
    };
    let mut points: Vec<(Vec<f64>, f64)> = vec![(start.state(), start.param)];

    // first step: natural continuation with a few halvings on failure
    let mut ds0 = opts.ds_init;
    let mut second = None;
    for _ in 0..8 {
        let p1 = start.param + direction.sign() * ds0;
        let prof = newton_solve(sys, &start.state(), p1, grid, lap, &newton_opts)?;
        if prof.converged {
            second = Some((prof.state(), p1));
            break;
        }
        ds0 *= 0.5;
    }
    let mut terminated = Termination::MaxSteps;
    match second {
        Some(pt) => points.push(pt),
        None => terminated = Termination::StepFailure,
    }

    let mut ds: f64 = opts.ds_init;
    let mut prev_amp = amplitude_of(&points.last().unwrap().0);
    if terminated != Termination::StepFailure {
        for step in 0..opts.max_steps {
            let (ua, pa) = &points[points.len() - 2];
            let (ub, pb) = &points[points.len() - 1];
            let du: Vec<f64> = ub.iter().zip(ua).map(|(b, a)| b - a).collect();
            let dp = pb - pa;
            let tnorm = weighted_norm(&du, dp, w);
            if tnorm < 1e-15 {
                terminated = Termination::StepFailure;
                break;
            }
            let tan_u: Vec<f64> = du.iter().map(|x| x / tnorm).collect();
            let tan_p = dp / tnorm;
            let amp = amplitude_of(ub);
            let ds_eff = if amp > opts.amp_tol {
                ds.min((opts.amp_step_frac * amp).max(20.0 * opts.ds_min))
            } else {
                ds
            };
            let u_pred: Vec<f64> = ub.iter().zip(&tan_u).map(|(u, t)| u + ds_eff * t).collect();
            let p_pred = pb + ds_eff * tan_p;
            let corrected = correct(sys, lap, &u_pred, p_pred, &tan_u, tan_p, w, opts)?;
            let accepted = match corrected {
                Some((u, p)) => {
                    // reject correctors that wandered far off the prediction
                    let duw: Vec<f64> = u.iter().zip(&u_pred).map(|(a, b)| a - b).collect();
                    let wander = weighted_norm(&duw, p - p_pred, w);
                    if wander > 2.0 * ds_eff || !u.iter().all(|v| v.is_finite()) {
                        None
                    } else {
                        Some((u, p))
                    }
                }
                None => None,
            };
            let (mut u, mut p) = match accepted {
                Some(pair) => pair,
                None => {
                    ds *= 0.5;
                    if ds < opts.ds_min {
                        terminated = Termination::StepFailure;
                        break;
                    }
                    continue;
                }
            };
            // transcritical exchange: snap the far field onto the
            // uniform state that exists on this side of p_c
            if let Some(p_c) = opts.transcritical_pc {
                if let Some((n_bg, w_bg)) = expected_background(sys, p, p_c) {
                    let n_far = u[t - 1];
                    let w_far = u[2 * t - 1];
                    let mismatch = (n_far - n_bg).abs();
                    let amp_now = amplitude_of(&u);
                    if mismatch > 1e-8 && mismatch < 0.5 * amp_now.max(1e-3) {
                        let mut shifted = u.clone();
                        for i in 0..t {
                            shifted[i] -= n_far - n_bg;
                            shifted[t + i] -= w_far - w_bg;
                        }
                        if let Ok(snapped) =
                            newton_solve(sys, &shifted, p, grid, lap, &newton_opts)
                        {
                            if snapped.converged
                                && (snapped.n[t - 1] - n_bg).abs() < 1e-7
                                && snapped.amplitude() > opts.amp_tol
                            {
                                u = snapped.state();
                                p = snapped.param;
                            }
                        }
                    }
                }
            }
            points.push((u, p));
            ds = (ds * 1.3).min(opts.ds_max);
            let amp = amplitude_of(&points.last().unwrap().0);
            // a localised profile shrinking into the uniform branch; the
            // floor on prev_amp keeps roundoff-level "amplitudes" of a
            // genuinely uniform branch from triggering it
            if amp < opts.amp_tol && amp < 0.9 * prev_amp && prev_amp > 1e-9 {
                terminated = Termination::AmplitudeBelowTol;
                break;
            }
            prev_amp = amp;
            if p < opts.param_min || p > opts.param_max {
                terminated = Termination::HitParameterBound;
                break;
            }
            if step > 3 {
                let prof = Profile::from_state(&points.last().unwrap().0, p);
                if oscillations_at_boundary(&prof, opts.osc_tol) {
                    terminated = Termination::OscillationsReachBoundary;
                    break;
                }
            }
        }
    }

    // assemble branch points, attaching residual norms and stability
    let mut branch_points = Vec::with_capacity(points.len());
    for (u, p) in points {
        let res = residual(sys, &u, p, lap)?;
        let mut prof = Profile::from_state(&u, p);
        prof.residual_norm = norm2(&res);
        prof.converged = prof.residual_norm < 10.0 * opts.corrector_tol;
        let stability = match &opts.stability {
            Some(eopts) => match radial_stability(sys, &prof, grid, eopts) {
                Ok(rep) => match rep.classification {
                    Classification::Stable => PointStability::Stable,
                    Classification::Unstable => PointStability::Unstable,
                    Classification::Marginal => PointStability::Unknown,
                },
                Err(_) => PointStability::Unknown,
            },
            None => PointStability::Unknown,
        };
        branch_points.push(BranchPoint {
            param: p,
            l2norm: prof.l2norm,
            amplitude: prof.amplitude(),
            stability,
            fold_here: false,
            profile: prof,
        });
    }
    let mut branch = Branch {
        family,
        points: branch_points,
        terminated,
        folds: Vec::new(),
        onset_p: None,
    };
    mark_folds(&mut branch);
    Ok(branch)
}

fn amplitude_of(u: &[f64]) -> f64 {
    let t = u.len() / 2;
    let far = u[t - 1];
    u[..t]
        .iter()
        .fold(0.0f64, |acc, v| acc.max((v - far).abs()))
}

/// Flags fold points where the sign of the parameter increment between
/// accepted steps changes, refining the fold parameter with a local
/// parabola in the step index.
pub fn mark_folds(branch: &mut Branch) {
    let ps = branch.params();
    branch.folds.clear();
    for pt in branch.points.iter_mut() {
        pt.fold_here = false;
    }
    for i in 1..ps.len().saturating_sub(1) {
        let d0 = ps[i] - ps[i - 1];
        let d1 = ps[i + 1] - ps[i];
        // near-uniform endpoints produce parameter jitter, not folds
        if branch.points[i].amplitude < 2e-3 {
            continue;
        }
        if d0 * d1 < 0.0 {
            branch.points[i].fold_here = true;
            // parabola through (i-1, i, i+1) in the index coordinate
            let (pa, pb, pc) = (ps[i - 1], ps[i], ps[i + 1]);
            let denom = pa - 2.0 * pb + pc;
            let p_fold = if denom.abs() > 1e-300 {
                let s = 0.5 * (pa - pc) / denom;
                pb - 0.25 * (pa - pc) * s
            } else {
                pb
            };
            branch.folds.push((i, p_fold));
        }
    }
}

/// Extent of a sub-critical branch in the parameter: the detected
/// bifurcation point minus the (first) fold.
pub fn branch_extent_in_p(branch: &Branch) -> Result<f64> {
    let onset = branch
        .onset_p
        .ok_or_else(|| Error::MissingLandmarks("no detected bifurcation point".into()))?;
    let fold = branch
        .folds
        .iter()
        .map(|(_, p)| *p)
        .fold(f64::INFINITY, f64::min);
    if !fold.is_finite() {
        return Err(Error::MissingLandmarks("no fold on the branch".into()));
    }
    Ok(onset - fold)
}

/// Estimates where a branch bifurcates from the given uniform state by
/// extrapolating squared amplitude linearly in the parameter to zero.
///
/// Only well-localised points (flat outer tail) enter the fit, and the
/// branch must genuinely approach the uniform state: its smallest
/// amplitude must fall below `amp_near` while the largest exceeds ten
/// times that, otherwise `NoApproach`.
pub fn detect_onset(
    sys: &SystemDef,
    branch: &Branch,
    uniform: UniformKind,
    amp_near: f64,
) -> Result<f64> {
    let mut samples: Vec<(f64, f64)> = Vec::new(); // (p, amplitude vs uniform)
    for pt in &branch.points {
        let n_bg = match (sys, uniform) {
            (_, UniformKind::Bare) => 0.0,
            (SystemDef::FullVonHardenberg(mp), UniformKind::Vegetated) => {
                match vegetated_state(&mp.with_p(pt.param)) {
                    Some(s) => s.n_star,
                    None => continue,
                }
            }
            (SystemDef::ReducedNW { a, b }, UniformKind::Vegetated) => {
                pt.param / (1.0 - a * b)
            }
        };
        let amp = pt
            .profile
            .n
            .iter()
            .fold(0.0f64, |acc, v| acc.max((v - n_bg).abs()));
        // keep localised points only
        if pt.profile.tail_deviation() < 1e-5 {
            samples.push((pt.param, amp));
        }
    }
    if samples.len() < 3 {
        return Err(Error::NoApproach(f64::NAN));
    }
    let min_amp = samples.iter().map(|(_, a)| *a).fold(f64::INFINITY, f64::min);
    let max_amp = samples.iter().map(|(_, a)| *a).fold(0.0f64, f64::max);
    // the branch must genuinely shrink towards the uniform state: an
    // essentially flat branch (the uniform one) has nothing to extrapolate
    if min_amp > amp_near || max_amp < 1.5 * min_amp.max(1e-12) {
        return Err(Error::NoApproach(min_amp));
    }
    // linear fit of amplitude^2 against p over the smallest amplitudes,
    // weighted towards the points nearest the bifurcation where the
    // leading-order square-root law is cleanest
    samples.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
    let fitset = &samples[..samples.len().min(8)];
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (p, a) in fitset {
        let y = a * a;
        let w = 1.0 / (y * y).max(1e-300);
        sw += w;
        sx += w * p;
        sy += w * y;
        sxx += w * p * p;
        sxy += w * p * y;
    }
    let slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    let intercept = (sy - slope * sx) / sw;
    if slope.abs() < 1e-300 {
        return Err(Error::NoApproach(min_amp));
    }
    Ok(-intercept / slope)
}
