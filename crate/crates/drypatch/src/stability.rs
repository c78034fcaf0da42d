//! Radial linear stability of converged profiles from the spectrum of the
//! discretised Jacobian.
//!
//! Small problems get the full dense spectrum. Larger ones use
//! shift-and-invert Arnoldi with banded factorisations, targeting the
//! rightmost part of the spectrum near a handful of real shifts, and a
//! coarse-grid dense solve cross-checks that no rightmost eigenvalue was
//! missed.
//!
//! Radial stability is a necessary but not sufficient condition for
//! planar stability: a profile reported stable here may still be unstable
//! to non-axisymmetric perturbations, so "stable" never claims more than
//! stability with respect to radial perturbations.

use crate::error::{Error, Result};
use crate::grid::{build_grid, radial_laplacian, RadialGrid};
use crate::linalg::dense_eigenvalues;
use crate::solver::{interleave, jacobian, Profile, SystemDef};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// How the spectrum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenMethod {
    DenseFull,
    IterativeRightmost,
}

/// Stability verdict with a dead band around zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Stable,
    Unstable,
    Marginal,
}

/// Options for [`radial_stability`].
#[derive(Debug, Clone)]
pub struct EigenOpts {
    /// Problems with `2T` at or below this use the dense path.
    pub dense_limit: usize,
    /// How many leading eigenvalues to report.
    pub m: usize,
    /// Dead band around zero for the classification.
    pub tol_zero: f64,
    /// Real shifts for the shift-invert sweeps.
    pub shifts: Vec<f64>,
    /// Krylov subspace dimension per shift.
    pub krylov: usize,
    /// Cross-check the iterative rightmost value on a coarse dense grid.
    pub certify: bool,
}

impl Default for EigenOpts {
    fn default() -> Self {
        EigenOpts {
            dense_limit: 2000,
            m: 10,
            tol_zero: 1e-7,
            shifts: vec![0.5, 0.05],
            krylov: 60,
            certify: true,
        }
    }
}

impl EigenOpts {
    /// Preset for per-point stability along a continuation branch.
    pub fn iterative() -> Self {
        EigenOpts {
            dense_limit: 0,
            ..Default::default()
        }
    }
}

/// Leading spectrum of the Jacobian at a profile and its classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenReport {
    /// Leading eigenvalues sorted by descending real part.
    pub rightmost: Vec<Complex64>,
    pub method: EigenMethod,
    pub classification: Classification,
    pub tol_zero: f64,
}

impl EigenReport {
    pub fn rightmost_real(&self) -> f64 {
        self.rightmost.first().map(|z| z.re).unwrap_or(f64::NAN)
    }
}

fn classify(rightmost: f64, tol_zero: f64) -> Classification {
    if rightmost > tol_zero {
        Classification::Unstable
    } else if rightmost < -tol_zero {
        Classification::Stable
    } else {
        Classification::Marginal
    }
}

/// Computes the radial stability of a converged profile.
pub fn radial_stability(
    sys: &SystemDef,
    profile: &Profile,
    grid: &RadialGrid,
    opts: &EigenOpts,
) -> Result<EigenReport> {
    if !profile.converged {
        return Err(Error::InvalidParams(
            "stability requested for a non-converged profile".into(),
        ));
    }
    let n = 2 * grid.t;
    if n <= opts.dense_limit {
        dense_report(sys, profile, grid, opts)
    } else {
        iterative_report(sys, profile, grid, opts)
    }
}

fn dense_report(
    sys: &SystemDef,
    profile: &Profile,
    grid: &RadialGrid,
    opts: &EigenOpts,
) -> Result<EigenReport> {
    let lap = radial_laplacian(grid);
    let jac = jacobian(sys, &profile.state(), profile.param, &lap)?;
    let mut ev = dense_eigenvalues(&jac.to_dense())?;
    ev.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
    ev.truncate(opts.m.max(1));
    let rightmost = ev[0].re;
    Ok(EigenReport {
        rightmost: ev,
        method: EigenMethod::DenseFull,
        classification: classify(rightmost, opts.tol_zero),
        tol_zero: opts.tol_zero,
    })
}

/// Shift-invert Arnoldi about one real shift; returns Ritz estimates of
/// the eigenvalues of the Jacobian closest to the shift.
fn shift_invert_ritz(
    sys: &SystemDef,
    profile: &Profile,
    grid: &RadialGrid,
    shift: f64,
    krylov: usize,
) -> Result<Vec<Complex64>> {
    let lap = radial_laplacian(grid);
    let jac = jacobian(sys, &profile.state(), profile.param, &lap)?;
    let mut band = jac.to_banded();
    let n = 2 * grid.t;
    for i in 0..n {
        band.add(i, i, -shift);
    }
    let lu = band.factor()?;
    let m = krylov.min(n);
    // deterministic generic start vector
    let mut v: Vec<f64> = (0..n).map(|i| 0.5 + (0.7 * i as f64).cos()).collect();
    let nrm = crate::solver::norm2(&v);
    v.iter_mut().for_each(|x| *x /= nrm);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut hess = vec![vec![0.0f64; m]; m + 1];
    let mut steps = 0;
    for k in 0..m {
        // w = (J - shift)^{-1} v_k, via the interleaved banded factors
        let mut w = interleave(&basis[k]);
        lu.solve_in_place(&mut w);
        let mut w = crate::solver::deinterleave(&w);
        // twice-repeated modified Gram-Schmidt
        for _ in 0..2 {
            for (j, bj) in basis.iter().enumerate() {
                let proj: f64 = bj.iter().zip(&w).map(|(a, b)| a * b).sum();
                hess[j][k] += proj;
                for (wi, bji) in w.iter_mut().zip(bj) {
                    *wi -= proj * bji;
                }
            }
        }
        let beta = crate::solver::norm2(&w);
        steps = k + 1;
        if beta < 1e-12 {
            break;
        }
        hess[k + 1][k] = beta;
        w.iter_mut().for_each(|x| *x /= beta);
        basis.push(w);
    }
    let mut hmat = nalgebra::DMatrix::zeros(steps, steps);
    for i in 0..steps {
        for j in 0..steps {
            hmat[(i, j)] = hess[i][j];
        }
    }
    let thetas = dense_eigenvalues(&hmat)?;
    Ok(thetas
        .into_iter()
        .filter(|th| th.norm() > 1e-10)
        .map(|th| Complex64::new(shift, 0.0) + th.inv())
        .collect())
}

fn iterative_report(
    sys: &SystemDef,
    profile: &Profile,
    grid: &RadialGrid,
    opts: &EigenOpts,
) -> Result<EigenReport> {
    let mut all: Vec<Complex64> = Vec::new();
    for &s in &opts.shifts {
        all.extend(shift_invert_ritz(sys, profile, grid, s, opts.krylov)?);
    }
    if all.is_empty() {
        return Err(Error::EigenFailure("no Ritz values computed".into()));
    }
    all.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
    // drop near-duplicates across shifts
    let mut ev: Vec<Complex64> = Vec::new();
    for z in all {
        if !ev.iter().any(|u| (u - z).norm() < 1e-6 * (1.0 + z.norm())) {
            ev.push(z);
        }
    }
    ev.truncate(opts.m.max(10));
    let rightmost = ev[0];

    if opts.certify {
        // coarse dense cross-check: a decimated copy of the profile on a
        // ~160-node grid must not reveal a missed rightmost eigenvalue
        let t_coarse = 160.min(grid.t);
        let coarse = build_grid(grid.r_star, t_coarse)?;
        let sample = |src: &[f64]| -> Vec<f64> {
            coarse
                .r
                .iter()
                .map(|&rc| {
                    let x = rc / grid.h;
                    let i = (x as usize).min(grid.t - 2);
                    let frac = x - i as f64;
                    src[i] * (1.0 - frac) + src[i + 1] * frac
                })
                .collect()
        };
        let mut cp = Profile::from_state(
            &[sample(&profile.n), sample(&profile.w)].concat(),
            profile.param,
        );
        cp.converged = true;
        cp.residual_norm = 0.0;
        let coarse_report = dense_report(sys, &cp, &coarse, opts)?;
        let band = 0.05 * (1.0 + rightmost.re.abs());
        if coarse_report.rightmost_real() > rightmost.re + band {
            return Err(Error::EigenFailure(format!(
                "coarse dense check found Re = {:.3e} above iterative rightmost {:.3e}",
                coarse_report.rightmost_real(),
                rightmost.re
            )));
        }
    }
    Ok(EigenReport {
        rightmost: ev,
        method: EigenMethod::IterativeRightmost,
        classification: classify(rightmost.re, opts.tol_zero),
        tol_zero: opts.tol_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::j0;
    use crate::grid::{build_grid, radial_laplacian};
    use crate::model::{reaction_jacobian, turing_onset_full, vegetated_state, ModelParams};
    use crate::solver::{newton_solve, NewtonOpts};

    fn uniform_profile(t: usize, n: f64, w: f64, p: f64) -> Profile {
        let mut pr = Profile::from_state(&[vec![n; t], vec![w; t]].concat(), p);
        pr.converged = true;
        pr.residual_norm = 0.0;
        pr
    }

    #[test]
    fn bare_state_flips_at_critical_precipitation() {
        let t = 150;
        let grid = build_grid(100.0, t).unwrap();
        let opts = EigenOpts::default();
        for (p, expect) in [
            (0.10, Classification::Stable),
            (0.15, Classification::Stable),
            (0.17, Classification::Unstable),
            (0.30, Classification::Unstable),
        ] {
            let params = ModelParams::default().with_p(p);
            let sys = SystemDef::FullVonHardenberg(params);
            let prof = uniform_profile(t, 0.0, p, p);
            let rep = radial_stability(&sys, &prof, &grid, &opts).unwrap();
            assert_eq!(rep.method, EigenMethod::DenseFull);
            assert_eq!(rep.classification, expect, "p = {p}");
        }
    }

    #[test]
    fn uniform_spectrum_matches_dispersion_relation() {
        // at a uniform state the Jacobian factors over the Laplacian
        // eigenmodes: its spectrum is the union over mu_j of
        // eig(J_reaction + mu_j D); the mu_j in turn approximate
        // -(z_j / r*)^2 with J1(z_j) = 0 at second order
        let t = 120;
        let r_star = 60.0;
        let grid = build_grid(r_star, t).unwrap();
        let params = ModelParams::default().with_p(0.24);
        let veg = vegetated_state(&params).unwrap();
        let sys = SystemDef::FullVonHardenberg(params);
        let prof = uniform_profile(t, veg.n_star, veg.w_star, 0.24);
        let opts = EigenOpts {
            m: 2 * t,
            ..Default::default()
        };
        let rep = radial_stability(&sys, &prof, &grid, &opts).unwrap();

        let lap = radial_laplacian(&grid);
        let mut lm = nalgebra::DMatrix::zeros(t, t);
        for i in 0..t {
            lm[(i, i)] = lap.diag[i];
            if i > 0 {
                lm[(i, i - 1)] = lap.sub[i - 1];
            }
            if i + 1 < t {
                lm[(i, i + 1)] = lap.sup[i];
            }
        }
        let mus = dense_eigenvalues(&lm).unwrap();
        let jr = reaction_jacobian(&params, veg.n_star, veg.w_star);
        let d = [[1.0, 0.0], [-params.delta * params.beta, params.delta]];
        let mut analytic: Vec<Complex64> = Vec::new();
        for mu in &mus {
            let a = jr[0][0] + mu.re * d[0][0];
            let b = jr[0][1] + mu.re * d[0][1];
            let c = jr[1][0] + mu.re * d[1][0];
            let e = jr[1][1] + mu.re * d[1][1];
            let tr = a + e;
            let det = a * e - b * c;
            let disc = Complex64::new(tr * tr - 4.0 * det, 0.0).sqrt();
            analytic.push((Complex64::new(tr, 0.0) + disc) * 0.5);
            analytic.push((Complex64::new(tr, 0.0) - disc) * 0.5);
        }
        for z in &rep.rightmost {
            let dmin = analytic
                .iter()
                .map(|u| (u - z).norm())
                .fold(f64::MAX, f64::min);
            assert!(
                dmin < 1e-6 * (1.0 + z.norm()),
                "unmatched {z}, nearest {dmin:e}"
            );
        }
        // the leading discrete Neumann wavenumbers track the J1 zeros
        let mut mu_sorted: Vec<f64> = mus.iter().map(|z| z.re).collect();
        mu_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (j, z_j) in [3.8317059702075125f64, 7.0155866698156188]
            .iter()
            .enumerate()
        {
            let q = z_j / r_star;
            let got = -mu_sorted[j + 1];
            assert!(
                (got - q * q).abs() < 5.0 * grid.h * grid.h,
                "mode {j}: {got} vs {}",
                q * q
            );
        }
    }

    #[test]
    fn dense_and_iterative_agree_on_a_localised_spot() {
        // converge a localised spot at moderate resolution, then compare
        // the two spectral routes on the rightmost eigenvalue
        let params = ModelParams::default();
        let onset = turing_onset_full(&params).unwrap();
        let t = 400;
        let grid = build_grid(200.0, t).unwrap();
        let lap = radial_laplacian(&grid);
        let p = onset.p1 - 0.0075;
        let params_p = params.with_p(p);
        let veg = vegetated_state(&params_p).unwrap();
        let sys = SystemDef::FullVonHardenberg(params);
        let wn_ratio = 1.672; // leading-order w/n perturbation ratio at rho = 1.5
        let mut u = vec![0.0; 2 * t];
        for i in 0..t {
            let bump = 0.25 * j0(onset.k1 * grid.r[i]) * (-0.1 * grid.r[i]).exp();
            u[i] = veg.n_star + bump;
            u[t + i] = veg.w_star + wn_ratio * bump;
        }
        let prof = newton_solve(&sys, &u, p, &grid, &lap, &NewtonOpts::default()).unwrap();
        assert!(prof.converged && prof.amplitude() > 0.01, "seed failed");

        let dense = radial_stability(&sys, &prof, &grid, &EigenOpts::default()).unwrap();
        let iter = radial_stability(&sys, &prof, &grid, &EigenOpts::iterative()).unwrap();
        assert_eq!(dense.method, EigenMethod::DenseFull);
        assert_eq!(iter.method, EigenMethod::IterativeRightmost);
        assert!(
            (dense.rightmost_real() - iter.rightmost_real()).abs() < 1e-8,
            "dense {} vs iterative {}",
            dense.rightmost_real(),
            iter.rightmost_real()
        );
        assert_eq!(dense.classification, iter.classification);
    }

    #[test]
    fn classification_invariant_under_grid_refinement() {
        let params = ModelParams::default();
        let onset = turing_onset_full(&params).unwrap();
        let p = onset.p1 - 0.0075;
        let params_p = params.with_p(p);
        let veg = vegetated_state(&params_p).unwrap();
        let sys = SystemDef::FullVonHardenberg(params);
        let wn_ratio = 1.672;
        let mut verdicts = Vec::new();
        for t in [250usize, 500] {
            let grid = build_grid(150.0, t).unwrap();
            let lap = radial_laplacian(&grid);
            let mut u = vec![0.0; 2 * t];
            for i in 0..t {
                let bump = 0.25 * j0(onset.k1 * grid.r[i]) * (-0.1 * grid.r[i]).exp();
                u[i] = veg.n_star + bump;
                u[t + i] = veg.w_star + wn_ratio * bump;
            }
            let prof = newton_solve(&sys, &u, p, &grid, &lap, &NewtonOpts::default()).unwrap();
            assert!(prof.converged && prof.amplitude() > 0.01);
            let rep = radial_stability(&sys, &prof, &grid, &EigenOpts::default()).unwrap();
            verdicts.push(rep.classification);
        }
        assert_eq!(verdicts[0], verdicts[1]);
    }

    #[test]
    fn rejects_unconverged_profiles() {
        let grid = build_grid(10.0, 16).unwrap();
        let sys = SystemDef::ReducedNW { a: 0.07, b: 3.072 };
        let prof = Profile::from_state(&vec![0.0; 32], 0.1);
        assert!(radial_stability(&sys, &prof, &grid, &EigenOpts::default()).is_err());
    }
}
