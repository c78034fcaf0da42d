//! The dryland vegetation model and its weakly nonlinear reduction:
//! parameters, uniform states, spatial eigenvalue structure, normal-form
//! coefficients and the Turing onset of the full system.
//!
//! Everything here is a pure function of its inputs; values are immutable
//! once constructed.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The seven dimensionless model parameters plus precipitation.
///
/// `nu_mort` is the plant mortality rate (the model's own `nu`); it is
/// renamed to avoid a clash with the core quadratic coefficient
/// [`NormalFormCoeffs::nu_core`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Growth-rate constant.
    pub gamma: f64,
    /// Growth-saturation constant.
    pub sigma: f64,
    /// Plant mortality rate.
    pub nu_mort: f64,
    /// Root-suction coefficient.
    pub beta: f64,
    /// Relative water diffusivity (taken large).
    pub delta: f64,
    /// Shading / evaporation-reduction parameter.
    pub rho: f64,
    /// Precipitation.
    pub p: f64,
}

impl Default for ModelParams {
    /// The standard parameter set `gamma = sigma = 1.6`, `nu = 0.2`,
    /// `beta = 3`, `delta = 30`, `rho = 1.5`.
    fn default() -> Self {
        ModelParams {
            gamma: 1.6,
            sigma: 1.6,
            nu_mort: 0.2,
            beta: 3.0,
            delta: 30.0,
            rho: 1.5,
            p: 0.2,
        }
    }
}

impl ModelParams {
    /// Checks positivity and the `gamma > nu * sigma` requirement.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma", self.gamma),
            ("sigma", self.sigma),
            ("nu_mort", self.nu_mort),
            ("beta", self.beta),
            ("delta", self.delta),
            ("rho", self.rho),
        ];
        for (name, v) in fields {
            if !(v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} = {v} must be > 0")));
            }
        }
        if !(self.p >= 0.0) {
            return Err(Error::InvalidParams(format!("p = {} must be >= 0", self.p)));
        }
        if self.gamma <= self.nu_mort * self.sigma {
            return Err(Error::InvalidParams(format!(
                "gamma = {} <= nu*sigma = {}; no positive critical precipitation",
                self.gamma,
                self.nu_mort * self.sigma
            )));
        }
        Ok(())
    }

    /// Upper bound on `rho` for the weakly nonlinear reduction,
    /// `(1 + sigma p_c)^2 / (gamma p_c) + p_c` (about 6.41 at defaults).
    pub fn rho_reduction_bound(&self) -> Result<f64> {
        let p_c = critical_precipitation(self)?;
        Ok((1.0 + self.sigma * p_c).powi(2) / (self.gamma * p_c) + p_c)
    }

    /// True when the reduced analysis applies (`a b < 1`).
    pub fn within_reduction_bound(&self) -> bool {
        match self.rho_reduction_bound() {
            Ok(bound) => self.rho < bound,
            Err(_) => false,
        }
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }
}

/// Which uniform equilibrium a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UniformKind {
    Bare,
    Vegetated,
}

/// A spatially uniform equilibrium `(n*, w*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformState {
    pub kind: UniformKind,
    pub n_star: f64,
    pub w_star: f64,
    /// `n* <= 1/rho` and both densities nonnegative.
    pub physical: bool,
}

/// Critical precipitation `p_c = nu / (gamma - nu sigma)` where the bare
/// state loses stability.
pub fn critical_precipitation(params: &ModelParams) -> Result<f64> {
    let denom = params.gamma - params.nu_mort * params.sigma;
    if denom <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "gamma = {} <= nu*sigma = {}",
            params.gamma,
            params.nu_mort * params.sigma
        )));
    }
    Ok(params.nu_mort / denom)
}

/// Coefficients `c3 w^3 + c2 w^2 + c1 w + c0` of the vegetated-state cubic.
fn vegetated_cubic(params: &ModelParams) -> [f64; 4] {
    let g = params.gamma - params.sigma * params.nu_mort;
    [
        -g,
        params.rho * g + params.nu_mort - params.sigma,
        params.p * params.sigma - 1.0 - params.rho * params.nu_mort,
        params.p,
    ]
}

/// All uniform equilibria at the given parameters: the bare state `(0, p)`
/// plus one vegetated state per positive real root `w*` of the cubic with
/// `n* = gamma w*/(1 + sigma w*) - nu >= 0`, sorted by `w*`.
pub fn uniform_states(params: &ModelParams) -> Vec<UniformState> {
    let mut out = vec![UniformState {
        kind: UniformKind::Bare,
        n_star: 0.0,
        w_star: params.p,
        physical: true,
    }];
    let [c3, c2, c1, c0] = vegetated_cubic(params);
    let mut roots: Vec<f64> = cubic_real_roots(c3, c2, c1, c0)
        .into_iter()
        .filter(|&w| w > 0.0)
        .collect();
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for w in roots {
        let n = params.gamma * w / (1.0 + params.sigma * w) - params.nu_mort;
        if n >= -1e-12 {
            let n = n.max(0.0);
            out.push(UniformState {
                kind: UniformKind::Vegetated,
                n_star: n,
                w_star: w,
                physical: n <= 1.0 / params.rho && w >= 0.0,
            });
        }
    }
    out
}

/// The vegetated state with the largest density, if any.
pub fn vegetated_state(params: &ModelParams) -> Option<UniformState> {
    uniform_states(params)
        .into_iter()
        .filter(|s| s.kind == UniformKind::Vegetated)
        .max_by(|x, y| x.n_star.partial_cmp(&y.n_star).unwrap())
}

/// Real roots of a (possibly degenerate) cubic, found from the companion
/// matrix of the monic polynomial and polished with a Newton step.
pub fn cubic_real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let roots = if c3.abs() < 1e-300 {
        companion_roots(&[c2, c1, c0])
    } else {
        companion_roots(&[c3, c2, c1, c0])
    };
    let poly = |w: f64| ((c3 * w + c2) * w + c1) * w + c0;
    let dpoly = |w: f64| (3.0 * c3 * w + 2.0 * c2) * w + c1;
    let scale = c3.abs().max(c2.abs()).max(c1.abs()).max(c0.abs()).max(1.0);
    roots
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-8 * z.re.abs().max(1.0))
        .map(|z| {
            let mut w = z.re;
            for _ in 0..4 {
                let d = dpoly(w);
                if d.abs() > 1e-300 {
                    w -= poly(w) / d;
                }
            }
            w
        })
        .filter(|w| poly(*w).abs() <= 1e-10 * scale)
        .collect()
}

/// Roots of `a_0 x^n + ... + a_n` from the eigenvalues of the companion
/// matrix; `coeffs` are in descending powers with `coeffs[0] != 0`.
pub fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[n - i] / lead;
    }
    crate::linalg::dense_eigenvalues(&m).expect("companion QR iteration converges")
}

/// Turing-point data of the reduced system, present when `K < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuringData {
    /// Critical wavenumber `k = sqrt((1 + sqrt(1 - K)) / (-K))`.
    pub k: f64,
    /// Far-field nonlinearity parameter `omega = (k^2 + 1) / k^2`.
    pub omega: f64,
    /// Reduced Turing point `P0 = (2 - K + 2 sqrt(1 - K)) / K^2 = k^4`.
    pub p0: f64,
}

/// Derived constants of the reduced two-component system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    pub p_c: f64,
    /// `a0 = (rho - p_c) p_c`.
    pub a0: f64,
    /// `b0 = gamma / (1 + sigma p_c)^2`.
    pub b0: f64,
    /// `a = a0 / beta`.
    pub a: f64,
    /// `b = b0 beta`.
    pub b: f64,
    /// Dispersion constant `K = (1 - b) / (1 - a b)`.
    pub big_k: f64,
    /// Turing fields, present only when `K < 0`.
    pub turing: Option<TuringData>,
}

/// Turing data from the dispersion constant alone; `None` when `K >= 0`.
pub fn dispersion_turing(big_k: f64) -> Option<TuringData> {
    if big_k >= 0.0 {
        return None;
    }
    let s = (1.0 - big_k).sqrt();
    let k = ((1.0 + s) / (-big_k)).sqrt();
    let p0 = (2.0 - big_k + 2.0 * s) / (big_k * big_k);
    let omega = (k * k + 1.0) / (k * k);
    Some(TuringData { k, omega, p0 })
}

/// Computes the reduced constants; errors with `OutOfValidity` when `rho`
/// exceeds the reduction bound (`a b >= 1`).
pub fn reduced_params(params: &ModelParams) -> Result<ReducedParams> {
    params.validate()?;
    let p_c = critical_precipitation(params)?;
    let bound = params.rho_reduction_bound()?;
    if params.rho >= bound {
        return Err(Error::OutOfValidity(format!(
            "rho = {} >= reduction bound {bound:.6}",
            params.rho
        )));
    }
    let a0 = (params.rho - p_c) * p_c;
    let b0 = params.gamma / (1.0 + params.sigma * p_c).powi(2);
    let a = a0 / params.beta;
    let b = b0 * params.beta;
    let big_k = (1.0 - b) / (1.0 - a * b);
    Ok(ReducedParams {
        p_c,
        a0,
        b0,
        a,
        b,
        big_k,
        turing: dispersion_turing(big_k),
    })
}

impl ReducedParams {
    /// Maps a reduced pressure `P` to the physical precipitation
    /// `p = p_c + P / (b0 delta)`.
    pub fn physical_p(&self, p_reduced: f64, delta: f64) -> f64 {
        self.p_c + p_reduced / (self.b0 * delta)
    }

    /// Inverse of [`ReducedParams::physical_p`].
    pub fn reduced_pressure(&self, p: f64, delta: f64) -> f64 {
        (p - self.p_c) * self.b0 * delta
    }

    /// Leading-order estimate of the full-model Turing onset
    /// `(p1, k1) = (p_c + P0/(b0 delta), k delta^{-1/2})`.
    pub fn onset_estimate(&self, delta: f64) -> Option<(f64, f64)> {
        self.turing
            .map(|t| (self.physical_p(t.p0, delta), t.k / delta.sqrt()))
    }
}

/// Spatial eigenvalues about the bare state of the reduced system:
/// roots of `(lambda^2 + P)(lambda^2 - 1)`, i.e. `{1, -1, ±sqrt(-P)}`
/// with the principal branch.
pub fn spatial_eigenvalues_bare(p_reduced: f64) -> [Complex64; 4] {
    let s = Complex64::new(-p_reduced, 0.0).sqrt();
    [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), s, -s]
}

/// Spatial eigenvalues about the vegetated state: roots of
/// `lambda^4 - (1 + K P) lambda^2 + P`, solved as a quadratic in
/// `lambda^2`.
pub fn spatial_eigenvalues_vegetated(rp: &ReducedParams, p_reduced: f64) -> [Complex64; 4] {
    let bq = Complex64::new(1.0 + rp.big_k * p_reduced, 0.0);
    let disc = (bq * bq - 4.0 * p_reduced).sqrt();
    let mu_plus = 0.5 * (bq + disc);
    let mu_minus = 0.5 * (bq - disc);
    let lp = mu_plus.sqrt();
    let lm = mu_minus.sqrt();
    [lp, -lp, lm, -lm]
}

/// Which bifurcation a set of normal-form coefficients belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormCase {
    Homogeneous,
    Turing,
}

/// Leading coefficients of the radial normal form at a bifurcation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFormCoeffs {
    pub case: NormalFormCase,
    /// Linear coefficient.
    pub c0: f64,
    /// Quadratic coefficient (homogeneous case).
    pub c2: Option<f64>,
    /// Cubic coefficient (Turing case).
    pub c3: Option<f64>,
    /// Core quadratic coefficient `omega sqrt(pi/6)` (Turing case).
    pub nu_core: Option<f64>,
}

/// Homogeneous-case coefficients `c0 = (1 + a)/(1 + a^2)`, `c2 = 1 - a b`.
pub fn normal_form_homogeneous(rp: &ReducedParams) -> NormalFormCoeffs {
    NormalFormCoeffs {
        case: NormalFormCase::Homogeneous,
        c0: (1.0 + rp.a) / (1.0 + rp.a * rp.a),
        c2: Some(1.0 - rp.a * rp.b),
        c3: None,
        nu_core: None,
    }
}

/// Threshold `omega* = 30/23` above which the cubic coefficient turns
/// negative and rings / spot B emerge.
pub const OMEGA_STAR: f64 = 30.0 / 23.0;

/// Turing-case coefficients `c0 = omega/4`,
/// `c3 = -omega (23 omega - 30) / 36`, `nu_core = omega sqrt(pi/6)`.
pub fn normal_form_turing(rp: &ReducedParams) -> Result<NormalFormCoeffs> {
    let t = rp.turing.ok_or(Error::NoTuringPoint)?;
    Ok(normal_form_turing_omega(t.omega))
}

/// Same as [`normal_form_turing`] but parametrised directly by `omega`.
pub fn normal_form_turing_omega(omega: f64) -> NormalFormCoeffs {
    NormalFormCoeffs {
        case: NormalFormCase::Turing,
        c0: omega / 4.0,
        c3: Some(-omega * (23.0 * omega - 30.0) / 36.0),
        c2: None,
        nu_core: Some(omega * (core::f64::consts::PI / 6.0).sqrt()),
    }
}

/// Reaction Jacobian of the full model at a state `(n, w)`:
/// `[[gamma w/(1+sigma w) - 2n - nu, gamma n/(1+sigma w)^2],
///   [(rho - w) w,                    (rho - 2w) n - 1]]`.
pub fn reaction_jacobian(params: &ModelParams, n: f64, w: f64) -> [[f64; 2]; 2] {
    let s = 1.0 + params.sigma * w;
    [
        [
            params.gamma * w / s - 2.0 * n - params.nu_mort,
            params.gamma * n / (s * s),
        ],
        [(params.rho - w) * w, (params.rho - 2.0 * w) * n - 1.0],
    ]
}

/// Largest real part of the temporal growth rates of wavenumber `q`
/// perturbations about `(n, w)`: eigenvalues of
/// `J_reaction - q^2 [[1, 0], [-delta beta, delta]]`.
pub fn temporal_growth(params: &ModelParams, n: f64, w: f64, q: f64) -> f64 {
    let j = reaction_jacobian(params, n, w);
    let q2 = q * q;
    let m = [
        [j[0][0] - q2, j[0][1]],
        [j[1][0] + q2 * params.delta * params.beta, j[1][1] - q2 * params.delta],
    ];
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        0.5 * (tr + disc.sqrt())
    } else {
        0.5 * tr
    }
}

/// The minimal Turing onset of the full model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuringOnset {
    /// Smallest precipitation where the vegetated state goes marginally
    /// unstable to a finite wavenumber.
    pub p1: f64,
    /// The marginal wavenumber there.
    pub k1: f64,
    /// Leading-order estimates from the reduction, if available.
    pub p1_reduced: Option<f64>,
    pub k1_reduced: Option<f64>,
}

impl TuringOnset {
    /// Whether the computed onset agrees with the reduced prediction to
    /// the given relative tolerance (None when no prediction exists).
    pub fn matches_reduction(&self, rtol: f64) -> Option<bool> {
        match (self.p1_reduced, self.k1_reduced) {
            (Some(p1r), Some(k1r)) => {
                let dp = ((self.p1 - p1r) / p1r).abs();
                let dk = ((self.k1 - k1r) / k1r).abs();
                Some(dp <= rtol && dk <= rtol)
            }
            _ => None,
        }
    }
}

/// Maximum over a wavenumber window of the temporal growth rate of the
/// largest vegetated state at precipitation `p`; `None` when no vegetated
/// state exists there.
fn max_growth_over_q(params: &ModelParams, p: f64, q_max: f64) -> Option<(f64, f64)> {
    let pp = params.with_p(p);
    let veg = vegetated_state(&pp)?;
    let (n, w) = (veg.n_star, veg.w_star);
    let m = 240;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 1..=m {
        let q = q_max * i as f64 / m as f64;
        let g = temporal_growth(&pp, n, w, q);
        if g > best.0 {
            best = (g, q);
        }
    }
    // golden-section refinement of the interior maximum
    let (mut lo, mut hi) = (
        (best.1 - q_max / m as f64).max(q_max / m as f64 * 0.01),
        best.1 + q_max / m as f64,
    );
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = temporal_growth(&pp, n, w, x1);
    let mut f2 = temporal_growth(&pp, n, w, x2);
    while hi - lo > 1e-9 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = temporal_growth(&pp, n, w, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = temporal_growth(&pp, n, w, x1);
        }
    }
    let q = 0.5 * (lo + hi);
    Some((temporal_growth(&pp, n, w, q), q))
}

/// Locates the minimal Turing onset `(p1, k1)` of the full model by
/// scanning the dispersion relation of the vegetated state over a
/// precipitation bracket above `p_c` and bisecting the first sign change
/// of the maximal growth rate; `p1` to 1e-8, `k1` to 1e-6.
pub fn turing_onset_full(params: &ModelParams) -> Result<TuringOnset> {
    params.validate()?;
    let p_c = critical_precipitation(params)?;
    let rp = reduced_params(params).ok();
    // bracket in reduced-pressure units so the scan adapts to delta
    let (b0, k_red) = match &rp {
        Some(r) => (r.b0, r.turing.map(|t| t.k).unwrap_or(1.0)),
        None => (1.0, 1.0),
    };
    let q_max = 2.5 * k_red / params.delta.sqrt();
    let p_of = |pr: f64| p_c + pr / (b0 * params.delta);
    let (pr_lo, pr_hi) = (0.02, 4.0);
    let n_scan = 200;
    let mut prev: Option<(f64, f64)> = None; // (p, gmax)
    let mut bracket = None;
    let mut any_state = false;
    for i in 0..=n_scan {
        let pr = pr_lo + (pr_hi - pr_lo) * i as f64 / n_scan as f64;
        let p = p_of(pr);
        let Some((g, _)) = max_growth_over_q(params, p, q_max) else {
            prev = None;
            continue;
        };
        any_state = true;
        if let Some((p_prev, g_prev)) = prev {
            if g_prev < 0.0 && g >= 0.0 {
                bracket = Some((p_prev, p));
                break;
            }
        }
        prev = Some((p, g));
    }
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => {
            return Err(if any_state {
                Error::NoOnsetFound(p_of(pr_lo), p_of(pr_hi))
            } else {
                Error::NoOnsetFound(p_of(pr_lo), p_of(pr_hi))
            });
        }
    };
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        match max_growth_over_q(params, mid, q_max) {
            Some((g, _)) if g >= 0.0 => hi = mid,
            Some(_) => lo = mid,
            None => lo = mid,
        }
    }
    let p1 = 0.5 * (lo + hi);
    let (_, k1) = max_growth_over_q(params, p1, q_max)
        .ok_or(Error::NoOnsetFound(lo, hi))?;
    let (p1_red, k1_red) = match &rp {
        Some(r) => match r.onset_estimate(params.delta) {
            Some((p, k)) => (Some(p), Some(k)),
            None => (None, None),
        },
        None => (None, None),
    };
    Ok(TuringOnset {
        p1,
        k1,
        p1_reduced: p1_red,
        k1_reduced: k1_red,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn critical_precipitation_examples() {
        // 0.2 / (1.6 - 0.32) = 0.15625 by exact rational evaluation
        assert!((critical_precipitation(&defaults()).unwrap() - 0.15625).abs() < 1e-15);
        // sigma = 0: the denominator reduces to gamma
        let p = ModelParams {
            gamma: 1.0,
            sigma: 0.0,
            nu_mort: 0.5,
            ..defaults()
        };
        assert_eq!(critical_precipitation(&p).unwrap(), 0.5);
        let bad = ModelParams {
            gamma: 0.32,
            ..defaults()
        };
        assert!(matches!(
            critical_precipitation(&bad),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn bare_state_is_exact() {
        for p in [0.0, 0.01, 0.15625, 0.4] {
            let states = uniform_states(&defaults().with_p(p));
            let bare = &states[0];
            assert_eq!(bare.kind, UniformKind::Bare);
            assert_eq!(bare.n_star, 0.0);
            assert_eq!(bare.w_star, p);
        }
    }

    fn cubic_residual(params: &ModelParams, w: f64) -> f64 {
        let [c3, c2, c1, c0] = vegetated_cubic(params);
        ((c3 * w + c2) * w + c1) * w + c0
    }

    #[test]
    fn uniform_state_residuals_below_1e12() {
        for rho in [1.5, 2.0, 2.5, 2.7] {
            for p in [0.1, 0.15625, 0.2, 0.3] {
                let params = defaults().with_rho(rho).with_p(p);
                for s in uniform_states(&params) {
                    if s.kind == UniformKind::Vegetated {
                        assert!(
                            cubic_residual(&params, s.w_star).abs() < 1e-12,
                            "rho={rho} p={p} w={}",
                            s.w_star
                        );
                        let n_from_w =
                            params.gamma * s.w_star / (1.0 + params.sigma * s.w_star)
                                - params.nu_mort;
                        assert!((s.n_star - n_from_w.max(0.0)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn vegetated_root_meets_bare_at_pc() {
        let params = defaults().with_p(0.15625);
        let veg: Vec<_> = uniform_states(&params)
            .into_iter()
            .filter(|s| s.kind == UniformKind::Vegetated)
            .collect();
        // the branch point: n* = 0, w* = p_c
        assert!(veg
            .iter()
            .any(|s| s.n_star.abs() < 1e-9 && (s.w_star - 0.15625).abs() < 1e-9));
    }

    /// Dense sampling + bisection oracle for positive cubic roots.
    fn bisection_roots(params: &ModelParams) -> Vec<f64> {
        let f = |w: f64| cubic_residual(params, w);
        let mut roots = Vec::new();
        let n = 20_000;
        let w_max = 10.0;
        let mut prev = f(1e-12);
        for i in 1..=n {
            let w = w_max * i as f64 / n as f64;
            let cur = f(w);
            if prev == 0.0 {
                roots.push(w_max * (i - 1) as f64 / n as f64);
            } else if prev * cur < 0.0 {
                let (mut lo, mut hi) = (w_max * (i - 1) as f64 / n as f64, w);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if f(lo) * f(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
        roots
    }

    #[test]
    fn vegetated_roots_match_bisection_oracle() {
        let params = defaults().with_p(0.3);
        let states = uniform_states(&params);
        let veg: Vec<_> = states
            .iter()
            .filter(|s| s.kind == UniformKind::Vegetated && s.physical)
            .collect();
        assert_eq!(veg.len(), 1, "one physical vegetated root at rho=1.5, p=0.3");
        let oracle = bisection_roots(&params);
        assert!(oracle
            .iter()
            .any(|w| (w - veg[0].w_star).abs() < 1e-8));
    }

    #[test]
    fn reduced_constants_at_defaults() {
        let rp = reduced_params(&defaults()).unwrap();
        assert!((rp.b - 3.072).abs() < 1e-12);
        assert!((rp.a * rp.b - 0.215).abs() < 1e-12);
        // high-precision oracle values
        assert!((rp.big_k - -2.6394904458598726).abs() < 1e-12);
        let t = rp.turing.unwrap();
        assert!((t.k - 1.0495861737537988).abs() < 1e-12);
        assert!((t.p0 - 1.2135911601023981).abs() < 1e-12);
        assert!((t.omega - 1.9077448586904572).abs() < 1e-12);
    }

    #[test]
    fn reduced_identities_all_rho_cases() {
        for rho in [1.5, 2.0, 2.5, 2.7] {
            let rp = reduced_params(&defaults().with_rho(rho)).unwrap();
            let t = rp.turing.expect("K < 0 for all four cases");
            let omega_alt = (1.0 - rp.big_k).sqrt();
            assert!(
                ((t.omega - omega_alt) / omega_alt).abs() < 1e-12,
                "omega identity at rho={rho}"
            );
            assert!(
                ((t.p0 - t.k.powi(4)) / t.p0).abs() < 1e-12,
                "P0 = k^4 at rho={rho}"
            );
            assert!(rp.a * rp.b < 1.0);
        }
    }

    #[test]
    fn reduced_rejects_rho_beyond_bound() {
        let params = defaults().with_rho(6.5);
        assert!(matches!(reduced_params(&params), Err(Error::OutOfValidity(_))));
        assert!((defaults().rho_reduction_bound().unwrap() - 6.40625).abs() < 1e-10);
    }

    #[test]
    fn synthetic_dispersion_k_minus_three() {
        let t = dispersion_turing(-3.0).unwrap();
        assert!((t.k - 1.0).abs() < 1e-14);
        assert!((t.omega - 2.0).abs() < 1e-14);
        assert!((t.p0 - 1.0).abs() < 1e-14);
        assert!(dispersion_turing(0.5).is_none());
    }

    fn quartic_residual(coeffs: &[f64; 5], z: Complex64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in coeffs {
            acc = acc * z + c;
        }
        acc.norm()
    }

    #[test]
    fn bare_eigenvalues_examples() {
        let ev = spatial_eigenvalues_bare(-0.25);
        let mut res: Vec<f64> = ev.iter().map(|z| z.re).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(ev.iter().all(|z| z.im == 0.0));
        for (got, want) in res.iter().zip([-1.0, -0.5, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let ev = spatial_eigenvalues_bare(0.25);
        assert!(ev.iter().any(|z| (z - Complex64::new(0.0, 0.5)).norm() < 1e-14));
        assert!(ev.iter().any(|z| (z - Complex64::new(0.0, -0.5)).norm() < 1e-14));
        let ev = spatial_eigenvalues_bare(0.0);
        assert_eq!(ev.iter().filter(|z| z.norm() == 0.0).count(), 2);
        // quartic residual check
        for p_red in [-0.25, 0.25, 0.7] {
            let coeffs = [1.0, 0.0, -(1.0 - p_red), 0.0, -p_red];
            for z in spatial_eigenvalues_bare(p_red) {
                assert!(quartic_residual(&coeffs, z) < 1e-12);
            }
        }
    }

    #[test]
    fn vegetated_eigenvalues_match_companion_oracle() {
        let rp = reduced_params(&defaults()).unwrap();
        let t = rp.turing.unwrap();
        for p_red in [0.0, 0.3, t.p0, t.p0 - 0.01, t.p0 + 0.01, 2.0] {
            let coeffs = [1.0, 0.0, -(1.0 + rp.big_k * p_red), 0.0, p_red];
            let ev = spatial_eigenvalues_vegetated(&rp, p_red);
            for z in ev {
                assert!(
                    quartic_residual(&coeffs, z) < 1e-10,
                    "residual at P={p_red}, lambda={z}"
                );
            }
            // against companion-matrix oracle: every root matched; double
            // roots (P = 0, P0) limit companion accuracy to ~sqrt(eps), so
            // the tight comparison is done at simple roots only
            let oracle = companion_roots(&coeffs);
            let tol = if p_red == 0.0 || p_red == t.p0 { 1e-7 } else { 1e-10 };
            for z in ev {
                let d = oracle.iter().map(|o| (o - z).norm()).fold(f64::MAX, f64::min);
                assert!(d < tol, "companion mismatch at P={p_red}: {z} off by {d}");
            }
        }
    }

    #[test]
    fn vegetated_eigenvalue_structure_through_the_turing_point() {
        let rp = reduced_params(&defaults()).unwrap();
        let t = rp.turing.unwrap();
        // at P0: double pairs +-ik
        let ev = spatial_eigenvalues_vegetated(&rp, t.p0);
        for z in ev {
            assert!(z.re.abs() < 1e-6);
            assert!((z.im.abs() - t.k).abs() < 1e-6);
        }
        // just below: a genuine complex quartet (sub-critical emergence)
        let ev = spatial_eigenvalues_vegetated(&rp, t.p0 - 0.01);
        for z in ev {
            assert!(z.re.abs() > 1e-4, "expected nonzero real part, got {z}");
            assert!(z.im.abs() > 0.5, "expected nonzero imaginary part, got {z}");
        }
        // just above: lambda^2 real, no quartet
        let ev = spatial_eigenvalues_vegetated(&rp, t.p0 + 0.01);
        for z in ev {
            let z2 = z * z;
            assert!(z2.im.abs() < 1e-9, "lambda^2 should be real, got {z2}");
        }
        // P = 0: {0, 0, 1, -1}
        let ev = spatial_eigenvalues_vegetated(&rp, 0.0);
        let mut mags: Vec<f64> = ev.iter().map(|z| z.norm()).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(mags[0] < 1e-12 && mags[1] < 1e-12);
        assert!((mags[2] - 1.0).abs() < 1e-12 && (mags[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_normal_form() {
        let mut rp = reduced_params(&defaults()).unwrap();
        let nf = normal_form_homogeneous(&rp);
        assert!((nf.c0 - 1.0647715394327082).abs() < 1e-12);
        assert!((nf.c2.unwrap() - 0.785).abs() < 1e-12);
        // a = 0: c0 = 1, c2 = 1
        rp.a = 0.0;
        rp.b = 0.5;
        let nf = normal_form_homogeneous(&rp);
        assert_eq!(nf.c0, 1.0);
        assert_eq!(nf.c2.unwrap(), 1.0);
        // a = 1: c0 = 1 regardless of b
        rp.a = 1.0;
        rp.b = 0.123;
        assert_eq!(normal_form_homogeneous(&rp).c0, 1.0);
    }

    #[test]
    fn turing_normal_form() {
        // omega = 30/23 is the exact zero of c3
        let nf = normal_form_turing_omega(OMEGA_STAR);
        assert_eq!(nf.c3.unwrap(), 0.0);
        // omega = 2: c0 = 1/2, c3 = -8/9, nu_core = 2 sqrt(pi/6)
        let nf = normal_form_turing_omega(2.0);
        assert!((nf.c0 - 0.5).abs() < 1e-15);
        assert!((nf.c3.unwrap() + 8.0 / 9.0).abs() < 1e-14);
        assert!((nf.nu_core.unwrap() - 2.0 * (core::f64::consts::PI / 6.0).sqrt()).abs() < 1e-14);
        // defaults rho = 1.5
        let rp = reduced_params(&defaults()).unwrap();
        let nf = normal_form_turing(&rp).unwrap();
        assert!((nf.c3.unwrap() - -0.73544262483509315).abs() < 1e-10);
        // sign change exactly at omega*
        for omega in [1.1, 1.2, OMEGA_STAR - 1e-6] {
            assert!(normal_form_turing_omega(omega).c3.unwrap() > 0.0);
        }
        for omega in [OMEGA_STAR + 1e-6, 1.5, 2.5] {
            assert!(normal_form_turing_omega(omega).c3.unwrap() < 0.0);
        }
        // no Turing point when K >= 0
        let mut rp2 = rp;
        rp2.turing = None;
        assert!(matches!(normal_form_turing(&rp2), Err(Error::NoTuringPoint)));
    }

    #[test]
    fn turing_onset_at_defaults() {
        let onset = turing_onset_full(&defaults()).unwrap();
        // oracle from an independent dispersion scan (scipy prototype):
        // p1 = 0.2124704928877, k1 = 0.2007998
        assert!((onset.p1 - 0.21247049).abs() < 1e-6, "p1 = {}", onset.p1);
        assert!((onset.k1 - 0.2008).abs() < 1e-3, "k1 = {}", onset.k1);
        assert!(onset.p1_reduced.is_some());
    }

    #[test]
    fn turing_onset_beyond_reduction_bound() {
        // rho above the validity bound: the dispersion scan may still find
        // an onset, but there is no reduced prediction to compare against
        let params = defaults().with_rho(6.5);
        match turing_onset_full(&params) {
            Ok(onset) => {
                assert!(onset.p1_reduced.is_none());
                assert!(onset.matches_reduction(0.1).is_none());
            }
            Err(Error::NoOnsetFound(_, _)) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn turing_onset_without_vegetated_state() {
        // gamma barely above nu*sigma: p_c huge, no vegetated state on the
        // scanned bracket behaves as NoOnsetFound or InvalidParams upstream
        let params = ModelParams {
            gamma: 0.33,
            sigma: 1.6,
            nu_mort: 0.2,
            rho: 0.05,
            ..defaults()
        };
        match turing_onset_full(&params) {
            Err(Error::NoOnsetFound(_, _)) | Err(Error::OutOfValidity(_)) => {}
            other => panic!("expected NoOnsetFound, got {other:?}"),
        }
    }
}
