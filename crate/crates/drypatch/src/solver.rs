//! Discretised residual, analytic Jacobian and a damped Newton solver for
//! stationary radial profiles of the full model and its reduced variant.
//!
//! A state vector stacks the two components as `U = (n_1..n_T, w_1..w_T)`.
//! The linear solves interleave the components internally so the Jacobian
//! factors as a banded matrix with bandwidths `(3, 2)`.

use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialLaplacian};
use crate::linalg::BandedMatrix;
use crate::model::ModelParams;
use serde::{Deserialize, Serialize};

/// Which stationary system is being solved.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemDef {
    /// The full two-component model; active parameter: precipitation `p`.
    FullVonHardenberg(ModelParams),
    /// The reduced `(N, W)` system with coefficients `a`, `b`; active
    /// parameter: reduced pressure `P`.
    ReducedNW { a: f64, b: f64 },
}

impl SystemDef {
    pub fn name(&self) -> &'static str {
        match self {
            SystemDef::FullVonHardenberg(_) => "FullVonHardenberg",
            SystemDef::ReducedNW { .. } => "ReducedNW",
        }
    }

    /// Constant 2x2 diffusion block pre-multiplying the Laplacian.
    pub fn diffusion_block(&self) -> [[f64; 2]; 2] {
        match self {
            SystemDef::FullVonHardenberg(mp) => {
                [[1.0, 0.0], [-mp.delta * mp.beta, mp.delta]]
            }
            SystemDef::ReducedNW { .. } => [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    /// Pointwise reaction terms at `(n, w)` for the active parameter.
    pub fn reaction(&self, n: f64, w: f64, param: f64) -> (f64, f64) {
        match self {
            SystemDef::FullVonHardenberg(mp) => {
                let f1 = (mp.gamma * w / (1.0 + mp.sigma * w) - n - mp.nu_mort) * n;
                let f2 = -(w - param) + (mp.rho - w) * w * n;
                (f1, f2)
            }
            SystemDef::ReducedNW { a, b } => {
                let quad = param * n + (b * w - n) * n;
                (quad, quad - w + a * n)
            }
        }
    }

    /// Pointwise reaction Jacobian `[[df1/dn, df1/dw], [df2/dn, df2/dw]]`.
    pub fn reaction_jacobian(&self, n: f64, w: f64, param: f64) -> [[f64; 2]; 2] {
        match self {
            SystemDef::FullVonHardenberg(mp) => {
                let s = 1.0 + mp.sigma * w;
                [
                    [
                        mp.gamma * w / s - 2.0 * n - mp.nu_mort,
                        mp.gamma * n / (s * s),
                    ],
                    [(mp.rho - w) * w, (mp.rho - 2.0 * w) * n - 1.0],
                ]
            }
            SystemDef::ReducedNW { a, b } => {
                let dq_dn = param + b * w - 2.0 * n;
                let dq_dw = b * n;
                [[dq_dn, dq_dw], [a + dq_dn, dq_dw - 1.0]]
            }
        }
    }

    /// Derivative of the residual with respect to the active parameter.
    pub fn dresidual_dparam(&self, n: f64, _w: f64) -> (f64, f64) {
        match self {
            SystemDef::FullVonHardenberg(_) => (0.0, 1.0),
            SystemDef::ReducedNW { .. } => (n, n),
        }
    }
}

/// A discretised radial solution with bookkeeping from the solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Profile {
    /// Active parameter value (`p` or `P`).
    pub param: f64,
    pub n: Vec<f64>,
    pub w: Vec<f64>,
    /// Plain Euclidean norm of the `n` samples.
    pub l2norm: f64,
    pub converged: bool,
    pub residual_norm: f64,
    pub newton_iterations: usize,
}

impl Profile {
    pub fn from_state(state: &[f64], param: f64) -> Self {
        let t = state.len() / 2;
        let n = state[..t].to_vec();
        let w = state[t..].to_vec();
        let l2norm = norm2(&n);
        Profile {
            param,
            n,
            w,
            l2norm,
            converged: false,
            residual_norm: f64::NAN,
            newton_iterations: 0,
        }
    }

    pub fn state(&self) -> Vec<f64> {
        let mut u = Vec::with_capacity(2 * self.n.len());
        u.extend_from_slice(&self.n);
        u.extend_from_slice(&self.w);
        u
    }

    /// Maximum deviation of `n` from its far-field value.
    pub fn amplitude(&self) -> f64 {
        let far = *self.n.last().unwrap_or(&0.0);
        self.n
            .iter()
            .fold(0.0f64, |acc, v| acc.max((v - far).abs()))
    }

    /// Maximum deviation of `n` from its outer value over the last tenth
    /// of the domain (the flat-tail check).
    pub fn tail_deviation(&self) -> f64 {
        let t = self.n.len();
        let far = self.n[t - 1];
        self.n[(9 * t) / 10..]
            .iter()
            .fold(0.0f64, |acc, v| acc.max((v - far).abs()))
    }

    /// True when every sample of both densities is nonnegative.
    pub fn physical(&self) -> bool {
        self.n.iter().all(|&v| v >= -1e-12) && self.w.iter().all(|&v| v >= -1e-12)
    }

    /// Wavenumber of the oscillatory tail, from the spacing of successive
    /// zeros of `n(r) - n(infinity)` inside the clean exponential band
    /// (zeros near the core or below the noise floor are excluded).
    /// `None` when fewer than four usable zeros exist.
    pub fn tail_wavenumber(&self, r: &[f64]) -> Option<f64> {
        let far = *self.n.last()?;
        let d: Vec<f64> = self.n.iter().map(|v| v - far).collect();
        let core = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut zeros = Vec::new();
        for i in 1..d.len() {
            if d[i - 1] * d[i] < 0.0 {
                let env = d[i - 1].abs().max(d[i].abs());
                if env > 1e-9 * core && env < 0.5 * core {
                    let frac = d[i - 1].abs() / (d[i - 1].abs() + d[i].abs());
                    zeros.push(r[i - 1] + frac * (r[i] - r[i - 1]));
                }
            }
        }
        if zeros.len() < 4 {
            return None;
        }
        let mut spacings: Vec<f64> = zeros.windows(2).map(|w| w[1] - w[0]).collect();
        spacings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = spacings[spacings.len() / 2];
        Some(core::f64::consts::PI / median)
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Evaluates the discretised residual `F(U; param)`.
pub fn residual(
    sys: &SystemDef,
    state: &[f64],
    param: f64,
    lap: &RadialLaplacian,
) -> Result<Vec<f64>> {
    let t = lap.len();
    if state.len() != 2 * t {
        return Err(Error::DimensionMismatch {
            expected: 2 * t,
            got: state.len(),
        });
    }
    let (n, w) = state.split_at(t);
    let mut lap_n = vec![0.0; t];
    let mut lap_w = vec![0.0; t];
    lap.apply(n, &mut lap_n);
    lap.apply(w, &mut lap_w);
    let d = sys.diffusion_block();
    let mut out = vec![0.0; 2 * t];
    for i in 0..t {
        let (f1, f2) = sys.reaction(n[i], w[i], param);
        out[i] = d[0][0] * lap_n[i] + d[0][1] * lap_w[i] + f1;
        out[t + i] = d[1][0] * lap_n[i] + d[1][1] * lap_w[i] + f2;
    }
    Ok(out)
}

/// The assembled Jacobian: diffusion blocks acting through the Laplacian
/// plus the four diagonal reaction blocks.
#[derive(Debug, Clone)]
pub struct Jacobian {
    pub t: usize,
    pub diffusion: [[f64; 2]; 2],
    pub lap: RadialLaplacian,
    /// Diagonal reaction derivatives `[df1/dn, df1/dw, df2/dn, df2/dw]`.
    pub react: [Vec<f64>; 4],
}

/// Assembles the analytic Jacobian at a state.
pub fn jacobian(
    sys: &SystemDef,
    state: &[f64],
    param: f64,
    lap: &RadialLaplacian,
) -> Result<Jacobian> {
    let t = lap.len();
    if state.len() != 2 * t {
        return Err(Error::DimensionMismatch {
            expected: 2 * t,
            got: state.len(),
        });
    }
    let (n, w) = state.split_at(t);
    let mut react = [vec![0.0; t], vec![0.0; t], vec![0.0; t], vec![0.0; t]];
    for i in 0..t {
        let j = sys.reaction_jacobian(n[i], w[i], param);
        react[0][i] = j[0][0];
        react[1][i] = j[0][1];
        react[2][i] = j[1][0];
        react[3][i] = j[1][1];
    }
    Ok(Jacobian {
        t,
        diffusion: sys.diffusion_block(),
        lap: lap.clone(),
        react,
    })
}

impl Jacobian {
    /// Matrix-vector product in the stacked `(n, w)` layout.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let t = self.t;
        let (xn, xw) = x.split_at(t);
        let mut ln = vec![0.0; t];
        let mut lw = vec![0.0; t];
        self.lap.apply(xn, &mut ln);
        self.lap.apply(xw, &mut lw);
        let d = self.diffusion;
        for i in 0..t {
            out[i] = d[0][0] * ln[i]
                + d[0][1] * lw[i]
                + self.react[0][i] * xn[i]
                + self.react[1][i] * xw[i];
            out[t + i] = d[1][0] * ln[i]
                + d[1][1] * lw[i]
                + self.react[2][i] * xn[i]
                + self.react[3][i] * xw[i];
        }
    }

    /// Banded form in the interleaved ordering `(n_1, w_1, n_2, w_2, ...)`
    /// with bandwidths `kl = 3`, `ku = 2`.
    pub fn to_banded(&self) -> BandedMatrix {
        let t = self.t;
        let mut band = BandedMatrix::zeros(2 * t, 3, 2);
        let d = self.diffusion;
        for i in 0..t {
            let rn = 2 * i;
            let rw = 2 * i + 1;
            let mut stencil = |node: usize, coeff: f64| {
                let cn = 2 * node;
                let cw = 2 * node + 1;
                if d[0][0] != 0.0 {
                    band.add(rn, cn, d[0][0] * coeff);
                }
                if d[0][1] != 0.0 {
                    band.add(rn, cw, d[0][1] * coeff);
                }
                if d[1][0] != 0.0 {
                    band.add(rw, cn, d[1][0] * coeff);
                }
                if d[1][1] != 0.0 {
                    band.add(rw, cw, d[1][1] * coeff);
                }
            };
            stencil(i, self.lap.diag[i]);
            if i > 0 {
                stencil(i - 1, self.lap.sub[i - 1]);
            }
            if i + 1 < t {
                stencil(i + 1, self.lap.sup[i]);
            }
            band.add(rn, 2 * i, self.react[0][i]);
            band.add(rn, 2 * i + 1, self.react[1][i]);
            band.add(rw, 2 * i, self.react[2][i]);
            band.add(rw, 2 * i + 1, self.react[3][i]);
        }
        band
    }

    /// Dense form in the stacked `(n, w)` layout, for spectral work.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let t = self.t;
        let mut m = nalgebra::DMatrix::zeros(2 * t, 2 * t);
        let d = self.diffusion;
        for i in 0..t {
            let mut put = |j: usize, coeff: f64| {
                m[(i, j)] += d[0][0] * coeff;
                m[(i, t + j)] += d[0][1] * coeff;
                m[(t + i, j)] += d[1][0] * coeff;
                m[(t + i, t + j)] += d[1][1] * coeff;
            };
            put(i, self.lap.diag[i]);
            if i > 0 {
                put(i - 1, self.lap.sub[i - 1]);
            }
            if i + 1 < t {
                put(i + 1, self.lap.sup[i]);
            }
            m[(i, i)] += self.react[0][i];
            m[(i, t + i)] += self.react[1][i];
            m[(t + i, i)] += self.react[2][i];
            m[(t + i, t + i)] += self.react[3][i];
        }
        m
    }
}

/// Interleaves a stacked vector `(n, w)` into `(n_1, w_1, ...)`.
pub fn interleave(u: &[f64]) -> Vec<f64> {
    let t = u.len() / 2;
    let mut out = vec![0.0; 2 * t];
    for i in 0..t {
        out[2 * i] = u[i];
        out[2 * i + 1] = u[t + i];
    }
    out
}

/// Inverse of [`interleave`].
pub fn deinterleave(u: &[f64]) -> Vec<f64> {
    let t = u.len() / 2;
    let mut out = vec![0.0; 2 * t];
    for i in 0..t {
        out[i] = u[2 * i];
        out[t + i] = u[2 * i + 1];
    }
    out
}

/// Options for the damped Newton iteration.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOpts {
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest damping factor tried before a step is taken anyway.
    pub min_damping: f64,
}

impl Default for NewtonOpts {
    fn default() -> Self {
        NewtonOpts {
            tol: 1e-10,
            max_iter: 50,
            min_damping: 1e-4,
        }
    }
}

/// Damped Newton with backtracking on the residual norm and banded LU
/// solves. Returns the last iterate with its `converged` flag; a singular
/// Jacobian surfaces as `LinearSolveFailure`.
pub fn newton_solve(
    sys: &SystemDef,
    state0: &[f64],
    param: f64,
    _grid: &RadialGrid,
    lap: &RadialLaplacian,
    opts: &NewtonOpts,
) -> Result<Profile> {
    if !state0.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParams("non-finite initial state".into()));
    }
    let mut u = state0.to_vec();
    let mut res = residual(sys, &u, param, lap)?;
    let mut rnorm = norm2(&res);
    let mut iters = 0;
    let mut converged = rnorm < opts.tol;
    while !converged && iters < opts.max_iter {
        let jac = jacobian(sys, &u, param, lap)?;
        let lu = jac.to_banded().factor()?;
        let mut step = interleave(&res);
        lu.solve_in_place(&mut step);
        let step = deinterleave(&step);
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = u
                .iter()
                .zip(&step)
                .map(|(ui, si)| ui - lambda * si)
                .collect();
            let tres = residual(sys, &trial, param, lap)?;
            let tnorm = norm2(&tres);
            if tnorm <= (1.0 - 1e-4 * lambda) * rnorm || lambda <= opts.min_damping {
                u = trial;
                res = tres;
                rnorm = tnorm;
                break;
            }
            lambda *= 0.5;
        }
        iters += 1;
        converged = rnorm < opts.tol;
        if !rnorm.is_finite() {
            break;
        }
    }
    let mut profile = Profile::from_state(&u, param);
    profile.converged = converged && rnorm.is_finite();
    profile.residual_norm = rnorm;
    profile.newton_iterations = iters;
    Ok(profile)
}
