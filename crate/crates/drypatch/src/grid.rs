//! Uniform radial grid and the second-order finite-difference radial
//! Laplacian with Neumann closures at both ends.
//!
//! The inner boundary row uses the analytic limit `2 d_rr` of the radial
//! Laplacian at the origin; the `1/r` coefficient is never evaluated at
//! `r = 0`. Both Neumann conditions are imposed by ghost-node elimination,
//! which keeps the operator tridiagonal and second order.

use crate::error::{Error, Result};

/// A uniform grid on `[0, r_star]` with `t` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub r_star: f64,
    /// Number of nodes.
    pub t: usize,
    /// Spacing `r_star / (t - 1)`.
    pub h: f64,
    /// Node positions `r_i = i h`, `r_0 = 0`.
    pub r: Vec<f64>,
}

/// Builds the uniform radial grid; `BadGrid` on nonpositive radius or
/// fewer than four nodes.
pub fn build_grid(r_star: f64, t: usize) -> Result<RadialGrid> {
    if !(r_star > 0.0) {
        return Err(Error::BadGrid(format!("r_star = {r_star} must be > 0")));
    }
    if t < 4 {
        return Err(Error::BadGrid(format!("T = {t} < 4")));
    }
    let h = r_star / (t - 1) as f64;
    let r = (0..t).map(|i| i as f64 * h).collect();
    Ok(RadialGrid { r_star, t, h, r })
}

/// Tridiagonal finite-difference approximation of
/// `d_rr + (1/r) d_r` with Neumann boundary rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialLaplacian {
    /// Subdiagonal, `sub[i]` couples row `i + 1` to node `i`.
    pub sub: Vec<f64>,
    /// Main diagonal.
    pub diag: Vec<f64>,
    /// Superdiagonal, `sup[i]` couples row `i` to node `i + 1`.
    pub sup: Vec<f64>,
}

/// Assembles the radial Laplacian on the given grid.
pub fn radial_laplacian(grid: &RadialGrid) -> RadialLaplacian {
    let t = grid.t;
    let h2 = grid.h * grid.h;
    let mut sub = vec![0.0; t - 1];
    let mut diag = vec![0.0; t];
    let mut sup = vec![0.0; t - 1];
    // r = 0: lim Delta_r u = 2 u'' with u_{-1} = u_1
    diag[0] = -4.0 / h2;
    sup[0] = 4.0 / h2;
    for i in 1..t - 1 {
        let inv_2hr = 1.0 / (2.0 * grid.h * grid.r[i]);
        sub[i - 1] = 1.0 / h2 - inv_2hr;
        diag[i] = -2.0 / h2;
        sup[i] = 1.0 / h2 + inv_2hr;
    }
    // r = r_star: ghost u_{T} = u_{T-2} kills the first-derivative term
    sub[t - 2] = 2.0 / h2;
    diag[t - 1] = -2.0 / h2;
    RadialLaplacian { sub, diag, sup }
}

impl RadialLaplacian {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Applies the operator to a nodal vector.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let t = self.diag.len();
        debug_assert_eq!(u.len(), t);
        debug_assert_eq!(out.len(), t);
        out[0] = self.diag[0] * u[0] + self.sup[0] * u[1];
        for i in 1..t - 1 {
            out[i] = self.sub[i - 1] * u[i - 1] + self.diag[i] * u[i] + self.sup[i] * u[i + 1];
        }
        out[t - 1] = self.sub[t - 2] * u[t - 2] + self.diag[t - 1] * u[t - 1];
    }

    /// Allocating variant of [`RadialLaplacian::apply`].
    pub fn apply_vec(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.apply(u, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::{j0, j1};

    #[test]
    fn grid_examples() {
        let g = build_grid(400.0, 2000).unwrap();
        assert!((g.h - 400.0 / 1999.0).abs() < 1e-15);
        assert_eq!(g.r[0], 0.0);
        let g = build_grid(1.0, 5).unwrap();
        let want = [0.0, 0.25, 0.5, 0.75, 1.0];
        for (a, b) in g.r.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(matches!(build_grid(-1.0, 10), Err(Error::BadGrid(_))));
        assert!(matches!(build_grid(1.0, 3), Err(Error::BadGrid(_))));
    }

    #[test]
    fn constant_vector_maps_to_zero() {
        let g = build_grid(10.0, 101).unwrap();
        let lap = radial_laplacian(&g);
        let ones = vec![3.5; g.t];
        for v in lap.apply_vec(&ones) {
            assert!(v.abs() < 1e-11);
        }
    }

    #[test]
    fn laplacian_of_r_squared_is_four() {
        // Delta_r r^2 = 4 at interior nodes (exact for the 3-point stencil
        // on a quadratic, up to rounding)
        let g = build_grid(5.0, 200).unwrap();
        let lap = radial_laplacian(&g);
        let u: Vec<f64> = g.r.iter().map(|r| r * r).collect();
        let out = lap.apply_vec(&u);
        for i in 1..g.t - 1 {
            assert!((out[i] - 4.0).abs() < 1e-9, "node {i}: {}", out[i]);
        }
        // row 0 approximates 2 u''(0) = 4 as well
        assert!((out[0] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn bessel_mode_is_an_approximate_eigenfunction() {
        // Delta_r J0(k r) = -k^2 J0(k r); choosing k r_star at a zero of J1
        // makes the outer Neumann row consistent as well.
        let j1_zero = 13.323691936314223; // 4th positive zero of J1
        let r_star = 10.0;
        let k = j1_zero / r_star;
        assert!(j1(j1_zero).abs() < 1e-12);
        let g = build_grid(r_star, 4001).unwrap();
        let lap = radial_laplacian(&g);
        let u: Vec<f64> = g.r.iter().map(|&r| j0(k * r)).collect();
        let out = lap.apply_vec(&u);
        // the outer ghost row is first-order consistent pointwise, so it is
        // excluded here; the global order-2 property is checked separately.
        for i in 0..g.t - 1 {
            let want = -k * k * u[i];
            assert!(
                (out[i] - want).abs() < 2e-5,
                "node {i}: got {}, want {want}",
                out[i]
            );
        }
    }

    #[test]
    fn observed_convergence_order_is_two() {
        // truncation error on a smooth radial function over dyadic refinements
        let f = |r: f64| (-0.3 * r * r).exp() * (1.4 * r).cos();
        // exact Delta_r f computed symbolically:
        // f = e^{-0.3 r^2} cos(1.4 r)
        // f' = e^{-0.3 r^2} (-0.6 r cos - 1.4 sin)
        // f'' = e^{-0.3 r^2} ((0.36 r^2 - 0.6 - 1.96) cos + 1.68 r sin)
        let exact = |r: f64| {
            let e = (-0.3 * r * r).exp();
            let (s, c) = (1.4 * r).sin_cos();
            let fpp = e * ((0.36 * r * r - 0.6 - 1.96) * c + 1.68 * r * s);
            let fp = e * (-0.6 * r * c - 1.4 * s);
            if r == 0.0 {
                2.0 * (-0.6 - 1.96)
            } else {
                fpp + fp / r
            }
        };
        let mut errs = Vec::new();
        for t in [201usize, 401, 801] {
            let g = build_grid(6.0, t).unwrap();
            let lap = radial_laplacian(&g);
            let u: Vec<f64> = g.r.iter().map(|&r| f(r)).collect();
            let out = lap.apply_vec(&u);
            let mut emax: f64 = 0.0;
            // skip the outer Neumann row: f does not satisfy f'(r_star) = 0
            for i in 0..g.t - 2 {
                emax = emax.max((out[i] - exact(g.r[i])).abs());
            }
            errs.push(emax);
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        for order in [order1, order2] {
            assert!(
                (order - 2.0).abs() <= 0.1,
                "observed order {order}, errors {errs:?}"
            );
        }
    }
}
