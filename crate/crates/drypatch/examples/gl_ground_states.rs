//! Ground states of the two amplitude equations on the half-line: the
//! quadratic equation (homogeneous case) via shooting plus collocation,
//! and the cubic equation (Turing case) at the rho = 1.5 coefficients.
//!
//! ```bash
//! cargo run --release --example gl_ground_states
//! ```

use drypatch::amplitude::{solve_gl_cubic, solve_gl_quadratic};
use drypatch::model::{normal_form_turing, reduced_params, ModelParams};

fn main() {
    let quad = solve_gl_quadratic(2000).unwrap();
    println!(
        "quadratic: q(0) = {:.8}, decay rate = {:.5}, discrete residual = {:.2e}",
        quad.q_at_0, quad.decay_rate, quad.ode_residual
    );

    let rp = reduced_params(&ModelParams::default()).unwrap();
    let nf = normal_form_turing(&rp).unwrap();
    let (c0, c3) = (nf.c0, nf.c3.unwrap());
    let cubic = solve_gl_cubic(c0, c3, 2000).unwrap();
    println!(
        "cubic (c0 = {c0:.6}, c3 = {c3:.6}): q0 = {:.8}, decay rate = {:.5} (sqrt(c0) = {:.5})",
        cubic.q_at_0,
        cubic.decay_rate,
        c0.sqrt()
    );

    // no localised state on the wrong side of the cubic threshold
    match solve_gl_cubic(1.0, 0.25, 500) {
        Err(e) => println!("c3 > 0 correctly rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    // a few profile samples
    println!("\n{:>8} {:>14} {:>14}", "s", "q_quadratic", "q_cubic");
    for s in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 12.0] {
        let iq = quad
            .s_grid
            .iter()
            .position(|&x| x >= s)
            .unwrap_or(quad.q.len() - 1);
        let ic = cubic
            .s_grid
            .iter()
            .position(|&x| x >= s)
            .unwrap_or(cubic.q.len() - 1);
        println!("{:>8.2} {:>14.8} {:>14.8}", s, quad.q[iq], cubic.q[ic]);
    }
}
