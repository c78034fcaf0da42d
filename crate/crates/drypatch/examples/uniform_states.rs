//! Uniform equilibria of the model across precipitation: the bare state
//! and the vegetated states from the cubic, with physicality flags.
//!
//! ```bash
//! cargo run --release --example uniform_states
//! ```

use drypatch::model::{critical_precipitation, uniform_states, ModelParams, UniformKind};

fn main() {
    let params = ModelParams::default();
    let p_c = critical_precipitation(&params).unwrap();
    println!("p_c = {p_c}");
    println!("{:>8} {:>12} {:>12} {:>10} {:>9}", "p", "n*", "w*", "kind", "physical");
    for i in 0..=20 {
        let p = 0.4 * i as f64 / 20.0;
        for st in uniform_states(&params.with_p(p)) {
            let kind = match st.kind {
                UniformKind::Bare => "bare",
                UniformKind::Vegetated => "vegetated",
            };
            println!(
                "{:>8.4} {:>12.6} {:>12.6} {:>10} {:>9}",
                p, st.n_star, st.w_star, kind, st.physical
            );
        }
    }
}
