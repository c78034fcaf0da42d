//! Scaling of the Turing onset with the water diffusivity: the distance
//! p1 - p_c shrinks like 1/delta and the wavenumber k1 like
//! delta^{-1/2}.
//!
//! ```bash
//! cargo run --release --example turing_onset_scaling
//! ```

use drypatch::model::{turing_onset_full, ModelParams};

fn main() {
    let p_c = 0.15625;
    println!(
        "{:>8} {:>12} {:>12} {:>14} {:>12}",
        "delta", "p1", "k1", "(p1-p_c)*delta", "k1^2*delta"
    );
    let mut prev: Option<(f64, f64, f64)> = None;
    for delta in [30.0, 60.0, 120.0, 240.0, 480.0] {
        let params = ModelParams {
            delta,
            ..ModelParams::default()
        };
        let onset = turing_onset_full(&params).unwrap();
        println!(
            "{:>8.0} {:>12.8} {:>12.8} {:>14.6} {:>12.6}",
            delta,
            onset.p1,
            onset.k1,
            (onset.p1 - p_c) * delta,
            onset.k1 * onset.k1 * delta
        );
        if let Some((d0, dp0, k0)) = prev {
            let sp = ((onset.p1 - p_c) / dp0).ln() / (delta / d0).ln();
            let sk = (onset.k1 / k0).ln() / (delta / d0).ln();
            println!("{:>8} local exponents: p1-p_c {:+.4}, k1 {:+.4}", "", sp, sk);
        }
        prev = Some((delta, onset.p1 - p_c, onset.k1));
    }
}
