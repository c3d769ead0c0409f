//! GHZ states of dimension `k^2` from maximally entangled `k`-level pairs,
//! and the lower bounds this gives in every dimension.
//!
//! ```text
//! cargo run --release --example protocol3 -- [d_max]
//! ```

use qnetstates::protocols::protocol3::{projection_formula, protocol3_candidates};
use qnetstates::protocols::Witness;

fn main() -> qnetstates::Result<()> {
    let d_max: usize = std::env::args().nth(1).map_or(16, |s| s.parse().expect("d_max"));
    println!("{:>3}  {:>10}  {:>10}  {:>10}  best", "d", "1/d", "floor√d/d", "F");
    for d in 2..=d_max {
        let all = protocol3_candidates(d)?;
        let best = all.iter().max_by(|a, b| a.fidelity.total_cmp(&b.fidelity)).expect("nonempty");
        let label = match &best.witness {
            Witness::Protocol3 { method, x: Some(x), .. } => format!("{method:?} x={x:.4}"),
            Witness::Protocol3 { method, .. } => format!("{method:?}"),
            _ => unreachable!(),
        };
        println!(
            "{d:>3}  {:>10.6}  {:>10.6}  {:>10.6}  {label}",
            1.0 / d as f64,
            d.isqrt() as f64 / d as f64,
            best.fidelity
        );
    }
    println!("closed form at d=3: {:.6}", projection_formula(2));
    Ok(())
}
