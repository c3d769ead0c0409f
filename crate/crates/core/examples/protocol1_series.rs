//! Optimized GHZ_3 fidelity of the qubit-target protocol as the source
//! dimension grows.
//!
//! ```text
//! cargo run --release --example protocol1_series -- [t_max] [restarts]
//! ```

use qnetstates::optimize::DEFAULT_RESTARTS;
use qnetstates::protocols::protocol1::{protocol1_fidelity, protocol1_optimize, SourceCoefficients};
use qnetstates::protocols::Witness;

fn main() -> qnetstates::Result<()> {
    let mut args = std::env::args().skip(1);
    let t_max: usize = args.next().map_or(12, |s| s.parse().expect("t_max"));
    let restarts: usize = args.next().map_or(DEFAULT_RESTARTS, |s| s.parse().expect("restarts"));

    let uniform = SourceCoefficients::uniform(2)?;
    println!("uniform t=2 sources: F = {:.6} (7/16 = {:.6})", protocol1_fidelity(&uniform), 7.0 / 16.0);

    println!("{:>3}  {:>9}  {:>9}", "t", "F*_t", "check");
    for t in 2..=t_max {
        let r = protocol1_optimize(t, restarts, 0)?;
        // the closed form and the Kraus simulation of the same sources
        let simulated = r.ghz_fidelity_of_output()?;
        println!("{t:>3}  {:>9.6}  {:>9.2e}", r.fidelity, (r.fidelity - simulated).abs());
        if t == t_max {
            if let Witness::Schmidt(c) = &r.witness {
                let show = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
                println!("alpha: {}", show(&c.alpha));
                println!("beta:  {}", show(&c.beta));
                println!("gamma: {}", show(&c.gamma));
            }
        }
    }
    Ok(())
}
