//! The two fidelity upper bounds over primes and indices, and how the
//! improvement of the second over the first behaves for large `d`.
//!
//! ```text
//! cargo run --release --example bounds_sweep
//! ```

use qnetstates::bounds::{asymptotic_improvement, compare, sweep_csv, sweep_rows};
use qnetstates::field::primes;

fn main() -> qnetstates::Result<()> {
    let rows = sweep_rows(&primes(8), &[1, 3, 5, 9])?;
    print!("{}", sweep_csv(&rows, 6));

    println!("\nbeta = 1, large d");
    for d in [101, 1009, 10007, 100003, 1000003] {
        let r = compare(d, 1)?;
        println!("  d={d:<8} ub2={:.6}  ub1={:.6}  improvement={:.6}", r.ub2, r.ub1, r.improvement);
    }
    println!("  limit of the improvement: {:.6}", asymptotic_improvement());
    Ok(())
}
