//! Qutrit GHZ fidelity from sifted qubit pairs.
//!
//! Each source emits `k` qubit pairs as one joint state; every node keeps the
//! first incoming pair that is not `|00>` and writes it into a qutrit. With
//! three pairs the optimum passes `4/9` and approaches `2 sqrt 3 - 3`.
//!
//! ```text
//! cargo run --release --example protocol2 -- [restarts]
//! ```

use qnetstates::protocols::protocol2::{protocol2_optimize, Protocol2Config, SourceModel};

fn main() -> qnetstates::Result<()> {
    let restarts: usize = std::env::args().nth(1).map_or(64, |s| s.parse().expect("restarts"));
    let target = 2.0 * 3f64.sqrt() - 3.0;
    println!("2 sqrt 3 - 3 = {target:.6}, 4/9 = {:.6}", 4.0 / 9.0);

    for (k, model) in [
        (1, SourceModel::FreePairs),
        (2, SourceModel::IdenticalPairs),
        (1, SourceModel::Schmidt),
        (2, SourceModel::Schmidt),
        (3, SourceModel::Schmidt),
    ] {
        let cfg = Protocol2Config { k, model, restarts, ..Default::default() };
        let r = protocol2_optimize(&cfg)?;
        println!("k={k} {:<16} F = {:.7}  gme = {}", format!("{model:?}"), r.fidelity, r.gme);
    }

    // Non-cyclic shift assignments collapse to the trivial value.
    let cfg = Protocol2Config { k: 1, shifts: [0, 2, 1], restarts, ..Default::default() };
    println!("k=1 shifts (0,2,1)   F = {:.7}", protocol2_optimize(&cfg)?.fidelity);
    Ok(())
}
