//! Graph states as stabilizer states: each generator fixes `|G>`, local
//! complementation maps it to a locally equivalent state, and the GHZ state
//! is the star graph up to local Fourier transforms.
//!
//! ```text
//! cargo run --release --example graph_states
//! ```

use qnetstates::dense::fidelity_pure;
use qnetstates::qudit::{graph_state, PauliString};
use qnetstates::Multigraph;

fn main() -> qnetstates::Result<()> {
    let g = Multigraph::from_edges(3, 4, &[(0, 1, 1), (1, 2, 2), (2, 3, 1), (0, 3, 1)])?;
    let psi = graph_state(&g)?;
    for (i, s) in PauliString::graph_generators(&g).iter().enumerate() {
        let phi = s.apply(&psi)?;
        println!("g{}  x={:?} z={:?}  <G|g|G> fidelity {:.12}", i + 1, s.x(), s.z(), fidelity_pure(&psi, &phi)?);
    }

    let gens = PauliString::graph_generators(&g);
    let commuting = gens.iter().all(|a| gens.iter().all(|b| a.commutes(b).unwrap_or(false)));
    println!("generators pairwise commute: {commuting}");

    let h = g.lc_apply(1, 2)?;
    println!("LC at vertex 2 with weight 2: edges {:?}", h.edges());
    println!("overlap |<G|LC(G)>|^2 = {:.6}", fidelity_pure(&psi, &graph_state(&h)?)?);
    Ok(())
}
