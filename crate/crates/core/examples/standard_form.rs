//! Standard forms of a few multigraphs: the LC certificate, the designated
//! pair and the index, next to the exhaustive orbit minimum.
//!
//! ```text
//! cargo run --release --example standard_form
//! ```

use qnetstates::standard_form::{classify, standardize, standardize_exhaustive, DEFAULT_ORBIT_CAP};
use qnetstates::Multigraph;

fn show(name: &str, g: &Multigraph) -> qnetstates::Result<()> {
    let sf = standardize(g)?;
    assert_eq!(sf.replay(g)?, sf.graph);
    let steps: Vec<String> = sf.lc_sequence.iter().map(|s| format!("LC{}^{}", s.vertex + 1, s.weight)).collect();
    let class = classify(&sf.graph, sf.pair.0, sf.pair.1).map_or("-", |c| c.label());
    print!(
        "{name:<10} d={} n={}  pair=({}, {})  beta={}  class={class}  [{}]",
        g.d(),
        g.n(),
        sf.pair.0 + 1,
        sf.pair.1 + 1,
        sf.beta,
        steps.join(" ")
    );
    if g.n() <= 6 {
        print!("  orbit min={}", standardize_exhaustive(g, DEFAULT_ORBIT_CAP)?.beta);
    }
    println!();
    Ok(())
}

fn main() -> qnetstates::Result<()> {
    show("triangle", &Multigraph::complete(2, 3)?)?;
    show("K5", &Multigraph::complete(3, 5)?)?;
    show("path", &Multigraph::from_edges(3, 3, &[(0, 1, 2), (0, 2, 1)])?)?;
    show("star", &Multigraph::from_edges(5, 5, &[(0, 1, 1), (0, 2, 2), (0, 3, 3), (0, 4, 4)])?)?;
    show("ring6", &Multigraph::from_edges(3, 6, &[(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 4, 2), (4, 5, 1), (5, 0, 2)])?)?;
    let tree = [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 3, 2), (0, 4, 1), (1, 4, 1), (3, 5, 1), (4, 6, 1)];
    show("seven", &Multigraph::from_edges(3, 7, &tree)?)?;
    Ok(())
}
