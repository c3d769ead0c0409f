//! Standard forms of connected multigraphs under local complementation.
//!
//! A graph is in standard form for a pair of adjacent vertices `(v1, v2)`
//! when every vertex of `{v1} ∪ (N_v1 ∩ N_v2)` has a neighbor other than
//! `v2` that is not adjacent to `v2`. Such a vertex is called *good*,
//! otherwise *bad*. The index of the form is `β = 2|N_v1 ∩ N_v2| + 1`.
//!
//! [`standardize`] reaches a standard form deterministically:
//!
//! 1. pick the lexicographically smallest path `v3 – v1 – v2` with `v2`, `v3`
//!    non-adjacent; if the graph is complete, first delete the edge `{1, 2}`
//!    with one LC around vertex 0;
//! 2. while the common neighborhood holds a bad vertex `u`, form
//!    `a_w = -G[v2][w] / (G[v2][u] G[u][w])` for `w ∈ N_u \ {v2}`. A constant
//!    ratio lets one LC around `u` disconnect `v2` from all of `N_u`, and the
//!    pair moves to `(u, v2)` with index 1. Otherwise an LC around `u` with the
//!    ratio of the smallest `w` whose ratio differs from that of `v1` removes
//!    the edge `{v2, w}`, so `|N_v2|` strictly shrinks.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{inv_mod, mul_mod};
use crate::graph::Multigraph;

/// One local complementation: vertex (0-based) and weight in F_d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LcStep {
    pub vertex: usize,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardFormResult {
    pub graph: Multigraph,
    /// Designated adjacent pair (0-based).
    pub pair: (usize, usize),
    pub lc_sequence: Vec<LcStep>,
    pub beta: usize,
    /// Set when the result is the minimum-index form over the whole LC orbit.
    pub minimal: bool,
}

impl StandardFormResult {
    /// Replays the certificate on `input`.
    pub fn replay(&self, input: &Multigraph) -> Result<Multigraph> {
        replay(input, &self.lc_sequence)
    }
}

pub fn replay(input: &Multigraph, seq: &[LcStep]) -> Result<Multigraph> {
    seq.iter()
        .try_fold(input.clone(), |g, s| g.lc_apply(s.vertex, s.weight))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    /// Removes the edge between the two partners of a triangle.
    BreakTriangle,
    /// Constant-ratio branch: the pair is re-seated and the index drops to 1.
    IndexOne,
    /// Turns a bad vertex good and shrinks `N_v2`.
    Shrink,
}

/// Diagnostic record of one LC performed by [`standardize_traced`].
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub kind: StepKind,
    pub step: LcStep,
    pub pair_before: (usize, usize),
    pub pair_after: (usize, usize),
    pub before: Multigraph,
    pub after: Multigraph,
}

fn check_input(g: &Multigraph) -> Result<()> {
    if g.n() < 3 {
        return Err(Error::TooFewVertices(g.n()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

fn check_adjacent(g: &Multigraph, v1: usize, v2: usize) -> Result<()> {
    g.check_vertex(v1)?;
    g.check_vertex(v2)?;
    if !g.adjacent(v1, v2) {
        return Err(Error::NotAdjacent(v1, v2));
    }
    Ok(())
}

/// `N_v1 ∩ N_v2`, sorted.
pub fn common_neighbors(g: &Multigraph, v1: usize, v2: usize) -> Vec<usize> {
    (0..g.n())
        .filter(|&w| g.adjacent(v1, w) && g.adjacent(v2, w))
        .collect()
}

/// Whether `u` has a neighbor other than `v2` that is not adjacent to `v2`.
pub fn is_good(g: &Multigraph, u: usize, v2: usize) -> bool {
    g.neighbors(u)
        .into_iter()
        .any(|w| w != v2 && !g.adjacent(w, v2))
}

pub fn index_beta(g: &Multigraph, v1: usize, v2: usize) -> Result<usize> {
    check_adjacent(g, v1, v2)?;
    Ok(2 * common_neighbors(g, v1, v2).len() + 1)
}

pub fn is_standard(g: &Multigraph, v1: usize, v2: usize) -> Result<bool> {
    check_input(g)?;
    g.check_vertex(v1)?;
    g.check_vertex(v2)?;
    Ok(is_standard_unchecked(g, v1, v2))
}

fn is_standard_unchecked(g: &Multigraph, v1: usize, v2: usize) -> bool {
    v1 != v2
        && g.adjacent(v1, v2)
        && is_good(g, v1, v2)
        && common_neighbors(g, v1, v2)
            .into_iter()
            .all(|u| is_good(g, u, v2))
}

/// Lexicographically smallest `(v1, v2, v3)` with `v2, v3 ∈ N_v1` non-adjacent.
fn first_open_path(g: &Multigraph) -> Option<(usize, usize, usize)> {
    for v1 in 0..g.n() {
        let nb = g.neighbors(v1);
        for &v2 in &nb {
            for &v3 in &nb {
                if v3 != v2 && !g.adjacent(v2, v3) {
                    return Some((v1, v2, v3));
                }
            }
        }
    }
    None
}

/// Deterministic standardization.
pub fn standardize(g: &Multigraph) -> Result<StandardFormResult> {
    standardize_traced(g).map(|(r, _)| r)
}

/// [`standardize`] together with a record of every LC performed.
pub fn standardize_traced(g: &Multigraph) -> Result<(StandardFormResult, Vec<StepRecord>)> {
    check_input(g)?;
    let mut trace = Vec::new();
    let mut cur = g.clone();
    let (v1, v2) = match first_open_path(g) {
        Some((v1, v2, _)) => (v1, v2),
        None => {
            // Connected with every neighborhood a clique: the graph is complete.
            let (c, p, q) = (0, 1, 2);
            let d = g.d();
            let denom = mul_mod(g.entry(p, c), g.entry(q, c), d);
            let a = mul_mod(d - g.entry(p, q), inv_mod(denom, d), d);
            let step = LcStep { vertex: c, weight: a };
            let next = cur.lc_apply(c, a)?;
            debug_assert!(!next.adjacent(p, q));
            trace.push(StepRecord {
                kind: StepKind::BreakTriangle,
                step,
                pair_before: (c, p),
                pair_after: (c, p),
                before: cur,
                after: next.clone(),
            });
            cur = next;
            (c, p)
        }
    };
    let result = reduce_from(cur, v1, v2, &mut trace)?;
    let mut seq: Vec<LcStep> = trace.iter().map(|r| r.step).collect();
    seq.shrink_to_fit();
    Ok((
        StandardFormResult {
            beta: index_beta(&result.0, result.1 .0, result.1 .1)?,
            graph: result.0,
            pair: result.1,
            lc_sequence: seq,
            minimal: false,
        },
        trace,
    ))
}

/// Runs the bad-vertex elimination starting from a given adjacent pair.
/// `v1` must already be good (have a neighbor other than `v2` outside `N_v2`).
pub fn standardize_from(g: &Multigraph, v1: usize, v2: usize) -> Result<StandardFormResult> {
    check_input(g)?;
    check_adjacent(g, v1, v2)?;
    if !is_good(g, v1, v2) {
        return Err(Error::ClassPrecondition(format!(
            "vertex {} has no neighbor outside N_{}",
            v1 + 1,
            v2 + 1
        )));
    }
    let mut trace = Vec::new();
    let (graph, pair) = reduce_from(g.clone(), v1, v2, &mut trace)?;
    Ok(StandardFormResult {
        beta: index_beta(&graph, pair.0, pair.1)?,
        graph,
        pair,
        lc_sequence: trace.iter().map(|r| r.step).collect(),
        minimal: false,
    })
}

fn reduce_from(
    mut g: Multigraph,
    mut v1: usize,
    v2: usize,
    trace: &mut Vec<StepRecord>,
) -> Result<(Multigraph, (usize, usize))> {
    let d = g.d();
    // |N_v2| shrinks on every Shrink step, and IndexOne ends the loop.
    for _ in 0..=g.n() {
        let bad = common_neighbors(&g, v1, v2)
            .into_iter()
            .find(|&u| !is_good(&g, u, v2));
        let Some(u) = bad else {
            debug_assert!(is_standard_unchecked(&g, v1, v2));
            return Ok((g, (v1, v2)));
        };
        let others: Vec<usize> = g.neighbors(u).into_iter().filter(|&w| w != v2).collect();
        let ratio = |w: usize| -> u64 {
            let denom = mul_mod(g.entry(v2, u), g.entry(u, w), d);
            mul_mod((d - g.entry(v2, w)) % d, inv_mod(denom, d), d)
        };
        let a1 = ratio(v1);
        let before = g.clone();
        let n2_before = g.neighbors(v2).len();
        match others.iter().copied().find(|&w| ratio(w) != a1) {
            None => {
                let step = LcStep { vertex: u, weight: a1 };
                g = g.lc_apply(u, a1)?;
                debug_assert!(common_neighbors(&g, u, v2).is_empty());
                trace.push(StepRecord {
                    kind: StepKind::IndexOne,
                    step,
                    pair_before: (v1, v2),
                    pair_after: (u, v2),
                    before,
                    after: g.clone(),
                });
                v1 = u;
            }
            Some(w) => {
                let step = LcStep { vertex: u, weight: ratio(w) };
                g = g.lc_apply(u, step.weight)?;
                assert!(
                    g.neighbors(v2).len() < n2_before,
                    "neighborhood of v2 did not shrink"
                );
                debug_assert!(g.adjacent(v1, v2) && !g.adjacent(v2, w));
                trace.push(StepRecord {
                    kind: StepKind::Shrink,
                    step,
                    pair_before: (v1, v2),
                    pair_after: (v1, v2),
                    before,
                    after: g.clone(),
                });
            }
        }
    }
    unreachable!("bad-vertex elimination exceeded n iterations")
}

/// An orbit member with its BFS parent index and the step from the parent.
pub type OrbitNode = (Multigraph, Option<(usize, LcStep)>);

/// Every graph reachable from `g` by local complementations, in BFS order,
/// with the step that first reached it.
pub fn lc_orbit(g: &Multigraph, cap: usize) -> Result<Vec<OrbitNode>> {
    orbit_until(g, cap, |_| false)
}

/// BFS over the LC orbit that stops right after `stop` returns true for a
/// visited graph. Graphs are visited in BFS order, each exactly once.
fn orbit_until(
    g: &Multigraph,
    cap: usize,
    mut stop: impl FnMut(&Multigraph) -> bool,
) -> Result<Vec<OrbitNode>> {
    let mut index: HashSet<Multigraph> = HashSet::from([g.clone()]);
    let mut nodes: Vec<OrbitNode> = vec![(g.clone(), None)];
    let mut i = 0;
    while i < nodes.len() {
        let cur = nodes[i].0.clone();
        if stop(&cur) {
            break;
        }
        for v in 0..cur.n() {
            for a in 1..cur.d() {
                let next = cur.lc_apply(v, a)?;
                if index.contains(&next) {
                    continue;
                }
                if nodes.len() >= cap {
                    return Err(Error::OrbitTooLarge(cap));
                }
                index.insert(next.clone());
                nodes.push((next, Some((i, LcStep { vertex: v, weight: a }))));
            }
        }
        i += 1;
    }
    Ok(nodes)
}

/// Default orbit size limit for [`standardize_exhaustive`].
pub const DEFAULT_ORBIT_CAP: usize = 2_000_000;

/// Minimum-index standard form over the entire LC orbit (small graphs only).
/// Ties are broken by BFS order, then by the pair in lexicographic order.
/// The search ends early once index 1 is reached.
pub fn standardize_exhaustive(g: &Multigraph, cap: usize) -> Result<StandardFormResult> {
    check_input(g)?;
    if g.n() > 6 {
        return Err(Error::OutOfRange(format!(
            "exhaustive mode supports n <= 6, got {}",
            g.n()
        )));
    }
    let mut best: Option<(usize, usize, (usize, usize))> = None;
    let mut visited = 0;
    let orbit = orbit_until(g, cap, |h| {
        for v1 in 0..h.n() {
            for v2 in 0..h.n() {
                if v1 == v2 || !h.adjacent(v1, v2) || !is_standard_unchecked(h, v1, v2) {
                    continue;
                }
                let beta = 2 * common_neighbors(h, v1, v2).len() + 1;
                if best.is_none_or(|(b, _, _)| beta < b) {
                    best = Some((beta, visited, (v1, v2)));
                }
            }
        }
        visited += 1;
        best.is_some_and(|(b, _, _)| b == 1)
    })?;
    let (beta, idx, pair) = best.expect("a standard form exists in every LC orbit");
    let mut seq = Vec::new();
    let mut at = idx;
    while let Some((parent, step)) = orbit[at].1 {
        seq.push(step);
        at = parent;
    }
    seq.reverse();
    Ok(StandardFormResult {
        graph: orbit[idx].0.clone(),
        pair,
        lc_sequence: seq,
        beta,
        minimal: true,
    })
}

/// The four graph classes relative to a fixed adjacent pair `(1, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum GraphClass {
    /// `N_1 ∩ N_2 = ∅`.
    G0,
    /// Nonempty intersection and `N_2 \ {u} ≠ N_u \ {2}` for every common neighbor `u`.
    G1,
    /// Single common neighbor `u` with `N_2 \ {u} = N_u \ {2}`.
    G2 { u: usize },
    /// At least two common neighbors; `u` has `N_2 \ {u} = N_u \ {2}` and the weight
    /// `a` clears every edge between 2 and `N_u \ {2}`.
    G3 { u: usize, a: u64 },
}

impl GraphClass {
    pub fn label(&self) -> &'static str {
        match self {
            GraphClass::G0 => "G0",
            GraphClass::G1 => "G1",
            GraphClass::G2 { .. } => "G2",
            GraphClass::G3 { .. } => "G3",
        }
    }
}

pub fn classify(g: &Multigraph, v1: usize, v2: usize) -> Result<GraphClass> {
    check_adjacent(g, v1, v2)?;
    let n1 = g.neighbors(v1);
    let outside = n1.iter().filter(|&&w| !g.adjacent(v2, w)).count();
    if outside < 2 {
        return Err(Error::ClassPrecondition(format!(
            "|N_{0} \\ N_{1}| = {outside} < 2",
            v1 + 1,
            v2 + 1
        )));
    }
    let common = common_neighbors(g, v1, v2);
    if common.is_empty() {
        return Ok(GraphClass::G0);
    }
    let without = |v: usize, skip: usize| -> Vec<usize> {
        g.neighbors(v).into_iter().filter(|&w| w != skip).collect()
    };
    let mirrored: Vec<usize> = common
        .iter()
        .copied()
        .filter(|&u| without(v2, u) == without(u, v2))
        .collect();
    if mirrored.is_empty() {
        return Ok(GraphClass::G1);
    }
    if common.len() == 1 {
        return Ok(GraphClass::G2 { u: mirrored[0] });
    }
    let d = g.d();
    for &u in &mirrored {
        let rest = without(u, v2);
        for a in 1..d {
            let clears = rest.iter().all(|&w| {
                (g.entry(v2, w) + mul_mod(a, mul_mod(g.entry(v2, u), g.entry(u, w), d), d)).is_multiple_of(d)
            });
            if clears {
                return Ok(GraphClass::G3 { u, a });
            }
        }
    }
    Err(Error::Unclassified)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn path3() -> Multigraph {
        Multigraph::from_edges(3, 3, &[(0, 1, 2), (0, 2, 1)]).unwrap()
    }

    /// Pair (1, 2), extra neighbor 3 of vertex 1, common neighbors 4 and 5
    /// each with a private outside neighbor (6 and 7).
    pub(crate) fn seven_vertex() -> Multigraph {
        Multigraph::from_edges(
            3,
            7,
            &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 3, 2), (0, 4, 1), (1, 4, 1), (3, 5, 1), (4, 6, 1)],
        )
        .unwrap()
    }

    #[test]
    fn worked_examples() {
        let a = path3();
        assert!(is_standard(&a, 0, 1).unwrap());
        assert_eq!(index_beta(&a, 0, 1).unwrap(), 1);
        let b = seven_vertex();
        assert!(is_standard(&b, 0, 1).unwrap());
        assert_eq!(index_beta(&b, 0, 1).unwrap(), 5);
    }

    #[test]
    fn triangle_is_never_standard() {
        let k3 = Multigraph::complete(2, 3).unwrap();
        for v1 in 0..3 {
            for v2 in 0..3 {
                if v1 != v2 {
                    assert!(!is_standard(&k3, v1, v2).unwrap());
                }
            }
        }
    }

    #[test]
    fn standardize_triangle() {
        let k3 = Multigraph::complete(2, 3).unwrap();
        let r = standardize(&k3).unwrap();
        assert_eq!(r.lc_sequence, vec![LcStep { vertex: 0, weight: 1 }]);
        assert_eq!(r.pair, (0, 1));
        assert_eq!(r.beta, 1);
        assert_eq!(r.graph.edges(), vec![(0, 1, 1), (0, 2, 1)]);
        assert_eq!(r.replay(&k3).unwrap(), r.graph);
    }

    #[test]
    fn already_standard_needs_no_steps() {
        let r = standardize(&path3()).unwrap();
        assert!(r.lc_sequence.is_empty());
        assert_eq!(r.beta, 1);
        assert_eq!(r.pair, (0, 1));
    }

    #[test]
    fn star_pairs_have_index_one() {
        let star = Multigraph::from_edges(5, 5, &[(0, 1, 1), (0, 2, 3), (0, 3, 1), (0, 4, 2)]).unwrap();
        assert_eq!(index_beta(&star, 0, 3).unwrap(), 1);
        assert_eq!(index_beta(&star, 0, 1).unwrap(), 1);
    }

    #[test]
    fn input_errors() {
        let two = Multigraph::from_edges(2, 2, &[(0, 1, 1)]).unwrap();
        assert!(matches!(standardize(&two), Err(Error::TooFewVertices(2))));
        let split = Multigraph::from_edges(2, 4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        assert!(matches!(standardize(&split), Err(Error::Disconnected)));
        assert!(matches!(index_beta(&path3(), 1, 2), Err(Error::NotAdjacent(1, 2))));
    }

    #[test]
    fn classes() {
        assert_eq!(classify(&path3(), 0, 1).unwrap(), GraphClass::G0);
        assert_eq!(classify(&seven_vertex(), 0, 1).unwrap(), GraphClass::G1);
        // 1-2, 1-3, 1-4, 2-4: the single common neighbor 4 mirrors vertex 2.
        let g2 = Multigraph::from_edges(3, 4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 3, 1)]).unwrap();
        assert_eq!(classify(&g2, 0, 1).unwrap(), GraphClass::G2 { u: 3 });
        let r = standardize_from(&g2, 0, 1).unwrap();
        assert!(is_standard(&r.graph, r.pair.0, r.pair.1).unwrap());
        assert_eq!(r.beta, 1);
    }

    #[test]
    fn class_g3_reaches_index_one() {
        // Common neighbors 4, 5 of (1, 2); N_4 \ {2} = {1, 5} = N_2 \ {4}.
        let g = Multigraph::from_edges(
            3,
            5,
            &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1), (1, 3, 1), (1, 4, 1), (3, 4, 1)],
        )
        .unwrap();
        let class = classify(&g, 0, 1).unwrap();
        assert!(matches!(class, GraphClass::G3 { .. }), "{class:?}");
        let r = standardize_from(&g, 0, 1).unwrap();
        assert_eq!(r.beta, 1);
        assert_eq!(r.replay(&g).unwrap(), r.graph);
    }

    #[test]
    fn classify_precondition() {
        let path = Multigraph::from_edges(2, 3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert!(matches!(classify(&path, 0, 1), Err(Error::ClassPrecondition(_))));
    }

    #[test]
    fn exhaustive_on_triangle() {
        let k3 = Multigraph::complete(3, 3).unwrap();
        let r = standardize_exhaustive(&k3, DEFAULT_ORBIT_CAP).unwrap();
        assert_eq!(r.beta, 1);
        assert!(r.minimal);
        assert_eq!(r.replay(&k3).unwrap(), r.graph);
        assert!(is_standard(&r.graph, r.pair.0, r.pair.1).unwrap());
    }
}
