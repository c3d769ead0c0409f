//! Multigraphs over F_d and local complementation.
//!
//! Vertices are 0-indexed in the API. The JSON graph file format and every
//! human-facing report use 1-based labels.

use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{check_prime_modulus, mul_mod, FieldElem};

/// A multigraph whose edge multiplicities live in F_d.
///
/// The adjacency matrix is symmetric with a zero diagonal and every entry is
/// stored already reduced mod `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multigraph {
    d: u64,
    n: usize,
    adj: Vec<u64>,
}

impl Multigraph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(d: u64, n: usize) -> Result<Self> {
        check_prime_modulus(d)?;
        Ok(Self { d, n, adj: vec![0; n * n] })
    }

    /// Builds a graph from 0-based `(i, j, multiplicity)` triples. Multiplicities
    /// are reduced mod `d` and repeated entries for the same pair are summed.
    pub fn from_edges(d: u64, n: usize, edges: &[(usize, usize, i64)]) -> Result<Self> {
        let mut g = Self::empty(d, n)?;
        for &(i, j, m) in edges {
            g.check_vertex(i)?;
            g.check_vertex(j)?;
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            let m = m.rem_euclid(d as i64) as u64;
            let cur = g.entry(i, j);
            g.set(i, j, (cur + m) % d);
        }
        Ok(g)
    }

    /// Builds a graph from a full adjacency matrix given row by row.
    pub fn from_matrix(d: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut g = Self::empty(d, n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            for (j, &m) in row.iter().enumerate() {
                let m = m.rem_euclid(d as i64) as u64;
                if i == j && m != 0 {
                    return Err(Error::SelfLoop(i));
                }
                if m != rows[j][i].rem_euclid(d as i64) as u64 {
                    return Err(Error::Parse(format!("adjacency matrix not symmetric at ({i}, {j})")));
                }
                g.adj[i * n + j] = m;
            }
        }
        Ok(g)
    }

    /// Complete graph with every multiplicity equal to one.
    pub fn complete(d: u64, n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j, 1));
            }
        }
        Self::from_edges(d, n, &edges)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Multiplicity of the edge `{i, j}` (no range check).
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.adj[i * self.n + j]
    }

    pub fn field_entry(&self, i: usize, j: usize) -> FieldElem {
        FieldElem::from_reduced(self.entry(i, j), self.d)
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.entry(i, j) != 0
    }

    fn set(&mut self, i: usize, j: usize, m: u64) {
        self.adj[i * self.n + j] = m;
        self.adj[j * self.n + i] = m;
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    /// Row `i` of the adjacency matrix.
    pub fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.n..(i + 1) * self.n]
    }

    /// Nonzero edges as 0-based `(i, j, multiplicity)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let m = self.entry(i, j);
                if m != 0 {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    /// Local complementation around `l` with weight `a`:
    /// `G'_ij = G_ij + a G_il G_jl` for `i != j`.
    pub fn lc_apply(&self, l: usize, a: u64) -> Result<Self> {
        self.check_vertex(l)?;
        let d = self.d;
        let a = a % d;
        let mut out = self.clone();
        if a == 0 {
            return Ok(out);
        }
        let nbrs = self.neighbors(l);
        for (x, &i) in nbrs.iter().enumerate() {
            for &j in &nbrs[x + 1..] {
                let add = mul_mod(a, mul_mod(self.entry(i, l), self.entry(j, l), d), d);
                out.set(i, j, (self.entry(i, j) + add) % d);
            }
        }
        Ok(out)
    }

    /// Same as [`lc_apply`](Self::lc_apply) with a field-valued weight.
    pub fn lc_apply_elem(&self, l: usize, a: FieldElem) -> Result<Self> {
        if a.modulus() != self.d {
            return Err(Error::ModulusMismatch(a.modulus(), self.d));
        }
        self.lc_apply(l, a.value())
    }

    /// `N_i = {j : G_ij != 0}` in increasing order.
    pub fn neighborhood(&self, i: usize) -> Result<Vec<usize>> {
        self.check_vertex(i)?;
        Ok(self.neighbors(i))
    }

    pub(crate) fn neighbors(&self, i: usize) -> Vec<usize> {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(j, _)| j)
            .collect()
    }

    /// Connectivity of the underlying simple graph.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            d: self.d,
            n: self.n,
            edges: self
                .edges()
                .into_iter()
                .map(|(i, j, m)| [i as i64 + 1, j as i64 + 1, m as i64])
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("graph file serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(s)?;
        file.into_graph()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk graph description: `{"d": 3, "n": 3, "edges": [[1, 2, 2], [1, 3, 1]]}`
/// with 1-based vertex labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub d: u64,
    pub n: usize,
    pub edges: Vec<[i64; 3]>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<Multigraph> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for [i, j, m] in self.edges {
            if i < 1 || j < 1 {
                return Err(Error::Parse(format!("vertex labels are 1-based, got [{i}, {j}]")));
            }
            edges.push((i as usize - 1, j as usize - 1, m));
        }
        Multigraph::from_edges(self.d, self.n, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Multigraph {
        Multigraph::from_edges(3, 3, &[(0, 1, 2), (0, 2, 1)]).unwrap()
    }

    #[test]
    fn zero_weight_is_identity() {
        let g = path3();
        assert_eq!(g.lc_apply(0, 0).unwrap(), g);
    }

    #[test]
    fn lc_on_qubit_triangle_gives_path() {
        let k3 = Multigraph::complete(2, 3).unwrap();
        let p = k3.lc_apply(0, 1).unwrap();
        assert_eq!(p.edges(), vec![(0, 1, 1), (0, 2, 1)]);
    }

    #[test]
    fn lc_on_qutrit_example() {
        let g = path3();
        let h = g.lc_apply(0, 1).unwrap();
        assert_eq!(h.entry(1, 2), 2);
        assert_eq!(h.entry(0, 1), 2);
        assert_eq!(h.entry(0, 2), 1);
        // input untouched
        assert_eq!(g.entry(1, 2), 0);
    }

    #[test]
    fn lc_rejects_bad_vertex() {
        assert_eq!(
            path3().lc_apply(3, 1),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        );
    }

    #[test]
    fn neighborhoods() {
        assert_eq!(path3().neighborhood(0).unwrap(), vec![1, 2]);
        let g = Multigraph::from_edges(2, 3, &[(0, 1, 1)]).unwrap();
        assert!(g.neighborhood(2).unwrap().is_empty());
        let k3 = Multigraph::complete(5, 3).unwrap();
        for i in 0..3 {
            assert_eq!(k3.neighborhood(i).unwrap().len(), 2);
        }
        assert!(k3.neighborhood(7).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(Multigraph::complete(2, 3).unwrap().is_connected());
        assert!(path3().is_connected());
        let two_edges = Multigraph::from_edges(2, 4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        assert!(!two_edges.is_connected());
    }

    #[test]
    fn parse_reduces_and_sums() {
        let g = Multigraph::from_json(r#"{"d":3,"n":3,"edges":[[1,2,5],[1,3,1],[3,1,1]]}"#).unwrap();
        assert_eq!(g.entry(0, 1), 2);
        assert_eq!(g.entry(0, 2), 2);
        let round = Multigraph::from_json(&g.to_json()).unwrap();
        assert_eq!(round, g);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            Multigraph::from_json(r#"{"d":3,"n":3,"edges":[[2,2,1]]}"#),
            Err(Error::SelfLoop(1))
        );
        assert_eq!(
            Multigraph::from_json(r#"{"d":4,"n":3,"edges":[[1,2,1]]}"#),
            Err(Error::CompositeModulus(4))
        );
        assert!(Multigraph::from_json(r#"{"d":3,"n":3,"edges":[[1,4,1]]}"#).is_err());
        assert!(Multigraph::from_json(r#"{"d":3,"n":3,"edges":[[0,1,1]]}"#).is_err());
    }
}
