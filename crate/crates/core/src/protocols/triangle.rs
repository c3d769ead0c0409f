//! Triangle networks: three bipartite sources, three nodes, one local channel per node.
//!
//! Source `k` sends its first particle (part A) to node `k` and its second
//! particle (part B) to node `k+1 mod 3`. Node `k` therefore holds
//! `(A_k, B_{k-1})`, in that order.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::dense::{c, hermitian_eigen, ravel, unravel, DenseOperator, DenseState, C64, MAX_STATE_DIM};
use crate::error::{Error, Result};

/// Site permutation taking `[A0, B0, A1, B1, A2, B2]` to node order.
const NODE_ORDER: [usize; 6] = [0, 5, 2, 1, 4, 3];

/// Tolerance for `sum_k K^dagger K = I`.
pub const TRACE_PRESERVING_TOL: f64 = 1e-10;

/// A local channel from two incoming particles to one output system.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeChannel {
    kraus: Vec<DMatrix<C64>>,
    input_dims: [usize; 2],
    output_dim: usize,
}

impl NodeChannel {
    /// Checks shapes and trace preservation.
    pub fn new(kraus: Vec<DMatrix<C64>>, input_dims: [usize; 2]) -> Result<Self> {
        let din = input_dims[0] * input_dims[1];
        let output_dim = kraus.first().map(|k| k.nrows()).ok_or_else(|| Error::OutOfRange("empty Kraus family".into()))?;
        for k in &kraus {
            if k.ncols() != din {
                return Err(Error::DimensionMismatch { expected: din, got: k.ncols() });
            }
            if k.nrows() != output_dim {
                return Err(Error::DimensionMismatch { expected: output_dim, got: k.nrows() });
            }
        }
        let ch = Self { kraus, input_dims, output_dim };
        let err = ch.completeness_error();
        if err > TRACE_PRESERVING_TOL {
            return Err(Error::NotTracePreserving(err));
        }
        Ok(ch)
    }

    /// A single unitary (or isometry) as a one-element Kraus family.
    pub fn unitary(u: DMatrix<C64>, input_dims: [usize; 2]) -> Result<Self> {
        Self::new(vec![u], input_dims)
    }

    pub fn kraus(&self) -> &[DMatrix<C64>] {
        &self.kraus
    }

    pub fn input_dims(&self) -> [usize; 2] {
        self.input_dims
    }

    pub fn input_dim(&self) -> usize {
        self.input_dims[0] * self.input_dims[1]
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    /// Largest entry of `|sum_k K^dagger K - I|`.
    pub fn completeness_error(&self) -> f64 {
        let n = self.input_dim();
        let mut s = DMatrix::<C64>::zeros(n, n);
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        (s - DMatrix::<C64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// For channels where every input basis state is sent by exactly one Kraus
    /// operator to a single output basis state, the map
    /// `input -> (kraus index, output, coefficient)`.
    pub fn classical_table(&self) -> Option<Vec<(usize, usize, C64)>> {
        let mut table = Vec::with_capacity(self.input_dim());
        for col in 0..self.input_dim() {
            let mut hit = None;
            for (ki, k) in self.kraus.iter().enumerate() {
                for row in 0..self.output_dim {
                    let v = k[(row, col)];
                    if v.norm() > 1e-14 {
                        if hit.is_some() {
                            return None;
                        }
                        hit = Some((ki, row, v));
                    }
                }
            }
            table.push(hit?);
        }
        Some(table)
    }
}

/// The network state before the nodes act: node-ordered with dims
/// `[dim A_0 * dim B_2, dim A_1 * dim B_0, dim A_2 * dim B_1]`.
pub fn network_state(sources: [&DenseState; 3]) -> Result<DenseState> {
    for s in sources {
        if s.dims().len() != 2 {
            return Err(Error::OutOfRange("each source must be a bipartite state".into()));
        }
    }
    let full = sources[0].kron(sources[1])?.kron(sources[2])?;
    full.permute_sites(&NODE_ORDER)?.group_sites(&[2, 2, 2])
}

fn check_wiring(channels: [&NodeChannel; 3], dims: [[usize; 2]; 3]) -> Result<()> {
    for k in 0..3 {
        let want = [dims[k][0], dims[(k + 2) % 3][1]];
        if channels[k].input_dims() != want {
            return Err(Error::DimensionMismatch {
                expected: want[0] * want[1],
                got: channels[k].input_dim(),
            });
        }
    }
    Ok(())
}

/// Output of the three channels applied to the pure network state, as
/// `sum |phi><phi|` over Kraus triples.
fn simulate_pure(channels: [&NodeChannel; 3], psi: &DenseState) -> Result<DenseOperator> {
    let out_dims = vec![channels[0].output_dim(), channels[1].output_dim(), channels[2].output_dim()];
    let n: usize = out_dims.iter().product();
    let mut rho = DMatrix::<C64>::zeros(n, n);
    for k0 in channels[0].kraus() {
        let s0 = psi.apply_local(0, k0)?;
        for k1 in channels[1].kraus() {
            let s1 = s0.apply_local(1, k1)?;
            for k2 in channels[2].kraus() {
                let v = s1.apply_local(2, k2)?.to_vector();
                rho += &v * v.adjoint();
            }
        }
    }
    DenseOperator::new(out_dims, rho)
}

/// Applies the three node channels to the product of three bipartite source
/// density operators. Mixed sources are handled through their eigen-ensembles.
pub fn simulate_triangle(channels: [&NodeChannel; 3], sources: [&DenseOperator; 3]) -> Result<DenseOperator> {
    let mut dims = [[0usize; 2]; 3];
    let mut ensembles = Vec::with_capacity(3);
    for (k, s) in sources.iter().enumerate() {
        if s.dims().len() != 2 {
            return Err(Error::OutOfRange("each source must be a bipartite operator".into()));
        }
        dims[k] = [s.dims()[0], s.dims()[1]];
        let (vals, vecs) = hermitian_eigen(s.matrix());
        let mut ens = Vec::new();
        for (i, &p) in vals.iter().enumerate() {
            if p > 1e-14 {
                let amps = vecs.column(i).iter().cloned().collect();
                ens.push((p, DenseState::new(s.dims().to_vec(), amps)?));
            } else if p < -1e-10 {
                return Err(Error::OutOfRange(format!("source {k} has negative eigenvalue {p:.3e}")));
            }
        }
        ensembles.push(ens);
    }
    check_wiring(channels, dims)?;
    let total: usize = dims.iter().flatten().product();
    if total > MAX_STATE_DIM {
        return Err(Error::DimensionTooLarge(total));
    }
    let mut acc: Option<DenseOperator> = None;
    for (p0, s0) in &ensembles[0] {
        for (p1, s1) in &ensembles[1] {
            for (p2, s2) in &ensembles[2] {
                let psi = network_state([s0, s1, s2])?;
                let rho = simulate_pure(channels, &psi)?.scale(p0 * p1 * p2);
                acc = Some(match acc {
                    None => rho,
                    Some(a) => DenseOperator::new(a.dims().to_vec(), a.matrix() + rho.matrix())?,
                });
            }
        }
    }
    acc.ok_or_else(|| Error::OutOfRange("sources have zero trace".into()))
}

/// [`simulate_triangle`] for pure sources.
pub fn simulate_triangle_pure(channels: [&NodeChannel; 3], sources: [&DenseState; 3]) -> Result<DenseOperator> {
    let psi = network_state(sources)?;
    let dims = [0, 1, 2].map(|k| [sources[k].dims()[0], sources[k].dims()[1]]);
    check_wiring(channels, dims)?;
    simulate_pure(channels, &psi)
}

/// A pure network state kept as its nonzero amplitudes, indexed by the
/// node-local basis labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseNetworkState {
    pub node_dims: [usize; 3],
    pub terms: Vec<([usize; 3], C64)>,
}

impl SparseNetworkState {
    /// Sources `sum_j c^k_j |j j>` with real Schmidt coefficients.
    pub fn from_schmidt(coeffs: [&[f64]; 3]) -> Self {
        let t = coeffs.map(|v| v.len());
        let mut terms = Vec::new();
        for (j0, &a) in coeffs[0].iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j1, &b) in coeffs[1].iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                for (j2, &g) in coeffs[2].iter().enumerate() {
                    if g == 0.0 {
                        continue;
                    }
                    let x = [j0 * t[2] + j2, j1 * t[0] + j0, j2 * t[1] + j1];
                    terms.push((x, c(a * b * g, 0.0)));
                }
            }
        }
        Self { node_dims: [t[0] * t[2], t[1] * t[0], t[2] * t[1]], terms }
    }

    pub fn from_dense(psi: &DenseState) -> Result<Self> {
        if psi.dims().len() != 3 {
            return Err(Error::OutOfRange("expected a three-node state".into()));
        }
        let node_dims = [psi.dims()[0], psi.dims()[1], psi.dims()[2]];
        let terms = psi
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(i, &a)| {
                let x = unravel(i, &node_dims);
                ([x[0], x[1], x[2]], a)
            })
            .collect();
        Ok(Self { node_dims, terms })
    }

    pub fn from_sources(sources: [&DenseState; 3]) -> Result<Self> {
        Self::from_dense(&network_state(sources)?)
    }
}

fn classical_tables(channels: [&NodeChannel; 3], node_dims: [usize; 3]) -> Result<[Vec<(usize, usize, C64)>; 3]> {
    let mut out: [Vec<(usize, usize, C64)>; 3] = Default::default();
    for k in 0..3 {
        if channels[k].input_dim() != node_dims[k] {
            return Err(Error::DimensionMismatch { expected: node_dims[k], got: channels[k].input_dim() });
        }
        out[k] = channels[k]
            .classical_table()
            .ok_or_else(|| Error::OutOfRange(format!("channel {k} is not a classical relabelling")))?;
    }
    Ok(out)
}

/// Output state for channels with a [`NodeChannel::classical_table`], built
/// from the nonzero amplitudes only.
pub fn simulate_classical(channels: [&NodeChannel; 3], state: &SparseNetworkState) -> Result<DenseOperator> {
    let tables = classical_tables(channels, state.node_dims)?;
    let out_dims = [channels[0].output_dim(), channels[1].output_dim(), channels[2].output_dim()];
    let n: usize = out_dims.iter().product();
    let mut branches: HashMap<[usize; 3], Vec<C64>> = HashMap::new();
    for (x, amp) in &state.terms {
        let (k0, o0, c0) = tables[0][x[0]];
        let (k1, o1, c1) = tables[1][x[1]];
        let (k2, o2, c2) = tables[2][x[2]];
        let v = branches.entry([k0, k1, k2]).or_insert_with(|| vec![C64::default(); n]);
        v[ravel(&[o0, o1, o2], &out_dims)] += c0 * c1 * c2 * amp;
    }
    let mut keys: Vec<_> = branches.keys().copied().collect();
    keys.sort_unstable();
    let mut rho = DMatrix::<C64>::zeros(n, n);
    for key in keys {
        let v = nalgebra::DVector::from_column_slice(&branches[&key]);
        rho += &v * v.adjoint();
    }
    DenseOperator::new(out_dims.to_vec(), rho)
}

/// GHZ fidelity of the output of classical channels, without forming the
/// output density operator.
pub fn ghz_fidelity_classical(channels: [&NodeChannel; 3], state: &SparseNetworkState) -> Result<f64> {
    let tables = classical_tables(channels, state.node_dims)?;
    let d = channels[0].output_dim();
    if channels[1].output_dim() != d || channels[2].output_dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: channels[1].output_dim().max(channels[2].output_dim()) });
    }
    let mut branches: HashMap<[usize; 3], C64> = HashMap::new();
    for (x, amp) in &state.terms {
        let (k0, o0, c0) = tables[0][x[0]];
        let (k1, o1, c1) = tables[1][x[1]];
        let (k2, o2, c2) = tables[2][x[2]];
        if o0 == o1 && o1 == o2 {
            *branches.entry([k0, k1, k2]).or_default() += c0 * c1 * c2 * amp;
        }
    }
    let mut keys: Vec<_> = branches.keys().copied().collect();
    keys.sort_unstable();
    Ok(keys.iter().map(|k| branches[k].norm_sqr()).sum::<f64>() / d as f64)
}

/// `sum_j c_j |j j>` on `t x t`.
pub fn schmidt_state(coeffs: &[f64]) -> Result<DenseState> {
    let t = coeffs.len();
    let mut amps = vec![C64::default(); t * t];
    for (j, &v) in coeffs.iter().enumerate() {
        amps[j * t + j] = c(v, 0.0);
    }
    DenseState::new(vec![t, t], amps)
}

/// The identity channel on two qubits (output dimension 4).
pub fn identity_channel(dims: [usize; 2]) -> Result<NodeChannel> {
    let n = dims[0] * dims[1];
    NodeChannel::unitary(DMatrix::identity(n, n), dims)
}
