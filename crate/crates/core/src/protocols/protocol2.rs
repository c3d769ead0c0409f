//! Qutrit-target protocol: each source sends `k` qubit pairs; every node sifts
//! its incoming pairs for the first one that is not `|00>` and encodes it into
//! a qutrit with a node-dependent cyclic shift.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::triangle::{ghz_fidelity_classical, simulate_classical, NodeChannel, SparseNetworkState};
use super::{ProtocolResult, Witness};
use crate::dense::{c, DenseState, C64};
use crate::error::{Error, Result};
use crate::optimize::{multistart, AscentConfig, Objective, SphereProduct, DEFAULT_RESTARTS};

/// Largest number of pairs per source.
pub const MAX_K: usize = 3;

/// How the source states are parameterized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SourceModel {
    /// One joint state per source over all `k` pairs, `sum_j c_j |j>|j>` with
    /// real `c_j` and `j` running over `k`-bit strings.
    #[default]
    Schmidt,
    /// A general two-qubit state, repeated on every pair of a source.
    IdenticalPairs,
    /// An independent general two-qubit state for every pair.
    FreePairs,
}

impl std::str::FromStr for SourceModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "schmidt" => Ok(Self::Schmidt),
            "identical-pairs" => Ok(Self::IdenticalPairs),
            "free-pairs" => Ok(Self::FreePairs),
            _ => Err(Error::Parse(format!("unknown source model {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Protocol2Config {
    pub k: usize,
    pub model: SourceModel,
    /// Cyclic shift used by node `j`.
    pub shifts: [usize; 3],
    /// Sources fixed to a maximally entangled state.
    pub pinned: [bool; 3],
    pub restarts: usize,
    pub seed: u64,
}

impl Default for Protocol2Config {
    fn default() -> Self {
        Self {
            k: MAX_K,
            model: SourceModel::Schmidt,
            shifts: [0, 1, 2],
            pinned: [false; 3],
            restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if !(1..=MAX_K).contains(&k) {
        return Err(Error::OutOfRange(format!("k = {k} not in [1, {MAX_K}]")));
    }
    Ok(())
}

/// Encoding of a non-`|00>` pair `2a + b`: `01 -> 0`, `11 -> 1`, `10 -> 2`, then shifted.
fn encode(pair: usize, shift: usize) -> usize {
    let base = match pair {
        1 => 0,
        3 => 1,
        2 => 2,
        _ => unreachable!("pair 00 is never encoded"),
    };
    (base + shift) % 3
}

/// Kraus label and qutrit output of one node for a basis input. The input is
/// `(a, b)` with `a` the `k` bits arriving from one source and `b` the `k`
/// bits from the other, pair 0 in the most significant bit.
fn sift(a: usize, b: usize, k: usize, shift: usize) -> (usize, usize) {
    // labels: for stop layer m < k, one label per assignment of the later
    // pairs (4^(k-1-m) of them), listed by increasing m; then the all-00 label
    let mut offset = 0;
    for m in 0..k {
        let bit = k - 1 - m;
        let pair = 2 * ((a >> bit) & 1) + ((b >> bit) & 1);
        if pair != 0 {
            let mask = (1 << bit) - 1;
            let rest = ((a & mask) << bit) | (b & mask);
            return (offset + rest, encode(pair, shift));
        }
        offset += 1 << (2 * bit);
    }
    (offset, 0)
}

fn label_count(k: usize) -> usize {
    (0..k).map(|m| 1usize << (2 * (k - 1 - m))).sum::<usize>() + 1
}

/// The sift-and-encode channel of node `j` on `2k` qubits.
pub fn protocol2_channel(shift: usize, k: usize) -> Result<NodeChannel> {
    check_k(k)?;
    if shift > 2 {
        return Err(Error::OutOfRange(format!("node shift {shift} not in {{0, 1, 2}}")));
    }
    let side = 1 << k;
    let mut kraus = vec![DMatrix::<C64>::zeros(3, side * side); label_count(k)];
    for a in 0..side {
        for b in 0..side {
            let (label, out) = sift(a, b, k, shift);
            kraus[label][(out, a * side + b)] = c(1.0, 0.0);
        }
    }
    NodeChannel::new(kraus, [side, side])
}

/// Product of per-pair two-qubit states, regrouped as (A bits, B bits).
pub fn pair_product_source(pairs: &[DenseState]) -> Result<DenseState> {
    let k = pairs.len();
    if k == 0 {
        return Err(Error::OutOfRange("at least one pair".into()));
    }
    let side = 1 << k;
    let mut amps = vec![C64::default(); side * side];
    for a in 0..side {
        for b in 0..side {
            let mut v = c(1.0, 0.0);
            for (l, p) in pairs.iter().enumerate() {
                if p.dim() != 4 {
                    return Err(Error::DimensionMismatch { expected: 4, got: p.dim() });
                }
                let bit = k - 1 - l;
                v *= p.amplitudes()[2 * ((a >> bit) & 1) + ((b >> bit) & 1)];
            }
            amps[a * side + b] = v;
        }
    }
    DenseState::new(vec![side, side], amps)
}

/// GHZ_3 fidelity for Schmidt-form sources; `coeffs[s]` has length `2^k`.
pub fn protocol2_fidelity_schmidt(k: usize, shifts: [usize; 3], coeffs: [&[f64]; 3]) -> Result<f64> {
    let obj = SchmidtObjective::new(k, shifts, [false; 3])?;
    for v in coeffs {
        if v.len() != 1 << k {
            return Err(Error::DimensionMismatch { expected: 1 << k, got: v.len() });
        }
    }
    let x: Vec<f64> = coeffs.iter().flat_map(|v| v.iter().copied()).collect();
    Ok(obj.value(&x))
}

/// GHZ_3 fidelity for arbitrary pure sources on `2^k x 2^k`.
pub fn protocol2_fidelity_sources(k: usize, shifts: [usize; 3], sources: [&DenseState; 3]) -> Result<f64> {
    let ch = channels(k, shifts)?;
    ghz_fidelity_classical([&ch[0], &ch[1], &ch[2]], &SparseNetworkState::from_sources(sources)?)
}

fn channels(k: usize, shifts: [usize; 3]) -> Result<[NodeChannel; 3]> {
    Ok([
        protocol2_channel(shifts[0], k)?,
        protocol2_channel(shifts[1], k)?,
        protocol2_channel(shifts[2], k)?,
    ])
}

/// Fidelity as a sum of squares over Kraus triples, with the index structure
/// precomputed once: `F = 1/3 sum_slot (sum_{(j0,j1,j2) in slot} c0 c1 c2)^2`.
struct SchmidtObjective {
    side: usize,
    slots: usize,
    terms: Vec<(usize, [usize; 3])>,
    pinned: [bool; 3],
}

impl SchmidtObjective {
    fn new(k: usize, shifts: [usize; 3], pinned: [bool; 3]) -> Result<Self> {
        check_k(k)?;
        let side = 1 << k;
        let mut slot_of: HashMap<[usize; 3], usize> = HashMap::new();
        let mut terms = Vec::new();
        for j0 in 0..side {
            for j1 in 0..side {
                for j2 in 0..side {
                    // node 0 holds (A0, B2), node 1 (A1, B0), node 2 (A2, B1)
                    let (l0, o0) = sift(j0, j2, k, shifts[0]);
                    let (l1, o1) = sift(j1, j0, k, shifts[1]);
                    let (l2, o2) = sift(j2, j1, k, shifts[2]);
                    if o0 == o1 && o1 == o2 {
                        let next = slot_of.len();
                        let slot = *slot_of.entry([l0, l1, l2]).or_insert(next);
                        terms.push((slot, [j0, j1, j2]));
                    }
                }
            }
        }
        Ok(Self { side, slots: slot_of.len(), terms, pinned })
    }

    fn coeffs<'a>(&self, x: &'a [f64], uniform: &'a [f64]) -> [&'a [f64]; 3] {
        let n = self.side;
        [0, 1, 2].map(|s| if self.pinned[s] { uniform } else { &x[s * n..(s + 1) * n] })
    }

    fn sums(&self, cs: [&[f64]; 3]) -> Vec<f64> {
        let mut acc = vec![0.0; self.slots];
        for &(slot, [j0, j1, j2]) in &self.terms {
            acc[slot] += cs[0][j0] * cs[1][j1] * cs[2][j2];
        }
        acc
    }
}

impl Objective for SchmidtObjective {
    fn value(&self, x: &[f64]) -> f64 {
        let uniform = vec![(self.side as f64).sqrt().recip(); self.side];
        self.sums(self.coeffs(x, &uniform)).iter().map(|s| s * s).sum::<f64>() / 3.0
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let uniform = vec![(self.side as f64).sqrt().recip(); self.side];
        let cs = self.coeffs(x, &uniform);
        let sums = self.sums(cs);
        let n = self.side;
        grad.iter_mut().for_each(|g| *g = 0.0);
        for &(slot, [j0, j1, j2]) in &self.terms {
            let w = 2.0 * sums[slot] / 3.0;
            grad[j0] += w * cs[1][j1] * cs[2][j2];
            grad[n + j1] += w * cs[0][j0] * cs[2][j2];
            grad[2 * n + j2] += w * cs[0][j0] * cs[1][j1];
        }
        for s in 0..3 {
            if self.pinned[s] {
                grad[s * n..(s + 1) * n].iter_mut().for_each(|g| *g = 0.0);
            }
        }
    }
}

/// Sources built from two-qubit pair states, optimized through the generic
/// classical-channel path with numerical gradients.
struct PairObjective {
    k: usize,
    free: bool,
    pinned: [bool; 3],
    channels: [NodeChannel; 3],
}

impl PairObjective {
    fn pairs_per_source(&self) -> usize {
        if self.free { self.k } else { 1 }
    }

    fn sources(&self, x: &[f64]) -> Vec<DenseState> {
        let per = self.pairs_per_source();
        let bell = [0.5f64.sqrt(), 0.0, 0.0, 0.5f64.sqrt()];
        (0..3)
            .map(|s| {
                let pairs: Vec<DenseState> = (0..self.k)
                    .map(|l| {
                        let amps: Vec<C64> = if self.pinned[s] {
                            bell.iter().map(|&v| c(v, 0.0)).collect()
                        } else {
                            let at = 8 * (s * per + if self.free { l } else { 0 });
                            (0..4).map(|i| c(x[at + i], x[at + 4 + i])).collect()
                        };
                        DenseState::new(vec![2, 2], amps).expect("two-qubit state")
                    })
                    .collect();
                pair_product_source(&pairs).expect("valid pair states")
            })
            .collect()
    }
}

impl Objective for PairObjective {
    fn value(&self, x: &[f64]) -> f64 {
        let s = self.sources(x);
        let state = SparseNetworkState::from_sources([&s[0], &s[1], &s[2]]).expect("matching source shapes");
        let ch = &self.channels;
        ghz_fidelity_classical([&ch[0], &ch[1], &ch[2]], &state).expect("classical channels")
    }
}

fn to_pairs(v: &[f64]) -> Vec<[f64; 2]> {
    v.chunks(8).flat_map(|b| (0..4).map(move |i| [b[i], b[4 + i]])).collect()
}

pub fn protocol2_optimize(cfg: &Protocol2Config) -> Result<ProtocolResult> {
    check_k(cfg.k)?;
    let chans = channels(cfg.k, cfg.shifts)?;
    let ascent = AscentConfig::default();
    let (fid, sources_report, state) = match cfg.model {
        SourceModel::Schmidt => {
            let obj = SchmidtObjective::new(cfg.k, cfg.shifts, cfg.pinned)?;
            let space = SphereProduct::new(vec![obj.side; 3], false);
            let (best, _) = multistart(&obj, &space, cfg.restarts, cfg.seed, &ascent);
            let uniform = vec![(obj.side as f64).sqrt().recip(); obj.side];
            let cs = obj.coeffs(&best.x, &uniform);
            let report = cs.iter().map(|v| v.iter().map(|&r| [r, 0.0]).collect()).collect();
            (best.value, report, SparseNetworkState::from_schmidt(cs))
        }
        SourceModel::IdenticalPairs | SourceModel::FreePairs => {
            let obj = PairObjective {
                k: cfg.k,
                free: cfg.model == SourceModel::FreePairs,
                pinned: cfg.pinned,
                channels: chans.clone(),
            };
            let per = obj.pairs_per_source();
            let space = SphereProduct::new(vec![8; 3 * per], false);
            let (best, _) = multistart(&obj, &space, cfg.restarts, cfg.seed, &ascent);
            let s = obj.sources(&best.x);
            let report = (0..3).map(|i| to_pairs(&best.x[8 * per * i..8 * per * (i + 1)])).collect();
            (best.value, report, SparseNetworkState::from_sources([&s[0], &s[1], &s[2]])?)
        }
    };
    let rho = simulate_classical([&chans[0], &chans[1], &chans[2]], &state)?;
    let witness = Witness::Protocol2 { k: cfg.k, model: cfg.model, shifts: cfg.shifts, sources: sources_report };
    Ok(ProtocolResult::new("p2", 3, fid, witness, rho).with_search(cfg.seed, cfg.restarts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::fidelity;
    use crate::protocols::triangle::{schmidt_state, simulate_triangle_pure};
    use crate::qudit::ghz_state;

    #[test]
    fn channel_shapes() {
        let ch = protocol2_channel(0, 1).unwrap();
        assert_eq!(ch.kraus().len(), 2);
        assert!(ch.completeness_error() < 1e-12);
        for k in 1..=3 {
            for j in 0..3 {
                let ch = protocol2_channel(j, k).unwrap();
                assert_eq!(ch.kraus().len(), label_count(k));
                assert!(ch.completeness_error() < 1e-12);
            }
        }
        assert!(protocol2_channel(3, 1).is_err());
        assert!(protocol2_channel(0, 4).is_err());
    }

    #[test]
    fn single_pair_encoding() {
        // input |01> on node 0 -> |0>
        let ch = protocol2_channel(0, 1).unwrap();
        let table = ch.classical_table().unwrap();
        assert_eq!(table[1].1, 0);
        assert_eq!(table[3].1, 1);
        assert_eq!(table[2].1, 2);
        assert_eq!(table[0].1, 0);
        let shifted = protocol2_channel(2, 1).unwrap().classical_table().unwrap();
        assert_eq!(shifted[1].1, 2);
    }

    #[test]
    fn all_zero_pairs_output_zero() {
        let ch = protocol2_channel(1, 2).unwrap();
        let input = DenseState::basis(vec![16], &[0]).unwrap();
        let mut total = 0.0;
        for k in ch.kraus() {
            let out = input.apply_local(0, k).unwrap();
            total += out.amplitudes()[0].norm_sqr();
        }
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_sources_give_one_third() {
        for k in 1..=3 {
            let mut e = vec![0.0; 1 << k];
            e[0] = 1.0;
            let f = protocol2_fidelity_schmidt(k, [0, 1, 2], [&e, &e, &e]).unwrap();
            assert!((f - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn schmidt_fast_path_matches_dense_kraus() {
        let k = 2;
        let cs = [
            vec![0.36, -0.49, -0.47, 0.64],
            vec![0.5, 0.5, -0.5, 0.5],
            vec![0.1, 0.7, 0.1, 0.7],
        ];
        let cs: Vec<Vec<f64>> = cs
            .into_iter()
            .map(|v| {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / n).collect()
            })
            .collect();
        let fast = protocol2_fidelity_schmidt(k, [0, 1, 2], [&cs[0], &cs[1], &cs[2]]).unwrap();
        let srcs: Vec<DenseState> = cs.iter().map(|v| schmidt_state(v).unwrap()).collect();
        let ch = channels(k, [0, 1, 2]).unwrap();
        let rho = simulate_triangle_pure([&ch[0], &ch[1], &ch[2]], [&srcs[0], &srcs[1], &srcs[2]]).unwrap();
        let dense = fidelity(&ghz_state(3, 3).unwrap(), &rho).unwrap();
        assert!((fast - dense).abs() < 1e-12);
        let generic = protocol2_fidelity_sources(k, [0, 1, 2], [&srcs[0], &srcs[1], &srcs[2]]).unwrap();
        assert!((fast - generic).abs() < 1e-12);
    }

    #[test]
    fn schmidt_gradient_matches_differences() {
        let obj = SchmidtObjective::new(2, [0, 1, 2], [false, true, false]).unwrap();
        let x: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut g = vec![0.0; 12];
        let mut fd = vec![0.0; 12];
        obj.gradient(&x, &mut g);
        crate::optimize::finite_difference_gradient(|y| obj.value(y), &x, &mut fd);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-7);
        }
    }
}
