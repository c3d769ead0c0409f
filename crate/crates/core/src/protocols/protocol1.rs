//! Qubit-target protocol: measure pairs of `t`-level particles in two-dimensional
//! diagonal blocks and encode the block position into a qubit.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::triangle::{simulate_classical, NodeChannel, SparseNetworkState};
use super::{ProtocolResult, Witness};
use crate::dense::{c, C64};
use crate::error::{Error, Result};
use crate::optimize::{multistart, AscentConfig, Objective, SphereProduct};

/// Largest source dimension accepted by the optimizer.
pub const MAX_T: usize = 12;

/// Schmidt coefficients of the three sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceCoefficients {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl SourceCoefficients {
    /// Validates equal lengths, nonnegativity and unit norm (within `1e-9`).
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        let t = alpha.len();
        for v in [&beta, &gamma] {
            if v.len() != t {
                return Err(Error::DimensionMismatch { expected: t, got: v.len() });
            }
        }
        for v in [&alpha, &beta, &gamma] {
            if v.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                return Err(Error::OutOfRange("Schmidt coefficients must be finite and nonnegative".into()));
            }
            let n: f64 = v.iter().map(|x| x * x).sum();
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::OutOfRange(format!("coefficient vector has squared norm {n}")));
            }
        }
        if t == 0 {
            return Err(Error::OutOfRange("t must be at least 1".into()));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn uniform(t: usize) -> Result<Self> {
        let v = vec![(t as f64).sqrt().recip(); t];
        Self::new(v.clone(), v.clone(), v)
    }

    /// The same vector for all three sources.
    pub fn symmetric(v: Vec<f64>) -> Result<Self> {
        Self::new(v.clone(), v.clone(), v)
    }

    pub fn t(&self) -> usize {
        self.alpha.len()
    }

    fn from_flat(x: &[f64], t: usize) -> Self {
        Self { alpha: x[..t].to_vec(), beta: x[t..2 * t].to_vec(), gamma: x[2 * t..].to_vec() }
    }
}

fn in_m(a: usize, b: usize) -> bool {
    a.min(b).is_multiple_of(2)
}

/// Measurement blocks `{(a,b), (a+1,b+1)}` for `(a,b) in M`, with labels
/// `>= t` dropped.
pub fn measurement_blocks(t: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for a in 0..t {
        for b in 0..t {
            if in_m(a, b) {
                let mut block = vec![(a, b)];
                if a + 1 < t && b + 1 < t {
                    block.push((a + 1, b + 1));
                }
                out.push(block);
            }
        }
    }
    out
}

/// Triples `(a, b, c)` with `(a,b), (b,c), (c,a)` all in `M`.
pub fn admissible_triples(t: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..t {
        for b in 0..t {
            if !in_m(a, b) {
                continue;
            }
            for cc in 0..t {
                if in_m(b, cc) && in_m(cc, a) {
                    out.push([a, b, cc]);
                }
            }
        }
    }
    out
}

fn get(v: &[f64], i: usize) -> f64 {
    v.get(i).copied().unwrap_or(0.0)
}

fn block_sum(x: &SourceCoefficients, [a, b, cc]: [usize; 3]) -> f64 {
    (0..2).map(|s| get(&x.alpha, a + s) * get(&x.beta, b + s) * get(&x.gamma, cc + s)).sum()
}

/// `F_t = 1/2 sum_{(a,b),(b,c),(c,a) in M} (sum_s alpha_{a+s} beta_{b+s} gamma_{c+s})^2`.
pub fn protocol1_fidelity(coeffs: &SourceCoefficients) -> f64 {
    admissible_triples(coeffs.t())
        .into_iter()
        .map(|tr| block_sum(coeffs, tr).powi(2))
        .sum::<f64>()
        / 2.0
}

/// Measurement and encoding fused into one Kraus family: `E_ab = sum_s |s><a+s, b+s|`.
pub fn protocol1_channel(t: usize) -> Result<NodeChannel> {
    if t == 0 {
        return Err(Error::OutOfRange("t must be at least 1".into()));
    }
    let kraus = measurement_blocks(t)
        .into_iter()
        .map(|block| {
            let mut k = DMatrix::<C64>::zeros(2, t * t);
            for (s, (i, j)) in block.into_iter().enumerate() {
                k[(s, i * t + j)] = c(1.0, 0.0);
            }
            k
        })
        .collect();
    NodeChannel::new(kraus, [t, t])
}

/// Source order fed to the triangle so that node 0 measures `(alpha, beta)`,
/// node 1 `(gamma, alpha)` and node 2 `(beta, gamma)`.
pub fn triangle_sources(coeffs: &SourceCoefficients) -> [&[f64]; 3] {
    [&coeffs.alpha, &coeffs.gamma, &coeffs.beta]
}

/// Output state of the three nodes.
pub fn protocol1_output(coeffs: &SourceCoefficients) -> Result<crate::dense::DenseOperator> {
    let ch = protocol1_channel(coeffs.t())?;
    let state = SparseNetworkState::from_schmidt(triangle_sources(coeffs));
    simulate_classical([&ch, &ch, &ch], &state)
}

struct FtObjective {
    t: usize,
    triples: Vec<[usize; 3]>,
}

impl Objective for FtObjective {
    fn value(&self, x: &[f64]) -> f64 {
        let s = SourceCoefficients::from_flat(x, self.t);
        self.triples.iter().map(|&tr| block_sum(&s, tr).powi(2)).sum::<f64>() / 2.0
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let t = self.t;
        let s = SourceCoefficients::from_flat(x, t);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for &[a, b, cc] in &self.triples {
            let w = block_sum(&s, [a, b, cc]);
            for sg in 0..2 {
                let (i, j, k) = (a + sg, b + sg, cc + sg);
                if i >= t || j >= t || k >= t {
                    continue;
                }
                grad[i] += w * s.beta[j] * s.gamma[k];
                grad[t + j] += w * s.alpha[i] * s.gamma[k];
                grad[2 * t + k] += w * s.alpha[i] * s.beta[j];
            }
        }
    }
}

/// Maximizes `F_t` over nonnegative unit coefficient vectors.
pub fn protocol1_optimize(t: usize, restarts: usize, seed: u64) -> Result<ProtocolResult> {
    if !(2..=MAX_T).contains(&t) {
        return Err(Error::OutOfRange(format!("t = {t} not in [2, {MAX_T}]")));
    }
    let obj = FtObjective { t, triples: admissible_triples(t) };
    let space = SphereProduct::new(vec![t; 3], true);
    let (best, _) = multistart(&obj, &space, restarts, seed, &AscentConfig::default());
    let coeffs = SourceCoefficients::from_flat(&best.x, t);
    let fid = protocol1_fidelity(&coeffs);
    let rho = protocol1_output(&coeffs)?;
    Ok(ProtocolResult::new("p1", 2, fid, Witness::Schmidt(coeffs), rho).with_search(seed, restarts))
}

/// `F*_t` for each requested `t`.
pub fn f_star_series(ts: &[usize], restarts: usize, seed: u64) -> Result<Vec<(usize, f64)>> {
    ts.iter()
        .map(|&t| Ok((t, protocol1_optimize(t, restarts, seed)?.fidelity)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_tile_the_square() {
        for t in 1..=7 {
            let blocks = measurement_blocks(t);
            let mut seen = vec![false; t * t];
            for (a, b) in blocks.iter().flatten() {
                assert!(!seen[a * t + b]);
                seen[a * t + b] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
        let four = measurement_blocks(4);
        assert!(four.contains(&vec![(0, 3)]));
        assert_eq!(measurement_blocks(2), vec![vec![(0, 0), (1, 1)], vec![(0, 1)], vec![(1, 0)]]);
    }

    #[test]
    fn product_sources_give_one_half() {
        let s = SourceCoefficients::new(vec![1.0], vec![1.0], vec![1.0]).unwrap();
        assert!((protocol1_fidelity(&s) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(SourceCoefficients::new(vec![1.0, 0.0], vec![1.0], vec![1.0]).is_err());
        assert!(SourceCoefficients::new(vec![0.6, 0.6], vec![1.0, 0.0], vec![1.0, 0.0]).is_err());
        assert!(SourceCoefficients::new(vec![-1.0], vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn channel_is_trace_preserving() {
        for t in 1..=6 {
            assert!(protocol1_channel(t).unwrap().completeness_error() < 1e-12);
        }
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let t = 4;
        let obj = FtObjective { t, triples: admissible_triples(t) };
        let x: Vec<f64> = (0..3 * t).map(|i| 0.1 + 0.07 * i as f64).collect();
        let mut g = vec![0.0; 3 * t];
        let mut fd = vec![0.0; 3 * t];
        obj.gradient(&x, &mut g);
        crate::optimize::finite_difference_gradient(|y| obj.value(y), &x, &mut fd);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-7);
        }
    }
}
