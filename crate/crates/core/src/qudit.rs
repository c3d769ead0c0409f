//! Generalized Pauli operators, Pauli strings, graph states and GHZ states.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dense::{c, unravel, DenseOperator, DenseState, C64, MAX_STATE_DIM};
use crate::error::{Error, Result};
use crate::field::{check_prime_modulus, mul_mod};
use crate::graph::Multigraph;

/// `e^{i pi m / d}`; `omega^m` is `tau(2m, d)`.
fn tau(m: u64, d: u64) -> C64 {
    let m = m % (2 * d);
    C64::from_polar(1.0, PI * m as f64 / d as f64)
}

fn omega(m: u64, d: u64) -> C64 {
    tau(2 * (m % d), d)
}

/// Cyclic shift `X = sum_i |i+1><i|`.
pub fn pauli_x(d: usize) -> DenseOperator {
    let m = DMatrix::from_fn(d, d, |r, col| if r == (col + 1) % d { c(1.0, 0.0) } else { c(0.0, 0.0) });
    DenseOperator::new(vec![d], m).expect("valid single-site operator")
}

/// Clock `Z = sum_i omega^i |i><i|`.
pub fn pauli_z(d: usize) -> DenseOperator {
    let m = DMatrix::from_fn(d, d, |r, col| if r == col { omega(r as u64, d as u64) } else { c(0.0, 0.0) });
    DenseOperator::new(vec![d], m).expect("valid single-site operator")
}

/// `tau^phase * prod_i X_i^{x_i} Z_i^{z_i}` with `tau = e^{i pi / d}`.
///
/// Storing the phase as a power of `tau` rather than `omega` lets qubit
/// strings such as `i X Z` be represented exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    d: u64,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u64,
}

impl PauliString {
    pub fn new(d: u64, x: Vec<u64>, z: Vec<u64>, phase: u64) -> Result<Self> {
        check_prime_modulus(d)?;
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: z.len() });
        }
        Ok(Self {
            x: x.into_iter().map(|v| v % d).collect(),
            z: z.into_iter().map(|v| v % d).collect(),
            phase: phase % (2 * d),
            d,
        })
    }

    pub fn identity(d: u64, n: usize) -> Result<Self> {
        Self::new(d, vec![0; n], vec![0; n], 0)
    }

    /// The stabilizer generator `g_i = X_i prod_j Z_j^{G_ij}` of a graph state.
    pub fn graph_generator(g: &Multigraph, i: usize) -> Result<Self> {
        g.check_vertex(i)?;
        let mut x = vec![0; g.n()];
        x[i] = 1;
        Self::new(g.d(), x, g.row(i).to_vec(), 0)
    }

    /// All generators of the graph's stabilizer group.
    pub fn graph_generators(g: &Multigraph) -> Vec<Self> {
        (0..g.n()).map(|i| Self::graph_generator(g, i).expect("vertex in range")).collect()
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[u64] {
        &self.x
    }

    pub fn z(&self) -> &[u64] {
        &self.z
    }

    /// Phase exponent of `tau = e^{i pi/d}`, in `[0, 2d)`.
    pub fn phase(&self) -> u64 {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&v| v == 0) && self.phase == 0
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::ModulusMismatch(self.d, other.d));
        }
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: other.n() });
        }
        Ok(())
    }

    fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        a.iter().zip(b).fold(0, |acc, (&u, &v)| (acc + mul_mod(u, v, self.d)) % self.d)
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let d = self.d;
        let cross = self.dot(&self.z, &other.x);
        Ok(Self {
            d,
            x: self.x.iter().zip(&other.x).map(|(a, b)| (a + b) % d).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| (a + b) % d).collect(),
            phase: (self.phase + other.phase + 2 * cross) % (2 * d),
        })
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::identity(self.d, self.n()).expect("modulus already checked");
        for _ in 0..k {
            acc = acc.mul(self).expect("same shape");
        }
        acc
    }

    /// Commutation exponent: `self * other = omega^eta * other * self`.
    pub fn eta(&self, other: &Self) -> Result<u64> {
        self.check_compatible(other)?;
        let a = self.dot(&self.z, &other.x);
        let b = self.dot(&other.z, &self.x);
        Ok((a + self.d - b) % self.d)
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        Ok(self.eta(other)? == 0)
    }

    /// `g^d` is always a phase; returns its `tau` exponent.
    pub fn order_phase(&self) -> u64 {
        self.pow(self.d).phase
    }

    fn check_order(&self) -> Result<()> {
        match self.order_phase() {
            0 => Ok(()),
            r => Err(Error::PhaseConvention(r)),
        }
    }

    fn dims(&self) -> Vec<usize> {
        vec![self.d as usize; self.n()]
    }

    fn check_state_size(&self) -> Result<usize> {
        let total = (self.d as usize)
            .checked_pow(self.n() as u32)
            .filter(|&t| t <= MAX_STATE_DIM)
            .ok_or(Error::DimensionTooLarge(usize::MAX))?;
        Ok(total)
    }

    /// Monomial action on the computational basis: `g|k> = coeff |target>`.
    fn action(&self, index: usize) -> (usize, C64) {
        let d = self.d as usize;
        let digits = unravel(index, &self.dims());
        let zk = digits
            .iter()
            .zip(&self.z)
            .fold(0u64, |acc, (&k, &z)| (acc + mul_mod(k as u64, z, self.d)) % self.d);
        let target = digits
            .iter()
            .zip(&self.x)
            .fold(0usize, |acc, (&k, &x)| acc * d + (k + x as usize) % d);
        (target, tau(self.phase + 2 * zk, self.d))
    }

    pub fn apply(&self, psi: &DenseState) -> Result<DenseState> {
        self.check_state_size()?;
        if psi.dims() != self.dims().as_slice() {
            return Err(Error::DimensionMismatch { expected: self.check_state_size()?, got: psi.dim() });
        }
        let mut out = vec![C64::default(); psi.dim()];
        for (i, &a) in psi.amplitudes().iter().enumerate() {
            if a == C64::default() {
                continue;
            }
            let (t, coeff) = self.action(i);
            out[t] += coeff * a;
        }
        DenseState::new(psi.dims().to_vec(), out)
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        let n = self.check_state_size()?;
        let mut m = DMatrix::<C64>::zeros(n, n);
        for col in 0..n {
            let (row, coeff) = self.action(col);
            m[(row, col)] = coeff;
        }
        DenseOperator::new(self.dims(), m)
    }

    /// `[g] = (1/d) sum_k g^k`, the projector onto the +1 eigenspace.
    pub fn eigenspace_projector(&self) -> Result<DenseOperator> {
        self.check_order()?;
        let n = self.check_state_size()?;
        let mut m = DMatrix::<C64>::zeros(n, n);
        let mut power = Self::identity(self.d, self.n())?;
        for _ in 0..self.d {
            for col in 0..n {
                let (row, coeff) = power.action(col);
                m[(row, col)] += coeff;
            }
            power = power.mul(self)?;
        }
        DenseOperator::new(self.dims(), m.unscale(self.d as f64))
    }

    /// `[g] |psi>` without building a matrix.
    pub fn project(&self, psi: &DenseState) -> Result<DenseState> {
        self.check_order()?;
        let mut acc = DenseState::zeros(psi.dims().to_vec())?;
        let mut cur = psi.clone();
        for _ in 0..self.d {
            for (a, b) in acc.amplitudes_mut().iter_mut().zip(cur.amplitudes()) {
                *a += b;
            }
            cur = self.apply(&cur)?;
        }
        let s = 1.0 / self.d as f64;
        acc.amplitudes_mut().iter_mut().for_each(|a| *a *= s);
        Ok(acc)
    }

    /// `Tr(rho [g])`, computed from the monomial action.
    pub fn expectation_projector(&self, rho: &DenseOperator) -> Result<f64> {
        self.check_order()?;
        let n = self.check_state_size()?;
        if rho.dims() != self.dims().as_slice() {
            return Err(Error::DimensionMismatch { expected: n, got: rho.dim() });
        }
        let m = rho.matrix();
        let mut acc = C64::default();
        let mut power = Self::identity(self.d, self.n())?;
        for _ in 0..self.d {
            for col in 0..n {
                let (row, coeff) = power.action(col);
                acc += coeff * m[(col, row)];
            }
            power = power.mul(self)?;
        }
        Ok(acc.re / self.d as f64)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tau^{}", self.phase)?;
        for (i, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            if *x != 0 {
                write!(f, " X{}^{}", i + 1, x)?;
            }
            if *z != 0 {
                write!(f, " Z{}^{}", i + 1, z)?;
            }
        }
        Ok(())
    }
}

/// The graph state `|G>`: amplitudes `d^{-n/2} omega^{sum_{i<j} G_ij k_i k_j}`.
pub fn graph_state(g: &Multigraph) -> Result<DenseState> {
    let d = g.d();
    let dims = vec![d as usize; g.n()];
    let mut psi = DenseState::zeros(dims.clone())?;
    let norm = (psi.dim() as f64).sqrt().recip();
    let edges = g.edges();
    for (idx, a) in psi.amplitudes_mut().iter_mut().enumerate() {
        let k = unravel(idx, &dims);
        let e = edges.iter().fold(0u64, |acc, &(i, j, m)| {
            (acc + mul_mod(m, mul_mod(k[i] as u64, k[j] as u64, d), d)) % d
        });
        *a = omega(e, d) * norm;
    }
    Ok(psi)
}

/// `sum_i |i>^{(x) parties} / sqrt(d)`.
pub fn ghz_state(d: usize, parties: usize) -> Result<DenseState> {
    let mut psi = DenseState::zeros(vec![d; parties])?;
    let amp = c((d as f64).sqrt().recip(), 0.0);
    for i in 0..d {
        let idx = (0..parties).fold(0, |acc, _| acc * d + i);
        psi.amplitudes_mut()[idx] = amp;
    }
    Ok(psi)
}
