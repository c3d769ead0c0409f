//! Closed-form fidelity thresholds for graph states against networks with
//! bipartite sources.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::check_prime_modulus;
use crate::graph::Multigraph;
use crate::standard_form::{standardize, standardize_exhaustive, DEFAULT_ORBIT_CAP};

fn check_args(d: u64, beta: u64) -> Result<()> {
    check_prime_modulus(d)?;
    if beta == 0 || beta.is_multiple_of(2) {
        return Err(Error::OutOfRange(format!("beta must be odd and positive, got {beta}")));
    }
    Ok(())
}

/// Fidelity threshold above which a graph state with index `beta` cannot be
/// prepared in a network with bipartite sources:
/// `(1 + 2 sqrt(2 beta d) + (beta+1) d) / ((beta+2) d + 2 sqrt(2 beta d))`.
pub fn ub2(d: u64, beta: u64) -> Result<f64> {
    check_args(d, beta)?;
    Ok(ub2_raw(d as f64, beta as f64))
}

fn ub2_raw(d: f64, beta: f64) -> f64 {
    let s = 2.0 * (2.0 * beta * d).sqrt();
    (1.0 + s + (beta + 1.0) * d) / ((beta + 2.0) * d + s)
}

/// The earlier bound `1 - (sqrt(beta^2 + 4 gamma) - beta)^2 / 16` with
/// `gamma = sqrt(d) / (sqrt(d) + 1)`.
pub fn ub1(d: u64, beta: u64) -> Result<f64> {
    check_args(d, beta)?;
    Ok(ub1_raw(d as f64, beta as f64))
}

fn ub1_raw(d: f64, beta: f64) -> f64 {
    let gamma = d.sqrt() / (d.sqrt() + 1.0);
    let s = (beta * beta + 4.0 * gamma).sqrt() - beta;
    1.0 - s * s / 16.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub d: u64,
    pub beta: u64,
    pub ub2: f64,
    pub ub1: f64,
    /// `1 - ub2 / ub1`.
    pub improvement: f64,
    /// `(1 - ub2) / (1 - ub1)`.
    pub gap_ratio: f64,
}

pub fn compare(d: u64, beta: u64) -> Result<BoundReport> {
    let (u2, u1) = (ub2(d, beta)?, ub1(d, beta)?);
    Ok(BoundReport {
        d,
        beta,
        ub2: u2,
        ub1: u1,
        improvement: 1.0 - u2 / u1,
        gap_ratio: (1.0 - u2) / (1.0 - u1),
    })
}

/// `lim_{d -> inf} (1 - ub2/ub1)` at `beta = 1`, i.e. `(4 - sqrt 5) / (3 sqrt 5)`.
pub fn asymptotic_improvement() -> f64 {
    let s5 = 5f64.sqrt();
    (4.0 - s5) / (3.0 * s5)
}

/// How the index of a graph is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaMode {
    /// The deterministic standardization run.
    #[default]
    Deterministic,
    /// Minimum over the whole LC orbit (small graphs only).
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphBoundReport {
    /// 1-based designated pair of the standard form used.
    pub pair: (usize, usize),
    pub minimal: bool,
    #[serde(flatten)]
    pub report: BoundReport,
}

pub fn bound_for_graph(g: &Multigraph, mode: BetaMode) -> Result<GraphBoundReport> {
    let sf = match mode {
        BetaMode::Deterministic => standardize(g)?,
        BetaMode::Exhaustive => standardize_exhaustive(g, DEFAULT_ORBIT_CAP)?,
    };
    Ok(GraphBoundReport {
        pair: (sf.pair.0 + 1, sf.pair.1 + 1),
        minimal: sf.minimal,
        report: compare(g.d(), sf.beta as u64)?,
    })
}

/// One row per `(d, beta)` with columns `d,beta,ub1,ub2`.
pub fn sweep_rows(primes: &[u64], betas: &[u64]) -> Result<Vec<BoundReport>> {
    let mut rows = Vec::with_capacity(primes.len() * betas.len());
    for &beta in betas {
        for &d in primes {
            rows.push(compare(d, beta)?);
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[BoundReport], precision: usize) -> String {
    let mut out = String::from("d,beta,ub1,ub2\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.d,
            r.beta,
            crate::fmt_sig(r.ub1, precision),
            crate::fmt_sig(r.ub2, precision)
        )
        .expect("writing to a String");
    }
    out
}
