//! Explicit triangle-network protocols that prepare states close to GHZ states.

pub mod protocol1;
pub mod protocol2;
pub mod protocol3;
pub mod triangle;

use serde::Serialize;

use crate::dense::{fidelity, DenseOperator};
use crate::error::Result;
use crate::qudit::ghz_state;

pub use protocol1::SourceCoefficients;
pub use protocol2::SourceModel;
pub use protocol3::Protocol3Method;

/// What produced a [`ProtocolResult`]: the optimized sources or the discrete
/// choices of a construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Schmidt(SourceCoefficients),
    Protocol2 {
        k: usize,
        model: SourceModel,
        shifts: [usize; 3],
        /// Per source, the amplitudes that were optimized, as `[re, im]`.
        sources: Vec<Vec<[f64; 2]>>,
    },
    Protocol3 {
        method: Protocol3Method,
        k: usize,
        x: Option<f64>,
        /// Labels of the `k^2`-dimensional party space that are folded away.
        dropped: Vec<usize>,
        /// Where the dropped labels are sent.
        target: Option<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub protocol: &'static str,
    /// Local dimension of the target GHZ state.
    pub d: usize,
    pub fidelity: f64,
    /// `fidelity > 1/d`, which certifies genuine multipartite entanglement.
    pub gme: bool,
    pub witness: Witness,
    pub rho_out: DenseOperator,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
}

impl ProtocolResult {
    pub(crate) fn new(protocol: &'static str, d: usize, fidelity: f64, witness: Witness, rho_out: DenseOperator) -> Self {
        Self {
            protocol,
            d,
            fidelity,
            gme: fidelity > 1.0 / d as f64,
            witness,
            rho_out,
            seed: None,
            restarts: None,
        }
    }

    pub(crate) fn with_search(mut self, seed: u64, restarts: usize) -> Self {
        self.seed = Some(seed);
        self.restarts = Some(restarts);
        self
    }

    /// GHZ fidelity recomputed from `rho_out`.
    pub fn ghz_fidelity_of_output(&self) -> Result<f64> {
        fidelity(&ghz_state(self.d, 3)?, &self.rho_out)
    }
}
