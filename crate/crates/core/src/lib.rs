//! Graph states over prime-dimensional qudits, the fidelity limits that
//! bipartite-source networks impose on them, and explicit triangle-network
//! protocols that beat the GME threshold.
//!
//! The crate is organized by capability:
//!
//! * [`graph`] and [`standard_form`]: multigraphs over `F_d`, local
//!   complementation and the standard form that exposes the index `beta`.
//! * [`qudit`]: generalized Pauli strings, stabilizer generators, graph and GHZ states.
//! * [`uncertainty`]: the fine-grained uncertainty relation for two projections.
//! * [`bounds`]: the two fidelity upper bounds for graph states in networks.
//! * [`protocols`]: triangle-network simulation and the three preparation protocols.
//! * [`bell`]: tripartite correlation inequalities and see-saw maximization.
//! * [`dense`] and [`optimize`]: the linear-algebra and search utilities underneath.

pub mod bell;
pub mod bounds;
pub mod cli;
pub mod dense;
pub mod error;
pub mod field;
pub mod graph;
pub mod optimize;
pub mod protocols;
pub mod qudit;
pub mod standard_form;
pub mod uncertainty;

pub use error::{Error, Result};
pub use graph::Multigraph;

/// Formats `x` with `precision` significant digits, dropping trailing zeros.
pub fn fmt_sig(x: f64, precision: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let p = precision.max(1);
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (p as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_sig;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.5479001, 6), "0.5479");
        assert_eq!(fmt_sig(2.0 / 3.0, 6), "0.666667");
        assert_eq!(fmt_sig(1234.5678, 6), "1234.57");
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(-0.000123456789, 3), "-0.000123");
    }
}
