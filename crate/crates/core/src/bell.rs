//! Tripartite two-setting correlation Bell inequalities, their classical
//! bounds, and see-saw maximization of their quantum values.
//!
//! An inequality is a real tensor `coeffs[x][y][z]` over the correlators
//! `<A_x B_y C_z>`, where setting `0` stands for the identity (a marginal) and
//! settings `1, 2` are the two measurements of each party. Expressions use the
//! same labels, e.g. `2<C1> + <A1B2> - <A2B2C1>`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{c, haar_unitary, hermitian_eigen, DenseOperator, C64};
use crate::error::{Error, Result};
use crate::optimize::restart_rng;
use crate::protocols::protocol1::protocol1_optimize;

pub type CoefficientTensor = [[[f64; 3]; 3]; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellInequality {
    pub name: String,
    pub coeffs: CoefficientTensor,
    pub classical_bound: f64,
    /// Reference quantum value for three qubits.
    pub quantum_bound: f64,
}

impl BellInequality {
    pub fn new(name: &str, coeffs: CoefficientTensor, classical_bound: f64, quantum_bound: f64) -> Result<Self> {
        if coeffs.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("inequality {name} has non-finite coefficients")));
        }
        if coeffs[0][0][0] != 0.0 {
            return Err(Error::Parse(format!("inequality {name} has a constant term")));
        }
        Ok(Self { name: name.to_string(), coeffs, classical_bound, quantum_bound })
    }

    /// Parses a correlator expression.
    pub fn parse(name: &str, expr: &str, classical_bound: f64, quantum_bound: f64) -> Result<Self> {
        Self::new(name, parse_expression(expr)?, classical_bound, quantum_bound)
    }

    /// Nonzero coefficients with their `[x, y, z]` settings.
    pub fn terms(&self) -> Vec<([usize; 3], f64)> {
        let mut out = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    let v = self.coeffs[x][y][z];
                    if v != 0.0 {
                        out.push(([x, y, z], v));
                    }
                }
            }
        }
        out
    }

    /// `sum |coeffs|`, an upper bound on every value.
    pub fn algebraic_max(&self) -> f64 {
        self.coeffs.iter().flatten().flatten().map(|v| v.abs()).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().flatten().flatten().for_each(|v| *v *= s);
        out.classical_bound *= s;
        out.quantum_bound *= s;
        out
    }

    pub fn to_expression(&self) -> String {
        let mut s = String::new();
        for ([x, y, z], v) in self.terms() {
            let label: String = [('A', x), ('B', y), ('C', z)]
                .iter()
                .filter(|(_, k)| *k > 0)
                .map(|(p, k)| format!("{p}{k}"))
                .collect();
            let sign = if v < 0.0 { "-" } else if s.is_empty() { "" } else { "+" };
            let mag = v.abs();
            let num = if mag == 1.0 { String::new() } else { format!("{mag}") };
            if !s.is_empty() {
                s.push(' ');
            }
            let _ = write!(s, "{sign}{num}<{label}>");
        }
        s
    }
}

fn parse_expression(expr: &str) -> Result<CoefficientTensor> {
    let mut coeffs = [[[0.0; 3]; 3]; 3];
    let chars: Vec<char> = expr.chars().filter(|ch| !ch.is_whitespace()).collect();
    let mut i = 0;
    let err = |msg: &str, at: usize| Error::Parse(format!("{msg} at position {at} in {expr:?}"));
    if chars.is_empty() {
        return Err(err("empty expression", 0));
    }
    while i < chars.len() {
        let mut sign = 1.0;
        if chars[i] == '+' || chars[i] == '-' {
            if chars[i] == '-' {
                sign = -1.0;
            }
            i += 1;
        }
        let start = i;
        while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
            i += 1;
        }
        let weight: f64 = if i > start {
            chars[start..i].iter().collect::<String>().parse().map_err(|_| err("bad number", start))?
        } else {
            1.0
        };
        if i < chars.len() && chars[i] == '*' {
            i += 1;
        }
        if i >= chars.len() || !matches!(chars[i], '<' | '⟨') {
            return Err(err("expected '<'", i));
        }
        i += 1;
        let mut settings = [0usize; 3];
        let mut last_party = None;
        while i < chars.len() && !matches!(chars[i], '>' | '⟩') {
            let party = match chars[i] {
                'A' => 0,
                'B' => 1,
                'C' => 2,
                _ => return Err(err("expected party A, B or C", i)),
            };
            if last_party.is_some_and(|p| p >= party) {
                return Err(err("parties must appear once, in order A, B, C", i));
            }
            last_party = Some(party);
            let setting = match chars.get(i + 1) {
                Some('1') => 1,
                Some('2') => 2,
                _ => return Err(err("expected setting 1 or 2", i + 1)),
            };
            settings[party] = setting;
            i += 2;
        }
        if i >= chars.len() {
            return Err(err("unterminated correlator", i));
        }
        if last_party.is_none() {
            return Err(err("empty correlator", i));
        }
        i += 1;
        coeffs[settings[0]][settings[1]][settings[2]] += sign * weight;
    }
    Ok(coeffs)
}

/// Maximum over the 64 deterministic strategies.
pub fn classical_bound(ineq: &BellInequality) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let outcome = |bits: usize, setting: usize| -> f64 {
        match setting {
            0 => 1.0,
            s => {
                if bits >> (s - 1) & 1 == 0 { 1.0 } else { -1.0 }
            }
        }
    };
    let terms = ineq.terms();
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                let v: f64 = terms
                    .iter()
                    .map(|&([x, y, z], w)| w * outcome(a, x) * outcome(b, y) * outcome(cc, z))
                    .sum();
                best = best.max(v);
            }
        }
    }
    best
}

const SLIWA: [(&str, &str, f64, f64); 5] = [
    ("4", "<B1C1> + <B1C2> + <B2C1> - <B2C2> - 2<A2> + <A2B1C1> + <A2B1C2> + <A2B2C1> - <A2B2C2>", 2.0, 3.65685),
    (
        "5",
        "<C1> + <B1> + <B1C2> + <B2C1> - <B2C2> + <A1> + <A1C2> - <A1B1C1> - <A1B1C2> + <A1B2> - <A1B2C1> \
         + <A2C1> - <A2C2> + <A2B1> - <A2B1C1> - <A2B2> + <A2B2C2>",
        3.0,
        4.88854,
    ),
    (
        "6",
        "<C1> + <B1> + <B1C1> + <A1> + <A1C2> - <A1B1C1> - <A1B1C2> + <A1B2> - <A1B2C1> + <A2C1> - <A2C2> \
         - <A2B1> + <A2B1C2> + <A2B2> - <A2B2C1>",
        3.0,
        4.65685,
    ),
    (
        "21",
        "<C1> + <C2> + <B1> + <B1C1> + <B2> - <B2C2> + <A1C1> + <A1C2> + <A1B1> - 2<A1B1C1> - <A1B1C2> \
         + <A1B2> - <A1B2C1> + <A2B1C1> - <A2B1C2> - <A2B2C1> + <A2B2C2>",
        4.0,
        5.95546,
    ),
    (
        "40",
        "2<C1> + 2<C2> + <B1C1> + <B1C2> + <B2C1> - <B2C2> + <A1C1> + <A1C2> + 2<A1B1> - 2<A1B1C1> \
         - 2<A1B1C2> + <A1B2C1> - <A1B2C2> - 2<A2> + <A2C1> + <A2C2> - 2<A2B1> + <A2B1C1> + <A2B1C2> \
         + 2<A2B2C1> - 2<A2B2C2>",
        6.0,
        8.12979,
    ),
];

// Genuine tripartite inequalities, each with classical bound 6.
const GENUINE: [(&str, &str, f64, f64); 2] = [
    (
        "g1",
        "2<C1> + <B1> + <B1C1> + <B2> + <B2C1> + <A1> + <A1C1> + <A1B1> - 2<A1B1C1> + <A1B1C2> - <A1B2C1> \
         - <A1B2C2> + <A2> + <A2C1> - <A2B1C1> - <A2B1C2> + <A2B2> - 2<A2B2C1> + <A2B2C2>",
        6.0,
        6.82507,
    ),
    (
        "g2",
        "2<C1> + 2<B1> + 2<B1C2> + <A1> + <A1C1> + <A1B1> - 2<A1B1C1> - <A1B1C2> + <A1B2C1> - <A1B2C2> \
         + <A2> + <A2C1> + <A2B1> - 2<A2B1C1> - <A2B1C2> - <A2B2C1> + <A2B2C2>",
        6.0,
        6.56259,
    ),
];

/// Sliwa's inequalities #4, #5, #6, #21, #40 and the genuine tripartite
/// inequalities g1, g2, each checked against its tabulated classical bound.
pub fn builtin_inequalities() -> Result<Vec<BellInequality>> {
    SLIWA
        .iter()
        .chain(GENUINE.iter())
        .map(|&(name, expr, cb, qb)| {
            let ineq = BellInequality::parse(name, expr, cb, qb)?;
            let enumerated = classical_bound(&ineq);
            if enumerated != cb {
                return Err(Error::InequalityChecksum { name: name.to_string(), enumerated, tabulated: cb });
            }
            Ok(ineq)
        })
        .collect()
}

/// One built-in inequality by name (`4`, `5`, `6`, `21`, `40`, `g1`, `g2`;
/// a leading `#` is accepted).
pub fn builtin(name: &str) -> Result<BellInequality> {
    let key = name.trim_start_matches('#');
    builtin_inequalities()?
        .into_iter()
        .find(|i| i.name == key)
        .ok_or_else(|| Error::UnknownInequality(name.to_string()))
}

/// Two dichotomic observables per party.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    obs: [[DMatrix<C64>; 2]; 3],
}

impl MeasurementSet {
    /// Checks that every observable is Hermitian with `O^2 = I` within `1e-9`.
    pub fn new(obs: [[DMatrix<C64>; 2]; 3]) -> Result<Self> {
        for party in &obs {
            let d = party[0].nrows();
            for o in party {
                if o.nrows() != d || o.ncols() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: o.nrows().max(o.ncols()) });
                }
                let herm = (o - o.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                let sq = (o * o - DMatrix::<C64>::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if herm > 1e-9 || sq > 1e-9 {
                    return Err(Error::OutOfRange("observable is not Hermitian with O^2 = I".into()));
                }
            }
        }
        Ok(Self { obs })
    }

    pub fn dims(&self) -> [usize; 3] {
        [0, 1, 2].map(|p| self.obs[p][0].nrows())
    }

    /// Observable of `party` for setting `1` or `2`.
    pub fn observable(&self, party: usize, setting: usize) -> &DMatrix<C64> {
        &self.obs[party][setting - 1]
    }

    /// Party observables indexed by slot: identity, setting 1, setting 2.
    fn slots(&self, party: usize) -> [DMatrix<C64>; 3] {
        let d = self.obs[party][0].nrows();
        [DMatrix::identity(d, d), self.obs[party][0].clone(), self.obs[party][1].clone()]
    }
}

/// `sum coeffs A_x (x) B_y (x) C_z`.
pub fn bell_operator(ineq: &BellInequality, meas: &MeasurementSet) -> DenseOperator {
    let [a, b, cc] = [0, 1, 2].map(|p| meas.slots(p));
    let dims = meas.dims();
    let n = dims.iter().product();
    let mut op = DMatrix::<C64>::zeros(n, n);
    for ([x, y, z], w) in ineq.terms() {
        op += a[x].kronecker(&b[y]).kronecker(&cc[z]) * c(w, 0.0);
    }
    DenseOperator::new(dims.to_vec(), op).expect("dims match the operator")
}

pub fn bell_value(ineq: &BellInequality, rho: &DenseOperator, meas: &MeasurementSet) -> Result<f64> {
    if rho.dims() != meas.dims() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: meas.dims().iter().product() });
    }
    Ok(rho.trace_product(&bell_operator(ineq, meas))?.re)
}

/// Which observables the see-saw may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableClass {
    /// Qubit observables `n . sigma` with a unit Bloch vector.
    #[default]
    Traceless,
    /// Any Hermitian `O` with `O^2 = I`, including `+-I`.
    Dichotomic,
}

impl std::str::FromStr for ObservableClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "traceless" => Ok(Self::Traceless),
            "dichotomic" => Ok(Self::Dichotomic),
            _ => Err(Error::Parse(format!("unknown observable class {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawConfig {
    pub class: ObservableClass,
    pub restarts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Stop when a full sweep changes the value by less than this.
    pub tol: f64,
}

/// Restart count used for the table.
pub const TABLE_RESTARTS: usize = 200;

impl Default for SeesawConfig {
    fn default() -> Self {
        Self { class: ObservableClass::Traceless, restarts: TABLE_RESTARTS, seed: 0, max_sweeps: 2000, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawResult {
    pub value: f64,
    pub measurements: MeasurementSet,
    pub sweeps: usize,
}

fn pauli() -> [DMatrix<C64>; 3] {
    let z = C64::default();
    let one = c(1.0, 0.0);
    [
        DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        DMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

fn bloch_observable(n: [f64; 3]) -> DMatrix<C64> {
    let norm = n.iter().map(|v| v * v).sum::<f64>().sqrt();
    let s = pauli();
    (&s[0] * c(n[0] / norm, 0.0)) + (&s[1] * c(n[1] / norm, 0.0)) + (&s[2] * c(n[2] / norm, 0.0))
}

/// `sign(H)`, with eigenvalues below `1e-12` in magnitude sent to `+1`.
fn sign_of(h: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(h);
    let signs = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(if v < -1e-12 { -1.0 } else { 1.0 }, 0.0)),
    ));
    &vecs * signs * vecs.adjoint()
}

fn random_observable<R: Rng + ?Sized>(class: ObservableClass, d: usize, rng: &mut R) -> DMatrix<C64> {
    match class {
        ObservableClass::Traceless => {
            let n = [0; 3].map(|_| rng.sample::<f64, _>(StandardNormal));
            bloch_observable(n)
        }
        ObservableClass::Dichotomic => {
            // balanced spectrum: a start at +-I is already a fixed point
            let u = haar_unitary(d, rng);
            let signs = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                d,
                (0..d).map(|i| c(if i < d.div_ceil(2) { 1.0 } else { -1.0 }, 0.0)),
            ));
            &u * signs * u.adjoint()
        }
    }
}

/// Hermitian part of the partial contraction of `rho` against every
/// observable except `(party, setting)`: the value is `Tr(O H) + const`.
fn contraction(ineq: &BellInequality, rho: &DenseOperator, meas: &MeasurementSet, party: usize, setting: usize) -> DMatrix<C64> {
    let dims = meas.dims();
    let others: Vec<usize> = (0..3).filter(|&q| q != party).collect();
    let (q, r) = (others[0], others[1]);
    let (sq, sr) = (meas.slots(q), meas.slots(r));
    let m = dims[q] * dims[r];
    let mut k = DMatrix::<C64>::zeros(m, m);
    for (xs, w) in ineq.terms() {
        if xs[party] == setting {
            k += sq[xs[q]].kronecker(&sr[xs[r]]) * c(w, 0.0);
        }
    }
    let rho_p = rho.permute_sites(&[party, q, r]).expect("three sites").into_matrix();
    let dp = dims[party];
    let mut g = DMatrix::<C64>::zeros(dp, dp);
    for j in 0..dp {
        for i in 0..dp {
            let mut acc = C64::default();
            for kk in 0..m {
                for l in 0..m {
                    let kv = k[(kk, l)];
                    if kv != C64::default() {
                        acc += kv * rho_p[(j * m + l, i * m + kk)];
                    }
                }
            }
            g[(j, i)] = acc;
        }
    }
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Best observable against the contraction `h`.
fn best_response(class: ObservableClass, h: &DMatrix<C64>, current: &DMatrix<C64>) -> DMatrix<C64> {
    match class {
        ObservableClass::Dichotomic => sign_of(h),
        ObservableClass::Traceless => {
            let s = pauli();
            let n = [0, 1, 2].map(|i| (&s[i] * h).trace().re);
            if n.iter().map(|v| v * v).sum::<f64>() < 1e-24 {
                current.clone()
            } else {
                bloch_observable(n)
            }
        }
    }
}

fn check_class(class: ObservableClass, dims: &[usize]) -> Result<()> {
    if class == ObservableClass::Traceless && dims.iter().any(|&d| d != 2) {
        return Err(Error::OutOfRange("traceless observables are defined for qubits only".into()));
    }
    Ok(())
}

/// One sweep over all six observables against a fixed state.
fn sweep(ineq: &BellInequality, rho: &DenseOperator, meas: &mut MeasurementSet, class: ObservableClass) {
    for party in 0..3 {
        for setting in 1..=2 {
            let h = contraction(ineq, rho, meas, party, setting);
            let next = best_response(class, &h, &meas.obs[party][setting - 1]);
            meas.obs[party][setting - 1] = next;
        }
    }
}

fn seesaw_once(ineq: &BellInequality, rho: &DenseOperator, cfg: &SeesawConfig, restart: usize) -> Result<SeesawResult> {
    let mut rng = restart_rng(cfg.seed, restart);
    let dims = rho.dims();
    let obs = [0, 1, 2].map(|p| [0, 1].map(|_| random_observable(cfg.class, dims[p], &mut rng)));
    let mut meas = MeasurementSet { obs };
    let mut value = bell_value(ineq, rho, &meas)?;
    let mut sweeps = 0;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        sweep(ineq, rho, &mut meas, cfg.class);
        let next = bell_value(ineq, rho, &meas)?;
        debug_assert!(next >= value - 1e-9, "see-saw decreased: {value} -> {next}");
        let change = next - value;
        value = next;
        if change.abs() < cfg.tol {
            break;
        }
    }
    Ok(SeesawResult { value, measurements: meas, sweeps })
}

fn best_of(results: Vec<Result<SeesawResult>>) -> Result<SeesawResult> {
    let mut best: Option<SeesawResult> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::OutOfRange("at least one restart".into()))
}

/// Maximizes the Bell value of a fixed three-party state over observables.
/// The result is a lower bound on the true maximum.
pub fn seesaw(ineq: &BellInequality, rho: &DenseOperator, cfg: &SeesawConfig) -> Result<SeesawResult> {
    if rho.dims().len() != 3 {
        return Err(Error::OutOfRange("expected a three-party state".into()));
    }
    check_class(cfg.class, rho.dims())?;
    let results = (0..cfg.restarts.max(1)).into_par_iter().map(|r| seesaw_once(ineq, rho, cfg, r)).collect();
    best_of(results)
}

/// Replacing any single observable by its best response raises the value by
/// at most `tol`.
pub fn is_locally_optimal(
    ineq: &BellInequality,
    rho: &DenseOperator,
    meas: &MeasurementSet,
    class: ObservableClass,
    tol: f64,
) -> Result<bool> {
    let base = bell_value(ineq, rho, meas)?;
    for party in 0..3 {
        for setting in 1..=2 {
            let h = contraction(ineq, rho, meas, party, setting);
            let mut trial = meas.clone();
            trial.obs[party][setting - 1] = best_response(class, &h, &meas.obs[party][setting - 1]);
            if bell_value(ineq, rho, &trial)? > base + tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumMax {
    pub value: f64,
    pub measurements: MeasurementSet,
    pub state: DenseOperator,
}

fn quantum_once(ineq: &BellInequality, dims: [usize; 3], cfg: &SeesawConfig, restart: usize) -> Result<QuantumMax> {
    let mut rng = restart_rng(cfg.seed, restart);
    let obs = [0, 1, 2].map(|p| [0, 1].map(|_| random_observable(cfg.class, dims[p], &mut rng)));
    let mut meas = MeasurementSet { obs };
    let mut value = f64::NEG_INFINITY;
    let mut state = None;
    for _ in 0..cfg.max_sweeps {
        let op = bell_operator(ineq, &meas);
        let (vals, vecs) = hermitian_eigen(op.matrix());
        let top = vecs.column(vals.len() - 1).into_owned();
        let rho = DenseOperator::new(dims.to_vec(), &top * top.adjoint())?;
        sweep(ineq, &rho, &mut meas, cfg.class);
        let next = bell_value(ineq, &rho, &meas)?;
        let change = next - value;
        value = next;
        state = Some(rho);
        if change.abs() < cfg.tol {
            break;
        }
    }
    Ok(QuantumMax { value, measurements: meas, state: state.expect("at least one sweep") })
}

/// Joint see-saw over the state (top eigenvector of the current Bell
/// operator) and the observables.
pub fn quantum_max(ineq: &BellInequality, local_dims: [usize; 3], cfg: &SeesawConfig) -> Result<QuantumMax> {
    if local_dims.iter().any(|&d| d < 2) {
        return Err(Error::OutOfRange("local dimensions must be at least 2".into()));
    }
    check_class(cfg.class, &local_dims)?;
    let results: Vec<Result<QuantumMax>> =
        (0..cfg.restarts.max(1)).into_par_iter().map(|r| quantum_once(ineq, local_dims, cfg, r)).collect();
    let mut best: Option<QuantumMax> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::OutOfRange("at least one restart".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellTableRow {
    pub name: String,
    pub classical: f64,
    /// Three-qubit quantum value found by the joint see-saw.
    pub quantum: f64,
    /// Per source dimension, the see-saw value on the protocol output.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellTable {
    pub source_dims: Vec<usize>,
    /// Fidelity of the protocol output used for each source dimension.
    pub fidelities: Vec<f64>,
    pub rows: Vec<BellTableRow>,
}

impl BellTable {
    pub fn to_csv(&self, precision: usize) -> String {
        let mut s = String::from("ineq,C,Q");
        for d in &self.source_dims {
            let _ = write!(s, ",d={d}");
        }
        s.push('\n');
        for row in &self.rows {
            let _ = write!(s, "{},{},{}", row.name, crate::fmt_sig(row.classical, precision), crate::fmt_sig(row.quantum, precision));
            for v in &row.values {
                let _ = write!(s, ",{}", crate::fmt_sig(*v, precision));
            }
            s.push('\n');
        }
        s
    }
}

/// For each source dimension, optimizes the qubit-target protocol and then
/// runs the see-saw for every built-in inequality on its three-qubit output.
pub fn table1_report(source_dims: &[usize], cfg: &SeesawConfig, protocol_restarts: usize) -> Result<BellTable> {
    let ineqs = builtin_inequalities()?;
    let mut states = Vec::with_capacity(source_dims.len());
    let mut fidelities = Vec::with_capacity(source_dims.len());
    for &t in source_dims {
        if !(2..=4).contains(&t) {
            return Err(Error::OutOfRange(format!("source dimension {t} not in {{2, 3, 4}}")));
        }
        let r = protocol1_optimize(t, protocol_restarts, cfg.seed)?;
        fidelities.push(r.fidelity);
        states.push(r.rho_out);
    }
    let mut rows = Vec::with_capacity(ineqs.len());
    for ineq in &ineqs {
        let quantum = quantum_max(ineq, [2, 2, 2], cfg)?.value;
        let values = states.iter().map(|rho| Ok(seesaw(ineq, rho, cfg)?.value)).collect::<Result<Vec<_>>>()?;
        rows.push(BellTableRow { name: ineq.name.clone(), classical: classical_bound(ineq), quantum, values });
    }
    Ok(BellTable { source_dims: source_dims.to_vec(), fidelities, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseState;
    use crate::qudit::ghz_state;

    fn quick() -> SeesawConfig {
        SeesawConfig { restarts: 8, ..Default::default() }
    }

    #[test]
    fn builtins_pass_checksum() {
        let all = builtin_inequalities().unwrap();
        assert_eq!(all.len(), 7);
        for i in &all {
            assert_eq!(classical_bound(i), i.classical_bound);
        }
        assert!(builtin("#40").is_ok());
        assert!(matches!(builtin("7"), Err(Error::UnknownInequality(_))));
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let i = builtin("g1").unwrap();
        let again = BellInequality::parse("g1", &i.to_expression(), 6.0, 0.0).unwrap();
        assert_eq!(again.coeffs, i.coeffs);
        for bad in ["", "<A3>", "<BA1>", "<A1", "x<A1>", "<>"] {
            assert!(BellInequality::parse("bad", bad, 0.0, 0.0).is_err(), "{bad}");
        }
        let s = BellInequality::parse("s", "0.5*<A1B1C1> - <C2>", 0.0, 0.0).unwrap();
        assert_eq!(s.coeffs[1][1][1], 0.5);
        assert_eq!(s.coeffs[0][0][2], -1.0);
    }

    #[test]
    fn scaling_doubles_classical_bound() {
        let i = builtin("21").unwrap();
        assert_eq!(classical_bound(&i.scaled(2.0)), 2.0 * classical_bound(&i));
    }

    #[test]
    fn maximally_mixed_keeps_identity_terms_only() {
        let i = builtin("4").unwrap();
        let rho = DenseOperator::maximally_mixed(vec![2, 2, 2]).unwrap();
        let mut rng = restart_rng(1, 0);
        let obs = [0, 1, 2].map(|_| [0, 1].map(|_| random_observable(ObservableClass::Traceless, 2, &mut rng)));
        let meas = MeasurementSet::new(obs).unwrap();
        assert!(bell_value(&i, &rho, &meas).unwrap().abs() < 1e-12);
    }

    #[test]
    fn mermin_settings_violate_on_ghz() {
        // settings 1 = X, 2 = Y; GHZ has <XXX> = 1 and <XYY> = -1
        let m = BellInequality::parse("mermin", "<A1B1C1> - <A1B2C2> - <A2B1C2> - <A2B2C1>", 2.0, 4.0).unwrap();
        assert_eq!(classical_bound(&m), 2.0);
        let s = pauli();
        let meas = MeasurementSet::new([0; 3].map(|_| [s[0].clone(), s[1].clone()])).unwrap();
        let ghz = ghz_state(2, 3).unwrap().density().unwrap();
        assert!((bell_value(&m, &ghz, &meas).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn seesaw_is_locally_optimal_and_bounded() {
        let i = builtin("5").unwrap();
        let ghz = ghz_state(2, 3).unwrap().density().unwrap();
        for class in [ObservableClass::Traceless, ObservableClass::Dichotomic] {
            let cfg = SeesawConfig { class, ..quick() };
            let r = seesaw(&i, &ghz, &cfg).unwrap();
            assert!(is_locally_optimal(&i, &ghz, &r.measurements, class, 1e-7).unwrap());
            let q = quantum_max(&i, [2, 2, 2], &cfg).unwrap();
            assert!(r.value <= q.value + 1e-9);
            assert!(q.value <= i.algebraic_max() + 1e-9);
        }
    }

    #[test]
    fn dichotomic_never_falls_below_classical() {
        let i = builtin("40").unwrap();
        let product = DenseState::basis(vec![2, 2, 2], &[0, 0, 0]).unwrap().density().unwrap();
        let cfg = SeesawConfig { class: ObservableClass::Dichotomic, restarts: 16, ..Default::default() };
        assert!(seesaw(&i, &product, &cfg).unwrap().value >= i.classical_bound - 1e-9);
    }

    #[test]
    fn seesaw_is_deterministic() {
        let i = builtin("6").unwrap();
        let ghz = ghz_state(2, 3).unwrap().density().unwrap();
        let a = seesaw(&i, &ghz, &quick()).unwrap();
        let b = seesaw(&i, &ghz, &quick()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn traceless_needs_qubits() {
        let i = builtin("4").unwrap();
        assert!(quantum_max(&i, [3, 2, 2], &quick()).is_err());
    }
}
