//! GHZ states of square dimension `k^2` from three maximally entangled pairs of
//! dimension `k`, and the bounds it yields for other dimensions.
//!
//! Sources are `|Psi> = sum_i c_i |i i>` on particles (1,2), (3,4), (5,6).
//! Node 0 receives (1,6), node 1 receives (3,2), node 2 receives (5,4). The
//! nodes apply
//!
//! * node 0: identity, output `(1, 6)`;
//! * node 1: `|p3, p2> -> |p2, p3 - p2>`;
//! * node 2: `|p5, p4> -> |p4 - p5, p5>`;
//!
//! each output read as one `k^2`-level system.

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::triangle::{simulate_classical, NodeChannel, SparseNetworkState};
use super::{ProtocolResult, Witness};
use crate::dense::{c, fidelity_pure, DenseState, C64, MAX_OPERATOR_DIM};
use crate::error::{Error, Result};
use crate::qudit::ghz_state;

/// Which construction produced a Protocol III bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol3Method {
    /// `d = k^2` with maximally entangled sources.
    Exact,
    /// The `floor(sqrt d)^2`-dimensional state padded into dimension `d`.
    Embedding,
    /// The `k^2`-dimensional state with some local labels folded away.
    Projection,
    /// As `Projection`, with sources `x|00> + sqrt((1-x^2)/(k-1)) sum_{i>0} |ii>`.
    XFamily,
}

/// Search over dropped-label sets is exhaustive below this many choices.
const MAX_FOLD_CHOICES: usize = 5000;

fn permutation_channel(k: usize, map: impl Fn(usize, usize) -> (usize, usize)) -> Result<NodeChannel> {
    let n = k * k;
    let mut u = DMatrix::<C64>::zeros(n, n);
    for a in 0..k {
        for b in 0..k {
            let (x, y) = map(a, b);
            u[(x * k + y, a * k + b)] = c(1.0, 0.0);
        }
    }
    NodeChannel::unitary(u, [k, k])
}

/// The three node unitaries, in triangle order.
pub fn protocol3_channels(k: usize) -> Result<[NodeChannel; 3]> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be positive".into()));
    }
    Ok([
        permutation_channel(k, |p1, p6| (p1, p6))?,
        permutation_channel(k, |p3, p2| (p2, (p3 + k - p2) % k))?,
        permutation_channel(k, |p5, p4| ((p4 + k - p5) % k, p5))?,
    ])
}

/// Output labels and amplitudes for sources with Schmidt vector `coeffs`.
fn output_terms(coeffs: &[f64]) -> Vec<([usize; 3], f64)> {
    let k = coeffs.len();
    let mut out = Vec::with_capacity(k * k * k);
    for j0 in 0..k {
        for j1 in 0..k {
            for j2 in 0..k {
                let a = j0 * k + j2;
                let b = j0 * k + (j1 + k - j0) % k;
                let cc = ((j1 + k - j2) % k) * k + j2;
                out.push(([a, b, cc], coeffs[j0] * coeffs[j1] * coeffs[j2]));
            }
        }
    }
    out
}

fn uniform(k: usize) -> Vec<f64> {
    vec![(k as f64).sqrt().recip(); k]
}

/// Schmidt vector of the x-family.
pub fn x_family_coefficients(k: usize, x: f64) -> Result<Vec<f64>> {
    if k < 2 || !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("x-family needs k >= 2 and x in [0, 1], got k = {k}, x = {x}")));
    }
    let rest = ((1.0 - x * x) / (k - 1) as f64).sqrt();
    let mut v = vec![rest; k];
    v[0] = x;
    Ok(v)
}

fn state_from_terms(k: usize, terms: &[([usize; 3], f64)]) -> Result<DenseState> {
    let n = k * k;
    let mut amps = vec![C64::default(); n * n * n];
    for &([a, b, cc], v) in terms {
        amps[(a * n + b) * n + cc] += c(v, 0.0);
    }
    DenseState::new(vec![n, n, n], amps)
}

/// The three-party state of dimension `k^2` per party.
pub fn protocol3_state(k: usize) -> Result<DenseState> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("k = {k} must be at least 2")));
    }
    state_from_terms(k, &output_terms(&uniform(k)))
}

/// How each `k^2` label is read after folding: kept labels are renumbered in
/// order, dropped labels each get their own Kraus branch onto `target`.
#[derive(Debug, Clone, PartialEq)]
struct Fold {
    d: usize,
    dropped: Vec<usize>,
    target: usize,
    /// `(branch, output)` per input label.
    table: Vec<(usize, usize)>,
}

impl Fold {
    fn new(big: usize, dropped: Vec<usize>, target: usize) -> Result<Self> {
        let d = big - dropped.len();
        if target >= d.max(1) || dropped.iter().any(|&l| l >= big) {
            return Err(Error::OutOfRange("fold labels out of range".into()));
        }
        let mut table = Vec::with_capacity(big);
        let mut rank = 0;
        for l in 0..big {
            match dropped.iter().position(|&x| x == l) {
                Some(p) => table.push((1 + p, target)),
                None => {
                    table.push((0, rank));
                    rank += 1;
                }
            }
        }
        Ok(Self { d, dropped, target, table })
    }

    fn identity(big: usize) -> Self {
        Self { d: big, dropped: Vec::new(), target: 0, table: (0..big).map(|l| (0, l)).collect() }
    }

    fn fidelity(&self, terms: &[([usize; 3], f64)]) -> f64 {
        let b = self.dropped.len() + 1;
        let mut acc = vec![0.0; b * b * b];
        for &(labels, v) in terms {
            let [(b0, o0), (b1, o1), (b2, o2)] = labels.map(|l| self.table[l]);
            if o0 == o1 && o1 == o2 {
                acc[(b0 * b + b1) * b + b2] += v;
            }
        }
        acc.iter().map(|s| s * s).sum::<f64>() / self.d as f64
    }

    fn channel(&self, k: usize) -> Result<NodeChannel> {
        let big = k * k;
        let mut kraus = vec![DMatrix::<C64>::zeros(self.d, big); self.dropped.len() + 1];
        for (l, &(branch, out)) in self.table.iter().enumerate() {
            kraus[branch][(out, l)] = c(1.0, 0.0);
        }
        NodeChannel::new(kraus, [k, k])
    }
}

/// GHZ_d fidelity after folding the `k^2`-dimensional output of sources
/// `coeffs` (length `k`) onto `d = k^2 - dropped.len()` levels.
pub fn projected_fidelity(coeffs: &[f64], dropped: &[usize], target: usize) -> Result<f64> {
    let k = coeffs.len();
    let fold = Fold::new(k * k, dropped.to_vec(), target)?;
    Ok(fold.fidelity(&output_terms(coeffs)))
}

/// The closed-form value `(k + 2(1 - k^2)/k^3)/d` for `d = k^2 - 1`.
pub fn projection_formula(k: usize) -> f64 {
    let kf = k as f64;
    (kf + 2.0 * (1.0 - kf * kf) / kf.powi(3)) / (kf * kf - 1.0)
}

fn binomial(n: usize, r: usize) -> usize {
    (0..r).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn fold_choices(k: usize, d: usize) -> Result<Vec<Fold>> {
    let big = k * k;
    let r = big - d;
    if binomial(big, r).saturating_mul(d) > MAX_FOLD_CHOICES {
        return Ok(vec![Fold::new(big, (d..big).collect(), 0)?]);
    }
    let mut out = Vec::new();
    for dropped in (0..big).combinations(r) {
        for target in 0..d {
            out.push(Fold::new(big, dropped.clone(), target)?);
        }
    }
    Ok(out)
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..100 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
    }
    if fa > fb { (a, fa) } else { (b, fb) }
}

/// Best `x` on `[0, 1]` for one fold: a 201-point scan, then golden-section
/// refinement around the best grid point.
fn optimize_x(k: usize, fold: &Fold) -> (f64, f64) {
    let eval = |x: f64| fold.fidelity(&output_terms(&x_family_coefficients(k, x.clamp(0.0, 1.0)).expect("x in range")));
    let n = 200;
    let (mut bi, mut bf) = (0usize, f64::NEG_INFINITY);
    for i in 0..=n {
        let v = eval(i as f64 / n as f64);
        if v > bf {
            bi = i;
            bf = v;
        }
    }
    let lo = bi.saturating_sub(1) as f64 / n as f64;
    let hi = (bi + 1).min(n) as f64 / n as f64;
    let (x, v) = golden_max(eval, lo, hi);
    if v > bf { (x, v) } else { (bi as f64 / n as f64, bf) }
}

fn finish(
    method: Protocol3Method,
    k: usize,
    x: Option<f64>,
    coeffs: &[f64],
    fold: &Fold,
    fid: f64,
) -> Result<ProtocolResult> {
    let d = fold.d;
    if d.pow(3) > MAX_OPERATOR_DIM {
        return Err(Error::DimensionTooLarge(d.pow(3)));
    }
    let big = k * k;
    let terms = output_terms(coeffs);
    let state = SparseNetworkState {
        node_dims: [big; 3],
        terms: terms.iter().map(|&(l, v)| (l, c(v, 0.0))).collect(),
    };
    let ch = fold.channel(k)?;
    let rho = simulate_classical([&ch, &ch, &ch], &state)?;
    let target = (!fold.dropped.is_empty()).then_some(fold.target);
    let witness = Witness::Protocol3 { method, k, x, dropped: fold.dropped.clone(), target };
    Ok(ProtocolResult::new("p3", d, fid, witness, rho))
}

/// Exact protocol for `d = k^2`.
pub fn protocol3_exact(k: usize) -> Result<ProtocolResult> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("k = {k} must be at least 2")));
    }
    let fold = Fold::identity(k * k);
    let coeffs = uniform(k);
    let fid = fold.fidelity(&output_terms(&coeffs));
    finish(Protocol3Method::Exact, k, None, &coeffs, &fold, fid)
}

/// The `m^2`-dimensional state, `m = floor(sqrt d)`, padded with zeros into
/// `d` levels per party; its fidelity is computed from the padded state.
pub fn protocol3_embedding(d: usize) -> Result<ProtocolResult> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("d = {d} must be at least 2")));
    }
    if d.pow(3) > MAX_OPERATOR_DIM {
        return Err(Error::DimensionTooLarge(d.pow(3)));
    }
    let m = d.isqrt();
    let mut amps = vec![C64::default(); d * d * d];
    for ([a, b, cc], v) in output_terms(&uniform(m)) {
        amps[(a * d + b) * d + cc] += c(v, 0.0);
    }
    let psi = DenseState::new(vec![d; 3], amps)?;
    let fid = fidelity_pure(&ghz_state(d, 3)?, &psi)?;
    let witness = Witness::Protocol3 {
        method: Protocol3Method::Embedding,
        k: m,
        x: None,
        dropped: Vec::new(),
        target: None,
    };
    Ok(ProtocolResult::new("p3", d, fid, witness, psi.density()?))
}

/// Maximally entangled sources with `k = ceil(sqrt d)`, best fold.
pub fn protocol3_projection(d: usize) -> Result<ProtocolResult> {
    let k = ceil_sqrt(d)?;
    let coeffs = uniform(k);
    let terms = output_terms(&coeffs);
    let (fold, fid) = best_fold(fold_choices(k, d)?, |f| f.fidelity(&terms));
    finish(Protocol3Method::Projection, k, None, &coeffs, &fold, fid)
}

/// x-family sources with `k = ceil(sqrt d)`, best fold and `x`.
pub fn protocol3_x_family(d: usize) -> Result<ProtocolResult> {
    let k = ceil_sqrt(d)?;
    let mut best: Option<(Fold, f64, f64)> = None;
    for fold in fold_choices(k, d)? {
        let (x, v) = optimize_x(k, &fold);
        if best.as_ref().is_none_or(|b| v > b.2) {
            best = Some((fold, x, v));
        }
    }
    let (fold, x, fid) = best.expect("at least one fold");
    let coeffs = x_family_coefficients(k, x)?;
    finish(Protocol3Method::XFamily, k, Some(x), &coeffs, &fold, fid)
}

fn ceil_sqrt(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("d = {d} must be at least 2")));
    }
    let m = d.isqrt();
    Ok(if m * m == d { m } else { m + 1 })
}

fn best_fold(folds: Vec<Fold>, f: impl Fn(&Fold) -> f64) -> (Fold, f64) {
    let mut best: Option<(Fold, f64)> = None;
    for fold in folds {
        let v = f(&fold);
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((fold, v));
        }
    }
    best.expect("at least one fold")
}

/// All applicable constructions for dimension `d`, in the order exact or
/// embedding, projection, x-family.
pub fn protocol3_candidates(d: usize) -> Result<Vec<ProtocolResult>> {
    let k = ceil_sqrt(d)?;
    if k * k == d {
        return Ok(vec![protocol3_exact(k)?]);
    }
    Ok(vec![protocol3_embedding(d)?, protocol3_projection(d)?, protocol3_x_family(d)?])
}

/// The best construction for `d`; ties keep the earlier candidate.
pub fn protocol3_variants(d: usize) -> Result<ProtocolResult> {
    let mut all = protocol3_candidates(d)?.into_iter();
    let mut best = all.next().expect("nonempty");
    for r in all {
        if r.fidelity > best.fidelity {
            best = r;
        }
    }
    Ok(best)
}
