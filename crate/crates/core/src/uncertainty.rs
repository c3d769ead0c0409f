//! Fine-grained uncertainty relations for two projectors with `PQP = lambda P`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::{c, haar_unitary, hermitian_eigen, DenseOperator, C64};
use crate::error::{Error, Result};
use crate::qudit::PauliString;

/// Slack allowed when deciding whether an inequality holds.
pub const INEQUALITY_TOL: f64 = 1e-9;

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} not in (0, 1)")));
    }
    Ok(())
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("{name} = {x} not in [0, 1]")));
    }
    Ok(())
}

/// `f_lambda(x) = 1` for `x <= lambda`, else `1 - (sqrt((1-lambda) x) - sqrt(lambda (1-x)))^2`.
pub fn f_lambda(lambda: f64, x: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_unit("x", x)?;
    Ok(f_lambda_unchecked(lambda, x))
}

fn f_lambda_unchecked(lambda: f64, x: f64) -> f64 {
    if x <= lambda {
        return 1.0;
    }
    let s = ((1.0 - lambda) * x).sqrt() - (lambda * (1.0 - x)).sqrt();
    1.0 - s * s
}

/// Two projectors with `PQP = lambda P` and their block sizes.
#[derive(Debug, Clone)]
pub struct ProjectionPair {
    pub p: DenseOperator,
    pub q: DenseOperator,
    pub lambda: f64,
    /// Number of two-dimensional blocks, equal to `rank(P)`.
    pub blocks: usize,
    /// Dimension of the common eigenspace with `P = 0, Q = 0`.
    pub common_00: usize,
    /// Dimension of the common eigenspace with `P = 0, Q = 1`.
    pub common_01: usize,
}

impl ProjectionPair {
    /// Wraps two projectors after checking `P^2 = P`, `Q^2 = Q` and `PQP = lambda P`.
    pub fn new(p: DenseOperator, q: DenseOperator, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if p.dims() != q.dims() {
            return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
        }
        if !p.is_projector(1e-10) || !q.is_projector(1e-10) {
            return Err(Error::OutOfRange("operands must be orthogonal projectors".into()));
        }
        let pqp = p.mul(&q)?.mul(&p)?;
        if pqp.max_abs_diff(&p.scale(lambda)) > 1e-9 {
            return Err(Error::OutOfRange(format!("PQP != {lambda} P")));
        }
        let counts = block_structure(&p, &q, lambda)?;
        Ok(Self {
            p,
            q,
            lambda,
            blocks: counts.blocks,
            common_00: counts.common_00,
            common_01: counts.common_01,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// `(Tr rho P, Tr rho Q)`.
    pub fn expectations(&self, rho: &DenseOperator) -> Result<(f64, f64)> {
        Ok((rho.expectation(&self.p)?, rho.expectation(&self.q)?))
    }
}

/// Builds `Q = (Q_lambda (x) I_R) + Pi_1` and `P = P_0 (x) I_R` in a canonical
/// basis, pads with a common `(0,0)` eigenspace and conjugates by a Haar unitary.
pub fn random_projection_pair(
    seed: u64,
    lambda: f64,
    blocks: usize,
    common_00: usize,
    common_01: usize,
) -> Result<ProjectionPair> {
    check_lambda(lambda)?;
    if blocks == 0 {
        return Err(Error::OutOfRange("at least one block is required".into()));
    }
    let n = 2 * blocks + common_00 + common_01;
    let mut p = DMatrix::<C64>::zeros(n, n);
    let mut q = DMatrix::<C64>::zeros(n, n);
    let (a, b) = (lambda.sqrt(), (1.0 - lambda).sqrt());
    for r in 0..blocks {
        let (i, j) = (2 * r, 2 * r + 1);
        p[(i, i)] = c(1.0, 0.0);
        q[(i, i)] = c(a * a, 0.0);
        q[(i, j)] = c(a * b, 0.0);
        q[(j, i)] = c(a * b, 0.0);
        q[(j, j)] = c(b * b, 0.0);
    }
    for k in 0..common_01 {
        let i = 2 * blocks + k;
        q[(i, i)] = c(1.0, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_unitary(n, &mut rng);
    let p = DenseOperator::new(vec![n], &u * p * u.adjoint())?;
    let q = DenseOperator::new(vec![n], &u * q * u.adjoint())?;
    Ok(ProjectionPair { p, q, lambda, blocks, common_00, common_01 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockCounts {
    pub blocks: usize,
    pub common_00: usize,
    pub common_01: usize,
}

/// Recovers the block decomposition of a pair from the spectrum of
/// `D = (1-P) Q (1-P)` restricted to `ker P`.
///
/// `D` has eigenvalue `1 - lambda` once per two-dimensional block, `1` on the
/// common `(0,1)` eigenspace and `0` on the common `(0,0)` eigenspace. Any
/// other eigenvalue means the pair is not of the expected form.
pub fn block_structure(p: &DenseOperator, q: &DenseOperator, lambda: f64) -> Result<BlockCounts> {
    let tol = 1e-8;
    let n = p.dim();
    let rank_p = p.trace().re.round() as usize;
    let comp = DMatrix::<C64>::identity(n, n) - p.matrix();
    let d = &comp * q.matrix() * &comp;
    let (vals, _) = hermitian_eigen(&d);
    // P's range contributes `rank_p` extra zeros to the spectrum of D.
    let mut counts = BlockCounts { blocks: 0, common_00: 0, common_01: 0 };
    let mut zeros = 0usize;
    for v in vals {
        if v.abs() < tol {
            zeros += 1;
        } else if (v - 1.0).abs() < tol {
            counts.common_01 += 1;
        } else if (v - (1.0 - lambda)).abs() < tol {
            counts.blocks += 1;
        } else {
            return Err(Error::OutOfRange(format!("eigenvalue {v:.6} of D is not in {{0, 1-lambda, 1}}")));
        }
    }
    if counts.blocks != rank_p || zeros < rank_p {
        return Err(Error::OutOfRange(format!(
            "{} blocks found for rank(P) = {rank_p}",
            counts.blocks
        )));
    }
    counts.common_00 = zeros - rank_p;
    Ok(counts)
}

/// Both sides of `sqrt(1 - <P>) >= sqrt((1-lambda)<Q>) - sqrt(lambda (1 - <Q>))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigurCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl FigurCheck {
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }
}

pub fn figur_values(lambda: f64, p: f64, q: f64) -> FigurCheck {
    let p = p.clamp(0.0, 1.0);
    let q = q.clamp(0.0, 1.0);
    let lhs = (1.0 - p).sqrt();
    let rhs = ((1.0 - lambda) * q).sqrt() - (lambda * (1.0 - q)).sqrt();
    FigurCheck { lhs, rhs, holds: lhs >= rhs - INEQUALITY_TOL }
}

pub fn figur_check(pair: &ProjectionPair, rho: &DenseOperator) -> Result<FigurCheck> {
    let (p, q) = pair.expectations(rho)?;
    Ok(figur_values(pair.lambda, p, q))
}

/// Whether `(p, q)` lies in the set of attainable `(<P>, <Q>)`: the convex
/// hull of the ellipse traced by states on one block together with the
/// isolated points `(0,0)` and `(0,1)`.
pub fn ellipse_region_check(lambda: f64, p: f64, q: f64) -> Result<bool> {
    check_lambda(lambda)?;
    check_unit("p", p)?;
    check_unit("q", q)?;
    let upper = f_lambda_unchecked(lambda, p);
    let lower = 1.0 - f_lambda_unchecked(1.0 - lambda, p);
    Ok(q <= upper + INEQUALITY_TOL && q >= lower - INEQUALITY_TOL)
}

/// `<2P-1>^2 + <2Q-1>^2 + (2l-1)^2 - 2(2l-1)<2P-1><2Q-1>`, at most 1 exactly
/// on the filled ellipse of single-block states.
pub fn ellipse_form(lambda: f64, p: f64, q: f64) -> f64 {
    let (a, b, m) = (2.0 * p - 1.0, 2.0 * q - 1.0, 2.0 * lambda - 1.0);
    a * a + b * b + m * m - 2.0 * m * a * b
}

/// `<P> + <Q> - 2 sqrt(lambda <P><Q>) <= 1 - lambda`, valid when both
/// `PQP = lambda P` and `QPQ = lambda Q`.
pub fn symmetric_figur_check(lambda: f64, p: f64, q: f64) -> Result<bool> {
    check_lambda(lambda)?;
    check_unit("p", p)?;
    check_unit("q", q)?;
    Ok(p + q - 2.0 * (lambda * p * q).sqrt() <= 1.0 - lambda + INEQUALITY_TOL)
}

/// `[gh] >= [g][h] >= [g] + [h] - 1` as operators, evaluated on `rho`. The
/// middle term is `Tr rho [g][h]`; the product of the two expectations is not
/// bounded by `Tr rho [gh]` in general.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Check {
    pub gh: f64,
    pub product: f64,
    pub sum_minus_one: f64,
    pub holds: bool,
}

pub fn lemma2_check(g: &PauliString, h: &PauliString, rho: &DenseOperator) -> Result<Lemma2Check> {
    if !g.commutes(h)? {
        return Err(Error::NonCommuting);
    }
    let pg = g.eigenspace_projector()?;
    let ph = h.eigenspace_projector()?;
    let product = rho.expectation(&pg.mul(&ph)?)?;
    let sum_minus_one = rho.expectation(&pg)? + rho.expectation(&ph)? - 1.0;
    let gh = g.mul(h)?.expectation_projector(rho)?;
    Ok(Lemma2Check {
        gh,
        product,
        sum_minus_one,
        holds: gh >= product - INEQUALITY_TOL && product >= sum_minus_one - INEQUALITY_TOL,
    })
}
