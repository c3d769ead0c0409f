//! Multi-restart projected gradient ascent on products of unit spheres.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// A smooth objective over a flat parameter vector.
pub trait Objective: Sync {
    fn value(&self, x: &[f64]) -> f64;

    /// Euclidean gradient. The default uses central differences.
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        finite_difference_gradient(|y| self.value(y), x, grad);
    }
}

pub fn finite_difference_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], grad: &mut [f64]) {
    let h = 1e-6;
    let mut y = x.to_vec();
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let up = f(&y);
        y[i] = x[i] - h;
        let down = f(&y);
        y[i] = x[i];
        grad[i] = (up - down) / (2.0 * h);
    }
}

/// Shape of the search space: consecutive blocks, each normalized to the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereProduct {
    pub blocks: Vec<usize>,
    /// Restrict every coordinate to be nonnegative.
    pub nonnegative: bool,
}

impl SphereProduct {
    pub fn new(blocks: Vec<usize>, nonnegative: bool) -> Self {
        Self { blocks, nonnegative }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Nearest point on the product of spheres (or of their nonnegative parts).
    pub fn project(&self, x: &mut [f64]) {
        let mut at = 0;
        for &b in &self.blocks {
            let part = &mut x[at..at + b];
            if self.nonnegative {
                part.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            let n = part.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.0 {
                part.iter_mut().for_each(|v| *v /= n);
            } else {
                part.iter_mut().for_each(|v| *v = 0.0);
                part[0] = 1.0;
            }
            at += b;
        }
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut x: Vec<f64> = (0..self.dim())
            .map(|_| {
                let v: f64 = rng.sample(StandardNormal);
                if self.nonnegative { v.abs() } else { v }
            })
            .collect();
        self.project(&mut x);
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    pub max_iters: usize,
    /// Stop when an accepted step changes the value by less than this, relatively.
    pub rel_tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self { max_iters: 20_000, rel_tol: 1e-10, initial_step: 0.5, min_step: 1e-14 }
    }
}

/// Default restart count for protocol searches.
pub const DEFAULT_RESTARTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Projected gradient ascent from `x0` with step halving on rejection and
/// step growth on acceptance.
pub fn ascend<O: Objective + ?Sized>(obj: &O, space: &SphereProduct, x0: Vec<f64>, cfg: &AscentConfig) -> AscentResult {
    let mut x = x0;
    space.project(&mut x);
    let mut f = obj.value(&x);
    let mut step = cfg.initial_step;
    let mut grad = vec![0.0; x.len()];
    let mut trial = vec![0.0; x.len()];
    let mut iterations = 0;
    while iterations < cfg.max_iters && step > cfg.min_step {
        iterations += 1;
        obj.gradient(&x, &mut grad);
        loop {
            for i in 0..x.len() {
                trial[i] = x[i] + step * grad[i];
            }
            space.project(&mut trial);
            let ft = obj.value(&trial);
            if ft > f {
                let change = ft - f;
                std::mem::swap(&mut x, &mut trial);
                f = ft;
                step *= 1.5;
                if change <= cfg.rel_tol * f.abs().max(1.0) {
                    return AscentResult { x, value: f, iterations };
                }
                break;
            }
            step *= 0.5;
            if step <= cfg.min_step {
                break;
            }
        }
    }
    AscentResult { x, value: f, iterations }
}

/// Best result over `restarts` random starting points. Restart `r` draws its
/// start from a generator seeded with `(seed, r)`; ties keep the lowest index.
pub fn multistart<O: Objective + ?Sized>(
    obj: &O,
    space: &SphereProduct,
    restarts: usize,
    seed: u64,
    cfg: &AscentConfig,
) -> (AscentResult, usize) {
    let results: Vec<AscentResult> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(seed, r);
            ascend(obj, space, space.random_point(&mut rng), cfg)
        })
        .collect();
    argmax(results)
}

/// Picks the largest value, lowest index first among equals.
pub fn argmax(results: Vec<AscentResult>) -> (AscentResult, usize) {
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.value > results[best].value {
            best = i;
        }
    }
    (results.into_iter().nth(best).expect("at least one restart"), best)
}

pub fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}
