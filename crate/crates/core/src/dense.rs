//! Dense state vectors and operators on tensor-product spaces.
//!
//! Basis ordering is row-major over sites: site 0 is the most significant
//! digit of the flat index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest total dimension of a [`DenseState`].
pub const MAX_STATE_DIM: usize = 1 << 20;
/// Largest total dimension of a [`DenseOperator`].
pub const MAX_OPERATOR_DIM: usize = 1 << 13;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn check_dims(dims: &[usize], cap: usize) -> Result<usize> {
    let mut total: usize = 1;
    for &d in dims {
        if d == 0 {
            return Err(Error::OutOfRange("site dimension 0".into()));
        }
        total = total.checked_mul(d).ok_or(Error::DimensionTooLarge(usize::MAX))?;
        if total > cap {
            return Err(Error::DimensionTooLarge(total));
        }
    }
    Ok(total)
}

/// Digits of `index` in the mixed radix given by `dims`.
pub fn unravel(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

pub fn ravel(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// Maps each flat index of the permuted layout to its flat index in the
/// original layout. Site `k` of the result is site `perm[k]` of the input.
fn permutation_table(dims: &[usize], perm: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: perm.len() });
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::OutOfRange(format!("invalid site permutation {perm:?}")));
        }
        seen[p] = true;
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total = total_dim(dims);
    let mut table = vec![0; total];
    let mut old_digits = vec![0; n];
    for (new_index, slot) in table.iter_mut().enumerate() {
        let digits = unravel(new_index, &new_dims);
        for (k, &p) in perm.iter().enumerate() {
            old_digits[p] = digits[k];
        }
        *slot = ravel(&old_digits, dims);
    }
    Ok((new_dims, table))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl DenseState {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let total = check_dims(&dims, MAX_STATE_DIM)?;
        if amps.len() != total {
            return Err(Error::DimensionMismatch { expected: total, got: amps.len() });
        }
        Ok(Self { dims, amps })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims, MAX_STATE_DIM)?;
        Ok(Self { dims, amps: vec![C64::default(); total] })
    }

    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(dims)?;
        if digits.len() != s.dims.len() || digits.iter().zip(&s.dims).any(|(x, d)| x >= d) {
            return Err(Error::OutOfRange(format!("basis label {digits:?}")));
        }
        let i = ravel(digits, &s.dims);
        s.amps[i] = c(1.0, 0.0);
        Ok(s)
    }

    pub fn from_real(dims: Vec<usize>, amps: &[f64]) -> Result<Self> {
        Self::new(dims, amps.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> C64 {
        self.amps[ravel(digits, &self.dims)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
        self
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &DenseState) -> Result<C64> {
        self.same_dims(&other.dims)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    fn same_dims(&self, dims: &[usize]) -> Result<()> {
        if self.dims != dims {
            return Err(Error::DimensionMismatch {
                expected: total_dim(&self.dims),
                got: total_dim(dims),
            });
        }
        Ok(())
    }

    pub fn kron(&self, other: &DenseState) -> Result<DenseState> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        DenseState::new(dims, amps)
    }

    /// Reorders sites: site `k` of the result is site `perm[k]` of `self`.
    pub fn permute_sites(&self, perm: &[usize]) -> Result<DenseState> {
        let (dims, table) = permutation_table(&self.dims, perm)?;
        Ok(DenseState { dims, amps: table.iter().map(|&i| self.amps[i]).collect() })
    }

    /// Merges consecutive sites into groups of the given sizes.
    pub fn group_sites(&self, sizes: &[usize]) -> Result<DenseState> {
        Ok(DenseState { dims: group_dims(&self.dims, sizes)?, amps: self.amps.clone() })
    }

    /// Applies an operator to one site.
    pub fn apply_local(&self, site: usize, op: &DMatrix<C64>) -> Result<DenseState> {
        if site >= self.dims.len() {
            return Err(Error::OutOfRange(format!("site {site}")));
        }
        let d = self.dims[site];
        if op.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: op.ncols() });
        }
        let out_d = op.nrows();
        let outer: usize = self.dims[..site].iter().product();
        let inner: usize = self.dims[site + 1..].iter().product();
        let mut dims = self.dims.clone();
        dims[site] = out_d;
        let mut amps = vec![C64::default(); outer * out_d * inner];
        for o in 0..outer {
            for i in 0..inner {
                for r in 0..out_d {
                    let mut acc = C64::default();
                    for k in 0..d {
                        acc += op[(r, k)] * self.amps[(o * d + k) * inner + i];
                    }
                    amps[(o * out_d + r) * inner + i] = acc;
                }
            }
        }
        DenseState::new(dims, amps)
    }

    /// `|self><self|`.
    pub fn density(&self) -> Result<DenseOperator> {
        let v = DVector::from_column_slice(&self.amps);
        DenseOperator::new(self.dims.clone(), &v * v.adjoint())
    }

    pub fn to_vector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateFile {
            dims: self.dims.clone(),
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        })
        .expect("state serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: StateFile = serde_json::from_str(s)?;
        Self::new(f.dims, f.amplitudes.into_iter().map(|[re, im]| c(re, im)).collect())
    }
}

fn group_dims(dims: &[usize], sizes: &[usize]) -> Result<Vec<usize>> {
    if sizes.iter().sum::<usize>() != dims.len() {
        return Err(Error::DimensionMismatch { expected: dims.len(), got: sizes.iter().sum() });
    }
    let mut out = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for &s in sizes {
        out.push(dims[at..at + s].iter().product());
        at += s;
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StateFile {
    dims: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OperatorFile {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// A square matrix acting on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dims: Vec<usize>,
    mat: DMatrix<C64>,
}

impl DenseOperator {
    pub fn new(dims: Vec<usize>, mat: DMatrix<C64>) -> Result<Self> {
        let total = check_dims(&dims, MAX_OPERATOR_DIM)?;
        if mat.nrows() != total || mat.ncols() != total {
            return Err(Error::DimensionMismatch { expected: total, got: mat.nrows().max(mat.ncols()) });
        }
        Ok(Self { dims, mat })
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims, MAX_OPERATOR_DIM)?;
        Self::new(dims, DMatrix::identity(total, total))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims, MAX_OPERATOR_DIM)?;
        Self::new(dims, DMatrix::identity(total, total).scale(1.0 / total as f64))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn dagger(&self) -> DenseOperator {
        DenseOperator { dims: self.dims.clone(), mat: self.mat.adjoint() }
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.same_dims(other)?;
        Ok(DenseOperator { dims: self.dims.clone(), mat: &self.mat * &other.mat })
    }

    pub fn scale(&self, s: f64) -> DenseOperator {
        DenseOperator { dims: self.dims.clone(), mat: self.mat.scale(s) }
    }

    fn same_dims(&self, other: &DenseOperator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    pub fn kron(&self, other: &DenseOperator) -> Result<DenseOperator> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DenseOperator::new(dims, self.mat.kronecker(&other.mat))
    }

    /// Operator-norm-free distance: largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        (&self.mat - &other.mat).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.mat - self.mat.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// `P^2 = P` and `P = P^dagger` within `tol`.
    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (&self.mat * &self.mat - &self.mat).iter().all(|z| z.norm() <= tol)
    }

    /// `Tr(self * other)`.
    pub fn trace_product(&self, other: &DenseOperator) -> Result<C64> {
        self.same_dims(other)?;
        let n = self.dim();
        let mut acc = C64::default();
        for i in 0..n {
            for k in 0..n {
                acc += self.mat[(i, k)] * other.mat[(k, i)];
            }
        }
        Ok(acc)
    }

    /// Real part of `Tr(self * other)`, the expectation for Hermitian arguments.
    pub fn expectation(&self, observable: &DenseOperator) -> Result<f64> {
        Ok(self.trace_product(observable)?.re)
    }

    /// Eigenvalues (ascending) and eigenvectors of a Hermitian operator.
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<C64>) {
        hermitian_eigen(&self.mat)
    }

    /// Reorders sites; see [`DenseState::permute_sites`].
    pub fn permute_sites(&self, perm: &[usize]) -> Result<DenseOperator> {
        let (dims, table) = permutation_table(&self.dims, perm)?;
        let n = self.dim();
        let mat = DMatrix::from_fn(n, n, |r, c| self.mat[(table[r], table[c])]);
        DenseOperator::new(dims, mat)
    }

    pub fn group_sites(&self, sizes: &[usize]) -> Result<DenseOperator> {
        DenseOperator::new(group_dims(&self.dims, sizes)?, self.mat.clone())
    }

    /// Partial trace keeping the listed sites (in increasing order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DenseOperator> {
        let n = self.dims.len();
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.iter().any(|&k| k >= n) {
            return Err(Error::OutOfRange(format!("sites {keep:?}")));
        }
        let traced: Vec<usize> = (0..n).filter(|k| !keep_sorted.contains(k)).collect();
        let mut perm = keep_sorted.clone();
        perm.extend_from_slice(&traced);
        let p = self.permute_sites(&perm)?;
        let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| self.dims[k]).collect();
        let kd = total_dim(&kept_dims);
        let td = self.dim() / kd;
        let mat = DMatrix::from_fn(kd, kd, |r, c| {
            (0..td).map(|t| p.mat[(r * td + t, c * td + t)]).sum()
        });
        DenseOperator::new(kept_dims, mat)
    }

    /// Applies a local Kraus family to one site: `sum_k K rho K^dagger`.
    pub fn apply_local_channel(&self, site: usize, kraus: &[DMatrix<C64>]) -> Result<DenseOperator> {
        if site >= self.dims.len() {
            return Err(Error::OutOfRange(format!("site {site}")));
        }
        let d = self.dims[site];
        let out_d = kraus.first().map_or(d, |k| k.nrows());
        for k in kraus {
            if k.ncols() != d || k.nrows() != out_d {
                return Err(Error::DimensionMismatch { expected: d, got: k.ncols() });
            }
        }
        let outer: usize = self.dims[..site].iter().product();
        let inner: usize = self.dims[site + 1..].iter().product();
        let mut dims = self.dims.clone();
        dims[site] = out_d;
        let new_total = outer * out_d * inner;
        if new_total > MAX_OPERATOR_DIM {
            return Err(Error::DimensionTooLarge(new_total));
        }
        let old = self.dim();
        let mut out = DMatrix::<C64>::zeros(new_total, new_total);
        // rows first: T_k = (I (x) K (x) I) rho, then T_k (I (x) K^dagger (x) I)
        for k in kraus {
            let mut half = DMatrix::<C64>::zeros(new_total, old);
            for o in 0..outer {
                for i in 0..inner {
                    for r in 0..out_d {
                        let row = (o * out_d + r) * inner + i;
                        for s in 0..d {
                            let kv = k[(r, s)];
                            if kv == C64::default() {
                                continue;
                            }
                            let src = (o * d + s) * inner + i;
                            for col in 0..old {
                                half[(row, col)] += kv * self.mat[(src, col)];
                            }
                        }
                    }
                }
            }
            for o in 0..outer {
                for i in 0..inner {
                    for r in 0..out_d {
                        let col = (o * out_d + r) * inner + i;
                        for s in 0..d {
                            let kv = k[(r, s)].conj();
                            if kv == C64::default() {
                                continue;
                            }
                            let src = (o * d + s) * inner + i;
                            for row in 0..new_total {
                                out[(row, col)] += half[(row, src)] * kv;
                            }
                        }
                    }
                }
            }
        }
        DenseOperator::new(dims, out)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.mat + self.mat.adjoint()).scale(0.5);
        hermitian_eigen(&h).0[0]
    }

    pub fn to_json(&self) -> String {
        let n = self.dim();
        serde_json::to_string(&OperatorFile {
            dims: self.dims.clone(),
            matrix: (0..n)
                .map(|r| (0..n).map(|c| [self.mat[(r, c)].re, self.mat[(r, c)].im]).collect())
                .collect(),
        })
        .expect("operator serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: OperatorFile = serde_json::from_str(s)?;
        let n = f.matrix.len();
        for row in &f.matrix {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        let mat = DMatrix::from_fn(n, n, |r, c| {
            let [re, im] = f.matrix[r][c];
            C64::new(re, im)
        });
        Self::new(f.dims, mat)
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending with
/// eigenvectors in matching columns.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.nrows();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// `<psi|rho|psi>`.
pub fn fidelity(psi: &DenseState, rho: &DenseOperator) -> Result<f64> {
    if psi.dims() != rho.dims() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: rho.dim() });
    }
    let v = psi.to_vector();
    Ok((v.adjoint() * rho.matrix() * &v)[(0, 0)].re)
}

/// `|<psi|phi>|^2`.
pub fn fidelity_pure(psi: &DenseState, phi: &DenseState) -> Result<f64> {
    Ok(psi.inner(phi)?.norm_sqr())
}

/// Complex matrix with i.i.d. standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    let qr = ginibre(n, n, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random mixed state `W W^dagger / Tr`, `W` Ginibre of the given rank.
pub fn random_density<R: Rng + ?Sized>(dims: Vec<usize>, rank: usize, rng: &mut R) -> Result<DenseOperator> {
    let n = check_dims(&dims, MAX_OPERATOR_DIM)?;
    let w = ginibre(n, rank.max(1), rng);
    let rho = &w * w.adjoint();
    let tr = rho.trace().re;
    DenseOperator::new(dims, rho.unscale(tr))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> Result<DenseState> {
    let n = check_dims(&dims, MAX_STATE_DIM)?;
    let amps = (0..n)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    Ok(DenseState::new(dims, amps)?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn permute_and_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_state(vec![2], &mut rng).unwrap();
        let b = random_state(vec![3], &mut rng).unwrap();
        let ab = a.kron(&b).unwrap();
        let ba = b.kron(&a).unwrap();
        let swapped = ab.permute_sites(&[1, 0]).unwrap();
        assert!(fidelity_pure(&swapped, &ba).unwrap() > 1.0 - 1e-12);
        let rho = ab.density().unwrap();
        let rb = rho.partial_trace(&[1]).unwrap();
        assert!(rb.max_abs_diff(&b.density().unwrap()) < 1e-12);
        let back = rho.permute_sites(&[1, 0]).unwrap();
        assert!(back.max_abs_diff(&ba.density().unwrap()) < 1e-12);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = haar_unitary(6, &mut rng);
        let id = &u * u.adjoint();
        assert!((id - DMatrix::<C64>::identity(6, 6)).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn local_channel_matches_full_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density(vec![2, 3, 2], 3, &mut rng).unwrap();
        let u = haar_unitary(3, &mut rng);
        let k0 = u.columns(0, 3).rows(0, 2).into_owned();
        let out = rho.apply_local_channel(1, std::slice::from_ref(&k0)).unwrap();
        let full = DMatrix::<C64>::identity(2, 2).kronecker(&k0).kronecker(&DMatrix::identity(2, 2));
        let expect = &full * rho.matrix() * full.adjoint();
        assert!((out.matrix() - expect).iter().all(|z| z.norm() < 1e-12));
        assert_eq!(out.dims(), &[2, 2, 2]);
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state(vec![2, 2], &mut rng).unwrap();
        assert_eq!(DenseState::from_json(&s.to_json()).unwrap(), s);
        let rho = s.density().unwrap();
        assert_eq!(DenseOperator::from_json(&rho.to_json()).unwrap(), rho);
    }

    #[test]
    fn fidelity_edge_cases() {
        let z = DenseState::basis(vec![2, 2], &[0, 0]).unwrap();
        let o = DenseState::basis(vec![2, 2], &[1, 1]).unwrap();
        assert_eq!(fidelity_pure(&z, &z).unwrap(), 1.0);
        assert_eq!(fidelity_pure(&z, &o).unwrap(), 0.0);
        let mixed = DenseOperator::maximally_mixed(vec![2, 2]).unwrap();
        assert!((fidelity(&z, &mixed).unwrap() - 0.25).abs() < 1e-15);
        let wrong = DenseOperator::maximally_mixed(vec![4]).unwrap();
        assert!(fidelity(&z, &wrong).is_err());
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(DenseState::zeros(vec![2; 21]), Err(Error::DimensionTooLarge(_))));
    }
}
