//! Dense complex linear algebra for finite-dimensional quantum states.
//!
//! All multipartite objects carry an ordered list of subsystem dimensions.
//! Subsystem 0 is the slowest-varying tensor index (big-endian), so the basis
//! state `|i_0 i_1 ... i_{n-1}>` sits at linear index
//! `sum_s i_s * prod(dims[s+1..])`.

mod eig;
pub mod io;
mod random;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eig::{eig_hermitian, eigenvalues_hermitian, EigDecomposition};
pub use random::{random_density, random_pure, StateSampler};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default tolerance for state invariants.
pub const STATE_TOL: f64 = 1e-10;

const CLIP_FLOOR: f64 = 1e-14;

#[cfg(test)]
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Standard Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub(crate) fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub(crate) fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::dim("dimension list is empty"));
    }
    if let Some(pos) = dims.iter().position(|&d| d == 0) {
        return Err(Error::dim(format!("subsystem {pos} has dimension 0")));
    }
    Ok(dims.iter().product())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Linear offsets of every multi-index over `subsystems` (first one slowest).
fn offsets(dims: &[usize], strides: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &s in subsystems {
        let mut next = Vec::with_capacity(out.len() * dims[s]);
        for &o in &out {
            for x in 0..dims[s] {
                next.push(o + x * strides[s]);
            }
        }
        out = next;
    }
    out
}

fn normalize_keep(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::dim("keep set is empty"));
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if let Some(&bad) = k.iter().find(|&&i| i >= n) {
        return Err(Error::dim(format!(
            "subsystem index {bad} out of range for {n} subsystems"
        )));
    }
    Ok(k)
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::dim(format!(
            "permutation has {} entries, expected {n}",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::dim(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Partial trace of a raw matrix, keeping `keep` (sorted, unique) in order.
pub(crate) fn partial_trace_raw(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let st = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let ok = offsets(dims, &st, keep);
    let ot = offsets(dims, &st, &traced);
    let n = ok.len();
    CMatrix::from_fn(n, n, |i, j| {
        let (ri, rj) = (ok[i], ok[j]);
        ot.iter().map(|&t| m[(ri + t, rj + t)]).sum()
    })
}

fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    offsets(dims, &strides(dims), perm)
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    data: CMatrix,
}

impl DensityMatrix {
    /// Validates `m` at the default tolerance. See [`validate_density`].
    pub fn new(m: CMatrix, dims: &[usize]) -> Result<Self> {
        validate_density(&m, dims, STATE_TOL)
    }

    /// Wraps a matrix already known to be a state (up to rounding).
    pub(crate) fn from_raw(data: CMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(data.nrows(), dims.iter().product::<usize>());
        DensityMatrix { dims, data }
    }

    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let n = check_dims(dims)?;
        Ok(Self::from_raw(
            CMatrix::identity(n, n) * c(1.0 / n as f64, 0.0),
            dims.to_vec(),
        ))
    }

    /// Diagonal state with the given probabilities in the computational basis.
    pub fn diagonal(probs: &[f64], dims: &[usize]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| c(p, 0.0)),
        ));
        Self::new(m, dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_hermitian(&self.data)
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > tol).count()
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    /// Reorders subsystems: new subsystem `i` is old subsystem `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<DensityMatrix> {
        check_perm(perm, self.dims.len())?;
        let map = permutation_map(&self.dims, perm);
        let n = map.len();
        let data = CMatrix::from_fn(n, n, |i, j| self.data[(map[i], map[j])]);
        Ok(Self::from_raw(data, perm.iter().map(|&p| self.dims[p]).collect()))
    }

    /// Same matrix, different factorization of the total dimension.
    pub fn regroup(&self, dims: &[usize]) -> Result<DensityMatrix> {
        let n = check_dims(dims)?;
        if n != self.dim() {
            return Err(Error::dim(format!(
                "cannot regroup dimension {} as {dims:?}",
                self.dim()
            )));
        }
        Ok(Self::from_raw(self.data.clone(), dims.to_vec()))
    }

    /// Merges adjacent subsystems `first..=last` into one.
    pub fn merge(&self, first: usize, last: usize) -> Result<DensityMatrix> {
        self.regroup(&merge_dims(&self.dims, first, last)?)
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_raw(kron(&self.data, &other.data), dims)
    }

    /// Convex combination of states sharing one dimension list.
    pub fn mixture(weights: &[f64], members: &[DensityMatrix]) -> Result<DensityMatrix> {
        if weights.len() != members.len() || members.is_empty() {
            return Err(Error::validation(
                "weights length equals members length",
                format!("{} weights for {} members", weights.len(), members.len()),
            ));
        }
        let dims = members[0].dims.clone();
        let n = members[0].dim();
        let mut acc = CMatrix::zeros(n, n);
        for (w, m) in weights.iter().zip(members) {
            if m.dims != dims {
                return Err(Error::dim(format!(
                    "member dims {:?} differ from {:?}",
                    m.dims, dims
                )));
            }
            acc += &m.data * c(*w, 0.0);
        }
        validate_density(&acc, &dims, STATE_TOL)
    }
}

pub(crate) fn merge_dims(dims: &[usize], first: usize, last: usize) -> Result<Vec<usize>> {
    if first > last || last >= dims.len() {
        return Err(Error::dim(format!(
            "cannot merge subsystems {first}..={last} of {dims:?}"
        )));
    }
    let mut out = dims[..first].to_vec();
    out.push(dims[first..=last].iter().product());
    out.extend_from_slice(&dims[last + 1..]);
    Ok(out)
}

/// Reduced state on `keep`, in the original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = normalize_keep(keep, rho.dims.len())?;
    let data = partial_trace_raw(&rho.data, &rho.dims, &keep);
    let dims = keep.iter().map(|&k| rho.dims[k]).collect();
    Ok(DensityMatrix::from_raw(data, dims))
}

/// Checks every [`DensityMatrix`] invariant at tolerance `tol`.
///
/// The Hermitian part is taken; eigenvalues in `[-tol, 0)` are clipped and
/// the result renormalized. Negative eigenvalues above `-1e-14` are rounding
/// noise and are left untouched.
pub fn validate_density(m: &CMatrix, dims: &[usize], tol: f64) -> Result<DensityMatrix> {
    let n = check_dims(dims)?;
    if m.nrows() != m.ncols() || m.nrows() != n {
        return Err(Error::validation(
            "side length equals product of dims",
            format!("{}x{} matrix for dims {dims:?}", m.nrows(), m.ncols()),
        ));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::validation("finite entries", "matrix has NaN or Inf"));
    }
    let asym = max_abs(&(m - m.adjoint()));
    if asym > tol {
        return Err(Error::validation(
            "hermitian",
            format!("max |M - M†| = {asym:.3e} exceeds {tol:.1e}"),
        ));
    }
    let h = hermitian_part(m);
    let tr = h.trace().re;
    if (tr - 1.0).abs() > tol {
        return Err(Error::validation(
            "unit trace",
            format!("trace = {tr:.12} deviates from 1 by more than {tol:.1e}"),
        ));
    }
    let e = eig_hermitian(&h)?;
    let min = e.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::validation(
            "positive semidefinite",
            format!("smallest eigenvalue {min:.3e} below -{tol:.1e}"),
        ));
    }
    if min < -CLIP_FLOOR {
        let clipped: Vec<f64> = e.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let mut acc = CMatrix::zeros(n, n);
        for (j, &l) in clipped.iter().enumerate() {
            if l > 0.0 {
                let v = e.eigenvectors.column(j).into_owned();
                acc += projector(&v) * c(l / total, 0.0);
            }
        }
        return Ok(DensityMatrix::from_raw(acc, dims.to_vec()));
    }
    Ok(DensityMatrix::from_raw(h, dims.to_vec()))
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateVector {
    dims: Vec<usize>,
    amps: CVector,
}

impl PureStateVector {
    pub fn new(amps: CVector, dims: &[usize]) -> Result<Self> {
        let n = check_dims(dims)?;
        if amps.len() != n {
            return Err(Error::validation(
                "length equals product of dims",
                format!("{} amplitudes for dims {dims:?}", amps.len()),
            ));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("finite entries", "vector has NaN or Inf"));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::validation(
                "unit norm",
                format!("norm = {norm:.12}"),
            ));
        }
        Ok(PureStateVector {
            dims: dims.to_vec(),
            amps,
        })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: CVector, dims: &[usize]) -> Result<Self> {
        let norm = amps.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::validation("unit norm", "cannot normalize a zero vector"));
        }
        Self::new(amps / c(norm, 0.0), dims)
    }

    /// Computational basis state `|index>`.
    pub fn basis(index: usize, dims: &[usize]) -> Result<Self> {
        let n = check_dims(dims)?;
        if index >= n {
            return Err(Error::dim(format!("basis index {index} >= {n}")));
        }
        let mut v = CVector::zeros(n);
        v[index] = ONE;
        Self::new(v, dims)
    }

    /// Real amplitudes, normalized.
    pub fn from_real(amps: &[f64], dims: &[usize]) -> Result<Self> {
        Self::normalized(
            CVector::from_iterator(amps.len(), amps.iter().map(|&a| c(a, 0.0))),
            dims,
        )
    }

    pub(crate) fn from_raw(amps: CVector, dims: Vec<usize>) -> Self {
        PureStateVector { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_raw(hermitian_part(&projector(&self.amps)), self.dims.clone())
    }

    pub fn kron(&self, other: &PureStateVector) -> PureStateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureStateVector::from_raw(kron_vec(&self.amps, &other.amps), dims)
    }

    pub fn permute(&self, perm: &[usize]) -> Result<PureStateVector> {
        check_perm(perm, self.dims.len())?;
        let map = permutation_map(&self.dims, perm);
        let amps = CVector::from_iterator(map.len(), map.iter().map(|&k| self.amps[k]));
        Ok(PureStateVector::from_raw(
            amps,
            perm.iter().map(|&p| self.dims[p]).collect(),
        ))
    }

    pub fn regroup(&self, dims: &[usize]) -> Result<PureStateVector> {
        let n = check_dims(dims)?;
        if n != self.amps.len() {
            return Err(Error::dim(format!(
                "cannot regroup dimension {} as {dims:?}",
                self.amps.len()
            )));
        }
        Ok(PureStateVector::from_raw(self.amps.clone(), dims.to_vec()))
    }

    /// Reduced state on `keep` computed as `M M†` of the reshaped amplitudes.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_keep(keep, self.dims.len())?;
        let rest: Vec<usize> = (0..self.dims.len()).filter(|i| !keep.contains(i)).collect();
        let mut perm = keep.clone();
        perm.extend_from_slice(&rest);
        let p = self.permute(&perm)?;
        let dk: usize = keep.iter().map(|&k| self.dims[k]).product();
        let dr = self.amps.len() / dk;
        let m = CMatrix::from_fn(dk, dr, |i, j| p.amps[i * dr + j]);
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix::from_raw(hermitian_part(&(&m * m.adjoint())), dims))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> PureStateVector {
        PureStateVector::from_real(&[1.0, 0.0, 0.0, 1.0], &[2, 2]).unwrap()
    }

    /// Oracle: direct index-sum definition of the partial trace for three subsystems,
    /// tracing the middle one.
    fn trace_middle_bruteforce(m: &CMatrix, d: [usize; 3]) -> CMatrix {
        let [da, db, dc] = d;
        let idx = |a: usize, b: usize, cc: usize| (a * db + b) * dc + cc;
        let mut out = CMatrix::zeros(da * dc, da * dc);
        for a in 0..da {
            for cc in 0..dc {
                for a2 in 0..da {
                    for c2 in 0..dc {
                        let mut s = ZERO;
                        for b in 0..db {
                            s += m[(idx(a, b, cc), idx(a2, b, c2))];
                        }
                        out[(a * dc + cc, a2 * dc + c2)] = s;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn kron_identities_and_projectors() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4, 4));
        let p0 = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, ZERO]));
        let p1 = CMatrix::from_diagonal(&CVector::from_vec(vec![ZERO, ONE]));
        let expect = CMatrix::from_diagonal(&CVector::from_vec(vec![ZERO, ONE, ZERO, ZERO]));
        assert_eq!(kron(&p0, &p1), expect);
    }

    #[test]
    fn kron_matches_index_formula() {
        let mut s = StateSampler::new(3);
        let a = s.ginibre(2, 2);
        let b = s.ginibre(2, 2);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for kk in 0..2 {
                    for l in 0..2 {
                        let z = k[(i * 2 + kk, j * 2 + l)] - a[(i, j)] * b[(kk, l)];
                        assert!(z.norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = bell().density();
        let r = rho.partial_trace(&[0]).unwrap();
        assert!(max_abs(&(r.matrix() - CMatrix::identity(2, 2) * c(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn product_factor_recovery() {
        let a = random_density(&[2], 2, 1).unwrap();
        let b = random_density(&[3], 3, 2).unwrap();
        let r = a.kron(&b).partial_trace(&[0]).unwrap();
        assert!(max_abs(&(r.matrix() - a.matrix())) < 1e-12);
        let r = a.kron(&b).partial_trace(&[1]).unwrap();
        assert!(max_abs(&(r.matrix() - b.matrix())) < 1e-12);
    }

    #[test]
    fn middle_trace_matches_index_sum() {
        let rho = random_density(&[2, 3, 2], 5, 11).unwrap();
        let fast = rho.partial_trace(&[0, 2]).unwrap();
        let slow = trace_middle_bruteforce(rho.matrix(), [2, 3, 2]);
        assert!(max_abs(&(fast.matrix() - slow)) < 1e-15);
        assert_eq!(fast.dims(), &[2, 2]);
    }

    #[test]
    fn keep_errors() {
        let rho = DensityMatrix::maximally_mixed(&[2, 2]).unwrap();
        assert!(matches!(rho.partial_trace(&[]), Err(Error::Dimension(_))));
        assert!(matches!(rho.partial_trace(&[2]), Err(Error::Dimension(_))));
    }

    #[test]
    fn pure_reduction_matches_density_route() {
        let psi = random_pure(&[2, 3, 2], 5).unwrap();
        let a = psi.reduced(&[2, 0]).unwrap();
        let b = psi.density().partial_trace(&[0, 2]).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-14);
    }

    #[test]
    fn permutation_swaps_factors() {
        let a = random_density(&[2], 2, 1).unwrap();
        let b = random_density(&[3], 3, 2).unwrap();
        let ab = a.kron(&b);
        let ba = ab.permute(&[1, 0]).unwrap();
        assert!(max_abs(&(ba.matrix() - b.kron(&a).matrix())) < 1e-15);
        assert_eq!(ba.dims(), &[3, 2]);
        assert!(ab.permute(&[0, 0]).is_err());
    }

    #[test]
    fn validate_accepts_and_rejects() {
        let half = CMatrix::identity(2, 2) * c(0.5, 0.0);
        assert!(validate_density(&half, &[2], STATE_TOL).is_ok());

        let bad_trace = CMatrix::identity(2, 2) * c(0.6, 0.0);
        match validate_density(&bad_trace, &[2], STATE_TOL) {
            Err(Error::Validation { invariant, .. }) => assert_eq!(invariant, "unit trace"),
            other => panic!("{other:?}"),
        }

        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.1, 0.0), c(-0.1, 0.0)]));
        match validate_density(&neg, &[2], STATE_TOL) {
            Err(Error::Validation { invariant, .. }) => {
                assert_eq!(invariant, "positive semidefinite")
            }
            other => panic!("{other:?}"),
        }

        match validate_density(&half, &[3], STATE_TOL) {
            Err(Error::Validation { invariant, .. }) => {
                assert_eq!(invariant, "side length equals product of dims")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clipped() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0 + 5e-11, 0.0),
            c(-5e-11, 0.0),
        ]));
        let rho = validate_density(&m, &[2], STATE_TOL).unwrap();
        let ev = rho.eigenvalues();
        assert!(ev[1] >= 0.0);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn merge_and_regroup() {
        let rho = DensityMatrix::maximally_mixed(&[2, 3, 2]).unwrap();
        assert_eq!(rho.merge(1, 2).unwrap().dims(), &[2, 6]);
        assert!(rho.regroup(&[5]).is_err());
    }
}
