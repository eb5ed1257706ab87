use std::cmp::Ordering;

use nalgebra::SymmetricEigen;

use super::{c, hermitian_part, CMatrix, CVector};
use crate::error::{Error, Result};

const TIE_TOL: f64 = 1e-12;

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending and column `j` of `eigenvectors` pairs
/// with `eigenvalues[j]`. Each eigenvector is phased so that its first
/// largest-modulus component is real and positive; within a block of tied
/// eigenvalues columns are ordered lexicographically by `(re, im)`,
/// largest first.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigDecomposition {
    /// `Σ_j λ_j v_j v_j†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvectors.nrows();
        let mut acc = CMatrix::zeros(n, n);
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(j);
            acc += v * v.adjoint() * c(l, 0.0);
        }
        acc
    }
}

fn fix_phase(v: &mut CVector) {
    let mut best = 0;
    let mut best_mod = -1.0;
    for (i, z) in v.iter().enumerate() {
        // first component of (numerically) largest modulus
        if z.norm() > best_mod + 1e-12 {
            best_mod = z.norm();
            best = i;
        }
    }
    if best_mod > 0.0 {
        let ph = v[best].conj() / v[best].norm();
        *v *= ph;
    }
}

fn lex_desc(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match y.re.partial_cmp(&x.re).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
        match y.im.partial_cmp(&x.im).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

fn all_finite(mut it: impl Iterator<Item = f64>) -> bool {
    it.all(f64::is_finite)
}

/// Cyclic Jacobi for Hermitian `h`. Slow but robust; used when the QR-based
/// solver returns non-finite values (it does on some exactly block-sparse
/// inputs).
fn jacobi(mut a: CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.nrows();
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::validation("finite", "eigendecomposition of non-finite matrix"));
    }
    let mut v = CMatrix::identity(n, n);
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            let vals = (0..n).map(|i| a[(i, i)].re).collect();
            return Ok((vals, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // unitary on (p, q): phase then real rotation
                let ph = apq / r;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                let g_pp = c(cs, 0.0);
                let g_pq = c(sn, 0.0);
                let g_qp = -ph.conj() * sn;
                let g_qq = ph.conj() * cs;
                // a <- a g
                for i in 0..n {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = x * g_pp + y * g_qp;
                    a[(i, q)] = x * g_pq + y * g_qq;
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = x * g_pp + y * g_qp;
                    v[(i, q)] = x * g_pq + y * g_qq;
                }
                // a <- g† a
                for j in 0..n {
                    let (x, y) = (a[(p, j)], a[(q, j)]);
                    a[(p, j)] = g_pp.conj() * x + g_qp.conj() * y;
                    a[(q, j)] = g_pq.conj() * x + g_qq.conj() * y;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
            }
        }
    }
    Err(Error::validation("eigensolver", "Jacobi sweeps did not converge"))
}

/// Eigendecomposition of the Hermitian part `(m + m†)/2`.
pub fn eig_hermitian(m: &CMatrix) -> Result<EigDecomposition> {
    if m.nrows() != m.ncols() {
        return Err(Error::dim(format!(
            "eigendecomposition of non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(EigDecomposition {
            eigenvalues: vec![],
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }
    let h = hermitian_part(m);
    let se = SymmetricEigen::new(h.clone());
    let (vals, vecs) = if all_finite(se.eigenvalues.iter().copied()) && se.eigenvectors.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        (se.eigenvalues.iter().copied().collect::<Vec<_>>(), se.eigenvectors)
    } else {
        jacobi(h)?
    };
    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|j| {
            let mut v = vecs.column(j).into_owned();
            fix_phase(&mut v);
            (vals[j], v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

    // Reorder runs of tied eigenvalues.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[end - 1].0 - pairs[end].0).abs() <= TIE_TOL {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lex_desc(&a.1, &b.1));
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<CVector> = pairs.into_iter().map(|p| p.1).collect();
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors: CMatrix::from_columns(&cols),
    })
}

/// Eigenvalues of the Hermitian part of `m`, descending.
///
/// Sizes 1 and 2 use closed forms; that path dominates the optimizers.
pub fn eigenvalues_hermitian(m: &CMatrix) -> Vec<f64> {
    match m.nrows() {
        0 => vec![],
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mean + r, mean - r]
        }
        _ => {
            let h = hermitian_part(m);
            let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
            if !all_finite(ev.iter().copied()) {
                ev = match jacobi(h) {
                    Ok((v, _)) => v,
                    Err(_) => return vec![f64::NAN; m.nrows()],
                };
            }
            ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
            ev
        }
    }
}
