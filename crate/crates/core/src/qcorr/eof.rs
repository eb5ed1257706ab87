//! Entanglement of formation: Wootters closed form and a convex-roof search.

use nalgebra::{SymmetricEigen, QR};
use serde::Serialize;

use super::optim::{best_of, OptimizerConfig};
use crate::entropy::{binary_entropy, entropy_of_matrix, require_parts, shannon_entropy};
use crate::error::{Error, Result};
use crate::qmat::{c, eig_hermitian, eigenvalues_hermitian, hermitian_part, CMatrix, DensityMatrix, StateSampler};

/// Largest total dimension accepted by [`eof_convex_roof`].
pub const MAX_ROOF_DIM: usize = 16;
const RANK_TOL: f64 = 1e-12;
const LOG_FLOOR: f64 = 1e-16;

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::dim(format!("two-qubit state required, got dims {:?}", rho.dims())));
    }
    Ok(())
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho_ab: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho_ab)?;
    let eig = eig_hermitian(rho_ab.matrix())?;
    let mut sqrt_rho = CMatrix::zeros(4, 4);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        sqrt_rho += (v * v.adjoint()) * c(l.max(0.0).sqrt(), 0.0);
    }
    // √ρ̃ = (σy ⊗ σy) √ρ* (σy ⊗ σy), σy ⊗ σy = antidiag(-1, 1, 1, -1)
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let sqrt_tilde = CMatrix::from_fn(4, 4, |i, j| sqrt_rho[(3 - i, 3 - j)].conj() * (sign[i] * sign[j]));
    // singular values of √ρ √ρ̃ are the square roots of the spectrum of √ρ ρ̃ √ρ
    let mut lam: Vec<f64> = (&sqrt_rho * sqrt_tilde).singular_values().iter().copied().collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

pub fn eof_two_qubit(rho_ab: &DensityMatrix) -> Result<f64> {
    let cc = concurrence(rho_ab)?.min(1.0);
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - cc * cc).max(0.0).sqrt())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EofMethod {
    /// One side is one-dimensional.
    Trivial,
    PureState,
    Wootters,
    ConvexRoof,
}

#[derive(Clone, Debug, Serialize)]
pub struct EofResult {
    pub value: f64,
    pub method: EofMethod,
    /// True when `value` is only an upper bound.
    pub upper_bound: bool,
    pub converged: bool,
}

/// Pure-state entanglement of the smaller-side reduction of a bipartite matrix,
/// or the convex roof's per-element term when unnormalized.
fn reduced_on_small_side(w: &CMatrix) -> CMatrix {
    hermitian_part(&(w * w.adjoint()))
}

/// Reshapes a bipartite vector as `small × large`.
fn as_matrix(v: &[num_complex::Complex64], d_a: usize, d_b: usize) -> CMatrix {
    if d_a <= d_b {
        CMatrix::from_fn(d_a, d_b, |a, b| v[a * d_b + b])
    } else {
        CMatrix::from_fn(d_b, d_a, |b, a| v[a * d_b + b])
    }
}

struct Roof {
    /// `√λ_j v_j` reshaped, one per retained eigenvector.
    w: Vec<CMatrix>,
    m: usize,
}

impl Roof {
    fn elements(&self, u: &CMatrix) -> Vec<CMatrix> {
        (0..self.m)
            .map(|i| {
                let mut acc = CMatrix::zeros(self.w[0].nrows(), self.w[0].ncols());
                for (j, wj) in self.w.iter().enumerate() {
                    acc += wj * u[(i, j)];
                }
                acc
            })
            .collect()
    }

    /// `Σ_i [S(σ_i) p_i]` with `σ_i` normalized, i.e. `Σ_i [-Tr σ̃ log σ̃ + p log p]`.
    fn value(&self, u: &CMatrix) -> f64 {
        self.elements(u)
            .iter()
            .map(|mi| {
                let s = reduced_on_small_side(mi);
                let p = s.trace().re;
                if p <= 0.0 {
                    return 0.0;
                }
                let ev: Vec<f64> = eigenvalues_hermitian(&s).iter().map(|x| x / p).collect();
                p * shannon_entropy(&ev)
            })
            .sum()
    }

    /// Euclidean gradient `E_ij = <W_j, 2 G_i M_i>` with `G_i = -log2(σ_i / p_i)`.
    fn gradient(&self, u: &CMatrix) -> CMatrix {
        let r = self.w.len();
        let mut g = CMatrix::zeros(self.m, r);
        for (i, mi) in self.elements(u).iter().enumerate() {
            let s = reduced_on_small_side(mi);
            let p = s.trace().re;
            if p <= 0.0 {
                continue;
            }
            let se = SymmetricEigen::new(s / c(p, 0.0));
            let n = se.eigenvalues.len();
            let mut gi = CMatrix::zeros(n, n);
            for k in 0..n {
                let v = se.eigenvectors.column(k);
                let l = -se.eigenvalues[k].max(LOG_FLOOR).log2();
                gi += (v * v.adjoint()) * c(l, 0.0);
            }
            let gm = gi * mi * c(2.0, 0.0);
            for (j, wj) in self.w.iter().enumerate() {
                g[(i, j)] = wj.dotc(&gm);
            }
        }
        g
    }
}

/// `Re Tr(a† b)`.
fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.dotc(b).re
}

/// Q factor with the phases of `diag(R)` absorbed so the retraction is smooth.
fn qf(x: CMatrix) -> CMatrix {
    let cols = x.ncols();
    let qr = QR::new(x);
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            let mut col = q.column_mut(j);
            col *= ph;
        }
    }
    q
}

fn riemannian(u: &CMatrix, e: &CMatrix) -> CMatrix {
    let h = hermitian_part(&(u.adjoint() * e));
    e - u * h
}

struct Descent {
    value: f64,
    converged: bool,
}

/// Steepest descent on the Stiefel manifold with QR retraction, Barzilai–Borwein
/// trial steps and Armijo backtracking.
fn descend(roof: &Roof, mut u: CMatrix, max_iter: usize, value_tol: f64) -> Descent {
    let mut f = roof.value(&u);
    let mut xi = riemannian(&u, &roof.gradient(&u));
    let mut step = 1.0;
    let mut stalled = 0;
    for _ in 0..max_iter {
        let g2 = inner(&xi, &xi);
        if g2.sqrt() <= 1e-10 {
            return Descent { value: f, converged: true };
        }
        let mut t = step;
        let (mut u_new, mut f_new);
        loop {
            u_new = qf(&u - &xi * c(t, 0.0));
            f_new = roof.value(&u_new);
            if f_new <= f - 1e-4 * t * g2 || t < 1e-14 {
                break;
            }
            t *= 0.5;
        }
        if f_new > f {
            return Descent { value: f, converged: true };
        }
        let xi_new = riemannian(&u_new, &roof.gradient(&u_new));
        let s = &u_new - &u;
        let y = &xi_new - &xi;
        let sy = inner(&s, &y);
        step = if sy > 0.0 { (inner(&s, &s) / sy).clamp(1e-6, 1e3) } else { (2.0 * t).min(1e3) };
        stalled = if f - f_new <= value_tol * f.abs().max(1.0) { stalled + 1 } else { 0 };
        u = u_new;
        f = f_new;
        xi = xi_new;
        if stalled >= 30 {
            return Descent { value: f, converged: true };
        }
    }
    Descent { value: f, converged: false }
}

/// Upper bound on the entanglement of formation by minimizing the average
/// entanglement over size-`m` pure-state decompositions `ψ_i = Σ_j U_ij √λ_j v_j`
/// (default `m = rank²`). Restart 0 is the eigendecomposition, the rest start
/// from Haar isometries. The result is exact only at the global optimum.
pub fn eof_convex_roof(rho_ab: &DensityMatrix, m: Option<usize>, cfg: &OptimizerConfig) -> Result<EofResult> {
    require_parts(rho_ab, 2, "eof_convex_roof")?;
    if rho_ab.dim() > MAX_ROOF_DIM {
        return Err(Error::Capability(format!(
            "convex roof over total dimension {} (limit {MAX_ROOF_DIM})",
            rho_ab.dim()
        )));
    }
    let [d_a, d_b] = [rho_ab.dims()[0], rho_ab.dims()[1]];
    let eig = eig_hermitian(rho_ab.matrix())?;
    let w: Vec<CMatrix> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > RANK_TOL)
        .map(|(j, &l)| {
            let v: Vec<_> = eig.eigenvectors.column(j).iter().map(|z| z * l.sqrt()).collect();
            as_matrix(&v, d_a, d_b)
        })
        .collect();
    let r = w.len();
    let m = m.unwrap_or(r * r).max(r);
    if r == 1 {
        let value = entropy_of_matrix(&reduced_on_small_side(&w[0]));
        return Ok(EofResult {
            value,
            method: EofMethod::PureState,
            upper_bound: false,
            converged: true,
        });
    }
    let roof = Roof { w, m };
    let (_, best) = best_of(
        cfg.restarts,
        |i| {
            let u0 = if i == 0 {
                CMatrix::identity(m, r)
            } else {
                StateSampler::with_stream(cfg.seed, i as u64).isometry(m, r)
            };
            descend(&roof, u0, cfg.max_evals, cfg.value_tol)
        },
        |d| d.value,
    );
    Ok(EofResult {
        value: best.value.max(0.0),
        method: EofMethod::ConvexRoof,
        upper_bound: true,
        converged: best.converged,
    })
}

/// Entanglement of formation by the most exact available route.
pub fn eof(rho_ab: &DensityMatrix, cfg: &OptimizerConfig) -> Result<EofResult> {
    require_parts(rho_ab, 2, "eof")?;
    let exact = |value, method| EofResult {
        value,
        method,
        upper_bound: false,
        converged: true,
    };
    if rho_ab.dims().contains(&1) {
        return Ok(exact(0.0, EofMethod::Trivial));
    }
    if rho_ab.dims() == [2, 2] {
        return Ok(exact(eof_two_qubit(rho_ab)?, EofMethod::Wootters));
    }
    eof_convex_roof(rho_ab, None, cfg)
}
