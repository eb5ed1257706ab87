//! Entropic functionals, in bits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{eigenvalues_hermitian, CMatrix, DensityMatrix};

/// Eigenvalues at or below this contribute nothing (`0 log 0 = 0`).
pub const LOG_CLIP: f64 = 1e-12;

/// `-Σ p log2 p` over entries above [`LOG_CLIP`].
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > LOG_CLIP)
        .map(|&x| -x * x.log2())
        .sum()
}

/// `h(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

/// Entropy of the spectrum of a (normalized) Hermitian matrix.
pub(crate) fn entropy_of_matrix(m: &CMatrix) -> f64 {
    shannon_entropy(&eigenvalues_hermitian(m))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_matrix(rho.matrix())
}

pub(crate) fn require_parts(rho: &DensityMatrix, n: usize, what: &str) -> Result<()> {
    if rho.dims().len() != n {
        return Err(Error::dim(format!(
            "{what} needs {n} subsystems, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

fn marginal_entropy(rho: &DensityMatrix, keep: &[usize]) -> Result<f64> {
    Ok(von_neumann_entropy(&rho.partial_trace(keep)?))
}

/// `I(A:B) = S(A) + S(B) - S(AB)`.
pub fn mutual_information(rho_ab: &DensityMatrix) -> Result<f64> {
    require_parts(rho_ab, 2, "mutual information")?;
    Ok(marginal_entropy(rho_ab, &[0])? + marginal_entropy(rho_ab, &[1])?
        - von_neumann_entropy(rho_ab))
}

/// `S(AB) - S(X)` where `X` is subsystem `conditioned_on`. May be negative.
pub fn conditional_entropy(rho_ab: &DensityMatrix, conditioned_on: usize) -> Result<f64> {
    require_parts(rho_ab, 2, "conditional entropy")?;
    if conditioned_on > 1 {
        return Err(Error::dim(format!(
            "conditioning subsystem {conditioned_on} out of range"
        )));
    }
    Ok(von_neumann_entropy(rho_ab) - marginal_entropy(rho_ab, &[conditioned_on])?)
}

/// The SSA gap `T = S(AB) + S(AC) - S(B) - S(C)` computed along two routes.
#[derive(Clone, Debug, Serialize)]
pub struct TGapReport {
    pub t_a: f64,
    /// From the four marginals of `ρ_ABC` directly.
    pub via_marginals: f64,
    /// As `S(A|B) + S(A|C)`, each conditional entropy reducing its own
    /// bipartite state.
    pub via_conditional: f64,
    pub s_ab: f64,
    pub s_ac: f64,
    pub s_b: f64,
    pub s_c: f64,
}

pub fn t_gap(rho_abc: &DensityMatrix) -> Result<TGapReport> {
    require_parts(rho_abc, 3, "the SSA gap")?;
    let rho_ab = rho_abc.partial_trace(&[0, 1])?;
    let rho_ac = rho_abc.partial_trace(&[0, 2])?;
    let s_ab = von_neumann_entropy(&rho_ab);
    let s_ac = von_neumann_entropy(&rho_ac);
    let s_b = marginal_entropy(rho_abc, &[1])?;
    let s_c = marginal_entropy(rho_abc, &[2])?;
    let via_marginals = s_ab + s_ac - s_b - s_c;
    let via_conditional = conditional_entropy(&rho_ab, 1)? + conditional_entropy(&rho_ac, 1)?;
    Ok(TGapReport {
        t_a: via_marginals,
        via_marginals,
        via_conditional,
        s_ab,
        s_ac,
        s_b,
        s_c,
    })
}

/// The other SSA form: `S(AC) + S(BC) - S(ABC) - S(C)`.
pub fn ssa_gap_form1(rho_abc: &DensityMatrix) -> Result<f64> {
    require_parts(rho_abc, 3, "the SSA gap")?;
    Ok(marginal_entropy(rho_abc, &[0, 2])? + marginal_entropy(rho_abc, &[1, 2])?
        - von_neumann_entropy(rho_abc)
        - marginal_entropy(rho_abc, &[2])?)
}

/// Weighted family of states on one dimension list.
#[derive(Clone, Debug)]
pub struct Ensemble {
    weights: Vec<f64>,
    members: Vec<DensityMatrix>,
    mixture: DensityMatrix,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, members: Vec<DensityMatrix>) -> Result<Self> {
        if weights.len() != members.len() || members.is_empty() {
            return Err(Error::validation(
                "weights length equals members length",
                format!("{} weights, {} members", weights.len(), members.len()),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::validation("nonnegative weights", format!("weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::validation(
                "weights sum to one",
                format!("sum = {total:.12}"),
            ));
        }
        let mixture = DensityMatrix::mixture(&weights, &members)?;
        Ok(Ensemble {
            weights,
            members,
            mixture,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[DensityMatrix] {
        &self.members
    }

    /// `Σ p_k ρ^k`.
    pub fn mixture(&self) -> &DensityMatrix {
        &self.mixture
    }

    /// Ensemble of reduced members on `keep`, same weights.
    pub fn reduced(&self, keep: &[usize]) -> Result<Ensemble> {
        let members = self
            .members
            .iter()
            .map(|m| m.partial_trace(keep))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.weights.clone(), members)
    }
}

/// `χ = S(Σ p_k ρ^k) - Σ p_k S(ρ^k)`.
pub fn holevo_chi(e: &Ensemble) -> f64 {
    let avg: f64 = e
        .weights
        .iter()
        .zip(&e.members)
        .map(|(p, m)| p * von_neumann_entropy(m))
        .sum();
    von_neumann_entropy(&e.mixture) - avg
}

/// `(T(Σ p_k ρ^k), Σ p_k T(ρ^k))`; concavity says `lhs >= rhs`.
pub fn concavity_check(e: &Ensemble) -> Result<(f64, f64)> {
    require_parts(&e.mixture, 3, "concavity check")?;
    let lhs = t_gap(&e.mixture)?.t_a;
    let mut rhs = 0.0;
    for (p, m) in e.weights.iter().zip(&e.members) {
        rhs += p * t_gap(m)?.t_a;
    }
    Ok((lhs, rhs))
}
