//! Purifications and the extensions `B → B̃ = BE`, `C → C̃ = CE`.

use crate::error::Result;
use crate::qmat::{eig_hermitian, kron_vec, CVector, DensityMatrix, PureStateVector};
use crate::structure::{build_block_pure, embed_block_vector, SaturatingSpec};

/// Eigenvalues at or below this are dropped from the purifying ancilla.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct PurificationResult {
    /// State on `dims(rho) ++ [d_E]`.
    pub psi: PureStateVector,
    pub d_e: usize,
}

/// `Σ_j √λ_j |v_j> ⊗ |j>_E` over eigenvalues above [`RANK_TOL`], in
/// descending order. `d_E` is the numerical rank.
pub fn purify(rho: &DensityMatrix) -> Result<PurificationResult> {
    let eig = eig_hermitian(rho.matrix())?;
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&j| eig.eigenvalues[j] > RANK_TOL)
        .collect();
    let d_e = kept.len();
    let n = rho.dim();
    let mut amps = CVector::zeros(n * d_e);
    for (e, &j) in kept.iter().enumerate() {
        let s = eig.eigenvalues[j].sqrt();
        for i in 0..n {
            amps[i * d_e + e] = eig.eigenvectors[(i, j)] * s;
        }
    }
    let mut dims = rho.dims().to_vec();
    dims.push(d_e);
    Ok(PurificationResult {
        psi: PureStateVector::normalized(amps, &dims)?,
        d_e,
    })
}

#[derive(Clone, Debug)]
pub struct ExtensionPair {
    /// `ρ_{A B̃}` on `[d_A, d_B d_E]`.
    pub rho_a_btilde: DensityMatrix,
    /// `ρ_{A C̃}` on `[d_A, d_C d_E]`.
    pub rho_a_ctilde: DensityMatrix,
    pub purification: PurificationResult,
}

/// Extensions of a tripartite state through a purification `|ψ>_{ABCE}`.
pub fn extend_with(psi_abce: &PureStateVector) -> Result<(DensityMatrix, DensityMatrix)> {
    let ab = psi_abce.reduced(&[0, 1, 3])?.merge(1, 2)?;
    let ac = psi_abce.reduced(&[0, 2, 3])?.merge(1, 2)?;
    Ok((ab, ac))
}

/// Extensions via the canonical purification.
pub fn extend(rho_abc: &DensityMatrix) -> Result<ExtensionPair> {
    crate::entropy::require_parts(rho_abc, 3, "extend")?;
    let purification = purify(rho_abc)?;
    let (rho_a_btilde, rho_a_ctilde) = extend_with(&purification.psi)?;
    Ok(ExtensionPair {
        rho_a_btilde,
        rho_a_ctilde,
        purification,
    })
}

/// Purification that respects the block structure: block `k` purifies its
/// mixed part `ρ_Z^k` into its own sector `E_k` of dimension `rank(ρ_Z^k)`,
/// sectors stacked in block order.
pub fn purify_saturating(spec: &SaturatingSpec) -> Result<PurificationResult> {
    spec.validate()?;
    let mut parts = Vec::with_capacity(spec.blocks.len());
    for b in &spec.blocks {
        let z = purify(&b.rho_z)?;
        parts.push(z);
    }
    let d_e: usize = parts.iter().map(|z| z.d_e).sum();
    let [d_a, d_b, d_c] = spec.dims();
    let global = [d_a, d_b, d_c, d_e];
    let mut amps = CVector::zeros(d_a * d_b * d_c * d_e);
    let mut off_e = 0;
    for (b, z) in spec.blocks.iter().zip(&parts) {
        // ψ^k ⊗ φ^k on (A, B^L, C^L, B^R, C^R, E_k) → (A, B_k, C_k, E_k)
        let joint = PureStateVector::from_raw(
            kron_vec(b.psi.amplitudes(), z.psi.amplitudes()),
            vec![
                d_a,
                b.partition.b_left,
                b.partition.c_left,
                b.partition.b_right,
                b.partition.c_right,
                z.d_e,
            ],
        );
        let local = build_block_pure(&joint)?;
        let v = embed_block_vector(
            local.amplitudes(),
            [d_a, b.partition.d_b(), b.partition.d_c(), z.d_e],
            global,
            [b.embed_b, b.embed_c, off_e],
        );
        amps += v * crate::qmat::c(b.weight.sqrt(), 0.0);
        off_e += z.d_e;
    }
    Ok(PurificationResult {
        psi: PureStateVector::normalized(amps, &global)?,
        d_e,
    })
}
