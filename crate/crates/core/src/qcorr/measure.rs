//! Rank-1 projective measurements, classical correlation and discord.

use serde::Serialize;

use super::optim::{best_of, nelder_mead, OptimizerConfig};
use crate::entropy::{mutual_information, require_parts, shannon_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::qmat::{c, eigenvalues_hermitian, max_abs, CMatrix, DensityMatrix, StateSampler};

/// Largest measured-side dimension accepted by [`discord`].
pub const MAX_MEASURED_DIM: usize = 8;
const OUTCOME_FLOOR: f64 = 1e-12;

/// An orthonormal basis, stored as the columns of a unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    vectors: CMatrix,
}

impl MeasurementBasis {
    /// Accepts a square matrix whose columns are orthonormal to 1e-10.
    pub fn from_columns(vectors: CMatrix) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::dim("basis matrix must be square"));
        }
        let d = vectors.nrows();
        let gram = vectors.adjoint() * &vectors;
        let dev = max_abs(&(gram - CMatrix::identity(d, d)));
        if dev > 1e-10 {
            return Err(Error::validation("orthonormal basis", format!("Gram deviation {dev:.3e}")));
        }
        Ok(MeasurementBasis { vectors })
    }

    pub fn computational(d: usize) -> Self {
        MeasurementBasis {
            vectors: CMatrix::identity(d, d),
        }
    }

    /// Qubit basis `{|n>, |-n>}` for the Bloch direction `(theta, phi)`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        let (s, co) = (0.5 * theta).sin_cos();
        let e = c(phi.cos(), phi.sin());
        let mut v = CMatrix::zeros(2, 2);
        v[(0, 0)] = c(co, 0.0);
        v[(1, 0)] = e * s;
        v[(0, 1)] = -e.conj() * s;
        v[(1, 1)] = c(co, 0.0);
        MeasurementBasis { vectors: v }
    }

    /// Product of `d(d-1)/2` Givens rotations, one `(θ, φ)` pair each, over
    /// index pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn from_angles(d: usize, params: &[f64]) -> Result<Self> {
        if params.len() != chart_len(d) {
            return Err(Error::dim(format!(
                "{} angles given, chart for d = {d} needs {}",
                params.len(),
                chart_len(d)
            )));
        }
        let mut u = CMatrix::identity(d, d);
        let mut k = 0;
        for i in 0..d {
            for j in i + 1..d {
                let (s, co) = params[k].sin_cos();
                let e = c(params[k + 1].cos(), params[k + 1].sin());
                k += 2;
                for col in 0..d {
                    let (x, y) = (u[(i, col)], u[(j, col)]);
                    u[(i, col)] = x * co - e.conj() * y * s;
                    u[(j, col)] = e * x * s + y * co;
                }
            }
        }
        Ok(MeasurementBasis { vectors: u })
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }
}

impl Serialize for MeasurementBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cols: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|j| self.vectors.column(j).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        cols.serialize(s)
    }
}

/// Number of real parameters of the basis chart.
pub fn chart_len(d: usize) -> usize {
    d * (d.max(1) - 1)
}

/// Unnormalized conditional states `(I ⊗ <b_k|) ρ (I ⊗ |b_k>)` of the
/// unmeasured side, with the measured side last.
fn conditional_states(rho: &CMatrix, d_a: usize, basis: &CMatrix) -> Vec<CMatrix> {
    let d_x = basis.nrows();
    (0..d_x)
        .map(|k| {
            let b = basis.column(k);
            let mut s = CMatrix::zeros(d_a, d_a);
            for a in 0..d_a {
                for a2 in 0..d_a {
                    let mut acc = c(0.0, 0.0);
                    for x in 0..d_x {
                        let bx = b[x].conj();
                        if bx == c(0.0, 0.0) {
                            continue;
                        }
                        for x2 in 0..d_x {
                            acc += bx * rho[(a * d_x + x, a2 * d_x + x2)] * b[x2];
                        }
                    }
                    s[(a, a2)] = acc;
                }
            }
            s
        })
        .collect()
}

/// `Σ_k p_k S(ρ_{A|k})` after measuring the last subsystem in `basis`.
fn post_measurement_entropy(rho: &CMatrix, d_a: usize, basis: &CMatrix) -> f64 {
    let mut total = 0.0;
    for s in conditional_states(rho, d_a, basis) {
        let p: f64 = (0..d_a).map(|i| s[(i, i)].re).sum();
        if p <= OUTCOME_FLOOR {
            continue;
        }
        let ev = eigenvalues_hermitian(&(s / c(p, 0.0)));
        total += p * shannon_entropy(&ev);
    }
    total
}

/// Bipartite state with the measured side moved last.
fn measured_last(rho_ab: &DensityMatrix, measured: usize) -> Result<DensityMatrix> {
    require_parts(rho_ab, 2, "a measured bipartite state")?;
    match measured {
        1 => Ok(rho_ab.clone()),
        0 => rho_ab.permute(&[1, 0]),
        _ => Err(Error::dim(format!("measured subsystem {measured} not in {{0, 1}}"))),
    }
}

/// `S(ρ_A) − Σ_k p_k S(ρ_{A|k})` for a measurement of subsystem `measured`.
pub fn classical_correlation_at(
    rho_ab: &DensityMatrix,
    basis: &MeasurementBasis,
    measured: usize,
) -> Result<f64> {
    let r = measured_last(rho_ab, measured)?;
    let [d_a, d_x] = [r.dims()[0], r.dims()[1]];
    if basis.dim() != d_x {
        return Err(Error::dim(format!(
            "basis dimension {} but measured subsystem has {d_x}",
            basis.dim()
        )));
    }
    let s_a = von_neumann_entropy(&r.partial_trace(&[0])?);
    Ok(s_a - post_measurement_entropy(r.matrix(), d_a, basis.vectors()))
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscordResult {
    pub discord: f64,
    pub classical_correlation: f64,
    pub mutual_information: f64,
    pub optimal_basis: MeasurementBasis,
    pub restarts_used: usize,
    /// Restart that produced the optimum.
    pub best_restart: usize,
    pub converged: bool,
}

/// `I(A:X) − max_Π J` over rank-1 projective measurements of `measured`,
/// by multi-start Nelder–Mead over the Givens chart. Restart 0 starts from
/// the computational basis, the others from seeded random angles.
pub fn discord(rho_ab: &DensityMatrix, measured: usize, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    let r = measured_last(rho_ab, measured)?;
    let [d_a, d_x] = [r.dims()[0], r.dims()[1]];
    if d_x > MAX_MEASURED_DIM {
        return Err(Error::Capability(format!(
            "discord over a {d_x}-dimensional measured side (limit {MAX_MEASURED_DIM})"
        )));
    }
    let mi = mutual_information(&r)?;
    let s_a = von_neumann_entropy(&r.partial_trace(&[0])?);
    let n = chart_len(d_x);
    let m = r.matrix();
    let objective = |x: &[f64]| {
        let b = MeasurementBasis::from_angles(d_x, x).unwrap();
        post_measurement_entropy(m, d_a, b.vectors())
    };
    let restarts = cfg.restarts.max(1);
    let (best, min) = best_of(
        restarts,
        |i| {
            let x0: Vec<f64> = if i == 0 {
                vec![0.0; n]
            } else {
                let mut s = StateSampler::with_stream(cfg.seed, i as u64);
                (0..n)
                    .map(|k| {
                        if k % 2 == 0 {
                            s.uniform(0.0, std::f64::consts::PI)
                        } else {
                            s.uniform(0.0, 2.0 * std::f64::consts::PI)
                        }
                    })
                    .collect()
            };
            nelder_mead(objective, &x0, 0.3, cfg.max_evals, cfg.param_tol, cfg.value_tol)
        },
        |m| m.value,
    );
    let basis = MeasurementBasis::from_angles(d_x, &min.x)?;
    let j = s_a - min.value;
    Ok(DiscordResult {
        discord: mi - j,
        classical_correlation: j,
        mutual_information: mi,
        optimal_basis: basis,
        restarts_used: restarts,
        best_restart: best,
        converged: min.converged,
    })
}
