//! States that saturate strong subadditivity.
//!
//! A saturating state is a mixture `Σ_k p_k |ψ^k_{A Y_k}><ψ^k| ⊗ ρ^k_{Z_k}` where
//! `Y_k = B_k^L C_k^L`, `Z_k = B_k^R C_k^R`, and the blocks' `B` and `C`
//! marginals are mutually orthogonal. Each block lives on a coordinate
//! subspace of the global `H_B` and `H_C`, given by an offset.

use serde::{Deserialize, Serialize};

use crate::entropy::t_gap;
use crate::error::{Error, Result};
use crate::qmat::io::RawState;
use crate::qmat::{c, max_abs, CMatrix, CVector, DensityMatrix, PureStateVector, StateSampler};

/// Default threshold on the Frobenius overlap `‖ρ^k ρ^k'‖_F`.
pub const ORTHO_TOL: f64 = 1e-10;

/// `(d_{B^L}, d_{B^R}, d_{C^L}, d_{C^R})` of one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[usize; 4]", into = "[usize; 4]")]
pub struct Partition {
    pub b_left: usize,
    pub b_right: usize,
    pub c_left: usize,
    pub c_right: usize,
}

impl From<[usize; 4]> for Partition {
    fn from(p: [usize; 4]) -> Self {
        Partition {
            b_left: p[0],
            b_right: p[1],
            c_left: p[2],
            c_right: p[3],
        }
    }
}

impl From<Partition> for [usize; 4] {
    fn from(p: Partition) -> Self {
        [p.b_left, p.b_right, p.c_left, p.c_right]
    }
}

impl Partition {
    pub fn new(b_left: usize, b_right: usize, c_left: usize, c_right: usize) -> Self {
        Partition {
            b_left,
            b_right,
            c_left,
            c_right,
        }
    }

    pub fn d_b(&self) -> usize {
        self.b_left * self.b_right
    }

    pub fn d_c(&self) -> usize {
        self.c_left * self.c_right
    }
}

#[derive(Clone, Debug)]
pub struct SaturatingBlock {
    pub weight: f64,
    /// Pure part on `[d_A, d_{B^L}, d_{C^L}]`.
    pub psi: PureStateVector,
    /// Mixed part on `[d_{B^R}, d_{C^R}]`.
    pub rho_z: DensityMatrix,
    pub partition: Partition,
    /// First global `B` basis index of this block's `B` factor.
    pub embed_b: usize,
    pub embed_c: usize,
}

#[derive(Clone, Debug)]
pub struct SaturatingSpec {
    pub blocks: Vec<SaturatingBlock>,
    pub d_b: usize,
    pub d_c: usize,
    /// Declares the embeddings mutually orthogonal on both `B` and `C`.
    pub orthogonal: bool,
}

fn ranges_overlap(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 < b.0 + b.1 && b.0 < a.0 + a.1
}

impl SaturatingSpec {
    /// Global `B`/`C` dimensions inferred as the smallest that hold every block.
    pub fn new(blocks: Vec<SaturatingBlock>, orthogonal: bool) -> Result<Self> {
        let d_b = blocks
            .iter()
            .map(|b| b.embed_b + b.partition.d_b())
            .max()
            .unwrap_or(0);
        let d_c = blocks
            .iter()
            .map(|b| b.embed_c + b.partition.d_c())
            .max()
            .unwrap_or(0);
        Self::with_dims(blocks, d_b, d_c, orthogonal)
    }

    pub fn with_dims(
        blocks: Vec<SaturatingBlock>,
        d_b: usize,
        d_c: usize,
        orthogonal: bool,
    ) -> Result<Self> {
        let spec = SaturatingSpec {
            blocks,
            d_b,
            d_c,
            orthogonal,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn d_a(&self) -> usize {
        self.blocks.first().map(|b| b.psi.dims()[0]).unwrap_or(0)
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.d_a(), self.d_b, self.d_c]
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::validation("at least one block", "spec has no blocks"));
        }
        let total: f64 = self.blocks.iter().map(|b| b.weight).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::validation(
                "weights sum to one",
                format!("sum = {total:.12}"),
            ));
        }
        let d_a = self.d_a();
        for (k, b) in self.blocks.iter().enumerate() {
            let p = b.partition;
            if !(b.weight > 0.0) {
                return Err(Error::validation(
                    "positive weights",
                    format!("block {k} weight {}", b.weight),
                ));
            }
            if b.psi.dims() != [d_a, p.b_left, p.c_left] {
                return Err(Error::dim(format!(
                    "block {k}: pure part dims {:?}, partition wants [{d_a}, {}, {}]",
                    b.psi.dims(),
                    p.b_left,
                    p.c_left
                )));
            }
            if b.rho_z.dims() != [p.b_right, p.c_right] {
                return Err(Error::dim(format!(
                    "block {k}: mixed part dims {:?}, partition wants [{}, {}]",
                    b.rho_z.dims(),
                    p.b_right,
                    p.c_right
                )));
            }
            if b.embed_b + p.d_b() > self.d_b || b.embed_c + p.d_c() > self.d_c {
                return Err(Error::dim(format!(
                    "block {k} does not fit in d_B = {}, d_C = {}",
                    self.d_b, self.d_c
                )));
            }
        }
        if self.orthogonal {
            for i in 0..self.blocks.len() {
                for j in i + 1..self.blocks.len() {
                    let (x, y) = (&self.blocks[i], &self.blocks[j]);
                    let b_overlap = ranges_overlap(
                        (x.embed_b, x.partition.d_b()),
                        (y.embed_b, y.partition.d_b()),
                    );
                    let c_overlap = ranges_overlap(
                        (x.embed_c, x.partition.d_c()),
                        (y.embed_c, y.partition.d_c()),
                    );
                    if b_overlap || c_overlap {
                        return Err(Error::validation(
                            "orthogonal embeddings",
                            format!(
                                "blocks {i} and {j} overlap on {}",
                                if b_overlap { "B" } else { "C" }
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Each block's tripartite state `ρ^k_ABC`, embedded in the global space.
    pub fn block_states(&self) -> Result<Vec<DensityMatrix>> {
        self.blocks
            .iter()
            .map(|b| {
                let local = build_block(&b.psi, &b.rho_z, b.partition)?;
                Ok(embed_block(&local, self.d_b, self.d_c, b.embed_b, b.embed_c))
            })
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        raw.into_spec()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawSpec::from_spec(self)).expect("spec serializes")
    }

    /// Random valid spec with orthogonal consecutive embeddings into the given
    /// global dimensions. Block count is drawn from `1..=min(d_b, d_c, max_blocks)`.
    pub fn random_for_dims(
        s: &mut StateSampler,
        d_a: usize,
        d_b: usize,
        d_c: usize,
        max_blocks: usize,
    ) -> Result<Self> {
        let kmax = d_b.min(d_c).min(max_blocks).max(1);
        let k = 1 + s.index(kmax);
        let b_sizes = random_composition(s, d_b, k);
        let c_sizes = random_composition(s, d_c, k);
        let weights = s.probabilities(k);
        let (mut ob, mut oc) = (0, 0);
        let mut blocks = Vec::with_capacity(k);
        for i in 0..k {
            let (bl, br) = random_factorization(s, b_sizes[i]);
            let (cl, cr) = random_factorization(s, c_sizes[i]);
            let rank = 1 + s.index(br * cr);
            blocks.push(SaturatingBlock {
                weight: weights[i],
                psi: s.pure(&[d_a, bl, cl])?,
                rho_z: s.density(&[br, cr], rank)?,
                partition: Partition::new(bl, br, cl, cr),
                embed_b: ob,
                embed_c: oc,
            });
            ob += b_sizes[i];
            oc += c_sizes[i];
        }
        Self::with_dims(blocks, d_b, d_c, true)
    }

    /// Random spec with `d_A ∈ {2, 3}`, up to three blocks, and total dimension
    /// `d_A d_B d_C <= max_total`.
    pub fn random(s: &mut StateSampler, max_total: usize) -> Result<Self> {
        loop {
            let d_a = 2 + s.index(2);
            let d_b = 1 + s.index(6);
            let d_c = 1 + s.index(6);
            if d_a * d_b * d_c <= max_total {
                return Self::random_for_dims(s, d_a, d_b, d_c, 3);
            }
        }
    }
}

/// `n` split into `k` positive parts.
fn random_composition(s: &mut StateSampler, n: usize, k: usize) -> Vec<usize> {
    let mut parts = vec![1; k];
    for _ in 0..n - k {
        let i = s.index(k);
        parts[i] += 1;
    }
    parts
}

/// `n = l * r` with `l` a uniformly chosen divisor.
fn random_factorization(s: &mut StateSampler, n: usize) -> (usize, usize) {
    let divs: Vec<usize> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let l = divs[s.index(divs.len())];
    (l, n / l)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    weight: f64,
    psi: RawState,
    #[serde(rename = "rhoZ")]
    rho_z: RawState,
    partition: Partition,
    #[serde(rename = "embedB", default)]
    embed_b: usize,
    #[serde(rename = "embedC", default)]
    embed_c: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    blocks: Vec<RawBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dims: Option<[usize; 3]>,
    #[serde(default = "default_true")]
    orthogonal: bool,
}

fn default_true() -> bool {
    true
}

impl RawSpec {
    fn into_spec(self) -> Result<SaturatingSpec> {
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for rb in self.blocks {
            let psi = match rb.psi.into_state(crate::qmat::STATE_TOL)? {
                crate::qmat::io::StateFile::Pure(p) => p,
                _ => {
                    return Err(Error::Format {
                        field: "psi".into(),
                        msg: "expected a `vector` state".into(),
                    })
                }
            };
            let rho_z = rb.rho_z.into_state(crate::qmat::STATE_TOL)?.into_density();
            blocks.push(SaturatingBlock {
                weight: rb.weight,
                psi,
                rho_z,
                partition: rb.partition,
                embed_b: rb.embed_b,
                embed_c: rb.embed_c,
            });
        }
        match self.dims {
            Some([d_a, d_b, d_c]) => {
                let spec = SaturatingSpec::with_dims(blocks, d_b, d_c, self.orthogonal)?;
                if spec.d_a() != d_a {
                    return Err(Error::dim(format!(
                        "spec dims say d_A = {d_a}, blocks have {}",
                        spec.d_a()
                    )));
                }
                Ok(spec)
            }
            None => SaturatingSpec::new(blocks, self.orthogonal),
        }
    }

    fn from_spec(spec: &SaturatingSpec) -> Self {
        RawSpec {
            blocks: spec
                .blocks
                .iter()
                .map(|b| RawBlock {
                    weight: b.weight,
                    psi: RawState::from_pure(&b.psi),
                    rho_z: RawState::from_density(&b.rho_z),
                    partition: b.partition,
                    embed_b: b.embed_b,
                    embed_c: b.embed_c,
                })
                .collect(),
            dims: Some(spec.dims()),
            orthogonal: spec.orthogonal,
        }
    }
}

/// `|ψ_AY><ψ_AY| ⊗ ρ_Z` with legs reordered to `(A, B^L B^R, C^L C^R)`.
pub fn build_block(
    psi_ay: &PureStateVector,
    rho_z: &DensityMatrix,
    partition: Partition,
) -> Result<DensityMatrix> {
    let p = partition;
    if psi_ay.dims().len() != 3 || psi_ay.dims()[1..] != [p.b_left, p.c_left] {
        return Err(Error::dim(format!(
            "pure part dims {:?} do not match partition (B^L, C^L) = ({}, {})",
            psi_ay.dims(),
            p.b_left,
            p.c_left
        )));
    }
    if rho_z.dims() != [p.b_right, p.c_right] {
        return Err(Error::dim(format!(
            "mixed part dims {:?} do not match partition (B^R, C^R) = ({}, {})",
            rho_z.dims(),
            p.b_right,
            p.c_right
        )));
    }
    let d_a = psi_ay.dims()[0];
    psi_ay
        .density()
        .kron(rho_z)
        .permute(&[0, 1, 3, 2, 4])?
        .regroup(&[d_a, p.d_b(), p.d_c()])
}

/// Pure counterpart of [`build_block`]: `(A, B^L, C^L, B^R, C^R, E)` legs
/// regrouped to `(A, B^L B^R, C^L C^R, E)`.
pub(crate) fn build_block_pure(joint: &PureStateVector) -> Result<PureStateVector> {
    let d = joint.dims().to_vec();
    joint
        .permute(&[0, 1, 3, 2, 4, 5])?
        .regroup(&[d[0], d[1] * d[3], d[2] * d[4], d[5]])
}

fn embed_index(d_b: usize, d_c: usize, local: [usize; 2], off: [usize; 2]) -> impl Fn(usize) -> usize {
    let [nb, nc] = local;
    let [ob, oc] = off;
    move |i: usize| {
        let a = i / (nb * nc);
        let b = (i / nc) % nb;
        let cc = i % nc;
        (a * d_b + b + ob) * d_c + cc + oc
    }
}

/// Places a block state on `[d_A, n_B, n_C]` into `[d_A, d_B, d_C]` at the given offsets.
pub fn embed_block(
    block: &DensityMatrix,
    d_b: usize,
    d_c: usize,
    off_b: usize,
    off_c: usize,
) -> DensityMatrix {
    let [d_a, nb, nc] = [block.dims()[0], block.dims()[1], block.dims()[2]];
    let map = embed_index(d_b, d_c, [nb, nc], [off_b, off_c]);
    let n = d_a * d_b * d_c;
    let mut out = CMatrix::zeros(n, n);
    let m = block.matrix();
    for i in 0..m.nrows() {
        let gi = map(i);
        for j in 0..m.ncols() {
            out[(gi, map(j))] = m[(i, j)];
        }
    }
    DensityMatrix::from_raw(out, vec![d_a, d_b, d_c])
}

/// Vector counterpart of [`embed_block`] for `[d_A, n_B, n_C, d_E]` amplitudes,
/// with the `E` leg placed at `off_e` in a `d_e`-dimensional ancilla.
pub(crate) fn embed_block_vector(
    amps: &CVector,
    dims: [usize; 4],
    global: [usize; 4],
    off: [usize; 3],
) -> CVector {
    let [_, nb, nc, ne] = dims;
    let [_, d_b, d_c, d_e] = global;
    let [ob, oc, oe] = off;
    let mut out = CVector::zeros(global.iter().product());
    for (i, z) in amps.iter().enumerate() {
        let e = i % ne;
        let rest = i / ne;
        let a = rest / (nb * nc);
        let b = (rest / nc) % nb;
        let cc = rest % nc;
        out[((a * d_b + b + ob) * d_c + cc + oc) * d_e + e + oe] = *z;
    }
    out
}

/// `Σ_k p_k ρ^k_ABC` for a valid spec.
pub fn build_saturating(spec: &SaturatingSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    let states = spec.block_states()?;
    let n = states[0].dim();
    let mut acc = CMatrix::zeros(n, n);
    for (b, st) in spec.blocks.iter().zip(&states) {
        acc += st.matrix() * c(b.weight, 0.0);
    }
    DensityMatrix::new(acc, &spec.dims())
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    /// `‖ρ_B^k ρ_B^k'‖_F`, symmetric.
    pub pairwise_overlaps_b: Vec<Vec<f64>>,
    pub pairwise_overlaps_c: Vec<Vec<f64>>,
    pub orthogonal: bool,
    /// Largest off-diagonal entry over both sides (0 for a single block).
    pub max_off_diagonal: f64,
}

fn overlaps(states: &[DensityMatrix]) -> Vec<Vec<f64>> {
    let k = states.len();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = (states[i].matrix() * states[j].matrix()).norm();
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

fn max_off_diag(m: &[Vec<f64>]) -> f64 {
    let mut best = 0.0_f64;
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if i != j {
                best = best.max(v);
            }
        }
    }
    best
}

pub fn check_orthogonality(
    marginals_b: &[DensityMatrix],
    marginals_c: &[DensityMatrix],
    tol: f64,
) -> Result<OrthogonalityReport> {
    if marginals_b.len() != marginals_c.len() {
        return Err(Error::dim(format!(
            "{} B-marginals but {} C-marginals",
            marginals_b.len(),
            marginals_c.len()
        )));
    }
    for side in [marginals_b, marginals_c] {
        if let Some(first) = side.first() {
            if side.iter().any(|m| m.dims() != first.dims()) {
                return Err(Error::dim("marginals on one side have differing dims"));
            }
        }
    }
    let pb = overlaps(marginals_b);
    let pc = overlaps(marginals_c);
    let max_off = max_off_diag(&pb).max(max_off_diag(&pc));
    Ok(OrthogonalityReport {
        orthogonal: max_off <= tol,
        max_off_diagonal: max_off,
        pairwise_overlaps_b: pb,
        pairwise_overlaps_c: pc,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Clause {
    pub passed: bool,
    pub witness: f64,
}

/// Outcome of [`certify`]: three independently checked clauses.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub tol: f64,
    /// `‖ρ_ABC - build(spec)‖_max`.
    pub reconstruction: Clause,
    /// Largest cross-block marginal overlap.
    pub orthogonality: Clause,
    /// The SSA gap of the input state.
    pub saturation: Clause,
    pub orthogonality_report: Option<OrthogonalityReport>,
    pub passed: bool,
    /// Set when the spec itself could not be evaluated.
    pub error: Option<String>,
}

fn failed() -> Clause {
    Clause {
        passed: false,
        witness: f64::INFINITY,
    }
}

/// Checks that `rho_abc` is the state the spec describes, that the spec's
/// marginals are orthogonal, and that `rho_abc` saturates SSA. Failures are
/// reported in the certificate, never returned as errors.
pub fn certify(rho_abc: &DensityMatrix, spec: &SaturatingSpec, tol: f64) -> Certificate {
    let mut errors = Vec::new();

    let reconstruction = match build_saturating(spec) {
        Ok(built) if built.dims() == rho_abc.dims() => {
            let w = max_abs(&(rho_abc.matrix() - built.matrix()));
            Clause {
                passed: w <= tol,
                witness: w,
            }
        }
        Ok(built) => {
            errors.push(format!(
                "spec dims {:?} differ from state dims {:?}",
                built.dims(),
                rho_abc.dims()
            ));
            failed()
        }
        Err(e) => {
            errors.push(e.to_string());
            failed()
        }
    };

    let ortho = spec.block_states().and_then(|states| {
        let mb = states
            .iter()
            .map(|s| s.partial_trace(&[1]))
            .collect::<Result<Vec<_>>>()?;
        let mc = states
            .iter()
            .map(|s| s.partial_trace(&[2]))
            .collect::<Result<Vec<_>>>()?;
        check_orthogonality(&mb, &mc, tol)
    });
    let (orthogonality, orthogonality_report) = match ortho {
        Ok(r) => (
            Clause {
                passed: r.orthogonal,
                witness: r.max_off_diagonal,
            },
            Some(r),
        ),
        Err(e) => {
            errors.push(e.to_string());
            (failed(), None)
        }
    };

    let saturation = match t_gap(rho_abc) {
        Ok(r) => Clause {
            passed: r.t_a <= tol,
            witness: r.t_a,
        },
        Err(e) => {
            errors.push(e.to_string());
            failed()
        }
    };

    Certificate {
        tol,
        passed: reconstruction.passed && orthogonality.passed && saturation.passed,
        reconstruction,
        orthogonality,
        saturation,
        orthogonality_report,
        error: if errors.is_empty() {
            None
        } else {
            Some(errors.join("; "))
        },
    }
}
