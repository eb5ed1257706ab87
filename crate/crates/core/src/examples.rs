//! The two-block worked example on `2 ⊗ 4 ⊗ 4`, its closed-form SSA gap,
//! parameter sweeps, and small fixtures with known gaps.
//!
//! ```text
//! ρ_ABC = p1 |ψ¹_A><ψ¹_A| ⊗ ϱ¹_BC + p2 |ψ²_AB><ψ²_AB| ⊗ ϱ²_C
//! |ψ¹_A>  = α1|0> + β1|1>
//! |ψ²_AB> = α2|00> + β2|1>(a|1> + b|2>)
//! ϱ¹_BC   = λ1|22><22| + (1-λ1)|33><33|
//! ϱ²_C    = λ2|0><0| + (1-λ2)|1><1|
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::t_gap;
use crate::error::{Error, Result};
use crate::qmat::{DensityMatrix, PureStateVector, StateSampler};
use crate::structure::{Partition, SaturatingBlock, SaturatingSpec};

const MU_CLIP: f64 = 1e-12;

/// Real parameters of the example. `β1`, `α2` and `a` follow from
/// normalization as nonnegative square roots.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Example3Params {
    pub p1: f64,
    pub alpha1: f64,
    pub beta2: f64,
    pub b: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Default for Example3Params {
    /// The figure's fixed values with `β2 = 1/2`, `λ1 = 1/2`, `b = 1/√2`.
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Example3Params {
            p1: 0.5,
            alpha1: h,
            beta2: 0.5,
            b: h,
            lambda1: 0.5,
            lambda2: 0.5,
        }
    }
}

fn real_ket(v: &[f64], dims: &[usize]) -> PureStateVector {
    PureStateVector::from_real(v, dims).expect("normalized by construction")
}

fn complement(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

impl Example3Params {
    pub fn validate(&self) -> Result<()> {
        let all = [self.p1, self.alpha1, self.beta2, self.b, self.lambda1, self.lambda2];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("finite parameters", format!("{self:?}")));
        }
        if !(self.p1 > 0.0 && self.p1 < 1.0) {
            return Err(Error::validation("p1 in (0, 1)", format!("p1 = {}", self.p1)));
        }
        for (name, v) in [("alpha1", self.alpha1), ("beta2", self.beta2), ("b", self.b)] {
            if v.abs() > 1.0 {
                return Err(Error::validation("amplitudes in [-1, 1]", format!("{name} = {v}")));
            }
        }
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::validation("lambdas in [0, 1]", format!("{name} = {v}")));
            }
        }
        Ok(())
    }

    pub fn p2(&self) -> f64 {
        1.0 - self.p1
    }

    pub fn beta1(&self) -> f64 {
        complement(self.alpha1)
    }

    pub fn alpha2(&self) -> f64 {
        complement(self.beta2)
    }

    pub fn a(&self) -> f64 {
        complement(self.b)
    }

    /// `√λ1 · b · β2`; the gap vanishes exactly when this does.
    pub fn gamma(&self) -> f64 {
        self.lambda1.sqrt() * self.b * self.beta2
    }

    /// Uniform draw over the valid box, amplitudes nonnegative.
    pub fn random(s: &mut StateSampler) -> Self {
        Example3Params {
            p1: s.uniform(0.02, 0.98),
            alpha1: s.uniform(0.0, 1.0),
            beta2: s.uniform(0.0, 1.0),
            b: s.uniform(0.0, 1.0),
            lambda1: s.uniform(0.0, 1.0),
            lambda2: s.uniform(0.0, 1.0),
        }
    }

    pub fn psi1_a(&self) -> PureStateVector {
        real_ket(&[self.alpha1, self.beta1()], &[2])
    }

    /// `|ψ²_AB>` on `[2, 4]`.
    pub fn psi2_ab(&self) -> PureStateVector {
        let mut v = [0.0; 8];
        v[0] = self.alpha2();
        v[4 + 1] = self.beta2 * self.a();
        v[4 + 2] = self.beta2 * self.b;
        real_ket(&v, &[2, 4])
    }

    /// `ϱ¹_BC` on `[4, 4]`.
    pub fn rho1_bc(&self) -> DensityMatrix {
        let mut d = [0.0; 16];
        d[2 * 4 + 2] = self.lambda1;
        d[3 * 4 + 3] = 1.0 - self.lambda1;
        DensityMatrix::diagonal(&d, &[4, 4]).expect("diagonal state")
    }

    /// `ϱ²_C` on `[4]`.
    pub fn rho2_c(&self) -> DensityMatrix {
        DensityMatrix::diagonal(&[self.lambda2, 1.0 - self.lambda2, 0.0, 0.0], &[4]).expect("diagonal state")
    }
}

/// `ψ_A ⊗ ρ_BC`: the factorized-`A` saturating form.
pub fn example1_state(psi_a: &PureStateVector, rho_bc: &DensityMatrix) -> Result<DensityMatrix> {
    psi_a.density().kron(rho_bc).regroup(&[psi_a.dims().iter().product(), rho_bc.dims()[0], rho_bc.dims()[1]])
}

/// `|ψ_AB><ψ_AB| ⊗ ρ_C`: the pure-`AB` saturating form.
pub fn example2_state(psi_ab: &PureStateVector, rho_c: &DensityMatrix) -> Result<DensityMatrix> {
    let d = psi_ab.dims();
    psi_ab.density().kron(rho_c).regroup(&[d[0], d[1], rho_c.dim()])
}

/// `(I/d_A) ⊗ ρ_BC`, whose gap is the maximum `2 log2 d_A`.
pub fn upper_bound_state(d_a: usize, rho_bc: &DensityMatrix) -> Result<DensityMatrix> {
    let dims = rho_bc.dims();
    DensityMatrix::maximally_mixed(&[d_a])?
        .kron(rho_bc)
        .regroup(&[d_a, dims[0], dims[1]])
}

/// The example state on `[2, 4, 4]`, built from the kets directly.
pub fn example3_state(p: &Example3Params) -> Result<DensityMatrix> {
    p.validate()?;
    let first = example1_state(&p.psi1_a(), &p.rho1_bc())?;
    let second = example2_state(&p.psi2_ab(), &p.rho2_c())?;
    DensityMatrix::mixture(&[p.p1, p.p2()], &[first, second])
}

/// The example as a two-block spec. The blocks' `B` ranges overlap, so the
/// spec is declared non-orthogonal.
pub fn example3_spec(p: &Example3Params) -> Result<SaturatingSpec> {
    p.validate()?;
    let block1 = SaturatingBlock {
        weight: p.p1,
        psi: real_ket(&[p.alpha1, p.beta1()], &[2, 1, 1]),
        rho_z: DensityMatrix::diagonal(&[p.lambda1, 0.0, 0.0, 1.0 - p.lambda1], &[2, 2])?,
        partition: Partition::new(1, 2, 1, 2),
        embed_b: 2,
        embed_c: 2,
    };
    let mut v = [0.0; 6];
    v[0] = p.alpha2();
    v[3 + 1] = p.beta2 * p.a();
    v[3 + 2] = p.beta2 * p.b;
    let block2 = SaturatingBlock {
        weight: p.p2(),
        psi: real_ket(&v, &[2, 3, 1]),
        rho_z: DensityMatrix::diagonal(&[p.lambda2, 1.0 - p.lambda2], &[1, 2])?,
        partition: Partition::new(3, 1, 1, 2),
        embed_b: 0,
        embed_c: 0,
    };
    SaturatingSpec::with_dims(vec![block1, block2], 4, 4, false)
}

/// `[μ1, μ2, μ3, μ4]` of the closed form.
pub fn example3_mu(p: &Example3Params) -> [f64; 4] {
    let (p1, p2) = (p.p1, p.p2());
    let g2 = p.gamma().powi(2);
    let b1 = p.beta1().powi(2);
    let b2 = p.beta2 * p.beta2;
    let l = p1 * p.lambda1;
    let r13 = ((l - p2).powi(2) + 4.0 * p1 * p2 * b1 * g2).sqrt();
    let r24 = ((l - p2 * b2).powi(2) + 4.0 * p1 * p2 * g2).sqrt();
    [
        0.5 * (l + p2 + r13),
        0.5 * (l + p2 * b2 + r24),
        0.5 * (l + p2 - r13),
        0.5 * (l + p2 * b2 - r24),
    ]
}

fn xlogx(x: f64) -> f64 {
    if x <= MU_CLIP {
        0.0
    } else {
        x * x.log2()
    }
}

/// `Σ_j (-1)^j μ_j log2 μ_j − p2 β2² log2(p2 β2²) + p2 log2 p2`.
pub fn example3_t_closed_form(p: &Example3Params) -> Result<f64> {
    p.validate()?;
    let mu = example3_mu(p);
    let alternating: f64 = mu
        .iter()
        .enumerate()
        .map(|(k, &m)| if k % 2 == 0 { -xlogx(m) } else { xlogx(m) })
        .sum();
    let p2 = p.p2();
    Ok(alternating - xlogx(p2 * p.beta2 * p.beta2) + xlogx(p2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Beta2,
    Lambda1,
    B,
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta2" => Ok(SweepParam::Beta2),
            "lambda1" => Ok(SweepParam::Lambda1),
            "b" => Ok(SweepParam::B),
            other => Err(Error::Config(format!(
                "unknown sweep parameter `{other}` (expected beta2, lambda1 or b)"
            ))),
        }
    }
}

impl SweepParam {
    fn set(self, p: &mut Example3Params, v: f64) {
        match self {
            SweepParam::Beta2 => p.beta2 = v,
            SweepParam::Lambda1 => p.lambda1 = v,
            SweepParam::B => p.b = v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn unit(param: SweepParam, steps: usize) -> Self {
        Axis {
            param,
            min: 0.0,
            max: 1.0,
            steps,
        }
    }

    /// Evenly spaced values including both ends.
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => vec![],
            1 => vec![self.min],
            n => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.max
                    } else {
                        self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepCell {
    pub param1: f64,
    pub param2: f64,
    pub t_closed: f64,
    pub t_numeric: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepGrid {
    pub axis1: Axis,
    pub axis2: Axis,
    pub fixed: Example3Params,
    /// Row-major, `param1` outer.
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.axis2.steps + j]
    }

    pub fn max_disagreement(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| (c.t_closed - c.t_numeric).abs())
            .fold(0.0, f64::max)
    }

    /// Cell with the largest closed-form value; ties go to the first in row-major order.
    pub fn argmax(&self) -> &SweepCell {
        let mut best = &self.cells[0];
        for c in &self.cells[1..] {
            if c.t_closed > best.t_closed {
                best = c;
            }
        }
        best
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("param1,param2,t_closed,t_numeric\n");
        for c in &self.cells {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                c.param1, c.param2, c.t_closed, c.t_numeric
            )
            .unwrap();
        }
        out
    }
}

/// Evaluates the gap both ways on the grid `axis1 × axis2`, all other
/// parameters taken from `fixed`.
pub fn sweep_example3(axis1: Axis, axis2: Axis, fixed: Example3Params) -> Result<SweepGrid> {
    if axis1.param == axis2.param {
        return Err(Error::Config("sweep axes must be different parameters".into()));
    }
    let (v1, v2) = (axis1.values(), axis2.values());
    let points: Vec<(f64, f64)> = v1
        .iter()
        .flat_map(|&x| v2.iter().map(move |&y| (x, y)))
        .collect();
    let cells = points
        .par_iter()
        .map(|&(x, y)| {
            let mut p = fixed;
            axis1.param.set(&mut p, x);
            axis2.param.set(&mut p, y);
            Ok(SweepCell {
                param1: x,
                param2: y,
                t_closed: example3_t_closed_form(&p)?,
                t_numeric: t_gap(&example3_state(&p)?)?.t_a,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        axis1,
        axis2,
        fixed,
        cells,
    })
}

/// Axes and fixed values of the two published surfaces: `'a'` is `β2 × λ1`
/// at `b = 1/√2`, `'b'` is `β2 × b` at `λ1 = 1/2`.
pub fn figure_sweep(figure: char, steps: usize) -> Result<SweepGrid> {
    let fixed = Example3Params::default();
    let second = match figure {
        'a' => SweepParam::Lambda1,
        'b' => SweepParam::B,
        other => return Err(Error::Config(format!("unknown figure `{other}` (expected a or b)"))),
    };
    sweep_example3(Axis::unit(SweepParam::Beta2, steps), Axis::unit(second, steps), fixed)
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub state: DensityMatrix,
    pub expected_t_gap: f64,
}

/// Named states with known gaps: the two example components at default
/// parameters, qubit-sized versions of each, and the maximizers for `d_A = 2, 3`.
pub fn example_fixtures() -> Vec<Fixture> {
    let p = Example3Params::default();
    let mut s = StateSampler::new(1);
    let psi_a = s.pure(&[2]).unwrap();
    let rho_bc = s.density(&[2, 2], 2).unwrap();
    let psi_ab = s.pure(&[2, 2]).unwrap();
    let rho_c = s.density(&[2], 2).unwrap();
    let full_bc = s.density(&[2, 2], 4).unwrap();
    vec![
        Fixture {
            name: "example_i",
            state: example1_state(&p.psi1_a(), &p.rho1_bc()).unwrap(),
            expected_t_gap: 0.0,
        },
        Fixture {
            name: "example_ii",
            state: example2_state(&p.psi2_ab(), &p.rho2_c()).unwrap(),
            expected_t_gap: 0.0,
        },
        Fixture {
            name: "example_i_qubits",
            state: example1_state(&psi_a, &rho_bc).unwrap(),
            expected_t_gap: 0.0,
        },
        Fixture {
            name: "example_ii_qubits",
            state: example2_state(&psi_ab, &rho_c).unwrap(),
            expected_t_gap: 0.0,
        },
        Fixture {
            name: "upper_bound_d2",
            state: upper_bound_state(2, &full_bc).unwrap(),
            expected_t_gap: 2.0,
        },
        Fixture {
            name: "upper_bound_d3",
            state: upper_bound_state(3, &full_bc).unwrap(),
            expected_t_gap: 2.0 * 3f64.log2(),
        },
    ]
}
