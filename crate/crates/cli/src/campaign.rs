//! Randomized property campaigns.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use ssa_lab::entropy::{concavity_check, mutual_information, ssa_gap_form1, t_gap, Ensemble};
use ssa_lab::qcorr::{conservation_check, kw_gap, theorem1_audit, OptimizerConfig};
use ssa_lab::qmat::{DensityMatrix, StateSampler};
use ssa_lab::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Sa,
    Ssa,
    Concavity,
    Kw,
    Conservation,
    Theorem1,
}

impl Check {
    /// Bound used when `--tol` is absent.
    fn default_tol(self) -> f64 {
        match self {
            Check::Sa | Check::Ssa | Check::Concavity => 1e-9,
            Check::Kw => 1e-4,
            Check::Conservation => 2e-4,
            Check::Theorem1 => 5e-4,
        }
    }

    /// Lower-bound checks require `value >= -tol`; the rest `|value| <= tol`.
    fn violated(self, value: f64, tol: f64) -> bool {
        match self {
            Check::Sa | Check::Ssa | Check::Concavity | Check::Kw => !(value >= -tol),
            Check::Conservation | Check::Theorem1 => !(value.abs() <= tol),
        }
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sa" => Check::Sa,
            "ssa" => Check::Ssa,
            "concavity" => Check::Concavity,
            "kw" => Check::Kw,
            "conservation" => Check::Conservation,
            "theorem1" => Check::Theorem1,
            other => {
                return Err(Error::Config(format!(
                    "unknown check `{other}` (expected sa, ssa, concavity, kw, conservation, theorem1)"
                )))
            }
        })
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Sa => "sa",
            Check::Ssa => "ssa",
            Check::Concavity => "concavity",
            Check::Kw => "kw",
            Check::Conservation => "conservation",
            Check::Theorem1 => "theorem1",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub n: usize,
    pub dims: Vec<usize>,
    pub rank: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub checks: Vec<Check>,
    pub optimizer: OptimizerConfig,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        if self.checks.is_empty() {
            return Err(Error::Config("no checks selected".into()));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::Config(format!("bad dims {:?}", self.dims)));
        }
        let total: usize = self.dims.iter().product();
        if let Some(r) = self.rank {
            if r == 0 || r > total {
                return Err(Error::Config(format!("rank {r} outside 1..={total}")));
            }
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tolerance {t} must be finite and nonnegative")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub check: Check,
    pub sample: usize,
    pub value: f64,
    pub threshold: f64,
    pub violation: bool,
}

fn sample_value(cfg: &CampaignConfig, check: Check, s: &mut StateSampler) -> Result<f64> {
    let total: usize = cfg.dims.iter().product();
    let rank = cfg.rank.unwrap_or(total);
    match check {
        Check::Sa => {
            let rho = s.density(&cfg.dims, rank)?;
            // I(A : rest)
            let rest = total / cfg.dims[0];
            mutual_information(&rho.regroup(&[cfg.dims[0], rest])?)
        }
        Check::Ssa => {
            let rho = s.density(&cfg.dims, rank)?;
            Ok(t_gap(&rho)?.t_a.min(ssa_gap_form1(&rho)?))
        }
        Check::Concavity => {
            let p = s.uniform(0.0, 1.0);
            let members: Vec<DensityMatrix> =
                (0..2).map(|_| s.density(&cfg.dims, rank)).collect::<Result<_>>()?;
            let (lhs, rhs) = concavity_check(&Ensemble::new(vec![p, 1.0 - p], members)?)?;
            Ok(lhs - rhs)
        }
        Check::Kw => {
            let rho = s.density(&cfg.dims, rank)?;
            Ok(kw_gap(&rho, &cfg.optimizer)?.gap)
        }
        Check::Conservation => {
            let psi = s.pure(&cfg.dims)?;
            let (lhs, rhs) = conservation_check(&psi, &cfg.optimizer)?;
            Ok(lhs - rhs)
        }
        Check::Theorem1 => {
            let rho = s.density(&cfg.dims, rank)?;
            let a = theorem1_audit(&rho, &cfg.optimizer)?;
            // signed deviation of largest magnitude among the audited quantities
            let line4 = a.lines[3] - a.t_gap;
            let worst_delta = a.delta_b.min(a.delta_c).min(0.0);
            Ok(if line4.abs() >= worst_delta.abs() { line4 } else { worst_delta })
        }
    }
}

/// Every `(check, sample)` pair, evaluated in parallel and returned in order.
/// Sample `i` of check `k` draws from stream `k · n + i` of the seed.
pub fn run(cfg: &CampaignConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    let jobs: Vec<(usize, Check, usize)> = cfg
        .checks
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| (0..cfg.n).map(move |i| (k, c, i)))
        .collect();
    jobs.par_iter()
        .map(|&(k, check, i)| {
            let mut s = StateSampler::with_stream(cfg.seed, (k * cfg.n + i) as u64);
            let value = sample_value(cfg, check, &mut s)?;
            let threshold = cfg.tol.unwrap_or_else(|| check.default_tol());
            Ok(Row {
                check,
                sample: i,
                value,
                threshold,
                violation: check.violated(value, threshold),
            })
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
    w.write_record(["check", "sample", "value", "threshold", "violation"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.check.to_string(),
            r.sample.to_string(),
            format!("{:.16e}", r.value),
            format!("{:.16e}", r.threshold),
            r.violation.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
    Ok(())
}
