//! `ssa-lab`: command-line front-end.
//!
//! Machine-readable output goes to stdout, a human summary to stderr.
//! Exit codes: 0 success, 1 validation failure (bad input, failed check),
//! 2 capability error.

mod campaign;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ssa_lab::entropy::{t_gap, von_neumann_entropy};
use ssa_lab::examples::{example3_spec, example3_state, figure_sweep, sweep_example3, Axis, Example3Params, SweepParam};
use ssa_lab::purify::purify_saturating;
use ssa_lab::qcorr::{discord, eof, eof_convex_roof, kw_gap, theorem1_audit, OptimizerConfig};
use ssa_lab::qmat::io::{density_to_json, parse_state, pure_to_json};
use ssa_lab::qmat::DensityMatrix;
use ssa_lab::structure::{build_saturating, certify, SaturatingSpec};
use ssa_lab::{Error, Result};

use campaign::{CampaignConfig, Check};

#[derive(Parser)]
#[command(name = "ssa-lab", version, about = "Strong-subadditivity gap and bipartite quantum correlations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct OptFlags {
    /// Optimizer restarts.
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Evaluation budget per restart.
    #[arg(long, default_value_t = 2000)]
    max_evals: usize,
    /// Seed for restart starting points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Objective-value tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl OptFlags {
    fn config(self) -> Result<OptimizerConfig> {
        if self.restarts == 0 || self.max_evals == 0 {
            return Err(Error::Config("--restarts and --max-evals must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("--tol {} must be positive", self.tol)));
        }
        Ok(OptimizerConfig {
            restarts: self.restarts,
            max_evals: self.max_evals,
            value_tol: self.tol,
            seed: self.seed,
            ..Default::default()
        })
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Von Neumann entropy (bits) of a state or of a reduction.
    Entropy {
        state: PathBuf,
        /// Subsystems to keep, e.g. `0,2`.
        #[arg(long, value_delimiter = ',')]
        keep: Option<Vec<usize>>,
    },
    /// SSA gap T = S(AB) + S(AC) - S(B) - S(C) of a tripartite state.
    Tgap { state: PathBuf },
    /// Quantum discord of a bipartite state.
    Discord {
        state: PathBuf,
        /// Measured subsystem, 0 or 1.
        #[arg(long, default_value_t = 1)]
        measured: usize,
        #[command(flatten)]
        opt: OptFlags,
    },
    /// Entanglement of formation of a bipartite state.
    Eof {
        state: PathBuf,
        /// Always use the convex-roof optimizer.
        #[arg(long)]
        roof: bool,
        /// Decomposition size for the convex roof (default rank²).
        #[arg(long)]
        size: Option<usize>,
        #[command(flatten)]
        opt: OptFlags,
    },
    /// Koashi-Winter gap of a tripartite state, or with `--audit` the full
    /// correlation audit of its SSA gap.
    Kw {
        state: PathBuf,
        #[arg(long)]
        audit: bool,
        #[command(flatten)]
        opt: OptFlags,
    },
    /// Check a state against a saturating spec.
    Certify {
        state: PathBuf,
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Build the state of a saturating spec, or its structured purification.
    Build {
        /// Spec file; omit with `--example3`.
        spec: Option<PathBuf>,
        #[arg(long)]
        purify: bool,
        /// Use the worked two-block example instead of a spec file.
        #[arg(long, conflicts_with = "spec")]
        example3: bool,
        /// Emit the spec (JSON) instead of the state.
        #[arg(long)]
        emit_spec: bool,
        /// Example parameter overrides, e.g. `beta2=0.3`.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
    /// Closed-form vs numeric gap over a parameter grid (CSV).
    Sweep {
        /// Published surface `a` (β2 × λ1) or `b` (β2 × b).
        #[arg(long, conflicts_with_all = ["axis1", "axis2"])]
        figure: Option<char>,
        /// Custom axis `name:min:max:steps`, name one of beta2, lambda1, b.
        #[arg(long, requires = "axis2")]
        axis1: Option<String>,
        #[arg(long, requires = "axis1")]
        axis2: Option<String>,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Fixed-parameter overrides for custom axes.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized property campaign (CSV).
    Campaign {
        #[arg(long, value_delimiter = ',', required = true)]
        checks: Vec<String>,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 2, 2])]
        dims: Vec<usize>,
        /// Rank of sampled mixed states (default full).
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        seed: u64,
        /// Overrides every check's bound.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_evals: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A command either succeeds or reports a failed check (exit 1).
enum Outcome {
    Ok,
    CheckFailed,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    Ok(parse_state(&read(path)?)?.into_density())
}

fn emit_json<T: Serialize>(v: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("records serialize");
    emit_text(&(text + "\n"), None)
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Config(format!("writing {}: {e}", p.display()))),
        None => {
            let mut so = io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|e| Error::Config(format!("writing stdout: {e}")))
        }
    }
}

fn apply_params(p: &mut Example3Params, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("parameter `{o}` is not NAME=VALUE")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("parameter `{k}` has non-numeric value `{v}`")))?;
        match k.trim() {
            "p1" => p.p1 = v,
            "alpha1" => p.alpha1 = v,
            "beta2" => p.beta2 = v,
            "b" => p.b = v,
            "lambda1" => p.lambda1 = v,
            "lambda2" => p.lambda2 = v,
            other => return Err(Error::Config(format!("unknown parameter `{other}`"))),
        }
    }
    p.validate()
}

fn parse_axis(s: &str) -> Result<Axis> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Config(format!("axis `{s}` is not name:min:max:steps"));
    let [name, min, max, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let param: SweepParam = name.parse()?;
    let min: f64 = min.parse().map_err(|_| bad())?;
    let max: f64 = max.parse().map_err(|_| bad())?;
    let steps: usize = steps.parse().map_err(|_| bad())?;
    if steps == 0 || !min.is_finite() || !max.is_finite() {
        return Err(bad());
    }
    Ok(Axis { param, min, max, steps })
}

fn run(cmd: Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Entropy { state, keep } => {
            let rho = load_state(&state)?;
            let keep = keep.unwrap_or_else(|| (0..rho.dims().len()).collect());
            let reduced = rho.partial_trace(&keep)?;
            let s = von_neumann_entropy(&reduced);
            eprintln!("S = {s:.12} bits on subsystems {keep:?}");
            #[derive(Serialize)]
            struct Rec<'a> {
                entropy: f64,
                keep: &'a [usize],
                dims: &'a [usize],
            }
            emit_json(&Rec { entropy: s, keep: &keep, dims: rho.dims() })?;
        }
        Cmd::Tgap { state } => {
            let r = t_gap(&load_state(&state)?)?;
            eprintln!("T = {:.12} bits", r.t_a);
            emit_json(&r)?;
        }
        Cmd::Discord { state, measured, opt } => {
            let r = discord(&load_state(&state)?, measured, &opt.config()?)?;
            eprintln!(
                "D = {:.10} (best restart {} of {}, converged {})",
                r.discord, r.best_restart, r.restarts_used, r.converged
            );
            emit_json(&r)?;
        }
        Cmd::Eof { state, roof, size, opt } => {
            let rho = load_state(&state)?;
            let cfg = opt.config()?;
            let r = if roof || size.is_some() {
                eof_convex_roof(&rho, size, &cfg)?
            } else {
                eof(&rho, &cfg)?
            };
            eprintln!("E = {:.10} via {:?}{}", r.value, r.method, if r.upper_bound { " (upper bound)" } else { "" });
            emit_json(&r)?;
        }
        Cmd::Kw { state, audit, opt } => {
            let rho = load_state(&state)?;
            let cfg = opt.config()?;
            if audit {
                let a = theorem1_audit(&rho, &cfg)?;
                eprintln!("T = {:.8}, lines = {:?}, flags = {:?}", a.t_gap, a.lines, a.flags);
                emit_json(&a)?;
                if !a.passed() {
                    return Ok(Outcome::CheckFailed);
                }
            } else {
                let r = kw_gap(&rho, &cfg)?;
                eprintln!("E(AB) = {:.8}, D(AC) + S(A|C) = {:.8}", r.eof_ab, r.discord_ac + r.cond_entropy_ac);
                emit_json(&r)?;
            }
        }
        Cmd::Certify { state, spec, tol } => {
            let rho = load_state(&state)?;
            let spec = SaturatingSpec::from_json(&read(&spec)?)?;
            let cert = certify(&rho, &spec, tol);
            eprintln!(
                "reconstruction {} ({:.3e}), orthogonality {} ({:.3e}), saturation {} ({:.3e})",
                verdict(cert.reconstruction.passed),
                cert.reconstruction.witness,
                verdict(cert.orthogonality.passed),
                cert.orthogonality.witness,
                verdict(cert.saturation.passed),
                cert.saturation.witness
            );
            emit_json(&cert)?;
            if !cert.passed {
                return Ok(Outcome::CheckFailed);
            }
        }
        Cmd::Build { spec, purify, example3, emit_spec, params } => {
            let spec = if example3 {
                let mut p = Example3Params::default();
                apply_params(&mut p, &params)?;
                if !purify && !emit_spec {
                    // the direct ket construction, not the spec route
                    let rho = example3_state(&p)?;
                    emit_text(&(density_to_json(&rho) + "\n"), None)?;
                    return Ok(Outcome::Ok);
                }
                example3_spec(&p)?
            } else {
                if !params.is_empty() {
                    return Err(Error::Config("--param only applies with --example3".into()));
                }
                let path = spec.ok_or_else(|| Error::Config("a spec file or --example3 is required".into()))?;
                SaturatingSpec::from_json(&read(&path)?)?
            };
            let text = if emit_spec {
                spec.validate()?;
                spec.to_json()
            } else if purify {
                let p = purify_saturating(&spec)?;
                eprintln!("purification with d_E = {}", p.d_e);
                pure_to_json(&p.psi)
            } else {
                let rho = build_saturating(&spec)?;
                eprintln!("built state on dims {:?}", rho.dims());
                density_to_json(&rho)
            };
            emit_text(&(text + "\n"), None)?;
        }
        Cmd::Sweep { figure, axis1, axis2, steps, params, out } => {
            let grid = match (figure, axis1, axis2) {
                (Some(f), None, None) => {
                    if !params.is_empty() {
                        return Err(Error::Config("--param does not apply to published figures".into()));
                    }
                    if steps == 0 {
                        return Err(Error::Config("--steps must be positive".into()));
                    }
                    figure_sweep(f, steps)?
                }
                (None, Some(a1), Some(a2)) => {
                    let mut fixed = Example3Params::default();
                    apply_params(&mut fixed, &params)?;
                    sweep_example3(parse_axis(&a1)?, parse_axis(&a2)?, fixed)?
                }
                _ => return Err(Error::Config("give --figure, or both --axis1 and --axis2".into())),
            };
            let best = grid.argmax();
            eprintln!(
                "{} cells, max |closed - numeric| = {:.3e}, argmax T = {:.6} at ({:.4}, {:.4})",
                grid.cells.len(),
                grid.max_disagreement(),
                best.t_closed,
                best.param1,
                best.param2
            );
            emit_text(&grid.to_csv(), out.as_deref())?;
        }
        Cmd::Campaign { checks, n, dims, rank, seed, tol, restarts, max_evals, out } => {
            let checks = checks.iter().map(|c| c.parse()).collect::<Result<Vec<Check>>>()?;
            let optimizer = OptFlags { restarts, max_evals, seed, tol: 1e-10 }.config()?;
            let cfg = CampaignConfig { n, dims, rank, seed, tol, checks, optimizer };
            let rows = campaign::run(&cfg)?;
            let mut buf = Vec::new();
            campaign::write_csv(&rows, &mut buf)?;
            emit_text(std::str::from_utf8(&buf).expect("CSV is UTF-8"), out.as_deref())?;
            let mut failed = false;
            for check in &cfg.checks {
                let mine: Vec<_> = rows.iter().filter(|r| r.check == *check).collect();
                let bad = mine.iter().filter(|r| r.violation).count();
                let min = mine.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
                let max = mine.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
                eprintln!("{check}: {bad} violations in {} samples, value range [{min:.3e}, {max:.3e}]", mine.len());
                failed |= bad > 0;
            }
            if failed {
                return Ok(Outcome::CheckFailed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SSA_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("SSA_LAB_THREADS=`{raw}` is not a nonnegative integer")))?;
    // 0 leaves rayon's default (one per core)
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::Capability(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return exit_for(&e);
    }
    match std::panic::catch_unwind(|| run(cli.cmd)) {
        Ok(Ok(Outcome::Ok)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::CheckFailed)) => ExitCode::from(1),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
        // the panic hook has already printed the message
        Err(_) => ExitCode::from(1),
    }
}
