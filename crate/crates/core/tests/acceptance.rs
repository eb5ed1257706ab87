//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use ssa_lab::entropy::{concavity_check, ssa_gap_form1, t_gap, Ensemble};
use ssa_lab::examples::{
    example3_state, example3_t_closed_form, figure_sweep, upper_bound_state, Example3Params, SweepGrid,
};
use ssa_lab::qcorr::{
    classical_correlation_at, conservation_check, discord, eof_convex_roof, eof_two_qubit, kw_gap,
    theorem1_audit, MeasurementBasis, OptimizerConfig,
};
use ssa_lab::qmat::{DensityMatrix, StateSampler};
use ssa_lab::structure::{build_saturating, embed_block, SaturatingSpec};

type Outcome = (bool, String);

fn closed_form_vs_entropic() -> Outcome {
    let mut s = StateSampler::new(101);
    let params: Vec<_> = (0..500).map(|_| Example3Params::random(&mut s)).collect();
    let worst = params
        .par_iter()
        .map(|p| {
            let t = t_gap(&example3_state(p).unwrap()).unwrap().t_a;
            (example3_t_closed_form(p).unwrap() - t).abs()
        })
        .reduce(|| 0.0, f64::max);
    (worst <= 1e-8, format!("500 draws, max |closed - entropic| = {worst:.2e}"))
}

fn zero_locus() -> Outcome {
    let axis: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
    let mut pts = Vec::new();
    for &l1 in &axis {
        for &b in &axis {
            for &b2 in &axis {
                pts.push(Example3Params {
                    lambda1: l1,
                    b,
                    beta2: b2,
                    ..Default::default()
                });
            }
        }
    }
    let bad: Vec<String> = pts
        .par_iter()
        .filter_map(|p| {
            let zero_gamma = p.gamma() <= 1e-12;
            let closed = example3_t_closed_form(p).unwrap();
            let numeric = t_gap(&example3_state(p).unwrap()).unwrap().t_a;
            let ok = (closed <= 1e-10) == zero_gamma && (numeric <= 1e-10) == zero_gamma;
            (!ok).then(|| format!("λ1={} b={} β2={} closed={closed:.2e} numeric={numeric:.2e}", p.lambda1, p.b, p.beta2))
        })
        .collect();
    match bad.first() {
        None => (true, format!("{} grid points, T <= 1e-10 exactly on γ = 0", pts.len())),
        Some(b) => (false, format!("{} mismatches, first: {b}", bad.len())),
    }
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fig1_argmax.json")
}

fn surface_checks(g: &SweepGrid) -> Result<(), String> {
    let n = g.axis1.steps;
    for k in 0..n {
        for c in [g.cell(0, k), g.cell(k, 0)] {
            if c.t_closed.abs() > 1e-10 || c.t_numeric.abs() > 1e-10 {
                return Err(format!("edge cell ({}, {}) = {:.2e}", c.param1, c.param2, c.t_numeric));
            }
        }
    }
    if g.max_disagreement() > 1e-8 {
        return Err(format!("cell disagreement {:.2e}", g.max_disagreement()));
    }
    for i in 0..n {
        for j in 0..n {
            let here = g.cell(i, j).t_closed;
            let right = if j + 1 < n { g.cell(i, j + 1).t_closed } else { here };
            let down = if i + 1 < n { g.cell(i + 1, j).t_closed } else { here };
            if (right - here).abs() > 0.1 || (down - here).abs() > 0.1 {
                return Err(format!("jump above 0.1 bits at ({i}, {j})"));
            }
        }
    }
    Ok(())
}

fn figure_surfaces() -> Outcome {
    let interior = example3_t_closed_form(&Example3Params::default()).unwrap();
    if interior <= 1e-4 {
        return (false, format!("default interior point T = {interior:.3e}"));
    }
    let mut found = serde_json::Map::new();
    for fig in ['a', 'b'] {
        let g = figure_sweep(fig, 64).unwrap();
        if let Err(e) = surface_checks(&g) {
            return (false, format!("figure {fig}: {e}"));
        }
        let m = g.argmax();
        found.insert(
            fig.to_string(),
            serde_json::json!({"param1": m.param1, "param2": m.param2, "t_closed": m.t_closed}),
        );
    }
    let found = serde_json::Value::Object(found);
    let path = golden_path();
    match std::fs::read_to_string(&path) {
        Ok(text) => {
            let golden: serde_json::Value = serde_json::from_str(&text).unwrap();
            for fig in ["a", "b"] {
                for key in ["param1", "param2", "t_closed"] {
                    let (x, y) = (golden[fig][key].as_f64().unwrap(), found[fig][key].as_f64().unwrap());
                    if (x - y).abs() > 1e-12 {
                        return (false, format!("figure {fig} argmax {key}: golden {x}, now {y}"));
                    }
                }
            }
            (true, format!("edges zero, interior T = {interior:.4}, argmax matches golden {found}"))
        }
        Err(_) => {
            std::fs::write(&path, serde_json::to_string_pretty(&found).unwrap() + "\n").unwrap();
            (true, format!("edges zero, interior T = {interior:.4}, golden argmax pinned: {found}"))
        }
    }
}

fn ssa_suite() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for (k, dims) in [[2, 2, 2], [2, 2, 4], [2, 4, 4]].iter().enumerate() {
        let n: usize = dims.iter().product();
        for (r, rank) in [n, 2].iter().enumerate() {
            let low = (0..1000u64)
                .into_par_iter()
                .map(|i| {
                    let mut s = StateSampler::with_stream(400 + (2 * k + r) as u64, i);
                    let rho = s.density(dims, *rank).unwrap();
                    t_gap(&rho).unwrap().t_a.min(ssa_gap_form1(&rho).unwrap())
                })
                .reduce(|| f64::INFINITY, f64::min);
            worst = worst.min(low);
            count += 1000;
        }
    }
    (worst >= -1e-9, format!("{count} states, min gap over both forms = {worst:.2e}"))
}

fn concavity() -> Outcome {
    let mut s = StateSampler::new(5);
    let mut worst = f64::INFINITY;
    for _ in 0..500 {
        let w = s.probabilities(2);
        let r1 = 1 + s.index(8);
        let r2 = 1 + s.index(8);
        let m = vec![s.density(&[2, 2, 2], r1).unwrap(), s.density(&[2, 2, 2], r2).unwrap()];
        let (lhs, rhs) = concavity_check(&Ensemble::new(w, m).unwrap()).unwrap();
        worst = worst.min(lhs - rhs);
    }
    let mut eq = 0.0_f64;
    for _ in 0..100 {
        let w = s.probabilities(2);
        let members: Vec<DensityMatrix> = (0..2)
            .map(|k| {
                let rank = 1 + s.index(8);
                let local = s.density(&[2, 2, 2], rank).unwrap();
                embed_block(&local, 4, 4, 2 * k, 2 * k)
            })
            .collect();
        let (lhs, rhs) = concavity_check(&Ensemble::new(w, members).unwrap()).unwrap();
        eq = eq.max((lhs - rhs).abs());
    }
    (
        worst >= -1e-9 && eq <= 1e-8,
        format!("min lhs - rhs = {worst:.2e} over 500; orthogonal max |lhs - rhs| = {eq:.2e} over 100"),
    )
}

fn upper_bound() -> Outcome {
    let mut s = StateSampler::new(6);
    let mut dev = 0.0_f64;
    for d_a in [2usize, 3] {
        let target = 2.0 * (d_a as f64).log2();
        for _ in 0..50 {
            let rank = 1 + s.index(4);
            let rho_bc = s.density(&[2, 2], rank).unwrap();
            let t = t_gap(&upper_bound_state(d_a, &rho_bc).unwrap()).unwrap().t_a;
            dev = dev.max((t - target).abs());
        }
    }
    let mut closest = f64::INFINITY;
    for _ in 0..200 {
        let rank = 1 + s.index(8);
        let rho = s.density(&[2, 2, 2], rank).unwrap();
        closest = closest.min(2.0 - t_gap(&rho).unwrap().t_a);
    }
    (
        dev <= 1e-9 && closest > 1e-6,
        format!("max |T - 2 log d_A| = {dev:.2e}; non-product states stay {closest:.3} below the bound"),
    )
}

fn spec_with_blocks(s: &mut StateSampler, min_k: usize) -> SaturatingSpec {
    loop {
        let spec = SaturatingSpec::random(s, 36).unwrap();
        if spec.blocks.len() >= min_k {
            return spec;
        }
    }
}

fn theorem2_soundness() -> Outcome {
    let mut s = StateSampler::new(7);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let spec = spec_with_blocks(&mut s, 1);
        worst = worst.max(t_gap(&build_saturating(&spec).unwrap()).unwrap().t_a);
    }
    let mut violated = 0;
    for _ in 0..200 {
        let mut spec = spec_with_blocks(&mut s, 2);
        spec.blocks[1].embed_b = spec.blocks[0].embed_b;
        spec.orthogonal = false;
        spec.validate().unwrap();
        if t_gap(&build_saturating(&spec).unwrap()).unwrap().t_a > 1e-5 {
            violated += 1;
        }
    }
    (
        worst <= 1e-8 && violated >= 190,
        format!("max built T = {worst:.2e} over 200; {violated}/200 overlapping-B perturbations have T > 1e-5"),
    )
}

fn conservation() -> Outcome {
    let cfg = OptimizerConfig::default();
    let worst = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let psi = StateSampler::with_stream(8, i).pure(&[2, 2, 2]).unwrap();
            let (l, r) = conservation_check(&psi, &cfg).unwrap();
            (l - r).abs()
        })
        .reduce(|| 0.0, f64::max);
    (worst <= 2e-4, format!("100 pure states, max |E + E - D - D| = {worst:.2e}"))
}

fn koashi_winter() -> Outcome {
    let cfg = OptimizerConfig::default();
    let low = (0..300u64)
        .into_par_iter()
        .map(|i| {
            let mut s = StateSampler::with_stream(9, i);
            let rank = 2 + s.index(7);
            kw_gap(&s.density(&[2, 2, 2], rank).unwrap(), &cfg).unwrap().gap
        })
        .reduce(|| f64::INFINITY, f64::min);
    let sat = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let mut s = StateSampler::with_stream(10, i);
            let spec = SaturatingSpec::random_for_dims(&mut s, 2, 2, 2, 2).unwrap();
            kw_gap(&build_saturating(&spec).unwrap(), &cfg).unwrap().gap.abs()
        })
        .reduce(|| 0.0, f64::max);
    (
        low >= -1e-4 && sat <= 1e-4,
        format!("min gap over 300 mixed = {low:.2e}; max |gap| over 50 saturating = {sat:.2e}"),
    )
}

fn theorem1() -> Outcome {
    let cfg = OptimizerConfig::default();
    let rows: Vec<(f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let rho = StateSampler::with_stream(11, i).density(&[2, 2, 2], 2).unwrap();
            let a = theorem1_audit(&rho, &cfg).unwrap();
            ((a.lines[3] - a.t_gap).abs(), a.delta_b.min(a.delta_c))
        })
        .collect();
    let line4 = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let delta = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    (
        line4 <= 5e-4 && delta >= -5e-4,
        format!("50 rank-2 states, max |line 4 - T| = {line4:.2e}, min δ = {delta:.2e}"),
    )
}

fn discord_vs_grid() -> Outcome {
    let cfg = OptimizerConfig::default();
    let n = 400;
    let mut worst = 0.0_f64;
    let mut worst_refined = 0.0_f64;
    let mut below = 0;
    let mut s = StateSampler::new(12);
    for _ in 0..20 {
        let rho = s.density(&[2, 2], 4).unwrap();
        let opt = discord(&rho, 1, &cfg).unwrap();
        let j = |theta: f64, phi: f64| classical_correlation_at(&rho, &MeasurementBasis::bloch(theta, phi), 1).unwrap();
        // n and -n give the same measurement, so φ over half a turn suffices
        let (best_j, th, ph) = (0..n)
            .into_par_iter()
            .map(|i| {
                let theta = PI * i as f64 / (n - 1) as f64;
                (0..n)
                    .map(|k| {
                        let phi = PI * k as f64 / n as f64;
                        (j(theta, phi), theta, phi)
                    })
                    .fold((f64::NEG_INFINITY, 0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a })
            })
            .reduce(|| (f64::NEG_INFINITY, 0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
        let grid = opt.mutual_information - best_j;
        worst = worst.max((opt.discord - grid).abs());
        if opt.discord <= grid + 1e-12 {
            below += 1;
        }
        // diagnostic only: 201x201 refinement of the grid cell around the argmax
        let h = PI / (n - 1) as f64;
        let fine = (-100..=100)
            .into_par_iter()
            .map(|a| {
                (-100..=100)
                    .map(|b| j(th + h * a as f64 / 100.0, ph + h * b as f64 / 100.0))
                    .fold(best_j, f64::max)
            })
            .reduce(|| best_j, f64::max);
        worst_refined = worst_refined.max((opt.discord - (opt.mutual_information - fine)).abs());
    }
    (
        worst <= 1e-5,
        format!(
            "20 states, max |optimized - 400x400 grid| = {worst:.2e}; optimizer <= grid on {below}/20; \
             max |optimized - refined grid| = {worst_refined:.2e}"
        ),
    )
}

fn wootters_vs_roof() -> Outcome {
    let cfg = OptimizerConfig::default();
    let worst = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let rho = StateSampler::with_stream(13, i).density(&[2, 2], 2).unwrap();
            let w = eof_two_qubit(&rho).unwrap();
            (eof_convex_roof(&rho, None, &cfg).unwrap().value - w).abs()
        })
        .reduce(|| 0.0, f64::max);
    (worst <= 1e-4, format!("100 rank-2 states, max |Wootters - roof| = {worst:.2e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("closed form vs entropic gap", closed_form_vs_entropic),
        ("zero locus of the two-block example", zero_locus),
        ("parameter-sweep surfaces", figure_surfaces),
        ("SSA property suite", ssa_suite),
        ("concavity", concavity),
        ("upper-bound saturation", upper_bound),
        ("saturating-state builder soundness", theorem2_soundness),
        ("conservation law", conservation),
        ("Koashi-Winter inequality", koashi_winter),
        ("correlation audit of the SSA gap", theorem1),
        ("discord optimizer vs brute force", discord_vs_grid),
        ("Wootters vs convex roof", wootters_vs_roof),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != k + 1) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = run();
        println!(
            "criterion {:>2} {}: {} ({detail}; {:.1}s)",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            name,
            start.elapsed().as_secs_f64()
        );
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
