//! Derivative-free local search with seeded multi-start.

use rayon::prelude::*;
use serde::Serialize;

/// Settings shared by the discord and convex-roof searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Objective evaluations per restart (iterations for the convex roof).
    pub max_evals: usize,
    pub param_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 20,
            max_evals: 2000,
            param_tol: 1e-8,
            value_tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Nelder–Mead with dimension-adapted coefficients. Stops when both the
/// spread of simplex values and the simplex diameter (max-norm) fall below
/// the tolerances, or the evaluation budget runs out.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    param_tol: f64,
    value_tol: f64,
) -> Minimum {
    let n = x0.len();
    if n == 0 {
        return Minimum {
            x: vec![],
            value: f(x0),
            evals: 1,
            converged: true,
        };
    }
    let nf = n as f64;
    let (rho, chi, psi, sigma) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        // a + t (b - a)
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let fspread = vals.iter().map(|v| (v - vals[0]).abs()).fold(0.0, f64::max);
        let xspread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if fspread <= value_tol && xspread <= param_tol {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }

        let mut cen = vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in cen.iter_mut().zip(p) {
                *c += x / nf;
            }
        }
        let xr = combine(&cen, &pts[n], -rho);
        let fr = f(&xr);
        evals += 1;

        let mut shrink = false;
        if fr < vals[0] {
            let xe = combine(&cen, &pts[n], -rho * chi);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else if fr < vals[n] {
            let xc = combine(&cen, &pts[n], -rho * psi);
            let fc = f(&xc);
            evals += 1;
            if fc <= fr {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                shrink = true;
            }
        } else {
            let xcc = combine(&cen, &pts[n], psi);
            let fcc = f(&xcc);
            evals += 1;
            if fcc < vals[n] {
                pts[n] = xcc;
                vals[n] = fcc;
            } else {
                shrink = true;
            }
        }
        if shrink {
            for i in 1..=n {
                pts[i] = combine(&pts[0], &pts[i], sigma);
                vals[i] = f(&pts[i]);
            }
            evals += n;
        }
    }

    let best = (0..=n).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    Minimum {
        x: pts[best].clone(),
        value: vals[best],
        evals,
        converged,
    }
}

/// Runs `run(i)` for every restart index in parallel and returns the index
/// and result with the smallest value; ties go to the lowest index.
pub(crate) fn best_of<T: Send, R>(restarts: usize, run: R, value: impl Fn(&T) -> f64) -> (usize, T)
where
    R: Fn(usize) -> T + Sync + Send,
{
    let results: Vec<T> = (0..restarts.max(1)).into_par_iter().map(&run).collect();
    let mut best = 0;
    for i in 1..results.len() {
        if value(&results[i]) < value(&results[best]) {
            best = i;
        }
    }
    let out = results.into_iter().nth(best).unwrap();
    (best, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.5,
            &[0.0, 0.0],
            0.5,
            2000,
            1e-8,
            1e-12,
        );
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6);
        assert!((m.value - 0.5).abs() < 1e-11);
    }

    #[test]
    fn rosenbrock() {
        let m = nelder_mead(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            0.3,
            5000,
            1e-10,
            1e-14,
        );
        assert!((m.x[0] - 1.0).abs() < 1e-5, "{m:?}");
    }

    #[test]
    fn one_dimensional_and_budget() {
        let m = nelder_mead(|x| (x[0] - 0.3).abs(), &[2.0], 0.1, 500, 1e-9, 1e-12);
        assert!((m.x[0] - 0.3).abs() < 1e-8);
        let m = nelder_mead(|x| x.iter().map(|v| v.cos()).sum(), &[0.1; 6], 0.1, 30, 0.0, 0.0);
        assert!(!m.converged);
        assert!(m.evals <= 30 + 6);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let (i, v) = best_of(8, |k| if k % 3 == 1 { -1.0 } else { k as f64 }, |v| *v);
        assert_eq!((i, v), (1, -1.0));
    }
}
