use nalgebra::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{c, check_dims, CMatrix, CVector, DensityMatrix, PureStateVector};
use crate::error::{Error, Result};

/// Seeded source of random states, unitaries and probability vectors.
///
/// Value-typed: each caller owns its sampler, and the same seed (and stream)
/// always reproduces the same sequence.
#[derive(Clone, Debug)]
pub struct StateSampler {
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        StateSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent sub-sequence `stream` of `seed`; used to give parallel work
    /// items reproducible generators.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        StateSampler { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    fn gaussian(&mut self) -> num_complex::Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        c(re, im)
    }

    /// Matrix of i.i.d. standard complex Gaussians.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> CMatrix {
        let mut m = CMatrix::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = self.gaussian();
            }
        }
        m
    }

    /// Haar-distributed pure state.
    pub fn pure(&mut self, dims: &[usize]) -> Result<PureStateVector> {
        let n = check_dims(dims)?;
        let v = CVector::from_iterator(n, (0..n).map(|_| self.gaussian()));
        PureStateVector::normalized(v, dims)
    }

    /// Induced-measure mixed state: marginal of a Haar pure state on
    /// `dims ⊗ C^rank`. Hilbert–Schmidt measure when `rank` equals the dimension.
    pub fn density(&mut self, dims: &[usize], rank: usize) -> Result<DensityMatrix> {
        let n = check_dims(dims)?;
        if rank == 0 || rank > n {
            return Err(Error::dim(format!("rank {rank} outside 1..={n}")));
        }
        let mut full = dims.to_vec();
        full.push(rank);
        let psi = self.pure(&full)?;
        let keep: Vec<usize> = (0..dims.len()).collect();
        psi.reduced(&keep)
    }

    /// Haar-random `d x d` unitary.
    pub fn unitary(&mut self, d: usize) -> CMatrix {
        self.isometry(d, d)
    }

    /// Haar-random isometry: `rows x cols` with orthonormal columns.
    pub fn isometry(&mut self, rows: usize, cols: usize) -> CMatrix {
        let g = self.ginibre(rows, cols);
        let qr = QR::new(g);
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

    /// Uniform point on the probability simplex with `k` entries.
    pub fn probabilities(&mut self, k: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| self.rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    }
}

/// Haar-random pure state, deterministic in `seed`.
pub fn random_pure(dims: &[usize], seed: u64) -> Result<PureStateVector> {
    StateSampler::new(seed).pure(dims)
}

/// Induced-measure random mixed state of the given rank, deterministic in `seed`.
pub fn random_density(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    StateSampler::new(seed).density(dims, rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{max_abs, validate_density, STATE_TOL};

    #[test]
    fn pure_is_normalized() {
        let p = random_pure(&[2], 4).unwrap();
        assert!((p.amplitudes().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn density_passes_validation() {
        let r = random_density(&[2, 2], 4, 9).unwrap();
        assert!(validate_density(r.matrix(), &[2, 2], STATE_TOL).is_ok());
        assert_eq!(r.rank(1e-12), 4);
        let r2 = random_density(&[2, 2], 2, 9).unwrap();
        assert_eq!(r2.rank(1e-12), 2);
    }

    #[test]
    fn invalid_rank() {
        assert!(matches!(random_density(&[2], 3, 0), Err(Error::Dimension(_))));
        assert!(matches!(random_density(&[2], 0, 0), Err(Error::Dimension(_))));
    }

    #[test]
    fn seeded_reproducibility() {
        assert_eq!(random_density(&[3], 2, 77).unwrap(), random_density(&[3], 2, 77).unwrap());
        assert_ne!(random_density(&[3], 2, 77).unwrap(), random_density(&[3], 2, 78).unwrap());
    }

    #[test]
    fn empirical_mean_is_maximally_mixed() {
        // Unitary invariance of the induced measure forces E[rho] = I/d.
        let mut s = StateSampler::new(2024);
        let n = 10_000;
        let mut acc = CMatrix::zeros(4, 4);
        for _ in 0..n {
            acc += s.density(&[2, 2], 4).unwrap().matrix();
        }
        acc /= c(n as f64, 0.0);
        let target = CMatrix::identity(4, 4) * c(0.25, 0.0);
        assert!(max_abs(&(acc - target)) < 2e-2);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut s = StateSampler::new(5);
        let u = s.unitary(5);
        assert!(max_abs(&(u.adjoint() * &u - CMatrix::identity(5, 5))) < 1e-12);
    }
}
