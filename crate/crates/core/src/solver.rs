//! Shared initialization and a uniform front end over the three solvers,
//! used by the rank-adjustment and column-generation loops.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fromax::{FroMax, FroMaxConfig};
use crate::nilepro::{NilePro, NileProConfig};
use crate::numax::{NuMax, NuMaxConfig};
use crate::secant::{EmbeddingMatrix, SecantSet};

/// Iterates whose residual or entries exceed this are treated as diverged.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Seeded `r × n` Gaussian matrix with entries scaled by `1/√n`.
pub fn gaussian_init(r: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    // column-major fill order is fixed, so the draw is reproducible
    DMatrix::from_fn(r, n, |_, _| {
        let g: f64 = StandardNormal.sample(&mut rng);
        g * scale
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    FroMax,
    NilePro,
    NuMax,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::FroMax => "fromax",
            Algorithm::NilePro => "nilepro",
            Algorithm::NuMax => "numax",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Configuration of one of the solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum SolverConfig {
    FroMax(FroMaxConfig),
    NilePro(NileProConfig),
    NuMax(NuMaxConfig),
}

/// Result of one solve, independent of the solver used.
#[derive(Debug, Clone)]
pub struct SolveSummary {
    pub algorithm: Algorithm,
    pub embedding: EmbeddingMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Distortion on the secants the solver was given.
    pub max_distortion: f64,
}

impl SolverConfig {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            SolverConfig::FroMax(_) => Algorithm::FroMax,
            SolverConfig::NilePro(_) => Algorithm::NilePro,
            SolverConfig::NuMax(_) => Algorithm::NuMax,
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            SolverConfig::FroMax(c) => c.delta,
            SolverConfig::NilePro(c) => c.delta,
            SolverConfig::NuMax(c) => c.delta,
        }
    }

    /// Tolerance added to `δ` when auditing a converged result.
    pub fn feas_tol(&self) -> f64 {
        match self {
            SolverConfig::FroMax(c) => c.feas_tol,
            SolverConfig::NilePro(_) => 0.0,
            SolverConfig::NuMax(c) => c.feas_tol,
        }
    }

    /// Fixed rank, or `None` for NuMax whose rank is an output.
    pub fn rank(&self) -> Option<usize> {
        match self {
            SolverConfig::FroMax(c) => Some(c.rank),
            SolverConfig::NilePro(c) => Some(c.rank),
            SolverConfig::NuMax(_) => None,
        }
    }

    /// Same configuration at another rank. NuMax is returned unchanged.
    pub fn with_rank(&self, rank: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            SolverConfig::FroMax(c) => c.rank = rank,
            SolverConfig::NilePro(c) => c.rank = rank,
            SolverConfig::NuMax(_) => {}
        }
        out
    }

    pub fn seed(&self) -> u64 {
        match self {
            SolverConfig::FroMax(c) => c.seed,
            SolverConfig::NilePro(c) => c.seed,
            SolverConfig::NuMax(_) => 0,
        }
    }

    pub fn solve(&self, secants: &SecantSet, warm: Option<&EmbeddingMatrix>) -> Result<SolveSummary> {
        match self {
            SolverConfig::FroMax(c) => {
                let out = FroMax::new(secants, c.clone())?.solve(warm)?;
                Ok(SolveSummary {
                    algorithm: Algorithm::FroMax,
                    iterations: out.state.iter,
                    converged: out.converged,
                    max_distortion: out.max_distortion,
                    embedding: out.embedding,
                })
            }
            SolverConfig::NilePro(c) => {
                let out = NilePro::new(secants, c.clone())?.solve(warm)?;
                Ok(SolveSummary {
                    algorithm: Algorithm::NilePro,
                    iterations: out.state.iter,
                    converged: out.converged,
                    max_distortion: out.max_distortion,
                    embedding: out.embedding,
                })
            }
            SolverConfig::NuMax(c) => {
                let out = NuMax::new(secants, c.clone())?.solve(warm)?;
                Ok(SolveSummary {
                    algorithm: Algorithm::NuMax,
                    iterations: out.state.iter,
                    converged: out.converged,
                    max_distortion: out.max_distortion,
                    embedding: out.embedding,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_init_is_seeded_and_scaled() {
        let a = gaussian_init(3, 400, 7);
        assert_eq!(a, gaussian_init(3, 400, 7));
        assert_ne!(a, gaussian_init(3, 400, 8));
        // each row has expected squared norm 1
        let mean_sq = a.norm_squared() / 3.0;
        assert!((mean_sq - 1.0).abs() < 0.3, "{mean_sq}");
    }

    #[test]
    fn with_rank_touches_only_rank() {
        let cfg = SolverConfig::FroMax(FroMaxConfig::new(0.2, 5));
        let other = cfg.with_rank(3);
        assert_eq!(other.rank(), Some(3));
        assert_eq!(other.delta(), 0.2);
        let nm = SolverConfig::NuMax(NuMaxConfig::new(0.2));
        assert_eq!(nm.with_rank(3), nm);
        assert_eq!(nm.rank(), None);
    }
}
