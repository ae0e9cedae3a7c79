//! Outer loops around the solvers: rank adjustment, which lowers the rank
//! one step at a time from warm starts, and column generation, which solves
//! on a growing set of active secants instead of the full set.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EmbedError, Result};
use crate::secant::{extract_embedding, DataMatrix, EmbeddingMatrix, SecantSet};
use crate::solver::{SolveSummary, SolverConfig};

/// Slack on the activity test `|‖Ψv‖² − 1| ≥ δ − act_tol`.
pub const ACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankAdjustConfig {
    pub initial_rank: usize,
    pub max_outer_iters: usize,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankStep {
    pub rank: usize,
    pub converged: bool,
    pub iterations: usize,
    pub max_distortion: f64,
}

#[derive(Debug, Clone)]
pub struct RankAdjustResult {
    pub embedding: EmbeddingMatrix,
    pub final_rank: usize,
    /// One entry per solve, in order; ranks decrease by one.
    pub trace: Vec<RankStep>,
}

impl RankAdjustResult {
    pub fn total_iterations(&self) -> usize {
        self.trace.iter().map(|s| s.iterations).sum()
    }
}

fn record(summary: &SolveSummary, rank: usize) -> RankStep {
    RankStep {
        rank,
        converged: summary.converged,
        iterations: summary.iterations,
        max_distortion: summary.max_distortion,
    }
}

/// Solves at `R₀`, then repeatedly drops to `R − 1` warm-started from the
/// leading eigenpairs of `ΨᵀΨ`. Stops at the first solve that fails to
/// converge (or diverges), after `max_outer_iters` solves, or at rank 1, and
/// returns the last converged embedding.
pub fn rank_adjust(secants: &SecantSet, config: &RankAdjustConfig) -> Result<RankAdjustResult> {
    if config.solver.rank().is_none() {
        return Err(EmbedError::invalid("rank adjustment needs a fixed-rank solver"));
    }
    let n = secants.dim();
    if config.initial_rank == 0 || config.initial_rank > n {
        return Err(EmbedError::invalid(format!(
            "initial rank must lie in 1..={n}, got {}",
            config.initial_rank
        )));
    }
    if config.max_outer_iters == 0 {
        return Err(EmbedError::invalid("max_outer_iters must be at least 1"));
    }

    let mut rank = config.initial_rank;
    let first = match config.solver.with_rank(rank).solve(secants, None) {
        Ok(s) if s.converged => s,
        Ok(_) | Err(EmbedError::Diverged { .. }) => {
            return Err(EmbedError::InitialRankTooSmall { rank });
        }
        Err(e) => return Err(e),
    };
    let mut trace = vec![record(&first, rank)];
    let mut best = first.embedding;

    while trace.len() < config.max_outer_iters && rank > 1 {
        let next = rank - 1;
        let warm = extract_embedding(&best.gram(), next)?;
        match config.solver.with_rank(next).solve(secants, Some(&warm)) {
            Ok(s) => {
                trace.push(record(&s, next));
                if !s.converged {
                    break;
                }
                best = s.embedding;
                rank = next;
            }
            Err(EmbedError::Diverged { iteration, .. }) => {
                trace.push(RankStep {
                    rank: next,
                    converged: false,
                    iterations: iteration,
                    max_distortion: f64::INFINITY,
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RankAdjustResult {
        final_rank: best.rank(),
        embedding: best,
        trace,
    })
}

/// A finite collection of secants that can be scanned without materializing
/// all of them at once.
pub trait SecantPool: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dim(&self) -> usize;

    /// The secants at `indices` as a solver input.
    fn materialize(&self, indices: &[usize]) -> Result<SecantSet>;

    /// `|‖Ψv_i‖² − 1|` for every `i` in `indices`, in order.
    fn distortions(&self, psi: &EmbeddingMatrix, indices: &[usize]) -> Vec<f64>;
}

impl SecantPool for SecantSet {
    fn len(&self) -> usize {
        SecantSet::len(self)
    }

    fn dim(&self) -> usize {
        SecantSet::dim(self)
    }

    fn materialize(&self, indices: &[usize]) -> Result<SecantSet> {
        Ok(self.select(indices))
    }

    fn distortions(&self, psi: &EmbeddingMatrix, indices: &[usize]) -> Vec<f64> {
        let m = psi.matrix();
        let v = self.vectors();
        indices
            .par_iter()
            .map(|&i| {
                let y = m * v.row(i).transpose();
                (y.norm_squared() - 1.0).abs()
            })
            .collect()
    }
}

/// Secants of a point set generated on demand from point pairs. Distortions
/// are evaluated from the projected points, so a sweep over all `Q(Q−1)/2`
/// pairs never forms the secant vectors.
pub struct PairSecants<'a> {
    data: &'a DataMatrix,
    pairs: Vec<(u32, u32)>,
    sq_norms: Vec<f64>,
    skipped: usize,
}

impl<'a> PairSecants<'a> {
    pub fn new(data: &'a DataMatrix, min_norm: f64) -> Result<Self> {
        let q = data.len();
        if q < 2 {
            return Err(EmbedError::invalid("need at least two points"));
        }
        if q > u32::MAX as usize {
            return Err(EmbedError::invalid("too many points"));
        }
        let pts = data.points();
        let per_point: Vec<Vec<(u32, u32, f64)>> = (0..q)
            .into_par_iter()
            .map(|j| {
                let xj = pts.column(j);
                ((j + 1)..q)
                    .map(|k| (j as u32, k as u32, (pts.column(k) - xj).norm_squared()))
                    .collect()
            })
            .collect();
        let mut pairs = Vec::with_capacity(q * (q - 1) / 2);
        let mut sq_norms = Vec::with_capacity(q * (q - 1) / 2);
        let mut skipped = 0;
        let min_sq = min_norm * min_norm;
        for (j, k, d) in per_point.into_iter().flatten() {
            if d < min_sq {
                skipped += 1;
            } else {
                pairs.push((j, k));
                sq_norms.push(d);
            }
        }
        if pairs.is_empty() {
            return Err(EmbedError::EmptySecantSet { skipped });
        }
        Ok(Self {
            data,
            pairs,
            sq_norms,
            skipped,
        })
    }

    pub fn skipped_pairs(&self) -> usize {
        self.skipped
    }

    pub fn pair(&self, i: usize) -> (usize, usize) {
        let (j, k) = self.pairs[i];
        (j as usize, k as usize)
    }
}

impl SecantPool for PairSecants<'_> {
    fn len(&self) -> usize {
        self.pairs.len()
    }

    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn materialize(&self, indices: &[usize]) -> Result<SecantSet> {
        let n = self.data.dim();
        let pts = self.data.points();
        let mut rows = DMatrix::zeros(indices.len(), n);
        for (r, &i) in indices.iter().enumerate() {
            let (j, k) = self.pair(i);
            rows.row_mut(r).copy_from(&(pts.column(k) - pts.column(j)).transpose());
        }
        SecantSet::from_rows(&rows, f64::MIN_POSITIVE)
    }

    fn distortions(&self, psi: &EmbeddingMatrix, indices: &[usize]) -> Vec<f64> {
        let y = psi.matrix() * self.data.points();
        indices
            .par_iter()
            .map(|&i| {
                let (j, k) = self.pair(i);
                let d = (y.column(k) - y.column(j)).norm_squared();
                (d / self.sq_norms[i] - 1.0).abs()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnGenConfig {
    pub initial_subset_size: usize,
    pub batch_size: usize,
    /// Maximum number of solves, the initial one included.
    pub max_rounds: usize,
    pub solver: SolverConfig,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ColumnGenResult {
    pub embedding: EmbeddingMatrix,
    /// Solves performed.
    pub rounds: usize,
    /// Indices into the pool, in the order they became active.
    pub active: Vec<usize>,
    /// True when a full sweep found no violated secant.
    pub converged: bool,
    /// Violated secants found by the last full sweep.
    pub violators_remaining: usize,
    /// Maximum distortion over the whole pool at the returned embedding.
    pub full_max_distortion: f64,
    pub solver_iterations: usize,
}

impl ColumnGenResult {
    pub fn final_active_set_size(&self) -> usize {
        self.active.len()
    }
}

struct ActiveSet {
    order: Vec<usize>,
    member: Vec<bool>,
}

impl ActiveSet {
    fn new(size: usize) -> Self {
        Self {
            order: Vec::new(),
            member: vec![false; size],
        }
    }

    fn insert(&mut self, i: usize) -> bool {
        if self.member[i] {
            return false;
        }
        self.member[i] = true;
        self.order.push(i);
        true
    }
}

/// Greedy active-set loop:
///
/// 1. solve on a random subset `S₀` and keep its active secants;
/// 2. scan the next random batch of unseen secants and add its active ones;
/// 3. re-solve on the active set (warm-started) whenever a batch contained a
///    violated secant;
/// 4. once every secant has been seen, sweep the full pool; stop when the
///    sweep finds no violation, otherwise add the active ones and re-solve.
///
/// A secant is active when `|‖Ψv‖² − 1| ≥ δ − act_tol` and violated when the
/// distortion exceeds `δ + feas_tol`. The active set only grows.
pub fn column_generation<P: SecantPool + ?Sized>(
    pool: &P,
    config: &ColumnGenConfig,
) -> Result<ColumnGenResult> {
    let total = pool.len();
    if total == 0 {
        return Err(EmbedError::EmptySecantSet { skipped: 0 });
    }
    if config.initial_subset_size == 0 || config.batch_size == 0 {
        return Err(EmbedError::invalid("subset and batch sizes must be at least 1"));
    }
    if config.max_rounds == 0 {
        return Err(EmbedError::invalid("max_rounds must be at least 1"));
    }
    let delta = config.solver.delta();
    let active_level = delta - ACT_TOL;
    let violation_level = delta + config.solver.feas_tol();

    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let s0_len = config.initial_subset_size.min(total);
    let s0 = &order[..s0_len];

    let mut rounds = 1;
    let mut iterations = 0;
    let first = config.solver.solve(&pool.materialize(s0)?, None)?;
    iterations += first.iterations;
    let mut psi = first.embedding;

    let mut active = ActiveSet::new(total);
    for (&i, d) in s0.iter().zip(pool.distortions(&psi, s0)) {
        if d >= active_level {
            active.insert(i);
        }
    }

    let mut cursor = s0_len;
    let all: Vec<usize> = (0..total).collect();
    loop {
        let full_sweep = cursor >= total;
        let batch: &[usize] = if full_sweep {
            &all
        } else {
            let end = (cursor + config.batch_size).min(total);
            let b = &order[cursor..end];
            cursor = end;
            b
        };
        let dist = pool.distortions(&psi, batch);
        let violators = dist.iter().filter(|&&d| d > violation_level).count();
        for (&i, &d) in batch.iter().zip(&dist) {
            if d >= active_level {
                active.insert(i);
            }
        }
        if violators == 0 {
            if full_sweep {
                return Ok(finish(pool, psi, rounds, active, true, 0, iterations));
            }
            continue;
        }
        if rounds >= config.max_rounds {
            let remaining = if full_sweep {
                violators
            } else {
                count_violators(pool, &psi, &all, violation_level)
            };
            return Ok(finish(pool, psi, rounds, active, false, remaining, iterations));
        }
        let summary = config.solver.solve(&pool.materialize(&active.order)?, Some(&psi))?;
        iterations += summary.iterations;
        psi = summary.embedding;
        rounds += 1;
    }
}

fn count_violators<P: SecantPool + ?Sized>(pool: &P, psi: &EmbeddingMatrix, all: &[usize], level: f64) -> usize {
    pool.distortions(psi, all).iter().filter(|&&d| d > level).count()
}

fn finish<P: SecantPool + ?Sized>(
    pool: &P,
    embedding: EmbeddingMatrix,
    rounds: usize,
    active: ActiveSet,
    converged: bool,
    violators_remaining: usize,
    solver_iterations: usize,
) -> ColumnGenResult {
    let all: Vec<usize> = (0..pool.len()).collect();
    let full_max_distortion = pool.distortions(&embedding, &all).into_iter().fold(0.0, f64::max);
    ColumnGenResult {
        embedding,
        rounds,
        active: active.order,
        converged,
        violators_remaining,
        full_max_distortion,
        solver_iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fromax::FroMaxConfig;
    use crate::nilepro::NileProConfig;
    use crate::secant::build_secant_set;

    fn corners() -> DataMatrix {
        // unit square corners plus centre in the plane z = 0 of ℝ³
        DataMatrix::from_row_points(&DMatrix::from_row_slice(
            5,
            3,
            &[
                0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.5, 0.5, 0.0,
            ],
        ))
        .unwrap()
    }

    #[test]
    fn rank_trace_decreases_by_one() {
        let secants = build_secant_set(&corners(), 1e-9).unwrap();
        let cfg = RankAdjustConfig {
            initial_rank: 3,
            max_outer_iters: 10,
            solver: SolverConfig::NilePro(NileProConfig::new(0.1, 3)),
        };
        let out = rank_adjust(&secants, &cfg).unwrap();
        for w in out.trace.windows(2) {
            assert_eq!(w[1].rank + 1, w[0].rank);
        }
        assert_eq!(out.final_rank, out.embedding.rank());
        // the planar data admits a rank-2 isometry but no rank-1 embedding
        assert_eq!(out.final_rank, 2);
    }

    #[test]
    fn rank_one_start_is_rejected() {
        let secants = build_secant_set(&corners(), 1e-9).unwrap();
        let mut fx = FroMaxConfig::new(0.1, 1);
        fx.max_iters = 300;
        let cfg = RankAdjustConfig {
            initial_rank: 1,
            max_outer_iters: 5,
            solver: SolverConfig::FroMax(fx),
        };
        let err = rank_adjust(&secants, &cfg).unwrap_err();
        assert!(matches!(err, EmbedError::InitialRankTooSmall { rank: 1 }));
    }

    #[test]
    fn full_initial_subset_takes_one_round() {
        let secants = build_secant_set(&corners(), 1e-9).unwrap();
        let cfg = ColumnGenConfig {
            initial_subset_size: secants.len(),
            batch_size: 3,
            max_rounds: 10,
            solver: SolverConfig::NilePro(NileProConfig::new(0.1, 2)),
            seed: 1,
        };
        let out = column_generation(&secants, &cfg).unwrap();
        assert!(out.converged);
        assert_eq!(out.rounds, 1);
        assert!(out.full_max_distortion <= 0.1);
    }

    #[test]
    fn pair_pool_matches_materialized_secants() {
        let data = corners();
        let pool = PairSecants::new(&data, 1e-9).unwrap();
        assert_eq!(pool.len(), 10);
        let psi = EmbeddingMatrix::new(DMatrix::from_row_slice(2, 3, &[1.0, 0.5, 0.0, 0.0, 0.8, 0.3])).unwrap();
        let idx: Vec<usize> = (0..pool.len()).collect();
        let set = pool.materialize(&idx).unwrap();
        let direct = SecantPool::distortions(&set, &psi, &(0..set.len()).collect::<Vec<_>>());
        let mut a = pool.distortions(&psi, &idx);
        let mut b = direct;
        // materialization may merge parallel secants, so compare as sets
        a.sort_by(f64::total_cmp);
        a.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        b.sort_by(f64::total_cmp);
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
