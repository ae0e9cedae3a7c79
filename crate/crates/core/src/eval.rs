//! Baselines and downstream evaluation: PCA, Gaussian random projections,
//! k-nearest-neighbor classification and nearest-neighbor recall.

use std::collections::{BTreeMap, HashSet};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EmbedError, Result};
use crate::secant::{sorted_eigen, DataMatrix, EmbeddingMatrix, SecantSet};

/// Eigenvalues of the covariance below this fraction of the largest one are
/// treated as zero when deciding the rank of the centered data.
const PCA_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct PcaEmbedding {
    /// `m × N`; row `k` is the `k`-th principal direction.
    pub embedding: EmbeddingMatrix,
    /// Variance captured by each row, descending.
    pub explained_variance: Vec<f64>,
    /// Trailing rows set to zero because the centered data has lower rank.
    pub padded_rows: usize,
}

/// Principal directions and variances of the centered data, all `N` of them.
fn principal_axes(data: &DataMatrix) -> (Vec<f64>, DMatrix<f64>) {
    let x = data.points();
    let q = x.ncols();
    let mean = x.column_mean();
    let mut centered = x.clone();
    for mut col in centered.column_iter_mut() {
        col -= &mean;
    }
    let denom = (q.max(2) - 1) as f64;
    let cov = &centered * centered.transpose() / denom;
    sorted_eigen(&cov)
}

/// Leading `m` principal directions of the mean-centered data. Directions
/// beyond the rank of the centered data are returned as zero rows.
pub fn pca_embedding(data: &DataMatrix, m: usize) -> Result<PcaEmbedding> {
    let n = data.dim();
    if m == 0 || m > n {
        return Err(EmbedError::invalid(format!("PCA dimension must lie in 1..={n}, got {m}")));
    }
    let (values, vectors) = principal_axes(data);
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let mut psi = DMatrix::zeros(m, n);
    let mut explained = Vec::with_capacity(m);
    let mut padded = 0;
    for k in 0..m {
        let w = values[k];
        if top > 0.0 && w > PCA_RANK_TOL * top {
            psi.row_mut(k).copy_from(&vectors.column(k).transpose());
            explained.push(w);
        } else {
            explained.push(0.0);
            padded += 1;
        }
    }
    Ok(PcaEmbedding {
        embedding: EmbeddingMatrix::new(psi)?,
        explained_variance: explained,
        padded_rows: padded,
    })
}

/// Smallest `m` whose PCA embedding keeps every secant within `δ`, or `N`
/// when no smaller `m` does.
pub fn pca_min_measurements(data: &DataMatrix, secants: &SecantSet, delta: f64) -> Result<usize> {
    let n = data.dim();
    if secants.dim() != n {
        return Err(EmbedError::DimensionMismatch {
            expected: n,
            got: secants.dim(),
        });
    }
    let full = pca_embedding(data, n)?;
    // coefficient of each secant along each principal direction
    let coeffs = secants.vectors() * full.embedding.matrix().transpose();
    let mut captured = DVector::<f64>::zeros(secants.len());
    for m in 1..=n {
        let col = coeffs.column(m - 1);
        captured.zip_apply(&col, |c, x| *c += x * x);
        let worst = captured.iter().map(|c| (c - 1.0).abs()).fold(0.0, f64::max);
        if worst <= delta {
            return Ok(m);
        }
    }
    Ok(n)
}

/// `m × n` matrix of i.i.d. `N(0, 1/m)` entries.
pub fn random_projection(n: usize, m: usize, seed: u64) -> Result<EmbeddingMatrix> {
    if m == 0 || m > n {
        return Err(EmbedError::invalid(format!("projection rank must lie in 1..={n}, got {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (m as f64).sqrt();
    EmbeddingMatrix::new(DMatrix::from_fn(m, n, |_, _| {
        let g: f64 = StandardNormal.sample(&mut rng);
        g * scale
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnResult {
    pub predicted_labels: Vec<u32>,
    pub misclassification_rate: f64,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnRecall {
    pub recall_at_k: f64,
    pub k: usize,
}

fn projected(data: &DataMatrix, psi: Option<&EmbeddingMatrix>) -> Result<DMatrix<f64>> {
    match psi {
        Some(p) => Ok(data.project(p)?.points().clone()),
        None => Ok(data.points().clone()),
    }
}

/// Indices of the `k` nearest columns of `base` to `query`, nearest first;
/// distance ties go to the smaller index. `skip` is excluded.
fn nearest(base: &DMatrix<f64>, query: &DVector<f64>, k: usize, skip: Option<usize>) -> Vec<usize> {
    let mut dist: Vec<(f64, usize)> = base
        .column_iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != skip)
        .map(|(j, col)| ((col - query).norm_squared(), j))
        .collect();
    let k = k.min(dist.len());
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dist.len() {
        dist.select_nth_unstable_by(k, cmp);
        dist.truncate(k);
    }
    dist.sort_unstable_by(cmp);
    dist.into_iter().map(|(_, j)| j).collect()
}

/// Majority label; ties go to the smallest label.
fn vote(labels: impl Iterator<Item = u32>) -> u32 {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let mut best = (0, u32::MAX);
    for (label, count) in counts {
        if count > best.0 {
            best = (count, label);
        }
    }
    best.1
}

/// Euclidean `k`-NN classification, optionally after projecting both sets by
/// `psi`. When `test` and `train` are the same object each point's own entry
/// is left out of its neighbor list.
pub fn knn_classify(
    train: &DataMatrix,
    train_labels: &[u32],
    test: &DataMatrix,
    test_labels: &[u32],
    k: usize,
    psi: Option<&EmbeddingMatrix>,
) -> Result<KnnResult> {
    if train.is_empty() {
        return Err(EmbedError::invalid("empty training set"));
    }
    if train_labels.len() != train.len() || test_labels.len() != test.len() {
        return Err(EmbedError::invalid("label counts must match point counts"));
    }
    if k == 0 {
        return Err(EmbedError::invalid("k must be at least 1"));
    }
    if train.dim() != test.dim() {
        return Err(EmbedError::DimensionMismatch {
            expected: train.dim(),
            got: test.dim(),
        });
    }
    let same = std::ptr::eq(train, test);
    let base = projected(train, psi)?;
    let queries = if same { base.clone() } else { projected(test, psi)? };
    let predicted: Vec<u32> = (0..queries.ncols())
        .into_par_iter()
        .map(|i| {
            let q = queries.column(i).into_owned();
            let nn = nearest(&base, &q, k, same.then_some(i));
            vote(nn.into_iter().map(|j| train_labels[j]))
        })
        .collect();
    let wrong = predicted.iter().zip(test_labels).filter(|(p, t)| p != t).count();
    Ok(KnnResult {
        misclassification_rate: wrong as f64 / test.len().max(1) as f64,
        predicted_labels: predicted,
        k,
    })
}

/// Mean over queries of `|trueNN_k ∩ embNN_k| / k`, where neighbors are taken
/// from `original` in the ambient and in the embedded space. Passing the same
/// object as `original` and `queries` excludes each point from its own list.
pub fn ann_recall(
    original: &DataMatrix,
    psi: &EmbeddingMatrix,
    queries: &DataMatrix,
    k: usize,
) -> Result<AnnRecall> {
    let same = std::ptr::eq(original, queries);
    let available = original.len() - usize::from(same);
    if k == 0 || k > available {
        return Err(EmbedError::invalid(format!(
            "k must lie in 1..={available}, got {k}"
        )));
    }
    if queries.dim() != original.dim() {
        return Err(EmbedError::DimensionMismatch {
            expected: original.dim(),
            got: queries.dim(),
        });
    }
    let base = original.points();
    let base_emb = projected(original, Some(psi))?;
    let q_emb = if same { base_emb.clone() } else { projected(queries, Some(psi))? };
    let total: f64 = (0..queries.len())
        .into_par_iter()
        .map(|i| {
            let skip = same.then_some(i);
            let truth: HashSet<usize> = nearest(base, &queries.point(i).into_owned(), k, skip)
                .into_iter()
                .collect();
            let found = nearest(&base_emb, &q_emb.column(i).into_owned(), k, skip);
            found.iter().filter(|j| truth.contains(j)).count() as f64 / k as f64
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(AnnRecall {
        recall_at_k: total / queries.len() as f64,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secant::{build_secant_set, max_distortion};

    fn rows(n: usize, xs: &[f64]) -> DataMatrix {
        DataMatrix::from_row_points(&DMatrix::from_row_slice(xs.len() / n, n, xs)).unwrap()
    }

    #[test]
    fn collinear_points_give_axis() {
        let d = rows(2, &[0.0, 0.0, 1.0, 0.0, 3.0, 0.0]);
        let p = pca_embedding(&d, 2).unwrap();
        let first = p.embedding.matrix().row(0);
        assert!((first[0].abs() - 1.0).abs() < 1e-12 && first[1].abs() < 1e-12);
        assert_eq!(p.padded_rows, 1);
    }

    #[test]
    fn full_pca_is_isometric_on_secants() {
        let d = rows(3, &[0.0, 1.0, 2.0, 1.0, -1.0, 0.5, 2.0, 0.0, 0.0, -1.0, 3.0, 1.0]);
        let p = pca_embedding(&d, 3).unwrap();
        let s = build_secant_set(&d, 1e-9).unwrap();
        assert!(max_distortion(&p.embedding, &s).unwrap().max_distortion < 1e-12);
    }

    #[test]
    fn subspace_data_needs_at_most_its_dimension() {
        // points in the plane x₃ = x₁ + x₂ inside ℝ³
        let d = rows(3, &[0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 2.0, 3.0, 5.0]);
        let s = build_secant_set(&d, 1e-9).unwrap();
        assert!(pca_min_measurements(&d, &s, 1e-9).unwrap() <= 2);
    }

    #[test]
    fn random_projection_shape_and_seed() {
        let a = random_projection(10, 4, 3).unwrap();
        assert_eq!((a.rank(), a.dim()), (4, 10));
        assert_eq!(a, random_projection(10, 4, 3).unwrap());
    }

    #[test]
    fn knn_single_training_point() {
        let train = DataMatrix::new(DMatrix::from_column_slice(2, 1, &[0.0, 0.0])).unwrap();
        let test = rows(2, &[1.0, 1.0, -5.0, 2.0]);
        let out = knn_classify(&train, &[4], &test, &[4, 3], 1, None).unwrap();
        assert_eq!(out.predicted_labels, vec![4, 4]);
        assert!((out.misclassification_rate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn knn_on_itself_excludes_self() {
        let d = rows(1, &[0.0, 0.1, 5.0, 5.1]);
        let labels = [0, 0, 1, 1];
        let out = knn_classify(&d, &labels, &d, &labels, 1, None).unwrap();
        assert_eq!(out.misclassification_rate, 0.0);
        // a copy is a different object, so each point finds itself
        let copy = d.clone();
        let other = [1, 1, 0, 0];
        let out = knn_classify(&d, &other, &copy, &other, 1, None).unwrap();
        assert_eq!(out.misclassification_rate, 0.0);
    }

    #[test]
    fn vote_ties_go_to_smallest_label() {
        assert_eq!(vote([3, 1, 3, 1].into_iter()), 1);
        assert_eq!(vote([5, 2, 5].into_iter()), 5);
    }

    #[test]
    fn identity_recall_is_one() {
        let d = rows(2, &[0.0, 0.0, 1.0, 0.2, 3.0, 1.0, -1.0, 4.0, 2.0, 2.0]);
        let id = EmbeddingMatrix::identity(2).unwrap();
        for k in 1..4 {
            assert_eq!(ann_recall(&d, &id, &d, k).unwrap().recall_at_k, 1.0);
        }
        let flat = EmbeddingMatrix::new(DMatrix::from_row_slice(1, 2, &[0.0, 1.0])).unwrap();
        assert_eq!(ann_recall(&d, &flat, &d, 4).unwrap().recall_at_k, 1.0);
    }
}
