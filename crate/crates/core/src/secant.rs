//! Point sets, secant sets, the quadratic-form operator over secants and its
//! adjoint, distortion evaluation, and embedding extraction from a Gram-like
//! matrix.
//!
//! Secants are stored row-wise in an `S × N` matrix `V`. With that layout the
//! operator is `A(P)_i = v_iᵀ P v_i = rowsum((V P) ∘ V)` and its adjoint is
//! `A*(z) = Vᵀ diag(z) V`.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector, DVectorView, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{EmbedError, Result};

/// Row-wise squared norms of an `S × r` projection `VΨᵀ`.
pub(crate) fn projection_sq_norms(proj: &DMatrix<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(proj.nrows());
    for col in proj.column_iter() {
        out += col.component_mul(&col);
    }
    out
}

/// Default threshold below which a point difference is treated as degenerate.
pub const DEFAULT_MIN_NORM: f64 = 1e-9;

const SYMMETRY_TOL: f64 = 1e-10;

/// A finite point cloud: `Q` points of dimension `N`, one point per column.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    points: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps an `N × Q` matrix whose columns are points.
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() == 0 {
            return Err(EmbedError::invalid("points must have dimension N >= 1"));
        }
        if points.ncols() == 0 {
            return Err(EmbedError::invalid("a data matrix needs at least one point"));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(EmbedError::invalid("data matrix contains NaN or Inf"));
        }
        Ok(Self { points })
    }

    /// Builds a data matrix from a `Q × N` row-per-point matrix (the on-disk layout).
    pub fn from_row_points(rows: &DMatrix<f64>) -> Result<Self> {
        Self::new(rows.transpose())
    }

    /// The `Q × N` row-per-point layout.
    pub fn to_row_points(&self) -> DMatrix<f64> {
        self.points.transpose()
    }

    pub fn dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.ncols() == 0
    }

    pub fn point(&self, j: usize) -> DVectorView<'_, f64> {
        self.points.column(j)
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    /// Keeps the listed points, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.len()) {
            return Err(EmbedError::invalid(format!(
                "point index {bad} out of range for {} points",
                self.len()
            )));
        }
        Self::new(self.points.select_columns(indices))
    }

    /// Applies `psi` to every point.
    pub fn project(&self, psi: &EmbeddingMatrix) -> Result<Self> {
        if psi.dim() != self.dim() {
            return Err(EmbedError::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        Self::new(psi.matrix() * &self.points)
    }
}

/// Unit-norm secants `v_i`, stored as the rows of an `S × N` matrix.
#[derive(Debug, Clone)]
pub struct SecantSet {
    vectors: DMatrix<f64>,
    source_pairs: Option<Vec<(usize, usize)>>,
    skipped_pairs: usize,
    duplicates: usize,
}

impl SecantSet {
    /// Normalizes and deduplicates the rows of `rows`. Rows whose norm is below
    /// `min_norm` are skipped and counted.
    pub fn from_rows(rows: &DMatrix<f64>, min_norm: f64) -> Result<Self> {
        let mut builder = SecantBuilder::new(rows.ncols(), min_norm)?;
        for row in rows.row_iter() {
            builder.push(row.transpose(), None);
        }
        builder.finish()
    }

    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// The `S × N` row matrix of secants.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn secant(&self, i: usize) -> DVector<f64> {
        self.vectors.row(i).transpose()
    }

    pub fn source_pairs(&self) -> Option<&[(usize, usize)]> {
        self.source_pairs.as_deref()
    }

    /// Number of point pairs skipped because their difference was below `min_norm`.
    pub fn skipped_pairs(&self) -> usize {
        self.skipped_pairs
    }

    /// Number of pairs dropped because their secant was already present (up to sign).
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// Restriction to the listed secants, in the given order.
    pub fn select(&self, indices: &[usize]) -> SecantSet {
        SecantSet {
            vectors: self.vectors.select_rows(indices),
            source_pairs: self
                .source_pairs
                .as_ref()
                .map(|pairs| indices.iter().map(|&i| pairs[i]).collect()),
            skipped_pairs: 0,
            duplicates: 0,
        }
    }

    /// `A(P)` without dimension checks.
    pub(crate) fn quad_forms(&self, p: &DMatrix<f64>) -> DVector<f64> {
        let vp = &self.vectors * p;
        vp.component_mul(&self.vectors).column_sum()
    }

    /// `A(ΨᵀΨ) = (‖Ψ v_i‖²)_i` without forming `ΨᵀΨ`.
    pub(crate) fn embedded_sq_norms(&self, psi: &DMatrix<f64>) -> DVector<f64> {
        projection_sq_norms(&self.project_secants(psi))
    }

    /// `A*(z) = Σ z_i v_i v_iᵀ` without length checks. Exactly symmetric.
    pub(crate) fn adjoint(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (mut row, &zi) in scaled.row_iter_mut().zip(z.iter()) {
            row *= zi;
        }
        let mut out = self.vectors.transpose() * scaled;
        symmetrize_in_place(&mut out);
        out
    }

    /// `S × r` projection `VΨᵀ`; row `i` is `(Ψv_i)ᵀ`.
    pub(crate) fn project_secants(&self, psi: &DMatrix<f64>) -> DMatrix<f64> {
        &self.vectors * psi.transpose()
    }

    /// `Ψ A*(z) = (VΨᵀ)ᵀ diag(z) V` from the precomputed projection `VΨᵀ`,
    /// an `r × N` product that never forms `A*(z)`.
    pub(crate) fn adjoint_from_projection(&self, proj: &DMatrix<f64>, z: &DVector<f64>) -> DMatrix<f64> {
        let mut scaled = proj.clone();
        for mut col in scaled.column_iter_mut() {
            col.component_mul_assign(z);
        }
        scaled.transpose() * &self.vectors
    }

    /// The `S × S` matrix `G_ij = (v_iᵀ v_j)²`, i.e. `A A*`.
    pub(crate) fn squared_gram(&self) -> DMatrix<f64> {
        let g = &self.vectors * self.vectors.transpose();
        g.map(|x| x * x)
    }
}

struct SecantBuilder {
    dim: usize,
    min_norm: f64,
    rows: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    seen: HashSet<Vec<u64>>,
    skipped: usize,
    duplicates: usize,
    track_pairs: bool,
}

impl SecantBuilder {
    fn new(dim: usize, min_norm: f64) -> Result<Self> {
        if !(min_norm > 0.0) {
            return Err(EmbedError::invalid("min_norm must be positive"));
        }
        if dim == 0 {
            return Err(EmbedError::invalid("secants need dimension N >= 1"));
        }
        Ok(Self {
            dim,
            min_norm,
            rows: Vec::new(),
            pairs: Vec::new(),
            seen: HashSet::new(),
            skipped: 0,
            duplicates: 0,
            track_pairs: true,
        })
    }

    fn push(&mut self, mut diff: DVector<f64>, pair: Option<(usize, usize)>) {
        let norm = diff.norm();
        if !(norm >= self.min_norm) {
            self.skipped += 1;
            return;
        }
        diff /= norm;
        // v and -v impose the same constraint; store the sign-canonical one.
        if let Some(first) = diff.iter().find(|x| **x != 0.0) {
            if *first < 0.0 {
                diff.neg_mut();
            }
        }
        let key: Vec<u64> = diff.iter().map(|x| (x + 0.0).to_bits()).collect();
        if !self.seen.insert(key) {
            self.duplicates += 1;
            return;
        }
        self.rows.extend(diff.iter());
        match pair {
            Some(p) => self.pairs.push(p),
            None => self.track_pairs = false,
        }
    }

    fn finish(self) -> Result<SecantSet> {
        let s = self.rows.len() / self.dim;
        if s == 0 {
            return Err(EmbedError::EmptySecantSet {
                skipped: self.skipped,
            });
        }
        Ok(SecantSet {
            vectors: DMatrix::from_row_slice(s, self.dim, &self.rows),
            source_pairs: self.track_pairs.then_some(self.pairs),
            skipped_pairs: self.skipped,
            duplicates: self.duplicates,
        })
    }
}

/// Normalized differences over all unordered pairs of distinct points.
///
/// Pairs closer than `min_norm` are skipped and counted, and a secant that
/// repeats an earlier one (up to sign) is stored once.
pub fn build_secant_set(data: &DataMatrix, min_norm: f64) -> Result<SecantSet> {
    if data.len() < 2 {
        return Err(EmbedError::invalid("building secants needs at least two points"));
    }
    let mut builder = SecantBuilder::new(data.dim(), min_norm)?;
    for j in 0..data.len() {
        for k in (j + 1)..data.len() {
            builder.push(data.point(j) - data.point(k), Some((j, k)));
        }
    }
    builder.finish()
}

/// An `r × N` linear embedding `Ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    psi: DMatrix<f64>,
}

impl EmbeddingMatrix {
    pub fn new(psi: DMatrix<f64>) -> Result<Self> {
        let (r, n) = psi.shape();
        if r == 0 || n == 0 {
            return Err(EmbedError::invalid("embedding must have at least one row and column"));
        }
        if r > n {
            return Err(EmbedError::invalid(format!(
                "embedding rank {r} exceeds ambient dimension {n}"
            )));
        }
        if psi.iter().any(|x| !x.is_finite()) {
            return Err(EmbedError::invalid("embedding contains NaN or Inf"));
        }
        Ok(Self { psi })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn rank(&self) -> usize {
        self.psi.nrows()
    }

    pub fn dim(&self) -> usize {
        self.psi.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.psi
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.psi
    }

    /// `ΨᵀΨ`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.psi.transpose() * &self.psi
    }
}

/// Per-secant distortions `|‖Ψ v_i‖² − 1|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub per_secant: Vec<f64>,
    pub max_distortion: f64,
    /// Threshold used to compute `active_indices`.
    pub threshold: f64,
    pub active_indices: Vec<usize>,
}

impl DistortionReport {
    pub fn from_distortions(per_secant: Vec<f64>, threshold: f64) -> Self {
        let max_distortion = per_secant.iter().copied().fold(0.0, f64::max);
        let active_indices = per_secant
            .iter()
            .enumerate()
            .filter(|(_, d)| **d >= threshold)
            .map(|(i, _)| i)
            .collect();
        Self {
            per_secant,
            max_distortion,
            threshold,
            active_indices,
        }
    }

    /// True iff every secant has distortion at most `delta`.
    pub fn satisfies(&self, delta: f64) -> bool {
        self.max_distortion <= delta
    }
}

fn check_secant_dim(secants: &SecantSet, dim: usize) -> Result<()> {
    if secants.dim() != dim {
        return Err(EmbedError::DimensionMismatch {
            expected: secants.dim(),
            got: dim,
        });
    }
    Ok(())
}

/// Largest `|P_ij − P_ji|`.
pub fn asymmetry(p: &DMatrix<f64>) -> f64 {
    let n = p.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((p[(i, j)] - p[(j, i)]).abs());
        }
    }
    worst
}

fn check_symmetric(p: &DMatrix<f64>) -> Result<()> {
    if !p.is_square() {
        return Err(EmbedError::invalid(format!(
            "expected a square matrix, got {}x{}",
            p.nrows(),
            p.ncols()
        )));
    }
    let scale = p.amax().max(1.0);
    let asym = asymmetry(p);
    if asym > SYMMETRY_TOL * scale {
        return Err(EmbedError::NotSymmetric { asymmetry: asym });
    }
    Ok(())
}

pub(crate) fn symmetrize_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

pub(crate) fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    symmetrize_in_place(&mut out);
    out
}

/// `A(P)`: the vector of quadratic forms `v_iᵀ P v_i`.
pub fn apply_a(p: &DMatrix<f64>, secants: &SecantSet) -> Result<DVector<f64>> {
    check_symmetric(p)?;
    check_secant_dim(secants, p.nrows())?;
    Ok(secants.quad_forms(p))
}

/// `A*(z) = Σ z_i v_i v_iᵀ`.
pub fn apply_a_adjoint(z: &DVector<f64>, secants: &SecantSet) -> Result<DMatrix<f64>> {
    if z.len() != secants.len() {
        return Err(EmbedError::DimensionMismatch {
            expected: secants.len(),
            got: z.len(),
        });
    }
    Ok(secants.adjoint(z))
}

/// Distortions of `psi` over `secants`; active indices are those attaining the
/// maximum (to within 1e-9).
pub fn max_distortion(psi: &EmbeddingMatrix, secants: &SecantSet) -> Result<DistortionReport> {
    let per = per_secant_distortion(psi, secants)?;
    let max = per.iter().copied().fold(0.0, f64::max);
    Ok(DistortionReport::from_distortions(per, max - 1e-9))
}

/// Distortions of `psi` with an explicit activity threshold.
pub fn distortion_report(
    psi: &EmbeddingMatrix,
    secants: &SecantSet,
    threshold: f64,
) -> Result<DistortionReport> {
    let per = per_secant_distortion(psi, secants)?;
    Ok(DistortionReport::from_distortions(per, threshold))
}

fn per_secant_distortion(psi: &EmbeddingMatrix, secants: &SecantSet) -> Result<Vec<f64>> {
    if secants.is_empty() {
        return Err(EmbedError::EmptySecantSet { skipped: 0 });
    }
    check_secant_dim(secants, psi.dim())?;
    Ok(secants
        .embedded_sq_norms(psi.matrix())
        .iter()
        .map(|x| (x - 1.0).abs())
        .collect())
}

/// `‖A(ΨᵀΨ) − 1‖_∞` for a raw `r × N` matrix.
pub(crate) fn linf_distortion(psi: &DMatrix<f64>, secants: &SecantSet) -> f64 {
    secants
        .embedded_sq_norms(psi)
        .iter()
        .map(|x| (x - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Eigenpairs of a symmetric matrix sorted by descending eigenvalue, with each
/// eigenvector's first nonzero entry made positive.
pub fn sorted_eigen(p: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(symmetrized(p));
    let n = p.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = eig.eigenvectors.select_columns(&order);
    for mut col in vectors.column_iter_mut() {
        let scale = col.amax();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12 * scale.max(1e-300)) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
    }
    (values, vectors)
}

/// `Ψ = Γ^{1/2} Uᵀ` from the `rank` leading eigenpairs of `P`, negative
/// eigenvalues clamped to zero.
pub fn extract_embedding(p: &DMatrix<f64>, rank: usize) -> Result<EmbeddingMatrix> {
    check_symmetric(p)?;
    let n = p.nrows();
    if rank == 0 || rank > n {
        return Err(EmbedError::invalid(format!(
            "rank must lie in 1..={n}, got {rank}"
        )));
    }
    let (values, vectors) = sorted_eigen(p);
    let mut psi = DMatrix::zeros(rank, n);
    for k in 0..rank {
        let s = values[k].max(0.0).sqrt();
        psi.row_mut(k).copy_from(&(vectors.column(k).transpose() * s));
    }
    EmbeddingMatrix::new(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn data(rows: &[&[f64]]) -> DataMatrix {
        let n = rows[0].len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        DataMatrix::from_row_points(&DMatrix::from_row_slice(rows.len(), n, &flat)).unwrap()
    }

    #[test]
    fn two_points_give_one_secant() {
        let s = build_secant_set(&data(&[&[0.0, 0.0], &[1.0, 0.0]]), DEFAULT_MIN_NORM).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.secant(0).as_slice(), &[1.0, 0.0]);
        assert_eq!(s.source_pairs(), Some(&[(0, 1)][..]));
    }

    #[test]
    fn duplicate_point_is_skipped_and_counted() {
        let s = build_secant_set(
            &data(&[&[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]]),
            DEFAULT_MIN_NORM,
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.skipped_pairs(), 1);
        assert_eq!(s.duplicates(), 1);
    }

    #[test]
    fn sixty_distinct_points() {
        // generic points: no two differences are parallel
        let pts: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let t = i as f64;
                vec![t, (1.3 * t).sin() * 10.0, (0.7 * t).cos() * 5.0]
            })
            .collect();
        let rows: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let s = build_secant_set(&data(&rows), DEFAULT_MIN_NORM).unwrap();
        assert_eq!(s.len(), 1770);
        for i in 0..s.len() {
            assert!((s.secant(i).norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn all_degenerate_pairs_error() {
        let err = build_secant_set(&data(&[&[1.0, 2.0], &[1.0, 2.0]]), DEFAULT_MIN_NORM);
        assert!(matches!(err, Err(EmbedError::EmptySecantSet { skipped: 1 })));
    }

    #[test]
    fn operator_examples() {
        let s = SecantSet::from_rows(&DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), 1e-9).unwrap();
        let p = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.0]));
        assert_eq!(apply_a(&p, &s).unwrap()[0], 2.0);
        assert_eq!(apply_a(&DMatrix::zeros(2, 2), &s).unwrap()[0], 0.0);
        let adj = apply_a_adjoint(&DVector::from_vec(vec![1.0]), &s).unwrap();
        assert_eq!(adj, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn identity_maps_to_ones() {
        let rows = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, -1.0, 0.5, 0.0, 0.0, 0.0, 4.0]);
        let s = SecantSet::from_rows(&rows, 1e-9).unwrap();
        let out = apply_a(&DMatrix::identity(3, 3), &s).unwrap();
        for x in out.iter() {
            assert_abs_diff_eq!(*x, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn adjoint_length_mismatch() {
        let s = SecantSet::from_rows(&DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), 1e-9).unwrap();
        assert!(matches!(
            apply_a_adjoint(&DVector::zeros(2), &s),
            Err(EmbedError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn apply_a_rejects_asymmetric() {
        let s = SecantSet::from_rows(&DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), 1e-9).unwrap();
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(apply_a(&p, &s), Err(EmbedError::NotSymmetric { .. })));
    }

    #[test]
    fn distortion_examples() {
        let rows = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        let s = SecantSet::from_rows(&rows, 1e-9).unwrap();
        let id = EmbeddingMatrix::identity(2).unwrap();
        assert_abs_diff_eq!(max_distortion(&id, &s).unwrap().max_distortion, 0.0, epsilon = 1e-15);
        let two = EmbeddingMatrix::new(DMatrix::identity(2, 2) * 2.0).unwrap();
        assert_abs_diff_eq!(max_distortion(&two, &s).unwrap().max_distortion, 3.0, epsilon = 1e-12);
        let zero = EmbeddingMatrix::new(DMatrix::zeros(1, 2)).unwrap();
        let rep = max_distortion(&zero, &s).unwrap();
        assert_eq!(rep.max_distortion, 1.0);
        assert_eq!(rep.active_indices, vec![0, 1]);
    }

    #[test]
    fn extract_diagonal() {
        let p = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0, 0.0]));
        let psi = extract_embedding(&p, 2).unwrap();
        let expected = DMatrix::from_row_slice(2, 3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!((psi.matrix() - expected).amax() < 1e-12);
    }

    #[test]
    fn extract_rank_one() {
        let v = DVector::from_vec(vec![0.6, -0.8]);
        let p = &v * v.transpose();
        let psi = extract_embedding(&p, 1).unwrap();
        // first nonzero entry is made positive
        assert!((psi.matrix().row(0).transpose() - &v).amax() < 1e-12);
    }

    #[test]
    fn extract_clamps_negative_eigenvalues() {
        let p = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -3.0]));
        let psi = extract_embedding(&p, 2).unwrap();
        assert_eq!(psi.matrix().row(1).amax(), 0.0);
    }

    #[test]
    fn extract_rejects_asymmetric_and_bad_rank() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(extract_embedding(&p, 1).is_err());
        assert!(extract_embedding(&DMatrix::identity(2, 2), 3).is_err());
        assert!(extract_embedding(&DMatrix::identity(2, 2), 0).is_err());
    }

    #[test]
    fn embedding_validation() {
        assert!(EmbeddingMatrix::new(DMatrix::zeros(3, 2)).is_err());
        assert!(EmbeddingMatrix::new(DMatrix::from_element(1, 2, f64::NAN)).is_err());
        assert!(DataMatrix::new(DMatrix::from_element(2, 2, f64::INFINITY)).is_err());
    }
}
