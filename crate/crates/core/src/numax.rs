//! NuMax baseline: nuclear-norm relaxation of the rank program,
//!
//! ```text
//! minimize ‖P‖*   s.t.   P ⪰ 0,  P = L,  A(L) = q,  ‖q − 1‖_∞ ≤ δ
//! ```
//!
//! solved by alternating eigenvalue soft-thresholding for `P`, a structured
//! least-squares solve for `L`, box truncation for `q` and scaled multiplier
//! steps for `Γ` and `ω`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{EmbedError, Result};
use crate::fromax::clip_to_box;
use crate::linear::StructuredSystem;
use crate::secant::{extract_embedding, linf_distortion, sorted_eigen, symmetrized, EmbeddingMatrix, SecantSet};
use crate::solver::DIVERGENCE_GUARD;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuMaxConfig {
    pub delta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    /// Eigenvalues above `rank_tol · λ_max` count towards the rank.
    pub rank_tol: f64,
    pub feas_tol: f64,
}

impl NuMaxConfig {
    pub fn new(delta: f64) -> Self {
        Self {
            delta,
            beta1: 1.0,
            beta2: 1.0,
            eta: 1.618,
            epsilon: 1e-6,
            max_iters: 20_000,
            rank_tol: 1e-4,
            feas_tol: 1e-4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("delta", self.delta),
            ("beta1", self.beta1),
            ("eta", self.eta),
            ("epsilon", self.epsilon),
            ("rank_tol", self.rank_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(EmbedError::invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.beta2 >= 0.0) {
            return Err(EmbedError::invalid("beta2 must be non-negative"));
        }
        if !(self.feas_tol >= 0.0) {
            return Err(EmbedError::invalid("feas_tol must be non-negative"));
        }
        if self.max_iters == 0 {
            return Err(EmbedError::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!(
            "delta={}, beta1={}, beta2={}, eta={}",
            self.delta, self.beta1, self.beta2, self.eta
        )
    }
}

#[derive(Debug, Clone)]
pub struct NuMaxState {
    pub p: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub q: DVector<f64>,
    pub gamma: DMatrix<f64>,
    pub omega: DVector<f64>,
    pub iter: usize,
    /// `‖P − L‖_F`
    pub primal_residual: f64,
    /// `‖A(L) − q‖₂`
    pub constraint_residual: f64,
}

#[derive(Debug, Clone)]
pub struct NuMaxOutcome {
    pub embedding: EmbeddingMatrix,
    pub state: NuMaxState,
    pub rank: usize,
    pub converged: bool,
    pub max_distortion: f64,
}

/// Number of eigenvalues above `tol · λ_max`, zero for a matrix with no
/// positive eigenvalue.
pub fn numerical_rank(eigenvalues: &[f64], tol: f64) -> usize {
    let top = eigenvalues.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return 0;
    }
    eigenvalues.iter().filter(|&&w| w > tol * top).count()
}

/// `argmin ‖P‖* + (β/2)‖P − M‖²` over the PSD cone: eigenvalues of `sym(M)`
/// shifted down by `1/β` and clamped at zero.
pub fn psd_singular_value_threshold(m: &DMatrix<f64>, beta: f64) -> DMatrix<f64> {
    let (w, u) = sorted_eigen(&symmetrized(m));
    let shift = 1.0 / beta;
    let n = m.nrows();
    let mut p = DMatrix::zeros(n, n);
    for (k, &lambda) in w.iter().enumerate() {
        let t = lambda - shift;
        if t <= 0.0 {
            break;
        }
        let col = u.column(k);
        p.ger(t, &col, &col, 1.0);
    }
    symmetrized(&p)
}

pub struct NuMax<'a> {
    secants: &'a SecantSet,
    config: NuMaxConfig,
    system: StructuredSystem<'a>,
}

impl<'a> NuMax<'a> {
    pub fn new(secants: &'a SecantSet, config: NuMaxConfig) -> Result<Self> {
        config.validate()?;
        let system = StructuredSystem::new(secants, config.beta2 / config.beta1)?;
        Ok(Self {
            secants,
            config,
            system,
        })
    }

    pub fn config(&self) -> &NuMaxConfig {
        &self.config
    }

    pub fn system(&self) -> &StructuredSystem<'a> {
        &self.system
    }

    /// Zero start, or `P = L = ΨᵀΨ` when warm-started.
    pub fn initial_state(&self, warm: Option<&EmbeddingMatrix>) -> Result<NuMaxState> {
        let n = self.secants.dim();
        let s = self.secants.len();
        let p = match warm {
            Some(psi) => {
                if psi.dim() != n {
                    return Err(EmbedError::DimensionMismatch {
                        expected: n,
                        got: psi.dim(),
                    });
                }
                psi.gram()
            }
            None => DMatrix::zeros(n, n),
        };
        Ok(NuMaxState {
            l: p.clone(),
            p,
            q: DVector::from_element(s, 1.0),
            gamma: DMatrix::zeros(n, n),
            omega: DVector::zeros(s),
            iter: 0,
            primal_residual: f64::INFINITY,
            constraint_residual: f64::INFINITY,
        })
    }

    pub fn update_p(&self, state: &NuMaxState) -> DMatrix<f64> {
        psd_singular_value_threshold(&(&state.l + &state.gamma), self.config.beta1)
    }

    /// Right-hand side of `(I + (β₂/β₁)A*A)(L) = P − Γ + (β₂/β₁)A*(q + ω)`.
    pub fn l_update_rhs(&self, state: &NuMaxState) -> DMatrix<f64> {
        let ratio = self.config.beta2 / self.config.beta1;
        let mut rhs = &state.p - &state.gamma;
        if ratio > 0.0 {
            rhs += self.secants.adjoint(&(&state.q + &state.omega)) * ratio;
        }
        symmetrized(&rhs)
    }

    pub fn update_l(&self, state: &NuMaxState) -> DMatrix<f64> {
        self.system.solve(&self.l_update_rhs(state))
    }

    /// `q = 1 + sign(z)·min(|z|, δ)` with `z = A(L) − ω − 1`.
    pub fn update_q(&self, state: &NuMaxState) -> DVector<f64> {
        let mut z = self.secants.quad_forms(&state.l) - &state.omega;
        z.add_scalar_mut(-1.0);
        clip_to_box(&z, self.config.delta)
    }

    /// `Γ − η(P − L)` and `ω − η(A(L) − q)`.
    pub fn update_multipliers(&self, state: &NuMaxState) -> (DMatrix<f64>, DVector<f64>) {
        let eta = self.config.eta;
        let gamma = &state.gamma - (&state.p - &state.l) * eta;
        let omega = &state.omega - (self.secants.quad_forms(&state.l) - &state.q) * eta;
        (gamma, omega)
    }

    pub fn step(&self, state: &mut NuMaxState) -> Result<()> {
        state.p = self.update_p(state);
        state.l = self.update_l(state);
        state.q = self.update_q(state);
        let (gamma, omega) = self.update_multipliers(state);
        state.gamma = gamma;
        state.omega = omega;
        state.iter += 1;
        state.primal_residual = (&state.p - &state.l).norm();
        state.constraint_residual = (self.secants.quad_forms(&state.l) - &state.q).norm();
        let blown = !state.primal_residual.is_finite()
            || !state.constraint_residual.is_finite()
            || state.primal_residual > DIVERGENCE_GUARD
            || state.constraint_residual > DIVERGENCE_GUARD;
        if blown {
            return Err(EmbedError::Diverged {
                solver: "numax",
                iteration: state.iter,
                params: self.config.describe(),
            });
        }
        Ok(())
    }

    /// Runs until both residuals drop below `ε` or `max_iters`, then extracts
    /// `Ψ` at the numerical rank of `P`. Convergence also requires the
    /// extracted `Ψ` to satisfy `δ + feas_tol`.
    pub fn solve(&self, warm: Option<&EmbeddingMatrix>) -> Result<NuMaxOutcome> {
        let mut state = self.initial_state(warm)?;
        let eps = self.config.epsilon;
        let mut small_residuals = false;
        while state.iter < self.config.max_iters {
            self.step(&mut state)?;
            if state.primal_residual < eps && state.constraint_residual < eps {
                small_residuals = true;
                break;
            }
        }
        let (w, _) = sorted_eigen(&state.p);
        let rank = numerical_rank(&w, self.config.rank_tol);
        if rank == 0 {
            return Err(EmbedError::EmptyEmbedding);
        }
        let embedding = extract_embedding(&state.p, rank)?;
        let max_distortion = linf_distortion(embedding.matrix(), self.secants);
        let converged = small_residuals && max_distortion <= self.config.delta + self.config.feas_tol;
        Ok(NuMaxOutcome {
            embedding,
            state,
            rank,
            converged,
            max_distortion,
        })
    }
}

pub fn numax_solve(secants: &SecantSet, config: &NuMaxConfig) -> Result<NuMaxOutcome> {
    NuMax::new(secants, config.clone())?.solve(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(xs: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(xs))
    }

    #[test]
    fn p_update_thresholds_eigenvalues() {
        let p = psd_singular_value_threshold(&diag(&[2.0, 0.5]), 1.0);
        assert!((p - diag(&[1.0, 0.0])).amax() < 1e-14);
        let z = psd_singular_value_threshold(&DMatrix::zeros(3, 3), 1.0);
        assert_eq!(z, DMatrix::zeros(3, 3));
        // negative eigenvalues are clamped
        let n = psd_singular_value_threshold(&diag(&[-3.0, 4.0]), 2.0);
        assert!((n - diag(&[0.0, 3.5])).amax() < 1e-14);
    }

    #[test]
    fn l_update_without_coupling() {
        let secants = SecantSet::from_rows(&DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), 1e-9).unwrap();
        let mut cfg = NuMaxConfig::new(0.1);
        cfg.beta2 = 0.0;
        let solver = NuMax::new(&secants, cfg).unwrap();
        let mut st = solver.initial_state(None).unwrap();
        st.p = diag(&[2.0, 1.0]);
        st.gamma = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.1, 0.0]);
        assert!((solver.update_l(&st) - (&st.p - &st.gamma)).amax() < 1e-15);
    }

    #[test]
    fn l_update_single_secant() {
        // (I + A*A)L = A*(q) with v = e₁, q = 1 gives L = diag(0.5, 0)
        let secants = SecantSet::from_rows(&DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), 1e-9).unwrap();
        let solver = NuMax::new(&secants, NuMaxConfig::new(0.1)).unwrap();
        let st = solver.initial_state(None).unwrap();
        assert!((solver.update_l(&st) - diag(&[0.5, 0.0])).amax() < 1e-14);
    }

    #[test]
    fn q_truncation() {
        let secants = SecantSet::from_rows(&DMatrix::identity(2, 2), 1e-9).unwrap();
        let solver = NuMax::new(&secants, NuMaxConfig::new(0.1)).unwrap();
        let mut st = solver.initial_state(None).unwrap();
        st.l = diag(&[1.3, 0.95]);
        let q = solver.update_q(&st);
        assert!((q - DVector::from_vec(vec![1.1, 0.95])).amax() < 1e-15);
    }

    #[test]
    fn numerical_rank_counts_relative_to_top() {
        assert_eq!(numerical_rank(&[10.0, 1e-2, 1e-4, -1.0], 1e-4), 2);
        assert_eq!(numerical_rank(&[0.0, -1.0], 1e-4), 0);
    }

    #[test]
    fn two_point_instance_is_rank_one() {
        let secants = SecantSet::from_rows(&DMatrix::from_row_slice(1, 2, &[0.6, 0.8]), 1e-9).unwrap();
        let out = numax_solve(&secants, &NuMaxConfig::new(0.1)).unwrap();
        assert!(out.converged);
        assert_eq!(out.rank, 1);
        assert!(out.max_distortion <= 0.1 + 1e-4);
    }

    #[test]
    fn huge_delta_gives_empty_embedding() {
        let secants = SecantSet::from_rows(&DMatrix::identity(2, 2), 1e-9).unwrap();
        let err = numax_solve(&secants, &NuMaxConfig::new(2.0)).unwrap_err();
        assert!(matches!(err, EmbedError::EmptyEmbedding));
    }
}
