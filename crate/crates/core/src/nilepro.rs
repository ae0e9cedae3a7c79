//! NILE-Pro: ADMM on the direct ℓ∞ distortion objective
//!
//! ```text
//! minimize ‖q − 1‖_∞   s.t.   q = A(ΨᵀΨ)
//! ```
//!
//! The `q` step is the prox of `(1/β)‖·‖_∞`, computed from an ℓ1-ball
//! projection via the Moreau decomposition. `Ψ` takes one gradient step per
//! sweep and `ω` is the scaled multiplier.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{EmbedError, Result};
use crate::prox::project_l1_ball;
use crate::secant::{projection_sq_norms, EmbeddingMatrix, SecantSet};
use crate::solver::{gaussian_init, DIVERGENCE_GUARD};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NileProConfig {
    pub delta: f64,
    pub rank: usize,
    pub beta: f64,
    /// Gradient step. `None` picks `step_scale / (L̂ ‖Ψ₀‖₂²)`.
    pub eta: Option<f64>,
    pub step_scale: f64,
    /// Stopping tolerance on `‖A(ΨᵀΨ) − 1‖_∞`. `None` means `δ`.
    pub epsilon: Option<f64>,
    pub max_iters: usize,
    pub seed: u64,
}

impl NileProConfig {
    pub fn new(delta: f64, rank: usize) -> Self {
        Self {
            delta,
            rank,
            beta: 0.1,
            eta: None,
            step_scale: 0.05,
            epsilon: None,
            max_iters: 20_000,
            seed: 0,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(self.delta)
    }

    pub fn validate(&self) -> Result<()> {
        let mut positive = vec![
            ("delta", self.delta),
            ("beta", self.beta),
            ("step_scale", self.step_scale),
            ("epsilon", self.epsilon()),
        ];
        if let Some(eta) = self.eta {
            positive.push(("eta", eta));
        }
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(EmbedError::invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if self.rank == 0 {
            return Err(EmbedError::invalid("rank must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(EmbedError::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }

    fn describe(&self, eta: f64) -> String {
        format!(
            "delta={}, rank={}, beta={}, eta={eta:.3e}",
            self.delta, self.rank, self.beta
        )
    }
}

#[derive(Debug, Clone)]
pub struct NileProState {
    /// `r × N`
    pub psi: DMatrix<f64>,
    pub q: DVector<f64>,
    pub omega: DVector<f64>,
    pub iter: usize,
    /// `‖A(ΨᵀΨ) − 1‖_∞` at the current `Ψ`.
    pub eps0: f64,
    /// Gradient step in use.
    pub eta: f64,
    /// Cached `A(ΨᵀΨ)` for the current `Ψ`.
    pub embedded: DVector<f64>,
    /// Cached `VΨᵀ` for the current `Ψ`.
    projection: DMatrix<f64>,
}

impl NileProState {
    fn set_psi(&mut self, psi: DMatrix<f64>, secants: &SecantSet) {
        self.projection = secants.project_secants(&psi);
        self.embedded = projection_sq_norms(&self.projection);
        self.psi = psi;
    }
}

#[derive(Debug, Clone)]
pub struct NileProOutcome {
    pub embedding: EmbeddingMatrix,
    pub state: NileProState,
    /// `ε₀ < ε` was reached.
    pub converged: bool,
    pub max_distortion: f64,
}

pub struct NilePro<'a> {
    secants: &'a SecantSet,
    config: NileProConfig,
    lipschitz: f64,
}

impl<'a> NilePro<'a> {
    pub fn new(secants: &'a SecantSet, config: NileProConfig) -> Result<Self> {
        config.validate()?;
        if config.rank > secants.dim() {
            return Err(EmbedError::invalid(format!(
                "rank {} exceeds ambient dimension {}",
                config.rank,
                secants.dim()
            )));
        }
        let lipschitz = if config.eta.is_some() {
            0.0
        } else {
            operator_norm_estimate(secants)
        };
        Ok(Self {
            secants,
            config,
            lipschitz,
        })
    }

    pub fn config(&self) -> &NileProConfig {
        &self.config
    }

    /// Power-iteration estimate of `‖A*A‖` used by the default step.
    pub fn lipschitz_estimate(&self) -> f64 {
        self.lipschitz
    }

    pub fn initial_state(&self, warm: Option<&EmbeddingMatrix>) -> Result<NileProState> {
        let n = self.secants.dim();
        let r = self.config.rank;
        let psi = match warm {
            Some(w) => {
                if w.rank() != r || w.dim() != n {
                    return Err(EmbedError::invalid(format!(
                        "warm start is {}x{}, expected {r}x{n}",
                        w.rank(),
                        w.dim()
                    )));
                }
                w.matrix().clone()
            }
            None => gaussian_init(r, n, self.config.seed),
        };
        let eta = match self.config.eta {
            Some(eta) => eta,
            None => {
                let spec = spectral_norm_sq(&psi);
                if !(spec > 0.0) || !(self.lipschitz > 0.0) {
                    return Err(EmbedError::invalid(
                        "cannot derive a step size from a zero initial embedding",
                    ));
                }
                self.config.step_scale / (self.lipschitz * spec)
            }
        };
        let s = self.secants.len();
        let mut state = NileProState {
            psi: DMatrix::zeros(0, 0),
            q: DVector::from_element(s, 1.0),
            omega: DVector::zeros(s),
            iter: 0,
            eps0: 0.0,
            eta,
            embedded: DVector::zeros(s),
            projection: DMatrix::zeros(0, 0),
        };
        state.set_psi(psi, self.secants);
        state.eps0 = linf_from_ones(&state.embedded);
        Ok(state)
    }

    /// `τ = A(ΨᵀΨ) − ω − 1`, `q = (1/β)(βτ − P_{‖·‖₁≤1}(βτ)) + 1`.
    pub fn update_q(&self, state: &NileProState) -> DVector<f64> {
        let beta = self.config.beta;
        let mut tau = &state.embedded - &state.omega;
        tau.add_scalar_mut(-1.0);
        let scaled = &tau * beta;
        let projected = project_l1_ball(&scaled, 1.0);
        let mut q = (scaled - projected) / beta;
        q.add_scalar_mut(1.0);
        q
    }

    /// `Ψ − 2ηΨA*(A(ΨᵀΨ) − q − ω)` using the current `q`.
    pub fn update_psi(&self, state: &NileProState) -> DMatrix<f64> {
        let residual = &state.embedded - &state.q - &state.omega;
        let grad = self.secants.adjoint_from_projection(&state.projection, &residual);
        &state.psi - grad * (2.0 * state.eta)
    }

    /// `ω − β(A(ΨᵀΨ) − q)` for the (already updated) cached `A(ΨᵀΨ)`.
    pub fn update_omega(&self, state: &NileProState) -> DVector<f64> {
        &state.omega - (&state.embedded - &state.q) * self.config.beta
    }

    pub fn step(&self, state: &mut NileProState) -> Result<()> {
        state.q = self.update_q(state);
        let psi = self.update_psi(state);
        state.set_psi(psi, self.secants);
        state.omega = self.update_omega(state);
        state.eps0 = linf_from_ones(&state.embedded);
        state.iter += 1;
        let blown = !state.eps0.is_finite()
            || state.eps0 > DIVERGENCE_GUARD
            || state.psi.iter().any(|v| !v.is_finite())
            || state.omega.iter().any(|v| !v.is_finite());
        if blown {
            return Err(EmbedError::Diverged {
                solver: "nilepro",
                iteration: state.iter,
                params: self.config.describe(state.eta),
            });
        }
        Ok(())
    }

    pub fn solve(&self, warm: Option<&EmbeddingMatrix>) -> Result<NileProOutcome> {
        let mut state = self.initial_state(warm)?;
        let eps = self.config.epsilon();
        let mut converged = state.eps0 < eps;
        while !converged && state.iter < self.config.max_iters {
            self.step(&mut state)?;
            converged = state.eps0 < eps;
        }
        Ok(NileProOutcome {
            embedding: EmbeddingMatrix::new(state.psi.clone())?,
            max_distortion: state.eps0,
            converged,
            state,
        })
    }
}

fn linf_from_ones(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max)
}

fn spectral_norm_sq(psi: &DMatrix<f64>) -> f64 {
    let g = psi * psi.transpose();
    SymmetricEigen::new(g).eigenvalues.max()
}

/// `λ_max(A A*)` by power iteration on `z ↦ A(A*(z))`, which shares its
/// nonzero spectrum with `A*A`. The start vector is the (nonnegative) ones
/// vector, aligned with the Perron vector of the nonnegative `A A*`.
pub fn operator_norm_estimate(secants: &SecantSet) -> f64 {
    let s = secants.len();
    let mut z = DVector::from_element(s, 1.0 / (s as f64).sqrt());
    let mut estimate = 0.0;
    for _ in 0..100 {
        let gz = secants.quad_forms(&secants.adjoint(&z));
        let norm = gz.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = z.dot(&gz);
        z = gz / norm;
        if (next - estimate).abs() <= 1e-9 * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

pub fn nilepro_solve(secants: &SecantSet, config: &NileProConfig) -> Result<NileProOutcome> {
    NilePro::new(secants, config.clone())?.solve(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn secants2() -> SecantSet {
        SecantSet::from_rows(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]), 1e-9).unwrap()
    }

    fn state(solver: &NilePro<'_>, psi: DMatrix<f64>) -> NileProState {
        let mut cfg_state = solver
            .initial_state(Some(&EmbeddingMatrix::new(psi).unwrap()))
            .unwrap();
        cfg_state.eta = 0.1;
        cfg_state
    }

    #[test]
    fn q_is_anchor_for_zero_tau() {
        let secants = secants2();
        let solver = NilePro::new(&secants, NileProConfig::new(0.1, 2)).unwrap();
        let st = state(&solver, DMatrix::identity(2, 2));
        assert_eq!(solver.update_q(&st), DVector::from_element(2, 1.0));
    }

    #[test]
    fn q_is_anchor_when_scaled_tau_in_ball() {
        let secants = secants2();
        let mut cfg = NileProConfig::new(0.1, 2);
        cfg.beta = 1.0;
        let solver = NilePro::new(&secants, cfg).unwrap();
        // embedded norms (1.3, 0.8): τ = (0.3, −0.2), ‖βτ‖₁ = 0.5 ≤ 1
        let psi = DMatrix::from_diagonal(&DVector::from_vec(vec![1.3f64.sqrt(), 0.8f64.sqrt()]));
        let st = state(&solver, psi);
        let q = solver.update_q(&st);
        assert!((q - DVector::from_element(2, 1.0)).amax() < 1e-15);
    }

    #[test]
    fn psi_fixed_point_and_zero_step() {
        let secants = secants2();
        let solver = NilePro::new(&secants, NileProConfig::new(0.1, 2)).unwrap();
        let psi = DMatrix::from_row_slice(2, 2, &[1.1, 0.2, -0.3, 0.9]);
        let mut st = state(&solver, psi.clone());
        st.q = st.embedded.clone();
        assert_eq!(solver.update_psi(&st), psi);
        let mut st = state(&solver, psi.clone());
        st.eta = 0.0;
        assert_eq!(solver.update_psi(&st), psi);
    }

    #[test]
    fn omega_formula() {
        let secants = secants2();
        let mut cfg = NileProConfig::new(0.1, 2);
        cfg.beta = 1.0;
        let solver = NilePro::new(&secants, cfg).unwrap();
        let mut st = state(&solver, DMatrix::identity(2, 2));
        st.embedded = DVector::from_vec(vec![1.1, 0.8]);
        st.q = DVector::from_vec(vec![1.0, 1.0]);
        let omega = solver.update_omega(&st);
        assert!((omega - DVector::from_vec(vec![-0.1, 0.2])).amax() < 1e-15);
        st.q = st.embedded.clone();
        assert_eq!(solver.update_omega(&st), st.omega);
    }

    #[test]
    fn feasible_start_returns_immediately() {
        let secants = secants2();
        let solver = NilePro::new(&secants, NileProConfig::new(0.1, 2)).unwrap();
        let out = solver.solve(Some(&EmbeddingMatrix::identity(2).unwrap())).unwrap();
        assert!(out.converged);
        assert_eq!(out.state.iter, 0);
    }

    #[test]
    fn two_point_instance() {
        let secants = SecantSet::from_rows(&DMatrix::from_row_slice(1, 2, &[0.6, 0.8]), 1e-9).unwrap();
        let out = nilepro_solve(&secants, &NileProConfig::new(0.1, 1)).unwrap();
        assert!(out.converged);
        assert!(out.max_distortion <= 0.1);
    }

    #[test]
    fn operator_norm_of_orthonormal_secants() {
        // G = I for orthonormal secants
        let est = operator_norm_estimate(&secants2());
        assert!((est - 1.0).abs() < 1e-9);
    }
}
