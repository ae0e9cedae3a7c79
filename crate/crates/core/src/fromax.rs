//! FroMax: ADMM on the Frobenius factorization
//!
//! ```text
//! minimize  ½‖P − XY‖_F²
//! s.t.      A(P) = q,  Y = Xᵀ,  ‖q − 1‖_∞ ≤ δ
//! ```
//!
//! Each sweep updates `q → P → X → Y → (λ, Γ)`. The returned embedding is the
//! final `Y`.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{EmbedError, Result};
use crate::linear::StructuredSystem;
use crate::secant::{linf_distortion, sorted_eigen, symmetrized, EmbeddingMatrix, SecantSet};
use crate::solver::{gaussian_init, DIVERGENCE_GUARD};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FroMaxConfig {
    pub delta: f64,
    pub rank: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Slack allowed on `δ` when declaring convergence.
    pub feas_tol: f64,
}

impl FroMaxConfig {
    pub fn new(delta: f64, rank: usize) -> Self {
        Self {
            delta,
            rank,
            beta1: 1.0,
            beta2: 1.0,
            eta: 1.618,
            epsilon: 1e-6,
            max_iters: 5000,
            seed: 0,
            feas_tol: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("delta", self.delta),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("eta", self.eta),
            ("epsilon", self.epsilon),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(EmbedError::invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.feas_tol >= 0.0) {
            return Err(EmbedError::invalid("feas_tol must be non-negative"));
        }
        if self.rank == 0 {
            return Err(EmbedError::invalid("rank must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(EmbedError::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!(
            "delta={}, rank={}, beta1={}, beta2={}, eta={}",
            self.delta, self.rank, self.beta1, self.beta2, self.eta
        )
    }
}

/// ADMM iterate bundle.
#[derive(Debug, Clone)]
pub struct FroMaxState {
    pub p: DMatrix<f64>,
    /// `N × r`
    pub x: DMatrix<f64>,
    /// `r × N`
    pub y: DMatrix<f64>,
    pub q: DVector<f64>,
    pub lambda: DVector<f64>,
    /// `r × N` multiplier for `Y = Xᵀ`.
    pub gamma: DMatrix<f64>,
    pub iter: usize,
    /// `½‖P − XY‖_F²`
    pub residual: f64,
}

impl FroMaxState {
    fn is_finite(&self) -> bool {
        self.p.iter().all(|v| v.is_finite())
            && self.x.iter().all(|v| v.is_finite())
            && self.y.iter().all(|v| v.is_finite())
            && self.q.iter().all(|v| v.is_finite())
            && self.lambda.iter().all(|v| v.is_finite())
            && self.gamma.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone)]
pub struct FroMaxOutcome {
    pub embedding: EmbeddingMatrix,
    pub state: FroMaxState,
    /// Residual below `ε` and `Y` feasible to within `feas_tol`.
    pub converged: bool,
    /// `max_i |‖Y v_i‖² − 1|` over the solver's secants.
    pub max_distortion: f64,
    /// Smallest eigenvalue of the final `P` (no PSD projection is applied).
    pub min_eigenvalue_p: f64,
}

/// Truncation of `1 + z` into the box `‖q − 1‖_∞ ≤ δ`.
pub(crate) fn clip_to_box(z: &DVector<f64>, delta: f64) -> DVector<f64> {
    z.map(|zi| 1.0 + zi.signum() * zi.abs().min(delta))
}

pub struct FroMax<'a> {
    secants: &'a SecantSet,
    config: FroMaxConfig,
    system: StructuredSystem<'a>,
}

impl<'a> FroMax<'a> {
    pub fn new(secants: &'a SecantSet, config: FroMaxConfig) -> Result<Self> {
        config.validate()?;
        if config.rank > secants.dim() {
            return Err(EmbedError::invalid(format!(
                "rank {} exceeds ambient dimension {}",
                config.rank,
                secants.dim()
            )));
        }
        let system = StructuredSystem::new(secants, config.beta1)?;
        Ok(Self {
            secants,
            config,
            system,
        })
    }

    pub fn config(&self) -> &FroMaxConfig {
        &self.config
    }

    /// `X₀` Gaussian scaled by `1/√N` (or `Ψ₀ᵀ` when warm-started), `Y₀ = X₀ᵀ`,
    /// `P₀ = X₀Y₀`, zero multipliers.
    pub fn initial_state(&self, warm: Option<&EmbeddingMatrix>) -> Result<FroMaxState> {
        let n = self.secants.dim();
        let r = self.config.rank;
        let y = match warm {
            Some(psi) => {
                if psi.rank() != r || psi.dim() != n {
                    return Err(EmbedError::invalid(format!(
                        "warm start is {}x{}, expected {r}x{n}",
                        psi.rank(),
                        psi.dim()
                    )));
                }
                psi.matrix().clone()
            }
            None => gaussian_init(r, n, self.config.seed),
        };
        let x = y.transpose();
        let p = symmetrized(&(&x * &y));
        let s = self.secants.len();
        Ok(FroMaxState {
            residual: 0.0,
            p,
            x,
            y,
            q: DVector::from_element(s, 1.0),
            lambda: DVector::zeros(s),
            gamma: DMatrix::zeros(r, n),
            iter: 0,
        })
    }

    /// `q = 1 + sign(z)·min(|z|, δ)` with `z = A(P) + λ/β₁ − 1`.
    pub fn update_q(&self, state: &FroMaxState) -> DVector<f64> {
        let mut z = self.secants.quad_forms(&state.p);
        z += &state.lambda / self.config.beta1;
        z.add_scalar_mut(-1.0);
        clip_to_box(&z, self.config.delta)
    }

    /// Solves `(I + β₁A*A)(P) = β₁A*(q) + sym(XY) − A*(λ)` using the current `q`.
    pub fn update_p(&self, state: &FroMaxState) -> DMatrix<f64> {
        let weights = &state.q * self.config.beta1 - &state.lambda;
        let rhs = self.secants.adjoint(&weights) + symmetrized(&(&state.x * &state.y));
        self.system.solve(&rhs)
    }

    /// The `P`-update right-hand side, exposed for residual checks.
    pub fn p_update_rhs(&self, state: &FroMaxState) -> DMatrix<f64> {
        let weights = &state.q * self.config.beta1 - &state.lambda;
        self.secants.adjoint(&weights) + symmetrized(&(&state.x * &state.y))
    }

    pub fn system(&self) -> &StructuredSystem<'a> {
        &self.system
    }

    /// `X = (Γᵀ + β₂Yᵀ + PYᵀ)(YYᵀ + β₂I)⁻¹`.
    pub fn update_x(&self, state: &FroMaxState) -> DMatrix<f64> {
        let b2 = self.config.beta2;
        let r = state.y.nrows();
        let gram = &state.y * state.y.transpose() + DMatrix::identity(r, r) * b2;
        // solve for Xᵀ: (YYᵀ + β₂I) Xᵀ = Γ + β₂Y + YP   (P symmetric)
        let rhs = &state.gamma + &state.y * b2 + &state.y * &state.p;
        spd_solve(gram, &rhs).transpose()
    }

    /// `Y = (XᵀX + β₂I)⁻¹(XᵀP − Γ + β₂Xᵀ)`.
    pub fn update_y(&self, state: &FroMaxState) -> DMatrix<f64> {
        let b2 = self.config.beta2;
        let r = state.x.ncols();
        let xt = state.x.transpose();
        let gram = &xt * &state.x + DMatrix::identity(r, r) * b2;
        let rhs = &xt * &state.p - &state.gamma + &xt * b2;
        spd_solve(gram, &rhs)
    }

    /// `λ + ηβ₁(A(P) − q)` and `Γ + ηβ₂(Y − Xᵀ)`.
    pub fn update_multipliers(&self, state: &FroMaxState) -> (DVector<f64>, DMatrix<f64>) {
        let c = &self.config;
        let lambda = &state.lambda + (self.secants.quad_forms(&state.p) - &state.q) * (c.eta * c.beta1);
        let gamma = &state.gamma + (&state.y - state.x.transpose()) * (c.eta * c.beta2);
        (lambda, gamma)
    }

    /// One full sweep in algorithm order.
    pub fn step(&self, state: &mut FroMaxState) -> Result<()> {
        state.q = self.update_q(state);
        state.p = self.update_p(state);
        state.x = self.update_x(state);
        state.y = self.update_y(state);
        let (lambda, gamma) = self.update_multipliers(state);
        state.lambda = lambda;
        state.gamma = gamma;
        state.iter += 1;
        state.residual = 0.5 * (&state.p - &state.x * &state.y).norm_squared();
        if !state.residual.is_finite() || state.residual > DIVERGENCE_GUARD || !state.is_finite() {
            return Err(EmbedError::Diverged {
                solver: "fromax",
                iteration: state.iter,
                params: self.config.describe(),
            });
        }
        Ok(())
    }

    pub fn solve(&self, warm: Option<&EmbeddingMatrix>) -> Result<FroMaxOutcome> {
        let mut state = self.initial_state(warm)?;
        let mut converged = false;
        let tol = self.config.delta + self.config.feas_tol;
        for _ in 0..self.config.max_iters {
            self.step(&mut state)?;
            if state.residual < self.config.epsilon && linf_distortion(&state.y, self.secants) <= tol {
                converged = true;
                break;
            }
        }
        let max_distortion = linf_distortion(&state.y, self.secants);
        let (eigs, _) = sorted_eigen(&state.p);
        let min_eigenvalue_p = eigs.last().copied().unwrap_or(0.0);
        Ok(FroMaxOutcome {
            embedding: EmbeddingMatrix::new(state.y.clone())?,
            state,
            converged,
            max_distortion,
            min_eigenvalue_p,
        })
    }
}

pub(crate) fn spd_solve(a: DMatrix<f64>, rhs: &DMatrix<f64>) -> DMatrix<f64> {
    match Cholesky::new(a.clone()) {
        Some(chol) => chol.solve(rhs),
        // β₂ > 0 keeps the system positive definite; LU covers round-off.
        None => a.lu().solve(rhs).unwrap_or_else(|| DMatrix::from_element(rhs.nrows(), rhs.ncols(), f64::NAN)),
    }
}

/// Runs FroMax from a seeded random start.
pub fn fromax_solve(secants: &SecantSet, config: &FroMaxConfig) -> Result<FroMaxOutcome> {
    FroMax::new(secants, config.clone())?.solve(None)
}
