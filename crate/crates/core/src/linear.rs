//! Exact solves of `(I + w A*A)(P) = R` over symmetric `N × N` matrices.
//!
//! Two equivalent routes are available and the cheaper one is picked at
//! construction time:
//!
//! * secant space: write `P = R − w A*(c)` where `(I + w G) c = A(R)` and
//!   `G_ij = (v_iᵀ v_j)²`. One `S × S` Cholesky factorization.
//! * matrix space: in the orthonormal `svec` basis of symmetric matrices the
//!   operator is `I + w Σ s_i s_iᵀ` with `s_i = svec(v_i v_iᵀ)`. One
//!   `N(N+1)/2`-dimensional Cholesky factorization, used when `S` exceeds that
//!   dimension.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{EmbedError, Result};
use crate::secant::{symmetrize_in_place, SecantSet};

const MAX_MATRIX_ROUTE_DIM: usize = 4096;

enum Route {
    Identity,
    Secant(Cholesky<f64, Dyn>),
    Matrix(Cholesky<f64, Dyn>),
}

/// Factorized `I + w A*A` for a fixed secant set and weight `w >= 0`.
pub struct StructuredSystem<'a> {
    secants: &'a SecantSet,
    weight: f64,
    route: Route,
}

impl<'a> StructuredSystem<'a> {
    pub fn new(secants: &'a SecantSet, weight: f64) -> Result<Self> {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(EmbedError::invalid(format!(
                "system weight must be finite and non-negative, got {weight}"
            )));
        }
        if weight == 0.0 {
            return Ok(Self {
                secants,
                weight,
                route: Route::Identity,
            });
        }
        let n = secants.dim();
        let svec_dim = n * (n + 1) / 2;
        let route = if secants.len() > svec_dim && svec_dim <= MAX_MATRIX_ROUTE_DIM {
            Route::Matrix(factor_matrix_route(secants, weight)?)
        } else {
            Route::Secant(factor_secant_route(secants, weight)?)
        };
        Ok(Self {
            secants,
            weight,
            route,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// True when the `S × S` reduction is in use.
    pub fn uses_secant_route(&self) -> bool {
        matches!(self.route, Route::Secant(_))
    }

    /// `(I + w A*A)(P)`.
    pub fn apply(&self, p: &DMatrix<f64>) -> DMatrix<f64> {
        if self.weight == 0.0 {
            return p.clone();
        }
        let ap = self.secants.quad_forms(p);
        p + self.secants.adjoint(&ap) * self.weight
    }

    /// Solves `(I + w A*A)(P) = rhs` for symmetric `rhs`.
    pub fn solve(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.route {
            Route::Identity => rhs.clone(),
            Route::Secant(chol) => {
                let ar = self.secants.quad_forms(rhs);
                let c = chol.solve(&ar);
                let mut p = rhs - self.secants.adjoint(&c) * self.weight;
                symmetrize_in_place(&mut p);
                p
            }
            Route::Matrix(chol) => {
                let x = chol.solve(&svec(rhs));
                smat(&x, rhs.nrows())
            }
        }
    }
}

fn factor_secant_route(secants: &SecantSet, weight: f64) -> Result<Cholesky<f64, Dyn>> {
    let mut k = secants.squared_gram() * weight;
    for i in 0..k.nrows() {
        k[(i, i)] += 1.0;
    }
    let bound = 1.0 + k.diagonal().sum();
    Cholesky::new(k).ok_or_else(|| {
        EmbedError::LinearSolve(format!(
            "secant-space system is not positive definite (condition estimate <= {bound:.3e})"
        ))
    })
}

fn factor_matrix_route(secants: &SecantSet, weight: f64) -> Result<Cholesky<f64, Dyn>> {
    let n = secants.dim();
    let m = n * (n + 1) / 2;
    let mut gram = DMatrix::<f64>::identity(m, m);
    const CHUNK: usize = 512;
    let s = secants.len();
    let mut start = 0;
    while start < s {
        let end = (start + CHUNK).min(s);
        let mut block = DMatrix::<f64>::zeros(end - start, m);
        for (row, i) in (start..end).enumerate() {
            let v = secants.vectors().row(i);
            let mut idx = 0;
            for a in 0..n {
                block[(row, idx)] = v[a] * v[a];
                idx += 1;
                for b in (a + 1)..n {
                    block[(row, idx)] = std::f64::consts::SQRT_2 * v[a] * v[b];
                    idx += 1;
                }
            }
        }
        gram.gemm_tr(weight, &block, &block, 1.0);
        start = end;
    }
    let bound = gram.diagonal().sum();
    Cholesky::new(gram).ok_or_else(|| {
        EmbedError::LinearSolve(format!(
            "matrix-space system is not positive definite (condition estimate <= {bound:.3e})"
        ))
    })
}

/// Orthonormal vectorization of a symmetric matrix (off-diagonals scaled by √2).
fn svec(p: &DMatrix<f64>) -> DVector<f64> {
    let n = p.nrows();
    let mut out = DVector::zeros(n * (n + 1) / 2);
    let mut idx = 0;
    for a in 0..n {
        out[idx] = p[(a, a)];
        idx += 1;
        for b in (a + 1)..n {
            out[idx] = std::f64::consts::SQRT_2 * 0.5 * (p[(a, b)] + p[(b, a)]);
            idx += 1;
        }
    }
    out
}

fn smat(x: &DVector<f64>, n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(n, n);
    let mut idx = 0;
    for a in 0..n {
        p[(a, a)] = x[idx];
        idx += 1;
        for b in (a + 1)..n {
            let v = x[idx] / std::f64::consts::SQRT_2;
            p[(a, b)] = v;
            p[(b, a)] = v;
            idx += 1;
        }
    }
    p
}
