//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use isoembed::secant::SecantSet;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn random_secants(rng: &mut ChaCha8Rng, s: usize, n: usize) -> SecantSet {
    SecantSet::from_rows(&gaussian(rng, s, n), 1e-9).unwrap()
}

pub fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = gaussian(rng, n, n);
    (&a + a.transpose()) * 0.5
}

/// Dense `N² × N²` matrix of `I + w A*A` acting on column-major `vec(P)`.
pub fn dense_operator(secants: &SecantSet, w: f64) -> DMatrix<f64> {
    let n = secants.dim();
    let mut m = DMatrix::<f64>::identity(n * n, n * n);
    for i in 0..secants.len() {
        let v = secants.secant(i);
        let outer = &v * v.transpose();
        let col = DVector::from_column_slice(outer.as_slice());
        m += &col * col.transpose() * w;
    }
    m
}

pub fn dense_solve(secants: &SecantSet, w: f64, rhs: &DMatrix<f64>) -> DMatrix<f64> {
    let n = rhs.nrows();
    let x = dense_operator(secants, w)
        .lu()
        .solve(&DVector::from_column_slice(rhs.as_slice()))
        .unwrap();
    DMatrix::from_column_slice(n, n, x.as_slice())
}

pub fn central_difference<F: Fn(&DMatrix<f64>) -> f64>(f: F, at: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(at.nrows(), at.ncols());
    for idx in 0..at.len() {
        let mut plus = at.clone();
        let mut minus = at.clone();
        plus[idx] += h;
        minus[idx] -= h;
        g[idx] = (f(&plus) - f(&minus)) / (2.0 * h);
    }
    g
}

pub fn fromax_xy_objective(p: &DMatrix<f64>, x: &DMatrix<f64>, y: &DMatrix<f64>, gamma: &DMatrix<f64>, b2: f64) -> f64 {
    let gap = y - x.transpose();
    0.5 * (p - x * y).norm_squared() + gamma.dot(&gap) + 0.5 * b2 * gap.norm_squared()
}

/// Exhaustive search over the faces of the ℓ1 ball: for every sign pattern
/// and support, project onto the face's hyperplane and keep the closest
/// feasible candidate.
pub fn brute_force_l1(x: &[f64], radius: f64) -> Vec<f64> {
    if x.iter().map(|v| v.abs()).sum::<f64>() <= radius {
        return x.to_vec();
    }
    let n = x.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for support in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| support & (1 << i) != 0).collect();
        for signs in 0u32..(1 << idx.len()) {
            let s: Vec<f64> = (0..idx.len())
                .map(|k| if signs & (1 << k) != 0 { -1.0 } else { 1.0 })
                .collect();
            let dot: f64 = idx.iter().zip(&s).map(|(&i, si)| x[i] * si).sum();
            let shift = (dot - radius) / idx.len() as f64;
            let mut y = vec![0.0; n];
            let mut ok = true;
            for (&i, si) in idx.iter().zip(&s) {
                y[i] = x[i] - shift * si;
                if y[i] * si < 0.0 {
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            let d: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, y));
            }
        }
    }
    best.unwrap().1
}

/// `prox_{c‖·‖∞}(x)` by bisection on the clipping level `t`, which solves
/// `Σ max(|x_i| − t, 0) = c` when `‖x‖₁ > c`.
pub fn bisection_prox_linf(x: &DVector<f64>, c: f64) -> DVector<f64> {
    if x.iter().map(|v| v.abs()).sum::<f64>() <= c {
        return DVector::zeros(x.len());
    }
    let (mut lo, mut hi) = (0.0, x.amax());
    for _ in 0..200 {
        let t = 0.5 * (lo + hi);
        let excess: f64 = x.iter().map(|v| (v.abs() - t).max(0.0)).sum();
        if excess > c {
            lo = t;
        } else {
            hi = t;
        }
    }
    let t = 0.5 * (lo + hi);
    x.map(|v| v.clamp(-t, t))
}
