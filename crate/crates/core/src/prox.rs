//! Euclidean projection onto the ℓ1 ball and the proximal map of a scaled
//! ℓ∞ norm, obtained from it through the Moreau decomposition.

use nalgebra::DVector;

/// Exact Euclidean projection of `x` onto `{y : ‖y‖₁ ≤ radius}`.
///
/// Sort-based soft thresholding: the projection of `|x|` onto the simplex of
/// size `radius` gives the magnitudes, and the signs of `x` are restored.
/// `O(S log S)`.
pub fn project_l1_ball(x: &DVector<f64>, radius: f64) -> DVector<f64> {
    assert!(radius > 0.0, "l1 ball radius must be positive");
    if x.iter().map(|v| v.abs()).sum::<f64>() <= radius {
        return x.clone();
    }
    let theta = l1_threshold(x, radius);
    x.map(|v| v.signum() * (v.abs() - theta).max(0.0))
}

/// Soft threshold `θ` with `Σ max(|x_i| − θ, 0) = radius`, for `‖x‖₁ > radius`.
fn l1_threshold(x: &DVector<f64>, radius: f64) -> f64 {
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in mags.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - radius) / (j + 1) as f64;
        if u > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    theta.max(0.0)
}

/// `prox_{s‖·‖∞}(x) = x − s · P_{‖·‖₁≤1}(x / s)`.
pub fn prox_linf(x: &DVector<f64>, scale: f64) -> DVector<f64> {
    assert!(scale > 0.0, "prox scale must be positive");
    let dual = project_l1_ball(&(x / scale), 1.0) * scale;
    x - dual
}

/// `prox_{f*}(x)` for `f = s‖·‖∞`: projection onto the ℓ1 ball of radius `s`.
pub fn prox_linf_conjugate(x: &DVector<f64>, scale: f64) -> DVector<f64> {
    project_l1_ball(&(x / scale), 1.0) * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn feasible_point_is_unchanged() {
        let x = v(&[0.2, -0.3, 0.1]);
        assert_eq!(project_l1_ball(&x, 1.0), x);
    }

    #[test]
    fn two_coordinate_example() {
        let y = project_l1_ball(&v(&[0.8, 0.6]), 1.0);
        assert!((y - v(&[0.6, 0.4])).amax() < 1e-15);
    }

    #[test]
    fn single_coordinate_shrink() {
        let y = project_l1_ball(&v(&[5.0, 0.0, 0.0]), 1.0);
        assert_eq!(y, v(&[1.0, 0.0, 0.0]));
    }

    #[test]
    fn signs_are_restored() {
        let y = project_l1_ball(&v(&[-0.8, 0.6]), 1.0);
        assert!((y - v(&[-0.6, 0.4])).amax() < 1e-15);
    }

    #[test]
    fn prox_of_small_vector_is_zero() {
        // ‖x/s‖₁ ≤ 1 means the whole vector is absorbed by the dual part
        let x = v(&[0.01, -0.02]);
        assert!(prox_linf(&x, 1.0).amax() < 1e-18);
    }

    #[test]
    fn prox_clips_large_entries() {
        // prox_{‖·‖∞}((3, 1)): clip at c with (3 − c) = 1 → c = 2
        let p = prox_linf(&v(&[3.0, 1.0]), 1.0);
        assert!((p - v(&[2.0, 1.0])).amax() < 1e-14);
    }
}
