use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Damped (Tikhonov) pseudo-inverse `M^T (M M^T + lambda I)^-1`.
///
/// The Gram matrix is symmetric positive definite for `lambda > 0`, so it is
/// factored with Cholesky; for a well-conditioned square `M` the result tends
/// to `M^-1` as `lambda -> 0`.
pub fn damped_pinv(m: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter {
            name: "pinv_damping",
            reason: format!("must be > 0, got {lambda}"),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("pseudo-inverse input"));
    }
    let mut gram = m * m.transpose();
    for i in 0..gram.nrows() {
        gram[(i, i)] += lambda;
    }
    let chol = gram.cholesky().ok_or(Error::NonFinite("pseudo-inverse Gram matrix"))?;
    // (M M^T + lambda I)^-1 M, transposed
    Ok(chol.solve(m).transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// SVD route: V diag(s / (s^2 + lambda)) U^T.
    fn svd_pinv(m: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
        let svd = m.clone().svd(true, true);
        let u = svd.u.unwrap();
        let vt = svd.v_t.unwrap();
        let d = DMatrix::from_diagonal(&svd.singular_values.map(|s| s / (s * s + lambda)));
        vt.transpose() * d * u.transpose()
    }

    #[test]
    fn identity_and_scaled_identity() {
        let i6 = DMatrix::<f64>::identity(6, 6);
        assert!((damped_pinv(&i6, 1e-12).unwrap() - &i6).amax() < 1e-10);
        let two = &i6 * 2.0;
        assert!((damped_pinv(&two, 1e-12).unwrap() - &i6 * 0.5).amax() < 1e-9);
    }

    #[test]
    fn rank_deficient_stays_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut m = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
        m.row_mut(2).fill(0.0);
        let p = damped_pinv(&m, 1e-12).unwrap();
        assert!(p.iter().all(|x| x.is_finite()));
        assert!((&m * &p * &m - &m).norm() <= 1e-6);
        let oracle = svd_pinv(&m, 1e-12);
        assert!((&m * &oracle * &m - &m).norm() <= 1e-6);
        assert!((p - oracle).amax() < 1e-6);
    }

    #[test]
    fn agrees_with_svd_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [1usize, 3, 6, 8] {
            let m = DMatrix::from_fn(p, 6, |_, _| rng.gen_range(-5.0..5.0));
            let a = damped_pinv(&m, 1e-6).unwrap();
            let b = svd_pinv(&m, 1e-6);
            assert!((&a - &b).amax() < 1e-8 * (1.0 + b.amax()), "p={p}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let m = DMatrix::<f64>::identity(2, 6);
        assert!(damped_pinv(&m, 0.0).is_err());
        let mut bad = m.clone();
        bad[(0, 0)] = f64::NAN;
        assert!(matches!(damped_pinv(&bad, 1e-6), Err(Error::NonFinite(_))));
    }
}
