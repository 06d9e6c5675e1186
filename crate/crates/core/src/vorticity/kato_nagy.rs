//! Kato–Nagy unitary intertwining two nearby rank-one projectors.

use num_complex::Complex;

use super::VorticityError;
use crate::hermitian2::{op_norm_diff, Matrix2, RankOneProjector};
use crate::scalar::Real;

/// Distances at or above `1 − DISTANCE_MARGIN` are rejected.
pub const DISTANCE_MARGIN: f64 = 1e-9;

fn check_distance<T: Real>(
    p: &RankOneProjector<T>,
    q: &RankOneProjector<T>,
) -> Result<T, VorticityError> {
    let d = op_norm_diff(p, q);
    if !(d < T::one() - T::lit(DISTANCE_MARGIN)) {
        return Err(VorticityError::DeformationTooFar {
            distance: d.to_f64_lossy(),
        });
    }
    Ok(d)
}

fn intertwiner<T: Real>(p: &RankOneProjector<T>, q: &RankOneProjector<T>) -> Matrix2<T> {
    let pm = p.matrix().to_matrix();
    let qm = q.matrix().to_matrix();
    let id = Matrix2::identity();
    qm.mul(&pm).add(&id.sub(&qm).mul(&id.sub(&pm)))
}

/// `W = (1 − (P−Q)²)^{−1/2} (QP + (1−Q)(1−P))`.
///
/// For rank-one projectors on `C²`, `(P−Q)² = ‖P−Q‖²·1`, so the inverse
/// square root is a scalar.
pub fn kato_nagy_unitary<T: Real>(
    p: &RankOneProjector<T>,
    q: &RankOneProjector<T>,
) -> Result<Matrix2<T>, VorticityError> {
    let d = check_distance(p, q)?;
    let scale = (T::one() - d * d).sqrt().recip();
    Ok(intertwiner(p, q).scale(Complex::new(scale, T::zero())))
}

/// The same unitary with `(1 − X)^{−1/2}` summed as the binomial series
/// `Σ C(2k,k)/4^k X^k`, `X = (P−Q)²`, truncated once terms drop below `tol`.
pub fn kato_nagy_unitary_series<T: Real>(
    p: &RankOneProjector<T>,
    q: &RankOneProjector<T>,
    tol: T,
    max_terms: usize,
) -> Result<Matrix2<T>, VorticityError> {
    check_distance(p, q)?;
    let r = p.matrix().to_matrix().sub(&q.matrix().to_matrix());
    let x = r.mul(&r);
    let mut term = Matrix2::identity();
    let mut sum = Matrix2::identity();
    for k in 1..max_terms {
        let kk = T::int(k as i64);
        // C(2k,k)/4^k = C(2k−2,k−1)/4^{k−1} · (2k−1)/(2k)
        let ratio = (T::lit(2.0) * kk - T::one()) / (T::lit(2.0) * kk);
        term = term.mul(&x).scale(Complex::new(ratio, T::zero()));
        sum = sum.add(&term);
        if term.max_abs() < tol {
            break;
        }
    }
    Ok(sum.mul(&intertwiner(p, q)))
}

/// `‖W P W⁻¹ − Q‖_max` with `W⁻¹` computed by explicit inversion.
pub fn intertwining_residual<T: Real>(
    w: &Matrix2<T>,
    p: &RankOneProjector<T>,
    q: &RankOneProjector<T>,
) -> T {
    let inv = match w.inverse() {
        Some(inv) => inv,
        None => return T::infinity(),
    };
    w.mul(&p.matrix().to_matrix())
        .mul(&inv)
        .sub(&q.matrix().to_matrix())
        .max_abs()
}
