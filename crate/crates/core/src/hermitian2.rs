//! Closed-form linear algebra on `C^2`: Hermitian matrices, unit vectors,
//! rank-one projectors and general 2x2 complex matrices.

use std::ops::{Add, Sub};

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

/// Spectral gap below which a Hermitian matrix is reported as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;
/// Largest admissible deviation of `‖v‖` from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("vector norm {norm} deviates from 1 by more than the tolerance")]
    NotNormalized { norm: f64 },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("matrix is not a rank-one orthogonal projector (residual {residual:e})")]
    NotAProjector { residual: f64 },
}

/// [`NORMALIZATION_TOLERANCE`], widened for low-precision scalars.
fn normalization_tolerance<T: Real>() -> T {
    T::lit(NORMALIZATION_TOLERANCE).max(T::lit(64.0) * T::epsilon())
}

/// 2x2 complex Hermitian matrix `[[a11, a12], [conj(a12), a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HermitianMatrix2<T> {
    pub a11: T,
    pub a22: T,
    pub a12: Complex<T>,
}

impl<T: Real> HermitianMatrix2<T> {
    pub fn new(a11: T, a22: T, a12: Complex<T>) -> Self {
        Self { a11, a22, a12 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), Complex::new(T::zero(), T::zero()))
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::one(), Complex::new(T::zero(), T::zero()))
    }

    /// `d0·1 + dx·σx + dy·σy + dz·σz`.
    pub fn from_pauli(d0: T, dx: T, dy: T, dz: T) -> Self {
        Self::new(d0 + dz, d0 - dz, Complex::new(dx, -dy))
    }

    /// Components `(d0, dx, dy, dz)` in the Pauli basis.
    pub fn pauli(&self) -> [T; 4] {
        let half = T::lit(0.5);
        [
            half * (self.a11 + self.a22),
            self.a12.re,
            -self.a12.im,
            half * (self.a11 - self.a22),
        ]
    }

    pub fn a21(&self) -> Complex<T> {
        self.a12.conj()
    }

    /// Entry `(i, j)` with zero-based indices.
    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        match (i, j) {
            (0, 0) => Complex::new(self.a11, T::zero()),
            (1, 1) => Complex::new(self.a22, T::zero()),
            (0, 1) => self.a12,
            (1, 0) => self.a12.conj(),
            _ => panic!("index ({i}, {j}) out of range for a 2x2 matrix"),
        }
    }

    pub fn trace(&self) -> T {
        self.a11 + self.a22
    }

    pub fn det(&self) -> T {
        self.a11 * self.a22 - self.a12.norm_sqr()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.a11 * s, self.a22 * s, self.a12 * s)
    }

    pub fn apply(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [
            v[0] * self.a11 + self.a12 * v[1],
            self.a12.conj() * v[0] + v[1] * self.a22,
        ]
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.a11.abs().max(self.a22.abs()).max(self.a12.norm())
    }

    /// Spectral norm; for a Hermitian matrix this is the largest `|eigenvalue|`.
    pub fn spectral_norm(&self) -> T {
        let [d0, dx, dy, dz] = self.pauli();
        d0.abs() + (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn to_matrix(&self) -> Matrix2<T> {
        Matrix2([
            [self.entry(0, 0), self.entry(0, 1)],
            [self.entry(1, 0), self.entry(1, 1)],
        ])
    }
}

impl<T: Real> Add for HermitianMatrix2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a11 + rhs.a11, self.a22 + rhs.a22, self.a12 + rhs.a12)
    }
}

impl<T: Real> Sub for HermitianMatrix2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a11 - rhs.a11, self.a22 - rhs.a22, self.a12 - rhs.a12)
    }
}

/// Unit vector `(c1, c2)` in `C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector2<T> {
    pub c1: Complex<T>,
    pub c2: Complex<T>,
}

impl<T: Real> UnitVector2<T> {
    /// Accepts an already normalized pair.
    pub fn new(c1: Complex<T>, c2: Complex<T>) -> Result<Self, LinalgError> {
        let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if (norm - T::one()).abs() > normalization_tolerance::<T>() {
            return Err(LinalgError::NotNormalized {
                norm: norm.to_f64_lossy(),
            });
        }
        Ok(Self { c1, c2 })
    }

    /// Normalizes an arbitrary non-zero pair.
    pub fn normalize(c1: Complex<T>, c2: Complex<T>) -> Result<Self, LinalgError> {
        let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(LinalgError::ZeroVector);
        }
        let inv = norm.recip();
        Ok(Self {
            c1: c1 * inv,
            c2: c2 * inv,
        })
    }

    pub fn e1() -> Self {
        Self {
            c1: Complex::new(T::one(), T::zero()),
            c2: Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn e2() -> Self {
        Self {
            c1: Complex::new(T::zero(), T::zero()),
            c2: Complex::new(T::one(), T::zero()),
        }
    }

    pub fn components(&self) -> [Complex<T>; 2] {
        [self.c1, self.c2]
    }

    pub fn norm(&self) -> T {
        (self.c1.norm_sqr() + self.c2.norm_sqr()).sqrt()
    }

    /// `⟨self|other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.c1.conj() * other.c1 + self.c2.conj() * other.c2
    }

    pub fn with_phase(&self, phase: Complex<T>) -> Self {
        Self {
            c1: self.c1 * phase,
            c2: self.c2 * phase,
        }
    }

    /// Orthogonal unit vector `(-conj(c2), conj(c1))`.
    pub fn orthogonal(&self) -> Self {
        Self {
            c1: -self.c2.conj(),
            c2: self.c1.conj(),
        }
    }

    /// Rotates the global phase so that the larger-modulus component is
    /// real and positive (the first one on ties).
    pub fn phase_fixed(&self) -> Self {
        let pivot = if self.c2.norm_sqr() > self.c1.norm_sqr() {
            self.c2
        } else {
            self.c1
        };
        let m = pivot.norm();
        if m == T::zero() {
            return *self;
        }
        self.with_phase(pivot.conj() / m)
    }
}

/// Rank-one orthogonal projector on `C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOneProjector<T> {
    matrix: HermitianMatrix2<T>,
}

impl<T: Real> RankOneProjector<T> {
    /// Checks `P² = P` and `tr P = 1` within `tol`.
    pub fn from_matrix(matrix: HermitianMatrix2<T>, tol: T) -> Result<Self, LinalgError> {
        let residual = projector_residual(&matrix);
        if !(residual <= tol) {
            return Err(LinalgError::NotAProjector {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is a projector by construction.
    pub(crate) fn from_matrix_unchecked(matrix: HermitianMatrix2<T>) -> Self {
        Self { matrix }
    }

    /// Projector onto the line with Bloch vector `n` (normalized internally).
    pub fn from_bloch_vector(n: [T; 3]) -> Self {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let half = T::lit(0.5);
        let [x, y, z] = n.map(|c| c / len);
        Self {
            matrix: HermitianMatrix2::from_pauli(half, half * x, half * y, half * z),
        }
    }

    pub fn matrix(&self) -> &HermitianMatrix2<T> {
        &self.matrix
    }

    /// Unit Bloch vector `n` with `P = (1 + n·σ)/2`.
    pub fn bloch_vector(&self) -> [T; 3] {
        let [_, dx, dy, dz] = self.matrix.pauli();
        let two = T::lit(2.0);
        let v = [two * dx, two * dy, two * dz];
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        v.map(|c| c / len)
    }

    /// A unit vector spanning the range (arbitrary but deterministic gauge).
    pub fn range_vector(&self) -> UnitVector2<T> {
        let m = &self.matrix;
        // Column with the larger diagonal entry has norm² equal to that entry.
        let (c1, c2) = if m.a11 >= m.a22 {
            (Complex::new(m.a11, T::zero()), m.a12.conj())
        } else {
            (m.a12, Complex::new(m.a22, T::zero()))
        };
        UnitVector2::normalize(c1, c2).expect("projector column is non-zero")
    }

    /// `1 - P`.
    pub fn complement(&self) -> Self {
        Self {
            matrix: HermitianMatrix2::identity() - self.matrix,
        }
    }

    /// `U P U†`.
    pub fn conjugated(&self, u: &Matrix2<T>) -> Self {
        let m = u.mul(&self.matrix.to_matrix()).mul(&u.adjoint());
        Self {
            matrix: m.hermitian_part(),
        }
    }
}

fn projector_residual<T: Real>(m: &HermitianMatrix2<T>) -> T {
    let mm = m.to_matrix();
    let sq = mm.mul(&mm);
    let idem = sq.sub(&mm).max_abs();
    idem.max((m.trace() - T::one()).abs())
}

/// Outer product `|v⟩⟨v|`.
pub fn projector_of<T: Real>(v: &UnitVector2<T>) -> Result<RankOneProjector<T>, LinalgError> {
    let norm = v.norm();
    if (norm - T::one()).abs() > normalization_tolerance::<T>() {
        return Err(LinalgError::NotNormalized {
            norm: norm.to_f64_lossy(),
        });
    }
    Ok(RankOneProjector::from_matrix_unchecked(
        HermitianMatrix2::new(v.c1.norm_sqr(), v.c2.norm_sqr(), v.c1 * v.c2.conj()),
    ))
}

/// Spectral norm `‖P − Q‖`.
pub fn op_norm_diff<T: Real>(p: &RankOneProjector<T>, q: &RankOneProjector<T>) -> T {
    (*p.matrix() - *q.matrix()).spectral_norm()
}

/// Eigen-decomposition of a 2x2 Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2<T> {
    pub e_minus: T,
    pub e_plus: T,
    pub v_minus: UnitVector2<T>,
    pub v_plus: UnitVector2<T>,
    /// Set when `e_plus − e_minus` is below [`DEGENERACY_THRESHOLD`]; the
    /// eigenvectors are then the standard basis.
    pub degenerate: bool,
}

impl<T: Real> Eigen2<T> {
    pub fn gap(&self) -> T {
        self.e_plus - self.e_minus
    }

    pub fn projector_plus(&self) -> RankOneProjector<T> {
        projector_of(&self.v_plus).expect("eigenvector normalized")
    }

    pub fn projector_minus(&self) -> RankOneProjector<T> {
        projector_of(&self.v_minus).expect("eigenvector normalized")
    }
}

/// Closed-form eigenpairs, ascending, with the larger-modulus component of
/// each eigenvector made real and positive.
pub fn eig2<T: Real>(h: &HermitianMatrix2<T>) -> Eigen2<T> {
    let [d0, _, _, dz] = h.pauli();
    let off = h.a12;
    let radius = (dz * dz + off.norm_sqr()).sqrt();
    let e_minus = d0 - radius;
    let e_plus = d0 + radius;
    if T::lit(2.0) * radius < T::lit(DEGENERACY_THRESHOLD) {
        return Eigen2 {
            e_minus,
            e_plus,
            v_minus: UnitVector2::e2(),
            v_plus: UnitVector2::e1(),
            degenerate: true,
        };
    }
    let re = |x: T| Complex::new(x, T::zero());
    // Pick the row of (H − e) whose null vector has the larger norm.
    let (vp, vm) = if dz >= T::zero() {
        ((re(dz + radius), off.conj()), (-off, re(dz + radius)))
    } else {
        ((off, re(radius - dz)), (re(radius - dz), -off.conj()))
    };
    let v_plus = UnitVector2::normalize(vp.0, vp.1)
        .expect("non-degenerate")
        .phase_fixed();
    let v_minus = UnitVector2::normalize(vm.0, vm.1)
        .expect("non-degenerate")
        .phase_fixed();
    Eigen2 {
        e_minus,
        e_plus,
        v_minus,
        v_plus,
        degenerate: false,
    }
}

/// General 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2<T>(pub [[Complex<T>; 2]; 2]);

impl<T: Real> Matrix2<T> {
    pub fn identity() -> Self {
        let o = Complex::new(T::one(), T::zero());
        let z = Complex::new(T::zero(), T::zero());
        Self([[o, z], [z, o]])
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self([[z, z], [z, z]])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let a = &self.0;
        Self([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    pub fn det(&self) -> Complex<T> {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == T::zero() {
            return None;
        }
        let a = &self.0;
        let inv = d.inv();
        Some(Self([
            [a[1][1] * inv, -a[0][1] * inv],
            [-a[1][0] * inv, a[0][0] * inv],
        ]))
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |m, x| m.max(x.norm()))
    }

    pub fn apply(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> HermitianMatrix2<T> {
        let half = T::lit(0.5);
        let a = &self.0;
        HermitianMatrix2::new(a[0][0].re, a[1][1].re, (a[0][1] + a[1][0].conj()) * half)
    }

    /// `‖U†U − 1‖_max`.
    pub fn unitarity_defect(&self) -> T {
        self.adjoint().mul(self).sub(&Self::identity()).max_abs()
    }

    /// `exp(i·angle·(axis·σ))` for a unit `axis`.
    pub fn su2_rotation(angle: T, axis: [T; 3]) -> Self {
        let (s, c) = angle.sin_cos();
        let i = Complex::new(T::zero(), T::one());
        let re = |x: T| Complex::new(x, T::zero());
        let [x, y, z] = axis;
        Self([
            [re(c) + i * re(s * z), i * re(s * x) + re(s * y)],
            [i * re(s * x) - re(s * y), re(c) - i * re(s * z)],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonal_eigenpairs() {
        let h = HermitianMatrix2::new(1.0, -1.0, c(0.0, 0.0));
        let e = eig2(&h);
        assert_eq!((e.e_minus, e.e_plus), (-1.0, 1.0));
        assert_eq!(e.v_plus, UnitVector2::e1());
        assert_eq!(e.v_minus, UnitVector2::e2());
        assert!(!e.degenerate);
    }

    #[test]
    fn degenerate_is_flagged() {
        let e = eig2(&HermitianMatrix2::new(0.3, 0.3, c(0.0, 0.0)));
        assert!(e.degenerate);
        assert_abs_diff_eq!(e.v_plus.inner(&e.v_minus).norm(), 0.0);
    }

    #[test]
    fn eigen_residual_and_orthogonality() {
        let h = HermitianMatrix2::new(0.2, -1.3, c(0.7, -0.4));
        let e = eig2(&h);
        for (val, v) in [(e.e_minus, e.v_minus), (e.e_plus, e.v_plus)] {
            let hv = h.apply(v.components());
            assert!((hv[0] - v.c1 * val).norm() < 1e-14);
            assert!((hv[1] - v.c2 * val).norm() < 1e-14);
        }
        assert!(e.v_plus.inner(&e.v_minus).norm() < 1e-15);
        // Larger component real positive.
        for v in [e.v_minus, e.v_plus] {
            let big = if v.c2.norm() > v.c1.norm() {
                v.c2
            } else {
                v.c1
            };
            assert!(big.im.abs() < 1e-15 && big.re > 0.0);
        }
    }

    #[test]
    fn projector_of_basis_and_superposition() {
        let p = projector_of(&UnitVector2::<f64>::e1()).unwrap();
        assert_eq!(*p.matrix(), HermitianMatrix2::new(1.0, 0.0, c(0.0, 0.0)));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = projector_of(&UnitVector2::new(c(s, 0.0), c(s, 0.0)).unwrap()).unwrap();
        assert_abs_diff_eq!(p.matrix().a11, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.matrix().a22, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.matrix().a12.re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn projector_of_rejects_unnormalized() {
        let v = UnitVector2 {
            c1: c(1.0, 0.0),
            c2: c(1e-3, 0.0),
        };
        assert!(matches!(
            projector_of(&v),
            Err(LinalgError::NotNormalized { .. })
        ));
    }

    #[test]
    fn conical_projector_entries() {
        // v = e^{iθ/2}(cos θ/2, sin θ/2) at θ = π/2 against ½[[cosθ+1, sinθ],[sinθ, 1−cosθ]].
        let t = std::f64::consts::FRAC_PI_2;
        let phase = Complex::from_polar(1.0, t / 2.0);
        let v = UnitVector2::new(phase * (t / 2.0).cos(), phase * (t / 2.0).sin()).unwrap();
        let p = projector_of(&v).unwrap();
        assert_abs_diff_eq!(p.matrix().a11, 0.5 * (t.cos() + 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(p.matrix().a22, 0.5 * (1.0 - t.cos()), epsilon = 1e-15);
        assert_abs_diff_eq!(p.matrix().a12.re, 0.5 * t.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.matrix().a12.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn norm_diff_simple_cases() {
        let p = projector_of(&UnitVector2::<f64>::e1()).unwrap();
        let q = projector_of(&UnitVector2::<f64>::e2()).unwrap();
        assert_eq!(op_norm_diff(&p, &p), 0.0);
        assert_abs_diff_eq!(op_norm_diff(&p, &q), 1.0);
    }

    #[test]
    fn bloch_roundtrip() {
        let n = [0.3, -0.5, 0.8];
        let p = RankOneProjector::<f64>::from_bloch_vector(n);
        let len = (0.09f64 + 0.25 + 0.64).sqrt();
        let back = p.bloch_vector();
        for i in 0..3 {
            assert_abs_diff_eq!(back[i], n[i] / len, epsilon = 1e-15);
        }
        let v = p.range_vector();
        let p2 = projector_of(&v).unwrap();
        assert!((*p2.matrix() - *p.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn su2_rotation_is_unitary() {
        let u = Matrix2::su2_rotation(0.7, [0.0, 0.6, 0.8]);
        assert!(u.unitarity_defect() < 1e-15);
        assert!((u.det() - c(1.0, 0.0)).norm() < 1e-15);
        let inv = u.inverse().unwrap();
        assert!(inv.sub(&u.adjoint()).max_abs() < 1e-15);
    }

    #[test]
    fn f32_instantiation() {
        let h = HermitianMatrix2::<f32>::new(0.5, -0.5, Complex::new(0.2, 0.1));
        let e = eig2(&h);
        let p = *e.projector_plus().matrix() + *e.projector_minus().matrix();
        assert!((p - HermitianMatrix2::identity()).max_abs() < 1e-6);
    }
}
