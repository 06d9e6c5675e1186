//! Polynomial smoothed characteristic function `χ̃(|q|)`.

use serde::Serialize;

use super::WannierError;
use crate::scalar::Real;

/// Largest accepted row-relative residual of the Hermite system.
pub const CUTOFF_RESIDUAL_LIMIT: f64 = 1e-7;

/// `χ̃ = 1` on `[0, ρ]`, `Σ α_i u^i` with `u = (|q| − ρ)/(r − ρ)` on
/// `(ρ, r)`, and `0` beyond `r`; value and first `p` derivatives are
/// continuous at both ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialCutoff<T> {
    pub rho: T,
    pub r: T,
    pub p: usize,
    /// Coefficients `α_0 … α_{2p+1}` in the normalized variable `u`.
    pub coeffs: Vec<T>,
}

/// Solves `A x = b` by Gaussian elimination with row equilibration and
/// partial pivoting. Returns `None` for a numerically singular matrix.
fn solve_dense<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for i in 0..n {
        let scale = a[i].iter().fold(T::zero(), |m, x| m.max(x.abs()));
        if scale == T::zero() {
            return None;
        }
        for x in a[i].iter_mut() {
            *x /= scale;
        }
        b[i] /= scale;
    }
    for col in 0..n {
        let pivot = (col..n).fold(col, |best, r| {
            if a[r][col].abs() > a[best][col].abs() {
                r
            } else {
                best
            }
        });
        if a[pivot][col].abs() < T::epsilon() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

/// `d^k/du^k u^i` evaluated at `u`.
fn monomial_derivative<T: Real>(i: usize, k: usize, u: T) -> T {
    if k > i {
        return T::zero();
    }
    let falling = (i - k + 1..=i).fold(T::one(), |acc, j| acc * T::int(j as i64));
    falling * u.powi((i - k) as i32)
}

/// Builds the degree-`2p+1` cutoff with `C^p` joins at `ρ` and `r`.
pub fn build_cutoff<T: Real>(rho: T, r: T, p: usize) -> Result<RadialCutoff<T>, WannierError> {
    if !(rho > T::zero() && r > rho) {
        return Err(WannierError::InvalidCutoff(format!(
            "need 0 < rho < r, got rho = {rho}, r = {r}"
        )));
    }
    if !(1..=8).contains(&p) {
        return Err(WannierError::InvalidCutoff(format!(
            "smoothness p = {p} outside 1..=8"
        )));
    }
    let size = 2 * p + 2;
    let mut a = Vec::with_capacity(size);
    let mut b = Vec::with_capacity(size);
    for (u, value) in [(T::zero(), T::one()), (T::one(), T::zero())] {
        for k in 0..=p {
            a.push(
                (0..size)
                    .map(|i| monomial_derivative(i, k, u))
                    .collect::<Vec<T>>(),
            );
            b.push(if k == 0 { value } else { T::zero() });
        }
    }
    let coeffs = solve_dense(a.clone(), b.clone()).ok_or(WannierError::IllConditioned {
        residual: f64::INFINITY,
    })?;
    let residual = a
        .iter()
        .zip(&b)
        .map(|(row, &rhs)| {
            let scale = row
                .iter()
                .zip(&coeffs)
                .fold(rhs.abs(), |m, (x, c)| m.max((*x * *c).abs()));
            (row.iter()
                .zip(&coeffs)
                .fold(T::zero(), |s, (x, c)| s + *x * *c)
                - rhs)
                .abs()
                / scale
        })
        .fold(T::zero(), T::max);
    if !(residual <= T::lit(CUTOFF_RESIDUAL_LIMIT)) {
        return Err(WannierError::IllConditioned {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(RadialCutoff { rho, r, p, coeffs })
}

impl<T: Real> RadialCutoff<T> {
    pub fn value(&self, q: T) -> T {
        if q <= self.rho {
            T::one()
        } else if q >= self.r {
            T::zero()
        } else {
            let u = (q - self.rho) / (self.r - self.rho);
            self.coeffs
                .iter()
                .rev()
                .fold(T::zero(), |acc, &c| acc * u + c)
        }
    }

    /// `k`-th derivative in `|q|` (one-sided limits from inside `(ρ, r)` at the ends).
    pub fn derivative(&self, q: T, k: usize) -> T {
        if k == 0 {
            return self.value(q);
        }
        if q < self.rho || q > self.r {
            return T::zero();
        }
        let width = self.r - self.rho;
        let u = (q - self.rho) / width;
        let s = self
            .coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &c)| {
                acc + c * monomial_derivative(i, k, u)
            });
        s / width.powi(k as i32)
    }

    /// Breakpoints where the piecewise definition changes.
    pub fn breakpoints(&self) -> [T; 2] {
        [self.rho, self.r]
    }
}
