//! Smoothed Berry curvature of the canonical models paired with radial
//! test functions, and its `μ → 0` delta limit.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::models::Band;
use crate::quadrature::{Quadrature, QuadratureError};
use crate::scalar::Real;
use crate::wannier::{build_cutoff, WannierError};

/// Relative tolerance of [`smoothed_pairing`].
pub const PAIRING_REL_TOL: f64 = 1e-10;
/// Minimum length of a μ sequence.
pub const MIN_MU_SEQUENCE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("mu must be nonzero and finite, got {mu}")]
    InvalidMu { mu: f64 },
    #[error("mu sequence needs at least {min} entries, got {got}")]
    SequenceTooShort { min: usize, got: usize },
    #[error("mu sequence must be positive and strictly decreasing (entry {index})")]
    SequenceNotDecreasing { index: usize },
    #[error("deviation grows from {previous:e} to {current:e} at mu = {mu}")]
    NotConverging {
        mu: f64,
        previous: f64,
        current: f64,
    },
    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),
    #[error(transparent)]
    Cutoff(#[from] WannierError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Radial test function `f(|q|)`, supported in `[0, support]`.
#[derive(Clone)]
pub struct RadialTestFunction<T> {
    eval: Arc<dyn Fn(T) -> T + Send + Sync>,
    pub support: T,
    /// Number of continuous derivatives.
    pub smoothness: u32,
    pub value_at_zero: T,
    /// Points where `f` is only finitely smooth.
    pub breakpoints: Vec<T>,
    pub label: String,
}

impl<T: Real> fmt::Debug for RadialTestFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialTestFunction")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("smoothness", &self.smoothness)
            .field("value_at_zero", &self.value_at_zero)
            .finish()
    }
}

impl<T: Real + 'static> RadialTestFunction<T> {
    pub fn from_fn(
        f: impl Fn(T) -> T + Send + Sync + 'static,
        support: T,
        smoothness: u32,
        label: impl Into<String>,
    ) -> Result<Self, DistError> {
        if !(support > T::zero()) {
            return Err(DistError::InvalidTestFunction(format!(
                "support {support} must be positive"
            )));
        }
        let value_at_zero = f(T::zero());
        Ok(RadialTestFunction {
            eval: Arc::new(f),
            support,
            smoothness,
            value_at_zero,
            breakpoints: Vec::new(),
            label: label.into(),
        })
    }

    /// `height · χ̃` with `χ̃ = 1` on `[0, ρ]` and `0` beyond `r`, `C^p`.
    pub fn smoothstep(height: T, rho: T, r: T, p: usize) -> Result<Self, DistError> {
        let c = build_cutoff(rho, r, p)?;
        Ok(RadialTestFunction {
            eval: Arc::new(move |q| height * c.value(q)),
            support: r,
            smoothness: p as u32,
            value_at_zero: height,
            breakpoints: vec![rho, r],
            label: format!("smoothstep(height={height}, rho={rho}, r={r}, p={p})"),
        })
    }

    /// Default test function: unit smoothstep with `C²` joins.
    pub fn default_bump(rho: T, r: T) -> Result<Self, DistError> {
        Self::smoothstep(T::one(), rho, r, 2)
    }

    /// Ring-shaped bump `χ̃_{ρ₂,r₂} − χ̃_{ρ₁,r₁}`, zero at the origin.
    pub fn annular(inner: (T, T), outer: (T, T), p: usize) -> Result<Self, DistError> {
        if !(inner.1 <= outer.0) {
            return Err(DistError::InvalidTestFunction(format!(
                "inner step must end before the outer one starts: {} > {}",
                inner.1, outer.0
            )));
        }
        let a = build_cutoff(inner.0, inner.1, p)?;
        let b = build_cutoff(outer.0, outer.1, p)?;
        Ok(RadialTestFunction {
            eval: Arc::new(move |q| b.value(q) - a.value(q)),
            support: outer.1,
            smoothness: p as u32,
            value_at_zero: T::zero(),
            breakpoints: vec![inner.0, inner.1, outer.0, outer.1],
            label: format!(
                "annular(inner={:?}, outer={:?}, p={p})",
                (inner.0, inner.1),
                (outer.0, outer.1)
            ),
        })
    }

    /// `a·f + b·g`.
    pub fn combine(a: T, f: &Self, b: T, g: &Self) -> Self {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let mut breaks: Vec<T> = f
            .breakpoints
            .iter()
            .chain(&g.breakpoints)
            .copied()
            .collect();
        breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        breaks.dedup();
        RadialTestFunction {
            eval: Arc::new(move |q| a * fe(q) + b * ge(q)),
            support: f.support.max(g.support),
            smoothness: f.smoothness.min(g.smoothness),
            value_at_zero: a * f.value_at_zero + b * g.value_at_zero,
            breakpoints: breaks,
            label: format!("{a}*[{}] + {b}*[{}]", f.label, g.label),
        }
    }

    pub fn value(&self, q: T) -> T {
        if q >= self.support {
            T::zero()
        } else {
            (self.eval)(q)
        }
    }
}

/// `∂_{|q|}(μ/√(|q|²+μ²))`, written in `t = |q|/μ` to stay accurate for tiny `μ`.
pub fn kernel<T: Real>(q: T, mu: T) -> T {
    let t = q / mu;
    -(mu.signum() / (mu * mu)) * q / (T::one() + t * t).powf(T::lit(1.5))
}

/// `(1/2π) ω^μ_{n,s}[f] = s·n·∫₀^{r_f} ∂_{|q|}(μ/√(|q|²+μ²)) f(|q|) d|q|`.
pub fn smoothed_pairing<T: Real + 'static>(
    n: i32,
    band: Band,
    f: &RadialTestFunction<T>,
    mu: T,
) -> Result<T, DistError> {
    if !(mu != T::zero() && mu.is_finite()) {
        return Err(DistError::InvalidMu {
            mu: mu.to_f64_lossy(),
        });
    }
    if n == 0 {
        return Ok(T::zero());
    }
    let r = f.support;
    let mut breaks = vec![T::zero()];
    let mut b = mu.abs();
    while b < r {
        breaks.push(b);
        b *= T::lit(4.0);
    }
    breaks.extend(
        f.breakpoints
            .iter()
            .copied()
            .filter(|&x| x > T::zero() && x < r),
    );
    breaks.push(r);
    breaks.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    breaks.dedup();
    let quad = Quadrature::new(T::epsilon() * T::lit(16.0), T::lit(PAIRING_REL_TOL));
    let est = quad.integrate_with_breaks(|q| kernel(q, mu) * f.value(q), &breaks)?;
    Ok(T::int((band.sign() * n) as i64) * est.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRow {
    pub mu: f64,
    /// Pairing at `+μ`.
    pub pairing: f64,
    /// Pairing at `−μ` with the orientation sign removed.
    pub pairing_lower: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaLimitReport {
    pub n: i32,
    pub band: Band,
    pub test_function: String,
    pub value_at_zero: f64,
    pub rows: Vec<DeltaRow>,
    /// Extrapolated limits from `μ ↓ 0` and `μ ↑ 0`.
    pub limit_upper: f64,
    pub limit_lower: f64,
    /// Mean of the two one-sided limits.
    pub limit: f64,
    /// `−s·n·f(0)`.
    pub expected: f64,
    pub deviation: f64,
    /// Successive `log(d_i/d_{i+1}) / log(μ_i/μ_{i+1})`; `None` where deviations vanish.
    pub orders: Vec<Option<f64>>,
    pub order: Option<f64>,
}

/// Value at zero of the quadratic through the last three `(μ, v)` pairs.
fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let k = points.len();
    let [(x0, y0), (x1, y1), (x2, y2)] = [points[k - 3], points[k - 2], points[k - 1]];
    y0 * (x1 * x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x0 * x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x0 * x1) / ((x2 - x0) * (x2 - x1))
}

/// Absolute deviations below this are treated as exact.
const DEVIATION_FLOOR: f64 = 1e-12;

pub fn delta_limit_check<T: Real + 'static>(
    n: i32,
    band: Band,
    f: &RadialTestFunction<T>,
    mu_sequence: &[T],
) -> Result<DeltaLimitReport, DistError> {
    if mu_sequence.len() < MIN_MU_SEQUENCE {
        return Err(DistError::SequenceTooShort {
            min: MIN_MU_SEQUENCE,
            got: mu_sequence.len(),
        });
    }
    for (i, &mu) in mu_sequence.iter().enumerate() {
        if !(mu > T::zero()) || (i > 0 && !(mu < mu_sequence[i - 1])) {
            return Err(DistError::SequenceNotDecreasing { index: i });
        }
    }
    let expected = -(band.sign() * n) as f64 * f.value_at_zero.to_f64_lossy();
    let values = mu_sequence
        .par_iter()
        .map(|&mu| {
            let up = smoothed_pairing(n, band, f, mu)?;
            let down = smoothed_pairing(n, band, f, -mu)?;
            Ok((mu.to_f64_lossy(), up.to_f64_lossy(), -down.to_f64_lossy()))
        })
        .collect::<Result<Vec<_>, DistError>>()?;
    let rows: Vec<DeltaRow> = values
        .iter()
        .map(|&(mu, up, down)| DeltaRow {
            mu,
            pairing: up,
            pairing_lower: down,
            deviation: (up - expected).abs(),
        })
        .collect();
    for i in 2..rows.len() {
        let (prev, cur) = (rows[i - 1].deviation, rows[i].deviation);
        if cur > prev && cur > DEVIATION_FLOOR {
            return Err(DistError::NotConverging {
                mu: rows[i].mu,
                previous: prev,
                current: cur,
            });
        }
    }
    let upper: Vec<(f64, f64)> = rows.iter().map(|r| (r.mu, r.pairing)).collect();
    let lower: Vec<(f64, f64)> = rows.iter().map(|r| (r.mu, r.pairing_lower)).collect();
    let limit_upper = extrapolate_to_zero(&upper);
    let limit_lower = extrapolate_to_zero(&lower);
    let limit = 0.5 * (limit_upper + limit_lower);
    let orders: Vec<Option<f64>> = rows
        .windows(2)
        .map(|w| {
            let (d0, d1) = (w[0].deviation, w[1].deviation);
            (d0 > DEVIATION_FLOOR && d1 > DEVIATION_FLOOR)
                .then(|| (d0 / d1).ln() / (w[0].mu / w[1].mu).ln())
        })
        .collect();
    let order = orders.last().copied().flatten();
    Ok(DeltaLimitReport {
        n,
        band,
        test_function: f.label.clone(),
        value_at_zero: f.value_at_zero.to_f64_lossy(),
        rows,
        limit_upper,
        limit_lower,
        limit,
        expected,
        deviation: (limit - expected).abs(),
        orders,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_has_unit_mass() {
        let quad = Quadrature::new(1e-14, 1e-12);
        for &mu in &[0.3_f64, 1e-3, -0.02] {
            let breaks = [0.0, mu.abs(), 10.0 * mu.abs(), 1e3];
            let v = quad
                .integrate_with_breaks(|q| kernel(q, mu), &breaks)
                .unwrap()
                .value;
            let exact = mu / (1e6 + mu * mu).sqrt() - mu.signum();
            assert!((v - exact).abs() < 1e-11, "mu={mu}: {v} vs {exact}");
        }
    }

    #[test]
    fn constant_function_has_closed_form() {
        // f = 1 on [0, R]: s n (μ/√(R²+μ²) − 1)
        let f = RadialTestFunction::from_fn(|_| 1.0, 0.8, 0, "indicator").unwrap();
        let v = smoothed_pairing(2, Band::Minus, &f, 0.01).unwrap();
        let exact = -2.0 * (0.01 / (0.64f64 + 1e-4).sqrt() - 1.0);
        assert!((v - exact).abs() < 1e-10 * exact.abs());
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let pts: Vec<(f64, f64)> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&x| (x, 3.0 - 2.0 * x + 5.0 * x * x))
            .collect();
        assert!((extrapolate_to_zero(&pts) - 3.0).abs() < 1e-12);
    }
}
