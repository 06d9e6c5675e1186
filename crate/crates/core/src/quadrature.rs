//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The integrator keeps a priority queue of panels ordered by their error
//! estimate and bisects the worst panel until the requested tolerance is
//! met. Callers can seed the partition with breakpoints (kinks, oscillation
//! periods) so that every initial panel contains only smooth behaviour.
//! Final sums are accumulated in increasing abscissa order, which keeps the
//! result independent of the refinement history.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge: estimate {value:e} with error {error:e} after {segments} panels")]
    NotConverged {
        value: f64,
        error: f64,
        segments: usize,
    },
    #[error("integrand returned a non-finite value at x = {at}")]
    NonFinite { at: f64 },
}

/// Result of an adaptive integration with its error certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

/// Adaptive Gauss–Kronrod integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_segments: usize,
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-13),
            rel_tol: T::lit(1e-11),
            max_segments: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
fn kronrod_panel<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Result<Panel<T>, QuadratureError> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFinite {
            at: center.to_f64_lossy(),
        });
    }
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_g = fc * T::lit(WG[3]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let x1 = center - dx;
        let x2 = center + dx;
        let f1 = f(x1);
        let f2 = f(x2);
        if !f1.is_finite() {
            return Err(QuadratureError::NonFinite {
                at: x1.to_f64_lossy(),
            });
        }
        if !f2.is_finite() {
            return Err(QuadratureError::NonFinite {
                at: x2.to_f64_lossy(),
            });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k += w * (f1 + f2);
        res_abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc += T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    res_asc *= scale;
    res_abs *= scale;
    let mut error = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && error != T::zero() {
        let ratio = (T::lit(200.0) * error / res_asc).powf(T::lit(1.5));
        error = res_asc * if ratio < T::one() { ratio } else { T::one() };
    }
    let round_floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && round_floor > error {
        error = round_floor;
    }
    Ok(Panel { a, b, value, error })
}

impl<T: Real> Quadrature<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_max_segments(mut self, max_segments: usize) -> Self {
        self.max_segments = max_segments;
        self
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(T) -> T>(
        &self,
        f: F,
        a: T,
        b: T,
    ) -> Result<Estimate<T>, QuadratureError> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates `f` over `[points[0], points[last]]`, using the given
    /// increasing breakpoints as the initial partition.
    pub fn integrate_with_breaks<F: Fn(T) -> T>(
        &self,
        f: F,
        points: &[T],
    ) -> Result<Estimate<T>, QuadratureError> {
        assert!(points.len() >= 2, "need at least one panel");
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0usize;
        let (mut total, mut err) = (T::zero(), T::zero());
        for w in points.windows(2) {
            if w[1] == w[0] {
                continue;
            }
            let p = kronrod_panel(&f, w[0], w[1])?;
            total += p.value;
            err += p.error;
            heap.push(p);
            evaluations += 15;
        }
        let floor = T::lit(100.0) * T::epsilon();
        loop {
            let target = self
                .abs_tol
                .max(self.rel_tol * total.abs())
                .max(floor * total.abs());
            if err <= target {
                let err = heap.iter().fold(T::zero(), |e, p| e + p.error);
                return Ok(Estimate {
                    value: ordered_sum(heap.into_vec()),
                    error: err,
                    evaluations,
                });
            }
            if heap.len() >= self.max_segments {
                return Err(QuadratureError::NotConverged {
                    value: total.to_f64_lossy(),
                    error: err.to_f64_lossy(),
                    segments: heap.len(),
                });
            }
            let worst = heap.pop().expect("non-empty panel set");
            let mid = T::lit(0.5) * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Panel can no longer be split in this precision.
                return Err(QuadratureError::NotConverged {
                    value: total.to_f64_lossy(),
                    error: err.to_f64_lossy(),
                    segments: heap.len() + 1,
                });
            }
            let left = kronrod_panel(&f, worst.a, mid)?;
            let right = kronrod_panel(&f, mid, worst.b)?;
            total += left.value + right.value - worst.value;
            err += left.error + right.error - worst.error;
            if err < T::zero() {
                err = heap
                    .iter()
                    .fold(left.error + right.error, |e, p| e + p.error);
            }
            heap.push(left);
            heap.push(right);
            evaluations += 30;
        }
    }

    /// Iterated integral `∫_{ax}^{bx} ∫_{ay}^{by} f(x, y) dy dx`.
    ///
    /// The inner integrals run at a tolerance a hundred times tighter than
    /// the outer one.
    pub fn integrate_2d<F: Fn(T, T) -> T>(
        &self,
        f: F,
        x_range: (T, T),
        y_range: (T, T),
    ) -> Result<Estimate<T>, QuadratureError> {
        let inner = Quadrature {
            abs_tol: self.abs_tol * T::lit(0.01),
            rel_tol: self.rel_tol * T::lit(0.01),
            max_segments: self.max_segments,
        };
        let failure = std::cell::RefCell::new(None);
        let outer = self.integrate(
            |x| match inner.integrate(|y| f(x, y), y_range.0, y_range.1) {
                Ok(e) => e.value,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    T::zero()
                }
            },
            x_range.0,
            x_range.1,
        )?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(outer),
        }
    }
}

fn ordered_sum<T: Real>(mut panels: Vec<Panel<T>>) -> T {
    panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    panels.iter().fold(T::zero(), |acc, p| acc + p.value)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((T::lit(x), T::lit(w)));
    }
    out.reverse();
    out
}
