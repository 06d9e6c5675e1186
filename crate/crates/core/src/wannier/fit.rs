//! Power-law fits of decaying profiles.

use serde::Serialize;

use super::WannierError;
use crate::scalar::Real;

/// Minimum number of points in a fit window.
pub const MIN_FIT_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    /// Largest deviation of `log|value|` from the fitted line.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares line through `(log x, log|v|)` for `x` in `window`.
pub fn decay_fit<T: Real>(
    xs: &[T],
    values: &[T],
    window: (T, T),
) -> Result<DecayFit, WannierError> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(values)
        .filter(|(&x, _)| x >= window.0 && x <= window.1)
        .map(|(&x, &v)| (x.to_f64_lossy(), v.to_f64_lossy()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(WannierError::TooFewPoints {
            got: pts.len(),
            min: MIN_FIT_POINTS,
        });
    }
    if let Some(i) =
        (1..pts.len()).find(|&i| pts[i].1.signum() != pts[i - 1].1.signum() || pts[i].1 == 0.0)
    {
        return Err(WannierError::SignChangeInWindow { x: pts[i].0 });
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(x, v)| (x.ln(), v.abs().ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let sxy = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = logs
        .iter()
        .map(|&(lx, ly)| (ly - (intercept + slope * lx)).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit {
        slope,
        prefactor: intercept.exp(),
        window: (window.0.to_f64_lossy(), window.1.to_f64_lossy()),
        residual,
        points: pts.len(),
    })
}

/// Local maxima of `|v|` (interior points not smaller than either neighbour).
pub fn envelope_peaks<T: Real>(xs: &[T], values: &[T]) -> (Vec<T>, Vec<T>) {
    let mut px = Vec::new();
    let mut pv = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let a = values[i].abs();
        if a >= values[i - 1].abs() && a >= values[i + 1].abs() && a > T::zero() {
            px.push(xs[i]);
            pv.push(a);
        }
    }
    (px, pv)
}

/// [`decay_fit`] on the oscillation peaks of `|v|`.
pub fn decay_fit_envelope<T: Real>(
    xs: &[T],
    values: &[T],
    window: (T, T),
) -> Result<DecayFit, WannierError> {
    let (px, pv) = envelope_peaks(xs, values);
    decay_fit(&px, &pv, window)
}

/// `count` logarithmically spaced points on `[a, b]`, endpoints exact.
pub fn log_grid<T: Real>(a: T, b: T, count: usize) -> Vec<T> {
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                a
            } else if i + 1 == count {
                b
            } else {
                (la + (lb - la) * T::int(i as i64) / T::int(count as i64 - 1)).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_inverse_square() {
        let xs = log_grid(10.0, 1000.0, 12);
        let vs: Vec<f64> = xs.iter().map(|x| 3.0 / (x * x)).collect();
        let f = decay_fit(&xs, &vs, (10.0, 1000.0)).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-10);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn sign_change_detected() {
        let xs = log_grid(1.0_f64, 100.0, 20);
        let vs: Vec<f64> = xs.iter().map(|x| x.sin() / x).collect();
        assert!(matches!(
            decay_fit(&xs, &vs, (1.0, 100.0)),
            Err(WannierError::SignChangeInWindow { .. })
        ));
    }

    #[test]
    fn envelope_of_oscillation() {
        let xs: Vec<f64> = (0..20000).map(|i| 10.0 + i as f64 * 0.05).collect();
        let vs: Vec<f64> = xs.iter().map(|x| x.cos() / (x * x * x)).collect();
        let f = decay_fit_envelope(&xs, &vs, (10.0, 1000.0)).unwrap();
        assert!((f.slope + 3.0).abs() < 5e-3, "{f:?}");
    }

    #[test]
    fn too_few_points() {
        let xs = log_grid(1.0, 10.0, 5);
        assert!(matches!(
            decay_fit(&xs, &xs, (1.0, 10.0)),
            Err(WannierError::TooFewPoints { .. })
        ));
    }
}
