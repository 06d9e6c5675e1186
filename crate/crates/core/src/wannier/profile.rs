//! Bessel-integral representation of the canonical Wannier coefficients.

use rayon::prelude::*;
use serde::Serialize;

use super::bessel::{bessel_j_signed, bessel_j_unchecked};
use super::cutoff::RadialCutoff;
use super::WannierError;
use crate::quadrature::Quadrature;
use crate::scalar::Real;

/// Absolute tolerance of [`radial_integral`] in units of `r^{p+2}`; it
/// bounds the cancellation floor of the oscillatory integrand.
pub const RADIAL_ABS_TOL: f64 = 1e-15;
/// Relative tolerance of [`radial_integral`].
pub const RADIAL_REL_TOL: f64 = 1e-10;

/// `I_{ℓ,p}(x) = 2π ∫₀^r q^{p+1} χ̃(q) J_ℓ(2π q x) dq`.
///
/// The q-range is split at `ρ` and at every multiple of `1/x` (one Bessel
/// oscillation) before adaptive Gauss–Kronrod refinement.
pub fn radial_integral<T: Real>(
    ell: i64,
    p: u32,
    cutoff: &RadialCutoff<T>,
    x: T,
) -> Result<T, WannierError> {
    if !(x > T::zero()) {
        return Err(WannierError::NonPositiveX {
            x: x.to_f64_lossy(),
        });
    }
    bessel_j_signed(ell, T::zero())?;
    let order = ell.unsigned_abs() as u32;
    let parity = if ell < 0 && ell % 2 != 0 {
        -T::one()
    } else {
        T::one()
    };
    let two_pi_x = T::TAU() * x;
    let integrand =
        |q: T| q.powi(p as i32 + 1) * cutoff.value(q) * bessel_j_unchecked(order, two_pi_x * q);
    let period = x.recip();
    let mut breaks = vec![T::zero()];
    let mut k = 1i64;
    loop {
        let b = T::int(k) * period;
        if b >= cutoff.r {
            break;
        }
        breaks.push(b);
        k += 1;
    }
    breaks.push(cutoff.rho);
    breaks.push(cutoff.r);
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    breaks.dedup();
    let scale = cutoff.r.powi(p as i32 + 2);
    let quad = Quadrature::new(T::lit(RADIAL_ABS_TOL) * scale, T::lit(RADIAL_REL_TOL));
    let est = quad.integrate_with_breaks(integrand, &breaks)?;
    Ok(parity * T::TAU() * est.value)
}

/// `Γ(k/2)` for integer `k`; `None` at the poles `k ≤ 0` even.
pub fn gamma_half<T: Real>(k: i64) -> Option<T> {
    let sqrt_pi = T::PI().sqrt();
    if k % 2 == 0 {
        let n = k / 2;
        if n <= 0 {
            return None;
        }
        // Γ(n) = (n−1)!
        Some((1..n).fold(T::one(), |acc, j| acc * T::int(j)))
    } else if k > 0 {
        // Γ(m + 1/2) = (2m)! √π / (4^m m!), m = (k−1)/2, as a running product.
        let m = (k - 1) / 2;
        Some((1..=m).fold(sqrt_pi, |acc, j| acc * (T::int(2 * j - 1) / T::lit(2.0))))
    } else {
        // Γ(1/2 − m) = (−4)^m m! √π / (2m)!, m = (1−k)/2.
        let m = (1 - k) / 2;
        Some((1..=m).fold(sqrt_pi, |acc, j| acc / (T::lit(0.5) - T::int(j))))
    }
}

/// Leading coefficient `c` in `I_{ℓ,p}(x) ≈ c·x^{−p−2}`:
/// `Γ((ℓ+p+2)/2) / (Γ((ℓ−p)/2) π^{p+1})`, zero at the poles of the
/// denominator. Negative `ℓ` uses `J_{−ℓ} = (−1)^ℓ J_ℓ`.
pub fn asymptotic_prefactor<T: Real>(ell: i64, p: u32) -> T {
    let parity = if ell < 0 && ell % 2 != 0 {
        -T::one()
    } else {
        T::one()
    };
    let l = ell.abs();
    let p = p as i64;
    let num = gamma_half::<T>(l + p + 2).expect("positive argument");
    match gamma_half::<T>(l - p) {
        None => T::zero(),
        Some(den) => parity * num / (den * T::PI().powi(p as i32 + 1)),
    }
}

/// Large-`t` asymptotics of `∫₀^t s^μ J_ν(s) ds`:
/// `2^μ Γ((ν+μ+1)/2)/Γ((ν−μ+1)/2) + √(2/π) t^{μ−1/2} [sin θ + (μ − 1/2 + (4ν²−1)/8) cos θ / t]`,
/// `θ = t − νπ/2 − π/4`. Used only to cross-check quadrature.
pub fn bessel_moment_asymptotic<T: Real>(mu: u32, nu: u32, t: T) -> T {
    let m = mu as i64;
    let n = nu as i64;
    let constant = match gamma_half::<T>(n - m + 1) {
        None => T::zero(),
        Some(den) => {
            T::lit(2.0).powi(mu as i32) * gamma_half::<T>(n + m + 1).expect("positive") / den
        }
    };
    let a = T::int(m) - T::lit(0.5);
    let theta = t - T::int(n) * T::FRAC_PI_2() - T::FRAC_PI_4();
    let corr = a + (T::int(4 * n * n) - T::one()) / T::lit(8.0);
    constant + (T::lit(2.0) / T::PI()).sqrt() * t.powf(a) * (theta.sin() + corr * theta.cos() / t)
}

/// One row of a canonical Wannier profile. `w_sin` is purely imaginary;
/// its imaginary part is stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WannierRow<T> {
    pub x: T,
    pub w_cos: T,
    pub w_sin_im: T,
    pub envelope: T,
}

/// `w_cos = (I_{n+p} + I_{n−p} + I_p + I_{−p})/4`,
/// `w_sin = (I_{n+p} + I_{n−p} − I_p − I_{−p})/(4i)`, all with weight `q^{p+1}`.
pub fn canonical_wannier_profile<T: Real>(
    n: i64,
    p: u32,
    cutoff: &RadialCutoff<T>,
    x_grid: &[T],
) -> Result<Vec<WannierRow<T>>, WannierError> {
    if n == 0 {
        return Err(WannierError::ZeroWinding);
    }
    let pp = p as i64;
    x_grid
        .par_iter()
        .map(|&x| {
            let a = radial_integral(n + pp, p, cutoff, x)?;
            let b = radial_integral(n - pp, p, cutoff, x)?;
            let c = radial_integral(pp, p, cutoff, x)?;
            let d = radial_integral(-pp, p, cutoff, x)?;
            let quarter = T::lit(0.25);
            let w_cos = quarter * (a + b + c + d);
            let w_sin_im = -quarter * (a + b - c - d);
            Ok(WannierRow {
                x,
                w_cos,
                w_sin_im,
                envelope: w_cos.hypot(w_sin_im),
            })
        })
        .collect()
}

/// Limits of `x^{p+2} w_cos` and `x^{p+2} |w_sin|` from the prefactors.
pub fn profile_prefactors<T: Real>(n: i64, p: u32) -> (T, T) {
    let pp = p as i64;
    let a = asymptotic_prefactor::<T>(n + pp, p);
    let b = asymptotic_prefactor::<T>(n - pp, p);
    let c = asymptotic_prefactor::<T>(pp, p);
    let d = asymptotic_prefactor::<T>(-pp, p);
    let quarter = T::lit(0.25);
    (quarter * (a + b + c + d), (quarter * (a + b - c - d)).abs())
}

/// CSV with header `x,w_cos,w_sin_im,envelope,x2_envelope,scaled_envelope`,
/// where `scaled_envelope = x^{p+2}·envelope`.
pub fn profile_csv<T: Real>(rows: &[WannierRow<T>], p: u32) -> String {
    let mut out = String::from("x,w_cos,w_sin_im,envelope,x2_envelope,scaled_envelope\n");
    for r in rows {
        let cols = [r.x, r.w_cos, r.w_sin_im, r.envelope, r.x * r.x * r.envelope, r.x.powi(p as i32 + 2) * r.envelope];
        let line: Vec<String> = cols.iter().map(|c| format!("{:.16e}", c.to_f64_lossy())).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
