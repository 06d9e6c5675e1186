//! Bessel functions `J_ℓ` of integer order on `z ≥ 0`.

use super::WannierError;
use crate::scalar::Real;

/// Largest supported order.
pub const MAX_ORDER: u32 = 64;

const SERIES_LIMIT: f64 = 2.0;
const HANKEL_LIMIT: f64 = 30.0;

/// Ascending series `Σ (−1)^k (z/2)^{2k+ℓ} / (k!(k+ℓ)!)`.
fn series<T: Real>(ell: u32, z: T) -> T {
    let half = z * T::lit(0.5);
    let mut term = (1..=ell).fold(T::one(), |t, j| t * half / T::int(j as i64));
    let mut sum = term;
    let h2 = half * half;
    for k in 1..200 {
        term = -term * h2 / (T::int(k) * T::int(k + ell as i64));
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() * T::lit(0.01) {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion of `J_ν(z)` for `ν ∈ {0, 1}` and large `z`.
fn hankel<T: Real>(nu: u32, z: T) -> T {
    let mu = T::int(4 * (nu as i64) * (nu as i64));
    let eight_z = T::lit(8.0) * z;
    let (mut p, mut q) = (T::one(), T::zero());
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..60 {
        let odd = T::int(2 * k - 1);
        term = term * (mu - odd * odd) / (T::int(k) * eight_z);
        if term.abs() > last || term.abs() < T::epsilon() * T::lit(1e-3) {
            break;
        }
        last = term.abs();
        // a_k(ν)/z^k with alternating signs split into P (even k) and Q (odd k).
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = z - (T::int(2 * nu as i64 + 1)) * T::FRAC_PI_4();
    (T::lit(2.0) / (T::PI() * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller's backward recurrence normalized by `J_0 + 2 Σ J_{2k} = 1`.
fn miller<T: Real>(ell: u32, z: T) -> T {
    let top = (ell as f64).max(z.to_f64_lossy());
    let mut start = (top + 25.0 + 2.0 * (40.0 * top).sqrt()) as u64;
    start += start % 2;
    let two_over_z = T::lit(2.0) / z;
    let (mut j_next, mut j_cur) = (T::zero(), T::lit(1e-30));
    let mut norm = T::zero();
    let mut wanted = T::zero();
    let big = T::lit(1e250_f64.min(T::max_value().to_f64_lossy().sqrt()));
    for k in (1..=start).rev() {
        let j_prev = T::int(k as i64) * two_over_z * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds the unnormalized J_{k−1}.
        if (k - 1) % 2 == 0 && k > 1 {
            norm += T::lit(2.0) * j_cur;
        }
        if k - 1 == ell as u64 {
            wanted = j_cur;
        }
        if j_cur.abs() > big {
            let s = big.recip();
            j_cur *= s;
            j_next *= s;
            norm *= s;
            wanted *= s;
        }
    }
    norm += j_cur;
    wanted / norm
}

/// `J_ℓ(z)` with absolute error below `1e−10` for `z ≤ 10⁴`.
pub fn bessel_j<T: Real>(ell: u32, z: T) -> Result<T, WannierError> {
    if ell > MAX_ORDER {
        return Err(WannierError::OrderTooLarge { ell });
    }
    if !(z >= T::zero()) {
        return Err(WannierError::NegativeArgument {
            z: z.to_f64_lossy(),
        });
    }
    Ok(bessel_j_unchecked(ell, z))
}

pub(crate) fn bessel_j_unchecked<T: Real>(ell: u32, z: T) -> T {
    if z == T::zero() {
        return if ell == 0 { T::one() } else { T::zero() };
    }
    if z <= T::lit(SERIES_LIMIT) {
        return series(ell, z);
    }
    if z <= T::lit(HANKEL_LIMIT) || T::int(ell as i64) >= z {
        return miller(ell, z);
    }
    let j0 = hankel(0, z);
    if ell == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = hankel(1, z);
    let two_over_z = T::lit(2.0) / z;
    for k in 1..ell {
        let next = T::int(k as i64) * two_over_z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `J_ℓ` for any integer order via `J_{−ℓ} = (−1)^ℓ J_ℓ`.
pub fn bessel_j_signed<T: Real>(ell: i64, z: T) -> Result<T, WannierError> {
    let v = bessel_j(ell.unsigned_abs() as u32, z)?;
    Ok(if ell < 0 && ell % 2 != 0 { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        // Standard tabulated values.
        let cases = [
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 1.0, 0.440_050_585_744_933_5),
            (0, 10.0, -0.245_935_764_451_348_3),
            (2, 5.0, 0.046_565_116_277_752_2),
            (5, 20.0, 0.151_169_767_982_558_1),
            (0, 100.0, 0.019_985_850_304_223_12),
        ];
        for (ell, z, expected) in cases {
            let v: f64 = bessel_j(ell, z).unwrap();
            assert!(
                (v - expected).abs() < 1e-12,
                "J_{ell}({z}) = {v}, expected {expected}"
            );
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            bessel_j(65, 1.0),
            Err(WannierError::OrderTooLarge { .. })
        ));
        assert!(matches!(
            bessel_j(1, -1.0),
            Err(WannierError::NegativeArgument { .. })
        ));
        assert_eq!(
            bessel_j_signed(-3, 2.0).unwrap(),
            -bessel_j(3, 2.0).unwrap()
        );
        assert_eq!(bessel_j_signed(-2, 2.0).unwrap(), bessel_j(2, 2.0).unwrap());
    }
}
