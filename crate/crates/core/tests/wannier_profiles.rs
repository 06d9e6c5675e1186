use band_vortex::wannier::*;
use std::f64::consts::PI;

fn bessel_trapezoid(ell: i64, z: f64) -> f64 {
    let n = (z.abs() + ell.unsigned_abs() as f64 + 40.0).ceil() as usize * 2;
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|k| {
            let t = k as f64 * h;
            (ell as f64 * t - z * t.sin()).cos()
        })
        .sum::<f64>()
        / n as f64
}

#[test]
fn bessel_matches_integral_representation() {
    for ell in -8i64..=8 {
        for &z in &[
            0.0, 0.1, 1.0, 3.7, 11.9, 12.1, 25.0, 29.9, 30.1, 77.0, 400.0, 3141.0,
        ] {
            let got = bessel_j_signed(ell, z).unwrap();
            let want = bessel_trapezoid(ell, z);
            assert!(
                (got - want).abs() < 5e-14 * (1.0 + z.sqrt()),
                "J_{ell}({z}) = {got} vs {want}"
            );
        }
    }
}

#[test]
fn cutoff_derivatives_vanish_at_joins() {
    for p in 1..=6 {
        let c = build_cutoff(0.4_f64, 1.0, p).unwrap();
        for k in 1..=p {
            let scale = 0.6f64.powi(-(k as i32)) * (1..=2 * p + 1).product::<usize>() as f64;
            assert!(
                c.derivative(0.4, k).abs() < 1e-12 * scale,
                "p={p} k={k} at rho"
            );
            assert!(
                c.derivative(1.0, k).abs() < 1e-12 * scale,
                "p={p} k={k} at r"
            );
        }
        // Finite-difference check of the first derivative.
        let q = 0.73;
        let h = 1e-6;
        let fd = (c.value(q + h) - c.value(q - h)) / (2.0 * h);
        assert!((fd - c.derivative(q, 1)).abs() < 1e-6);
    }
}

#[test]
fn radial_integral_limits_match_prefactors() {
    let cut = build_cutoff(0.5_f64, 1.0, 3).unwrap();
    for &(ell, p) in &[(1i64, 0u32), (2, 0), (-1, 0), (3, 1), (0, 1), (2, 1)] {
        let c: f64 = asymptotic_prefactor(ell, p);
        let x = 300.0_f64;
        let v = radial_integral(ell, p, &cut, x).unwrap() * x.powi(p as i32 + 2);
        assert!(
            (v - c).abs() < 2e-3 * c.abs().max(0.05),
            "ell={ell} p={p}: {v} vs {c}"
        );
    }
}

#[test]
fn bessel_moment_asymptotics_match_quadrature() {
    use band_vortex::quadrature::Quadrature;
    let quad = Quadrature::new(1e-9, 1e-11);
    for nu in 0..4u32 {
        for mu in 0..3u32 {
            let t = 400.0_f64;
            let breaks: Vec<f64> = (0..=((t / PI) as usize))
                .map(|k| k as f64 * PI)
                .chain([t])
                .collect();
            let got = quad
                .integrate_with_breaks(|s| s.powi(mu as i32) * bessel_j(nu, s).unwrap(), &breaks)
                .unwrap()
                .value;
            let want = bessel_moment_asymptotic::<f64>(mu, nu, t);
            // next neglected term is O(t^{mu - 5/2})
            assert!(
                (got - want).abs() < 50.0 * t.powf(mu as f64 - 2.5),
                "mu={mu} nu={nu}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn prefactor_consistent_with_bessel_moment_constant() {
    for ell in 0..6i64 {
        for p in 0..3u32 {
            let t = 1e6_f64;
            let a = p as f64 + 0.5;
            let theta = t - ell as f64 * PI / 2.0 - PI / 4.0;
            let osc = (2.0 / PI).sqrt()
                * t.powf(a)
                * (theta.sin() + (a + (4.0 * (ell * ell) as f64 - 1.0) / 8.0) * theta.cos() / t);
            let constant = bessel_moment_asymptotic::<f64>(p + 1, ell as u32, t) - osc;
            let want = 2.0 * PI * (2.0 * PI).powi(-(p as i32 + 2)) * constant;
            let c: f64 = asymptotic_prefactor(ell, p);
            assert!(
                (c - want).abs() < 1e-9 * (1.0 + c.abs()),
                "ell={ell} p={p}: {c} vs {want}"
            );
        }
    }
}

#[test]
fn profile_decay_rates() {
    let cut = build_cutoff(0.5_f64, 1.0, 3).unwrap();
    let xs = log_grid(50.0, 500.0, 24);
    for &(n, p, rate) in &[(1i64, 0u32, -2.0), (2, 0, -2.0), (1, 1, -3.0)] {
        let rows = canonical_wannier_profile(n, p, &cut, &xs).unwrap();
        let env: Vec<f64> = rows.iter().map(|r| r.w_cos).collect();
        let fit = decay_fit(&xs, &env, (50.0, 500.0)).unwrap();
        assert!((fit.slope - rate).abs() < 0.05, "n={n} p={p}: {fit:?}");
        let (lim, _) = profile_prefactors::<f64>(n, p);
        let last = rows.last().unwrap();
        let scaled = last.w_cos * last.x.powi(p as i32 + 2);
        assert!(
            (scaled - lim).abs() < 0.01 * lim.abs(),
            "n={n} p={p}: {scaled} vs {lim}"
        );
    }
}

#[test]
fn first_zero_of_j0() {
    // bisection on the series representation
    let (mut a, mut b) = (2.0f64, 3.0f64);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if bessel_j(0, a).unwrap() * bessel_j(0, m).unwrap() <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    assert!((a - 2.404_825_557_695_773).abs() < 1e-12);
    assert!(bessel_j(0, 2.404826f64).unwrap().abs() < 1e-6);
}

#[test]
fn scaled_integral_at_two_hundred() {
    let cut = build_cutoff(0.5_f64, 1.0, 3).unwrap();
    let v = radial_integral(1, 0, &cut, 200.0).unwrap() * 200.0 * 200.0;
    assert!((v - 1.0 / (2.0 * PI)).abs() < 0.02 / (2.0 * PI), "{v}");
}

fn fitted_slope(n: i64, p: u32, cut: &band_vortex::Cutoff) -> (f64, f64) {
    let xs = log_grid(50.0, 500.0, 24);
    let rows = canonical_wannier_profile(n, p, cut, &xs).unwrap();
    let env: Vec<f64> = rows.iter().map(|r| r.envelope).collect();
    let fit = decay_fit(&xs, &env, (50.0, 500.0)).unwrap();
    let last = rows.last().unwrap();
    (fit.slope, last.envelope * last.x.powi(p as i32 + 2))
}

#[test]
fn exponent_does_not_depend_on_n() {
    let cut = build_cutoff(0.5_f64, 1.0, 3).unwrap();
    for p in [0u32, 1] {
        let slopes: Vec<f64> = (1..=3).map(|n| fitted_slope(n, p, &cut).0).collect();
        let spread = slopes.iter().cloned().fold(f64::MIN, f64::max) - slopes.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 0.05, "p={p}: {slopes:?}");
    }
}

#[test]
fn decay_does_not_depend_on_the_cutoff() {
    let a = build_cutoff(0.5_f64, 1.0, 3).unwrap();
    let b = build_cutoff(0.3_f64, 0.8, 2).unwrap();
    for (n, p) in [(1i64, 0u32), (2, 1)] {
        let (sa, ca) = fitted_slope(n, p, &a);
        let (sb, cb) = fitted_slope(n, p, &b);
        assert!((sa - sb).abs() < 0.05);
        assert!((ca - cb).abs() < 0.03 * ca.abs(), "n={n} p={p}: {ca} vs {cb}");
    }
}

#[test]
fn csv_columns() {
    let cut = build_cutoff(0.5_f64, 1.0, 2).unwrap();
    let rows = canonical_wannier_profile(1, 1, &cut, &[60.0, 70.0]).unwrap();
    let text = profile_csv(&rows, 1);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,w_cos,w_sin_im,envelope,x2_envelope,scaled_envelope"));
    let cols: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cols.len(), 6);
    assert!((cols[4] - 3600.0 * cols[3]).abs() < 1e-12 * cols[4].abs());
    assert!((cols[5] - 60.0 * cols[4]).abs() < 1e-12 * cols[5].abs());
}
