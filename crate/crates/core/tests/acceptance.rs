//! Acceptance checks; prints one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use band_vortex::distcurv::{delta_limit_check, RadialTestFunction};
use band_vortex::hermitian2::{op_norm_diff, projector_of};
use band_vortex::models::{
    dirac_point, graphene_lattice, haldane_hamiltonian, minimal_gap, multilayer_section, Band,
    CanonicalModelSpec, HaldaneParams, MomentumPoint, Valley,
};
use band_vortex::pseudospin::{
    berry_phase, great_circle_fit, multilayer_loop, pwn_equals_vorticity, winding_number_adaptive,
    LoopSample, PwnModel,
};
use band_vortex::vorticity::{
    build_cube_mesh, canonical_chern_quadrature, chern_on_cube, haldane_field,
    intertwining_residual, kato_nagy_unitary, plaquette_chern, CanonicalField, ConjugatedField,
    CubeGeometry, ProjectorField, SmoothUnitaryField,
};
use band_vortex::wannier::{
    build_cutoff, canonical_wannier_profile, decay_fit, log_grid, profile_prefactors,
};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.2?}, limit {:.0?}", t, limit))
}

fn canonical(n: i32, band: Band, m: u32) -> CanonicalField<f64> {
    CanonicalField::new(CanonicalModelSpec::new(n, band, m).unwrap())
}

fn canonical_integers() -> Check {
    let start = Instant::now();
    let cube = CubeGeometry::around([0.0; 3], 1.0, 1.0);
    let mut worst = 0.0f64;
    for n in -3..=3 {
        for band in [Band::Plus, Band::Minus] {
            for m in [1, 2] {
                let r = chern_on_cube(&canonical(n, band, m), &cube)
                    .map_err(|e| format!("n={n} m={m}: {e}"))?;
                let expected = (band.sign() * n) as i64;
                ensure(r.vorticity() == expected && r.residue < 0.05, || {
                    format!(
                        "n={n} band={} m={m}: n_v={} residue={}",
                        band.symbol(),
                        r.vorticity(),
                        r.residue
                    )
                })?;
                worst = worst.max(r.residue);
            }
        }
    }
    let eight = build_cube_mesh([0.0; 3], [0.5; 3], 1);
    ensure(eight.vertex_count() == 8, || {
        "coarsest cube must have 8 vertices".into()
    })?;
    for n in [-1, 1] {
        for band in [Band::Plus, Band::Minus] {
            for m in [1, 2] {
                let r =
                    plaquette_chern(&canonical(n, band, m), &eight).map_err(|e| e.to_string())?;
                ensure(
                    r.vorticity() == (band.sign() * n) as i64 && r.residue < 0.05,
                    || format!("8-vertex cube n={n} band={} m={m}: {r:?}", band.symbol()),
                )?;
            }
        }
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!(
        "36 cases, worst residue {worst:.2e}, {:.0?}",
        start.elapsed()
    ))
}

fn analytic_quadrature() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for band in [Band::Plus, Band::Minus] {
            for m in [1, 2] {
                let spec = CanonicalModelSpec::new(n, band, m).unwrap();
                let c = canonical_chern_quadrature(&spec, 1.0, 1.0, 1e-10)
                    .map_err(|e| e.to_string())?;
                let expected = -(band.sign() * n) as f64;
                worst = worst.max((c - expected).abs());
                ensure((c - expected).abs() < 1e-8, || {
                    format!("n={n} m={m}: ch1={c}")
                })?;
            }
        }
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("max error {worst:.1e}, {:.0?}", start.elapsed()))
}

fn pwn_values() -> Check {
    for m in [1u32, 2, 3, 5] {
        for band in [Band::Plus, Band::Minus] {
            let w = winding_number_adaptive(
                |t: f64| {
                    Ok(multilayer_section(
                        m,
                        band,
                        MomentumPoint::from_polar(1.0, t),
                    )?)
                },
                16,
                1e-9,
            )
            .map_err(|e| e.to_string())?;
            ensure(w == m as i64, || format!("m={m}: n_w={w}"))?;
        }
    }
    for m in [1u32, 2] {
        for band in [Band::Plus, Band::Minus] {
            let r = pwn_equals_vorticity(PwnModel::Multilayer { m, band }, 0.5, 0.5)
                .map_err(|e| e.to_string())?;
            ensure(r.equal, || format!("m={m}: n_w={} n_v={}", r.n_w, r.n_v))?;
        }
    }
    Ok("n_w = m for m in {1,2,3,5}; n_w = n_v for m in {1,2}".into())
}

fn gauge_independence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cube = CubeGeometry::around([0.0; 3], 1.0, 1.0);
    let models = [
        (1, Band::Plus),
        (-1, Band::Minus),
        (2, Band::Plus),
        (-2, Band::Plus),
        (3, Band::Minus),
    ];
    let mut worst_residual = 0.0f64;
    let mut worst_distance = 0.0f64;
    for trial in 0..100 {
        let (n, band) = models[trial % models.len()];
        let f = canonical(n, band, 1);
        let reference = chern_on_cube(&f, &cube).map_err(|e| e.to_string())?;
        let mesh = cube.mesh(reference.refinement_level + 1);
        let u = SmoothUnitaryField::random(&mut rng, 1.1, [0.5, 0.5, 0.5], 2.0);
        let g = ConjugatedField {
            inner: &f,
            unitary: |x: [f64; 3]| u.unitary(x),
        };
        for &x in &mesh.vertices {
            let p = f.projector(x).map_err(|e| e.to_string())?;
            let q = projector_of(&g.eigenvector(x).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let d = op_norm_diff(&p, &q);
            worst_distance = worst_distance.max(d);
            ensure(d <= 0.9, || format!("trial {trial}: distance {d}"))?;
            let w = kato_nagy_unitary(&p, &q).map_err(|e| e.to_string())?;
            worst_residual = worst_residual.max(intertwining_residual(&w, &p, &q));
        }
        let a = plaquette_chern(&f, &mesh).map_err(|e| e.to_string())?;
        let b = plaquette_chern(&g, &mesh).map_err(|e| e.to_string())?;
        ensure(
            a.integer == b.integer && a.integer == reference.integer,
            || format!("trial {trial}: {} vs {}", a.integer, b.integer),
        )?;
    }
    ensure(worst_residual < 1e-9, || {
        format!("Kato-Nagy residual {worst_residual:e}")
    })?;
    Ok(format!(
        "100 trials, max distance {worst_distance:.3}, max residual {worst_residual:.1e}"
    ))
}

fn berry_phase_consistency() -> Check {
    let mut worst = 0.0f64;
    for m in [1u32, 2, 3] {
        for band in [Band::Plus, Band::Minus] {
            let n_w = m as i64;
            let target = Complex::from_polar(1.0, -PI * n_w as f64);
            let mut n = 64;
            let mut previous: Option<Complex<f64>> = None;
            let h = loop {
                let lp = multilayer_loop::<f64>(m, band, n).map_err(|e| e.to_string())?;
                let h = berry_phase(&lp).map_err(|e| e.to_string())?;
                if let Some(p) = previous {
                    if (h - p).norm() < 1e-9 {
                        break h;
                    }
                }
                ensure(n < 1 << 16, || format!("m={m}: holonomy did not settle"))?;
                previous = Some(h);
                n *= 2;
            };
            let err = (h / target).arg().abs();
            worst = worst.max(err);
            ensure(err < 1e-6, || format!("m={m}: holonomy {h} vs {target}"))?;
        }
    }
    Ok(format!("max phase error {worst:.1e}"))
}

fn haldane() -> Check {
    let params = HaldaneParams::critical(1.0, 0.25, PI / 8.0);
    let (a1, a2) = graphene_lattice::<f64>();
    let kp = dirac_point(Valley::KPrime, a1, a2).map_err(|e| e.to_string())?;
    let gap = minimal_gap(|k| haldane_hamiltonian(&params, k), kp, 0.05, 16, 12);
    ensure(gap.gap < 1e-8, || format!("minimal gap {:e}", gap.gap))?;
    let k = dirac_point(Valley::K, a1, a2).map_err(|e| e.to_string())?;
    let gap_k = minimal_gap(|q| haldane_hamiltonian(&params, q), k, 0.05, 16, 12);
    ensure(gap_k.gap > 0.1, || {
        format!("K stays gapped, got {:e}", gap_k.gap)
    })?;

    let f = haldane_field(params, Valley::KPrime, Band::Plus);
    let mut rms = Vec::new();
    for n in [256, 512, 1024] {
        let lp = LoopSample::around(&f, [kp.q1, kp.q2], 0.05, 0.0, n).map_err(|e| e.to_string())?;
        rms.push(
            great_circle_fit(&lp.sphere_points())
                .map_err(|e| e.to_string())?
                .rms_deviation,
        );
    }
    ensure(rms.iter().all(|&r| r > 1e-6), || format!("rms {rms:?}"))?;
    ensure(
        rms.windows(2).all(|w| ((w[1] - w[0]) / w[0]).abs() < 0.1),
        || format!("rms unstable {rms:?}"),
    )?;

    let near = HaldaneParams {
        t1: 1.0,
        t2: 0.25,
        phi: 0.01,
        mass: 0.01,
    };
    let crossing_mu = -near.dirac_mass(Valley::K);
    let g = haldane_field(near, Valley::K, Band::Plus);
    let cube = CubeGeometry::around([k.q1, k.q2, crossing_mu], 0.4, 0.4);
    let v = chern_on_cube(&g, &cube)
        .map_err(|e| e.to_string())?
        .vorticity();
    ensure(v.abs() == 1, || format!("upper band vorticity {v}"))?;
    Ok(format!(
        "gap {:.1e} at K', rms {:.3e}, |n_v| = 1 near (M, phi) = (0, 0)",
        gap.gap, rms[2]
    ))
}

fn wannier_decay() -> Check {
    let start = Instant::now();
    let cut = build_cutoff(0.5, 1.0, 3).map_err(|e| e.to_string())?;
    let xs = log_grid(50.0, 500.0, 24);
    let mut summary = Vec::new();
    for (p, rate, tol) in [(0u32, -2.0, 0.10), (1, -3.0, 0.15)] {
        for n in [1i64, 2] {
            let rows = canonical_wannier_profile(n, p, &cut, &xs).map_err(|e| e.to_string())?;
            let env: Vec<f64> = rows.iter().map(|r| r.envelope).collect();
            let fit = decay_fit(&xs, &env, (50.0, 500.0)).map_err(|e| e.to_string())?;
            ensure((fit.slope - rate).abs() <= tol, || {
                format!("n={n} p={p}: slope {}", fit.slope)
            })?;
            let (c, s) = profile_prefactors::<f64>(n, p);
            let limit = c.hypot(s);
            let last = rows.last().unwrap();
            let scaled = last.envelope * last.x.powi(p as i32 + 2);
            ensure((scaled - limit).abs() < 0.03 * limit, || {
                format!("n={n} p={p}: x^(p+2) envelope {scaled} vs {limit}")
            })?;
            summary.push(format!("n={n},p={p}: {:.3}", fit.slope));
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("slopes {}", summary.join(", ")))
}

fn delta_limit() -> Check {
    let f = RadialTestFunction::default_bump(0.3, 0.9).map_err(|e| e.to_string())?;
    let mus = [0.1, 0.05, 0.025, 0.0125, 0.00625];
    let mut worst = 0.0f64;
    for n in [1, 2] {
        for band in [Band::Plus, Band::Minus] {
            let rep = delta_limit_check(n, band, &f, &mus).map_err(|e| e.to_string())?;
            let rel = rep.deviation / rep.expected.abs();
            worst = worst.max(rel);
            ensure(rel < 0.02, || {
                format!(
                    "n={n} band={}: limit {} expected {}",
                    band.symbol(),
                    rep.limit,
                    rep.expected
                )
            })?;
            let order = rep.order.ok_or("no order estimate")?;
            ensure((order - 1.0).abs() < 0.25, || {
                format!("n={n}: order {order}")
            })?;
        }
    }
    Ok(format!("max relative deviation {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("canonical vorticity integers", canonical_integers),
        ("analytic curvature quadrature", analytic_quadrature),
        ("pseudospin winding numbers", pwn_values),
        ("gauge and deformation independence", gauge_independence),
        ("Berry phase of equatorial loops", berry_phase_consistency),
        ("Haldane critical point", haldane),
        ("canonical Wannier decay", wannier_decay),
        ("distributional delta limit", delta_limit),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
