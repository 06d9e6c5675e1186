//! One function per subcommand; each returns the `result` object.

use std::f64::consts::PI;
use std::fs;

use anyhow::Context;
use band_vortex::distcurv::{delta_limit_check, DistError, RadialTestFunction, MIN_MU_SEQUENCE};
use band_vortex::hermitian2::{eig2, op_norm_diff, projector_of, HermitianMatrix2, UnitVector2};
use band_vortex::models::{
    canonical_hamiltonian, dirac_point, graphene_lattice, haldane_hamiltonian, mass_term,
    monolayer_fullzone, multilayer_deformed, Band, CanonicalModelSpec, HaldaneParams,
    MomentumPoint, Valley,
};
use band_vortex::pseudospin::{
    berry_phase, equator_check, great_circle_fit, loop_trace_csv, pwn_vs_vorticity,
    winding_number_adaptive, LoopSample, PseudospinError,
};
use band_vortex::vorticity::{
    canonical_chern_quadrature, chern_on_cube, export_mesh, haldane_field, intertwining_residual,
    kato_nagy_unitary, monolayer_field, multilayer_field, plaquette_chern, CanonicalField,
    ConjugatedField, CubeGeometry, FieldError, FnField, ProjectorField, SmoothUnitaryField,
};
use band_vortex::wannier::{
    build_cutoff, canonical_wannier_profile, decay_fit, log_grid, profile_csv, profile_prefactors,
    MAX_ORDER,
};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::Settings;
use crate::report::num;
use crate::Failure;

type Field = Box<dyn ProjectorField<f64> + Send>;
type HamiltonianFn = Box<dyn Fn(MomentumPoint<f64>, f64) -> HermitianMatrix2<f64>>;

/// Great-circle rms above which a Haldane loop counts as off a great circle.
const GREAT_CIRCLE_RMS_LIMIT: f64 = 1e-6;

fn write_file(path: &str, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .with_context(|| format!("writing {path}"))
        .map_err(Failure::Io)
}

fn haldane_params(s: &Settings) -> Result<HaldaneParams<f64>, Failure> {
    let t1 = s.f64("t1", 1.0)?;
    let t2 = s.f64("t2", 0.25)?;
    let phi = s.f64("phi", PI / 8.0)?;
    let default_mass = 3.0 * 3f64.sqrt() * t2 * phi.sin();
    let mass = s.f64("M", default_mass)?;
    Ok(HaldaneParams { t1, t2, phi, mass })
}

/// Valley whose Dirac mass is smallest unless one is given.
fn haldane_valley(s: &Settings, p: &HaldaneParams<f64>) -> Result<Valley, Failure> {
    let closest = if p.dirac_mass(Valley::K).abs() <= p.dirac_mass(Valley::KPrime).abs() {
        "K"
    } else {
        "K'"
    };
    s.parsed("valley", closest)
}

fn canonical_spec(s: &Settings) -> Result<CanonicalModelSpec, Failure> {
    let n: i32 = s.int("n", 1)?;
    let band: Band = s.parsed("band", "+")?;
    let m: u32 = s.int("m", 1)?;
    CanonicalModelSpec::new(n, band, m).map_err(|e| s.invalid("m", e))
}

/// Field, the point its surfaces are centred on, and the default radius.
fn build_field(s: &Settings, model: &str) -> Result<(Field, [f64; 3], f64), Failure> {
    Ok(match model {
        "canonical" => (
            Box::new(CanonicalField::new(canonical_spec(s)?)),
            [0.0; 3],
            1.0,
        ),
        "multilayer" => {
            let m: u32 = s.int("m", 1)?;
            if m == 0 {
                return Err(s.invalid("m", "layer count must be at least 1"));
            }
            let band: Band = s.parsed("band", "+")?;
            (Box::new(multilayer_field(m, band)), [0.0; 3], 1.0)
        }
        "monolayer" => {
            let valley: Valley = s.parsed("valley", "K")?;
            let band: Band = s.parsed("band", "+")?;
            let f = monolayer_field(valley, band);
            let c = f.singular_point();
            (Box::new(f), c, 0.2)
        }
        "haldane" => {
            let p = haldane_params(s)?;
            let valley = haldane_valley(s, &p)?;
            let band: Band = s.parsed("band", "+")?;
            let f = haldane_field(p, valley, band);
            let k = f.singular_point();
            (Box::new(f), [k[0], k[1], -p.dirac_mass(valley)], 0.2)
        }
        other => return Err(s.invalid("model", format!("`{other}` has no projector field here"))),
    })
}

pub fn vorticity(s: &Settings) -> Result<Value, Failure> {
    let model = s.choice(
        "model",
        "canonical",
        &["canonical", "multilayer", "monolayer", "haldane"],
    )?;
    let (field, center, default_radius) = build_field(s, &model)?;
    let radius = s.positive("radius", default_radius)?;
    let mu_max = s.positive("mu_max", radius)?;
    let mut cube = CubeGeometry::around(center, radius, mu_max);
    cube.subdivisions = s.count("subdivisions", 1)?.max(1);
    cube.max_refinements = s.count("max_refinements", 6)?;
    let trials = s.count("gauge_trials", 0)?;
    let seed: u32 = s.int("seed", 0)?;
    let max_angle = s.positive("max_angle", 1.1)?;
    let tol = s.positive("tolerance", 1e-10)?;
    let mesh_out = s.path("mesh_out");

    let chern = chern_on_cube(&field, &cube).map_err(Failure::numerical)?;
    let mut result = json!({
        "model": model,
        "deformation": field.deformation(),
        "center": center,
        "n_v": chern.vorticity(),
        "ch1": chern.integer,
        "raw_flux": chern.raw,
        "residue": chern.residue,
        "refinement_level": chern.refinement_level,
        "faces": chern.faces,
    });
    if let Some(spec) = model
        .eq("canonical")
        .then(|| canonical_spec(s))
        .transpose()?
    {
        let ch1 =
            canonical_chern_quadrature(&spec, radius, mu_max, tol).map_err(Failure::numerical)?;
        result["expected_n_v"] = json!(spec.band.sign() * spec.n);
        result["analytic_ch1"] = num(ch1);
    }
    let mesh = cube.mesh(chern.refinement_level + 1);
    if trials > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let scale = [radius / 2.0, radius / 2.0, mu_max / 2.0];
        let (mut unchanged, mut worst_distance, mut worst_residual) = (0usize, 0.0f64, 0.0f64);
        for _ in 0..trials {
            let u = SmoothUnitaryField::random(&mut rng, max_angle, scale, 2.0);
            let g = ConjugatedField {
                inner: &field,
                unitary: |x: [f64; 3]| u.unitary(x),
            };
            for &x in &mesh.vertices {
                let p = field.projector(x).map_err(Failure::numerical)?;
                let q = g.projector(x).map_err(Failure::numerical)?;
                worst_distance = worst_distance.max(op_norm_diff(&p, &q));
                let w = kato_nagy_unitary(&p, &q).map_err(Failure::numerical)?;
                worst_residual = worst_residual.max(intertwining_residual(&w, &p, &q));
            }
            let c = plaquette_chern(&g, &mesh).map_err(Failure::numerical)?;
            unchanged += usize::from(c.integer == chern.integer);
        }
        result["gauge_sweep"] = json!({
            "trials": trials,
            "unchanged": unchanged,
            "max_projector_distance": worst_distance,
            "max_kato_nagy_residual": worst_residual,
        });
    }
    if let Some(path) = mesh_out {
        let export = export_mesh(&field, &mesh).map_err(Failure::numerical)?;
        let text = serde_json::to_string(&crate::report::normalize(json!(export)))
            .expect("mesh serializes");
        write_file(&path, &(text + "\n"))?;
    }
    Ok(result)
}

fn constant_field() -> FnField<impl Fn([f64; 3]) -> Result<UnitVector2<f64>, FieldError> + Sync, f64>
{
    let h = std::f64::consts::FRAC_1_SQRT_2;
    FnField {
        f: move |_| {
            Ok(UnitVector2::new(Complex::new(h, 0.0), Complex::new(h, 0.0)).expect("unit vector"))
        },
        singular: [0.0; 3],
        label: "constant section (1, 1)/sqrt(2)".into(),
    }
}

fn loop_diagnostics(lp: &LoopSample<f64>, n_w: Option<i64>) -> Result<Value, Failure> {
    let eq = equator_check(lp, 1e-9);
    let fit = match great_circle_fit(&lp.sphere_points()) {
        Ok(fit) => Some(fit),
        // A loop collapsed to a point lies on every great circle through it.
        Err(PseudospinError::DegenerateCloud) => None,
        Err(e) => return Err(Failure::numerical(e)),
    };
    let h = berry_phase(lp).map_err(Failure::numerical)?;
    let mut v = json!({
        "samples": lp.len(),
        "equator_max_deviation": eq.max_deviation,
        "on_equator": eq.passes,
        "great_circle_rms": fit.map(|f| f.rms_deviation),
        "great_circle_normal": fit.map(|f| f.normal),
        "berry_phase": h.arg(),
    });
    if let Some(n) = n_w {
        let target = Complex::from_polar(1.0, -PI * n as f64);
        v["holonomy_phase_error"] = num((h / target).arg().abs());
    }
    Ok(v)
}

fn loop_around(
    field: &dyn ProjectorField<f64>,
    center: [f64; 3],
    radius: f64,
    n: usize,
) -> Result<LoopSample<f64>, Failure> {
    LoopSample::around(&field, [center[0], center[1]], radius, center[2], n)
        .map_err(Failure::numerical)
}

pub fn pwn(s: &Settings) -> Result<Value, Failure> {
    let model = s.choice(
        "model",
        "multilayer",
        &[
            "canonical",
            "multilayer",
            "monolayer",
            "haldane",
            "constant",
        ],
    )?;
    let samples = s.count("samples", 512)?;
    if samples < 8 {
        return Err(s.invalid("samples", "need at least 8"));
    }
    let trace_out = s.path("trace_out");
    let (result, lp) = match model.as_str() {
        "constant" => {
            let radius = s.positive("radius", 0.5)?;
            let mu_max = s.positive("mu_max", radius)?;
            let f = constant_field();
            let n_w = winding_number_adaptive(
                |t: f64| f.eigenvector([radius * t.cos(), radius * t.sin(), 0.0]),
                64,
                1e-9,
            )
            .map_err(Failure::numerical)?;
            let chern = chern_on_cube(
                &f,
                &CubeGeometry::around([0.0; 3], 2.0 * radius, 2.0 * mu_max),
            )
            .map_err(Failure::numerical)?;
            let lp = loop_around(&f, [0.0; 3], radius, samples)?;
            let diag = loop_diagnostics(&lp, Some(n_w))?;
            let v = json!({
                "model": model,
                "deformation": f.label,
                "n_w": n_w,
                "n_v": chern.vorticity(),
                "equal": n_w == chern.vorticity(),
                "loop": diag,
            });
            (v, lp)
        }
        "haldane" => haldane_pwn(s, samples)?,
        _ => {
            let (field, center, default_radius) = build_field(s, &model)?;
            let radius = s.positive("radius", default_radius / 2.0)?;
            let mu_max = s.positive("mu_max", radius)?;
            let rep = pwn_vs_vorticity(&field, radius, mu_max).map_err(Failure::numerical)?;
            let lp = LoopSample::around(&field, [center[0], center[1]], radius, 0.0, samples)
                .map_err(Failure::numerical)?
                .in_basis(rep.north);
            let diag = loop_diagnostics(&lp, Some(rep.n_w))?;
            let v = json!({
                "model": model,
                "deformation": rep.deformation,
                "n_w": rep.n_w,
                "n_v": rep.n_v,
                "equal": rep.equal,
                "north": rep.north,
                "hemisphericity": rep.hemisphericity,
                "loop": diag,
            });
            (v, lp)
        }
    };
    if let Some(path) = trace_out {
        write_file(&path, &loop_trace_csv(&lp))?;
    }
    Ok(result)
}

fn haldane_pwn(s: &Settings, samples: usize) -> Result<(Value, LoopSample<f64>), Failure> {
    let p = haldane_params(s)?;
    let valley = haldane_valley(s, &p)?;
    let band: Band = s.parsed("band", "+")?;
    let radius = s.positive("radius", 0.05)?;
    let field = haldane_field(p, valley, band);
    let k = field.singular_point();
    let lp = loop_around(&field, k, radius, samples)?;
    let doubled = loop_around(&field, k, radius, 2 * samples)?;
    let rms = great_circle_fit(&lp.sphere_points())
        .map_err(Failure::numerical)?
        .rms_deviation;
    let rms_doubled = great_circle_fit(&doubled.sphere_points())
        .map_err(Failure::numerical)?
        .rms_deviation;
    let off_circle = rms > GREAT_CIRCLE_RMS_LIMIT;
    let winding = winding_number_adaptive(
        |t: f64| field.eigenvector([k[0] + radius * t.cos(), k[1] + radius * t.sin(), 0.0]),
        64,
        1e-9,
    );
    let (n_w, winding_error) = match winding {
        Ok(w) => (Some(w), None),
        Err(e @ PseudospinError::AssumptionViolated { .. }) => (None, Some(e.to_string())),
        Err(e @ PseudospinError::NonIntegerWinding { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(Failure::numerical(e)),
    };
    let ill_defined = off_circle || n_w.is_none();
    let v = json!({
        "model": "haldane",
        "deformation": field.deformation(),
        "valley": valley,
        "dirac_mass": p.dirac_mass(valley),
        "n_w": n_w,
        "winding_error": winding_error,
        "great_circle_rms": rms,
        "great_circle_rms_doubled": rms_doubled,
        "pwn_well_defined": !ill_defined,
        "flag": if ill_defined { Value::from("PWN ill-defined") } else { Value::Null },
        "loop": loop_diagnostics(&lp, None)?,
    });
    Ok((v, lp))
}

pub fn wannier(s: &Settings) -> Result<Value, Failure> {
    let n: i32 = s.int("n", 1)?;
    if n == 0 {
        return Err(s.invalid("n", "the n = 0 model has no singular eigenvector"));
    }
    let p: u32 = s.int("p", 0)?;
    if n.unsigned_abs() + p > MAX_ORDER {
        return Err(s.invalid("p", format!("|n| + p must not exceed {MAX_ORDER}")));
    }
    let rho = s.positive("rho", 0.5)?;
    let r = s.positive("r", 1.0)?;
    if rho >= r {
        return Err(s.invalid("rho", format!("must be smaller than r = {r}")));
    }
    let cutoff_p = s.count("cutoff_p", 3)?;
    let cut = build_cutoff(rho, r, cutoff_p).map_err(|e| s.invalid("cutoff_p", e))?;
    let x_min = s.positive("x_min", 50.0)?;
    let x_max = s.positive("x_max", 500.0)?;
    if x_max <= x_min {
        return Err(s.invalid("x_max", format!("must exceed x_min = {x_min}")));
    }
    let points = s.count("points", 24)?;
    if points < 8 {
        return Err(s.invalid("points", "need at least 8"));
    }
    let fit_min = s.positive("fit_min", x_min)?;
    let fit_max = s.positive("fit_max", x_max)?;
    let csv = s.path("csv");

    let xs = log_grid(x_min, x_max, points);
    let rows = canonical_wannier_profile(n as i64, p, &cut, &xs).map_err(Failure::numerical)?;
    let env: Vec<f64> = rows.iter().map(|r| r.envelope).collect();
    let fit = decay_fit(&xs, &env, (fit_min, fit_max)).map_err(Failure::numerical)?;
    let (c, sn) = profile_prefactors::<f64>(n as i64, p);
    let limit = c.hypot(sn);
    let last = rows.last().expect("at least 8 rows");
    let scaled = last.envelope * last.x.powi(p as i32 + 2);
    if let Some(path) = csv {
        write_file(&path, &profile_csv(&rows, p))?;
    }
    Ok(json!({
        "n": n,
        "p": p,
        "cutoff_coefficients": cut.coeffs,
        "fit": fit,
        "expected_slope": -(p as f64) - 2.0,
        "prefactor_cos": c,
        "prefactor_sin": sn,
        "envelope_limit": limit,
        "scaled_envelope_at_x_max": scaled,
        "relative_deviation": if limit > 0.0 { num((scaled - limit).abs() / limit) } else { Value::Null },
    }))
}

pub fn delta(s: &Settings) -> Result<Value, Failure> {
    let n: i32 = s.int("n", 1)?;
    let band: Band = s.parsed("band", "+")?;
    let kind = s.choice("test_function", "bump", &["bump", "annular"])?;
    let f_rho = s.positive("f_rho", 0.3)?;
    let f_r = s.positive("f_r", 0.9)?;
    let f = match kind.as_str() {
        "bump" => {
            let height = s.f64("height", 1.0)?;
            RadialTestFunction::smoothstep(height, f_rho, f_r, 2)
        }
        _ => {
            let ring_rho = s.positive("ring_rho", 0.1)?;
            let ring_r = s.positive("ring_r", 0.2)?;
            RadialTestFunction::annular((ring_rho, ring_r), (f_rho, f_r), 2)
        }
    }
    .map_err(|e| s.invalid("test_function", e))?;
    let mus = s.f64_list("mu_sequence", &[0.1, 0.05, 0.025, 0.0125, 0.00625])?;
    if mus.len() < MIN_MU_SEQUENCE {
        return Err(s.invalid(
            "mu_sequence",
            format!("need at least {MIN_MU_SEQUENCE} values"),
        ));
    }
    match delta_limit_check(n, band, &f, &mus) {
        Ok(rep) => Ok(json!(rep)),
        Err(e @ DistError::SequenceNotDecreasing { .. }) => Err(s.invalid("mu_sequence", e)),
        Err(e) => Err(Failure::numerical(e)),
    }
}

pub fn dump_model(s: &Settings) -> Result<Value, Failure> {
    let model = s.choice(
        "model",
        "canonical",
        &["canonical", "multilayer", "monolayer", "haldane"],
    )?;
    let band: Band = s.parsed("band", "+")?;
    let (a1, a2) = graphene_lattice::<f64>();
    let (hamiltonian, center, default_radius): (HamiltonianFn, [f64; 2], f64) = match model.as_str()
    {
        "canonical" => {
            let spec = canonical_spec(s)?;
            (
                Box::new(move |q, mu| canonical_hamiltonian(&spec, q, mu).matrix),
                [0.0; 2],
                0.5,
            )
        }
        "multilayer" => {
            let m: u32 = s.int("m", 1)?;
            (
                Box::new(move |q, mu| multilayer_deformed(m, q, mu).matrix),
                [0.0; 2],
                0.5,
            )
        }
        "monolayer" => {
            let valley: Valley = s.parsed("valley", "K")?;
            let k = dirac_point(valley, a1, a2).expect("graphene lattice");
            (
                Box::new(move |q, mu| {
                    monolayer_fullzone(q, a1, a2).expect("graphene lattice") + mass_term(mu)
                }),
                [k.q1, k.q2],
                0.05,
            )
        }
        _ => {
            let p = haldane_params(s)?;
            let valley = haldane_valley(s, &p)?;
            let k = dirac_point(valley, a1, a2).expect("graphene lattice");
            (
                Box::new(move |q, mu| {
                    haldane_hamiltonian(
                        &HaldaneParams {
                            mass: p.mass + mu,
                            ..p
                        },
                        q,
                    )
                }),
                [k.q1, k.q2],
                0.05,
            )
        }
    };
    let radius = s.positive("radius", default_radius)?;
    let mu = s.f64("mu", 0.0)?;
    let samples = s.count("samples", 16)?;
    if samples == 0 {
        return Err(s.invalid("samples", "need at least one sample"));
    }
    let points: Vec<Value> = (0..samples)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / samples as f64;
            let q = MomentumPoint::new(center[0] + radius * t.cos(), center[1] + radius * t.sin());
            let h = hamiltonian(q, mu);
            let e = eig2(&h);
            let v = match band {
                Band::Plus => e.v_plus,
                Band::Minus => e.v_minus,
            };
            let bloch = projector_of(&v).expect("normalized").bloch_vector();
            json!({
                "theta": t,
                "k": [q.q1, q.q2],
                "pauli": h.pauli(),
                "e_minus": e.e_minus,
                "e_plus": e.e_plus,
                "degenerate": e.degenerate,
                "eigenvector": [v.c1.re, v.c1.im, v.c2.re, v.c2.im],
                "bloch": bloch,
            })
        })
        .collect();
    Ok(json!({ "model": model, "band": band, "center": center, "points": points }))
}
