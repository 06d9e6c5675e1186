//! Pseudospin winding, the Bloch-sphere map, great-circle diagnostics,
//! Berry holonomy and hemispherical classification of deformed fields.

use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hermitian2::{projector_of, RankOneProjector, UnitVector2};
use crate::models::{multilayer_section, Band, CanonicalModelSpec, MomentumPoint};
use crate::scalar::Real;
use crate::vorticity::{
    chern_on_cube, multilayer_field, CanonicalField, CubeGeometry, FieldError, ProjectorField,
    VorticityError,
};

/// Largest accepted distance of a winding from an integer.
pub const WINDING_TOLERANCE: f64 = 0.05;
/// Sample cap for adaptive loops.
pub const MAX_LOOP_SAMPLES: usize = 1 << 16;
/// Width of the polar caps excluded from the equatorial tube.
pub const POLE_MARGIN: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PseudospinError {
    #[error("a section component vanishes at sample {index} (theta = {theta})")]
    AssumptionViolated { index: usize, theta: f64 },
    #[error("winding {raw} is not within tolerance of an integer")]
    NonIntegerWinding { raw: f64 },
    #[error("phase increments stay above pi/2 with {samples} samples")]
    Undersampled { samples: usize },
    #[error("points do not span a plane")]
    DegenerateCloud,
    #[error("consecutive samples {index} and {next} are orthogonal")]
    ZeroOverlap { index: usize, next: usize },
    #[error("a loop needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("field evaluation failed at theta = {theta}: {source}")]
    Field {
        theta: f64,
        #[source]
        source: FieldError,
    },
    #[error("field evaluation failed at {point:?}: {source}")]
    FieldAt {
        point: [f64; 3],
        #[source]
        source: FieldError,
    },
    #[error(transparent)]
    Vorticity(#[from] VorticityError),
}

/// Section sampled at `θ_j = 2πj/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSample<T> {
    pub theta: Vec<T>,
    pub values: Vec<UnitVector2<T>>,
}

impl<T: Real> LoopSample<T> {
    pub fn from_fn<F>(n_samples: usize, section: F) -> Result<Self, PseudospinError>
    where
        F: Fn(T) -> Result<UnitVector2<T>, FieldError> + Sync,
    {
        if n_samples < 8 {
            return Err(PseudospinError::TooFewSamples {
                min: 8,
                got: n_samples,
            });
        }
        let theta: Vec<T> = (0..n_samples)
            .map(|j| T::TAU() * T::int(j as i64) / T::int(n_samples as i64))
            .collect();
        let values = theta
            .par_iter()
            .map(|&t| {
                section(t).map_err(|source| PseudospinError::Field {
                    theta: t.to_f64_lossy(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { theta, values })
    }

    /// Circle of radius `radius` around `center` at fixed `mu`.
    pub fn around<F: ProjectorField<T>>(
        field: &F,
        center: [T; 2],
        radius: T,
        mu: T,
        n_samples: usize,
    ) -> Result<Self, PseudospinError> {
        Self::from_fn(n_samples, |t| {
            let (s, c) = t.sin_cos();
            field.eigenvector([center[0] + radius * c, center[1] + radius * s, mu])
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The same loop expressed in the basis `{a, a⊥}`, where `a` is the
    /// state with Bloch vector `north`.
    pub fn in_basis(&self, north: [T; 3]) -> Self {
        let a = RankOneProjector::from_bloch_vector(north).range_vector();
        let b = a.orthogonal();
        Self {
            theta: self.theta.clone(),
            values: self
                .values
                .iter()
                .map(|v| UnitVector2 {
                    c1: a.inner(v),
                    c2: b.inner(v),
                })
                .collect(),
        }
    }

    pub fn sphere_points(&self) -> Vec<SpherePoint<T>> {
        self.values
            .iter()
            .map(|v| bloch_sphere_map(&projector_of(v).expect("normalized")))
            .collect()
    }
}

fn check_components<T: Real>(lp: &LoopSample<T>, tol: T) -> Result<(), PseudospinError> {
    for (i, v) in lp.values.iter().enumerate() {
        if !(v.c1.norm().min(v.c2.norm()) > tol) {
            return Err(PseudospinError::AssumptionViolated {
                index: i,
                theta: lp.theta[i].to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Principal phase increments of `g = ψ2/ψ1` between consecutive samples,
/// including the closing step.
fn increments<T: Real>(lp: &LoopSample<T>) -> Vec<T> {
    let n = lp.len();
    (0..n)
        .map(|j| {
            let a = &lp.values[j];
            let b = &lp.values[(j + 1) % n];
            // g_b·conj(g_a) ∝ ψ2_b·conj(ψ1_b)·conj(ψ2_a)·ψ1_a
            let z = b.c2 * b.c1.conj() * (a.c2 * a.c1.conj()).conj();
            z.im.atan2(z.re)
        })
        .collect()
}

/// Degree of `θ ↦ g(θ) = ψ2/ψ1` on a fixed sampling.
pub fn winding_number<T: Real>(
    lp: &LoopSample<T>,
    tol_component: T,
) -> Result<i64, PseudospinError> {
    check_components(lp, tol_component)?;
    let inc = increments(lp);
    let half_pi = T::FRAC_PI_2();
    if inc.iter().any(|d| !(d.abs() < half_pi)) {
        return Err(PseudospinError::Undersampled { samples: lp.len() });
    }
    let raw = (inc.iter().fold(T::zero(), |a, &d| a + d) / T::TAU()).to_f64_lossy();
    let w = raw.round();
    if (raw - w).abs() > WINDING_TOLERANCE {
        return Err(PseudospinError::NonIntegerWinding { raw });
    }
    Ok(w as i64)
}

/// Winding with the sampling doubled from `n_start` until every phase
/// increment is below `π/2` on two consecutive samplings that agree (a
/// single sampling can alias a fast winding onto a slow one).
pub fn winding_number_adaptive<T: Real, F>(
    section: F,
    n_start: usize,
    tol_component: T,
) -> Result<i64, PseudospinError>
where
    F: Fn(T) -> Result<UnitVector2<T>, FieldError> + Sync,
{
    let mut n = n_start.max(8);
    let mut previous = None;
    let mut last_raw = f64::NAN;
    while n <= MAX_LOOP_SAMPLES {
        let lp = LoopSample::from_fn(n, &section)?;
        match winding_number(&lp, tol_component) {
            Ok(w) => {
                if previous == Some(w) {
                    return Ok(w);
                }
                previous = Some(w);
            }
            Err(PseudospinError::Undersampled { .. }) => {
                previous = None;
                last_raw = (increments(&lp).iter().fold(T::zero(), |a, &d| a + d) / T::TAU())
                    .to_f64_lossy();
            }
            Err(e) => return Err(e),
        }
        n *= 2;
    }
    Err(PseudospinError::NonIntegerWinding { raw: last_raw })
}

/// Unit Bloch vector; `e1 ↦ (0,0,1)` (North), `e2 ↦ (0,0,−1)` (South).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePoint<T> {
    pub n: [T; 3],
}

impl<T: Real> SpherePoint<T> {
    pub fn dot(&self, axis: [T; 3]) -> T {
        self.n[0] * axis[0] + self.n[1] * axis[1] + self.n[2] * axis[2]
    }
}

/// `(2 Re P12, −2 Im P12, P11 − P22)`.
pub fn bloch_sphere_map<T: Real>(p: &RankOneProjector<T>) -> SpherePoint<T> {
    SpherePoint {
        n: p.bloch_vector(),
    }
}

/// Stereographic coordinate `ζ = ψ1/ψ2`; `None` at the North pole.
pub fn stereographic<T: Real>(v: &UnitVector2<T>) -> Option<Complex<T>> {
    if v.c2.norm() == T::zero() {
        None
    } else {
        Some(v.c1 / v.c2)
    }
}

/// Inverse of [`stereographic`] composed with the Bloch map.
pub fn sphere_from_stereographic<T: Real>(zeta: Complex<T>) -> SpherePoint<T> {
    let m = zeta.norm_sqr();
    let d = T::one() + m;
    let two = T::lit(2.0);
    SpherePoint {
        n: [two * zeta.re / d, -two * zeta.im / d, (m - T::one()) / d],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquatorReport {
    pub max_deviation: f64,
    pub passes: bool,
    pub tol: f64,
}

/// Checks `|ψ1| = |ψ2|` on every sample.
pub fn equator_check<T: Real>(lp: &LoopSample<T>, tol: f64) -> EquatorReport {
    let max_deviation = lp
        .values
        .iter()
        .map(|v| (v.c1.norm() - v.c2.norm()).abs().to_f64_lossy())
        .fold(0.0, f64::max);
    EquatorReport {
        max_deviation,
        passes: max_deviation < tol,
        tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreatCircleFit<T> {
    pub normal: [T; 3],
    /// Root mean square of the angular distance to the fitted great circle.
    pub rms_deviation: T,
}

/// Eigenvalues of a symmetric 3×3 matrix, ascending, by the trigonometric
/// solution of the characteristic cubic.
fn symmetric_eigenvalues<T: Real>(m: &[[T; 3]; 3]) -> [T; 3] {
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    if p1 == T::zero() {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        return d;
    }
    let three = T::lit(3.0);
    let q = (m[0][0] + m[1][1] + m[2][2]) / three;
    let p2 =
        (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + T::lit(2.0) * p1;
    let p = (p2 / T::lit(6.0)).sqrt();
    let b = |i: usize, j: usize| (m[i][j] - if i == j { q } else { T::zero() }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
        - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (det * T::lit(0.5)).max(-T::one()).min(T::one());
    let phi = r.acos() / three;
    let two = T::lit(2.0);
    let largest = q + two * p * phi.cos();
    let smallest = q + two * p * (phi + T::TAU() / three).cos();
    let middle = three * q - largest - smallest;
    [smallest, middle, largest]
}

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3<T: Real>(a: [T; 3]) -> T {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Unit vector with the largest component made positive.
fn canonical_direction<T: Real>(v: [T; 3]) -> [T; 3] {
    let len = norm3(v);
    let mut u = v.map(|c| c / len);
    let big = (0..3).fold(0, |k, i| if u[i].abs() > u[k].abs() { i } else { k });
    if u[big] < T::zero() {
        u = u.map(|c| -c);
    }
    u
}

/// Plane through the origin closest to the points, via the smallest
/// principal axis of the second-moment matrix.
pub fn great_circle_fit<T: Real>(
    points: &[SpherePoint<T>],
) -> Result<GreatCircleFit<T>, PseudospinError> {
    if points.len() < 3 {
        return Err(PseudospinError::DegenerateCloud);
    }
    let count = T::int(points.len() as i64);
    let mut m = [[T::zero(); 3]; 3];
    for p in points {
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += p.n[i] * p.n[j];
            }
        }
    }
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x /= count;
        }
    }
    let ev = symmetric_eigenvalues(&m);
    if !(ev[1] > T::lit(1e-12)) {
        return Err(PseudospinError::DegenerateCloud);
    }
    let lambda = ev[0];
    let rows =
        [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[i][j] - if i == j { lambda } else { T::zero() }));
    let candidates = [
        cross(rows[0], rows[1]),
        cross(rows[0], rows[2]),
        cross(rows[1], rows[2]),
    ];
    let best =
        candidates.iter().copied().fold(
            candidates[0],
            |b, c| if norm3(c) > norm3(b) { c } else { b },
        );
    if !(norm3(best) > T::zero()) {
        return Err(PseudospinError::DegenerateCloud);
    }
    let normal = canonical_direction(best);
    let mean_sq = points
        .iter()
        .map(|p| {
            let a = p.dot(normal).max(-T::one()).min(T::one()).asin();
            a * a
        })
        .fold(T::zero(), |acc, x| acc + x)
        / count;
    Ok(GreatCircleFit {
        normal,
        rms_deviation: mean_sq.sqrt(),
    })
}

/// Normalized discrete holonomy `Π⟨v_j|v_{j+1}⟩` around the closed loop.
pub fn berry_phase<T: Real>(lp: &LoopSample<T>) -> Result<Complex<T>, PseudospinError> {
    let n = lp.len();
    let mut h = Complex::new(T::one(), T::zero());
    for j in 0..n {
        let k = (j + 1) % n;
        let o = lp.values[j].inner(&lp.values[k]);
        let m = o.norm();
        if !(m > T::lit(1e-14)) {
            return Err(PseudospinError::ZeroOverlap { index: j, next: k });
        }
        h *= o / m;
    }
    Ok(h / h.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hemisphericity {
    Hemispherical,
    WeaklyHemispherical,
    Neither,
}

/// A sample that violates a hemisphericity condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: [f64; 3],
    pub height: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HemisphereReport {
    pub classification: Hemisphericity,
    /// The `μ > 0` half lands on the negative side of `pole_axis`.
    pub swapped: bool,
    pub pole_axis: [f64; 3],
    /// Largest `|n·axis|` on the `μ = 0` loop.
    pub tube_width: f64,
    pub witnesses: Vec<Witness>,
}

/// Sampling of the cylinder surface used by [`hemispherical_classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HemisphereGrid {
    pub n_theta: usize,
    pub n_mu: usize,
    pub n_radial: usize,
}

impl Default for HemisphereGrid {
    fn default() -> Self {
        Self {
            n_theta: 64,
            n_mu: 8,
            n_radial: 8,
        }
    }
}

const MAX_WITNESSES: usize = 8;

/// Classifies the Bloch-sphere image of `field` on the cylinder of the
/// given radius and height around the field's singular point.
///
/// Heights are measured along `pole_axis`; without one, the normal of the
/// great circle best fitting the `μ = 0` image is used (largest component
/// positive). The map is hemispherical if the `μ = 0` loop lies on the
/// equator and every `μ ≠ 0` sample lies strictly in the hemisphere of the
/// sign of `μ`. It is weakly hemispherical if the `μ = 0` loop stays in the
/// tube `|h| ≤ τ < 1 − POLE_MARGIN` and the meridian retraction collapsing
/// that tube onto the equator yields a hemispherical map: `μ > 0` samples
/// have `h ≥ −τ`, `μ < 0` samples `h ≤ τ`, and the caps clear the tube on
/// their own side. Both tests are also tried with the poles swapped.
pub fn hemispherical_classify<T: Real, F: ProjectorField<T>>(
    field: &F,
    radius: T,
    mu_max: T,
    grid: HemisphereGrid,
    pole_axis: Option<[T; 3]>,
) -> Result<HemisphereReport, PseudospinError> {
    let s = field.singular_point();
    let equator = LoopSample::around(field, [s[0], s[1]], radius, T::zero(), grid.n_theta.max(8))?;
    let axis = match pole_axis {
        Some(a) => {
            let l = norm3(a);
            a.map(|c| c / l)
        }
        None => great_circle_fit(&equator.sphere_points())?.normal,
    };
    // (point, μ sign, on a cap) for every sample off the equator.
    let mut samples: Vec<([T; 3], i32, bool)> = Vec::new();
    let n_mu = grid.n_mu.max(1);
    for j in 1..=n_mu {
        let mu = mu_max * T::int(j as i64) / T::int(n_mu as i64);
        for sign in [1, -1] {
            for t in 0..grid.n_theta {
                let th = T::TAU() * T::int(t as i64) / T::int(grid.n_theta as i64);
                let (sn, cs) = th.sin_cos();
                samples.push((
                    [
                        s[0] + radius * cs,
                        s[1] + radius * sn,
                        T::int(sign as i64) * mu,
                    ],
                    sign,
                    j == n_mu,
                ));
            }
        }
    }
    for i in 0..grid.n_radial.max(1) {
        let r = radius * T::int(i as i64) / T::int(grid.n_radial.max(1) as i64);
        for sign in [1, -1] {
            let count = if i == 0 { 1 } else { grid.n_theta };
            for t in 0..count {
                let th = T::TAU() * T::int(t as i64) / T::int(grid.n_theta as i64);
                let (sn, cs) = th.sin_cos();
                samples.push((
                    [s[0] + r * cs, s[1] + r * sn, T::int(sign as i64) * mu_max],
                    sign,
                    true,
                ));
            }
        }
    }
    let heights: Vec<T> = samples
        .par_iter()
        .map(|(x, _, _)| {
            field
                .projector(*x)
                .map(|p| bloch_sphere_map(&p).dot(axis))
                .map_err(|source| PseudospinError::FieldAt {
                    point: x.map(|c| c.to_f64_lossy()),
                    source,
                })
        })
        .collect::<Result<_, _>>()?;
    let loop_heights: Vec<T> = equator
        .sphere_points()
        .iter()
        .map(|p| p.dot(axis))
        .collect();
    let tau = loop_heights.iter().fold(T::zero(), |m, h| m.max(h.abs()));
    let to_f64 = |x: [T; 3]| x.map(|c| c.to_f64_lossy());
    let mut report = HemisphereReport {
        classification: Hemisphericity::Neither,
        swapped: false,
        pole_axis: to_f64(axis),
        tube_width: tau.to_f64_lossy(),
        witnesses: Vec::new(),
    };
    if !(tau < T::one() - T::lit(POLE_MARGIN)) {
        let (i, h) = loop_heights
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bi, bh), (i, &h)| {
                if h.abs() > bh.abs() {
                    (i, h)
                } else {
                    (bi, bh)
                }
            });
        let (sn, cs) = equator.theta[i].sin_cos();
        report.witnesses.push(Witness {
            point: to_f64([s[0] + radius * cs, s[1] + radius * sn, T::zero()]),
            height: h.to_f64_lossy(),
            reason: "mu = 0 loop leaves the equatorial tube".into(),
        });
        return Ok(report);
    }
    let strict_equator = tau <= T::lit(1e-9);
    let mut best_witnesses: Option<Vec<Witness>> = None;
    for orientation in [1, -1] {
        let o = T::int(orientation as i64);
        let strict_ok = strict_equator
            && samples
                .iter()
                .zip(&heights)
                .all(|((_, sign, _), &h)| o * h * T::int(*sign as i64) > T::zero());
        if strict_ok {
            report.classification = Hemisphericity::Hemispherical;
            report.swapped = orientation < 0;
            return Ok(report);
        }
        let mut witnesses = Vec::new();
        for ((x, sign, cap), &h) in samples.iter().zip(&heights) {
            let signed = o * h * T::int(*sign as i64);
            let reason = if signed < -tau {
                Some("sample on the wrong side of the equatorial tube")
            } else if *cap && !(signed > tau) {
                Some("cap sample does not clear the equatorial tube")
            } else {
                None
            };
            if let Some(reason) = reason {
                if witnesses.len() < MAX_WITNESSES {
                    witnesses.push(Witness {
                        point: to_f64(*x),
                        height: h.to_f64_lossy(),
                        reason: reason.into(),
                    });
                } else {
                    break;
                }
            }
        }
        if witnesses.is_empty() {
            report.classification = Hemisphericity::WeaklyHemispherical;
            report.swapped = orientation < 0;
            return Ok(report);
        }
        if best_witnesses
            .as_ref()
            .is_none_or(|b| witnesses.len() < b.len())
        {
            best_witnesses = Some(witnesses);
        }
    }
    report.witnesses = best_witnesses.unwrap_or_default();
    Ok(report)
}

/// Model whose pseudospin winding and vorticity are compared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PwnModel {
    Canonical(CanonicalModelSpec),
    Multilayer { m: u32, band: Band },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PwnReport {
    pub n_w: i64,
    pub n_v: i64,
    pub equal: bool,
    /// Bloch vector of the basis state `e1` used for the winding.
    pub north: [f64; 3],
    pub hemisphericity: Hemisphericity,
    pub deformation: String,
}

/// Pseudospin winding of the band section on the `μ = 0` circle of the
/// given radius, measured in the basis whose North pole is the image of
/// the `μ < 0` half of the cylinder, and the eigenspace vorticity of the
/// deformed field on the default cube. With this pole convention the two
/// agree.
pub fn pwn_equals_vorticity<T: Real>(
    model: PwnModel,
    radius: T,
    mu_max: T,
) -> Result<PwnReport, PseudospinError> {
    match model {
        PwnModel::Canonical(spec) => pwn_vs_vorticity(&CanonicalField::new(spec), radius, mu_max),
        PwnModel::Multilayer { m, band } => {
            pwn_vs_vorticity(&multilayer_field::<T>(m, band), radius, mu_max)
        }
    }
}

/// [`pwn_equals_vorticity`] for an arbitrary field.
pub fn pwn_vs_vorticity<T: Real, F: ProjectorField<T>>(
    field: &F,
    radius: T,
    mu_max: T,
) -> Result<PwnReport, PseudospinError> {
    let s = field.singular_point();
    let hemi = hemispherical_classify(field, radius, mu_max, HemisphereGrid::default(), None)?;
    let axis = hemi.pole_axis.map(T::lit);
    // Orient the pole axis toward the μ < 0 half.
    let north = if hemi.swapped { axis } else { axis.map(|c| -c) };
    let center = [s[0], s[1]];
    let n_w = winding_number_adaptive(
        |t: T| {
            let (sn, cs) = t.sin_cos();
            let v =
                field.eigenvector([center[0] + radius * cs, center[1] + radius * sn, T::zero()])?;
            let lp = LoopSample {
                theta: vec![t],
                values: vec![v],
            }
            .in_basis(north);
            Ok(lp.values[0])
        },
        64,
        T::lit(1e-9),
    )?;
    let chern = chern_on_cube(
        field,
        &CubeGeometry::around(s, radius * T::lit(2.0), mu_max * T::lit(2.0)),
    )?;
    let n_v = chern.vorticity();
    Ok(PwnReport {
        n_w,
        n_v,
        equal: n_w == n_v,
        north: north.map(|c| c.to_f64_lossy()),
        hemisphericity: hemi.classification,
        deformation: field.deformation(),
    })
}

/// Loop of the `m`-layer section `(1, s e^{imθ})/√2` on the unit circle.
pub fn multilayer_loop<T: Real>(
    m: u32,
    band: Band,
    n_samples: usize,
) -> Result<LoopSample<T>, PseudospinError> {
    LoopSample::from_fn(n_samples, |t| {
        Ok(multilayer_section(
            m,
            band,
            MomentumPoint::from_polar(T::one(), t),
        )?)
    })
}

/// CSV trace `theta,nx,ny,nz,psi1_re,psi1_im,psi2_re,psi2_im`.
pub fn loop_trace_csv<T: Real>(lp: &LoopSample<T>) -> String {
    let mut out = String::from("theta,nx,ny,nz,psi1_re,psi1_im,psi2_re,psi2_im\n");
    for (t, v) in lp.theta.iter().zip(&lp.values) {
        let p = bloch_sphere_map(&projector_of(v).expect("normalized"));
        let f = |x: T| format!("{:.16e}", x.to_f64_lossy());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            f(*t),
            f(p.n[0]),
            f(p.n[1]),
            f(p.n[2]),
            f(v.c1.re),
            f(v.c1.im),
            f(v.c2.re),
            f(v.c2.im)
        );
    }
    out
}
