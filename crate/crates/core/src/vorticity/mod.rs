//! Eigenspace vorticity: first Chern numbers of deformed projector fields
//! over closed surfaces enclosing a band crossing.

mod fields;
mod kato_nagy;
mod mesh;

pub use fields::{
    haldane_field, monolayer_field, multilayer_field, CanonicalField, ConjugatedField, FieldError,
    FnField, GaugedField, HamiltonianField, ProjectorField, SmoothUnitaryField,
};
pub use kato_nagy::{
    intertwining_residual, kato_nagy_unitary, kato_nagy_unitary_series, DISTANCE_MARGIN,
};
pub use mesh::{build_cube_mesh, build_cylinder_mesh, ClosedSurfaceMesh, MeshError};

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hermitian2::{op_norm_diff, UnitVector2};
use crate::models::{curvature_polar, Band, CanonicalModelSpec, CurvatureComponents};
use crate::quadrature::{Quadrature, QuadratureError};
use crate::scalar::Real;

/// Faces whose flux exceeds `π − AMBIGUITY_MARGIN` in magnitude are rejected.
pub const AMBIGUITY_MARGIN: f64 = 0.2;
/// Largest accepted distance of the raw flux sum from an integer.
pub const RESIDUE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VorticityError {
    #[error("field is singular at mesh vertex {vertex} ({point:?}): {source}")]
    SingularOnMesh {
        vertex: usize,
        point: [f64; 3],
        #[source]
        source: FieldError,
    },
    #[error("flux {flux} through face {face} is too close to ±π (mesh too coarse)")]
    AmbiguousFlux { face: usize, flux: f64 },
    #[error("flux remained ambiguous after {levels} refinements (face {face}, flux {flux})")]
    RefinementExhausted {
        levels: usize,
        face: usize,
        flux: f64,
    },
    #[error("flux sum {raw} is {residue} away from the nearest integer")]
    NonIntegerChern { raw: f64, residue: f64 },
    #[error("projector distance {distance} reaches 1")]
    DeformationTooFar { distance: f64 },
    #[error("projector distance {distance} >= 1 at vertex {vertex}")]
    PreconditionViolated {
        vertex: usize,
        distance: f64,
        report: Box<EquivalenceReport>,
    },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Outcome of a plaquette computation. `raw` is the total flux over `2π`,
/// which approximates `ch₁`; the vorticity is `n_v = −ch₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernResult {
    pub raw: f64,
    pub integer: i64,
    pub residue: f64,
    pub refinement_level: usize,
    pub faces: usize,
}

impl ChernResult {
    pub fn vorticity(&self) -> i64 {
        -self.integer
    }
}

fn vertex_vectors<T: Real, F: ProjectorField<T>>(
    field: &F,
    mesh: &ClosedSurfaceMesh<T>,
) -> Result<Vec<UnitVector2<T>>, VorticityError> {
    mesh.vertices
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            field
                .eigenvector(x)
                .map_err(|source| VorticityError::SingularOnMesh {
                    vertex: i,
                    point: x.map(|c| c.to_f64_lossy()),
                    source,
                })
        })
        .collect()
}

fn face_flux<T: Real>(face: &[usize], vectors: &[UnitVector2<T>]) -> T {
    let mut link = Complex::new(T::one(), T::zero());
    for i in 0..face.len() {
        let a = &vectors[face[i]];
        let b = &vectors[face[(i + 1) % face.len()]];
        link *= a.inner(b);
        // Keep the running product at unit scale; only its phase matters.
        let m = link.norm();
        if m > T::zero() {
            link /= m;
        }
    }
    if link.norm() == T::zero() {
        // Orthogonal neighbours: the phase is undefined.
        return T::PI();
    }
    link.im.atan2(link.re)
}

/// Flux `arg Π⟨v_i|v_{i+1}⟩ ∈ (−π, π]` of `ω` through every face, in face order.
///
/// `ω` is the curvature whose integral over the outward surface is `2π·ch₁`;
/// it is minus the curvature `i d⟨v|dv⟩` of the usual Berry connection.
pub fn face_fluxes<T: Real, F: ProjectorField<T>>(
    field: &F,
    mesh: &ClosedSurfaceMesh<T>,
) -> Result<Vec<T>, VorticityError> {
    let vectors = vertex_vectors(field, mesh)?;
    Ok(mesh
        .faces
        .par_iter()
        .map(|f| face_flux(f, &vectors))
        .collect())
}

/// Link-variable Chern number of `field` over the closed `mesh`.
pub fn plaquette_chern<T: Real, F: ProjectorField<T>>(
    field: &F,
    mesh: &ClosedSurfaceMesh<T>,
) -> Result<ChernResult, VorticityError> {
    let fluxes = face_fluxes(field, mesh)?;
    let limit = T::PI() - T::lit(AMBIGUITY_MARGIN);
    if let Some((face, &flux)) = fluxes.iter().enumerate().find(|(_, f)| !(f.abs() <= limit)) {
        return Err(VorticityError::AmbiguousFlux {
            face,
            flux: flux.to_f64_lossy(),
        });
    }
    let total = fluxes.iter().fold(T::zero(), |acc, &f| acc + f);
    let raw = (total / T::TAU()).to_f64_lossy();
    let integer = raw.round() as i64;
    Ok(ChernResult {
        raw,
        integer,
        residue: (raw - integer as f64).abs(),
        refinement_level: 0,
        faces: mesh.face_count(),
    })
}

/// Box surface around a singular point, refined on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubeGeometry<T> {
    pub center: [T; 3],
    pub half_widths: [T; 3],
    pub subdivisions: usize,
    pub max_refinements: usize,
}

impl<T: Real> CubeGeometry<T> {
    /// Half-widths `(r/2, r/2, μ0/2)` around `center`, one subdivision,
    /// up to six doublings.
    pub fn around(center: [T; 3], radius: T, mu_max: T) -> Self {
        let half = T::lit(0.5);
        Self {
            center,
            half_widths: [half * radius, half * radius, half * mu_max],
            subdivisions: 1,
            max_refinements: 6,
        }
    }

    pub fn mesh(&self, level: usize) -> ClosedSurfaceMesh<T> {
        build_cube_mesh(self.center, self.half_widths, self.subdivisions << level)
    }
}

/// Plaquette Chern number on a cube, doubling the subdivisions until two
/// consecutive levels are unambiguous, within [`RESIDUE_TOLERANCE`] of an
/// integer, and agree. The reported level is the coarser of the two.
pub fn chern_on_cube<T: Real, F: ProjectorField<T>>(
    field: &F,
    geometry: &CubeGeometry<T>,
) -> Result<ChernResult, VorticityError> {
    let mut previous: Option<ChernResult> = None;
    let mut last_err = None;
    for level in 0..=geometry.max_refinements {
        match plaquette_chern(field, &geometry.mesh(level)) {
            Ok(r) if r.residue < RESIDUE_TOLERANCE => {
                let r = ChernResult {
                    refinement_level: level,
                    ..r
                };
                if let Some(p) = previous {
                    if p.integer == r.integer {
                        return Ok(p);
                    }
                }
                previous = Some(r);
            }
            Ok(r) => {
                previous = None;
                last_err = Some(VorticityError::NonIntegerChern {
                    raw: r.raw,
                    residue: r.residue,
                });
            }
            Err(VorticityError::AmbiguousFlux { face, flux }) => {
                previous = None;
                last_err = Some(VorticityError::RefinementExhausted {
                    levels: level,
                    face,
                    flux,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(VorticityError::NonIntegerChern {
        raw: f64::NAN,
        residue: f64::NAN,
    }))
}

/// `(1/2π)∫_C ω` over the cylinder `|q| ≤ radius`, `|μ| ≤ mu_max`, where
/// `ω = c_rtheta d|q|∧dθ + c_thetamu dθ∧dμ` and `curvature(|q|, θ, μ)`
/// returns the components. The surface is oriented outward.
pub fn curvature_chern_quadrature<T: Real, C>(
    curvature: C,
    radius: T,
    mu_max: T,
    tol: T,
) -> Result<T, VorticityError>
where
    C: Fn(T, T, T) -> CurvatureComponents<T>,
{
    let q = Quadrature::new(tol / T::lit(6.0), T::zero());
    let wall = q.integrate_2d(
        |t, mu| curvature(radius, t, mu).c_thetamu,
        (T::zero(), T::TAU()),
        (-mu_max, mu_max),
    )?;
    let top = q.integrate_2d(
        |r, t| curvature(r, t, mu_max).c_rtheta,
        (T::zero(), radius),
        (T::zero(), T::TAU()),
    )?;
    let bottom = q.integrate_2d(
        |r, t| curvature(r, t, -mu_max).c_rtheta,
        (T::zero(), radius),
        (T::zero(), T::TAU()),
    )?;
    Ok((wall.value + top.value - bottom.value) / T::TAU())
}

/// [`curvature_chern_quadrature`] for the analytic curvature of a canonical model.
pub fn canonical_chern_quadrature<T: Real>(
    spec: &CanonicalModelSpec,
    radius: T,
    mu_max: T,
    tol: T,
) -> Result<T, VorticityError> {
    curvature_chern_quadrature(|r, _, mu| curvature_polar(spec, r, mu), radius, mu_max, tol)
}

/// Comparison of two fields on a common mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub chern_a: ChernResult,
    pub chern_b: ChernResult,
    pub equal: bool,
    pub max_distance: f64,
    pub argmax_vertex: usize,
}

/// Largest `‖P_A − P_B‖` over the vertices of `mesh`, with its vertex.
pub fn max_projector_distance<T: Real, A: ProjectorField<T>, B: ProjectorField<T>>(
    a: &A,
    b: &B,
    mesh: &ClosedSurfaceMesh<T>,
) -> Result<(f64, usize), VorticityError> {
    let va = vertex_vectors(a, mesh)?;
    let vb = vertex_vectors(b, mesh)?;
    let distances: Vec<f64> = va
        .par_iter()
        .zip(vb.par_iter())
        .map(|(x, y)| {
            let p = crate::hermitian2::projector_of(x).expect("normalized");
            let q = crate::hermitian2::projector_of(y).expect("normalized");
            op_norm_diff(&p, &q).to_f64_lossy()
        })
        .collect();
    Ok(distances.iter().enumerate().fold(
        (0.0, 0),
        |(m, i), (j, &d)| if d > m { (d, j) } else { (m, i) },
    ))
}

/// Chern numbers of two fields plus the distance precondition under which
/// they must agree. Returns `PreconditionViolated` when some vertex has
/// `‖P_A − P_B‖ ≥ 1`.
pub fn deformation_equivalence<T: Real, A: ProjectorField<T>, B: ProjectorField<T>>(
    a: &A,
    b: &B,
    mesh: &ClosedSurfaceMesh<T>,
) -> Result<EquivalenceReport, VorticityError> {
    let (max_distance, argmax_vertex) = max_projector_distance(a, b, mesh)?;
    let chern_a = plaquette_chern(a, mesh)?;
    let chern_b = plaquette_chern(b, mesh)?;
    let report = EquivalenceReport {
        equal: chern_a.integer == chern_b.integer,
        chern_a,
        chern_b,
        max_distance,
        argmax_vertex,
    };
    if max_distance >= 1.0 - DISTANCE_MARGIN {
        return Err(VorticityError::PreconditionViolated {
            vertex: argmax_vertex,
            distance: max_distance,
            report: Box::new(report),
        });
    }
    Ok(report)
}

/// Whether the two fields have the same plaquette Chern integer.
pub fn chern_equality_check<T: Real, A: ProjectorField<T>, B: ProjectorField<T>>(
    a: &A,
    b: &B,
    mesh: &ClosedSurfaceMesh<T>,
) -> Result<bool, VorticityError> {
    Ok(plaquette_chern(a, mesh)?.integer == plaquette_chern(b, mesh)?.integer)
}

/// Windings `n ∈ [−n_max, n_max]` of the canonical models (band `+`,
/// `e = |q|^m`, centered on the field's singular point) whose Chern number
/// on `mesh` equals that of `field`.
pub fn match_canonical_bank<T: Real, F: ProjectorField<T>>(
    field: &F,
    mesh: &ClosedSurfaceMesh<T>,
    n_max: i32,
    m: u32,
) -> Result<Vec<i32>, VorticityError> {
    let target = plaquette_chern(field, mesh)?.integer;
    let s = field.singular_point();
    let mut matches = Vec::new();
    for n in -n_max..=n_max {
        let spec = CanonicalModelSpec {
            n,
            band: Band::Plus,
            m,
        };
        let canonical = CanonicalField {
            spec,
            center: [s[0], s[1]],
        };
        if plaquette_chern(&canonical, mesh)?.integer == target {
            matches.push(n);
        }
    }
    Ok(matches)
}

/// Mesh with per-face fluxes, for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshExport {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
    pub face_flux: Vec<f64>,
}

pub fn export_mesh<T: Real, F: ProjectorField<T>>(
    field: &F,
    mesh: &ClosedSurfaceMesh<T>,
) -> Result<MeshExport, VorticityError> {
    let fluxes = face_fluxes(field, mesh)?;
    Ok(MeshExport {
        vertices: mesh
            .vertices
            .iter()
            .map(|v| v.map(|c| c.to_f64_lossy()))
            .collect(),
        faces: mesh.faces.clone(),
        face_flux: fluxes.iter().map(|f| f.to_f64_lossy()).collect(),
    })
}
