//! Projector fields on `(k1, k2, μ)` space.

use num_complex::Complex;
use rand::Rng;
use thiserror::Error;

use crate::hermitian2::{eig2, projector_of, Matrix2, RankOneProjector, UnitVector2};
use crate::models::{
    canonical_eigvec, dirac_point, graphene_lattice, haldane_hamiltonian, mass_term,
    monolayer_fullzone, multilayer_deformed, Band, CanonicalModelSpec, HaldaneParams, ModelError,
    ModelMatrix, MomentumPoint, Valley,
};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("field evaluated at its singular point")]
    Singular,
    #[error("spectrum degenerate (gap {gap:e})")]
    Degenerate { gap: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A band section `x ↦ v(x)` whose projectors `|v⟩⟨v|` form the field.
/// Implementations must be pure so that evaluation can run in parallel.
pub trait ProjectorField<T: Real>: Sync {
    fn eigenvector(&self, x: [T; 3]) -> Result<UnitVector2<T>, FieldError>;

    fn projector(&self, x: [T; 3]) -> Result<RankOneProjector<T>, FieldError> {
        Ok(projector_of(&self.eigenvector(x)?).expect("field vectors are normalized"))
    }

    /// Point `(k0, 0)` enclosed by the surfaces used with this field.
    fn singular_point(&self) -> [T; 3];

    /// Human-readable description of the deformation in use.
    fn deformation(&self) -> String;
}

impl<T: Real, F: ProjectorField<T> + ?Sized> ProjectorField<T> for &F {
    fn eigenvector(&self, x: [T; 3]) -> Result<UnitVector2<T>, FieldError> {
        (**self).eigenvector(x)
    }
    fn singular_point(&self) -> [T; 3] {
        (**self).singular_point()
    }
    fn deformation(&self) -> String {
        (**self).deformation()
    }
}

impl<T: Real> ProjectorField<T> for Box<dyn ProjectorField<T> + Send> {
    fn eigenvector(&self, x: [T; 3]) -> Result<UnitVector2<T>, FieldError> {
        (**self).eigenvector(x)
    }
    fn singular_point(&self) -> [T; 3] {
        (**self).singular_point()
    }
    fn deformation(&self) -> String {
        (**self).deformation()
    }
}

/// Deformed canonical model `P_{n,s}^μ(q)` with `q = k − center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalField<T> {
    pub spec: CanonicalModelSpec,
    pub center: [T; 2],
}

impl<T: Real> CanonicalField<T> {
    pub fn new(spec: CanonicalModelSpec) -> Self {
        Self {
            spec,
            center: [T::zero(), T::zero()],
        }
    }
}

impl<T: Real> ProjectorField<T> for CanonicalField<T> {
    fn eigenvector(&self, x: [T; 3]) -> Result<UnitVector2<T>, FieldError> {
        let q = MomentumPoint::new(x[0] - self.center[0], x[1] - self.center[1]);
        canonical_eigvec(&self.spec, q, x[2]).map_err(|e| match e {
            ModelError::OriginAtZeroMu => FieldError::Singular,
            other => other.into(),
        })
    }

    fn singular_point(&self) -> [T; 3] {
        [self.center[0], self.center[1], T::zero()]
    }

    fn deformation(&self) -> String {
        format!(
            "canonical n={} band={} e(q)=|q|^{}: mu inserted as +i*mu in the upper off-diagonal entry",
            self.spec.n,
            self.spec.band.symbol(),
            self.spec.m
        )
    }
}

type HamiltonianFn<T> = dyn Fn([T; 3]) -> ModelMatrix<T> + Send + Sync;

/// Eigenvector field of a selected band of a `μ`-deformed Hamiltonian.
pub struct HamiltonianField<T> {
    hamiltonian: Box<HamiltonianFn<T>>,
    pub band: Band,
    singular: [T; 3],
    label: String,
}

impl<T: Real> std::fmt::Debug for HamiltonianField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HamiltonianField")
            .field("band", &self.band)
            .field("singular", &self.singular)
            .field("label", &self.label)
            .finish()
    }
}

impl<T: Real> HamiltonianField<T> {
    pub fn new<F>(hamiltonian: F, band: Band, singular: [T; 3], label: impl Into<String>) -> Self
    where
        F: Fn([T; 3]) -> ModelMatrix<T> + Send + Sync + 'static,
    {
        Self {
            hamiltonian: Box::new(hamiltonian),
            band,
            singular,
            label: label.into(),
        }
    }

    pub fn hamiltonian(&self, x: [T; 3]) -> ModelMatrix<T> {
        (self.hamiltonian)(x)
    }
}

impl<T: Real> ProjectorField<T> for HamiltonianField<T> {
    fn eigenvector(&self, x: [T; 3]) -> Result<UnitVector2<T>, FieldError> {
        let h = (self.hamiltonian)(x);
        if h.origin {
            return Err(FieldError::Singular);
        }
        let e = eig2(&h.matrix);
        if e.degenerate {
            return Err(FieldError::Degenerate {
                gap: e.gap().to_f64_lossy(),
            });
        }
        Ok(match self.band {
            Band::Plus => e.v_plus,
            Band::Minus => e.v_minus,
        })
    }

    fn singular_point(&self) -> [T; 3] {
        self.singular
    }

    fn deformation(&self) -> String {
        self.label.clone()
    }
}

/// Effective `m`-layer graphene `|q|^m [[0, e^{−imθ}], [e^{imθ}, 0]]` gapped by `diag(−μ, μ)`.
pub fn multilayer_field<T: Real>(m: u32, band: Band) -> HamiltonianField<T> {
    HamiltonianField::new(
        move |x: [T; 3]| multilayer_deformed(m, MomentumPoint::new(x[0], x[1]), x[2]),
        band,
        [T::zero(); 3],
        format!(
            "multilayer m={m} band={}: mass term diag(-mu, +mu)",
            band.symbol()
        ),
    )
}

/// Full-zone monolayer graphene around a Dirac point, gapped by `diag(−μ, μ)`;
/// coordinates are absolute momenta.
pub fn monolayer_field<T: Real>(valley: Valley, band: Band) -> HamiltonianField<T> {
    let (a1, a2) = graphene_lattice::<T>();
    let k0 = dirac_point(valley, a1, a2).expect("graphene lattice is non-degenerate");
    HamiltonianField::new(
        move |x: [T; 3]| {
            let h = monolayer_fullzone(MomentumPoint::new(x[0], x[1]), a1, a2)
                .expect("non-degenerate lattice");
            ModelMatrix {
                matrix: h + mass_term(x[2]),
                origin: false,
            }
        },
        band,
        [k0.q1, k0.q2, T::zero()],
        format!(
            "monolayer full zone valley={} band={}: mass term diag(-mu, +mu)",
            valley.symbol(),
            band.symbol()
        ),
    )
}

/// Haldane model with `μ` added to the Semenoff mass `M`, centered on a Dirac point.
pub fn haldane_field<T: Real>(
    params: HaldaneParams<T>,
    valley: Valley,
    band: Band,
) -> HamiltonianField<T> {
    let (a1, a2) = graphene_lattice::<T>();
    let k0 = dirac_point(valley, a1, a2).expect("graphene lattice is non-degenerate");
    HamiltonianField::new(
        move |x: [T; 3]| {
            let p = HaldaneParams {
                mass: params.mass + x[2],
                ..params
            };
            ModelMatrix {
                matrix: haldane_hamiltonian(&p, MomentumPoint::new(x[0], x[1])),
                origin: false,
            }
        },
        band,
        [k0.q1, k0.q2, T::zero()],
        format!(
            "haldane valley={} band={}: mu added to M",
            valley.symbol(),
            band.symbol()
        ),
    )
}

/// `x ↦ U(x) v(x)` for a unitary field `U`.
pub struct ConjugatedField<F, U> {
    pub inner: F,
    pub unitary: U,
}

impl<T, F, U> ProjectorField<T> for ConjugatedField<F, U>
where
    T: Real,
    F: ProjectorField<T>,
    U: Fn([T; 3]) -> Matrix2<T> + Sync,
{
    fn eigenvector(&self, x: [T; 3]) -> Result<UnitVector2<T>, FieldError> {
        let v = self.inner.eigenvector(x)?;
        let w = (self.unitary)(x).apply(v.components());
        Ok(UnitVector2::normalize(w[0], w[1]).expect("unitary image is non-zero"))
    }

    fn singular_point(&self) -> [T; 3] {
        self.inner.singular_point()
    }

    fn deformation(&self) -> String {
        format!(
            "{} (conjugated by a unitary field)",
            self.inner.deformation()
        )
    }
}

/// `x ↦ e^{iφ(x)} v(x)`: same projectors, different gauge.
pub struct GaugedField<F, G> {
    pub inner: F,
    pub phase: G,
}

impl<T, F, G> ProjectorField<T> for GaugedField<F, G>
where
    T: Real,
    F: ProjectorField<T>,
    G: Fn([T; 3]) -> T + Sync,
{
    fn eigenvector(&self, x: [T; 3]) -> Result<UnitVector2<T>, FieldError> {
        let (s, c) = (self.phase)(x).sin_cos();
        Ok(self.inner.eigenvector(x)?.with_phase(Complex::new(c, s)))
    }

    fn singular_point(&self) -> [T; 3] {
        self.inner.singular_point()
    }

    fn deformation(&self) -> String {
        self.inner.deformation()
    }
}

/// Field given by a closure.
pub struct FnField<F, T> {
    pub f: F,
    pub singular: [T; 3],
    pub label: String,
}

impl<T, F> ProjectorField<T> for FnField<F, T>
where
    T: Real,
    F: Fn([T; 3]) -> Result<UnitVector2<T>, FieldError> + Sync,
{
    fn eigenvector(&self, x: [T; 3]) -> Result<UnitVector2<T>, FieldError> {
        (self.f)(x)
    }

    fn singular_point(&self) -> [T; 3] {
        self.singular
    }

    fn deformation(&self) -> String {
        self.label.clone()
    }
}

/// Smooth unitary field `U(x) = exp(i·ϑ(x) n(x)·σ)` with `|ϑ| ≤ max_angle`.
///
/// The Bloch vector of `U P U†` is that of `P` rotated by at most
/// `2·max_angle`, so `‖P − U P U†‖ ≤ sin(max_angle)` pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothUnitaryField<T> {
    pub max_angle: T,
    angle_modes: Vec<([T; 3], T, T)>,
    axis: [T; 3],
    axis_modes: [([T; 3], T); 3],
}

impl<T: Real> SmoothUnitaryField<T> {
    /// Random field whose wave vectors have components up to `wave / scale[i]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_angle: T, scale: [T; 3], wave: f64) -> Self {
        let wavevector =
            |rng: &mut R| [0, 1, 2].map(|i| T::lit(rng.gen_range(-wave..=wave)) / scale[i]);
        let angle_modes = (0..3)
            .map(|_| {
                let k = wavevector(rng);
                (
                    k,
                    T::lit(rng.gen_range(0.0..std::f64::consts::TAU)),
                    T::lit(rng.gen_range(0.2..1.0)),
                )
            })
            .collect();
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let rho = (1.0 - z * z).sqrt();
        let axis = [T::lit(rho * phi.cos()), T::lit(rho * phi.sin()), T::lit(z)];
        let axis_modes = [0, 1, 2].map(|_| {
            let k = wavevector(rng);
            (k, T::lit(rng.gen_range(0.0..std::f64::consts::TAU)))
        });
        Self {
            max_angle,
            angle_modes,
            axis,
            axis_modes,
        }
    }

    pub fn angle(&self, x: [T; 3]) -> T {
        let dot = |k: [T; 3]| k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
        let (mut s, mut norm) = (T::zero(), T::zero());
        for &(k, phase, amp) in &self.angle_modes {
            s += amp * (dot(k) + phase).sin();
            norm += amp;
        }
        self.max_angle * s / norm
    }

    pub fn axis(&self, x: [T; 3]) -> [T; 3] {
        let dot = |k: [T; 3]| k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
        let half = T::lit(0.5);
        let mut n = self.axis;
        for (i, &(k, phase)) in self.axis_modes.iter().enumerate() {
            n[i] += half * (dot(k) + phase).sin();
        }
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        n.map(|c| c / len)
    }

    pub fn unitary(&self, x: [T; 3]) -> Matrix2<T> {
        Matrix2::su2_rotation(self.angle(x), self.axis(x))
    }
}
