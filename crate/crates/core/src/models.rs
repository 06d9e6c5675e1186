//! Model Hamiltonians: canonical n-vortex models with deformation `μ`,
//! effective and full-zone graphene, and the Haldane model.

use num_complex::Complex;
use thiserror::Error;

use crate::hermitian2::{eig2, HermitianMatrix2, RankOneProjector, UnitVector2};
use crate::scalar::{wrap_angle, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("model evaluated at the crossing point with zero deformation")]
    OriginAtZeroMu,
    #[error("lattice vectors are linearly dependent (|a1 x a2| = {cross:e})")]
    DegenerateLattice { cross: f64 },
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
}

/// Momentum measured from the crossing point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentumPoint<T> {
    pub q1: T,
    pub q2: T,
}

impl<T: Real> MomentumPoint<T> {
    pub fn new(q1: T, q2: T) -> Self {
        Self { q1, q2 }
    }

    pub fn from_polar(radius: T, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            q1: radius * c,
            q2: radius * s,
        }
    }

    pub fn radius(&self) -> T {
        self.q1.hypot(self.q2)
    }

    /// Polar angle in `[0, 2π)`; zero at the origin.
    pub fn theta(&self) -> T {
        if self.is_origin() {
            T::zero()
        } else {
            wrap_angle(self.q2.atan2(self.q1))
        }
    }

    pub fn is_origin(&self) -> bool {
        self.q1 == T::zero() && self.q2 == T::zero()
    }

    pub fn dot(&self, v: [T; 2]) -> T {
        self.q1 * v[0] + self.q2 * v[1]
    }
}

impl<T: Real> std::ops::Sub for MomentumPoint<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.q1 - rhs.q1, self.q2 - rhs.q2)
    }
}

impl<T: Real> std::ops::Add for MomentumPoint<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.q1 + rhs.q1, self.q2 + rhs.q2)
    }
}

/// Band selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Band {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Band {
    pub fn sign(self) -> i32 {
        match self {
            Band::Plus => 1,
            Band::Minus => -1,
        }
    }

    pub fn flipped(self) -> Band {
        match self {
            Band::Plus => Band::Minus,
            Band::Minus => Band::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Band::Plus => "+",
            Band::Minus => "-",
        }
    }
}

impl std::str::FromStr for Band {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s.trim() {
            "+" | "plus" | "upper" | "1" | "+1" => Ok(Band::Plus),
            "-" | "minus" | "lower" | "-1" => Ok(Band::Minus),
            other => Err(ModelError::InvalidParameter(format!(
                "band `{other}` (expected + or -)"
            ))),
        }
    }
}

/// `H_n` with dispersion `e(q) = |q|^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalModelSpec {
    pub n: i32,
    pub band: Band,
    pub m: u32,
}

impl CanonicalModelSpec {
    pub fn new(n: i32, band: Band, m: u32) -> Result<Self, ModelError> {
        if m == 0 {
            return Err(ModelError::InvalidParameter(
                "dispersion exponent m must be >= 1".into(),
            ));
        }
        Ok(Self { n, band, m })
    }

    pub fn dispersion<T: Real>(&self, radius: T) -> T {
        radius.powi(self.m as i32)
    }

    pub fn dispersion_derivative<T: Real>(&self, radius: T) -> T {
        T::int(self.m as i64) * radius.powi(self.m as i32 - 1)
    }
}

/// A model matrix together with the flag raised at the crossing point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelMatrix<T> {
    pub matrix: HermitianMatrix2<T>,
    pub origin: bool,
}

/// `η = μ/e(q)` and the mixing coefficient `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryQuantities<T> {
    pub eta: T,
    pub alpha: T,
}

pub fn auxiliary<T: Real>(
    spec: &CanonicalModelSpec,
    q: MomentumPoint<T>,
    mu: T,
) -> AuxiliaryQuantities<T> {
    let e = spec.dispersion(q.radius());
    let big_e = e.hypot(mu);
    let alpha = if big_e == T::zero() {
        T::zero()
    } else {
        -mu / (e + big_e)
    };
    AuxiliaryQuantities { eta: mu / e, alpha }
}

/// `e(q)·[[cos nθ, sin nθ + iη], [sin nθ − iη, −cos nθ]]`.
pub fn canonical_hamiltonian<T: Real>(
    spec: &CanonicalModelSpec,
    q: MomentumPoint<T>,
    mu: T,
) -> ModelMatrix<T> {
    let origin = q.is_origin() && mu == T::zero();
    let e = spec.dispersion(q.radius());
    let (s, c) = (T::int(spec.n as i64) * q.theta()).sin_cos();
    let matrix = HermitianMatrix2::new(e * c, -e * c, Complex::new(e * s, mu));
    ModelMatrix { matrix, origin }
}

/// `φ_{n,s}^μ(q) = (φ_{n,s} + iα φ_{n,−s}) / √(1+α²)`.
pub fn canonical_eigvec<T: Real>(
    spec: &CanonicalModelSpec,
    q: MomentumPoint<T>,
    mu: T,
) -> Result<UnitVector2<T>, ModelError> {
    if q.is_origin() && mu == T::zero() {
        return Err(ModelError::OriginAtZeroMu);
    }
    let half_angle = T::int(spec.n as i64) * q.theta() * T::lit(0.5);
    let (sh, ch) = half_angle.sin_cos();
    let phase = Complex::new(ch, sh);
    let plus = [phase * ch, phase * sh];
    let minus = [phase * (-sh), phase * ch];
    let (own, other) = match spec.band {
        Band::Plus => (plus, minus),
        Band::Minus => (minus, plus),
    };
    let alpha = auxiliary(spec, q, mu).alpha;
    let ia = Complex::new(T::zero(), alpha);
    let norm = (T::one() + alpha * alpha).sqrt().recip();
    Ok(UnitVector2 {
        c1: (own[0] + ia * other[0]) * norm,
        c2: (own[1] + ia * other[1]) * norm,
    })
}

/// `P_{n,s}^μ = (1 + s·H_n^μ / E)/2` with `E = √(e² + μ²)`.
pub fn canonical_projector<T: Real>(
    spec: &CanonicalModelSpec,
    q: MomentumPoint<T>,
    mu: T,
) -> Result<RankOneProjector<T>, ModelError> {
    let h = canonical_hamiltonian(spec, q, mu);
    if h.origin {
        return Err(ModelError::OriginAtZeroMu);
    }
    let big_e = spec.dispersion(q.radius()).hypot(mu);
    let scale = T::int(spec.band.sign() as i64) * T::lit(0.5) / big_e;
    let half = T::lit(0.5);
    let m = h.matrix.scale(scale);
    Ok(RankOneProjector::from_matrix_unchecked(
        HermitianMatrix2::new(half + m.a11, half + m.a22, m.a12),
    ))
}

/// Components of `ω_{n,s}` in the coordinates `(|q|, θ, μ)`:
/// `ω = c_rtheta d|q|∧dθ + c_thetamu dθ∧dμ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureComponents<T> {
    pub c_rtheta: T,
    pub c_thetamu: T,
}

pub fn analytic_curvature<T: Real>(
    spec: &CanonicalModelSpec,
    q: MomentumPoint<T>,
    mu: T,
) -> Result<CurvatureComponents<T>, ModelError> {
    if q.is_origin() && mu == T::zero() {
        return Err(ModelError::OriginAtZeroMu);
    }
    Ok(curvature_polar(spec, q.radius(), mu))
}

/// Same as [`analytic_curvature`] but taking `|q|` directly.
pub fn curvature_polar<T: Real>(
    spec: &CanonicalModelSpec,
    radius: T,
    mu: T,
) -> CurvatureComponents<T> {
    let e = spec.dispersion(radius);
    let de = spec.dispersion_derivative(radius);
    let e2 = e * e + mu * mu;
    let denom = e2 * e2.sqrt();
    let half_n = T::int((spec.n * spec.band.sign()) as i64) * T::lit(0.5);
    CurvatureComponents {
        c_rtheta: half_n * (-mu * e * de / denom),
        c_thetamu: -half_n * (e * e / denom),
    }
}

/// `|q|^m [[0, e^{−imθ}], [e^{imθ}, 0]]`.
pub fn multilayer_hamiltonian<T: Real>(m: u32, q: MomentumPoint<T>) -> ModelMatrix<T> {
    let e = q.radius().powi(m as i32);
    let (s, c) = (T::int(m as i64) * q.theta()).sin_cos();
    ModelMatrix {
        matrix: HermitianMatrix2::new(T::zero(), T::zero(), Complex::new(e * c, -e * s)),
        origin: q.is_origin(),
    }
}

/// Mass term `diag(−μ, μ)` used to open the gap of tight-binding models.
pub fn mass_term<T: Real>(mu: T) -> HermitianMatrix2<T> {
    HermitianMatrix2::new(-mu, mu, Complex::new(T::zero(), T::zero()))
}

/// Multilayer Hamiltonian gapped by [`mass_term`].
pub fn multilayer_deformed<T: Real>(m: u32, q: MomentumPoint<T>, mu: T) -> ModelMatrix<T> {
    let h = multilayer_hamiltonian(m, q);
    ModelMatrix {
        matrix: h.matrix + mass_term(mu),
        origin: h.origin && mu == T::zero(),
    }
}

/// `(1, s·e^{imθ}) / √2`.
pub fn multilayer_section<T: Real>(
    m: u32,
    band: Band,
    q: MomentumPoint<T>,
) -> Result<UnitVector2<T>, ModelError> {
    if q.is_origin() {
        return Err(ModelError::OriginAtZeroMu);
    }
    let r = T::FRAC_1_SQRT_2();
    let (s, c) = (T::int(m as i64) * q.theta()).sin_cos();
    let sign = T::int(band.sign() as i64);
    Ok(UnitVector2 {
        c1: Complex::new(r, T::zero()),
        c2: Complex::new(sign * r * c, sign * r * s),
    })
}

/// Bravais basis of the honeycomb lattice in units of the carbon spacing.
pub fn graphene_lattice<T: Real>() -> ([T; 2], [T; 2]) {
    let s3 = T::lit(3.0).sqrt();
    ([s3, T::zero()], [s3 * T::lit(0.5), T::lit(1.5)])
}

fn lattice_cross<T: Real>(a1: [T; 2], a2: [T; 2]) -> T {
    a1[0] * a2[1] - a1[1] * a2[0]
}

/// `γ_k = 1 + e^{ik·a2} + e^{ik·(a2−a1)}`.
pub fn gamma_k<T: Real>(k: MomentumPoint<T>, a1: [T; 2], a2: [T; 2]) -> Complex<T> {
    let p2 = k.dot(a2);
    let p21 = p2 - k.dot(a1);
    Complex::new(T::one(), T::zero())
        + Complex::from_polar(T::one(), p2)
        + Complex::from_polar(T::one(), p21)
}

/// `[[0, conj γ_k], [γ_k, 0]]` at absolute momentum `k`.
pub fn monolayer_fullzone<T: Real>(
    k: MomentumPoint<T>,
    a1: [T; 2],
    a2: [T; 2],
) -> Result<HermitianMatrix2<T>, ModelError> {
    let cross = lattice_cross(a1, a2);
    if cross.abs() < T::lit(1e-12) {
        return Err(ModelError::DegenerateLattice {
            cross: cross.to_f64_lossy(),
        });
    }
    Ok(HermitianMatrix2::new(
        T::zero(),
        T::zero(),
        gamma_k(k, a1, a2).conj(),
    ))
}

/// Valley of the honeycomb Brillouin zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Valley {
    K,
    #[serde(rename = "K'")]
    KPrime,
}

impl Valley {
    pub fn symbol(self) -> &'static str {
        match self {
            Valley::K => "K",
            Valley::KPrime => "K'",
        }
    }
}

impl std::str::FromStr for Valley {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s.trim() {
            "K" | "k" => Ok(Valley::K),
            "K'" | "Kp" | "kp" | "Kprime" | "kprime" => Ok(Valley::KPrime),
            other => Err(ModelError::InvalidParameter(format!(
                "valley `{other}` (expected K or K')"
            ))),
        }
    }
}

/// Dirac point where `γ_k = 0`: `K` solves `(k·a1, k·a2) = (4π/3, 2π/3)`, `K′ = −K`.
pub fn dirac_point<T: Real>(
    valley: Valley,
    a1: [T; 2],
    a2: [T; 2],
) -> Result<MomentumPoint<T>, ModelError> {
    let det = lattice_cross(a1, a2);
    if det.abs() < T::lit(1e-12) {
        return Err(ModelError::DegenerateLattice {
            cross: det.to_f64_lossy(),
        });
    }
    let pi = T::PI();
    let r1 = T::lit(4.0) * pi / T::lit(3.0);
    let r2 = T::lit(2.0) * pi / T::lit(3.0);
    // Solve [a1; a2] k = (r1, r2).
    let kx = (r1 * a2[1] - r2 * a1[1]) / det;
    let ky = (a1[0] * r2 - a2[0] * r1) / det;
    let k = MomentumPoint::new(kx, ky);
    Ok(match valley {
        Valley::K => k,
        Valley::KPrime => MomentumPoint::new(-kx, -ky),
    })
}

/// Haldane model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaldaneParams<T> {
    pub t1: T,
    pub t2: T,
    pub phi: T,
    pub mass: T,
}

impl<T: Real> HaldaneParams<T> {
    /// Parameters on the gap-closing line `M = 3√3 t2 sin φ`.
    pub fn critical(t1: T, t2: T, phi: T) -> Self {
        Self {
            t1,
            t2,
            phi,
            mass: T::lit(3.0) * T::lit(3.0).sqrt() * t2 * phi.sin(),
        }
    }

    /// `σ3` coefficient at the given valley: `M ± 3√3 t2 sin φ` (`+` at `K`).
    pub fn dirac_mass(&self, valley: Valley) -> T {
        let shift = T::lit(3.0) * T::lit(3.0).sqrt() * self.t2 * self.phi.sin();
        match valley {
            Valley::K => self.mass + shift,
            Valley::KPrime => self.mass - shift,
        }
    }
}

fn haldane_vectors<T: Real>() -> ([[T; 2]; 3], [[T; 2]; 3]) {
    let h = T::lit(3.0).sqrt() * T::lit(0.5);
    let half = T::lit(0.5);
    let nn = [[h, half], [-h, half], [T::zero(), -T::one()]];
    let s3 = T::lit(3.0).sqrt();
    let one5 = T::lit(1.5);
    let nnn = [[-h, one5], [-h, -one5], [s3, T::zero()]];
    (nn, nnn)
}

/// `2t2 cos φ Σ cos(k·b)·1 + t1 Σ [cos(k·δ)σ1 + sin(k·δ)σ2] + [M − 2t2 sin φ Σ sin(k·b)]σ3`.
pub fn haldane_hamiltonian<T: Real>(
    p: &HaldaneParams<T>,
    k: MomentumPoint<T>,
) -> HermitianMatrix2<T> {
    let (nn, nnn) = haldane_vectors::<T>();
    let (mut cx, mut cy) = (T::zero(), T::zero());
    for d in nn {
        let (s, c) = k.dot(d).sin_cos();
        cx += c;
        cy += s;
    }
    let (mut sum_cos, mut sum_sin) = (T::zero(), T::zero());
    for b in nnn {
        let (s, c) = k.dot(b).sin_cos();
        sum_cos += c;
        sum_sin += s;
    }
    let two = T::lit(2.0);
    let (sphi, cphi) = p.phi.sin_cos();
    HermitianMatrix2::from_pauli(
        two * p.t2 * cphi * sum_cos,
        p.t1 * cx,
        p.t1 * cy,
        p.mass - two * p.t2 * sphi * sum_sin,
    )
}

/// Minimum of the spectral gap near `center`, by successive zooming of a
/// square grid around the current best point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapMinimum<T> {
    pub gap: T,
    pub at: MomentumPoint<T>,
}

pub fn minimal_gap<T: Real, F: Fn(MomentumPoint<T>) -> HermitianMatrix2<T>>(
    h: F,
    center: MomentumPoint<T>,
    half_width: T,
    grid: usize,
    levels: usize,
) -> GapMinimum<T> {
    let grid = grid.max(3);
    let mut best = GapMinimum {
        gap: eig2(&h(center)).gap(),
        at: center,
    };
    let mut c = center;
    let mut w = half_width;
    for _ in 0..levels {
        for i in 0..=grid {
            for j in 0..=grid {
                let fi = T::int(i as i64) / T::int(grid as i64);
                let fj = T::int(j as i64) / T::int(grid as i64);
                let k = MomentumPoint::new(
                    c.q1 - w + T::lit(2.0) * w * fi,
                    c.q2 - w + T::lit(2.0) * w * fj,
                );
                let g = eig2(&h(k)).gap();
                if g < best.gap {
                    best = GapMinimum { gap: g, at: k };
                }
            }
        }
        c = best.at;
        w = w * T::lit(4.0) / T::int(grid as i64);
    }
    best
}
