//! Drive parameters, two-level states and operators, and the instantaneous
//! Hamiltonian of the driven spin.
//!
//! Every Hamiltonian handled here is traceless, `H(t) = h(t) · σ`, so it is
//! fully described by the real "field vector" `h(t)`. The physical magnetic
//! field is `B(t) = -h(t)` (with `H = -B · σ`).

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{FloqError, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Which of the two equivalent drive geometries is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DriveForm {
    /// `H(t) = Δ σ^y + (ε + A cos ω₀t) σ^z`.
    CosineY,
    /// `H(t) = (ε + A sin ω₀t) σ^z + Δ σ^x`.
    #[default]
    SineX,
}

impl DriveForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            DriveForm::CosineY => "cosine-y",
            DriveForm::SineX => "sine-x",
        }
    }
}

impl std::str::FromStr for DriveForm {
    type Err = FloqError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cosine-y" | "cosiney" | "cos" => Ok(DriveForm::CosineY),
            "sine-x" | "sinex" | "sin" => Ok(DriveForm::SineX),
            other => Err(FloqError::InvalidParams(format!("unknown drive form '{other}'"))),
        }
    }
}

/// Drive of a spin-1/2: transverse field `delta`, static longitudinal field
/// `epsilon`, drive amplitude `amplitude` and angular frequency `omega0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub delta: f64,
    pub epsilon: f64,
    pub amplitude: f64,
    pub omega0: f64,
    pub form: DriveForm,
}

impl DriveParams {
    /// Validated parameters in the `SineX` form.
    pub fn new(delta: f64, epsilon: f64, amplitude: f64, omega0: f64) -> Result<Self> {
        let p = DriveParams {
            delta,
            epsilon,
            amplitude,
            omega0,
            form: DriveForm::SineX,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_form(mut self, form: DriveForm) -> Self {
        self.form = form;
        self
    }

    pub fn with_omega0(&self, omega0: f64) -> Result<Self> {
        let p = DriveParams { omega0, ..*self };
        p.validate()?;
        Ok(p)
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Result<Self> {
        let p = DriveParams { amplitude, ..*self };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("amplitude", self.amplitude),
            ("omega0", self.omega0),
        ] {
            if !v.is_finite() {
                return Err(FloqError::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if self.omega0 <= 0.0 {
            return Err(FloqError::InvalidParams(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        Ok(())
    }

    /// Drive period `τ = 2π/ω₀`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega0
    }

    /// Static splitting scale `E = sqrt(ε² + Δ²)`.
    pub fn static_energy(&self) -> f64 {
        self.epsilon.hypot(self.delta)
    }

    /// Longitudinal field `ε + A s(ω₀t)` with `s` = cos or sin by form.
    pub fn longitudinal(&self, t: f64) -> f64 {
        let phase = self.omega0 * t;
        let s = match self.form {
            DriveForm::CosineY => phase.cos(),
            DriveForm::SineX => phase.sin(),
        };
        self.epsilon + self.amplitude * s
    }

    /// The vector `h(t)` with `H(t) = h(t) · σ`.
    pub fn field_vector(&self, t: f64) -> [f64; 3] {
        let z = self.longitudinal(t);
        match self.form {
            DriveForm::CosineY => [0.0, self.delta, z],
            DriveForm::SineX => [self.delta, 0.0, z],
        }
    }

    /// Magnetic field `B(t) = -h(t)`.
    pub fn magnetic_field(&self, t: f64) -> [f64; 3] {
        let h = self.field_vector(t);
        [-h[0], -h[1], -h[2]]
    }
}

/// `h · σ` as a 2×2 matrix.
pub fn pauli_dot(h: [f64; 3]) -> Mat2 {
    let [x, y, z] = h;
    Mat2::new(
        C64::new(z, 0.0),
        C64::new(x, -y),
        C64::new(x, y),
        C64::new(-z, 0.0),
    )
}

pub fn sigma_x() -> Mat2 {
    pauli_dot([1.0, 0.0, 0.0])
}

pub fn sigma_y() -> Mat2 {
    pauli_dot([0.0, 1.0, 0.0])
}

pub fn sigma_z() -> Mat2 {
    pauli_dot([0.0, 0.0, 1.0])
}

/// Instantaneous Hamiltonian `H(t)`.
pub fn hamiltonian_at(params: &DriveParams, t: f64) -> Mat2 {
    pauli_dot(params.field_vector(t))
}

/// A pure spin-1/2 state in the σ^z eigenbasis (`up`, `down`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState(pub Vector2<C64>);

impl SpinState {
    pub fn new(up: C64, down: C64) -> Self {
        SpinState(Vector2::new(up, down))
    }

    pub fn up() -> Self {
        SpinState::new(ONE, ZERO)
    }

    pub fn down() -> Self {
        SpinState::new(ZERO, ONE)
    }

    /// Pure state with the given Bloch vector direction (normalised internally).
    pub fn from_bloch(v: [f64; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let cos_theta = (v[2] / r).clamp(-1.0, 1.0);
        let half = 0.5 * cos_theta.acos();
        let phi = v[1].atan2(v[0]);
        SpinState::new(C64::new(half.cos(), 0.0), C64::from_polar(half.sin(), phi))
    }

    pub fn up_amp(&self) -> C64 {
        self.0[0]
    }

    pub fn down_amp(&self) -> C64 {
        self.0[1]
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn normalized(&self) -> Self {
        SpinState(self.0 / C64::new(self.norm(), 0.0))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SpinState) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &SpinState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `⟨self|op|self⟩` (real part; `op` is assumed Hermitian).
    pub fn expectation(&self, op: &Mat2) -> f64 {
        self.inner(&SpinState(op * self.0)).re
    }

    /// `(⟨σ^x⟩, ⟨σ^y⟩, ⟨σ^z⟩)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let (a, b) = (self.0[0], self.0[1]);
        let ab = a.conj() * b;
        [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
    }

    pub fn scale(&self, c: C64) -> Self {
        SpinState(self.0 * c)
    }

    /// Fixes the global phase: first nonzero component real and positive.
    pub fn with_canonical_phase(&self) -> Self {
        let lead = if self.0[0] != ZERO { self.0[0] } else { self.0[1] };
        if lead == ZERO {
            return *self;
        }
        self.scale(lead.conj() / lead.norm())
    }
}

/// A 2×2 time-evolution operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2(pub Mat2);

impl Unitary2 {
    pub fn identity() -> Self {
        Unitary2(Mat2::identity())
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// `exp(-i (h·σ) dt)` in closed form.
    pub fn exp_pauli(h: [f64; 3], dt: f64) -> Self {
        let r = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
        let angle = r * dt;
        // sin(angle)/r written as dt·sinc(angle) stays finite at r = 0.
        let sinc = if angle.abs() < 1e-8 {
            1.0 - angle * angle / 6.0
        } else {
            angle.sin() / angle
        };
        let s = dt * sinc;
        let c = C64::new(angle.cos(), 0.0);
        let [x, y, z] = h;
        Unitary2(Mat2::new(
            c - I * (s * z),
            -I * C64::new(s * x, -s * y),
            -I * C64::new(s * x, s * y),
            c + I * (s * z),
        ))
    }

    /// `next · self`: first `self`, then `next`.
    pub fn then(&self, next: &Unitary2) -> Unitary2 {
        Unitary2(next.0 * self.0)
    }

    pub fn adjoint(&self) -> Unitary2 {
        Unitary2(self.0.adjoint())
    }

    pub fn apply(&self, psi: &SpinState) -> SpinState {
        SpinState(self.0 * psi.0)
    }

    pub fn determinant(&self) -> C64 {
        self.0.determinant()
    }

    /// Frobenius norm of `U†U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.0.adjoint() * self.0 - Mat2::identity()).norm()
    }

    /// Frobenius distance to another operator.
    pub fn distance(&self, other: &Unitary2) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// Instantaneous eigen-decomposition of `H(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantSpectrum {
    pub t: f64,
    pub ground_energy: f64,
    pub excited_energy: f64,
    pub ground: SpinState,
    pub excited: SpinState,
}

impl InstantSpectrum {
    pub fn gap(&self) -> f64 {
        self.excited_energy - self.ground_energy
    }
}

/// Eigenvectors of `h · σ` for eigenvalues `+|h|` and `-|h|`, canonical phase.
/// `None` when `h = 0`.
pub fn pauli_eigenvectors(h: [f64; 3]) -> Option<(SpinState, SpinState)> {
    let [x, y, z] = h;
    let r = (x * x + y * y + z * z).sqrt();
    if r == 0.0 || !r.is_finite() {
        return None;
    }
    let (plus, minus) = if z >= 0.0 {
        (
            SpinState::new(C64::new(z + r, 0.0), C64::new(x, y)),
            SpinState::new(C64::new(x, -y), C64::new(-(z + r), 0.0)),
        )
    } else {
        (
            SpinState::new(C64::new(x, -y), C64::new(r - z, 0.0)),
            SpinState::new(C64::new(r - z, 0.0), C64::new(-x, -y)),
        )
    };
    Some((
        plus.normalized().with_canonical_phase(),
        minus.normalized().with_canonical_phase(),
    ))
}

/// Ground and excited levels of `H(t)`. Fails when the field vanishes.
pub fn instantaneous_spectrum(params: &DriveParams, t: f64) -> Result<InstantSpectrum> {
    let h = params.field_vector(t);
    let r = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
    let (excited, ground) = pauli_eigenvectors(h).ok_or(FloqError::DegenerateSpectrum { t })?;
    Ok(InstantSpectrum {
        t,
        ground_energy: -r,
        excited_energy: r,
        ground,
        excited,
    })
}

/// `E_g(t) = -|h(t)|`; defined even where the eigenbasis is not.
pub fn ground_energy(params: &DriveParams, t: f64) -> f64 {
    let h = params.field_vector(t);
    -(h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt()
}
