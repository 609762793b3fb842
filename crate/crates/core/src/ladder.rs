//! The two-band Floquet–Stark ladder.
//!
//! Expanding `|Ψ(t)⟩ = Σ_n |ψ_n(t)⟩ e^{-inω₀t}` for the sine drive turns the
//! Schrödinger equation into a nearest-neighbour tight-binding problem on the
//! harmonic index `n` with on-site tilt `-nω₀`. Rotating each spinor into the
//! eigenbasis of `H(0) = εσ^z + Δσ^x` gives upper/lower band amplitudes
//! `(u_n, v_n)`:
//!
//! ```text
//! i u̇_n = (E - nω₀) u_n + (Aε/2iE)(u_{n+1} - u_{n-1}) - (AΔ/2iE)(v_{n+1} - v_{n-1})
//! i v̇_n = (-E - nω₀) v_n - (Aε/2iE)(v_{n+1} - v_{n-1}) - (AΔ/2iE)(u_{n+1} - u_{n-1})
//! ```
//!
//! The truncated ladder Hamiltonian is time independent, so it is
//! diagonalised once and propagated exactly.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64 as C64;

use crate::dynamics::{beat_frequency, BeatOptions};
use crate::error::{FloqError, Result};
use crate::floquet::golden_section_min;
use crate::spin::{DriveForm, DriveParams, SpinState};

/// Boundary-site occupation above which a run is rejected.
pub const LEAKAGE_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_HALF_WIDTH: usize = 32;

/// Zero-tilt band energies `±sqrt(Δ² + (ε + A sin q)²)`.
pub fn band_dispersion(params: &DriveParams, q: f64) -> (f64, f64) {
    let e = params.delta.hypot(params.epsilon + params.amplitude * q.sin());
    (e, -e)
}

/// `∂_q ε_q` of the upper band.
pub fn band_slope(params: &DriveParams, q: f64) -> f64 {
    let z = params.epsilon + params.amplitude * q.sin();
    let e = params.delta.hypot(z);
    if e == 0.0 {
        return 0.0;
    }
    params.amplitude * q.cos() * z / e
}

/// Rotation angle onto the `H(0)` eigenbasis.
fn band_angle(params: &DriveParams) -> f64 {
    params.delta.atan2(params.epsilon)
}

/// Band amplitudes on sites `n_min..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderState {
    pub n_min: i64,
    pub n_max: i64,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub time: f64,
}

impl LadderState {
    pub fn sites(&self) -> usize {
        self.u.len()
    }

    /// `(u_n, v_n)`, zero outside the lattice.
    pub fn site(&self, n: i64) -> (C64, C64) {
        if n < self.n_min || n > self.n_max {
            return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        }
        let j = (n - self.n_min) as usize;
        (self.u[j], self.v[j])
    }

    /// `p₋ = Σ_n |v_n|²`.
    pub fn lower_population(&self) -> f64 {
        self.v.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `p₊ = Σ_n |u_n|²`.
    pub fn upper_population(&self) -> f64 {
        self.u.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.lower_population() + self.upper_population()
    }

    /// Larger of the two edge-site occupations.
    pub fn boundary_occupation(&self) -> f64 {
        let last = self.u.len() - 1;
        let occ = |j: usize| self.u[j].norm_sqr() + self.v[j].norm_sqr();
        occ(0).max(occ(last))
    }

    fn from_vector(n_min: i64, x: &DVector<C64>, time: f64) -> Self {
        let sites = x.len() / 2;
        LadderState {
            n_min,
            n_max: n_min + sites as i64 - 1,
            u: (0..sites).map(|j| x[2 * j]).collect(),
            v: (0..sites).map(|j| x[2 * j + 1]).collect(),
            time,
        }
    }
}

/// Truncated ladder on `|n| ≤ n_half_width`, diagonalised.
#[derive(Debug, Clone)]
pub struct LadderModel {
    params: DriveParams,
    n_half_width: usize,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl LadderModel {
    pub fn new(params: &DriveParams, n_half_width: usize) -> Result<Self> {
        params.validate()?;
        if params.form != DriveForm::SineX {
            return Err(FloqError::InvalidParams(
                "the Floquet–Stark ladder is written for the sine-x drive".into(),
            ));
        }
        if params.static_energy() == 0.0 {
            return Err(FloqError::InvalidParams("ladder needs ε² + Δ² > 0".into()));
        }
        if n_half_width == 0 {
            return Err(FloqError::InvalidParams("n_half_width must be positive".into()));
        }
        let k = ladder_hamiltonian(params, n_half_width);
        let eig = k.symmetric_eigen();
        Ok(LadderModel {
            params: *params,
            n_half_width,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn params(&self) -> &DriveParams {
        &self.params
    }

    pub fn n_half_width(&self) -> usize {
        self.n_half_width
    }

    fn n_min(&self) -> i64 {
        -(self.n_half_width as i64)
    }

    /// `v_0 = 1`, everything else empty.
    pub fn lower_band_start(&self) -> LadderState {
        let sites = 2 * self.n_half_width + 1;
        let mut x = DVector::<C64>::zeros(2 * sites);
        x[2 * self.n_half_width + 1] = C64::new(1.0, 0.0);
        LadderState::from_vector(self.n_min(), &x, 0.0)
    }

    fn to_vector(&self, state: &LadderState) -> DVector<C64> {
        let sites = 2 * self.n_half_width + 1;
        let mut x = DVector::<C64>::zeros(2 * sites);
        for j in 0..sites {
            let (u, v) = state.site(self.n_min() + j as i64);
            x[2 * j] = u;
            x[2 * j + 1] = v;
        }
        x
    }

    /// Propagator applied to `state` for a duration `dt`.
    pub fn advance(&self, state: &LadderState, dt: f64) -> LadderState {
        let coeffs = self.eigenvectors.ad_mul(&self.to_vector(state));
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.eigenvalues.iter())
                .map(|(c, &l)| c * C64::from_polar(1.0, -l * dt)),
        );
        LadderState::from_vector(self.n_min(), &(&self.eigenvectors * phased), state.time + dt)
    }
}

/// The truncated ladder Hamiltonian; index `2j` holds `u`, `2j+1` holds `v`
/// for site `n = j - n_half_width`.
pub fn ladder_hamiltonian(params: &DriveParams, n_half_width: usize) -> DMatrix<C64> {
    let sites = 2 * n_half_width + 1;
    let e = params.static_energy();
    let inv_2i = C64::new(0.0, -0.5);
    let hop_same = inv_2i * (params.amplitude * params.epsilon / e);
    let hop_cross = inv_2i * (params.amplitude * params.delta / e);
    let mut k = DMatrix::<C64>::zeros(2 * sites, 2 * sites);
    for j in 0..sites {
        let n = j as f64 - n_half_width as f64;
        let (u, v) = (2 * j, 2 * j + 1);
        k[(u, u)] = C64::new(e - n * params.omega0, 0.0);
        k[(v, v)] = C64::new(-e - n * params.omega0, 0.0);
        if j + 1 < sites {
            let (u1, v1) = (u + 2, v + 2);
            // Row n couples to n+1 with +, and row n+1 couples back to n with -.
            k[(u, u1)] = hop_same;
            k[(u1, u)] = -hop_same;
            k[(u, v1)] = -hop_cross;
            k[(u1, v)] = hop_cross;
            k[(v, v1)] = -hop_same;
            k[(v1, v)] = hop_same;
            k[(v, u1)] = -hop_cross;
            k[(v1, u)] = hop_cross;
        }
    }
    k
}

/// Band populations of a ladder evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderRun {
    pub times: Vec<f64>,
    pub p_plus: Vec<f64>,
    pub p_minus: Vec<f64>,
    /// States at `t = nτ`, `n = 0..=n_periods`.
    pub stroboscopic: Vec<LadderState>,
    pub max_boundary_occupation: f64,
    pub max_norm_defect: f64,
    pub n_half_width: usize,
    pub samples_per_period: usize,
}

impl LadderRun {
    pub fn stroboscopic_p_plus(&self) -> Vec<f64> {
        self.p_plus.iter().step_by(self.samples_per_period).copied().collect()
    }
}

/// Evolves the ladder from `v_0 = 1`, sampling band populations
/// `samples_per_period` times per period. Fails when the edge sites pick up
/// more than [`LEAKAGE_THRESHOLD`].
pub fn evolve_ladder(
    params: &DriveParams,
    n_half_width: usize,
    n_periods: usize,
    samples_per_period: usize,
) -> Result<LadderRun> {
    if samples_per_period == 0 {
        return Err(FloqError::InvalidParams("samples_per_period must be positive".into()));
    }
    let model = LadderModel::new(params, n_half_width)?;
    let dt = params.period() / samples_per_period as f64;
    let total = n_periods * samples_per_period + 1;
    let mut run = LadderRun {
        times: Vec::with_capacity(total),
        p_plus: Vec::with_capacity(total),
        p_minus: Vec::with_capacity(total),
        stroboscopic: Vec::with_capacity(n_periods + 1),
        max_boundary_occupation: 0.0,
        max_norm_defect: 0.0,
        n_half_width,
        samples_per_period,
    };
    let start = model.lower_band_start();
    let mut state = start.clone();
    for idx in 0..total {
        let t = idx as f64 * dt;
        if idx > 0 {
            // Restart from t = 0 at each period boundary to avoid drift.
            state = if idx % samples_per_period == 0 {
                model.advance(&start, t)
            } else {
                model.advance(&state, dt)
            };
            state.time = t;
        }
        let p_minus = state.lower_population();
        run.times.push(t);
        run.p_minus.push(p_minus);
        run.p_plus.push(1.0 - p_minus);
        run.max_boundary_occupation = run.max_boundary_occupation.max(state.boundary_occupation());
        run.max_norm_defect = run.max_norm_defect.max((state.norm_sqr() - 1.0).abs());
        if idx % samples_per_period == 0 {
            run.stroboscopic.push(state.clone());
        }
    }
    if run.max_boundary_occupation > LEAKAGE_THRESHOLD {
        return Err(FloqError::LadderLeakage {
            leakage: run.max_boundary_occupation,
            threshold: LEAKAGE_THRESHOLD,
            n_half_width,
        });
    }
    Ok(run)
}

/// [`evolve_ladder`] starting at the default width, doubling on leakage.
pub fn evolve_ladder_auto(
    params: &DriveParams,
    n_periods: usize,
    samples_per_period: usize,
) -> Result<LadderRun> {
    let mut width = DEFAULT_HALF_WIDTH;
    loop {
        match evolve_ladder(params, width, n_periods, samples_per_period) {
            Err(FloqError::LadderLeakage { .. }) if width < 1024 => width *= 2,
            other => return other,
        }
    }
}

/// Physical spin state encoded by a ladder state, together with the
/// deviation of its norm from 1 before renormalisation.
pub fn reconstruct_physical_state(state: &LadderState, params: &DriveParams) -> (SpinState, f64) {
    let theta = band_angle(params);
    let (s, c) = (0.5 * theta).sin_cos();
    let mut up = C64::new(0.0, 0.0);
    let mut down = C64::new(0.0, 0.0);
    for j in 0..state.sites() {
        let n = state.n_min + j as i64;
        let (u, v) = (state.u[j], state.v[j]);
        // ψ_n = R†(u, v) with R = exp(iθσ^y/2) = [[c, s], [-s, c]].
        let phase = C64::from_polar(1.0, -(n as f64) * params.omega0 * state.time);
        up += (u * c - v * s) * phase;
        down += (u * s + v * c) * phase;
    }
    let psi = SpinState::new(up, down);
    let n = psi.norm();
    (psi.normalized(), n - 1.0)
}

/// Integrates `∂_t E = ω₀ (p₊ - p₋) ∂_q ε_q |_{q = ω₀t}` from `E(0) = -ε_0`
/// with the trapezoid rule on samples spaced by `dt`.
pub fn semiclassical_energy(
    params: &DriveParams,
    dt: f64,
    p_plus: &[f64],
    p_minus: &[f64],
) -> Result<Vec<f64>> {
    if p_plus.len() != p_minus.len() || p_plus.is_empty() {
        return Err(FloqError::InvalidParams("population series must be non-empty and equal length".into()));
    }
    if !(dt > 0.0) {
        return Err(FloqError::InvalidParams("dt must be positive".into()));
    }
    let rate = |k: usize| {
        let t = k as f64 * dt;
        params.omega0 * (p_plus[k] - p_minus[k]) * band_slope(params, params.omega0 * t)
    };
    let mut out = Vec::with_capacity(p_plus.len());
    let mut energy = band_dispersion(params, 0.0).1;
    out.push(energy);
    let mut prev = rate(0);
    for k in 1..p_plus.len() {
        let r = rate(k);
        energy += 0.5 * dt * (prev + r);
        out.push(energy);
        prev = r;
    }
    Ok(out)
}

/// Perturbative description of the `m`-th order band resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePrediction {
    pub m: u32,
    /// `2E/m`.
    pub omega0_star: f64,
    /// Level shift δE (closed form for `m = 2` only).
    pub delta_e: Option<f64>,
    /// Effective coupling J (closed form for `m = 2` only).
    pub coupling: Option<f64>,
    /// Rabi frequency `sqrt(δE² + J²)` (closed form for `m = 2` only).
    pub omega_l: Option<f64>,
    /// Stroboscopic maximum of `p₊ - p₋`: `2J²/(δE² + J²) - 1`.
    pub imbalance_max: Option<f64>,
    /// Order-of-magnitude scale `A^m / ω₀*^(m-1)` of δE, J and ω_L.
    pub scale: f64,
}

pub fn predict_resonance(params: &DriveParams, m: u32) -> Result<ResonancePrediction> {
    params.validate()?;
    if m == 0 {
        return Err(FloqError::InvalidParams("resonance order must be ≥ 1".into()));
    }
    let (eps, del, a) = (params.epsilon, params.delta, params.amplitude);
    let e = params.static_energy();
    if e == 0.0 {
        return Err(FloqError::InvalidParams("resonance needs ε² + Δ² > 0".into()));
    }
    let w = 2.0 * e / m as f64;
    let scale = a.abs().powi(m as i32) / w.powi(m as i32 - 1);
    let mut pred = ResonancePrediction {
        m,
        omega0_star: w,
        delta_e: None,
        coupling: None,
        omega_l: None,
        imbalance_max: None,
        scale,
    };
    if m == 2 {
        let e2 = e * e;
        let de = (eps * eps - del * del) * a * a / (e2 * w);
        let j = 2.0 * eps * del * a * a / (e2 * w);
        let wl = de.hypot(j);
        pred.delta_e = Some(de);
        pred.coupling = Some(j);
        pred.omega_l = Some(wl);
        pred.imbalance_max = Some(if wl > 0.0 { 2.0 * j * j / (wl * wl) - 1.0 } else { -1.0 });
    }
    Ok(pred)
}

/// Least-squares fit `p(t) ≈ offset + amplitude · sin²(ω t / 2 + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiFit {
    pub omega: f64,
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub rms_residual: f64,
}

/// Linear least squares in `{1, cos ωt, sin ωt}` at fixed ω.
fn fit_at(times: &[f64], y: &[f64], omega: f64) -> (Vector3<f64>, f64) {
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for (&t, &v) in times.iter().zip(y) {
        let row = Vector3::new(1.0, (omega * t).cos(), (omega * t).sin());
        ata += row * row.transpose();
        aty += row * v;
    }
    let coef = ata.lu().solve(&aty).unwrap_or_else(Vector3::zeros);
    let sse: f64 = times
        .iter()
        .zip(y)
        .map(|(&t, &v)| {
            let model = coef[0] + coef[1] * (omega * t).cos() + coef[2] * (omega * t).sin();
            (v - model).powi(2)
        })
        .sum();
    (coef, (sse / times.len() as f64).sqrt())
}

/// Fits a Rabi oscillation to `(times, p)`. The frequency is seeded from the
/// spectral peak, scanned over ±50 %, and refined by golden-section search.
pub fn fit_rabi(times: &[f64], p: &[f64]) -> Result<RabiFit> {
    if times.len() != p.len() || times.len() < 8 {
        return Err(FloqError::InvalidParams("Rabi fit needs ≥ 8 paired samples".into()));
    }
    let dt = times[1] - times[0];
    let seed = beat_frequency(
        p,
        dt,
        &BeatOptions {
            min_amplitude: 0.0,
            ..BeatOptions::default()
        },
    )?
    .omega;
    let residual = |w: f64| -> Result<f64> { Ok(fit_at(times, p, w).1) };
    let scan = 201;
    let (lo, hi) = (0.5 * seed, 1.5 * seed);
    let step = (hi - lo) / (scan - 1) as f64;
    let best = (0..scan)
        .map(|i| lo + step * i as f64)
        .min_by(|a, b| fit_at(times, p, *a).1.total_cmp(&fit_at(times, p, *b).1))
        .expect("non-empty scan");
    let (omega, rms) = golden_section_min(&residual, (best - step, best + step), 1e-12 * seed.max(1.0))?;
    let (coef, _) = fit_at(times, p, omega);
    let r = coef[1].hypot(coef[2]);
    let delta = coef[2].atan2(coef[1]);
    Ok(RabiFit {
        omega,
        offset: coef[0] - r,
        amplitude: 2.0 * r,
        phase: 0.5 * (std::f64::consts::PI - delta),
        rms_residual: rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{instantaneous_spectrum, pauli_dot, sigma_x, sigma_z, Mat2};
    use std::f64::consts::PI;

    #[test]
    fn dispersion_examples() {
        let flat = DriveParams::new(1.0, 1.0, 0.0, 0.3).unwrap();
        for q in [0.0, 1.0, 4.0] {
            let (up, lo) = band_dispersion(&flat, q);
            assert!((up - 2f64.sqrt()).abs() < 1e-15 && (lo + 2f64.sqrt()).abs() < 1e-15);
        }
        let p = DriveParams::new(1.0, 1.0, 2.0, 0.19).unwrap();
        assert!((band_dispersion(&p, PI / 2.0).0 - 10f64.sqrt()).abs() < 1e-14);
        assert!((band_dispersion(&p, 0.0).0 - band_dispersion(&p, PI).0).abs() < 1e-14);
    }

    #[test]
    fn rotation_maps_tight_binding_to_bands() {
        // R (εσ^z + Δσ^x) R† = Eσ^z and R σ^z R† = (ε σ^z - Δ σ^x)/E.
        let p = DriveParams::new(0.7, 1.3, 0.4, 0.5).unwrap();
        let theta = band_angle(&p);
        let (s, c) = (0.5 * theta).sin_cos();
        let r = Mat2::new(
            C64::new(c, 0.0),
            C64::new(s, 0.0),
            C64::new(-s, 0.0),
            C64::new(c, 0.0),
        );
        let e = p.static_energy();
        let h0 = pauli_dot([p.delta, 0.0, p.epsilon]);
        assert!((r * h0 * r.adjoint() - sigma_z() * C64::new(e, 0.0)).norm() < 1e-14);
        let rz = r * sigma_z() * r.adjoint();
        let expected = (sigma_z() * C64::new(p.epsilon, 0.0) - sigma_x() * C64::new(p.delta, 0.0))
            / C64::new(e, 0.0);
        assert!((rz - expected).norm() < 1e-14);
    }

    #[test]
    fn ladder_hamiltonian_is_hermitian() {
        let p = DriveParams::new(1.0, 1.0, 2.0, 0.19).unwrap();
        let k = ladder_hamiltonian(&p, 5);
        assert!((&k - k.adjoint()).norm() < 1e-15);
    }

    #[test]
    fn start_reconstructs_ground_state() {
        let p = DriveParams::new(1.0, 1.0, 2.0, 0.19).unwrap();
        let model = LadderModel::new(&p, 4).unwrap();
        let (psi, dev) = reconstruct_physical_state(&model.lower_band_start(), &p);
        let g = instantaneous_spectrum(&p, 0.0).unwrap().ground;
        assert!(dev.abs() < 1e-15);
        assert!((psi.overlap(&g) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn undriven_ladder_keeps_lower_band() {
        let p = DriveParams::new(1.0, 1.0, 0.0, 0.37).unwrap();
        let run = evolve_ladder(&p, 4, 10, 16).unwrap();
        assert!(run.p_minus.iter().all(|&x| (x - 1.0).abs() < 1e-13));
        // The reconstructed state is the static ground state times e^{+iEt}.
        let model = LadderModel::new(&p, 4).unwrap();
        let (g, _) = reconstruct_physical_state(&model.lower_band_start(), &p);
        for t in [0.3, 5.0, 17.2] {
            let st = model.advance(&model.lower_band_start(), t);
            let (psi, _) = reconstruct_physical_state(&st, &p);
            let expected = g.scale(C64::from_polar(1.0, p.static_energy() * t));
            assert!((psi.0 - expected.0).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_cosine_form() {
        let p = DriveParams::new(1.0, 1.0, 2.0, 0.19).unwrap().with_form(DriveForm::CosineY);
        assert!(LadderModel::new(&p, 8).is_err());
    }

    #[test]
    fn narrow_lattice_reports_leakage() {
        let p = DriveParams::new(1.0, 1.0, 2.0, 0.19).unwrap();
        match evolve_ladder(&p, 4, 2, 16) {
            Err(FloqError::LadderLeakage { n_half_width, .. }) => assert_eq!(n_half_width, 4),
            other => panic!("expected leakage, got {other:?}"),
        }
    }

    #[test]
    fn balanced_populations_absorb_nothing() {
        let p = DriveParams::new(1.0, 1.0, 2.0, 0.19).unwrap();
        let half = vec![0.5; 1000];
        let e = semiclassical_energy(&p, 0.05, &half, &half).unwrap();
        assert!(e.iter().all(|&x| (x + 2f64.sqrt()).abs() < 1e-15));
    }

    #[test]
    fn lower_band_energy_follows_ground_state() {
        let p = DriveParams::new(1.0, 1.0, 2.0, 0.19).unwrap();
        let samples = 1024 * 5;
        let dt = p.period() / 1024.0;
        let (pp, pm) = (vec![0.0; samples + 1], vec![1.0; samples + 1]);
        let e = semiclassical_energy(&p, dt, &pp, &pm).unwrap();
        for (k, &x) in e.iter().enumerate() {
            let exact = band_dispersion(&p, p.omega0 * k as f64 * dt).1;
            assert!((x - exact).abs() < 1e-4);
        }
    }

    #[test]
    fn second_order_prediction_closed_forms() {
        let p = DriveParams::new(1.0, 1.0, 0.1, 1.0).unwrap();
        let r = predict_resonance(&p, 2).unwrap();
        let root2 = 2f64.sqrt();
        assert!((r.omega0_star - root2).abs() < 1e-15);
        assert!(r.delta_e.unwrap().abs() < 1e-18);
        assert!((r.coupling.unwrap() - 2.0 * 0.01 / (2.0 * root2)).abs() < 1e-15);
        assert!((r.omega_l.unwrap() - 0.01 / root2).abs() < 1e-15);
        assert!((r.imbalance_max.unwrap() - 1.0).abs() < 1e-12);

        // Generic ε, Δ: ω_L = A²/ω₀ and the imbalance formula.
        let p = DriveParams::new(0.4, 1.3, 0.07, 1.0).unwrap();
        let r = predict_resonance(&p, 2).unwrap();
        let (de, j) = (r.delta_e.unwrap(), r.coupling.unwrap());
        assert!((de.hypot(j) - 0.07 * 0.07 / r.omega0_star).abs() < 1e-15);
        let e4 = p.static_energy().powi(4);
        let expected = 8.0 * 1.3f64.powi(2) * 0.4f64.powi(2) / e4 - 1.0;
        assert!((r.imbalance_max.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn first_order_prediction_is_scaling_only() {
        let p = DriveParams::new(1.0, 2.0, 0.1, 1.0).unwrap();
        let r = predict_resonance(&p, 1).unwrap();
        assert!((r.omega0_star - 2.0 * 5f64.sqrt()).abs() < 1e-14);
        assert!(r.omega_l.is_none() && r.coupling.is_none());
        assert!((r.scale - 0.1).abs() < 1e-15);
        assert!(predict_resonance(&p, 0).is_err());
    }

    #[test]
    fn rabi_fit_recovers_synthetic_parameters() {
        let times: Vec<f64> = (0..800).map(|k| k as f64 * 4.4).collect();
        let (w, a, b, phi) = (0.0021, 0.02, 0.95, 0.3);
        let p: Vec<f64> = times.iter().map(|&t| a + b * (0.5 * w * t + phi).sin().powi(2)).collect();
        let fit = fit_rabi(&times, &p).unwrap();
        assert!((fit.omega - w).abs() < 1e-9 * w.max(1.0), "{fit:?}");
        assert!((fit.amplitude - b).abs() < 1e-8);
        assert!((fit.offset - a).abs() < 1e-8);
        assert!(fit.rms_residual < 1e-10);
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn ladder_propagation_keeps_norm(
            delta in 0.3..1.5f64,
            eps in 0.0..1.5f64,
            amp in 0.0..0.8f64,
            w in 0.5..2.0f64,
            t in 0.0..200.0f64,
        ) {
            let p = DriveParams::new(delta, eps, amp, w).unwrap();
            let model = LadderModel::new(&p, 16).unwrap();
            let s = model.advance(&model.lower_band_start(), t);
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert!((s.lower_population() + s.upper_population() - 1.0).abs() < 1e-10);
        }
    }
}
