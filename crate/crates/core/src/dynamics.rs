//! Real-time evolution: unitary trajectories of the quantum spin, beat
//! analysis of the stroboscopic excitation energy, and the classical
//! precession / Landau–Lifshitz–Gilbert dynamics of a magnetic moment.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64 as C64, FftPlanner};

use crate::error::{FloqError, Result};
use crate::floquet::propagate_unchecked;
use crate::spin::{ground_energy, hamiltonian_at, DriveParams, SpinState, Unitary2};

/// Samples per period recorded by default.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 64;

/// Quantum trajectory sampled on a uniform intra-period grid.
/// Every `samples_per_period`-th sample is stroboscopic (`t = nτ`).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpinState>,
    /// `(⟨σ^x⟩, ⟨σ^y⟩, ⟨σ^z⟩)` per sample.
    pub sigma: Vec<[f64; 3]>,
    /// `⟨H(t)⟩ - E_g(t)` per sample.
    pub e_ex: Vec<f64>,
    pub samples_per_period: usize,
    pub period: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `e_ex(nτ)` for `n = 0..=n_periods`.
    pub fn stroboscopic_e_ex(&self) -> Vec<f64> {
        self.e_ex.iter().step_by(self.samples_per_period).copied().collect()
    }

    pub fn max_e_ex(&self) -> f64 {
        self.e_ex.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_norm_defect(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn check_grid(steps_per_period: usize, samples_per_period: usize) -> Result<usize> {
    if samples_per_period == 0 || steps_per_period == 0 {
        return Err(FloqError::InvalidParams(
            "steps_per_period and samples_per_period must be positive".into(),
        ));
    }
    Ok(steps_per_period.div_ceil(samples_per_period))
}

/// [`evolve_unitary_sampled`] with 64 samples per period.
pub fn evolve_unitary(
    params: &DriveParams,
    psi0: &SpinState,
    n_periods: usize,
    steps_per_period: usize,
) -> Result<Trajectory> {
    evolve_unitary_sampled(params, psi0, n_periods, steps_per_period, DEFAULT_SAMPLES_PER_PERIOD)
}

/// Evolves `psi0` over `n_periods` drive periods with exponential-midpoint
/// steps. Steps are rounded up to a multiple of `samples_per_period`.
pub fn evolve_unitary_sampled(
    params: &DriveParams,
    psi0: &SpinState,
    n_periods: usize,
    steps_per_period: usize,
    samples_per_period: usize,
) -> Result<Trajectory> {
    params.validate()?;
    if ((psi0.norm() - 1.0).abs()) > 1e-10 {
        return Err(FloqError::InvalidParams(format!(
            "initial state must be normalised, |psi| = {}",
            psi0.norm()
        )));
    }
    let substeps = check_grid(steps_per_period, samples_per_period)?;
    let tau = params.period();
    let dt = tau / samples_per_period as f64;
    // H is τ-periodic, so one period's segment propagators serve every period.
    let segments: Vec<Unitary2> = (0..samples_per_period)
        .map(|k| propagate_unchecked(params, k as f64 * dt, (k + 1) as f64 * dt, substeps))
        .collect();

    let total = n_periods * samples_per_period + 1;
    let mut traj = Trajectory {
        times: Vec::with_capacity(total),
        states: Vec::with_capacity(total),
        sigma: Vec::with_capacity(total),
        e_ex: Vec::with_capacity(total),
        samples_per_period,
        period: tau,
    };
    let mut psi = *psi0;
    for idx in 0..total {
        let k = idx % samples_per_period;
        let local_t = k as f64 * dt;
        if idx > 0 {
            let prev = (idx - 1) % samples_per_period;
            psi = segments[prev].apply(&psi);
        }
        let energy = psi.expectation(&hamiltonian_at(params, local_t));
        traj.times.push(idx as f64 * dt);
        traj.states.push(psi);
        traj.sigma.push(psi.bloch_vector());
        traj.e_ex.push(energy - ground_energy(params, local_t));
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatOptions {
    /// Peaks must exceed this multiple of the median spectral amplitude.
    pub floor_factor: f64,
    /// Peaks must also carry at least this oscillation amplitude (energy units).
    pub min_amplitude: f64,
    /// Zero-padding factor for the transform.
    pub zero_pad: usize,
}

impl Default for BeatOptions {
    fn default() -> Self {
        BeatOptions {
            floor_factor: 10.0,
            min_amplitude: 1e-3,
            zero_pad: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beat {
    /// Angular frequency of the dominant oscillation.
    pub omega: f64,
    /// Estimated oscillation amplitude at the peak.
    pub amplitude: f64,
    /// Median spectral amplitude.
    pub floor: f64,
}

/// Dominant nonzero angular frequency of a uniformly sampled series.
///
/// The mean is removed, a Hann window applied, and the zero-padded spectrum
/// searched above two cycles per record; the peak is refined by a parabola
/// through the log-magnitudes of its neighbours.
pub fn beat_frequency(series: &[f64], dt: f64, opts: &BeatOptions) -> Result<Beat> {
    let n = series.len();
    if n < 8 || !(dt > 0.0) {
        return Err(FloqError::InvalidParams("beat analysis needs ≥ 8 samples and dt > 0".into()));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let window: Vec<f64> = (0..n)
        .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos())
        .collect();
    let wsum: f64 = window.iter().sum();
    let m = (n.next_power_of_two() * opts.zero_pad.max(1)).max(16);
    let mut buf: Vec<C64> = vec![C64::new(0.0, 0.0); m];
    for k in 0..n {
        buf[k] = C64::new((series[k] - mean) * window[k], 0.0);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let amp: Vec<f64> = buf[..m / 2].iter().map(|c| 2.0 * c.norm() / wsum).collect();

    let k_min = (2 * m).div_ceil(n).max(1);
    if k_min + 2 >= amp.len() {
        return Err(FloqError::InvalidParams("series too short for beat analysis".into()));
    }
    let (k_peak, &peak) = amp[k_min..amp.len() - 1]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i + k_min, v))
        .expect("non-empty search band");
    let mut tail: Vec<f64> = amp[k_min..].to_vec();
    tail.sort_by(|a, b| a.total_cmp(b));
    let floor = tail[tail.len() / 2];
    if peak < opts.floor_factor * floor || peak < opts.min_amplitude {
        return Err(FloqError::NoBeat { peak, floor });
    }
    let (l, c, r) = (amp[k_peak - 1].ln(), peak.ln(), amp[k_peak + 1].ln());
    let denom = l - 2.0 * c + r;
    let shift = if denom.abs() > 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
    let freq = (k_peak as f64 + shift) / (m as f64 * dt);
    Ok(Beat {
        omega: 2.0 * PI * freq,
        amplitude: peak,
        floor,
    })
}

/// Classical moment trajectory under precession and Gilbert damping.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTrajectory {
    pub times: Vec<f64>,
    pub m: Vec<[f64; 3]>,
    /// `|B(t)| - B(t)·M`, zero when `M` is aligned with the field.
    pub e_ex: Vec<f64>,
    pub lambda: f64,
    pub samples_per_period: usize,
    pub period: f64,
    /// Largest `| |M| - |M₀| |` seen before renormalisation, over all steps.
    pub max_norm_drift: f64,
}

impl ClassicalTrajectory {
    pub fn n_periods(&self) -> usize {
        (self.times.len() - 1) / self.samples_per_period
    }

    /// Samples of period `p`: `t ∈ [pτ, (p+1)τ)`.
    pub fn period_slice(&self, p: usize) -> &[f64] {
        let s = self.samples_per_period;
        &self.e_ex[p * s..(p + 1) * s]
    }

    /// Per-period maximum of `e_ex`.
    pub fn envelope(&self) -> Vec<f64> {
        (0..self.n_periods())
            .map(|p| self.period_slice(p).iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    /// Largest `|e_ex(t + τ) - e_ex(t)|` over periods `from..`.
    pub fn periodicity_defect(&self, from: usize) -> f64 {
        let s = self.samples_per_period;
        let last = self.n_periods();
        (from * s..(last - 1) * s + s)
            .filter(|i| i + s < self.e_ex.len())
            .map(|i| (self.e_ex[i + s] - self.e_ex[i]).abs())
            .fold(0.0, f64::max)
    }

    /// First period after which every period stays within `rel_tol` (relative
    /// to the final profile's peak) of the final period's profile.
    pub fn settling_period(&self, rel_tol: f64) -> usize {
        let last = self.n_periods() - 1;
        let final_profile = self.period_slice(last);
        let scale = final_profile.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut settled = last;
        for p in (0..last).rev() {
            let dev = self
                .period_slice(p)
                .iter()
                .zip(final_profile)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if dev > rel_tol * scale {
                break;
            }
            settled = p;
        }
        settled
    }
}

/// Local maxima of `series` rising at least `prominence` above the lowest
/// point on each side before a higher value is reached.
pub fn prominent_maxima(series: &[f64], prominence: f64) -> Vec<usize> {
    let n = series.len();
    let mut out = Vec::new();
    for i in 1..n.saturating_sub(1) {
        let v = series[i];
        if !(v > series[i - 1] && v >= series[i + 1]) {
            continue;
        }
        let mut left_min = v;
        for j in (0..i).rev() {
            if series[j] > v {
                break;
            }
            left_min = left_min.min(series[j]);
        }
        let mut right_min = v;
        for &x in &series[i + 1..] {
            if x > v {
                break;
            }
            right_min = right_min.min(x);
        }
        if v - left_min.max(right_min) >= prominence {
            out.push(i);
        }
    }
    out
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Rotates `v` by `|w|·h` about `ŵ` (the flow of `dv/dt = w × v`).
fn rotate(v: [f64; 3], w: [f64; 3], h: f64) -> [f64; 3] {
    let r = norm(w);
    let angle = r * h;
    if angle == 0.0 {
        return v;
    }
    let k = [w[0] / r, w[1] / r, w[2] / r];
    let (s, c) = angle.sin_cos();
    let kv = cross(k, v);
    let kdv = dot(k, v) * (1.0 - c);
    [
        v[0] * c + kv[0] * s + k[0] * kdv,
        v[1] * c + kv[1] * s + k[1] * kdv,
        v[2] * c + kv[2] * s + k[2] * kdv,
    ]
}

/// Angular velocity of `dM/dt = 2 M × B - 2λ M × (M × B)` written as `Ω × M`.
fn angular_velocity(m: [f64; 3], b: [f64; 3], lambda: f64) -> [f64; 3] {
    let mb = cross(m, b);
    [
        -2.0 * b[0] + 2.0 * lambda * mb[0],
        -2.0 * b[1] + 2.0 * lambda * mb[1],
        -2.0 * b[2] + 2.0 * lambda * mb[2],
    ]
}

/// Classical excitation energy `|B| - B·M`.
pub fn classical_excitation(params: &DriveParams, m: [f64; 3], t: f64) -> f64 {
    let b = params.magnetic_field(t);
    norm(b) - dot(b, m)
}

/// [`classical_llg_sampled`] with 64 samples per period.
pub fn classical_llg(
    params: &DriveParams,
    m0: [f64; 3],
    lambda: f64,
    n_periods: usize,
    steps_per_period: usize,
) -> Result<ClassicalTrajectory> {
    classical_llg_sampled(params, m0, lambda, n_periods, steps_per_period, DEFAULT_SAMPLES_PER_PERIOD)
}

/// Integrates the Landau–Lifshitz–Gilbert equation for a unit moment with a
/// rotation-based midpoint scheme: the angular velocity is evaluated after a
/// half-step rotation and the full step is an exact rotation. With `λ = 0`
/// each step is the SO(3) image of the quantum exponential-midpoint step.
pub fn classical_llg_sampled(
    params: &DriveParams,
    m0: [f64; 3],
    lambda: f64,
    n_periods: usize,
    steps_per_period: usize,
    samples_per_period: usize,
) -> Result<ClassicalTrajectory> {
    params.validate()?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(FloqError::InvalidParams(format!("lambda must be ≥ 0, got {lambda}")));
    }
    let m0_norm = norm(m0);
    if (m0_norm - 1.0).abs() > 1e-8 {
        return Err(FloqError::InvalidParams(format!("|M0| must be 1, got {m0_norm}")));
    }
    let substeps = check_grid(steps_per_period, samples_per_period)?;
    let tau = params.period();
    let dt = tau / samples_per_period as f64;
    let h = dt / substeps as f64;

    let total = n_periods * samples_per_period + 1;
    let mut traj = ClassicalTrajectory {
        times: Vec::with_capacity(total),
        m: Vec::with_capacity(total),
        e_ex: Vec::with_capacity(total),
        lambda,
        samples_per_period,
        period: tau,
        max_norm_drift: 0.0,
    };
    let mut m = m0;
    for idx in 0..total {
        let k = idx % samples_per_period;
        let local_t = k as f64 * dt;
        if idx > 0 {
            let seg_start = ((idx - 1) % samples_per_period) as f64 * dt;
            for j in 0..substeps {
                let t = seg_start + j as f64 * h;
                let w0 = angular_velocity(m, params.magnetic_field(t), lambda);
                let half = rotate(m, w0, 0.5 * h);
                let w_mid = angular_velocity(half, params.magnetic_field(t + 0.5 * h), lambda);
                m = rotate(m, w_mid, h);
                let r = norm(m);
                traj.max_norm_drift = traj.max_norm_drift.max((r - m0_norm).abs());
                let s = m0_norm / r;
                m = [m[0] * s, m[1] * s, m[2] * s];
            }
        }
        traj.times.push(idx as f64 * dt);
        traj.m.push(m);
        traj.e_ex.push(classical_excitation(params, m, local_t));
    }
    Ok(traj)
}
