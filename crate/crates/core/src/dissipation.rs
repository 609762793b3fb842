//! Weak coupling of the spin to an Ohmic bath through σ^z: rate kernel,
//! Fourier coefficients of the Floquet-basis σ^z matrix element, and the
//! diagonal periodic steady state in the rotating-wave approximation.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{FloqError, Result};
use crate::floquet::{golden_section_min, solve_floquet, FloquetOptions, FloquetSolution};
use crate::spin::{ground_energy, hamiltonian_at, sigma_z, DriveParams};

/// Ohmic bath with Lorentzian cutoff; `k_B = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub gamma: f64,
    pub cutoff: f64,
    pub temperature: f64,
}

impl BathParams {
    pub fn new(gamma: f64, cutoff: f64, temperature: f64) -> Result<Self> {
        let b = BathParams {
            gamma,
            cutoff,
            temperature,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(FloqError::InvalidParams(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(FloqError::InvalidParams(format!("cutoff must be > 0, got {}", self.cutoff)));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(FloqError::InvalidParams(format!(
                "temperature must be ≥ 0, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        BathParams::new(self.gamma, self.cutoff, temperature)
    }
}

/// `J(ω) = (2γ/π) ω Ω²/(ω² + Ω²)`, odd in ω.
pub fn spectral_density(omega: f64, bath: &BathParams) -> f64 {
    let c2 = bath.cutoff * bath.cutoff;
    2.0 * bath.gamma / PI * omega * c2 / (omega * omega + c2)
}

/// Bose factor extended to negative frequency by `N(-ω) = -(N(ω) + 1)`.
/// At `T = 0` this is 0 for ω > 0 and -1 for ω < 0. Infinite at ω = 0, T > 0.
pub fn bose_occupation(omega: f64, bath: &BathParams) -> f64 {
    if bath.temperature == 0.0 {
        return if omega > 0.0 {
            0.0
        } else if omega < 0.0 {
            -1.0
        } else {
            f64::NAN
        };
    }
    // 1/(e^{βω} - 1) already satisfies the negative-frequency extension.
    1.0 / (omega / bath.temperature).exp_m1()
}

/// `(J(ω), N(ω))`.
pub fn bath_kernel(omega: f64, bath: &BathParams) -> (f64, f64) {
    (spectral_density(omega, bath), bose_occupation(omega, bath))
}

/// `J(ω) N(ω)` with the ω → 0 limit `(2γ/π) T` taken explicitly.
pub fn j_times_n(omega: f64, bath: &BathParams) -> f64 {
    if omega == 0.0 {
        return 2.0 * bath.gamma / PI * bath.temperature;
    }
    if bath.temperature == 0.0 {
        return if omega > 0.0 { 0.0 } else { -spectral_density(omega, bath) };
    }
    spectral_density(omega, bath) * bose_occupation(omega, bath)
}

/// `J(ω)(2N(ω) + 1) = J(ω) coth(ω/2T)`, with the ω → 0 limit `(4γ/π) T`.
pub fn j_times_2n_plus_1(omega: f64, bath: &BathParams) -> f64 {
    if omega == 0.0 {
        return 4.0 * bath.gamma / PI * bath.temperature;
    }
    let j = spectral_density(omega, bath);
    if bath.temperature == 0.0 {
        return j.abs();
    }
    j / (omega / (2.0 * bath.temperature)).tanh()
}

/// `σ^z_n = (1/τ)∫ e^{inω₀t} ⟨Φ⁺(t)|σ^z|Φ⁻(t)⟩ dt` for `|n| ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaZFourier {
    pub n_max: usize,
    coeffs: Vec<C64>,
}

impl SigmaZFourier {
    pub fn get(&self, n: i64) -> C64 {
        if n.unsigned_abs() as usize > self.n_max {
            return C64::new(0.0, 0.0);
        }
        self.coeffs[(n + self.n_max as i64) as usize]
    }

    /// `Σ_n |σ^z_n|²` over the retained harmonics.
    pub fn total_weight(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - self.n_max as i64, c))
    }
}

/// `⟨Φ⁺(t_k)|σ^z|Φ⁻(t_k)⟩` on the solution's sample grid.
pub fn sigma_z_matrix_element(sol: &FloquetSolution) -> Vec<C64> {
    let sz = sigma_z();
    sol.mode_samples[0]
        .iter()
        .zip(&sol.mode_samples[1])
        .map(|(p, m)| p.inner(&crate::spin::SpinState(sz * m.0)))
        .collect()
}

/// Discrete Fourier coefficients of the σ^z matrix element. `n_max` may not
/// exceed a quarter of the sample grid.
pub fn sigma_z_fourier(sol: &FloquetSolution, n_max: usize) -> Result<SigmaZFourier> {
    let grid = sol.grid();
    if 4 * n_max > grid {
        return Err(FloqError::FourierSupport { n_max, grid });
    }
    let mut buf = sigma_z_matrix_element(sol);
    // Σ_k f_k e^{+2πi nk/N} is the unnormalised inverse transform.
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
    let scale = 1.0 / grid as f64;
    let coeffs = (-(n_max as i64)..=n_max as i64)
        .map(|n| buf[n.rem_euclid(grid as i64) as usize] * scale)
        .collect();
    Ok(SigmaZFourier { n_max, coeffs })
}

/// Floquet-basis populations in the periodic steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub rho_pp: f64,
    pub rho_mm: f64,
    pub n_max_used: usize,
    pub converged: bool,
}

fn population_ratio(
    coeffs: &SigmaZFourier,
    n_max: usize,
    mu: f64,
    omega0: f64,
    bath: &BathParams,
) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for n in -(n_max as i64)..=n_max as i64 {
        let w = coeffs.get(-n).norm_sqr();
        if w == 0.0 {
            continue;
        }
        let x = n as f64 * omega0 + 2.0 * mu;
        num += j_times_n(x, bath) * w;
        den += j_times_2n_plus_1(x, bath) * w;
    }
    if den <= 0.0 {
        return Err(FloqError::DegenerateSteadyState);
    }
    Ok(num / den)
}

/// Steady state truncated at `n_max`, compared with `n_max + 8`; converged
/// when the two differ by less than `1e-8·ρ₊₊ + 1e-14`.
pub fn steady_state(
    sol: &FloquetSolution,
    bath: &BathParams,
    n_max: usize,
) -> Result<SteadyState> {
    bath.validate()?;
    if sol.degenerate {
        return Err(FloqError::DegenerateFloquet);
    }
    let coeffs = sigma_z_fourier(sol, n_max + 8)?;
    let rho = population_ratio(&coeffs, n_max, sol.mu_pos, sol.omega0, bath)?;
    let wider = population_ratio(&coeffs, n_max + 8, sol.mu_pos, sol.omega0, bath)?;
    Ok(SteadyState {
        rho_pp: rho,
        rho_mm: 1.0 - rho,
        n_max_used: n_max,
        converged: (rho - wider).abs() <= 1e-8 * rho.abs() + 1e-14,
    })
}

pub const DEFAULT_FOURIER_CUTOFF: usize = 64;

/// [`steady_state`] from `n_max = 64`, doubling while unconverged and the
/// sample grid allows.
pub fn steady_state_auto(sol: &FloquetSolution, bath: &BathParams) -> Result<SteadyState> {
    let mut n_max = DEFAULT_FOURIER_CUTOFF.min(sol.grid() / 4 - 8);
    loop {
        let ss = steady_state(sol, bath, n_max)?;
        if ss.converged || 4 * (2 * n_max + 8) > sol.grid() {
            return Ok(ss);
        }
        n_max *= 2;
    }
}

/// `Σ_α ρ_αα ⟨Φ^α(0)|H(0)|Φ^α(0)⟩ - E_g(0)`.
pub fn steady_excitation_energy(ss: &SteadyState, sol: &FloquetSolution, params: &DriveParams) -> f64 {
    let h0 = hamiltonian_at(params, 0.0);
    let e_plus = sol.modes_t0[0].expectation(&h0);
    let e_minus = sol.modes_t0[1].expectation(&h0);
    ss.rho_pp * e_plus + ss.rho_mm * e_minus - ground_energy(params, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub floquet: FloquetOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            floquet: FloquetOptions::default(),
        }
    }
}

/// Steady-state observables for one bath at one drive frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyPoint {
    pub rho_pp: f64,
    pub e_ex_per: f64,
    pub converged: bool,
}

/// One sweep row: the folded gap and one steady point per bath.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub omega0: f64,
    /// True for points added around located gap minima.
    pub refined: bool,
    pub outcome: Result<(f64, Vec<SteadyPoint>)>,
}

fn sweep_point(base: &DriveParams, baths: &[BathParams], omega0: f64, opts: &SweepOptions) -> Result<(f64, Vec<SteadyPoint>)> {
    let params = base.with_omega0(omega0)?;
    let sol = solve_floquet(&params, &opts.floquet)?;
    let points = baths
        .iter()
        .map(|bath| {
            let ss = steady_state_auto(&sol, bath)?;
            Ok(SteadyPoint {
                rho_pp: ss.rho_pp,
                e_ex_per: steady_excitation_energy(&ss, &sol, &params),
                converged: ss.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sol.folded_gap(), points))
}

/// Full pipeline per frequency for several baths (the Floquet solve is
/// shared). Rows keep grid order; a failing row does not stop the sweep.
pub fn sweep_steady_state(
    base: &DriveParams,
    baths: &[BathParams],
    omega0_grid: &[f64],
    opts: &SweepOptions,
) -> Vec<SweepRow> {
    crate::par::map(omega0_grid, |&w| SweepRow {
        omega0: w,
        refined: false,
        outcome: sweep_point(base, baths, w, opts),
    })
}

/// Uniform grid of `points` frequencies on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// [`sweep_steady_state`] followed by golden-section refinement of every
/// interior folded-gap minimum; the refined minimum and points at ±1/4 and
/// ±1/2 of a grid step around it are added. Rows are sorted by ω₀.
pub fn sweep_with_refinement(
    base: &DriveParams,
    baths: &[BathParams],
    omega0_grid: &[f64],
    opts: &SweepOptions,
) -> Vec<SweepRow> {
    let mut rows = sweep_steady_state(base, baths, omega0_grid, opts);
    let gaps: Vec<Option<f64>> = rows
        .iter()
        .map(|r| r.outcome.as_ref().ok().map(|o| o.0))
        .collect();
    let mut extra = Vec::new();
    for i in 1..rows.len().saturating_sub(1) {
        let (Some(l), Some(c), Some(r)) = (gaps[i - 1], gaps[i], gaps[i + 1]) else {
            continue;
        };
        if !(c < l && c <= r) {
            continue;
        }
        let bracket = (rows[i - 1].omega0, rows[i + 1].omega0);
        let gap_at = |w: f64| -> Result<f64> {
            crate::floquet::folded_gap(&base.with_omega0(w)?, &opts.floquet)
        };
        if let Ok((w_star, _)) = golden_section_min(&gap_at, bracket, 1e-8) {
            let step = 0.5 * (bracket.1 - bracket.0);
            for f in [-0.5, -0.25, 0.0, 0.25, 0.5] {
                extra.push(w_star + f * step);
            }
        }
    }
    let mut refined = sweep_steady_state(base, baths, &extra, opts);
    for r in &mut refined {
        r.refined = true;
    }
    rows.extend(refined);
    rows.sort_by(|a, b| a.omega0.total_cmp(&b.omega0));
    rows
}
