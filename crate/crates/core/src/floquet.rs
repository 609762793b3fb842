//! One-period propagators, Floquet modes and quasi-energies.
//!
//! Quasi-energies are defined modulo `ω₀` and are reported in the first
//! Brillouin zone `(-ω₀/2, ω₀/2]`. Because `H(t)` is traceless the two
//! quasi-energies are `±μ`; the mode carrying `+μ ∈ (0, ω₀/2]` is the "+" mode.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{FloqError, Result};
use crate::spin::{instantaneous_spectrum, pauli_eigenvectors, DriveParams, SpinState, Unitary2};

/// Folds `x` into `(-ω₀/2, ω₀/2]`.
pub fn fold(x: f64, omega0: f64) -> f64 {
    let half = 0.5 * omega0;
    let mut y = x - omega0 * (x / omega0).round();
    if y <= -half {
        y += omega0;
    } else if y > half {
        y -= omega0;
    }
    y
}

/// Doublet splitting modulo drive-frequency translations, `min_k |2μ - kω₀|`.
pub fn folded_gap_of(mu: f64, omega0: f64) -> f64 {
    let two_mu = 2.0 * mu;
    (two_mu - omega0 * (two_mu / omega0).round()).abs()
}

/// Time-ordered propagator `U(t1, t0)` by the exponential midpoint rule.
pub fn propagate(params: &DriveParams, t0: f64, t1: f64, steps: usize) -> Result<Unitary2> {
    if !(t1 > t0) {
        return Err(FloqError::InvalidParams(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    if steps == 0 {
        return Err(FloqError::InvalidParams("steps must be at least 1".into()));
    }
    Ok(propagate_unchecked(params, t0, t1, steps))
}

pub(crate) fn propagate_unchecked(params: &DriveParams, t0: f64, t1: f64, steps: usize) -> Unitary2 {
    let h = (t1 - t0) / steps as f64;
    let mut u = Unitary2::identity();
    for k in 0..steps {
        let mid = t0 + (k as f64 + 0.5) * h;
        u = u.then(&Unitary2::exp_pauli(params.field_vector(mid), h));
    }
    u
}

/// Numerical settings for Floquet solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetOptions {
    /// Midpoint steps per period for the first attempt.
    pub initial_steps: usize,
    /// Convergence target on `μ` between successive step doublings.
    pub tolerance: f64,
    pub max_steps: usize,
    /// Number of samples of each mode over one period.
    pub grid: usize,
}

impl Default for FloquetOptions {
    fn default() -> Self {
        FloquetOptions {
            initial_steps: 4096,
            tolerance: 1e-10,
            max_steps: 1 << 24,
            grid: 1024,
        }
    }
}

impl FloquetOptions {
    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }
}

/// `U(τ, 0)` with the step count doubled until `μ` settles.
/// Returns the propagator and the step count used.
pub fn period_propagator(params: &DriveParams, opts: &FloquetOptions) -> Result<(Unitary2, usize)> {
    params.validate()?;
    let tau = params.period();
    let mut steps = opts.initial_steps.max(1);
    let mut u = propagate_unchecked(params, 0.0, tau, steps);
    let mut mu = PeriodEigen::of(&u).phase / tau;
    loop {
        let next_steps = steps * 2;
        if next_steps > opts.max_steps {
            return Err(FloqError::NotConverged(format!(
                "quasi-energy still moving after {steps} steps per period at omega0 = {}",
                params.omega0
            )));
        }
        let next = propagate_unchecked(params, 0.0, tau, next_steps);
        let next_mu = PeriodEigen::of(&next).phase / tau;
        let change = (next_mu - mu).abs();
        u = next;
        mu = next_mu;
        steps = next_steps;
        if change < opts.tolerance {
            return Ok((u, steps));
        }
    }
}

/// `U = exp(-i φ n·σ)` up to a global phase, `φ ∈ [0, π]`.
struct PeriodEigen {
    phase: f64,
    axis: [f64; 3],
}

impl PeriodEigen {
    fn of(u: &Unitary2) -> Self {
        // Strip any global phase so that det = 1.
        let m = u.0 / u.determinant().sqrt();
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let cos_phi = 0.5 * (a + d).re;
        // m = cos φ I - i sin φ (n·σ): read off sin φ · n.
        let sz = -0.5 * (a - d).im;
        let sx = -0.5 * (b + c).im;
        let sy = 0.5 * (c - b).re;
        let s = (sx * sx + sy * sy + sz * sz).sqrt();
        let phase = s.atan2(cos_phi);
        let axis = if s > 0.0 { [sx / s, sy / s, sz / s] } else { [0.0, 0.0, 1.0] };
        PeriodEigen { phase, axis }
    }
}

/// Floquet quasi-energy, modes at `t = 0`, and mode samples over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSolution {
    /// Positive folded quasi-energy `μ ∈ [0, ω₀/2]`.
    pub mu_pos: f64,
    /// `[|Φ⁺(0)⟩, |Φ⁻(0)⟩]`.
    pub modes_t0: [SpinState; 2],
    /// `mode_samples[α][k] = |Φ^α(kτ/grid)⟩` for `k < grid`.
    pub mode_samples: [Vec<SpinState>; 2],
    pub omega0: f64,
    pub period: f64,
    /// Eigenvalues of `U(τ, 0)` coincide; the mode labels are arbitrary.
    pub degenerate: bool,
    pub steps_per_period: usize,
}

impl FloquetSolution {
    pub fn grid(&self) -> usize {
        self.mode_samples[0].len()
    }

    pub fn folded_gap(&self) -> f64 {
        folded_gap_of(self.mu_pos, self.omega0)
    }

    /// Sample times `kτ/grid`.
    pub fn sample_times(&self) -> Vec<f64> {
        let g = self.grid();
        (0..g).map(|k| self.period * k as f64 / g as f64).collect()
    }
}

/// Diagonalises a one-period propagator and samples the periodic modes on
/// `grid` points by re-propagating with `steps_per_period` midpoint steps.
pub fn floquet_diagonalize(
    u_period: &Unitary2,
    params: &DriveParams,
    grid: usize,
    steps_per_period: usize,
) -> Result<FloquetSolution> {
    params.validate()?;
    if grid == 0 {
        return Err(FloqError::InvalidParams("grid must be at least 1".into()));
    }
    let tau = params.period();
    let eig = PeriodEigen::of(u_period);
    // Eigenvalues e^{∓iφ} differ by 2 sin φ.
    let degenerate = 2.0 * eig.phase.sin() < 1e-14;
    let (plus, minus) = pauli_eigenvectors(eig.axis).expect("axis is a unit vector");
    let mu = eig.phase / tau;
    let mu_pos = if mu > 0.5 * params.omega0 { 0.5 * params.omega0 } else { mu };

    let substeps = steps_per_period.div_ceil(grid).max(1);
    let dt = tau / grid as f64;
    let mut samples_p = Vec::with_capacity(grid);
    let mut samples_m = Vec::with_capacity(grid);
    let mut u = Unitary2::identity();
    for k in 0..grid {
        let t = k as f64 * dt;
        if k > 0 {
            u = u.then(&propagate_unchecked(params, t - dt, t, substeps));
        }
        let phase = C64::from_polar(1.0, mu * t);
        samples_p.push(u.apply(&plus).scale(phase));
        samples_m.push(u.apply(&minus).scale(phase.conj()));
    }

    Ok(FloquetSolution {
        mu_pos,
        modes_t0: [plus, minus],
        mode_samples: [samples_p, samples_m],
        omega0: params.omega0,
        period: tau,
        degenerate,
        steps_per_period: substeps * grid,
    })
}

/// Converged period propagator followed by [`floquet_diagonalize`].
pub fn solve_floquet(params: &DriveParams, opts: &FloquetOptions) -> Result<FloquetSolution> {
    let (u, steps) = period_propagator(params, opts)?;
    floquet_diagonalize(&u, params, opts.grid, steps)
}

/// Positive folded quasi-energy only, skipping the mode samples.
pub fn quasienergy(params: &DriveParams, opts: &FloquetOptions) -> Result<f64> {
    let (u, _) = period_propagator(params, opts)?;
    Ok(PeriodEigen::of(&u).phase / params.period())
}

/// Folded gap at the given drive.
pub fn folded_gap(params: &DriveParams, opts: &FloquetOptions) -> Result<f64> {
    Ok(folded_gap_of(quasienergy(params, opts)?, params.omega0))
}

/// Period average of the instantaneous excited energy, not folded.
pub fn adiabatic_quasienergy_unfolded(params: &DriveParams) -> f64 {
    let (d, e, a) = (params.delta, params.epsilon, params.amplitude);
    // Both drive forms average the same integrand over a full cycle.
    let f = |x: f64| d.hypot(e + a * x.sin());
    // Periodic trapezoid: spectrally accurate for the analytic case, and
    // still second order when Δ = 0 leaves a kink.
    let mut n = 64usize;
    let mut prev = trapezoid_periodic(&f, n);
    loop {
        n *= 2;
        let next = trapezoid_periodic(&f, n);
        if (next - prev).abs() < 1e-12 || n >= 1 << 22 {
            return next;
        }
        prev = next;
    }
}

fn trapezoid_periodic(f: &impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|k| f(k as f64 * h)).sum::<f64>() / n as f64
}

/// Adiabatic quasi-energy of the excited level, folded into the first zone.
pub fn adiabatic_quasienergy(params: &DriveParams) -> f64 {
    fold(adiabatic_quasienergy_unfolded(params), params.omega0)
}

/// `|⟨Φ⁺(0)|g(0)⟩|²`.
pub fn ground_overlap(sol: &FloquetSolution, params: &DriveParams) -> Result<f64> {
    if sol.degenerate {
        return Err(FloqError::DegenerateFloquet);
    }
    let g = instantaneous_spectrum(params, 0.0)?.ground;
    Ok(sol.modes_t0[0].overlap(&g).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub omega0_star: f64,
    pub folded_gap: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResonanceList {
    pub resonances: Vec<Resonance>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceSearch {
    /// A minimum counts as a quasi-degeneracy when `gap < fraction · ω₀*`.
    pub threshold_fraction: f64,
    /// Golden-section tolerance on `ω₀`.
    pub tolerance: f64,
    pub floquet: FloquetOptions,
}

impl Default for ResonanceSearch {
    fn default() -> Self {
        ResonanceSearch {
            threshold_fraction: 1.0 / 50.0,
            tolerance: 1e-8,
            floquet: FloquetOptions::default(),
        }
    }
}

/// Scans the folded gap over `window` and refines each local minimum by
/// golden-section search. `base.omega0` is ignored.
pub fn locate_resonances(
    base: &DriveParams,
    window: (f64, f64),
    scan_points: usize,
    search: &ResonanceSearch,
) -> Result<ResonanceList> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(FloqError::InvalidParams(format!("bad frequency window [{lo}, {hi}]")));
    }
    if scan_points < 3 {
        return Err(FloqError::InvalidParams("scan_points must be at least 3".into()));
    }
    let step = (hi - lo) / (scan_points - 1) as f64;
    let omegas: Vec<f64> = (0..scan_points).map(|i| lo + step * i as f64).collect();
    let gap_at = |w: f64| -> Result<f64> { folded_gap(&base.with_omega0(w)?, &search.floquet) };
    let gaps = crate::par::try_map(&omegas, |&w| gap_at(w))?;

    let minima: Vec<usize> = (1..scan_points - 1)
        .filter(|&i| gaps[i] < gaps[i - 1] && gaps[i] <= gaps[i + 1])
        .collect();

    let mut list = ResonanceList::default();
    for pair in minima.windows(2) {
        if pair[1] - pair[0] <= 2 {
            list.warnings.push(format!(
                "minima near omega0 = {:.6} and {:.6} are within scan resolution; quasi-degeneracies may be unresolved",
                omegas[pair[0]], omegas[pair[1]]
            ));
        }
    }

    let refined = crate::par::try_map(&minima, |&i| {
        let bracket = (omegas[i - 1], omegas[i + 1]);
        let (w, g) = golden_section_min(&gap_at, bracket, search.tolerance)?;
        Ok(Resonance {
            omega0_star: w,
            folded_gap: g,
            bracket,
        })
    })?;
    list.resonances = refined
        .into_iter()
        .filter(|r| r.folded_gap < search.threshold_fraction * r.omega0_star)
        .collect();
    Ok(list)
}

pub(crate) fn golden_section_min(
    f: &impl Fn(f64) -> Result<f64>,
    (mut a, mut b): (f64, f64),
    tol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    Ok(if fx <= fc.min(fd) {
        (x, fx)
    } else if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    })
}

/// Central quasi-energies from a truncated Shirley matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ShirleySpectrum {
    /// The two eigenvalues nearest zero, folded and sorted.
    pub folded: [f64; 2],
    /// `max(folded)`; comparable with [`FloquetSolution::mu_pos`].
    pub mu_pos: f64,
    pub n_max: usize,
    /// The folded pair moved by less than 1e-8 when `n_max` grew by 4.
    pub converged: bool,
}

/// Eigenvalues of the truncated Shirley matrix with harmonics `|n| ≤ n_max`.
///
/// The matrix is assembled in a gauge where it is real symmetric: for the
/// sine drive, `ψ_n → iⁿ ψ_n` turns the `(A/2i)σ^z` hoppings into `(A/2)σ^z`;
/// the cosine drive is brought to the same matrix by a σ^z rotation taking
/// σ^y to σ^x. Neither transformation changes the spectrum.
pub fn shirley_eigenvalues(params: &DriveParams, n_max: usize) -> Vec<f64> {
    let blocks = 2 * n_max + 1;
    let dim = 2 * blocks;
    let (e, d, half_a) = (params.epsilon, params.delta, 0.5 * params.amplitude);
    let mut k = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..blocks {
        let n = j as f64 - n_max as f64;
        let i = 2 * j;
        k[(i, i)] = e - n * params.omega0;
        k[(i + 1, i + 1)] = -e - n * params.omega0;
        k[(i, i + 1)] = d;
        k[(i + 1, i)] = d;
        if j + 1 < blocks {
            let i2 = i + 2;
            k[(i, i2)] = half_a;
            k[(i2, i)] = half_a;
            k[(i + 1, i2 + 1)] = -half_a;
            k[(i2 + 1, i + 1)] = -half_a;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(k).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn central_pair(params: &DriveParams, n_max: usize) -> [f64; 2] {
    let mut ev = shirley_eigenvalues(params, n_max);
    ev.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut pair = [fold(ev[0], params.omega0), fold(ev[1], params.omega0)];
    pair.sort_by(|a, b| a.total_cmp(b));
    pair
}

/// Folded central quasi-energies at truncation `n_max`, with a convergence
/// check against `n_max + 4`.
pub fn shirley_quasienergies(params: &DriveParams, n_max: usize) -> Result<ShirleySpectrum> {
    params.validate()?;
    if n_max < 2 {
        return Err(FloqError::InvalidParams("n_max must be at least 2".into()));
    }
    let pair = central_pair(params, n_max);
    let wider = central_pair(params, n_max + 4);
    let moved = pair
        .iter()
        .zip(wider.iter())
        .map(|(a, b)| fold(a - b, params.omega0).abs())
        .fold(0.0, f64::max);
    Ok(ShirleySpectrum {
        folded: pair,
        mu_pos: pair[1],
        n_max,
        converged: moved <= 1e-8,
    })
}

/// Grows `n_max` from a drive-dependent starting point until converged.
pub fn shirley_quasienergies_converged(params: &DriveParams) -> Result<ShirleySpectrum> {
    params.validate()?;
    let reach = (params.amplitude.abs() + params.static_energy()) / params.omega0;
    let mut n_max = ((3.0 * reach).ceil() as usize).max(16);
    loop {
        let s = shirley_quasienergies(params, n_max)?;
        if s.converged {
            return Ok(s);
        }
        if n_max > 4096 {
            return Err(FloqError::NotConverged(format!(
                "Shirley truncation n_max = {n_max} at omega0 = {}",
                params.omega0
            )));
        }
        n_max *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{sigma_x, sigma_z, Mat2};

    fn fig_params(omega0: f64) -> DriveParams {
        DriveParams::new(1.0, 1.0, 2.0, omega0).unwrap()
    }

    #[test]
    fn fold_range_and_edges() {
        let w = 0.4;
        assert_eq!(fold(0.2, w), 0.2);
        assert_eq!(fold(-0.2, w), 0.2);
        assert!((fold(0.5, w) - 0.1).abs() < 1e-15);
        assert!((fold(-0.3, w) - 0.1).abs() < 1e-15);
        assert_eq!(fold(0.0, w), 0.0);
    }

    #[test]
    fn folded_gap_examples() {
        assert_eq!(folded_gap_of(0.0, 1.0), 0.0);
        assert!((folded_gap_of(0.25, 1.0) - 0.5).abs() < 1e-15);
        assert!((folded_gap_of(0.5, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn static_propagator_is_exact() {
        let p = DriveParams::new(1.0, 1.0, 0.0, 0.3).unwrap();
        let exact = Unitary2::exp_pauli([1.0, 0.0, 1.0], 1.0);
        for steps in [1, 7, 128] {
            let u = propagate(&p, 0.0, 1.0, steps).unwrap();
            assert!(u.distance(&exact) < 1e-13, "steps {steps}");
        }
        // Also matches a direct matrix series of exp(-i(σ^z + σ^x)).
        let h = sigma_x() + sigma_z();
        let mut term = Mat2::identity();
        let mut series = Mat2::identity();
        for k in 1..40 {
            term = term * h * C64::new(0.0, -1.0 / k as f64);
            series += term;
        }
        assert!((exact.0 - series).norm() < 1e-13);
    }

    #[test]
    fn propagate_rejects_bad_interval() {
        let p = fig_params(0.19);
        assert!(propagate(&p, 1.0, 1.0, 4).is_err());
        assert!(propagate(&p, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn period_propagator_is_unitary() {
        let p = fig_params(0.19);
        let u = propagate(&p, 0.0, p.period(), 4096).unwrap();
        assert!(u.unitarity_defect() < 1e-12, "{}", u.unitarity_defect());
    }

    #[test]
    fn midpoint_rule_is_second_order() {
        let p = fig_params(0.19);
        let tau = p.period();
        let reference = propagate(&p, 0.0, tau, 1 << 16).unwrap();
        let errs: Vec<f64> = [1 << 9, 1 << 10, 1 << 11]
            .iter()
            .map(|&n| propagate(&p, 0.0, tau, n).unwrap().distance(&reference))
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.9, "observed order {order} from {errs:?}");
        }
    }

    #[test]
    fn identity_is_degenerate() {
        let p = DriveParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let sol = floquet_diagonalize(&Unitary2::identity(), &p, 8, 8).unwrap();
        assert!(sol.degenerate);
        assert_eq!(sol.mu_pos, 0.0);
        assert!(sol.modes_t0[0].inner(&sol.modes_t0[1]).norm() < 1e-15);
        assert_eq!(ground_overlap(&sol, &p), Err(FloqError::DegenerateFloquet));
    }

    #[test]
    fn diagonal_unitary_gives_sigma_z_modes() {
        let theta = 0.3;
        let u = Unitary2(Mat2::new(
            C64::from_polar(1.0, -theta),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, theta),
        ));
        let p = DriveParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let sol = floquet_diagonalize(&u, &p, 4, 4).unwrap();
        assert!(!sol.degenerate);
        assert!((sol.mu_pos - theta / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(sol.modes_t0[0], SpinState::up());
        assert!((sol.modes_t0[1].overlap(&SpinState::down()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn static_drive_modes_are_eigenstates() {
        let p = DriveParams::new(1.0, 1.0, 0.0, 0.7).unwrap();
        let sol = solve_floquet(&p, &FloquetOptions::default().with_grid(16)).unwrap();
        let e = p.static_energy();
        assert!((sol.mu_pos - fold(e, p.omega0).abs()).abs() < 1e-12);
        let ov = ground_overlap(&sol, &p).unwrap();
        assert!(ov < 1e-20 || (1.0 - ov) < 1e-20, "overlap {ov}");
    }

    #[test]
    fn mode_samples_are_periodic() {
        let p = fig_params(0.5);
        let sol = solve_floquet(&p, &FloquetOptions::default().with_grid(64)).unwrap();
        let tau = p.period();
        let g = sol.grid();
        let last_t = tau * (g - 1) as f64 / g as f64;
        for (alpha, sign) in [(0usize, 1.0), (1, -1.0)] {
            // Advance the last sample by one grid step and compare with t = 0.
            let u = propagate(&p, last_t, tau, sol.steps_per_period / g).unwrap();
            let phase = C64::from_polar(1.0, sign * sol.mu_pos * (tau - last_t));
            let wrapped = u.apply(&sol.mode_samples[alpha][g - 1]).scale(phase);
            assert!((wrapped.0 - sol.modes_t0[alpha].0).norm() < 1e-8);
        }
    }

    #[test]
    fn adiabatic_quasienergy_limits() {
        let p = DriveParams::new(1.0, 1.0, 0.0, 0.3).unwrap();
        assert!((adiabatic_quasienergy(&p) - fold(2f64.sqrt(), 0.3)).abs() < 1e-14);
        let p = DriveParams::new(1.0, 0.0, 1e-9, 0.7).unwrap();
        assert!((adiabatic_quasienergy(&p) - fold(1.0, 0.7)).abs() < 1e-12);
    }

    #[test]
    fn adiabatic_quasienergy_matches_simpson_oracle() {
        // Composite Simpson on 2·10⁶ panels is an independent route.
        let f = |x: f64| (1.0 + (1.0 + 2.0 * x.sin()).powi(2)).sqrt();
        let n = 2_000_000;
        let h = 2.0 * PI / n as f64;
        let mut s = f(0.0) + f(2.0 * PI);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        let oracle = s * h / 3.0 / (2.0 * PI);
        let got = adiabatic_quasienergy_unfolded(&fig_params(0.19));
        assert!((got - oracle).abs() < 1e-10, "{got} vs {oracle}");
    }

    #[test]
    fn adiabatic_quasienergy_with_kink() {
        // Δ = 0: the average of |ε + A sin x| with ε = 1, A = 2 has a closed form.
        let p = DriveParams::new(0.0, 1.0, 2.0, 0.3).unwrap();
        // Roots of 1 + 2 sin x at x = 7π/6, 11π/6.
        let (x1, x2) = (7.0 * PI / 6.0, 11.0 * PI / 6.0);
        let prim = |x: f64| x - 2.0 * x.cos();
        let total = prim(2.0 * PI) - prim(0.0);
        let neg = prim(x2) - prim(x1);
        let exact = (total - 2.0 * neg) / (2.0 * PI);
        assert!((adiabatic_quasienergy_unfolded(&p) - exact).abs() < 1e-10);
    }

    #[test]
    fn shirley_static_spectrum() {
        let p = DriveParams::new(1.0, 1.0, 0.0, 0.37).unwrap();
        let ev = shirley_eigenvalues(&p, 5);
        let e = 2f64.sqrt();
        let mut expected: Vec<f64> = (-5..=5)
            .flat_map(|n| [e - n as f64 * 0.37, -e - n as f64 * 0.37])
            .collect();
        expected.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in ev.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        let s = shirley_quasienergies(&p, 5).unwrap();
        assert!(s.converged);
        assert!((s.mu_pos - fold(e, 0.37).abs()).abs() < 1e-12);
    }

    #[test]
    fn shirley_gauge_matches_complex_blocks() {
        // Assemble the complex Hermitian matrix with (A/2i)σ^z hoppings and
        // compare spectra with the real gauge.
        let p = DriveParams::new(0.8, 0.6, 1.3, 0.9).unwrap();
        let n_max = 6usize;
        let blocks = 2 * n_max + 1;
        let dim = 2 * blocks;
        let mut k = DMatrix::<C64>::zeros(dim, dim);
        let hop = C64::new(0.0, -0.5 * p.amplitude);
        for j in 0..blocks {
            let n = j as f64 - n_max as f64;
            let i = 2 * j;
            k[(i, i)] = C64::new(p.epsilon - n * p.omega0, 0.0);
            k[(i + 1, i + 1)] = C64::new(-p.epsilon - n * p.omega0, 0.0);
            k[(i, i + 1)] = C64::new(p.delta, 0.0);
            k[(i + 1, i)] = C64::new(p.delta, 0.0);
            if j + 1 < blocks {
                k[(i, i + 2)] = hop;
                k[(i + 1, i + 3)] = -hop;
                k[(i + 2, i)] = hop.conj();
                k[(i + 3, i + 1)] = -hop.conj();
            }
        }
        let mut complex: Vec<f64> = k.symmetric_eigenvalues().iter().copied().collect();
        complex.sort_by(|a, b| a.total_cmp(b));
        let real = shirley_eigenvalues(&p, n_max);
        for (a, b) in complex.iter().zip(real.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn shirley_agrees_with_propagator() {
        let p = fig_params(0.19);
        let s = shirley_quasienergies_converged(&p).unwrap();
        let mu = quasienergy(&p, &FloquetOptions::default()).unwrap();
        assert!((s.mu_pos - mu).abs() < 1e-8, "shirley {} propagator {mu}", s.mu_pos);
    }

    #[test]
    fn empty_window_has_no_resonances() {
        // A weak drive far from 2E/m for small m: the folded gap stays large.
        let p = DriveParams::new(1.0, 1.0, 0.01, 1.0).unwrap();
        let list = locate_resonances(&p, (1.8, 1.9), 9, &ResonanceSearch::default()).unwrap();
        assert!(list.resonances.is_empty());
    }

    #[test]
    fn weak_drive_resonance_near_two_e_over_two() {
        let p = DriveParams::new(1.0, 1.0, 0.01, 1.0).unwrap();
        let root2 = 2f64.sqrt();
        let list =
            locate_resonances(&p, (root2 - 0.01, root2 + 0.01), 21, &ResonanceSearch::default())
                .unwrap();
        assert_eq!(list.resonances.len(), 1, "{list:?}");
        let shift = (list.resonances[0].omega0_star - root2).abs();
        // O(A²) shift.
        assert!(shift < 10.0 * 0.01 * 0.01, "shift {shift}");
    }

    #[test]
    fn locate_rejects_bad_input() {
        let p = fig_params(0.19);
        let s = ResonanceSearch::default();
        assert!(locate_resonances(&p, (0.2, 0.19), 10, &s).is_err());
        assert!(locate_resonances(&p, (0.19, 0.2), 2, &s).is_err());
    }
}
