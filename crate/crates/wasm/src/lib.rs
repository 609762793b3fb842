//! Browser bindings. Every function returns a flat `Float64Array` of
//! fixed-width rows so the page can plot without any decoding layer.

use floqlab::dissipation::{sweep_steady_state, uniform_grid, BathParams, SweepOptions};
use floqlab::dynamics::evolve_unitary_sampled;
use floqlab::floquet::{solve_floquet, FloquetOptions};
use floqlab::spin::instantaneous_spectrum;
use floqlab::{DriveParams, FloqError};
use wasm_bindgen::prelude::*;

// Interactive use trades the last digits for responsiveness.
fn interactive() -> FloquetOptions {
    FloquetOptions {
        tolerance: 1e-8,
        ..FloquetOptions::default()
    }
    .with_grid(256)
}

fn js(e: FloqError) -> JsError {
    JsError::new(&e.to_string())
}

fn sweep_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, JsError> {
    if !(lo > 0.0 && hi > lo) || points < 2 {
        return Err(JsError::new("need 0 < lo < hi and at least 2 points"));
    }
    Ok(uniform_grid(lo, hi, points))
}

/// Rows `[omega0, mu, folded_gap]`; failed rows carry NaN.
#[wasm_bindgen]
pub fn quasienergy_scan(
    delta: f64,
    epsilon: f64,
    amplitude: f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let base = DriveParams::new(delta, epsilon, amplitude, lo).map_err(js)?;
    let opts = interactive();
    let mut out = Vec::with_capacity(3 * points);
    for w in sweep_grid(lo, hi, points)? {
        let row = base
            .with_omega0(w)
            .and_then(|p| solve_floquet(&p, &opts))
            .map(|s| [s.mu_pos, s.folded_gap()])
            .unwrap_or([f64::NAN; 2]);
        out.extend([w, row[0], row[1]]);
    }
    Ok(out)
}

/// Rows `[t, e_ex]`, 16 per period, starting in the ground state.
#[wasm_bindgen]
pub fn excitation_trace(
    delta: f64,
    epsilon: f64,
    amplitude: f64,
    omega0: f64,
    n_periods: usize,
) -> Result<Vec<f64>, JsError> {
    let p = DriveParams::new(delta, epsilon, amplitude, omega0).map_err(js)?;
    let g = instantaneous_spectrum(&p, 0.0).map_err(js)?.ground;
    let traj = evolve_unitary_sampled(&p, &g, n_periods, 2048, 16).map_err(js)?;
    Ok(traj.times.iter().zip(&traj.e_ex).flat_map(|(&t, &e)| [t, e]).collect())
}

/// Rows `[omega0, folded_gap, e_ex_per]` for the Ohmic bath at `temperature`.
#[wasm_bindgen]
pub fn steady_sweep(
    delta: f64,
    epsilon: f64,
    amplitude: f64,
    temperature: f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let base = DriveParams::new(delta, epsilon, amplitude, lo).map_err(js)?;
    let bath = BathParams::new(0.01, 500.0, temperature).map_err(js)?;
    let opts = SweepOptions {
        floquet: interactive(),
    };
    let rows = sweep_steady_state(&base, &[bath], &sweep_grid(lo, hi, points)?, &opts);
    Ok(rows
        .iter()
        .flat_map(|r| match &r.outcome {
            Ok((gap, pts)) => [r.omega0, *gap, pts[0].e_ex_per],
            Err(_) => [r.omega0, f64::NAN, f64::NAN],
        })
        .collect())
}
