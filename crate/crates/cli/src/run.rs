//! Experiment dispatch: one or more CSV tables per configuration.

use std::path::{Path, PathBuf};

use floqlab::dissipation::{sweep_steady_state, sweep_with_refinement, BathParams, SweepOptions};
use floqlab::dynamics::{classical_llg_sampled, evolve_unitary_sampled};
use floqlab::floquet::{
    adiabatic_quasienergy, fold, ground_overlap, locate_resonances, solve_floquet, FloquetOptions,
    ResonanceSearch,
};
use floqlab::ladder::evolve_ladder;
use floqlab::spin::instantaneous_spectrum;
use floqlab::{FloqError, SpinState};
use thiserror::Error;

use crate::config::{Experiment, Initial, RunConfig};
use crate::output::{Cell, Table};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: FloqError,
    },
    /// Sweep tables were written, but some rows carry errors.
    #[error("{failed} of {total} rows failed; see the error column in {}", path.display())]
    PartialSweep { failed: usize, total: usize, path: PathBuf },
    #[error("writing {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn numerical(context: impl Into<String>) -> impl FnOnce(FloqError) -> RunError {
    let context = context.into();
    move |source| RunError::Numerical { context, source }
}

fn floquet_options(cfg: &RunConfig) -> FloquetOptions {
    FloquetOptions {
        tolerance: cfg.tolerance,
        ..FloquetOptions::default()
    }
    .with_grid(cfg.grid)
}

/// Runs the configured experiment, writing tables into `out`. Returns the
/// written paths in order.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, RunError> {
    let tables = match cfg.experiment {
        Experiment::QuasienergyScan => vec![quasienergy_scan(cfg)],
        Experiment::OverlapScan => vec![overlap_scan(cfg)],
        Experiment::Dynamics => vec![dynamics(cfg)?],
        Experiment::Llg => llg(cfg)?,
        Experiment::Ladder => vec![ladder(cfg)?],
        Experiment::ResonanceLocate => vec![resonance_locate(cfg)?],
        Experiment::SteadySweep => steady_sweep(cfg)?,
    };
    let mut paths = Vec::new();
    let mut partial = None;
    for (name, table, failed) in tables {
        let path = table
            .save(out, &name)
            .map_err(|source| RunError::Io { path: out.join(&name), source })?;
        if failed > 0 && partial.is_none() {
            partial = Some(RunError::PartialSweep {
                failed,
                total: table.rows.len(),
                path: path.clone(),
            });
        }
        paths.push(path);
    }
    match partial {
        Some(e) => Err(e),
        None => Ok(paths),
    }
}

/// File name, table, and number of failed rows.
type Output = (String, Table, usize);

fn preamble(cfg: &RunConfig, extra: &[String]) -> Vec<String> {
    let mut lines = vec![format!("floqlab {}", env!("CARGO_PKG_VERSION"))];
    lines.extend(cfg.provenance());
    lines.extend(extra.iter().cloned());
    lines
}

fn file_name(cfg: &RunConfig, suffix: Option<String>) -> String {
    match suffix {
        Some(s) => format!("{}_{s}.csv", cfg.output),
        None => format!("{}.csv", cfg.output),
    }
}

fn error_cell(e: &FloqError) -> Cell {
    Cell::Text(e.to_string())
}

fn quasienergy_scan(cfg: &RunConfig) -> Output {
    let opts = floquet_options(cfg);
    let grid = cfg.omega0_grid();
    let rows = rayon_map(&grid, |&w| -> floqlab::Result<[f64; 4]> {
        let p = cfg.params.with_omega0(w)?;
        let sol = solve_floquet(&p, &opts)?;
        let ad = adiabatic_quasienergy(&p);
        Ok([sol.mu_pos, sol.folded_gap(), ad, fold(-ad, w)])
    });
    let mut t = Table::new(
        preamble(cfg, &[]),
        vec!["omega0", "mu", "folded_gap", "mu_ad_excited", "mu_ad_ground", "error"],
    );
    let mut failed = 0;
    for (&w, r) in grid.iter().zip(rows) {
        match r {
            Ok(v) => t.push(vec![w.into(), v[0].into(), v[1].into(), v[2].into(), v[3].into(), Cell::Text(String::new())]),
            Err(e) => {
                failed += 1;
                let nan = || Cell::Num(f64::NAN);
                t.push(vec![w.into(), nan(), nan(), nan(), nan(), error_cell(&e)]);
            }
        }
    }
    (file_name(cfg, None), t, failed)
}

fn overlap_scan(cfg: &RunConfig) -> Output {
    let opts = floquet_options(cfg);
    let grid = cfg.omega0_grid();
    let rows = rayon_map(&grid, |&w| -> floqlab::Result<[f64; 2]> {
        let p = cfg.params.with_omega0(w)?;
        let sol = solve_floquet(&p, &opts)?;
        Ok([ground_overlap(&sol, &p)?, sol.folded_gap()])
    });
    let mut t = Table::new(preamble(cfg, &[]), vec!["omega0", "overlap_plus", "folded_gap", "error"]);
    let mut failed = 0;
    for (&w, r) in grid.iter().zip(rows) {
        match r {
            Ok(v) => t.push(vec![w.into(), v[0].into(), v[1].into(), Cell::Text(String::new())]),
            Err(e) => {
                failed += 1;
                t.push(vec![w.into(), Cell::Num(f64::NAN), Cell::Num(f64::NAN), error_cell(&e)]);
            }
        }
    }
    (file_name(cfg, None), t, failed)
}

fn initial_state(cfg: &RunConfig) -> Result<SpinState, RunError> {
    Ok(match cfg.initial {
        Initial::Up => SpinState::up(),
        Initial::Down => SpinState::down(),
        Initial::Ground => {
            instantaneous_spectrum(&cfg.params, 0.0)
                .map_err(numerical("ground state at t = 0"))?
                .ground
        }
    })
}

fn dynamics(cfg: &RunConfig) -> Result<Output, RunError> {
    let psi0 = initial_state(cfg)?;
    let traj = evolve_unitary_sampled(
        &cfg.params,
        &psi0,
        cfg.n_periods,
        cfg.steps_per_period,
        cfg.samples_per_period,
    )
    .map_err(numerical("unitary evolution"))?;
    let mut t = Table::new(
        preamble(cfg, &[]),
        vec!["t", "sigma_x", "sigma_y", "sigma_z", "e_ex"],
    );
    for i in 0..traj.len() {
        let s = traj.sigma[i];
        t.push(vec![traj.times[i].into(), s[0].into(), s[1].into(), s[2].into(), traj.e_ex[i].into()]);
    }
    Ok((file_name(cfg, None), t, 0))
}

fn llg(cfg: &RunConfig) -> Result<Vec<Output>, RunError> {
    let m0 = initial_state(cfg)?.bloch_vector();
    let runs = rayon_map(&cfg.lambdas, |&lambda| {
        classical_llg_sampled(
            &cfg.params,
            m0,
            lambda,
            cfg.n_periods,
            cfg.steps_per_period,
            cfg.samples_per_period,
        )
    });
    let mut out = Vec::new();
    for (lambda, run) in cfg.lambdas.iter().zip(runs) {
        let traj = run.map_err(numerical(format!("LLG at lambda = {lambda}")))?;
        let mut t = Table::new(
            preamble(cfg, &[format!("lambda = {lambda:e}"), format!("max_norm_drift = {:e}", traj.max_norm_drift)]),
            vec!["t", "m_x", "m_y", "m_z", "e_ex"],
        );
        for i in 0..traj.times.len() {
            let m = traj.m[i];
            t.push(vec![traj.times[i].into(), m[0].into(), m[1].into(), m[2].into(), traj.e_ex[i].into()]);
        }
        out.push((file_name(cfg, Some(format!("lambda{lambda}"))), t, 0));
    }
    Ok(out)
}

fn ladder(cfg: &RunConfig) -> Result<Output, RunError> {
    let run = evolve_ladder(&cfg.params, cfg.n_half_width, cfg.n_periods, cfg.samples_per_period)
        .map_err(numerical("ladder evolution"))?;
    let mut t = Table::new(
        preamble(cfg, &[format!("max_boundary_occupation = {:e}", run.max_boundary_occupation)]),
        vec!["t", "p_plus", "p_minus"],
    );
    for i in 0..run.times.len() {
        t.push(vec![run.times[i].into(), run.p_plus[i].into(), run.p_minus[i].into()]);
    }
    Ok((file_name(cfg, None), t, 0))
}

fn resonance_locate(cfg: &RunConfig) -> Result<Output, RunError> {
    let search = ResonanceSearch {
        floquet: floquet_options(cfg),
        ..ResonanceSearch::default()
    };
    let found = locate_resonances(
        &cfg.params,
        (cfg.omega0_min, cfg.omega0_max),
        cfg.omega0_points,
        &search,
    )
    .map_err(numerical("resonance search"))?;
    let warnings: Vec<String> = found.warnings.iter().map(|w| format!("warning: {w}")).collect();
    let mut t = Table::new(
        preamble(cfg, &warnings),
        vec!["omega0_star", "folded_gap", "bracket_lo", "bracket_hi"],
    );
    for r in &found.resonances {
        t.push(vec![r.omega0_star.into(), r.folded_gap.into(), r.bracket.0.into(), r.bracket.1.into()]);
    }
    Ok((file_name(cfg, None), t, 0))
}

fn steady_sweep(cfg: &RunConfig) -> Result<Vec<Output>, RunError> {
    let baths = cfg
        .temperatures
        .iter()
        .map(|&temp| BathParams::new(cfg.gamma, cfg.cutoff, temp))
        .collect::<Result<Vec<_>, _>>()
        .map_err(numerical("bath parameters"))?;
    let opts = SweepOptions {
        floquet: floquet_options(cfg),
    };
    let grid = cfg.omega0_grid();
    let rows = if cfg.refine {
        sweep_with_refinement(&cfg.params, &baths, &grid, &opts)
    } else {
        sweep_steady_state(&cfg.params, &baths, &grid, &opts)
    };
    let mut out = Vec::new();
    for (b, bath) in baths.iter().enumerate() {
        let mut t = Table::new(
            preamble(cfg, &[format!("temperature = {:e}", bath.temperature)]),
            vec!["omega0", "folded_gap", "rho_pp", "e_ex_per", "refined", "converged", "error"],
        );
        let mut failed = 0;
        for row in &rows {
            let refined = Cell::Int(row.refined as i64);
            match &row.outcome {
                Ok((gap, points)) => {
                    let p = points[b];
                    t.push(vec![
                        row.omega0.into(),
                        (*gap).into(),
                        p.rho_pp.into(),
                        p.e_ex_per.into(),
                        refined,
                        Cell::Int(p.converged as i64),
                        Cell::Text(String::new()),
                    ]);
                }
                Err(e) => {
                    failed += 1;
                    let nan = || Cell::Num(f64::NAN);
                    t.push(vec![row.omega0.into(), nan(), nan(), nan(), refined, Cell::Int(0), error_cell(e)]);
                }
            }
        }
        out.push((file_name(cfg, Some(format!("T{}", bath.temperature))), t, failed));
    }
    Ok(out)
}

fn rayon_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}
