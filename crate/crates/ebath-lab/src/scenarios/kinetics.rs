//! Kinetics scenario: assemble the shell rate matrix, relax the initial
//! distribution with the explicit stepper, fit the relaxation rate and
//! cross-check the initial energy flow against the Monte-Carlo oracle.

use std::path::Path;

use ebath::fit::{fit_asymptotic, FitBasis};
use ebath::kinetics::{
    equilibrium_residual, shell_pair_kernel, step, MomentumDistribution, RateMatrix, ShellGrid,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{InitialDistribution, KineticsConfig, ResolvedParams};
use crate::csvio::write_csv;
use crate::mc::maxwellian_energy_flow;
use crate::runner::{numeric, validation, RunError};
use crate::scenarios::to_summary_json;

#[derive(Serialize)]
struct Summary {
    scenario: &'static str,
    seed: u64,
    params: ResolvedParams,
    shells: usize,
    q_max: f64,
    dt: f64,
    steps_taken: usize,
    trace_drift_max: f64,
    equilibrium_residual_bath: f64,
    initial_mean_energy: f64,
    final_mean_energy: f64,
    equilibrium_mean_energy: f64,
    monotone_cooling: bool,
    fitted_rate: f64,
    /// Order-of-magnitude reference α²T³/m².
    rate_scale: f64,
    rate_ratio: f64,
    /// Initial d⟨ε⟩/dt from the rate matrix and from the Monte-Carlo
    /// oracle (Boltzmann initial states only).
    matrix_energy_flow: f64,
    mc_energy_flow: Option<f64>,
    mc_energy_flow_stderr: Option<f64>,
    mc_matrix_ratio: Option<f64>,
}

pub fn run(cfg: &KineticsConfig, seed: u64, out_dir: &Path) -> Result<String, RunError> {
    let params = cfg.physical.resolve().map_err(validation)?;
    if params.temperature <= 0.0 {
        return Err(RunError::Validation("kinetics needs T > 0".into()));
    }
    let m = params.m;
    let t_bath = params.temperature;

    let (initial_te, q_floor) = match &cfg.initial {
        InitialDistribution::Boltzmann { t_e } => {
            (Some(t_e.to_natural().map_err(validation)?), 0.0)
        }
        InitialDistribution::Shell { q0, width } => {
            let q0 = q0.to_natural().map_err(validation)?;
            let w = width.to_natural().map_err(validation)?;
            (None, q0 + 6.0 * w)
        }
    };
    let t_hot = initial_te.unwrap_or(t_bath).max(t_bath);
    let q_max = (cfg.q_max_thermal * (m * t_hot).sqrt()).max(q_floor);
    let grid = ShellGrid::gauss(cfg.shells, q_max).map_err(validation)?;

    // pair kernels in parallel, index order preserved
    let n = grid.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let kernels: Vec<Result<f64, ebath::Error>> = pairs
        .par_iter()
        .map(|&(i, j)| shell_pair_kernel(grid.q[i], grid.q[j], &params, cfg.tolerance))
        .collect();
    let mut s_upper = Vec::with_capacity(kernels.len());
    for k in kernels {
        s_upper.push(k.map_err(numeric)?);
    }
    let matrix = RateMatrix::from_pair_kernels(grid.clone(), &s_upper, &params).map_err(numeric)?;

    let mut rho = match &cfg.initial {
        InitialDistribution::Boltzmann { .. } => {
            MomentumDistribution::boltzmann(grid.clone(), m, initial_te.unwrap())
                .map_err(validation)?
        }
        InitialDistribution::Shell { q0, width } => MomentumDistribution::shell(
            grid.clone(),
            q0.to_natural().map_err(validation)?,
            width.to_natural().map_err(validation)?,
        )
        .map_err(validation)?,
    };

    let bath_eq =
        MomentumDistribution::boltzmann(grid.clone(), m, t_bath).map_err(validation)?;
    let eq_residual = equilibrium_residual(&matrix, &bath_eq);
    let eq_energy = bath_eq.mean_kinetic_energy(m);

    // initial energy flow for the oracle cross-check
    let deriv0 = matrix.apply(&rho.values);
    let matrix_flow: f64 = deriv0
        .iter()
        .enumerate()
        .map(|(i, d)| grid.measure(i) * d * ebath::math::kinetic_energy(m, grid.q[i]))
        .sum();
    let (mc_flow, mc_err, mc_ratio) = match (&cfg.initial, cfg.mc_samples) {
        (InitialDistribution::Boltzmann { .. }, s) if s > 0 => {
            let (flow, err) = maxwellian_energy_flow(&params, initial_te.unwrap(), seed, s);
            (Some(flow), Some(err), Some(flow / matrix_flow))
        }
        _ => (None, None, None),
    };

    let dt = cfg.dt_safety / matrix.max_rate();
    let mut rows = Vec::with_capacity(cfg.steps + 1);
    let mut dist_rows = Vec::new();
    let record = |t: f64, rho: &MomentumDistribution, rows: &mut Vec<Vec<f64>>| {
        rows.push(vec![
            t,
            rho.mean_kinetic_energy(m),
            equilibrium_residual(&matrix, rho),
        ]);
    };
    record(0.0, &rho, &mut rows);
    for (i, &q) in grid.q.iter().enumerate() {
        dist_rows.push(vec![0.0, q, rho.values[i]]);
    }

    let tr0 = rho.trace();
    let mut trace_drift: f64 = 0.0;
    let mut monotone = true;
    let mut t_now = 0.0;
    let mut prev_energy = rho.mean_kinetic_energy(m);
    let mut steps_taken = 0usize;
    for istep in 1..=cfg.steps {
        let mut dt_step = dt;
        let next = loop {
            match step(&matrix, &rho, dt_step) {
                Ok(r) => break r,
                Err(ebath::Error::NegativeDensity { suggested_dt }) => {
                    dt_step = suggested_dt;
                }
                Err(e) => return Err(numeric(e)),
            }
        };
        rho = next;
        t_now += dt_step;
        steps_taken += 1;
        trace_drift = trace_drift.max((rho.trace() - tr0).abs());
        let e_now = rho.mean_kinetic_energy(m);
        if initial_te.map_or(false, |te| te > t_bath) && e_now > prev_energy + 1e-16 {
            monotone = false;
        }
        prev_energy = e_now;
        record(t_now, &rho, &mut rows);
        if istep % cfg.record_every == 0 || istep == cfg.steps {
            for (i, &q) in grid.q.iter().enumerate() {
                dist_rows.push(vec![t_now, q, rho.values[i]]);
            }
        }
    }
    write_csv(
        &out_dir.join("relaxation.csv"),
        &["t", "mean_energy", "residual"],
        &rows,
    )?;
    write_csv(&out_dir.join("distribution.csv"), &["t", "q", "rho"], &dist_rows)?;

    // exponential relaxation rate from ln|<e> - <e>_eq|
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for row in &rows {
        let gap = row[1] - eq_energy;
        if row[0] > 0.0 && gap.abs() > 1e-14 * eq_energy {
            ts.push(row[0]);
            logs.push(gap.abs().ln());
        }
    }
    let fitted_rate = match fit_asymptotic(&ts, &logs, FitBasis::LinearConst) {
        Ok(f) => -f.linear_coeff,
        Err(_) => f64::NAN,
    };
    let rate_scale = params.alpha * params.alpha * t_bath.powi(3) / (m * m);

    let summary = Summary {
        scenario: "kinetics",
        seed,
        params: ResolvedParams::from(&params),
        shells: cfg.shells,
        q_max,
        dt,
        steps_taken,
        trace_drift_max: trace_drift,
        equilibrium_residual_bath: eq_residual,
        initial_mean_energy: rows[0][1],
        final_mean_energy: rows[rows.len() - 1][1],
        equilibrium_mean_energy: eq_energy,
        monotone_cooling: monotone,
        fitted_rate,
        rate_scale,
        rate_ratio: fitted_rate / rate_scale,
        matrix_energy_flow: matrix_flow,
        mc_energy_flow: mc_flow,
        mc_energy_flow_stderr: mc_err,
        mc_matrix_ratio: mc_ratio,
    };
    Ok(to_summary_json(&summary))
}
