//! Infrared-exponent scenario: evaluates g(t) over a time grid, fits the
//! large-time model a·t + b·ln t + c, and reports the fitted coefficients
//! against the regime targets.

use std::path::Path;

use ebath::density_matrix::ir_decoherence_factor;
use ebath::fourvec::dot3;
use ebath::ir_kernel::{
    asymptotic_fit, damping_from_exponent, g_exponent, thermal_linear_target,
    vacuum_log_target_early, vacuum_log_target_late, KernelInput,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{IrKernelConfig, KernelMode, ResolvedParams};
use crate::csvio::write_csv;
use crate::runner::{numeric, validation, RunError};
use crate::scenarios::to_summary_json;

#[derive(Serialize)]
struct Summary {
    scenario: &'static str,
    seed: u64,
    params: ResolvedParams,
    mode: KernelMode,
    q: f64,
    p: f64,
    rel_tol: f64,
    fitted_linear: f64,
    fitted_log: f64,
    fitted_const: f64,
    fit_residual_rms: f64,
    /// Leading thermal slope −(1/3π)(p²/m²)T.
    thermal_linear_target: f64,
    linear_ratio: f64,
    /// Vacuum ln t coefficients for the two regimes.
    vacuum_log_target_early: f64,
    vacuum_log_target_late: f64,
    log_ratio_early: f64,
    log_ratio_late: f64,
    /// Worst |exp(e²g/2) − closed-form decoherence factor| over the grid.
    damping_max_abs_dev: f64,
}

pub fn run(cfg: &IrKernelConfig, seed: u64, out_dir: &Path) -> Result<String, RunError> {
    let params = cfg.physical.resolve().map_err(validation)?;
    let q_mag = cfg.q.to_natural().map_err(validation)?;
    let p_mag = cfg.p.to_natural().map_err(validation)?;
    let qv = [0.0, 0.0, q_mag];
    let pv = [0.0, 0.0, p_mag];
    // validate the momenta once up front
    KernelInput::new(qv, pv, 0.0, params).map_err(validation)?;

    let mode = cfg.mode.into();
    let times = cfg.times.points();
    let results: Vec<Result<_, ebath::Error>> = times
        .par_iter()
        .map(|&t| {
            let input = KernelInput::new(qv, pv, t, params)?;
            g_exponent(&input, mode, cfg.rel_tol)
        })
        .collect();

    let mut rows = Vec::with_capacity(times.len());
    let mut samples = Vec::with_capacity(times.len());
    let mut damping_dev: f64 = 0.0;
    for (&t, res) in times.iter().zip(results) {
        let r = res.map_err(numeric)?;
        rows.push(vec![t, r.g.re, r.g.im, r.abs_error]);
        samples.push((t, r.g.re));
        let closed = ir_decoherence_factor(dot3(pv, pv), t, &params);
        damping_dev = damping_dev.max((damping_from_exponent(r.g, &params) - closed).abs());
    }
    write_csv(
        &out_dir.join("exponent.csv"),
        &["t", "re_g", "im_g", "error"],
        &rows,
    )?;

    let fit = asymptotic_fit(&samples, cfg.fit_basis.into()).map_err(numeric)?;
    let lin_target = thermal_linear_target(p_mag * p_mag, &params);
    let early = vacuum_log_target_early(p_mag * p_mag, params.m);
    let late = vacuum_log_target_late(pv, qv, params.m);

    let ratio = |num: f64, den: f64| if den != 0.0 { num / den } else { f64::NAN };
    let summary = Summary {
        scenario: "irkernel",
        seed,
        params: ResolvedParams::from(&params),
        mode: cfg.mode,
        q: q_mag,
        p: p_mag,
        rel_tol: cfg.rel_tol,
        fitted_linear: fit.linear_coeff,
        fitted_log: fit.log_coeff,
        fitted_const: fit.constant,
        fit_residual_rms: fit.residual_rms,
        thermal_linear_target: lin_target,
        linear_ratio: ratio(fit.linear_coeff, lin_target),
        vacuum_log_target_early: early,
        vacuum_log_target_late: late,
        log_ratio_early: ratio(fit.log_coeff, early),
        log_ratio_late: ratio(fit.log_coeff, late),
        damping_max_abs_dev: damping_dev,
    };
    Ok(to_summary_json(&summary))
}
