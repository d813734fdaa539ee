//! Units scenario: conversion constants, the 4.36 product, the two
//! characteristic time scales for an electron at laboratory inputs, and
//! the stage-ratio consistency check.

use std::path::Path;

use ebath::units::{
    self, conversion_product, from_natural, stage_ratio, tau_ir, tau_kinetic, to_natural,
    LabQuantity, PhysicalParams, Unit,
};
use serde::Serialize;

use crate::config::UnitsCheckConfig;
use crate::runner::{numeric, RunError};
use crate::scenarios::to_summary_json;

#[derive(Serialize)]
struct Summary {
    scenario: &'static str,
    seed: u64,
    r_cm: f64,
    t_kelvin: f64,
    kelvin_to_ev: f64,
    cm_to_inv_ev: f64,
    second_to_inv_ev: f64,
    electron_mass_ev: f64,
    fine_structure: f64,
    /// Product of the cm and kelvin conversion constants; the quoted
    /// stage-ratio coefficient is 4.36.
    conversion_product: f64,
    tau_ir_ev: f64,
    tau_ir_seconds: f64,
    tau_kinetic_ev: f64,
    tau_kinetic_seconds: f64,
    stage_ratio_lab: f64,
    stage_ratio_tau: f64,
    /// stage_ratio_lab / stage_ratio_tau; must sit within 1% of unity.
    consistency: f64,
}

pub fn run(cfg: &UnitsCheckConfig, seed: u64, _out_dir: &Path) -> Result<String, RunError> {
    let r_nat = to_natural(LabQuantity::new(cfg.r_cm, Unit::Centimeter)).map_err(numeric)?;
    let t_nat = to_natural(LabQuantity::new(cfg.t_kelvin, Unit::Kelvin)).map_err(numeric)?;
    let params = PhysicalParams::electron(t_nat, 1.0e3).map_err(numeric)?;
    let t1 = tau_ir(r_nat, &params).map_err(numeric)?;
    let t2 = tau_kinetic(&params).map_err(numeric)?;
    let lab = stage_ratio(cfg.r_cm, cfg.t_kelvin).map_err(numeric)?;
    let via_tau = t1 / t2;

    let summary = Summary {
        scenario: "units-check",
        seed,
        r_cm: cfg.r_cm,
        t_kelvin: cfg.t_kelvin,
        kelvin_to_ev: units::KELVIN_TO_EV,
        cm_to_inv_ev: units::CM_TO_INV_EV,
        second_to_inv_ev: units::SECOND_TO_INV_EV,
        electron_mass_ev: units::ELECTRON_MASS_EV,
        fine_structure: units::FINE_STRUCTURE,
        conversion_product: conversion_product(),
        tau_ir_ev: t1,
        tau_ir_seconds: from_natural(t1, Unit::Second).map_err(numeric)?.value,
        tau_kinetic_ev: t2,
        tau_kinetic_seconds: from_natural(t2, Unit::Second).map_err(numeric)?.value,
        stage_ratio_lab: lab,
        stage_ratio_tau: via_tau,
        consistency: lab / via_tau,
    };
    Ok(to_summary_json(&summary))
}
