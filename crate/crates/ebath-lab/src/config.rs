//! Scenario configuration: JSON-compatible structured text with unit tags
//! resolved to natural units exactly once, at this boundary.

use ebath::units::{self, LabQuantity, Unit};
use ebath::PhysicalParams;
use serde::{Deserialize, Serialize};

/// A value carrying a laboratory unit tag.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Quantity {
    pub value: f64,
    #[serde(default = "default_unit")]
    pub unit: String,
}

fn default_unit() -> String {
    "natural".to_owned()
}

impl Quantity {
    pub fn natural(value: f64) -> Self {
        Self {
            value,
            unit: default_unit(),
        }
    }

    pub fn to_natural(&self) -> Result<f64, ebath::Error> {
        let unit = Unit::parse(&self.unit)?;
        units::to_natural(LabQuantity::new(self.value, unit))
    }
}

/// Physical parameter block shared by all scenarios (natural units after
/// resolution).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhysicalConfig {
    #[serde(default = "default_mass")]
    pub mass: Quantity,
    pub temperature: Quantity,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub lambda: Quantity,
}

fn default_mass() -> Quantity {
    Quantity {
        value: units::ELECTRON_MASS_EV,
        unit: "eV".to_owned(),
    }
}

fn default_alpha() -> f64 {
    units::FINE_STRUCTURE
}

impl PhysicalConfig {
    pub fn resolve(&self) -> Result<PhysicalParams, ebath::Error> {
        PhysicalParams::new(
            self.mass.to_natural()?,
            self.temperature.to_natural()?,
            self.alpha,
            self.lambda.to_natural()?,
        )
    }
}

/// Resolved natural-unit parameters embedded in every summary for audit.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ResolvedParams {
    pub m_ev: f64,
    pub temperature_ev: f64,
    pub alpha: f64,
    pub lambda_ev: f64,
}

impl From<&PhysicalParams> for ResolvedParams {
    fn from(p: &PhysicalParams) -> Self {
        Self {
            m_ev: p.m,
            temperature_ev: p.temperature,
            alpha: p.alpha,
            lambda_ev: p.lambda,
        }
    }
}

/// Time grid specification.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TimeGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub log_spaced: bool,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        if self.log_spaced {
            ebath::fit::log_spaced(self.min, self.max, self.count)
        } else {
            (0..self.count)
                .map(|i| {
                    self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
                })
                .collect()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.count < 1 {
            return Err("time grid needs at least one point".into());
        }
        if !(self.min >= 0.0) || (self.count > 1 && !(self.max > self.min)) {
            return Err("time grid must satisfy 0 <= min < max".into());
        }
        if self.log_spaced && !(self.min > 0.0) {
            return Err("log-spaced grid needs min > 0".into());
        }
        Ok(())
    }
}

/// Wave-packet scenario: spreading law table and a density profile.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WavepacketConfig {
    pub physical: PhysicalConfig,
    /// Initial packet width.
    pub l: Quantity,
    /// Refocusing delay; 0 for a plain packet.
    #[serde(default)]
    pub backfocus: Option<Quantity>,
    pub times: TimeGrid,
    /// Number of sample points of the density profile at the final time.
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
}

fn default_profile_points() -> usize {
    101
}

/// Two-slit scenario. Either the incident momentum `k` or the electron
/// energy `energy` must be given.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TwoSlitConfig {
    pub physical: PhysicalConfig,
    pub d: Quantity,
    pub screen_distance: Quantity,
    #[serde(default)]
    pub k: Option<Quantity>,
    #[serde(default)]
    pub energy: Option<Quantity>,
    #[serde(default = "default_pattern_points")]
    pub pattern_points: usize,
    /// Run the density-matrix pipeline cross-check.
    #[serde(default = "default_true")]
    pub pipeline_check: bool,
}

fn default_pattern_points() -> usize {
    1024
}

fn default_true() -> bool {
    true
}

/// Initial distribution of the kinetics scenario.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum InitialDistribution {
    /// Boltzmann at electron temperature T_e (natural units).
    Boltzmann { t_e: Quantity },
    /// Gaussian shell at |q| = q0 with the given width.
    Shell { q0: Quantity, width: Quantity },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KineticsConfig {
    pub physical: PhysicalConfig,
    pub initial: InitialDistribution,
    #[serde(default = "default_shells")]
    pub shells: usize,
    /// Upper edge of the radial grid in units of sqrt(m T).
    #[serde(default = "default_qmax_thermal")]
    pub q_max_thermal: f64,
    /// dt = dt_safety / max-rate (explicit stepper bound is 0.01).
    #[serde(default = "default_dt_safety")]
    pub dt_safety: f64,
    pub steps: usize,
    /// Record every n-th step in the distribution table.
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Pair-kernel quadrature tolerance.
    #[serde(default = "default_kinetics_tol")]
    pub tolerance: f64,
    /// Monte-Carlo oracle samples (0 disables the cross-check).
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
}

fn default_shells() -> usize {
    48
}
fn default_qmax_thermal() -> f64 {
    10.0
}
fn default_dt_safety() -> f64 {
    0.01
}
fn default_record_every() -> usize {
    8
}
fn default_kinetics_tol() -> f64 {
    1e-10
}
fn default_mc_samples() -> usize {
    200_000
}

/// Weight mode of the exponent integral.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    Full,
    Vacuum,
    Thermal,
}

impl From<KernelMode> for ebath::ir_kernel::WeightMode {
    fn from(m: KernelMode) -> Self {
        match m {
            KernelMode::Full => ebath::ir_kernel::WeightMode::Full,
            KernelMode::Vacuum => ebath::ir_kernel::WeightMode::Vacuum,
            KernelMode::Thermal => ebath::ir_kernel::WeightMode::Thermal,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FitBasisConfig {
    LinearLogConst,
    LogConst,
    LinearConst,
}

impl From<FitBasisConfig> for ebath::fit::FitBasis {
    fn from(b: FitBasisConfig) -> Self {
        match b {
            FitBasisConfig::LinearLogConst => ebath::fit::FitBasis::LinearLogConst,
            FitBasisConfig::LogConst => ebath::fit::FitBasis::LogConst,
            FitBasisConfig::LinearConst => ebath::fit::FitBasis::LinearConst,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct IrKernelConfig {
    pub physical: PhysicalConfig,
    /// Electron momentum along z (natural units unless tagged).
    pub q: Quantity,
    /// Momentum transfer along z.
    pub p: Quantity,
    pub mode: KernelMode,
    pub times: TimeGrid,
    #[serde(default = "default_fit_basis")]
    pub fit_basis: FitBasisConfig,
    #[serde(default = "default_kernel_tol")]
    pub rel_tol: f64,
}

fn default_fit_basis() -> FitBasisConfig {
    FitBasisConfig::LinearLogConst
}
fn default_kernel_tol() -> f64 {
    1e-7
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum SourceConfig {
    Point,
    Gaussian { sigma: Quantity },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GaussLawConfig {
    pub physical: PhysicalConfig,
    pub source: SourceConfig,
    /// Probe radii (natural units unless tagged).
    pub radii: Vec<Quantity>,
    pub times: TimeGrid,
    #[serde(default = "default_true")]
    pub include_noncov: bool,
    #[serde(default = "default_kernel_tol")]
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct UnitsCheckConfig {
    #[serde(default = "default_r_cm")]
    pub r_cm: f64,
    #[serde(default = "default_t_kelvin")]
    pub t_kelvin: f64,
}

fn default_r_cm() -> f64 {
    1.0e-8
}
fn default_t_kelvin() -> f64 {
    300.0
}

/// Top-level scenario selection, the tagged payload, seed and thread count.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum Scenario {
    Wavepacket(WavepacketConfig),
    Twoslit(TwoSlitConfig),
    Kinetics(KineticsConfig),
    Irkernel(IrKernelConfig),
    Gausslaw(GaussLawConfig),
    UnitsCheck(UnitsCheckConfig),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Wavepacket(_) => "wavepacket",
            Scenario::Twoslit(_) => "twoslit",
            Scenario::Kinetics(_) => "kinetics",
            Scenario::Irkernel(_) => "irkernel",
            Scenario::Gausslaw(_) => "gausslaw",
            Scenario::UnitsCheck(_) => "units-check",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub scenario: Scenario,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
}

fn default_seed() -> u64 {
    1
}
fn default_threads() -> usize {
    1
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.threads == 0 {
            return Err("threads must be positive".into());
        }
        match &self.scenario {
            Scenario::Wavepacket(c) => {
                c.times.validate()?;
                if c.profile_points < 2 {
                    return Err("profile needs at least two points".into());
                }
            }
            Scenario::Twoslit(c) => {
                if c.k.is_none() && c.energy.is_none() {
                    return Err("twoslit needs either k or energy".into());
                }
                if c.pattern_points < 4 {
                    return Err("pattern needs at least four points".into());
                }
            }
            Scenario::Kinetics(c) => {
                if c.shells < 4 {
                    return Err("kinetics needs at least 4 shells".into());
                }
                if c.steps == 0 || c.record_every == 0 {
                    return Err("steps and record_every must be positive".into());
                }
                if !(c.dt_safety > 0.0 && c.dt_safety <= 0.01) {
                    return Err("dt_safety must lie in (0, 0.01]".into());
                }
                if !(c.tolerance > 0.0) {
                    return Err("tolerance must be positive".into());
                }
            }
            Scenario::Irkernel(c) => {
                c.times.validate()?;
                if !(c.rel_tol > 0.0) {
                    return Err("rel_tol must be positive".into());
                }
            }
            Scenario::Gausslaw(c) => {
                c.times.validate()?;
                if c.radii.is_empty() {
                    return Err("gausslaw needs at least one radius".into());
                }
                if !(c.rel_tol > 0.0) {
                    return Err("rel_tol must be positive".into());
                }
            }
            Scenario::UnitsCheck(c) => {
                if !(c.r_cm > 0.0 && c.t_kelvin > 0.0) {
                    return Err("units-check needs positive r and T".into());
                }
            }
        }
        Ok(())
    }
}
