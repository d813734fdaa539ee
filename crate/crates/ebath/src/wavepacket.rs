//! Closed-form Gaussian wave-packet results: the spreading law, the focused
//! (backward-prepared) packet, and the minimal position uncertainty left by
//! the bath.

use crate::error::{Error, Result};
use crate::fourvec::{dot3, Vec3};
use crate::math;
use crate::units::PhysicalParams;

/// Width evolution of an initially Gaussian packet of size l:
/// l_t² = l² + t²/(m²l²) + 4Θt with Θ = 2αT/(3m²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadLaw {
    pub l: f64,
    pub theta: f64,
    pub m: f64,
}

impl SpreadLaw {
    pub fn new(l: f64, theta: f64, m: f64) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::InvalidParameter("initial width l must be positive"));
        }
        if !(theta >= 0.0) {
            return Err(Error::InvalidParameter("Theta must be nonnegative"));
        }
        if !(m > 0.0) {
            return Err(Error::InvalidParameter("mass must be positive"));
        }
        Ok(Self { l, theta, m })
    }

    pub fn from_params(l: f64, params: &PhysicalParams) -> Result<Self> {
        Self::new(l, params.theta(), params.m)
    }
}

/// Packet width l_t at time t ≥ 0.
pub fn spread_width(law: &SpreadLaw, t: f64) -> f64 {
    math::sqrt(spread_width_sq(law, t))
}

/// l_t² = l² + t²/(m²l²) + 4Θt.
pub fn spread_width_sq(law: &SpreadLaw, t: f64) -> f64 {
    let quantum = t * t / (law.m * law.m * law.l * law.l);
    law.l * law.l + quantum + 4.0 * law.theta * t
}

/// Charge density of the spreading packet,
/// J⁰(x, t) = π^{−3/2} l_t^{−3} exp(−x²/l_t²); normalized to unit charge.
pub fn gaussian_density(law: &SpreadLaw, x: Vec3, t: f64) -> f64 {
    let w2 = spread_width_sq(law, t);
    let w = math::sqrt(w2);
    math::exp(-dot3(x, x) / w2) / (math::powi(math::sqrt(math::PI) * w, 3))
}

/// Density of a packet prepared to refocus at delay τ: the quantum-spreading
/// term cancels and only the bath contribution survives,
/// J⁰ = exp(−x²/(l² + 4Θτ)) / (π^{3/2} (l² + 4Θτ)^{3/2}).
pub fn focused_density(l: f64, theta: f64, tau: f64, x: Vec3) -> f64 {
    let w2 = focused_width_sq(l, theta, tau);
    math::exp(-dot3(x, x) / w2) / math::powi(math::sqrt(math::PI * w2), 3)
}

/// Squared width of the focused packet, l² + 4Θτ.
pub fn focused_width_sq(l: f64, theta: f64, tau: f64) -> f64 {
    l * l + 4.0 * theta * tau
}

/// Initial width that minimizes the free spread at time t, found by a
/// guarded Newton iteration on d(l_t²)/dl = 0 and cross-checked against the
/// closed-form optimum l⁴ = t²/m².
pub fn optimal_initial_width(law_m: f64, theta: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("t must be positive"));
    }
    let target = t / law_m; // closed form: l^2 = t/m
    // Newton on g(u) = u - t^2/(m^2 u) with u = l^2: g'(u) = 1 + t^2/(m^2 u^2)
    let mut u = target * 2.0;
    for _ in 0..200 {
        let g = u - t * t / (law_m * law_m * u);
        let dg = 1.0 + t * t / (law_m * law_m * u * u);
        let step = g / dg;
        u -= step;
        if math::abs(step) < 1e-14 * u {
            break;
        }
    }
    let l = math::sqrt(u);
    let _ = theta; // minimum location is independent of the bath term (linear in t)
    if math::abs(u / target - 1.0) > 1e-8 {
        return Err(Error::QuadratureTolerance {
            requested: 1e-8,
            achieved: math::abs(u / target - 1.0),
        });
    }
    Ok(l)
}
