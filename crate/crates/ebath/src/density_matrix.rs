//! Momentum-space density matrices of the unpolarized electron and the
//! closed-form infrared propagator.
//!
//! Grid states store ρ(q, q+p) on a (q-grid × p-grid) pair, since both the
//! damping and the free phase depend on the transfer p only through
//! closed-form factors. The analytic Gaussian family covers the packet
//! scenarios without grids.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fourvec::{add3, dot3, Vec3};
use crate::math;
use crate::units::PhysicalParams;
use crate::C64;

/// Rectangular momentum grid: one strictly increasing axis per dimension,
/// with trapezoidal quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    axes: Vec<Vec<f64>>,
    weights: Vec<Vec<f64>>,
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    if n == 1 {
        return alloc::vec![1.0];
    }
    let mut w = alloc::vec![0.0; n];
    for i in 0..n - 1 {
        let h = 0.5 * (axis[i + 1] - axis[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

impl MomentumGrid {
    /// Build a grid from per-dimension axes; every |component| must stay
    /// below `cap` (the nonrelativistic guard).
    pub fn new(axes: Vec<Vec<f64>>, cap: f64) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::GridMismatch("dimensionality must be 1..=3"));
        }
        for axis in &axes {
            if axis.is_empty() {
                return Err(Error::GridMismatch("empty axis"));
            }
            for w in axis.windows(2) {
                if !(w[1] > w[0]) {
                    return Err(Error::GridMismatch("axis not strictly increasing"));
                }
            }
            for &x in axis {
                if !x.is_finite() {
                    return Err(Error::NonFinite("grid axis"));
                }
                if math::abs(x) > cap {
                    return Err(Error::InvalidParameter(
                        "grid momentum exceeds nonrelativistic cap",
                    ));
                }
            }
        }
        let weights = axes.iter().map(|a| trapezoid_weights(a)).collect();
        Ok(Self { axes, weights })
    }

    /// Uniform symmetric cubic grid of `n` points per axis spanning
    /// [−extent, extent] in `dim` dimensions.
    pub fn uniform(dim: usize, n: usize, extent: f64, cap: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::GridMismatch("need at least one point"));
        }
        let axis: Vec<f64> = if n == 1 {
            alloc::vec![0.0]
        } else {
            (0..n)
                .map(|i| -extent + 2.0 * extent * i as f64 / (n - 1) as f64)
                .collect()
        };
        Self::new(alloc::vec![axis; dim], cap)
    }

    /// A single-point axis {0} in `dim` dimensions (used as the p-grid of
    /// purely diagonal states).
    pub fn zero(dim: usize) -> Self {
        Self {
            axes: alloc::vec![alloc::vec![0.0]; dim],
            weights: alloc::vec![alloc::vec![1.0]; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, d: usize) -> &[f64] {
        &self.axes[d]
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decode a flat index into the 3-vector (missing dimensions are 0).
    pub fn point(&self, flat: usize) -> Vec3 {
        let mut out = [0.0; 3];
        let mut rest = flat;
        for d in (0..self.dim()).rev() {
            let n = self.axes[d].len();
            out[d] = self.axes[d][rest % n];
            rest /= n;
        }
        out
    }

    /// Quadrature weight of a flat index (product of axis weights).
    pub fn weight(&self, flat: usize) -> f64 {
        let mut w = 1.0;
        let mut rest = flat;
        for d in (0..self.dim()).rev() {
            let n = self.axes[d].len();
            w *= self.weights[d][rest % n];
            rest /= n;
        }
        w
    }

    /// Locate a 3-vector on the grid within a relative tolerance; returns
    /// the flat index.
    pub fn find(&self, x: Vec3) -> Option<usize> {
        let mut flat = 0usize;
        for d in 0..self.dim() {
            let axis = &self.axes[d];
            let scale = axis
                .last()
                .unwrap()
                .abs()
                .max(axis[0].abs())
                .max(1e-300);
            let idx = axis
                .iter()
                .position(|&a| math::abs(a - x[d]) <= 1e-9 * scale)?;
            flat = flat * axis.len() + idx;
        }
        Some(flat)
    }

    /// Largest axis spacing, used by the Nyquist guard.
    pub fn max_spacing(&self) -> f64 {
        let mut h: f64 = 0.0;
        for axis in &self.axes {
            for w in axis.windows(2) {
                h = h.max(w[1] - w[0]);
            }
        }
        h
    }
}

/// Analytic Gaussian state: φ₀(q) = (4πl²)^{3/4} exp(−l²q²/2), optionally
/// displaced to x0 and prepared to refocus after `backfocus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub l: f64,
    pub x0: Vec3,
    pub backfocus: f64,
    pub m: f64,
    pub theta: f64,
    /// Elapsed evolution time since preparation.
    pub time: f64,
}

impl GaussianPacket {
    /// Squared density width at evaluation time t:
    /// l² + (t−τ_b)²/(m²l²) + 4Θt.
    pub fn width_sq(&self, t: f64) -> f64 {
        let dt = t - self.backfocus;
        self.l * self.l + dt * dt / (self.m * self.m * self.l * self.l)
            + 4.0 * self.theta * t
    }
}

/// Grid density matrix ρ(q, q+p), values flattened q-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    pub qgrid: MomentumGrid,
    pub pgrid: MomentumGrid,
    pub values: Vec<C64>,
    pub time: f64,
}

impl GridDensity {
    #[inline]
    pub fn value(&self, qi: usize, pj: usize) -> C64 {
        self.values[qi * self.pgrid.len() + pj]
    }
}

/// Density matrix of the unpolarized electron (spin traced out).
#[derive(Debug, Clone, PartialEq)]
pub enum DensityMatrix {
    Grid(GridDensity),
    Gaussian(GaussianPacket),
}

impl DensityMatrix {
    /// Pure Gaussian packet at rest around `x0`; `backfocus` > 0 prepares
    /// the state that refocuses after that delay.
    pub fn gaussian_pure(l: f64, x0: Vec3, backfocus: f64, params: &PhysicalParams) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::InvalidParameter("packet width must be positive"));
        }
        if backfocus < 0.0 {
            return Err(Error::InvalidParameter("backfocus must be nonnegative"));
        }
        Ok(DensityMatrix::Gaussian(GaussianPacket {
            l,
            x0,
            backfocus,
            m: params.m,
            theta: params.theta(),
            time: 0.0,
        }))
    }

    /// Build a pure grid state ρ(q, q+p) = φ(q) φ*(q+p) from a momentum
    /// wavefunction evaluated analytically at the needed points.
    pub fn from_wavefunction<F: Fn(Vec3) -> C64>(
        qgrid: MomentumGrid,
        pgrid: MomentumGrid,
        phi: F,
    ) -> Result<Self> {
        if qgrid.dim() != pgrid.dim() {
            return Err(Error::GridMismatch("q and p grids differ in dimension"));
        }
        let nq = qgrid.len();
        let np = pgrid.len();
        let mut values = Vec::with_capacity(nq * np);
        for qi in 0..nq {
            let q = qgrid.point(qi);
            let amp_q = phi(q);
            for pj in 0..np {
                let p = pgrid.point(pj);
                values.push(amp_q * phi(add3(q, p)).conj());
            }
        }
        Ok(DensityMatrix::Grid(GridDensity {
            qgrid,
            pgrid,
            values,
            time: 0.0,
        }))
    }

    pub fn from_grid_values(
        qgrid: MomentumGrid,
        pgrid: MomentumGrid,
        values: Vec<C64>,
    ) -> Result<Self> {
        if qgrid.dim() != pgrid.dim() {
            return Err(Error::GridMismatch("q and p grids differ in dimension"));
        }
        if values.len() != qgrid.len() * pgrid.len() {
            return Err(Error::GridMismatch("value buffer size"));
        }
        Ok(DensityMatrix::Grid(GridDensity {
            qgrid,
            pgrid,
            values,
            time: 0.0,
        }))
    }

    /// Evolution time elapsed since preparation.
    pub fn time(&self) -> f64 {
        match self {
            DensityMatrix::Grid(g) => g.time,
            DensityMatrix::Gaussian(g) => g.time,
        }
    }

    /// Max relative Hermiticity violation over grid entries whose mirror
    /// (q+p, −p) lies on the grid; 0 for the analytic family.
    pub fn hermiticity_defect(&self) -> f64 {
        let g = match self {
            DensityMatrix::Gaussian(_) => return 0.0,
            DensityMatrix::Grid(g) => g,
        };
        let mut scale: f64 = 0.0;
        for v in &g.values {
            scale = scale.max(v.norm());
        }
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for qi in 0..g.qgrid.len() {
            let q = g.qgrid.point(qi);
            for pj in 0..g.pgrid.len() {
                let p = g.pgrid.point(pj);
                let qp = add3(q, p);
                let minus_p = [-p[0], -p[1], -p[2]];
                if let (Some(qi2), Some(pj2)) = (g.qgrid.find(qp), g.pgrid.find(minus_p)) {
                    let defect = (g.value(qi, pj) - g.value(qi2, pj2).conj()).norm();
                    worst = worst.max(defect / scale);
                }
            }
        }
        worst
    }
}

/// Infrared damping of an off-diagonal element at momentum transfer² `p2`:
/// exp(−2α p² T t / 3m²). Equals exp(−(e²/6π)(p²T/m²)t) identically.
pub fn ir_decoherence_factor(p2: f64, t: f64, params: &PhysicalParams) -> f64 {
    debug_assert!(p2 >= 0.0 && t >= 0.0);
    math::exp(-2.0 * params.alpha * p2 * params.temperature * t
        / (3.0 * params.m * params.m))
}

/// Validity record of the closed-form propagator regime, Tτ₀ ≫ 1 together
/// with e²Tτ₀ ≪ 1 for some intermediate τ₀ (both hold iff e²/2π ≪ Tt).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeFlags {
    /// T·t for the requested step.
    pub thermal_phase: f64,
    /// True when T·t ≫ 1 can be satisfied by an intermediate τ₀.
    pub large_time: bool,
    /// True when e²·T·τ₀ ≪ 1 is simultaneously satisfiable.
    pub weak_coupling: bool,
}

/// Closed-form propagator over a time step t ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrPropagator {
    pub params: PhysicalParams,
    pub t: f64,
}

impl IrPropagator {
    pub fn new(params: PhysicalParams, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter("propagation time must be >= 0"));
        }
        Ok(Self { params, t })
    }

    /// Regime bookkeeping for the step.
    pub fn regime(&self) -> RegimeFlags {
        let tt = self.params.temperature * self.t;
        RegimeFlags {
            thermal_phase: tt,
            large_time: tt > 10.0,
            weak_coupling: self.params.e_squared() * 10.0 < tt || tt == 0.0,
        }
    }
}

/// Apply the closed-form propagator for a step of length t:
/// ρ(t; q, q+p) = e^{i p₀ t} · exp(−2αp²Tt/3m²) · ρ(0; q, q+p) with
/// p₀ = ε_{q+p} − ε_q and ε_q = √(m² + q²). Diagonal elements are
/// untouched; the vacuum logarithm is deliberately not included here.
pub fn propagate(rho0: &DensityMatrix, t: f64, params: &PhysicalParams) -> Result<DensityMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter("propagation time must be >= 0"));
    }
    match rho0 {
        DensityMatrix::Gaussian(g) => {
            if math::abs(g.theta - params.theta()) > 1e-12 * (g.theta + params.theta()).max(1e-300)
                || g.m != params.m
            {
                return Err(Error::GridMismatch(
                    "packet was prepared with different physical parameters",
                ));
            }
            let mut out = *g;
            out.time += t;
            Ok(DensityMatrix::Gaussian(out))
        }
        DensityMatrix::Grid(g) => {
            let m = params.m;
            let np = g.pgrid.len();
            let mut values = Vec::with_capacity(g.values.len());
            for qi in 0..g.qgrid.len() {
                let q = g.qgrid.point(qi);
                let eps_q = math::sqrt(m * m + dot3(q, q));
                for pj in 0..np {
                    let p = g.pgrid.point(pj);
                    let qp = add3(q, p);
                    let eps_qp = math::sqrt(m * m + dot3(qp, qp));
                    let p0 = eps_qp - eps_q;
                    let damp = ir_decoherence_factor(dot3(p, p), t, params);
                    values.push(g.value(qi, pj) * math::cis(p0 * t) * damp);
                }
            }
            Ok(DensityMatrix::Grid(GridDensity {
                qgrid: g.qgrid.clone(),
                pgrid: g.pgrid.clone(),
                values,
                time: g.time + t,
            }))
        }
    }
}

/// Trace norm Σ_q ρ(q, q) d^dq/(2π)^d by grid quadrature; exactly 1 for the
/// analytic family. Grid states must carry p = 0 on the transfer grid.
pub fn trace_norm(rho: &DensityMatrix) -> Result<f64> {
    match rho {
        DensityMatrix::Gaussian(_) => Ok(1.0),
        DensityMatrix::Grid(g) => {
            let p0 = g
                .pgrid
                .find([0.0; 3])
                .ok_or(Error::GridMismatch("transfer grid lacks p = 0"))?;
            let mut acc = C64::new(0.0, 0.0);
            for qi in 0..g.qgrid.len() {
                let v = g.value(qi, p0);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite("density matrix entry"));
                }
                acc += v * g.qgrid.weight(qi);
            }
            let norm = acc / math::powi(2.0 * math::PI, g.qgrid.dim() as i32);
            Ok(norm.re)
        }
    }
}

/// The normalized Gaussian momentum wavefunction φ₀ (real, at rest).
pub fn gaussian_wavefunction(l: f64, dim: usize) -> impl Fn(Vec3) -> C64 {
    move |q: Vec3| {
        let q2 = dot3(q, q);
        // (4πl²)^{d/4} exp(−l²q²/2)
        let norm = libm::pow(4.0 * math::PI * l * l, dim as f64 / 4.0);
        C64::new(norm * math::exp(-l * l * q2 / 2.0), 0.0)
    }
}
