//! Effective charge density, Coulomb potential and the Gauss-law residual
//! of a density matrix.
//!
//! The nonrelativistic vertex factor is taken as exactly 1, so the charge
//! density is the plain Fourier transform of ρ(q, q+p) over the transfer p
//! and the total charge equals the trace norm.

use alloc::vec::Vec;

use crate::density_matrix::{DensityMatrix, GridDensity};
use crate::error::{Error, Result};
use crate::fourvec::{dot3, norm3, sub3, Vec3};
use crate::math;
use crate::units::PhysicalParams;
use crate::C64;

/// Relative bound on the imaginary residue of a physically real output.
const IMAG_RESIDUE_TOL: f64 = 1e-10;

fn check_grid_time(g: &GridDensity, t: f64) -> Result<()> {
    if math::abs(g.time - t) > 1e-9 * math::abs(t).max(1.0) {
        return Err(Error::GridMismatch(
            "grid state is stamped at a different time; propagate first",
        ));
    }
    Ok(())
}

fn nyquist_check(g: &GridDensity, x: Vec3) -> Result<()> {
    let h = g.pgrid.max_spacing();
    for d in 0..g.pgrid.dim() {
        if h * math::abs(x[d]) > math::PI {
            return Err(Error::NyquistViolation {
                required: math::PI / math::abs(x[d]),
                available: h,
            });
        }
    }
    Ok(())
}

/// Fourier charge Ĵ⁰(p) = ∫ d^d q/(2π)^d ρ(q, q+p) for every transfer-grid
/// point, in p-grid order.
pub fn fourier_charge(g: &GridDensity) -> Vec<C64> {
    let nq = g.qgrid.len();
    let np = g.pgrid.len();
    let inv = math::powi(2.0 * math::PI, g.qgrid.dim() as i32).recip();
    let mut out = alloc::vec![C64::new(0.0, 0.0); np];
    for qi in 0..nq {
        let w = g.qgrid.weight(qi);
        let row = &g.values[qi * np..(qi + 1) * np];
        for (pj, v) in row.iter().enumerate() {
            out[pj] += v * w;
        }
    }
    for v in &mut out {
        *v *= inv;
    }
    out
}

/// Fourier potential Â⁰(p) = e Ĵ⁰(p)/p², accumulated along its own code
/// path (p = 0 entries are excluded by the principal-value convention and
/// reported as 0).
pub fn fourier_potential(g: &GridDensity, params: &PhysicalParams) -> Vec<C64> {
    let nq = g.qgrid.len();
    let np = g.pgrid.len();
    let e = math::sqrt(params.e_squared());
    let inv = math::powi(2.0 * math::PI, g.qgrid.dim() as i32).recip();
    let mut out = alloc::vec![C64::new(0.0, 0.0); np];
    for pj in 0..np {
        let p = g.pgrid.point(pj);
        let p2 = dot3(p, p);
        if p2 == 0.0 {
            continue;
        }
        let mut acc = C64::new(0.0, 0.0);
        for qi in 0..nq {
            acc += g.value(qi, pj) * (g.qgrid.weight(qi) * e / p2);
        }
        out[pj] = acc * inv;
    }
    out
}

fn density_scale(g: &GridDensity, jhat: &[C64]) -> f64 {
    // upper bound on |J(x)|: sum of |J^(p)| w_p / (2π)^d
    let inv = math::powi(2.0 * math::PI, g.pgrid.dim() as i32).recip();
    let mut s = 0.0;
    for (pj, jv) in jhat.iter().enumerate() {
        s += jv.norm() * g.pgrid.weight(pj);
    }
    (s * inv).max(1e-300)
}

fn grid_density_at(g: &GridDensity, jhat: &[C64], scale: f64, x: Vec3) -> Result<f64> {
    nyquist_check(g, x)?;
    let inv = math::powi(2.0 * math::PI, g.pgrid.dim() as i32).recip();
    let mut acc = C64::new(0.0, 0.0);
    for (pj, jv) in jhat.iter().enumerate() {
        let p = g.pgrid.point(pj);
        acc += jv * g.pgrid.weight(pj) * math::cis(-dot3(p, x));
    }
    acc *= inv;
    if math::abs(acc.im) > IMAG_RESIDUE_TOL * scale {
        return Err(Error::NonFinite("charge density has an imaginary residue"));
    }
    Ok(acc.re)
}

/// Effective charge density J⁰(x, t) of a state evaluated at time t.
///
/// Grid states must already be propagated to t; the analytic Gaussian
/// family is evaluated in closed form.
pub fn charge_density(rho: &DensityMatrix, x: Vec3, t: f64) -> Result<f64> {
    match rho {
        DensityMatrix::Gaussian(g) => {
            let w2 = g.width_sq(t);
            let w = math::sqrt(w2);
            let r = sub3(x, g.x0);
            Ok(math::exp(-dot3(r, r) / w2) / math::powi(math::sqrt(math::PI) * w, 3))
        }
        DensityMatrix::Grid(g) => {
            check_grid_time(g, t)?;
            let jhat = fourier_charge(g);
            let scale = density_scale(g, &jhat);
            grid_density_at(g, &jhat, scale, x)
        }
    }
}

/// Charge density at many points, sharing the q-integration.
pub fn charge_density_profile(rho: &DensityMatrix, xs: &[Vec3], t: f64) -> Result<Vec<f64>> {
    match rho {
        DensityMatrix::Gaussian(_) => xs.iter().map(|&x| charge_density(rho, x, t)).collect(),
        DensityMatrix::Grid(g) => {
            check_grid_time(g, t)?;
            let jhat = fourier_charge(g);
            let scale = density_scale(g, &jhat);
            xs.iter()
                .map(|&x| grid_density_at(g, &jhat, scale, x))
                .collect()
        }
    }
}

/// Coulomb-gauge scalar potential A⁰(x, t).
///
/// The Gaussian family uses the closed form (e/4π|x−x₀|) erf(|x−x₀|/l_t);
/// grid states use the spectral sum with the p = 0 mode excluded.
pub fn coulomb_potential(
    rho: &DensityMatrix,
    x: Vec3,
    t: f64,
    params: &PhysicalParams,
) -> Result<f64> {
    let e = math::sqrt(params.e_squared());
    match rho {
        DensityMatrix::Gaussian(g) => {
            let w = math::sqrt(g.width_sq(t));
            let r = norm3(sub3(x, g.x0));
            if r == 0.0 {
                // limit e/(4π)·2/(√π w)
                return Ok(e * 2.0 / (4.0 * math::PI * math::sqrt(math::PI) * w));
            }
            Ok(e * math::erf(r / w) / (4.0 * math::PI * r))
        }
        DensityMatrix::Grid(g) => {
            check_grid_time(g, t)?;
            nyquist_check(g, x)?;
            let ahat = fourier_potential(g, params);
            let inv = math::powi(2.0 * math::PI, g.pgrid.dim() as i32).recip();
            let mut acc = C64::new(0.0, 0.0);
            for (pj, av) in ahat.iter().enumerate() {
                let p = g.pgrid.point(pj);
                acc += av * g.pgrid.weight(pj) * math::cis(-dot3(p, x));
            }
            Ok((acc * inv).re)
        }
    }
}

/// Max relative Gauss-law residual over the transfer grid,
/// max_p |p²Â⁰(p) − eĴ⁰(p)| / (|eĴ⁰(p)| + ε); p = 0 is skipped.
pub fn gauss_residual(rho: &DensityMatrix, t: f64, params: &PhysicalParams) -> Result<f64> {
    let g = match rho {
        DensityMatrix::Gaussian(_) => return Ok(0.0),
        DensityMatrix::Grid(g) => g,
    };
    check_grid_time(g, t)?;
    let jhat = fourier_charge(g);
    let ahat = fourier_potential(g, params);
    let e = math::sqrt(params.e_squared());
    let floor = 1e-30
        * jhat
            .iter()
            .fold(0.0f64, |m, v| m.max(v.norm()))
            .max(1e-300)
        * e;
    let mut worst: f64 = 0.0;
    for pj in 0..g.pgrid.len() {
        let p = g.pgrid.point(pj);
        let p2 = dot3(p, p);
        if p2 == 0.0 {
            continue;
        }
        let num = (ahat[pj] * p2 - jhat[pj] * e).norm();
        worst = worst.max(num / (jhat[pj].norm() * e + floor));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density_matrix::{
        gaussian_wavefunction, propagate, trace_norm, DensityMatrix, MomentumGrid,
    };
    use crate::wavepacket::{gaussian_density, SpreadLaw};

    fn params() -> PhysicalParams {
        PhysicalParams::new(1.0, 0.005, crate::units::FINE_STRUCTURE, 0.05).unwrap()
    }

    #[test]
    fn gaussian_density_matches_wavepacket_module() {
        let p = params();
        let rho = DensityMatrix::gaussian_pure(40.0, [0.0; 3], 0.0, &p).unwrap();
        let t = 2.0e3;
        let rho_t = propagate(&rho, t, &p).unwrap();
        let law = SpreadLaw::from_params(40.0, &p).unwrap();
        for x in [[0.0; 3], [10.0, -3.0, 7.0], [55.0, 0.0, 0.0]] {
            let a = charge_density(&rho_t, x, t).unwrap();
            let b = gaussian_density(&law, x, t);
            assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "{a} vs {b}");
        }
    }

    /// 1D analogue of the packet-density closed form, derived by the same
    /// Gaussian integrals per axis: J(x) = π^{-1/2} l_t^{-1} exp(-x²/l_t²).
    fn closed_form_1d(l: f64, p: &PhysicalParams, t: f64, x: f64) -> f64 {
        let w2 = l * l + t * t / (p.m * p.m * l * l) + 4.0 * p.theta() * t;
        math::exp(-x * x / w2) / math::sqrt(math::PI * w2)
    }

    #[test]
    fn grid_pipeline_matches_closed_form_1d() {
        // l large enough that the exact-dispersion phase stays within the
        // nonrelativistic closed form at the 1e-6 level over t = m l^2
        let p = params();
        let l = 2000.0;
        let qgrid = MomentumGrid::uniform(1, 201, 6.5 / l, 0.1).unwrap();
        let pgrid = MomentumGrid::uniform(1, 201, 6.5 / l, 0.2).unwrap();
        let rho = DensityMatrix::from_wavefunction(
            qgrid,
            pgrid,
            gaussian_wavefunction(l, 1),
        )
        .unwrap();
        // quantum term doubles the squared width at t = m l^2
        let t = p.m * l * l;
        let rho_t = propagate(&rho, t, &p).unwrap();
        let w = math::sqrt(l * l + t * t / (p.m * p.m * l * l) + 4.0 * p.theta() * t);
        for i in 0..10 {
            let x = -1.3 * w + 2.6 * w * (i as f64 + 0.341) / 10.0;
            let got = charge_density(&rho_t, [x, 0.0, 0.0], t).unwrap();
            let expect = closed_form_1d(l, &p, t, x);
            assert!(
                (got / expect - 1.0).abs() < 1e-6,
                "x {x}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn total_charge_conserved_under_propagation() {
        let p = params();
        let l = 1500.0;
        let qgrid = MomentumGrid::uniform(1, 161, 6.5 / l, 0.1).unwrap();
        let pgrid = MomentumGrid::uniform(1, 161, 6.5 / l, 0.2).unwrap();
        let rho = DensityMatrix::from_wavefunction(
            qgrid,
            pgrid,
            gaussian_wavefunction(l, 1),
        )
        .unwrap();
        let t = 0.7 * p.m * l * l;
        let rho_t = propagate(&rho, t, &p).unwrap();
        let tr = trace_norm(&rho_t).unwrap();
        // real-space quadrature of J(x) over a wide window
        let w = math::sqrt(l * l + t * t / (p.m * p.m * l * l) + 4.0 * p.theta() * t);
        let xs: Vec<Vec3> = (0..2001)
            .map(|i| [-6.0 * w + 12.0 * w * i as f64 / 2000.0, 0.0, 0.0])
            .collect();
        let js = charge_density_profile(&rho_t, &xs, t).unwrap();
        let h = 12.0 * w / 2000.0;
        let total: f64 = js.iter().enumerate().map(|(i, j)| {
            let edge = i == 0 || i == 2000;
            j * if edge { 0.5 * h } else { h }
        }).sum();
        assert!((total - tr).abs() < 1e-6, "total {total} trace {tr}");
    }

    #[test]
    fn diagonal_state_is_homogeneous() {
        let qgrid = MomentumGrid::uniform(1, 33, 0.05, 0.1).unwrap();
        let pgrid = MomentumGrid::zero(1);
        let rho = DensityMatrix::from_wavefunction(
            qgrid,
            pgrid,
            gaussian_wavefunction(100.0, 1),
        )
        .unwrap();
        let j0 = charge_density(&rho, [0.0; 3], 0.0).unwrap();
        let j1 = charge_density(&rho, [17.0, 0.0, 0.0], 0.0).unwrap();
        assert!((j0 - j1).abs() <= 1e-15 * j0.abs());
    }

    #[test]
    fn nyquist_guard_fires() {
        let qgrid = MomentumGrid::uniform(1, 17, 0.05, 0.1).unwrap();
        let pgrid = MomentumGrid::uniform(1, 17, 0.05, 0.2).unwrap();
        let rho = DensityMatrix::from_wavefunction(
            qgrid,
            pgrid,
            gaussian_wavefunction(100.0, 1),
        )
        .unwrap();
        let h = 0.1 / 16.0;
        let too_far = math::PI / h * 1.5;
        assert!(matches!(
            charge_density(&rho, [too_far, 0.0, 0.0], 0.0),
            Err(Error::NyquistViolation { .. })
        ));
    }

    #[test]
    fn time_mismatch_rejected() {
        let qgrid = MomentumGrid::uniform(1, 9, 0.05, 0.1).unwrap();
        let pgrid = MomentumGrid::uniform(1, 9, 0.05, 0.2).unwrap();
        let rho = DensityMatrix::from_wavefunction(
            qgrid,
            pgrid,
            gaussian_wavefunction(100.0, 1),
        )
        .unwrap();
        assert!(charge_density(&rho, [0.0; 3], 5.0).is_err());
    }

    #[test]
    fn coulomb_gaussian_matches_shell_oracle() {
        let p = params();
        let rho = DensityMatrix::gaussian_pure(25.0, [0.0; 3], 0.0, &p).unwrap();
        let t = 800.0;
        let rho_t = propagate(&rho, t, &p).unwrap();
        let w = if let DensityMatrix::Gaussian(g) = &rho_t {
            math::sqrt(g.width_sq(t))
        } else {
            unreachable!()
        };
        let e = math::sqrt(p.e_squared());
        let dens = |s: f64| charge_density(&rho_t, [s, 0.0, 0.0], t).unwrap();
        for r in [0.3 * w, w, 2.5 * w, 8.0 * w] {
            // shell integration oracle: e [ (1/r) \int_0^r s^2 J ds + \int_r^inf s J ds ]
            let (inner, _) = crate::quad::adaptive_gk15_real(
                |s| s * s * dens(s),
                0.0,
                r,
                &[0.5 * r],
                1e-13,
                2000,
            );
            let (outer, _) = crate::quad::adaptive_gk15_real(
                |s| s * dens(s),
                r,
                r + 14.0 * w,
                &[r + w, r + 4.0 * w],
                1e-13,
                2000,
            );
            let oracle = e * (inner / r + outer);
            let got = coulomb_potential(&rho_t, [r, 0.0, 0.0], t, &p).unwrap();
            assert!(
                (got / oracle - 1.0).abs() < 1e-7,
                "r {r}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn coulomb_far_field_and_point_limit() {
        let p = params();
        let rho = DensityMatrix::gaussian_pure(5.0, [0.0; 3], 0.0, &p).unwrap();
        let e = math::sqrt(p.e_squared());
        let r = 500.0;
        let far = coulomb_potential(&rho, [0.0, r, 0.0], 0.0, &p).unwrap();
        assert!((far / (e / (4.0 * math::PI * r)) - 1.0).abs() < 1e-12);
        // shrinking packet approaches the bare Coulomb value at fixed r
        let small = DensityMatrix::gaussian_pure(0.01, [0.0; 3], 0.0, &p).unwrap();
        let v = coulomb_potential(&small, [3.0, 0.0, 0.0], 0.0, &p).unwrap();
        assert!((v / (e / (4.0 * math::PI * 3.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_residual_is_machine_small() {
        let p = params();
        let qgrid = MomentumGrid::uniform(1, 41, 0.04, 0.1).unwrap();
        let pgrid = MomentumGrid::uniform(1, 41, 0.04, 0.2).unwrap();
        let rho = DensityMatrix::from_wavefunction(
            qgrid.clone(),
            pgrid.clone(),
            gaussian_wavefunction(120.0, 1),
        )
        .unwrap();
        assert!(gauss_residual(&rho, 0.0, &p).unwrap() < 1e-10);

        // randomized Hermitian state
        let rho2 = DensityMatrix::from_wavefunction(qgrid, pgrid, |q| {
            C64::new(math::sin(300.0 * q[0]) + 0.4, math::cos(170.0 * q[0]))
                * math::exp(-q[0] * q[0] / 3e-4)
        })
        .unwrap();
        assert!(gauss_residual(&rho2, 0.0, &p).unwrap() < 1e-10);
        let rho2t = propagate(&rho2, 100.0, &p).unwrap();
        assert!(gauss_residual(&rho2t, 100.0, &p).unwrap() < 1e-10);
    }
}
