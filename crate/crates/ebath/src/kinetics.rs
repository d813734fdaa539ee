//! Kinetic relaxation of the electron momentum distribution by Compton
//! scattering off the thermal photons.
//!
//! The collision term is
//!
//! ∂ρ(q)/∂t = ∫ d³k/(2π)³ [C(q,k) ρ(q+k) − C(q+k,−k) ρ(q)],
//! C(q,k) = ∫ d³p/(2π)³ w(q,p,k+p) δ(ε_{q+k}+|p|−|p+k|−ε_q) n(p)[1+n(p+k)].
//!
//! Resolving the δ over cos∠(p,k) with Jacobian |p+k|/(|p||k|) collapses
//! C to a 1D integral; for isotropic ρ the transfer integral reduces to a
//! shell-to-shell rate matrix whose loss diagonal is fixed by normalization,
//! exactly as the disconnected part of the kernel is fixed in the continuum.
//! Detailed balance holds pointwise on the energy shell, so a Boltzmann
//! distribution at the bath temperature is stationary up to rounding.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fourvec::{add3, dot3, norm3, FourVector, Vec3};
use crate::ir_kernel::coulomb_projector;
use crate::math;
use crate::quad::adaptive_gk15_real;
use crate::units::PhysicalParams;
use crate::C64;

/// Bose–Einstein occupation n(k) = 1/(e^{k/T} − 1).
pub fn planck_n(k: f64, temperature: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter("photon energy must be positive"));
    }
    if !(temperature > 0.0) {
        return Err(Error::InvalidParameter("temperature must be positive"));
    }
    Ok(1.0 / math::expm1(k / temperature))
}

/// Nonrelativistic Compton kernel
/// w = πe⁴/(2m²|k₁||k₂|) · [1 + (k₁·k₂)²/(k₁²k₂²)].
pub fn w_nonrel(k1: Vec3, k2: Vec3, params: &PhysicalParams) -> Result<f64> {
    let n1 = norm3(k1);
    let n2 = norm3(k2);
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::InvalidParameter("zero-length photon momentum"));
    }
    let e2 = params.e_squared();
    let cosg = dot3(k1, k2) / (n1 * n2);
    Ok(math::PI * e2 * e2 / (2.0 * params.m * params.m * n1 * n2) * (1.0 + cosg * cosg))
}

// ---------------------------------------------------------------------------
// Dirac algebra for the full trace form of the kernel
// ---------------------------------------------------------------------------

type Mat4 = [[C64; 4]; 4];

fn mat_zero() -> Mat4 {
    [[C64::new(0.0, 0.0); 4]; 4]
}

fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = mat_zero();
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..4 {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn mat_add(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = *a;
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] += b[i][j];
        }
    }
    c
}

fn mat_scale(a: &Mat4, s: C64) -> Mat4 {
    let mut c = *a;
    for row in &mut c {
        for v in row.iter_mut() {
            *v *= s;
        }
    }
    c
}

fn mat_trace(a: &Mat4) -> C64 {
    a[0][0] + a[1][1] + a[2][2] + a[3][3]
}

/// Dirac matrices in the standard representation, metric (+,−,−,−).
pub fn gamma(mu: usize) -> Mat4 {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut g = mat_zero();
    match mu {
        0 => {
            g[0][0] = one;
            g[1][1] = one;
            g[2][2] = -one;
            g[3][3] = -one;
        }
        1 => {
            g[0][3] = one;
            g[1][2] = one;
            g[2][1] = -one;
            g[3][0] = -one;
        }
        2 => {
            g[0][3] = -i;
            g[1][2] = i;
            g[2][1] = i;
            g[3][0] = -i;
        }
        3 => {
            g[0][2] = one;
            g[1][3] = -one;
            g[2][0] = -one;
            g[3][1] = one;
        }
        _ => panic!("gamma index out of range"),
    }
    g
}

/// Feynman slash a̸ = a_μ γ^μ.
pub fn slash(a: &FourVector) -> Mat4 {
    let mut s = mat_zero();
    for mu in 0..4 {
        let g = gamma(mu);
        let coef = C64::new(a.lower(mu), 0.0);
        for i in 0..4 {
            for j in 0..4 {
                s[i][j] += g[i][j] * coef;
            }
        }
    }
    s
}

fn plus_m(a: &FourVector, m: f64) -> Mat4 {
    let mut s = slash(a);
    for i in 0..4 {
        s[i][i] += C64::new(m, 0.0);
    }
    s
}

/// Full Dirac-trace Compton kernel with Coulomb projectors on both photon
/// legs. Kinematics must be on shell: q² = m², k₁² = k₂² = 0 and
/// ε_{q+k} + |k₁| = ε_q + |k₂| with k = k₂ − k₁.
pub fn w_trace(
    q: &FourVector,
    k1: &FourVector,
    k2: &FourVector,
    params: &PhysicalParams,
) -> Result<f64> {
    let m = params.m;
    let scale = m * m;
    if math::abs(q.norm2() - m * m) > 1e-9 * scale {
        return Err(Error::OffShell("electron momentum off the mass shell"));
    }
    if math::abs(k1.norm2()) > 1e-9 * scale || math::abs(k2.norm2()) > 1e-9 * scale {
        return Err(Error::OffShell("photon momentum not light-like"));
    }
    let k = k2.sub(k1);
    let qk = q.add(&k);
    let eps_qk = math::sqrt(m * m + dot3(qk.x, qk.x));
    if math::abs(qk.t - eps_qk) > 1e-9 * m {
        return Err(Error::OffShell("energy conservation violated"));
    }

    let d1 = m * m - q.sub(k1).norm2();
    let d2 = m * m - q.add(k2).norm2();
    if math::abs(d1) < 1e-8 * scale || math::abs(d2) < 1e-8 * scale {
        return Err(Error::DegenerateDenominator);
    }

    let s1 = mat_scale(&plus_m(&q.sub(k1), m), C64::new(1.0 / d1, 0.0));
    let s2 = mat_scale(&plus_m(&q.add(k2), m), C64::new(1.0 / d2, 0.0));
    let left = plus_m(&FourVector::new(eps_qk, qk.x), m);
    let right = plus_m(q, m);

    let dk1 = coulomb_projector(k1)?;
    let dk2 = coulomb_projector(k2)?;

    let gs: [Mat4; 4] = [gamma(0), gamma(1), gamma(2), gamma(3)];
    let mut bra = [[mat_zero(); 4]; 4]; // bra[beta][alpha]
    for (be, gbe) in gs.iter().enumerate() {
        for (al, gal) in gs.iter().enumerate() {
            let t1 = mat_mul(&mat_mul(gbe, &s1), gal);
            let t2 = mat_mul(&mat_mul(gal, &s2), gbe);
            bra[be][al] = mat_add(&t1, &t2);
        }
    }

    let mut acc = C64::new(0.0, 0.0);
    for mu in 0..4 {
        for al in 0..4 {
            if dk1[mu][al] == 0.0 {
                continue;
            }
            for nu in 0..4 {
                for be in 0..4 {
                    let dd = dk1[mu][al] * dk2[nu][be];
                    if dd == 0.0 {
                        continue;
                    }
                    // tr{ (q̸+k̸+m) [γ^β S1 γ^α + γ^α S2 γ^β]
                    //     (q̸+m)   [γ^μ S1 γ^ν + γ^ν S2 γ^μ] }
                    let second = mat_add(
                        &mat_mul(&mat_mul(&gs[mu], &s1), &gs[nu]),
                        &mat_mul(&mat_mul(&gs[nu], &s2), &gs[mu]),
                    );
                    let prod =
                        mat_mul(&mat_mul(&left, &bra[be][al]), &mat_mul(&right, &second));
                    acc += mat_trace(&prod) * dd;
                }
            }
        }
    }

    let e2 = params.e_squared();
    let pref = math::PI * e2 * e2
        / (2.0 * q.t * 2.0 * eps_qk * 2.0 * norm3(k1.x) * 2.0 * norm3(k2.x));
    let w = acc * pref;
    if math::abs(w.im) > 1e-9 * math::abs(w.re).max(1e-300) {
        return Err(Error::NonFinite("trace kernel has an imaginary part"));
    }
    Ok(w.re)
}

// ---------------------------------------------------------------------------
// Collision rate and the shell rate matrix
// ---------------------------------------------------------------------------

/// Inner photon-spectrum integral of the collision rate at fixed transfer
/// magnitude k and electron energy change delta = ε_{q+k} − ε_q:
/// ∫_{p_min} dp n(p)[1+n(p+δ)][1+cos²γ] with p_min = max(0, (k−δ)/2).
fn rate_spectrum_integral(
    k: f64,
    delta: f64,
    params: &PhysicalParams,
    tol: f64,
    stimulated: bool,
) -> Result<f64> {
    let temp = params.temperature;
    if !(temp > 0.0) {
        return Err(Error::InvalidParameter("collision rates need T > 0"));
    }
    let p_min = (0.5 * (k - delta)).max(0.0);
    if k + delta <= 0.0 {
        return Ok(0.0); // empty kinematic range
    }
    let p_max = p_min + 48.0 * temp + 2.0 * math::abs(delta);
    let bp = [
        p_min + 0.5 * temp,
        p_min + 2.0 * temp,
        p_min + 8.0 * temp,
        p_min + 20.0 * temp,
    ];
    let (value, err) = adaptive_gk15_real(
        |p| {
            if p <= 0.0 {
                return 0.0;
            }
            let pp = p + delta;
            if pp <= 0.0 {
                return 0.0;
            }
            let n_in = 1.0 / math::expm1(p / temp);
            let stim = if stimulated {
                1.0 + 1.0 / math::expm1(pp / temp)
            } else {
                1.0
            };
            let cosg =
                (2.0 * p * p + 2.0 * p * delta + delta * delta - k * k) / (2.0 * p * pp);
            n_in * stim * (1.0 + cosg * cosg)
        },
        p_min,
        p_max,
        &bp,
        tol,
        4000,
    );
    if err > tol.max(1e-12 * math::abs(value)) * 50.0 {
        return Err(Error::QuadratureTolerance {
            requested: tol,
            achieved: err,
        });
    }
    Ok(value)
}

/// Transition rate C(q, k): probability per unit time for the electron to
/// arrive at momentum q by a collision transferring k, with the angular δ
/// resolved exactly over cos∠(p,k) and the azimuth integrated analytically.
pub fn collision_rate(q: Vec3, k: Vec3, params: &PhysicalParams, tol: f64) -> Result<f64> {
    collision_rate_with(q, k, params, tol, true)
}

/// As [`collision_rate`] but with the stimulated-emission factor [1+n]
/// switched off; used by the Thomson cross-check.
pub fn collision_rate_spontaneous(
    q: Vec3,
    k: Vec3,
    params: &PhysicalParams,
    tol: f64,
) -> Result<f64> {
    collision_rate_with(q, k, params, tol, false)
}

fn collision_rate_with(
    q: Vec3,
    k: Vec3,
    params: &PhysicalParams,
    tol: f64,
    stimulated: bool,
) -> Result<f64> {
    let kn = norm3(k);
    if kn == 0.0 {
        return Err(Error::InvalidParameter(
            "forward transition excluded: gain and loss coincide at k = 0",
        ));
    }
    let m = params.m;
    let qk = add3(q, k);
    let delta = math::sqrt(m * m + dot3(qk, qk)) - math::sqrt(m * m + dot3(q, q));
    let e2 = params.e_squared();
    let pref = e2 * e2 / (8.0 * math::PI * m * m * kn);
    let inner = rate_spectrum_integral(kn, delta, params, tol, stimulated)?;
    Ok(pref * inner)
}

/// Radial shell grid: Gauss–Legendre nodes on [0, q_max] with their dq
/// weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellGrid {
    pub q: Vec<f64>,
    pub wq: Vec<f64>,
}

impl ShellGrid {
    pub fn gauss(n: usize, q_max: f64) -> Result<Self> {
        if n < 4 || !(q_max > 0.0) {
            return Err(Error::InvalidParameter("need n >= 4 shells and q_max > 0"));
        }
        let rule = crate::quad::gauss_legendre(n);
        let mut q = Vec::with_capacity(n);
        let mut wq = Vec::with_capacity(n);
        for &(x, w) in rule.iter() {
            q.push(0.5 * q_max * (x + 1.0));
            wq.push(0.5 * q_max * w);
        }
        Ok(Self { q, wq })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// 3D measure weight 4πq²wq/(2π)³ of shell i.
    pub fn measure(&self, i: usize) -> f64 {
        4.0 * math::PI * self.q[i] * self.q[i] * self.wq[i] / math::powi(2.0 * math::PI, 3)
    }
}

/// Isotropic momentum distribution ρ(|q|) ≥ 0 on a shell grid, normalized
/// so that Σ_i measure_i ρ_i = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumDistribution {
    pub grid: ShellGrid,
    pub values: Vec<f64>,
}

impl MomentumDistribution {
    pub fn new(grid: ShellGrid, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch("value count"));
        }
        let mut tr = 0.0;
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::NonFinite("distribution value"));
            }
            tr += grid.measure(i) * v;
        }
        if !(tr > 0.0) {
            return Err(Error::InvalidParameter("distribution has zero norm"));
        }
        for v in &mut values {
            *v /= tr;
        }
        Ok(Self { grid, values })
    }

    /// Boltzmann distribution ∝ e^{−ε_kin(q)/T_e}.
    pub fn boltzmann(grid: ShellGrid, m: f64, t_e: f64) -> Result<Self> {
        let values = grid
            .q
            .iter()
            .map(|&q| math::exp(-math::kinetic_energy(m, q) / t_e))
            .collect();
        Self::new(grid, values)
    }

    /// Gaussian shell centred at q0 with the given width.
    pub fn shell(grid: ShellGrid, q0: f64, width: f64) -> Result<Self> {
        let values = grid
            .q
            .iter()
            .map(|&q| math::exp(-(q - q0) * (q - q0) / (2.0 * width * width)))
            .collect();
        Self::new(grid, values)
    }

    pub fn trace(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.measure(i) * v)
            .sum()
    }

    /// Mean kinetic energy ⟨ε_q − m⟩.
    pub fn mean_kinetic_energy(&self, m: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.measure(i) * v * math::kinetic_energy(m, self.grid.q[i]))
            .sum()
    }
}

/// Symmetric pair kernel S_ij = J_ij e^{−βε_j}, where
/// J_ij = ∬ dk dp n(p)[1+n(p+Δ)][1+cos²γ] over the triangle-allowed
/// k ∈ [|q_i−q_j|, q_i+q_j] and Δ = ε_kin(q_j) − ε_kin(q_i). Detailed
/// balance makes S symmetric in (i, j).
pub fn shell_pair_kernel(qi: f64, qj: f64, params: &PhysicalParams, tol: f64) -> Result<f64> {
    let m = params.m;
    let beta = 1.0 / params.temperature;
    let delta = math::kinetic_energy(m, qj) - math::kinetic_energy(m, qi);
    let k_lo = math::abs(qi - qj).max(1e-14 * (qi + qj));
    let k_hi = qi + qj;
    if k_hi <= k_lo {
        return Ok(0.0);
    }
    let (value, _err) = adaptive_gk15_real(
        |k| rate_spectrum_integral(k, delta, params, tol * 1e-2, true).unwrap_or(0.0),
        k_lo,
        k_hi,
        &[
            k_lo + 0.25 * (k_hi - k_lo),
            k_lo + 0.5 * (k_hi - k_lo),
            k_lo + 0.75 * (k_hi - k_lo),
        ],
        tol,
        2000,
    );
    Ok(value * math::exp(-beta * math::kinetic_energy(m, qj)))
}

/// Shell-to-shell rate matrix with gain entries
/// A_ij = wq_j (q_j/q_i) κ₀ J_ij (i ≠ j), κ₀ = e⁴/(32π³m²), and the loss
/// diagonal fixed by exact conservation of Σ_i measure_i ρ_i.
#[derive(Debug, Clone)]
pub struct RateMatrix {
    pub grid: ShellGrid,
    /// Row-major n×n generator.
    pub a: Vec<f64>,
    pub m: f64,
    pub temperature: f64,
}

impl RateMatrix {
    /// Assemble from precomputed pair kernels (upper triangle, row-major
    /// i < j order as produced by iterating i, then j > i).
    pub fn from_pair_kernels(
        grid: ShellGrid,
        s_upper: &[f64],
        params: &PhysicalParams,
    ) -> Result<Self> {
        let n = grid.len();
        if s_upper.len() != n * (n - 1) / 2 {
            return Err(Error::GridMismatch("pair kernel count"));
        }
        let e2 = params.e_squared();
        let kappa0 = e2 * e2 / (32.0 * math::powi(math::PI, 3) * params.m * params.m);
        let beta = 1.0 / params.temperature;
        let ekin: Vec<f64> = grid
            .q
            .iter()
            .map(|&q| math::kinetic_energy(params.m, q))
            .collect();
        let mut a = alloc::vec![0.0; n * n];
        let mut upper = 0usize;
        for i in 0..n {
            for j in i + 1..n {
                let s = s_upper[upper];
                upper += 1;
                // J_ij = S e^{+beta e_j}, J_ji = S e^{+beta e_i}
                let jij = s * math::exp(beta * ekin[j]);
                let jji = s * math::exp(beta * ekin[i]);
                a[i * n + j] = grid.wq[j] * (grid.q[j] / grid.q[i]) * kappa0 * jij;
                a[j * n + i] = grid.wq[i] * (grid.q[i] / grid.q[j]) * kappa0 * jji;
            }
        }
        // loss diagonal from the measure-weighted column sums
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                if i != j {
                    s += grid.measure(i) * a[i * n + j];
                }
            }
            a[j * n + j] = -s / grid.measure(j);
        }
        Ok(Self {
            grid,
            a,
            m: params.m,
            temperature: params.temperature,
        })
    }

    /// Assemble by computing every pair kernel serially.
    pub fn assemble(grid: ShellGrid, params: &PhysicalParams, tol: f64) -> Result<Self> {
        let n = grid.len();
        let mut s = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                s.push(shell_pair_kernel(grid.q[i], grid.q[j], params, tol)?);
            }
        }
        Self::from_pair_kernels(grid, &s, params)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// dρ/dt for the given shell values.
    pub fn apply(&self, rho: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let mut out = alloc::vec![0.0; n];
        for i in 0..n {
            let row = &self.a[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for (j, r) in row.iter().enumerate() {
                acc += r * rho[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Largest total out-rate max_j |A_jj| (sets the explicit-step bound).
    pub fn max_rate(&self) -> f64 {
        let n = self.grid.len();
        let mut m: f64 = 0.0;
        for j in 0..n {
            m = m.max(math::abs(self.a[j * n + j]));
        }
        m
    }

    /// Gain term Σ_{j≠i} A_ij ρ_j, used to scale residuals.
    pub fn gain(&self, rho: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let mut out = alloc::vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for (j, &r) in rho.iter().enumerate() {
                if j != i {
                    acc += self.a[i * n + j] * r;
                }
            }
            out[i] = acc;
        }
        out
    }
}

/// One explicit Euler step ρ' = ρ + dt·Aρ. Rejects steps violating the
/// stability precondition dt ≤ 0.01/max-rate and steps that produce a
/// negative density (with a suggested smaller dt). The trace is conserved
/// exactly by the generator construction.
pub fn step(
    matrix: &RateMatrix,
    rho: &MomentumDistribution,
    dt: f64,
) -> Result<MomentumDistribution> {
    if rho.grid != matrix.grid {
        return Err(Error::GridMismatch("distribution grid differs from matrix"));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("dt must be positive"));
    }
    let max_rate = matrix.max_rate();
    if dt * max_rate > 0.010_000_001 {
        return Err(Error::InvalidParameter(
            "explicit step too large: need dt <= 0.01/max-rate",
        ));
    }
    let deriv = matrix.apply(&rho.values);
    let mut out = Vec::with_capacity(rho.values.len());
    let mut suggested: f64 = dt;
    let mut negative = false;
    for (v, d) in rho.values.iter().zip(&deriv) {
        let nv = v + dt * d;
        if nv < 0.0 {
            negative = true;
            if *d < 0.0 && *v > 0.0 {
                suggested = suggested.min(0.5 * v / -d);
            }
        }
        out.push(nv);
    }
    if negative {
        return Err(Error::NegativeDensity {
            suggested_dt: suggested,
        });
    }
    Ok(MomentumDistribution {
        grid: rho.grid.clone(),
        values: out,
    })
}

/// Sup-norm of the collision integral relative to the gain-term magnitude.
pub fn equilibrium_residual(matrix: &RateMatrix, rho: &MomentumDistribution) -> f64 {
    let deriv = matrix.apply(&rho.values);
    let gain = matrix.gain(&rho.values);
    let gain_scale = gain.iter().fold(0.0f64, |m, g| m.max(math::abs(*g)));
    let worst = deriv.iter().fold(0.0f64, |m, d| m.max(math::abs(*d)));
    worst / gain_scale.max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::FINE_STRUCTURE;

    fn params(t_over_m: f64) -> PhysicalParams {
        PhysicalParams::new(1.0, t_over_m, FINE_STRUCTURE, 0.5).unwrap()
    }

    #[test]
    fn planck_values() {
        let t = 0.01;
        let n = planck_n(t * math::ln(2.0), t).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
        // Wien tail
        let w = planck_n(10.0 * t, t).unwrap();
        assert!((w / math::exp(-10.0) - 1.0).abs() < 0.01);
        // Rayleigh-Jeans: Laurent oracle T/k - 1/2 + k/12T
        let k = 1.0e-6 * t;
        let n0 = planck_n(k, t).unwrap();
        assert!((n0 / (t / k) - 1.0).abs() < 1e-3);
        let laurent = t / k - 0.5 + k / (12.0 * t);
        assert!((n0 / laurent - 1.0).abs() < 1e-12);
        assert!(planck_n(-1.0, t).is_err());
        assert!(planck_n(0.0, t).is_err());
    }

    #[test]
    fn w_nonrel_geometry() {
        let p = params(1.0e-4);
        let e2 = p.e_squared();
        let k1 = [0.0, 0.0, 2.0e-4];
        let par = w_nonrel(k1, [0.0, 0.0, 3.0e-4], &p).unwrap();
        let expect = math::PI * e2 * e2 / (2.0e-4 * 3.0e-4);
        assert!((par - expect).abs() < 1e-12 * expect);
        let perp = w_nonrel(k1, [3.0e-4, 0.0, 0.0], &p).unwrap();
        assert!((perp - 0.5 * expect).abs() < 1e-12 * expect);
        assert!(w_nonrel([0.0; 3], k1, &p).is_err());
    }

    #[test]
    fn angular_average_of_bracket() {
        // <1 + cos^2> over isotropic directions = 4/3
        let (avg, _) =
            adaptive_gk15_real(|c| (1.0 + c * c) * 0.5, -1.0, 1.0, &[], 1e-12, 100);
        assert!((avg - 4.0 / 3.0).abs() < 1e-12);
    }

    /// Outgoing photon energy from exact Compton kinematics:
    /// electron(q) + photon(k2) -> electron(q') + photon(|k1| n̂₁).
    fn compton_out_energy(m: f64, q: Vec3, k2: Vec3, n1: Vec3) -> f64 {
        let e = math::sqrt(m * m + dot3(q, q)) + norm3(k2);
        let ptot = add3(q, k2);
        (e * e - dot3(ptot, ptot) - m * m) / (2.0 * (e - dot3(ptot, n1)))
    }

    fn unit(v: Vec3) -> Vec3 {
        crate::fourvec::scale3(v, 1.0 / norm3(v))
    }

    #[test]
    fn trace_kernel_reduces_to_nonrel() {
        let p = params(1.0e-4);
        let m = p.m;
        let q3: Vec3 = [1.0e-4, -5.0e-5, 2.0e-4];
        let k2_3: Vec3 = [3.0e-4, 1.0e-4, -2.0e-4];
        let n1 = unit([0.3, -0.8, 0.52]);
        let w1 = compton_out_energy(m, q3, k2_3, n1);
        let k1_3 = crate::fourvec::scale3(n1, w1);
        let q = FourVector::on_shell(m, q3);
        let k1 = FourVector::light_like(k1_3, 1.0);
        let k2 = FourVector::light_like(k2_3, 1.0);
        let full = w_trace(&q, &k1, &k2, &p).unwrap();
        let nr = w_nonrel(k1_3, k2_3, &p).unwrap();
        let dev = (full / nr - 1.0).abs();
        assert!(dev < 0.01, "relative deviation {dev}");
    }

    #[test]
    fn trace_kernel_linear_convergence() {
        // deviation from the nonrelativistic limit scales linearly with the
        // overall momentum scale: halving the scale halves the deviation
        let p = params(1.0e-4);
        let m = p.m;
        let dev_at = |scale: f64| -> f64 {
            let q3 = [1.0e-3 * scale, 0.0, 0.5e-3 * scale];
            let k2_3 = [0.0, 1.2e-3 * scale, 0.9e-3 * scale];
            let n1 = unit([0.5, 0.4, -0.77]);
            let w1 = compton_out_energy(m, q3, k2_3, n1);
            let k1_3 = crate::fourvec::scale3(n1, w1);
            let full = w_trace(
                &FourVector::on_shell(m, q3),
                &FourVector::light_like(k1_3, 1.0),
                &FourVector::light_like(k2_3, 1.0),
                &p,
            )
            .unwrap();
            let nr = w_nonrel(k1_3, k2_3, &p).unwrap();
            (full / nr - 1.0).abs()
        };
        let mut prev = dev_at(1.0);
        for halvings in 1..=3 {
            let dev = dev_at(0.5f64.powi(halvings));
            let order = prev / dev;
            assert!(
                (1.5..=2.6).contains(&order),
                "halving {halvings}: ratio {order}"
            );
            prev = dev;
        }
    }

    #[test]
    fn trace_kernel_reverse_process_symmetric() {
        let p = params(1.0e-4);
        let m = p.m;
        let q3: Vec3 = [2.0e-4, 1.0e-4, -1.5e-4];
        let k2_3: Vec3 = [-1.0e-4, 2.5e-4, 1.0e-4];
        let n1 = unit([-0.2, 0.9, 0.38]);
        let w1 = compton_out_energy(m, q3, k2_3, n1);
        let k1_3 = crate::fourvec::scale3(n1, w1);
        let fwd = w_trace(
            &FourVector::on_shell(m, q3),
            &FourVector::light_like(k1_3, 1.0),
            &FourVector::light_like(k2_3, 1.0),
            &p,
        )
        .unwrap();
        // reversed process: electron(q+k) + photon(k1) -> electron(q) + photon(k2)
        let k3 = crate::fourvec::sub3(k2_3, k1_3);
        let q_rev = add3(q3, k3);
        let rev = w_trace(
            &FourVector::on_shell(m, q_rev),
            &FourVector::light_like(k2_3, 1.0),
            &FourVector::light_like(k1_3, 1.0),
            &p,
        )
        .unwrap();
        assert!((fwd / rev - 1.0).abs() < 1e-9, "{fwd} vs {rev}");
    }

    #[test]
    fn trace_kernel_offshell_rejected() {
        let p = params(1.0e-4);
        let q = FourVector::new(1.1, [0.0; 3]); // off the mass shell
        let k1 = FourVector::light_like([1.0e-4, 0.0, 0.0], 1.0);
        let k2 = FourVector::light_like([0.0, 1.0e-4, 0.0], 1.0);
        assert!(matches!(w_trace(&q, &k1, &k2, &p), Err(Error::OffShell(_))));
    }

    #[test]
    fn collision_rate_detailed_balance() {
        let p = params(2.0e-5);
        let beta = 1.0 / p.temperature;
        let m = p.m;
        let cases = [
            ([3.0e-3, 1.0e-3, -2.0e-3], [1.0e-5, -3.0e-5, 2.0e-5]),
            ([1.0e-2, 0.0, 5.0e-3], [-4.0e-5, 1.0e-5, 6.0e-5]),
            ([0.0, 2.0e-3, 1.0e-3], [5.0e-5, 5.0e-5, -1.0e-5]),
        ];
        for (q, k) in cases {
            let c_fwd = collision_rate(q, k, &p, 1e-12).unwrap();
            let qk = add3(q, k);
            let mink = [-k[0], -k[1], -k[2]];
            let c_rev = collision_rate(qk, mink, &p, 1e-12).unwrap();
            let lhs = c_fwd * math::exp(-beta * math::kinetic_energy(m, norm3(qk)));
            let rhs = c_rev * math::exp(-beta * math::kinetic_energy(m, norm3(q)));
            assert!(
                (lhs / rhs - 1.0).abs() < 1e-8,
                "detailed balance violated: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn thomson_rate_cross_check() {
        // total out-rate of a slow electron with stimulated emission off:
        // integrate C(q+k, -k) over transfers against sigma_T n_gamma
        let p = params(1.0e-5);
        let t = p.temperature;
        let q: Vec3 = [1.0e-6, 0.0, 0.0];
        let (rate, _) = adaptive_gk15_real(
            |k| {
                if k <= 0.0 {
                    return 0.0;
                }
                let kv = [0.0, 0.0, k];
                let qk = add3(q, kv);
                let c =
                    collision_rate_spontaneous(qk, [0.0, 0.0, -k], &p, 1e-10).unwrap_or(0.0);
                4.0 * math::PI * k * k * c / math::powi(2.0 * math::PI, 3)
            },
            1e-6 * t,
            60.0 * t,
            &[0.5 * t, 2.0 * t, 8.0 * t, 25.0 * t],
            1e-14,
            4000,
        );
        let alpha = p.alpha;
        let sigma_t = 8.0 * math::PI * alpha * alpha / (3.0 * p.m * p.m);
        let zeta3 = 1.2020569031595942;
        let n_gamma = 2.0 * zeta3 * t * t * t / (math::PI * math::PI);
        let ratio = rate / (sigma_t * n_gamma);
        assert!((ratio - 1.0).abs() < 0.10, "Thomson ratio {ratio}");
    }

    #[test]
    fn forward_transfer_rejected() {
        let p = params(1.0e-5);
        assert!(collision_rate([1.0e-3, 0.0, 0.0], [0.0; 3], &p, 1e-10).is_err());
    }

    fn small_matrix(p: &PhysicalParams) -> RateMatrix {
        let grid = ShellGrid::gauss(24, 12.0 * math::sqrt(p.m * p.temperature)).unwrap();
        RateMatrix::assemble(grid, p, 1e-10).unwrap()
    }

    #[test]
    fn boltzmann_is_stationary() {
        let p = params(2.0e-4);
        let mat = small_matrix(&p);
        let rho =
            MomentumDistribution::boltzmann(mat.grid.clone(), p.m, p.temperature).unwrap();
        let res = equilibrium_residual(&mat, &rho);
        assert!(res < 1e-8, "equilibrium residual {res}");
        // hotter distribution is visibly off equilibrium
        let hot =
            MomentumDistribution::boltzmann(mat.grid.clone(), p.m, 2.0 * p.temperature).unwrap();
        let res_hot = equilibrium_residual(&mat, &hot);
        assert!(res_hot > 10.0 * res.max(1e-12), "hot residual {res_hot}");
        // bounded shell is off equilibrium too
        let tq = math::sqrt(p.m * p.temperature);
        let shell = MomentumDistribution::shell(mat.grid.clone(), 6.0 * tq, tq).unwrap();
        assert!(equilibrium_residual(&mat, &shell) > 1e-3);
    }

    #[test]
    fn step_conserves_trace_exactly() {
        let p = params(2.0e-4);
        let mat = small_matrix(&p);
        let rho0 =
            MomentumDistribution::boltzmann(mat.grid.clone(), p.m, 2.0 * p.temperature).unwrap();
        let dt = 0.009 / mat.max_rate();
        let mut rho = rho0.clone();
        let tr0 = rho.trace();
        for _ in 0..50 {
            rho = step(&mat, &rho, dt).unwrap();
            assert!((rho.trace() - tr0).abs() <= 1e-10 * tr0);
        }
    }

    #[test]
    fn step_guards() {
        let p = params(2.0e-4);
        let mat = small_matrix(&p);
        let rho =
            MomentumDistribution::boltzmann(mat.grid.clone(), p.m, 2.0 * p.temperature).unwrap();
        let dt_big = 1.0 / mat.max_rate();
        assert!(matches!(
            step(&mat, &rho, dt_big),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn hotter_maxwellian_cools_monotonically() {
        let p = params(2.0e-4);
        let mat = small_matrix(&p);
        let mut rho =
            MomentumDistribution::boltzmann(mat.grid.clone(), p.m, 2.0 * p.temperature).unwrap();
        let dt = 0.01 / mat.max_rate();
        let eq = MomentumDistribution::boltzmann(mat.grid.clone(), p.m, p.temperature)
            .unwrap()
            .mean_kinetic_energy(p.m);
        let mut prev = rho.mean_kinetic_energy(p.m);
        for _ in 0..60 {
            rho = step(&mat, &rho, dt).unwrap();
            let e = rho.mean_kinetic_energy(p.m);
            assert!(e <= prev + 1e-16, "energy must not increase: {e} > {prev}");
            assert!(e > eq * 0.999, "must stay above equilibrium energy");
            prev = e;
        }
    }
}
