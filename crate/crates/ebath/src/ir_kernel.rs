//! Direct numerical evaluation of the infrared exponent integrals g_rs and
//! the identities behind their factorization.
//!
//! The exponent is an on-shell light-cone integral: with q₁ = q and
//! q₂ = q + p on the electron mass shell, η₁ = 1, η₂ = −1,
//!
//! g_rs = η_r η_s ∫_{|k|<Λ} d³k/(2π)³ Σ_± w_±(|k|)/(2|k|)
//!        · d_{μν}(k) q_r^μ q_s^ν / ((k·q_r)(k·q_s))
//!        · [1 + e^{it(a_r−a_s)} − e^{−itη_r a_r} − e^{−itη_s a_s}]
//!
//! evaluated on both branches k₀ = ±|k| with weights w₊ = 1 + n(|k|) and
//! w₋ = n(|k|); a_r = (k·q_r)/q_r⁰. On shell the Coulomb projector
//! contraction reduces to minus the transverse overlap,
//! d_{μν} u^μ v^ν = −u_T·v_T, which is what the integrand uses; the full
//! off-shell tensor is exposed separately as [`coulomb_projector`].
//!
//! The combination g = g₁₁ + g₂₂ + 2g₂₁ is accumulated per quadrature node,
//! so its exact pointwise cancellation at p = 0 carries over to the
//! numerics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fit::{fit_asymptotic, AsymptoticFit, FitBasis};
use crate::fourvec::{add3, dot3, norm3, FourVector, Vec3};
use crate::kinetics::planck_n;
use crate::math;
use crate::quad::{adaptive_gk15_rel, quantized_size, GlCache};
use crate::units::PhysicalParams;
use crate::C64;

/// Which part of the on-shell weight enters the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// θ(k₀) + n(|k|): full integrand.
    Full,
    /// θ(k₀) only: the T → 0 limit at fixed t.
    Vacuum,
    /// n(|k|) on both branches: the difference Full − Vacuum.
    Thermal,
}

/// Momenta, time and parameters of one exponent evaluation. Both q and p
/// must be deep in the nonrelativistic regime (|q|, |p| ≤ 0.01 m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelInput {
    pub q: Vec3,
    pub p: Vec3,
    pub t: f64,
    pub params: PhysicalParams,
}

impl KernelInput {
    pub fn new(q: Vec3, p: Vec3, t: f64, params: PhysicalParams) -> Result<Self> {
        let cap = 0.01 * params.m;
        if norm3(q) > cap || norm3(p) > cap {
            return Err(Error::InvalidParameter(
                "kernel momenta must satisfy |q|, |p| <= 0.01 m",
            ));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter("time must be nonnegative"));
        }
        Ok(Self { q, p, t, params })
    }
}

/// The three independent exponent integrals and their combination
/// g = g₁₁ + g₂₂ + 2 g₂₁, with the accumulated quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentResult {
    pub g11: C64,
    pub g22: C64,
    pub g21: C64,
    pub g: C64,
    pub abs_error: f64,
}

/// Coulomb-gauge polarization tensor d_{μν}(k) for general (off-shell) k
/// with nonzero spatial part:
/// d_{μν} = η_{μν} − (k₀ k_μ η̄_ν + k₀ k_ν η̄_μ − k_μ k_ν)/|k|², η̄ = (1,0).
pub fn coulomb_projector(k: &FourVector) -> Result<[[f64; 4]; 4]> {
    let ksp2 = dot3(k.x, k.x);
    if ksp2 == 0.0 {
        return Err(Error::InvalidParameter(
            "Coulomb projector undefined at zero spatial momentum",
        ));
    }
    let mut d = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let eta_mu = if mu == 0 { 1.0 } else { 0.0 };
            let eta_nu = if nu == 0 { 1.0 } else { 0.0 };
            d[mu][nu] = crate::fourvec::metric(mu, nu)
                - (k.t * k.lower(mu) * eta_nu + k.t * k.lower(nu) * eta_mu
                    - k.lower(mu) * k.lower(nu))
                    / ksp2;
        }
    }
    Ok(d)
}

/// Lorentz-gauge vertex tensor g^μ_α(k) = δ^μ_α + k_α(k^μ − η^μ k₀)/|k|²
/// (first index contravariant, second covariant). Satisfies
/// g^μ_α k_μ = 0 and g^μ_α η_{μν} g^ν_β = d_{αβ}.
pub fn lorentz_vertex_tensor(k: &FourVector) -> Result<[[f64; 4]; 4]> {
    let ksp2 = dot3(k.x, k.x);
    if ksp2 == 0.0 {
        return Err(Error::InvalidParameter(
            "vertex tensor undefined at zero spatial momentum",
        ));
    }
    let mut g = [[0.0; 4]; 4];
    for mu in 0..4 {
        for al in 0..4 {
            let delta = if mu == al { 1.0 } else { 0.0 };
            let eta_up_mu = if mu == 0 { 1.0 } else { 0.0 };
            g[mu][al] = delta + k.lower(al) * (k.upper(mu) - eta_up_mu * k.t) / ksp2;
        }
    }
    Ok(g)
}

/// Contraction d_{μν} u^μ v^ν.
pub fn projector_contract(d: &[[f64; 4]; 4], u: &FourVector, v: &FourVector) -> f64 {
    let mut acc = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            acc += d[mu][nu] * u.upper(mu) * v.upper(nu);
        }
    }
    acc
}

struct Worker {
    t: f64,
    temperature: f64,
    lambda: f64,
    mode: WeightMode,
    // z is the p direction (or q direction when p = 0); q1 and q2 share the
    // transverse offset rho because q2 - q1 is parallel to z
    qz: [f64; 2],
    rho: f64,
    eps: [f64; 2],
    collinear: bool,
    gl: GlCache,
}

impl Worker {
    fn new(input: &KernelInput, mode: WeightMode) -> Self {
        let pm = norm3(input.p);
        let qm = norm3(input.q);
        let zhat: Vec3 = if pm > 0.0 {
            crate::fourvec::scale3(input.p, 1.0 / pm)
        } else if qm > 0.0 {
            crate::fourvec::scale3(input.q, 1.0 / qm)
        } else {
            [0.0, 0.0, 1.0]
        };
        let q1z = dot3(input.q, zhat);
        let q2v = add3(input.q, input.p);
        let q2z = dot3(q2v, zhat);
        let rho2 = (dot3(input.q, input.q) - q1z * q1z).max(0.0);
        let rho = math::sqrt(rho2);
        let m = input.params.m;
        let eps1 = math::sqrt(m * m + dot3(input.q, input.q));
        let eps2 = math::sqrt(m * m + dot3(q2v, q2v));
        let collinear = rho <= 1e-13 * (qm + pm + 1e-300);
        Worker {
            t: input.t,
            temperature: input.params.temperature,
            lambda: input.params.lambda,
            mode,
            qz: [q1z, q2z],
            rho: if collinear { 0.0 } else { rho },
            eps: [eps1, eps2],
            collinear,
            gl: GlCache::new(),
        }
    }

    #[inline]
    fn weights(&self, k: f64) -> (f64, f64) {
        match self.mode {
            WeightMode::Full => {
                let n = if self.temperature > 0.0 {
                    planck_n(k, self.temperature).unwrap_or(0.0)
                } else {
                    0.0
                };
                (1.0 + n, n)
            }
            WeightMode::Vacuum => (1.0, 0.0),
            WeightMode::Thermal => {
                let n = if self.temperature > 0.0 {
                    planck_n(k, self.temperature).unwrap_or(0.0)
                } else {
                    0.0
                };
                (n, n)
            }
        }
    }

    /// One integrand sample at fixed |k|, branch sign σ and direction
    /// (u_r = k̂·**q**_r): the three g_rs densities and their combination.
    #[inline]
    fn node(&self, k: f64, sigma: f64, u1: f64, u2: f64, qq12: f64, w: f64) -> [C64; 4] {
        let den1 = k * (sigma * self.eps[0] - u1);
        let den2 = k * (sigma * self.eps[1] - u2);
        let a1 = den1 / self.eps[0];
        let a2 = den2 / self.eps[1];
        // on-shell projector contraction: d q_r q_s = -(q_r.q_s - u_r u_s)
        let qt11 = self.qz[0] * self.qz[0] + self.rho * self.rho - u1 * u1;
        let qt22 = self.qz[1] * self.qz[1] + self.rho * self.rho - u2 * u2;
        let qt21 = qq12 - u2 * u1;
        let e1 = math::cis(self.t * a1);
        let e2 = math::cis(self.t * a2);
        let b11 = C64::new(2.0 - 2.0 * e1.re, 2.0 * e1.im);
        let b22 = C64::new(2.0 - 2.0 * e2.re, -2.0 * e2.im);
        let b21 = C64::new(1.0, 0.0) + e2 * e1.conj() - e2 - e1.conj();
        let common = w / (2.0 * k);
        let d11 = b11 * (common * -qt11 / (den1 * den1));
        let d22 = b22 * (common * -qt22 / (den2 * den2));
        let d21 = b21 * (common * qt21 / (den1 * den2));
        [d11, d22, d21, d11 + d22 + 2.0 * d21]
    }

    /// Integral over cos θ (and azimuth when q has a transverse part) at
    /// fixed |k|, including the k²/(2π)³ measure.
    fn angular(&mut self, k: f64) -> [C64; 4] {
        if k == 0.0 {
            return [C64::new(0.0, 0.0); 4];
        }
        let (w_plus, w_minus) = self.weights(k);
        let vmax = (math::abs(self.qz[0]).max(math::abs(self.qz[1])) + self.rho)
            / self.eps[0].min(self.eps[1]);
        let beta_c = self.t * k * 2.0 * vmax;
        let n_c = quantized_size((0.75 * beta_c) as usize + 24);
        let rule = self.gl.rule(n_c);
        let mut acc = [C64::new(0.0, 0.0); 4];
        if self.collinear {
            let qq12 = self.qz[0] * self.qz[1];
            for &(c, wc) in rule.iter() {
                let u1 = c * self.qz[0];
                let u2 = c * self.qz[1];
                for (sigma, w) in [(1.0, w_plus), (-1.0, w_minus)] {
                    if w == 0.0 {
                        continue;
                    }
                    let v = self.node(k, sigma, u1, u2, qq12, w);
                    for i in 0..4 {
                        acc[i] += v[i] * wc;
                    }
                }
            }
            let measure = 2.0 * math::PI * k * k / math::powi(2.0 * math::PI, 3);
            for a in &mut acc {
                *a *= measure;
            }
        } else {
            let beta_phi = self.t * k * 2.0 * self.rho / self.eps[0].min(self.eps[1]);
            let n_phi = quantized_size((1.2 * beta_phi) as usize + 16);
            let qq12 = self.qz[0] * self.qz[1] + self.rho * self.rho;
            let dphi = 2.0 * math::PI / n_phi as f64;
            for &(c, wc) in rule.iter() {
                let s = math::sqrt((1.0 - c * c).max(0.0));
                let mut phi_acc = [C64::new(0.0, 0.0); 4];
                for j in 0..n_phi {
                    let phi = dphi * j as f64;
                    let perp = s * math::cos(phi) * self.rho;
                    let u1 = c * self.qz[0] + perp;
                    let u2 = c * self.qz[1] + perp;
                    for (sigma, w) in [(1.0, w_plus), (-1.0, w_minus)] {
                        if w == 0.0 {
                            continue;
                        }
                        let v = self.node(k, sigma, u1, u2, qq12, w);
                        for i in 0..4 {
                            phi_acc[i] += v[i];
                        }
                    }
                }
                for i in 0..4 {
                    acc[i] += phi_acc[i] * (wc * dphi);
                }
            }
            let measure = k * k / math::powi(2.0 * math::PI, 3);
            for a in &mut acc {
                *a *= measure;
            }
        }
        acc
    }

    /// Upper limit and seed breakpoints of the radial integral: a geometric
    /// ladder for the 1/k structure, each rung split so no seed panel spans
    /// more than ~7 radians of the fastest phase t(1+v)k.
    fn breakpoints(&self) -> (f64, Vec<f64>) {
        let k_top = match self.mode {
            WeightMode::Thermal => self.lambda.min(60.0 * self.temperature.max(1e-300)),
            _ => self.lambda,
        };
        let k_reg = {
            let by_time = if self.t > 0.0 { 0.5 / self.t } else { k_top };
            (by_time.min(k_top / 64.0)).max(k_top * 9.0e-13)
        };
        let mut edges: Vec<f64> = Vec::new();
        let mut k = k_top;
        while k > k_reg {
            edges.push(k);
            k *= 0.5;
        }
        edges.push(k_reg);
        edges.reverse();
        let rate = self.t * 1.2;
        let budget = 7.0;
        let mut bp: Vec<f64> = Vec::new();
        let mut prev = 0.0;
        for &edge in &edges {
            let span = edge - prev;
            let nseg = if rate > 0.0 {
                ((span * rate / budget) as usize).clamp(1, 20_000)
            } else {
                1
            };
            for i in 1..=nseg {
                bp.push(prev + span * i as f64 / nseg as f64);
            }
            prev = edge;
        }
        (k_top, bp)
    }
}

/// Evaluate g₁₁, g₂₂, g₂₁ and g = g₁₁+g₂₂+2g₂₁ by adaptive quadrature over
/// the light-cone measure, to relative tolerance `rel_tol` with respect to
/// the largest component.
pub fn g_exponent(input: &KernelInput, mode: WeightMode, rel_tol: f64) -> Result<ExponentResult> {
    let zero = ExponentResult {
        g11: C64::new(0.0, 0.0),
        g22: C64::new(0.0, 0.0),
        g21: C64::new(0.0, 0.0),
        g: C64::new(0.0, 0.0),
        abs_error: 0.0,
    };
    if input.t == 0.0 {
        return Ok(zero); // the four-exponential bracket vanishes identically
    }
    if norm3(input.q) == 0.0 && norm3(input.p) == 0.0 {
        return Ok(zero); // transverse projections of zero vectors
    }
    if mode != WeightMode::Vacuum && input.params.temperature == 0.0 {
        if mode == WeightMode::Thermal {
            return Ok(zero);
        }
        return g_exponent(input, WeightMode::Vacuum, rel_tol);
    }
    let mut worker = Worker::new(input, mode);
    let (k_top, bp) = worker.breakpoints();
    let max_panels = (bp.len() + 2) * 8 + 4000;
    let r = adaptive_gk15_rel(
        |k| worker.angular(k),
        0.0,
        k_top,
        &bp,
        1e-300,
        rel_tol,
        max_panels,
    );
    let mut scale: f64 = 0.0;
    for v in &r.value {
        scale = scale.max(v.norm());
    }
    if scale > 0.0 && r.abs_error > 10.0 * rel_tol * scale {
        return Err(Error::QuadratureTolerance {
            requested: rel_tol * scale,
            achieved: r.abs_error,
        });
    }
    Ok(ExponentResult {
        g11: r.value[0],
        g22: r.value[1],
        g21: r.value[2],
        g: r.value[3],
        abs_error: r.abs_error,
    })
}

/// Least-squares fit of (t, Re g) samples against a·t + b·ln t + c.
pub fn asymptotic_fit(samples: &[(f64, f64)], basis: FitBasis) -> Result<AsymptoticFit> {
    let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    fit_asymptotic(&ts, &ys, basis)
}

/// Leading thermal coefficient of Re g: −(1/3π)(p²/m²)T.
pub fn thermal_linear_target(p2: f64, params: &PhysicalParams) -> f64 {
    -p2 * params.temperature / (3.0 * math::PI * params.m * params.m)
}

/// Vacuum ln t coefficient in the regime m t ≫ 1, |p| t ≪ 1:
/// −(1/3π²)(p²/m²).
pub fn vacuum_log_target_early(p2: f64, m: f64) -> f64 {
    -p2 / (3.0 * math::PI * math::PI * m * m)
}

/// Vacuum ln t coefficient in the regime |p| t ≫ 1:
/// −(1/3π²)(p² + q² + p·q)/m².
pub fn vacuum_log_target_late(p: Vec3, q: Vec3, m: f64) -> f64 {
    -(dot3(p, p) + dot3(q, q) + dot3(p, q)) / (3.0 * math::PI * math::PI * m * m)
}

/// Exponentiated damping exp(e² Re g / 2) for a computed exponent.
pub fn damping_from_exponent(g: C64, params: &PhysicalParams) -> f64 {
    math::exp(0.5 * params.e_squared() * g.re)
}

/// Both sides of the eikonal factorization identity
/// Σ_perm Π_k 1/(W_k·q + iε) = Π_k 1/(w_k·q + iε), evaluated by brute force
/// over all permutations (W_k are the ordered partial sums).
pub fn eikonal_factorization_check(
    q: &FourVector,
    ws: &[FourVector],
    epsilon: f64,
) -> Result<(C64, C64)> {
    let m = ws.len();
    if !(2..=6).contains(&m) {
        return Err(Error::InvalidParameter("need 2..=6 soft factors"));
    }
    let zs: Vec<C64> = ws.iter().map(|w| C64::new(w.dot(q), epsilon)).collect();
    let scale = zs
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.norm()))
        .max(1e-300);

    let mut rhs = C64::new(1.0, 0.0);
    for z in &zs {
        if z.norm() < 1e-12 * scale {
            return Err(Error::DegenerateDenominator);
        }
        rhs /= z;
    }

    let term = |order: &[usize]| -> Result<C64> {
        let mut partial = C64::new(0.0, 0.0);
        let mut prod = C64::new(1.0, 0.0);
        for &i in order {
            partial += zs[i];
            if partial.norm() < 1e-12 * scale {
                return Err(Error::DegenerateDenominator);
            }
            prod /= partial;
        }
        Ok(prod)
    };

    // Heap's algorithm over all m! orderings
    let mut idx: Vec<usize> = (0..m).collect();
    let mut counters = alloc::vec![0usize; m];
    let mut lhs = term(&idx)?;
    let mut i = 0;
    while i < m {
        if counters[i] < i {
            if i % 2 == 0 {
                idx.swap(0, i);
            } else {
                idx.swap(counters[i], i);
            }
            lhs += term(&idx)?;
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok((lhs, rhs))
}

/// Numerical value of ∫ dζ (1−e^{iζt})(1−e^{−iζt})/ζ², which must equal
/// 2πt. The integrand is 2(1−cos ζt)/ζ²; the tail beyond the quadrature
/// window is summed from its integration-by-parts expansion under the
/// 2/ζ² envelope.
pub fn delta_identity_check(t: f64, rel_tol: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("t must be positive"));
    }
    let cut = 2000.0 / t.max(1.0);
    let nseg = ((cut * t / 7.0) as usize).clamp(8, 40_000);
    let bp: Vec<f64> = (1..nseg).map(|i| cut * i as f64 / nseg as f64).collect();
    let r = adaptive_gk15_rel(
        |z| {
            let v = if z == 0.0 {
                t * t // limit of 2(1 - cos zt)/z^2
            } else {
                2.0 * (1.0 - math::cos(z * t)) / (z * z)
            };
            [C64::new(v, 0.0)]
        },
        0.0,
        cut,
        &bp,
        1e-300,
        rel_tol * 0.1,
        nseg * 8 + 4000,
    );
    // analytic tail of int_cut^inf 2(1 - cos zt)/z^2 dz by parts
    let tail = 2.0 / cut + 2.0 * math::sin(cut * t) / (t * cut * cut)
        - 4.0 * math::cos(cut * t) / (t * t * cut * cut * cut);
    let value = 2.0 * (r.value[0].re + tail); // even integrand, both half-lines
    let achieved = 2.0 * r.abs_error + 24.0 / (t * t * t * math::powi(cut, 4));
    if achieved > rel_tol * value {
        return Err(Error::QuadratureTolerance {
            requested: rel_tol * value,
            achieved,
        });
    }
    Ok(value)
}
