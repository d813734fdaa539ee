//! Event-driven Monte-Carlo cross-check of the kinetic stepper.
//!
//! Independent route to the mean-energy flow of a Maxwellian electron
//! ensemble in the photon bath: photons are drawn from the Planck spectrum
//! by inverse CDF, the scattering angle from the 1 + cos² law, and the
//! outgoing photon energy from exact kinematics, with the stimulated
//! factor 1 + n(p′) as an importance weight. Each sample index owns its
//! own counter-seeded stream, so results are reproducible and independent
//! of evaluation order.

use ebath::fourvec::{add3, dot3, Vec3};
use ebath::PhysicalParams;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tabulated inverse CDF of the Planck number density x²/(e^x − 1).
pub struct PlanckSampler {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl PlanckSampler {
    pub fn new() -> Self {
        let n = 6000;
        let x_max = 42.0;
        let xs: Vec<f64> = (0..=n).map(|i| x_max * i as f64 / n as f64).collect();
        let density = |x: f64| {
            if x == 0.0 {
                0.0
            } else {
                x * x / x.exp_m1()
            }
        };
        let mut cdf = vec![0.0; n + 1];
        for i in 1..=n {
            let h = xs[i] - xs[i - 1];
            cdf[i] = cdf[i - 1] + 0.5 * h * (density(xs[i - 1]) + density(xs[i]));
        }
        let total = cdf[n];
        for c in &mut cdf {
            *c /= total;
        }
        Self { xs, cdf }
    }

    /// Draw x = p/T from the Planck number spectrum.
    pub fn sample(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let idx = self.cdf.partition_point(|&c| c < u);
        if idx == 0 {
            return self.xs[0];
        }
        if idx >= self.cdf.len() {
            return *self.xs.last().unwrap();
        }
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.xs[idx - 1] + frac * (self.xs[idx] - self.xs[idx - 1])
    }

    /// Mean of the sampled spectrum (π⁴/(30ζ(3)) ≈ 2.701 in units of T).
    pub fn analytic_mean(&self) -> f64 {
        let zeta3 = 1.2020569031595942;
        let pi = std::f64::consts::PI;
        pi.powi(4) / (30.0 * zeta3)
    }
}

impl Default for PlanckSampler {
    fn default() -> Self {
        Self::new()
    }
}

fn uniform_direction(rng: &mut impl Rng) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Direction distributed as 1 + cos²Θ around `axis`, by rejection.
fn thomson_direction(rng: &mut impl Rng, axis: Vec3) -> Vec3 {
    loop {
        let n = uniform_direction(rng);
        let c = dot3(n, axis);
        if rng.gen_range(0.0..1.0) < 0.5 * (1.0 + c * c) {
            return n;
        }
    }
}

/// One-sample contribution to d⟨ε_e⟩/dt for an electron of momentum `q`:
/// rate-weighted energy gain σ_T n_γ (1 − v·n̂)(1 + n(p′)) (p − p′).
fn energy_flow_sample(rng: &mut impl Rng, sampler: &PlanckSampler, q: Vec3, params: &PhysicalParams) -> f64 {
    let m = params.m;
    let t = params.temperature;
    let eps_q = (m * m + dot3(q, q)).sqrt();
    let v = [q[0] / eps_q, q[1] / eps_q, q[2] / eps_q];

    let p_in = t * sampler.sample(rng.gen_range(0.0..1.0));
    let n_in = uniform_direction(rng);
    let n_out = thomson_direction(rng, n_in);

    // exact outgoing photon energy from 4-momentum conservation
    let e_tot = eps_q + p_in;
    let ptot = add3(q, [p_in * n_in[0], p_in * n_in[1], p_in * n_in[2]]);
    let p_out = (e_tot * e_tot - dot3(ptot, ptot) - m * m) / (2.0 * (e_tot - dot3(ptot, n_out)));

    let flux = 1.0 - dot3(v, n_in);
    let stimulated = 1.0 + 1.0 / (p_out / t).exp_m1();

    let alpha = params.alpha;
    let sigma_t = 8.0 * std::f64::consts::PI * alpha * alpha / (3.0 * m * m);
    let zeta3 = 1.2020569031595942;
    let n_gamma = 2.0 * zeta3 * t * t * t / (std::f64::consts::PI * std::f64::consts::PI);

    sigma_t * n_gamma * flux * stimulated * (p_in - p_out)
}

/// Monte-Carlo estimate of d⟨ε_kin⟩/dt for a Maxwellian ensemble at
/// electron temperature `t_e`, with the standard error of the mean.
/// Sample index i uses stream i of a ChaCha8 generator seeded with `seed`.
pub fn maxwellian_energy_flow(
    params: &PhysicalParams,
    t_e: f64,
    seed: u64,
    samples: usize,
) -> (f64, f64) {
    let sampler = PlanckSampler::new();
    let sigma_q = (params.m * t_e).sqrt();
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let q = [
            sigma_q * gaussian(&mut rng),
            sigma_q * gaussian(&mut rng),
            sigma_q * gaussian(&mut rng),
        ];
        let w = energy_flow_sample(&mut rng, &sampler, q, params);
        sum += w;
        sum2 += w * w;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}
