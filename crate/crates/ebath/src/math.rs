//! Thin wrappers over `libm` so the crate stays `no_std` and every build
//! evaluates transcendentals with the same bit-exact implementation.

pub use core::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sincos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    let mut acc = 1.0;
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// e^{i x} as (cos x, sin x).
#[inline]
pub fn cis(x: f64) -> crate::C64 {
    let (s, c) = sincos(x);
    crate::C64::new(c, s)
}

/// Stable √(m² + q²) − m, accurate for q ≪ m.
#[inline]
pub fn kinetic_energy(m: f64, q: f64) -> f64 {
    let q2 = q * q;
    q2 / (sqrt(m * m + q2) + m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_std() {
        assert_eq!(powi(3.0, 0), 1.0);
        assert!((powi(2.5, 7) - 2.5f64.powi(7)).abs() < 1e-9);
        assert!((powi(2.0, -3) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn kinetic_energy_stable() {
        // moderate q: direct subtraction still has enough bits to compare
        let m: f64 = 5.11e5;
        let q: f64 = 1.0e3;
        let exact = (m * m + q * q).sqrt() - m;
        let rel = (kinetic_energy(m, q) - exact).abs() / kinetic_energy(m, q);
        assert!(rel < 1e-10);
        // tiny q: direct subtraction loses all bits, the series does not
        let qsmall: f64 = 1.0e-2;
        let series = qsmall * qsmall / (2.0 * m);
        assert!((kinetic_energy(m, qsmall) / series - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cis_unit_modulus() {
        let z = cis(1.234);
        assert!((z.norm() - 1.0).abs() < 1e-15);
    }
}
