//! Minkowski four-vectors with signature (+, −, −, −) and small 3-vector
//! helpers.

use crate::math;

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm3(a: Vec3) -> f64 {
    math::sqrt(dot3(a, a))
}

#[inline]
pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale3(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Contravariant four-vector x^mu = (x0, x1, x2, x3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub t: f64,
    pub x: Vec3,
}

impl FourVector {
    pub const fn new(t: f64, x: Vec3) -> Self {
        Self { t, x }
    }

    /// On-shell electron vector (sqrt(m^2 + q^2), q).
    pub fn on_shell(m: f64, q: Vec3) -> Self {
        Self::new(math::sqrt(m * m + dot3(q, q)), q)
    }

    /// Light-like photon vector (sign*|k|, k).
    pub fn light_like(k: Vec3, sign: f64) -> Self {
        Self::new(sign * norm3(k), k)
    }

    /// Minkowski product a·b = a0 b0 − a·b.
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - dot3(self.x, other.x)
    }

    /// a·a.
    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    /// Component with an upper index, mu in 0..4.
    pub fn upper(&self, mu: usize) -> f64 {
        match mu {
            0 => self.t,
            i => self.x[i - 1],
        }
    }

    /// Component with a lower index (spatial sign flipped).
    pub fn lower(&self, mu: usize) -> f64 {
        match mu {
            0 => self.t,
            i => -self.x[i - 1],
        }
    }

    pub fn add(&self, other: &FourVector) -> FourVector {
        FourVector::new(self.t + other.t, add3(self.x, other.x))
    }

    pub fn sub(&self, other: &FourVector) -> FourVector {
        FourVector::new(self.t - other.t, sub3(self.x, other.x))
    }

    pub fn scale(&self, s: f64) -> FourVector {
        FourVector::new(self.t * s, scale3(self.x, s))
    }
}

/// Metric tensor entry eta_{mu nu}.
#[inline]
pub fn metric(mu: usize, nu: usize) -> f64 {
    if mu != nu {
        0.0
    } else if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature() {
        let a = FourVector::new(2.0, [1.0, 0.0, 0.0]);
        assert_eq!(a.norm2(), 3.0);
        let k = FourVector::light_like([0.3, -0.4, 1.2], 1.0);
        assert!(k.norm2().abs() < 1e-12);
    }

    #[test]
    fn on_shell_mass() {
        let q = FourVector::on_shell(2.5, [0.1, 0.2, -0.3]);
        assert!((q.norm2() - 6.25).abs() < 1e-12);
    }

    #[test]
    fn index_positions() {
        let a = FourVector::new(1.0, [2.0, 3.0, 4.0]);
        let mut dot = 0.0;
        for mu in 0..4 {
            dot += a.upper(mu) * a.lower(mu);
        }
        assert_eq!(dot, a.norm2());
    }
}
