//! Least-squares fits of the large-time exponent data against the model
//! a·t + b·ln t + c.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Basis selection for [`fit_asymptotic`]. The full basis is the default;
/// the restricted bases are used deep inside a regime where one term is
/// known to be absent and would otherwise soak up curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitBasis {
    /// a·t + b·ln t + c
    LinearLogConst,
    /// b·ln t + c
    LogConst,
    /// a·t + c
    LinearConst,
}

/// Fitted coefficients of a·t + b·ln t + c with the rms residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit {
    pub linear_coeff: f64,
    pub log_coeff: f64,
    pub constant: f64,
    pub residual_rms: f64,
}

fn solve(mut a: [[f64; 3]; 3], mut b: [f64; 3], n: usize) -> Result<[f64; 3]> {
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if math::abs(a[row][col]) > math::abs(a[piv][col]) {
                piv = row;
            }
        }
        if math::abs(a[piv][col]) < 1e-300 {
            return Err(Error::IllConditionedFit);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Ok(x)
}

/// Fit samples (t_i, y_i) with the chosen basis. Requires at least one more
/// sample than coefficients and a t-range spanning a factor ≥ 1.2; narrower
/// windows make the ln t and t columns collinear.
pub fn fit_asymptotic(ts: &[f64], ys: &[f64], basis: FitBasis) -> Result<AsymptoticFit> {
    let ncoef = match basis {
        FitBasis::LinearLogConst => 3,
        _ => 2,
    };
    if ts.len() != ys.len() || ts.len() <= ncoef {
        return Err(Error::IllConditionedFit);
    }
    let tmin = ts.iter().fold(f64::INFINITY, |m, &t| m.min(t));
    let tmax = ts.iter().fold(0.0f64, |m, &t| m.max(t));
    if !(tmin > 0.0) || tmax / tmin < 1.2 {
        return Err(Error::IllConditionedFit);
    }

    // column scaling keeps the normal equations well conditioned
    let t_scale = tmax;
    let columns = |t: f64| -> [f64; 3] {
        match basis {
            FitBasis::LinearLogConst => [t / t_scale, math::ln(t), 1.0],
            FitBasis::LogConst => [math::ln(t), 1.0, 0.0],
            FitBasis::LinearConst => [t / t_scale, 1.0, 0.0],
        }
    };

    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (&t, &y) in ts.iter().zip(ys) {
        let c = columns(t);
        for i in 0..ncoef {
            for j in 0..ncoef {
                ata[i][j] += c[i] * c[j];
            }
            atb[i] += c[i] * y;
        }
    }
    let x = solve(ata, atb, ncoef)?;

    let (linear_coeff, log_coeff, constant) = match basis {
        FitBasis::LinearLogConst => (x[0] / t_scale, x[1], x[2]),
        FitBasis::LogConst => (0.0, x[0], x[1]),
        FitBasis::LinearConst => (x[0] / t_scale, 0.0, x[1]),
    };

    let mut ss = 0.0;
    for (&t, &y) in ts.iter().zip(ys) {
        let model = linear_coeff * t + log_coeff * math::ln(t) + constant;
        ss += (y - model) * (y - model);
    }
    Ok(AsymptoticFit {
        linear_coeff,
        log_coeff,
        constant,
        residual_rms: math::sqrt(ss / ts.len() as f64),
    })
}

/// Log-spaced sample points in [t0, t1].
pub fn log_spaced(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && t0 > 0.0 && t1 > t0);
    let l0 = math::ln(t0);
    let l1 = math::ln(t1);
    (0..n)
        .map(|i| math::exp(l0 + (l1 - l0) * i as f64 / (n - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn recovers_exact_model() {
        let ts = log_spaced(10.0, 1000.0, 24);
        let ys: Vec<f64> = ts.iter().map(|&t| -3.0e-7 * t + 0.02 * math::ln(t) - 1.4).collect();
        let fit = fit_asymptotic(&ts, &ys, FitBasis::LinearLogConst).unwrap();
        assert!((fit.linear_coeff / -3.0e-7 - 1.0).abs() < 1e-9);
        assert!((fit.log_coeff / 0.02 - 1.0).abs() < 1e-9);
        assert!((fit.constant / -1.4 - 1.0).abs() < 1e-9);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn log_only_basis() {
        let ts = log_spaced(5.0, 500.0, 12);
        let ys: Vec<f64> = ts.iter().map(|&t| 0.7 * math::ln(t) + 0.1).collect();
        let fit = fit_asymptotic(&ts, &ys, FitBasis::LogConst).unwrap();
        assert!((fit.log_coeff - 0.7).abs() < 1e-12);
        assert_eq!(fit.linear_coeff, 0.0);
    }

    #[test]
    fn narrow_range_rejected() {
        let ts = [100.0, 100.5, 101.0, 101.5, 102.0];
        let ys = [1.0, 1.1, 1.2, 1.3, 1.4];
        assert_eq!(
            fit_asymptotic(&ts, &ys, FitBasis::LinearLogConst),
            Err(Error::IllConditionedFit)
        );
    }

    #[test]
    fn too_few_samples_rejected() {
        let ts = [1.0, 2.0, 3.0];
        let ys = [0.1, 0.2, 0.3];
        assert!(fit_asymptotic(&ts, &ys, FitBasis::LinearLogConst).is_err());
    }
}
