//! Adaptive Gauss–Kronrod quadrature over vector-valued integrands and a
//! Gauss–Legendre rule cache.
//!
//! The G7/K15 pair gives an embedded error estimate per panel; refinement
//! bisects the panel with the largest estimate. Panel selection and the
//! final summation order are fully deterministic (ties broken by insertion
//! index, summation sorted by panel position), so results do not depend on
//! call history or thread count of the caller.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;

use crate::math;
use crate::C64;

/// 15-point Kronrod nodes (positive half, QUADPACK values).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// 15-point Kronrod weights.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// 7-point Gauss weights (for XGK indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<const N: usize> {
    pub value: [C64; N],
    /// Accumulated absolute error estimate (max over components).
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [C64; N],
    error: f64,
    id: u64,
}

struct PanelKey {
    error: f64,
    id: u64,
    slot: usize,
}

impl PartialEq for PanelKey {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq() && self.id == other.id
    }
}
impl Eq for PanelKey {}
impl PartialOrd for PanelKey {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PanelKey {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // max-heap on error; ties resolved by older panel first
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn zero<const N: usize>() -> [C64; N] {
    [C64::new(0.0, 0.0); N]
}

fn gk15<const N: usize, F: FnMut(f64) -> [C64; N]>(f: &mut F, a: f64, b: f64) -> ([C64; N], f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = zero::<N>();
    let mut gauss = zero::<N>();
    for i in 0..N {
        kronrod[i] = fc[i] * WGK[7];
        gauss[i] = fc[i] * WG[3];
    }
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        for i in 0..N {
            let sum = f1[i] + f2[i];
            kronrod[i] += sum * WGK[j];
            if j % 2 == 1 {
                gauss[i] += sum * WG[j / 2];
            }
        }
    }
    let mut err: f64 = 0.0;
    for i in 0..N {
        kronrod[i] *= half;
        gauss[i] *= half;
        err = err.max((kronrod[i] - gauss[i]).norm());
    }
    (kronrod, err)
}

/// Integrate `f` over `[a, b]`, seeding the partition with the sorted
/// interior `breakpoints`, then bisecting the worst panel until the summed
/// error estimate drops below `abs_tol` or `max_panels` is reached.
///
/// Returns the panel sum ordered by position, so the floating-point result
/// is a pure function of (f, a, b, breakpoints, abs_tol, max_panels).
pub fn adaptive_gk15<const N: usize, F: FnMut(f64) -> [C64; N]>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    max_panels: usize,
) -> QuadResult<N> {
    adaptive_gk15_rel(f, a, b, breakpoints, abs_tol, 0.0, max_panels)
}

/// As [`adaptive_gk15`], stopping once the error estimate is below
/// max(`abs_tol`, `rel_tol` · max-component norm of the running value).
pub fn adaptive_gk15_rel<const N: usize, F: FnMut(f64) -> [C64; N]>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult<N> {
    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    for &x in breakpoints {
        if x > a && x < b {
            edges.push(x);
        }
    }
    edges.push(b);
    edges.sort_by(|p, q| p.total_cmp(q));
    edges.dedup();

    let mut panels: Vec<Panel<N>> = Vec::with_capacity(edges.len() + 64);
    let mut heap: BinaryHeap<PanelKey> = BinaryHeap::new();
    let mut evals = 0usize;
    let mut next_id = 0u64;
    let mut running = zero::<N>();

    for w in edges.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1]);
        evals += 15;
        let slot = panels.len();
        for i in 0..N {
            running[i] += value[i];
        }
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
            id: next_id,
        });
        heap.push(PanelKey {
            error,
            id: next_id,
            slot,
        });
        next_id += 1;
    }

    let norm_of = |v: &[C64; N]| -> f64 {
        let mut m: f64 = 0.0;
        for x in v.iter() {
            m = m.max(x.norm());
        }
        m
    };

    let mut total_err: f64 = panels.iter().map(|p| p.error).sum();
    while total_err > abs_tol.max(rel_tol * norm_of(&running)) && panels.len() < max_panels {
        let key = match heap.pop() {
            Some(k) => k,
            None => break,
        };
        let p = panels[key.slot];
        if p.error != key.error || p.id != key.id {
            continue; // stale heap entry
        }
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            continue; // cannot split further at f64 resolution
        }
        let (v1, e1) = gk15(&mut f, p.a, mid);
        let (v2, e2) = gk15(&mut f, mid, p.b);
        evals += 30;
        total_err += e1 + e2 - p.error;
        for i in 0..N {
            running[i] += v1[i] + v2[i] - p.value[i];
        }
        panels[key.slot] = Panel {
            a: p.a,
            b: mid,
            value: v1,
            error: e1,
            id: next_id,
        };
        heap.push(PanelKey {
            error: e1,
            id: next_id,
            slot: key.slot,
        });
        next_id += 1;
        let slot2 = panels.len();
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: v2,
            error: e2,
            id: next_id,
        });
        heap.push(PanelKey {
            error: e2,
            id: next_id,
            slot: slot2,
        });
        next_id += 1;
    }

    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = zero::<N>();
    let mut abs_error = 0.0;
    for p in &panels {
        for i in 0..N {
            value[i] += p.value[i];
        }
        abs_error += p.error;
    }
    QuadResult {
        value,
        abs_error,
        evaluations: evals,
    }
}

/// Scalar real convenience wrapper around [`adaptive_gk15`].
pub fn adaptive_gk15_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    max_panels: usize,
) -> (f64, f64) {
    let r = adaptive_gk15(
        |x| [C64::new(f(x), 0.0)],
        a,
        b,
        breakpoints,
        abs_tol,
        max_panels,
    );
    (r.value[0].re, r.abs_error)
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut out = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if math::abs(dx) < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((-x, w));
    }
    // mirror to the full rule, ascending nodes
    for i in (0..n - m).rev() {
        let (x, w) = out[i];
        out.push((-x, w));
    }
    out
}

/// Cache of Gauss–Legendre rules keyed by size.
#[derive(Default)]
pub struct GlCache {
    rules: alloc::collections::BTreeMap<usize, alloc::rc::Rc<Vec<(f64, f64)>>>,
}

impl GlCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rule(&mut self, n: usize) -> alloc::rc::Rc<Vec<(f64, f64)>> {
        self.rules
            .entry(n)
            .or_insert_with(|| alloc::rc::Rc::new(gauss_legendre(n)))
            .clone()
    }
}

/// Quantized rule sizes used for phase-adapted angular integrals; keeps the
/// cache small while oversampling slightly.
pub fn quantized_size(min_points: usize) -> usize {
    const SIZES: [usize; 12] = [16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512, 768];
    for &s in &SIZES {
        if s >= min_points {
            return s;
        }
    }
    768
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let (v, e) = adaptive_gk15_real(|x| x * x, 0.0, 1.0, &[], 1e-12, 100);
        assert!((v - 1.0 / 3.0).abs() < 1e-14, "err est {e}");
    }

    #[test]
    fn sine_integral() {
        let (v, _) = adaptive_gk15_real(math::sin, 0.0, math::PI, &[], 1e-12, 100);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_with_breakpoints() {
        // int_0^{2pi} cos(40 x) dx = 0; seed panels about one per period
        let n = 80;
        let bp: Vec<f64> = (1..n)
            .map(|i| 2.0 * math::PI * i as f64 / n as f64)
            .collect();
        let (v, _) = adaptive_gk15_real(
            |x| math::cos(40.0 * x),
            0.0,
            2.0 * math::PI,
            &bp,
            1e-10,
            4000,
        );
        assert!(v.abs() < 1e-10, "value {v}");
    }

    #[test]
    fn complex_phase_integral() {
        // int_0^1 e^{i b x} dx = (e^{ib} - 1)/(ib)
        let b = 17.0;
        let r = adaptive_gk15(|x| [math::cis(b * x)], 0.0, 1.0, &[0.25, 0.5, 0.75], 1e-12, 1000);
        let exact = (math::cis(b) - C64::new(1.0, 0.0)) / C64::new(0.0, b);
        assert!((r.value[0] - exact).norm() < 1e-12);
    }

    #[test]
    fn refinement_handles_peak() {
        // narrow Gaussian integrates to sqrt(pi)*s
        let s = 1e-3;
        let (v, _) = adaptive_gk15_real(
            |x| math::exp(-(x / s) * (x / s)),
            -1.0,
            1.0,
            &[],
            1e-14,
            4000,
        );
        let exact = math::sqrt(math::PI) * s;
        assert!((v / exact - 1.0).abs() < 1e-10, "v {v} exact {exact}");
    }

    #[test]
    fn gauss_legendre_degree() {
        // n-point rule is exact for degree 2n-1
        let rule = gauss_legendre(5);
        let num: f64 = rule.iter().map(|&(x, w)| w * x.powi(8)).sum();
        assert!((num - 2.0 / 9.0).abs() < 1e-14);
        let sumw: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((sumw - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_oscillation() {
        // int_{-1}^{1} e^{i b x} dx = 2 sin(b)/b, resolved once n ~ b
        let b = 40.0;
        let rule = gauss_legendre(64);
        let mut acc = C64::new(0.0, 0.0);
        for &(x, w) in rule.iter() {
            acc += math::cis(b * x) * w;
        }
        let exact = 2.0 * math::sin(b) / b;
        assert!((acc - C64::new(exact, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn deterministic_repeat() {
        let run = || {
            adaptive_gk15(
                |x| [math::cis(200.0 * x) / C64::new(1.0 + x * x, 0.0)],
                0.0,
                3.0,
                &[1.0, 2.0],
                1e-12,
                10_000,
            )
        };
        let a = run();
        let b = run();
        assert_eq!(a.value[0], b.value[0]);
        assert_eq!(a.evaluations, b.evaluations);
    }
}
