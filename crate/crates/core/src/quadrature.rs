//! Globally adaptive Gauss–Kronrod (7/15) integration.
//!
//! The integrator keeps every subinterval in a max-heap keyed on its error
//! estimate and bisects the worst one until the summed error meets the
//! tolerance or the evaluation budget runs out. Semi-infinite ranges are
//! folded onto `[0, 1)` with `t = a + c·u/(1-u)`, so the integrand is never
//! evaluated at infinity.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the 7-point rule sharing XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const EVALS_PER_RULE: usize = 15;

/// Stopping rule: `error <= max(abs, rel * |value|)`, with at most
/// `max_evals` integrand evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evals: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64, max_evals: usize) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            max_evals,
        }
    }

    pub fn relative(rel: f64, max_evals: usize) -> Self {
        Tolerance {
            abs: 0.0,
            rel,
            max_evals,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// A piece of the integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Finite(f64, f64),
    /// `[start, ∞)`, mapped with a characteristic length `scale`.
    Tail {
        start: f64,
        scale: f64,
    },
}

impl Segment {
    fn param_range(&self) -> (f64, f64) {
        match *self {
            Segment::Finite(a, b) => (a, b),
            Segment::Tail { .. } => (0.0, 1.0),
        }
    }

    #[inline]
    fn eval<F: Fn(f64) -> f64>(&self, f: &F, u: f64) -> f64 {
        match *self {
            Segment::Finite(..) => f(u),
            Segment::Tail { start, scale } => {
                let w = 1.0 - u;
                let t = start + scale * u / w;
                let v = f(t);
                if v == 0.0 {
                    0.0
                } else {
                    v * scale / (w * w)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    seg: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Gauss–Kronrod 7/15 panel on `[lo, hi]`. Returns (value, error, |f| integral).
fn gk15<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64) -> (f64, f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let abs_half = half.abs();

    let fc = g(center);
    let mut res_k = WGK[7] * fc;
    let mut res_g = WG[3] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, error, res_abs)
}

/// Integrates `f` over the union of `segments`.
///
/// Non-finite integrand values abort with a domain error rather than
/// propagating into the sum.
pub fn integrate_segments<F: Fn(f64) -> f64>(
    f: F,
    segments: &[Segment],
    tol: &Tolerance,
) -> Result<QuadResult> {
    if segments.is_empty() {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut heap = BinaryHeap::with_capacity(64);
    let mut evals = 0usize;
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;

    for (seg, s) in segments.iter().enumerate() {
        let (lo, hi) = s.param_range();
        if lo == hi {
            continue;
        }
        let g = |u: f64| s.eval(&f, u);
        let (value, error, res_abs) = gk15(&g, lo, hi);
        evals += EVALS_PER_RULE;
        total += value;
        total_err += error;
        total_abs += res_abs;
        heap.push(Piece {
            seg,
            lo,
            hi,
            value,
            error,
        });
    }

    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::domain(
                "quadrature",
                "integrand produced a non-finite value",
            ));
        }
        let floor = 50.0 * f64::EPSILON * total_abs;
        let target = tol.abs.max(tol.rel * total.abs()).max(floor);
        if total_err <= target {
            return Ok(QuadResult {
                value: total,
                error: total_err,
                evaluations: evals,
            });
        }
        if evals + 2 * EVALS_PER_RULE > tol.max_evals {
            return Err(Error::convergence(
                "quadrature",
                format!(
                    "error estimate {total_err:.3e} above target {target:.3e} after {evals} evaluations"
                ),
            ));
        }
        let Some(worst) = heap.pop() else {
            unreachable!("heap holds every piece of a non-empty domain")
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::convergence(
                "quadrature",
                format!(
                    "interval [{}, {}] cannot be bisected further",
                    worst.lo, worst.hi
                ),
            ));
        }
        let s = &segments[worst.seg];
        let g = |u: f64| s.eval(&f, u);
        let (v1, e1, a1) = gk15(&g, worst.lo, mid);
        let (v2, e2, a2) = gk15(&g, mid, worst.hi);
        evals += 2 * EVALS_PER_RULE;

        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        // Keep the running error from drifting negative through cancellation.
        if total_err < 0.0 {
            total_err = heap.iter().map(|p| p.error).sum::<f64>() + e1 + e2;
        }
        total_abs += a1 + a2;
        heap.push(Piece {
            seg: worst.seg,
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            seg: worst.seg,
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<QuadResult> {
    integrate_segments(f, &[Segment::Finite(a, b)], tol)
}

/// Integrates `f` over `[a, ∞)`; `scale` should be comparable to the width
/// of the region carrying most of the mass.
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    tol: &Tolerance,
) -> Result<QuadResult> {
    integrate_segments(f, &[Segment::Tail { start: a, scale }], tol)
}

/// Integrates `f` over the breakpoints `points[0] < ... < points[n]`
/// followed by a tail from `points[n]` to infinity.
pub fn integrate_with_tail<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tail_scale: f64,
    tol: &Tolerance,
) -> Result<QuadResult> {
    let mut segments: Vec<Segment> = points
        .windows(2)
        .map(|w| Segment::Finite(w[0], w[1]))
        .collect();
    if let Some(&last) = points.last() {
        segments.push(Segment::Tail {
            start: last,
            scale: tail_scale,
        });
    }
    integrate_segments(f, &segments, tol)
}
