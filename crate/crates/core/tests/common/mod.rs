//! Reference implementations used only by tests. None of these share code
//! with the library: quadrature is double-exponential rather than
//! Gauss–Kronrod, and the series are summed directly.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

const MAX_LEVEL: u32 = 10;

fn refine<F: Fn(f64) -> f64>(term: F, t_max: f64, rel: f64) -> f64 {
    let mut h = 0.5;
    let mut sum = term(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > t_max {
            break;
        }
        sum += term(t) + term(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            sum += term(t) + term(-t);
            k += 2;
        }
        let next = sum * h;
        let converged = (next - estimate).abs() <= rel * next.abs();
        estimate = next;
        if converged {
            break;
        }
    }
    estimate
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// tanh-sinh rule on `[a, b]`; tolerates integrable endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64) -> f64 {
    let half = 0.5 * (b - a);
    let term = |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        // Distance from the nearer endpoint, in units of `half`.
        let gap = 2.0 / (1.0 + (2.0 * u.abs()).exp());
        if gap == 0.0 {
            return 0.0;
        }
        let x = if t < 0.0 {
            a + half * gap
        } else {
            b - half * gap
        };
        let w = half * FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        finite_or_zero(w * f(x))
    };
    refine(term, 4.0, rel)
}

/// exp-sinh rule on `[a, ∞)`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, rel: f64) -> f64 {
    let term = |t: f64| {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        if e == 0.0 || !e.is_finite() {
            return 0.0;
        }
        finite_or_zero(FRAC_PI_2 * t.cosh() * e * f(a + e))
    };
    refine(term, 4.5, rel)
}

/// `ln Γ(a)` by upward recurrence and the Stirling series with Bernoulli
/// corrections through `B₁₆`.
pub fn stirling_ln_gamma(a: f64) -> f64 {
    const B: [f64; 8] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    let mut shift = 0.0;
    let mut x = a;
    while x < 20.0 {
        shift += x.ln();
        x += 1.0;
    }
    let mut series = 0.0;
    for (i, b) in B.iter().enumerate() {
        let k = (i + 1) as f64;
        series += b / (2.0 * k * (2.0 * k - 1.0) * x.powf(2.0 * k - 1.0));
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Alternating Maclaurin series of `erf`, for `|x| ≤ 3`.
pub fn maclaurin_erf(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for n in 1..200 {
        let nf = n as f64;
        term *= -x2 / nf;
        let add = term / (2.0 * nf + 1.0);
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    2.0 / PI.sqrt() * sum
}

/// `erfc(x) = (2/√π) ∫_x^∞ e^{-t²} dt`.
pub fn quad_erfc(x: f64) -> f64 {
    2.0 / PI.sqrt() * exp_sinh(|t| (-t * t).exp(), x, 1e-15)
}

/// `γ(a, x) = ∫₀^x t^{a-1} e^{-t} dt`.
pub fn quad_lower_gamma(a: f64, x: f64) -> f64 {
    tanh_sinh(|t| t.powf(a - 1.0) * (-t).exp(), 0.0, x, 1e-15)
}

/// `K₀(x) = ∫₀^∞ e^{-x cosh t} dt`.
pub fn quad_k0(x: f64) -> f64 {
    exp_sinh(|t| (-x * t.cosh()).exp(), 0.0, 1e-15)
}

/// `Ψ(a, b; z) = (1/Γ(a)) ∫₀^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt`.
pub fn quad_tricomi(a: f64, b: f64, z: f64) -> f64 {
    let f = |t: f64| (-z * t + (a - 1.0) * t.ln() + (b - a - 1.0) * t.ln_1p()).exp();
    exp_sinh(f, 0.0, 1e-15) / stirling_ln_gamma(a).exp()
}

/// Evenly spaced grid of `n` points on `[lo, hi]`.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Geometric grid of `n` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    grid(a, b, n).into_iter().map(f64::exp).collect()
}

pub fn rel_err(v: f64, reference: f64) -> f64 {
    ((v - reference) / reference).abs()
}

pub mod specfun_grids;
