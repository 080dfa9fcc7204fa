//! Tricomi's confluent hypergeometric function `Ψ(a, b; z)` and the
//! Whittaker functions `W_{-k,0}` derived from it.
//!
//! `Ψ` is evaluated from
//! `Γ(a)·Ψ(a,b;z) = ∫₀^∞ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt`.
//! For `a ≥ 1/2` the substitution `t = s²` makes the integrand smooth at the
//! origin; for `0 < a < 1/2` the substitution `t = s^{1/a}` removes the
//! endpoint singularity entirely. The integrand is normalised by its value
//! at the interior peak so that large `k` or large `z` never underflow.

use std::f64::consts::LN_2;

use super::gamma::ln_gamma_unchecked;
use super::Accuracy;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_segments, Segment, Tolerance};

/// A real number stored as sign and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_abs: f64,
    pub sign: f64,
}

impl LogValue {
    pub fn positive(ln_abs: f64) -> Self {
        LogValue { ln_abs, sign: 1.0 }
    }

    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// `ln Ψ(a, b; z)` for `a > 0`, `z > 0`.
///
/// The quadrature runs to a relative accuracy of `acc.abs_tol`, tightened to
/// `acc.abs_tol / Ψ` when `Ψ > 1` so the absolute error stays below
/// `acc.abs_tol` as well.
pub fn ln_tricomi_psi(a: f64, b: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(
            "tricomi_psi",
            format!("parameter a must be positive, got {a}"),
        ));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(
            "tricomi_psi",
            format!("argument z must be positive and finite, got {z}"),
        ));
    }
    if !b.is_finite() {
        return Err(Error::domain("tricomi_psi", "parameter b must be finite"));
    }
    acc.validate()?;

    let ln_psi = ln_psi_at_tolerance(a, b, z, acc.abs_tol, acc.max_quad_nodes)?;
    if ln_psi > 0.0 {
        let tighter = acc.abs_tol * (-ln_psi).exp();
        return ln_psi_at_tolerance(a, b, z, tighter, acc.max_quad_nodes);
    }
    Ok(ln_psi)
}

/// `Ψ(a, b; z)`.
pub fn tricomi_psi(a: f64, b: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    ln_tricomi_psi(a, b, z, acc).map(f64::exp)
}

fn ln_psi_at_tolerance(a: f64, b: f64, z: f64, rel: f64, max_evals: usize) -> Result<f64> {
    let tol = Tolerance::relative(rel, max_evals);
    let ln_integral = if a >= 0.5 {
        // Γ(a)Ψ = 2 ∫₀^∞ s^{2a-1} (1+s²)^{b-a-1} e^{-z s²} ds
        let p = 2.0 * a - 1.0;
        let q = b - a - 1.0;
        let log_f = move |s: f64| {
            let lead = if p == 0.0 { 0.0 } else { p * s.ln() };
            lead + q * (s * s).ln_1p() - z * s * s
        };
        // Peak of the t-integrand: z t² + (z + 3/2 - b) t - (a - 1/2) = 0.
        let lin = z + 1.5 - b;
        let c0 = a - 0.5;
        let disc = (lin * lin + 4.0 * z * c0).sqrt();
        let t_peak = if lin > 0.0 {
            2.0 * c0 / (lin + disc)
        } else {
            (disc - lin) / (2.0 * z)
        };
        let s_peak = t_peak.max(0.0).sqrt();
        let reference = if s_peak > 0.0 { log_f(s_peak) } else { 0.0 };
        let scale = t_peak.max(1.0 / z).sqrt();
        let integrand = |s: f64| {
            if s == 0.0 {
                return if p == 0.0 { (-reference).exp() } else { 0.0 };
            }
            (log_f(s) - reference).exp()
        };
        let segments = if s_peak > 0.0 {
            vec![
                Segment::Finite(0.0, s_peak),
                Segment::Tail {
                    start: s_peak,
                    scale,
                },
            ]
        } else {
            vec![Segment::Tail { start: 0.0, scale }]
        };
        let r = integrate_segments(integrand, &segments, &tol).map_err(|e| relabel(e, a, b, z))?;
        LN_2 + reference + r.value.ln()
    } else {
        // Γ(a)Ψ = (1/a) ∫₀^∞ (1+s^{1/a})^{b-a-1} e^{-z s^{1/a}} ds
        let inv_a = 1.0 / a;
        let q = b - a - 1.0;
        let integrand = move |s: f64| {
            let t = s.powf(inv_a);
            (q * t.ln_1p() - z * t).exp()
        };
        let scale = z.powf(-a);
        let r = integrate_segments(integrand, &[Segment::Tail { start: 0.0, scale }], &tol)
            .map_err(|e| relabel(e, a, b, z))?;
        r.value.ln() - a.ln()
    };
    Ok(ln_integral - ln_gamma_unchecked(a))
}

fn relabel(e: Error, a: f64, b: f64, z: f64) -> Error {
    match e {
        Error::Convergence { detail, .. } => {
            Error::convergence("tricomi_psi", format!("Ψ({a}, {b}; {z}): {detail}"))
        }
        other => other,
    }
}

/// `W_{-k,0}(ν) = e^{-ν/2} √ν Ψ(k + 1/2, 1; ν)`, returned in log form.
pub fn whittaker_w_neg_k_0(k: u32, nu: f64, acc: &Accuracy) -> Result<LogValue> {
    let scaled = ln_scaled_whittaker_w_neg_k_0(k, nu, acc)?;
    Ok(LogValue::positive(scaled - 0.5 * nu))
}

/// `ln(e^{ν/2} W_{-k,0}(ν)) = ½ ln ν + ln Ψ(k + 1/2, 1; ν)`.
///
/// The outage and density series only ever need this product, and forming
/// it directly avoids cancelling two `O(ν)` logarithms.
pub fn ln_scaled_whittaker_w_neg_k_0(k: u32, nu: f64, acc: &Accuracy) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(
            "whittaker_w_neg_k_0",
            format!("argument must be positive and finite, got {nu}"),
        ));
    }
    Ok(0.5 * nu.ln() + ln_tricomi_psi(k as f64 + 0.5, 1.0, nu, acc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_tail, integrate_with_tail, Tolerance};
    use crate::specfun::bessel_k0;

    fn tight() -> Tolerance {
        Tolerance {
            abs: 0.0,
            rel: 1e-14,
            max_evals: 50_000,
        }
    }

    // Direct quadrature of the defining integral in t, no substitution.
    fn defining_integral(a: f64, b: f64, z: f64) -> f64 {
        let f = |t: f64| (-z * t).exp() * t.powf(a - 1.0) * (1.0 + t).powf(b - a - 1.0);
        let r = integrate_with_tail(f, &[0.0, 1.0], 1.0 / z, &tight()).unwrap();
        r.value / ln_gamma_unchecked(a).exp()
    }

    #[test]
    fn unit_parameters_match_exponential_integral() {
        // Ψ(1,1;z) = e^z E₁(z), E₁(z) = ∫_1^∞ e^{-zt}/t dt
        let e1 = integrate_tail(|t: f64| (-t).exp() / t, 1.0, 1.0, &tight())
            .unwrap()
            .value;
        let v = tricomi_psi(1.0, 1.0, 1.0, &Accuracy::default()).unwrap();
        assert!((v - std::f64::consts::E * e1).abs() < 1e-10);
        assert!((v - 0.596_347_362_323_194_1).abs() < 1e-12);
    }

    #[test]
    fn half_zero_two_matches_defining_integral() {
        let v = tricomi_psi(0.5, 0.0, 2.0, &Accuracy::default()).unwrap();
        assert!((v - defining_integral(0.5, 0.0, 2.0)).abs() < 1e-10);
    }

    #[test]
    fn half_one_reduces_to_k0() {
        // Ψ(1/2, 1; z) = e^{z/2} K₀(z/2) / √π
        for &z in &[0.05, 0.34, 1.0, 3.0, 12.0] {
            let v = tricomi_psi(0.5, 1.0, z, &Accuracy::default()).unwrap();
            let k = (0.5 * z).exp() * bessel_k0(0.5 * z).unwrap() / std::f64::consts::PI.sqrt();
            assert!(((v - k) / k).abs() < 1e-11, "z={z}");
        }
    }

    #[test]
    fn small_shape_branch() {
        for &(a, b, z) in &[(0.25, 0.0, 1.0), (0.1, 1.0, 0.5), (0.4, -1.0, 3.0)] {
            let v = tricomi_psi(a, b, z, &Accuracy::default()).unwrap();
            let o = defining_integral(a, b, z);
            assert!(((v - o) / o).abs() < 1e-9, "a={a} b={b} z={z}: {v} vs {o}");
        }
    }

    #[test]
    fn decreasing_and_positive_in_z() {
        let acc = Accuracy::default();
        for &a in &[0.5, 1.5, 5.5] {
            let mut prev = f64::INFINITY;
            for i in 0..20 {
                let z = 10f64.powf(-2.0 + 4.0 * i as f64 / 19.0);
                let v = tricomi_psi(a, 0.0, z, &acc).unwrap();
                assert!(v > 0.0 && v < prev, "a={a} z={z}");
                prev = v;
            }
        }
    }

    #[test]
    fn whittaker_k0_nu1() {
        let acc = Accuracy::default();
        let w = whittaker_w_neg_k_0(0, 1.0, &acc).unwrap().value();
        let expect = (-0.5f64).exp() * defining_integral(0.5, 1.0, 1.0);
        assert!((w - expect).abs() < 1e-10);
    }

    #[test]
    fn whittaker_positive_and_finite_for_large_k() {
        let acc = Accuracy::default();
        for &nu in &[0.1, 1.0, 10.0] {
            for k in 0..=60 {
                let w = whittaker_w_neg_k_0(k, nu, &acc).unwrap();
                assert_eq!(w.sign, 1.0);
                assert!(w.ln_abs.is_finite(), "k={k} nu={nu}");
            }
        }
        // Large ν and k would underflow a direct evaluation.
        let w = whittaker_w_neg_k_0(150, 7.0e4, &acc).unwrap();
        assert!(w.ln_abs.is_finite() && w.ln_abs < -700.0);
    }

    #[test]
    fn domain_errors() {
        let acc = Accuracy::default();
        assert!(tricomi_psi(0.0, 1.0, 1.0, &acc).is_err());
        assert!(tricomi_psi(1.0, 1.0, 0.0, &acc).is_err());
        assert!(whittaker_w_neg_k_0(0, -1.0, &acc).is_err());
    }

    #[test]
    fn budget_exhaustion_surfaces_as_convergence_error() {
        let acc = Accuracy::new(1e-15, 200, 16).unwrap();
        let err = tricomi_psi(5.5, 0.0, 0.01, &acc).unwrap_err();
        assert!(err.is_convergence(), "{err:?}");
    }
}
