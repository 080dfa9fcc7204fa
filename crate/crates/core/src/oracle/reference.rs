//! Quadrature references.
//!
//! These integrate densities directly and never touch the outage series,
//! so agreement with [`crate::outage`] is a genuine cross-check.

use std::cell::RefCell;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::model::{product_pdf, ChannelDensity, EffectiveVariances, OutageQuery, TagState};
use crate::quadrature::{integrate, integrate_segments, QuadResult, Segment, Tolerance};
use crate::specfun::{erfc, Accuracy};

use super::monte_carlo::BinSpec;

/// Adapts a fallible integrand: the first error is stashed and the
/// quadrature is aborted with a NaN, then the stashed error is returned.
struct Fallible {
    first: RefCell<Option<Error>>,
}

impl Fallible {
    fn new() -> Self {
        Fallible {
            first: RefCell::new(None),
        }
    }

    fn eval(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.first.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    fn finish<T>(self, r: Result<T>) -> Result<T> {
        match self.first.into_inner() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

/// `P_o` by integrating the SNR density over `(0, ρ_t]`. With `x = u²` the
/// integral becomes `∫₀^{√ρ_t} 2 f_h(u/√ρ̄)/√ρ̄ du`, free of the `x^{-1/2}`
/// endpoint singularity.
pub fn quad_outage(
    query: &OutageQuery,
    state: TagState,
    eff: &EffectiveVariances,
    acc: &Accuracy,
) -> Result<f64> {
    quad_outage_with_error(query, state, eff, acc).map(|r| r.value)
}

/// [`quad_outage`] together with the integrator's error estimate.
pub fn quad_outage_with_error(
    query: &OutageQuery,
    state: TagState,
    eff: &EffectiveVariances,
    acc: &Accuracy,
) -> Result<QuadResult> {
    query.validate()?;
    let density = ChannelDensity::new(state, eff, acc)?;
    quad_outage_between(&density, 0.0, query.rho_t(), query.rho_bar(), acc)
}

/// `Pr[a < ρ ≤ b]` for `0 ≤ a < b`.
pub fn quad_outage_between(
    density: &ChannelDensity,
    a: f64,
    b: f64,
    rho_bar: f64,
    acc: &Accuracy,
) -> Result<QuadResult> {
    if !(a >= 0.0 && b > a) {
        return Err(Error::domain(
            "quad_outage",
            format!("need 0 <= a < b, got [{a}, {b}]"),
        ));
    }
    let scale = rho_bar.sqrt();
    let guard = Fallible::new();
    let f = |u: f64| 2.0 * guard.eval(density.pdf(u / scale)) / scale;
    let tol = Tolerance::absolute(acc.abs_tol, acc.max_quad_nodes);
    let r = integrate(f, a.sqrt(), b.sqrt(), &tol);
    guard.finish(r)
}

fn gaussian(y: f64, var: f64) -> f64 {
    (-0.5 * y * y / var).exp() / (2.0 * PI * var).sqrt()
}

/// `Pr[a < N(0,1) < b]` without cancellation in either tail.
fn normal_mass(a: f64, b: f64) -> Result<f64> {
    if a >= 0.0 {
        Ok(0.5 * (erfc(a * FRAC_1_SQRT_2) - erfc(b * FRAC_1_SQRT_2)))
    } else if b <= 0.0 {
        normal_mass(-b, -a)
    } else {
        Ok(1.0 - 0.5 * (erfc(-a * FRAC_1_SQRT_2) + erfc(b * FRAC_1_SQRT_2)))
    }
}

/// Splits `∫₀^∞ g(z) dz` at the given `z` breakpoints, substitutes `z = s²`
/// (which turns the `K₀` log singularity at 0 into a zero) and integrates.
fn folded_integral<G>(g: G, z_breaks: &[f64], tail_scale_z: f64, acc: &Accuracy) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let mut s_breaks: Vec<f64> = z_breaks
        .iter()
        .filter(|&&z| z > 0.0)
        .map(|z| z.sqrt())
        .collect();
    s_breaks.sort_by(f64::total_cmp);
    s_breaks.dedup();
    let mut segments = Vec::new();
    let mut prev = 0.0;
    for &s in &s_breaks {
        segments.push(Segment::Finite(prev, s));
        prev = s;
    }
    segments.push(Segment::Tail {
        start: prev,
        scale: tail_scale_z.sqrt().max(0.5 * prev),
    });
    let guard = Fallible::new();
    let f = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        2.0 * s * guard.eval(g(s * s))
    };
    let tol = Tolerance::absolute(acc.abs_tol, acc.max_quad_nodes);
    let r = integrate_segments(f, &segments, &tol);
    guard.finish(r).map(|r| r.value)
}

/// Reflecting-state channel density as the convolution of the direct-path
/// Gaussian with the product-normal density `K₀(|z|/φ)/(πφ)`.
pub fn quad_convolution_pdf(x: f64, eff: &EffectiveVariances, acc: &Accuracy) -> Result<f64> {
    eff.require_backscatter("quad_convolution_pdf")?;
    if !x.is_finite() {
        return Err(Error::domain("quad_convolution_pdf", "x must be finite"));
    }
    let var = eff.var_sr;
    let sigma = var.sqrt();
    let ax = x.abs();
    // ξ is even, so fold z and -z together.
    let g = |z: f64| Ok(product_pdf(z, eff)? * (gaussian(x - z, var) + gaussian(x + z, var)));
    let breaks = [ax - 6.0 * sigma, ax, ax + 6.0 * sigma, eff.phi];
    folded_integral(g, &breaks, eff.phi.max(sigma), acc)
}

/// Reflecting-state outage as `E_ξ[Pr(|h_sr + ξ| ≤ H)]`, `H = √(ρ_t/ρ̄)`.
/// Needs only `K₀` and `erfc`, so it stays usable where the series in
/// either the density or the outage converge slowly.
pub fn convolution_outage(
    query: &OutageQuery,
    eff: &EffectiveVariances,
    acc: &Accuracy,
) -> Result<f64> {
    query.validate()?;
    eff.require_backscatter("convolution_outage")?;
    let sigma = eff.var_sr.sqrt();
    let h = (query.rho_t() / query.rho_bar()).sqrt();
    let window = |z: f64| -> Result<f64> {
        Ok(normal_mass((-h - z) / sigma, (h - z) / sigma)?
            + normal_mass((-h + z) / sigma, (h + z) / sigma)?)
    };
    let g = |z: f64| Ok(product_pdf(z, eff)? * window(z)?);
    let breaks = [h - 6.0 * sigma, h, h + 6.0 * sigma, eff.phi];
    let p = folded_integral(g, &breaks, eff.phi.max(sigma), acc)?;
    Ok(p.clamp(0.0, 1.0))
}

/// Probability mass of the channel density in each histogram bin.
pub fn bin_probabilities(
    density: &ChannelDensity,
    bins: &BinSpec,
    acc: &Accuracy,
) -> Result<Vec<f64>> {
    bins.validate()?;
    let tol = Tolerance::absolute(acc.abs_tol, acc.max_quad_nodes);
    (0..bins.n_bins)
        .map(|i| {
            let (a, b) = bins.edges(i);
            let guard = Fallible::new();
            let r = integrate(|x| guard.eval(density.pdf(x)), a, b, &tol);
            guard.finish(r).map(|r| r.value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::erf;

    fn eff() -> EffectiveVariances {
        EffectiveVariances::from_variances(0.7, 1.0, 1.0, 3.0).unwrap()
    }

    #[test]
    fn non_reflecting_matches_erf() {
        let acc = Accuracy::default();
        for &(t, s) in &[(2.0, 10.0), (-3.0, 3.0), (15.0, 0.0)] {
            let q = OutageQuery::new(t, s, 1e-12).unwrap();
            let v = quad_outage(&q, TagState::NonReflecting, &eff(), &acc).unwrap();
            let closed = erf((q.rho_t() / (2.0 * q.rho_bar())).sqrt());
            assert!((v - closed).abs() < 1e-10);
        }
    }

    #[test]
    fn normal_mass_tails() {
        assert!((normal_mass(-1.0, 1.0).unwrap() - 0.682_689_492_137_085_9).abs() < 1e-15);
        let far = normal_mass(10.0, 11.0).unwrap();
        assert!(((far - 7.619_661_958_203_076e-24) / far).abs() < 1e-12);
        assert_eq!(normal_mass(-11.0, -10.0).unwrap(), far);
    }

    #[test]
    fn two_outage_oracles_agree() {
        let acc = Accuracy::default();
        for &(t, s) in &[(-3.0, 3.0), (7.0, 3.0), (15.0, 20.0)] {
            let q = OutageQuery::new(t, s, 1e-12).unwrap();
            let a = quad_outage(&q, TagState::Reflecting, &eff(), &acc).unwrap();
            let b = convolution_outage(&q, &eff(), &acc).unwrap();
            assert!((a - b).abs() < 1e-10, "{t} {s}: {a} vs {b}");
        }
    }

    #[test]
    fn integrand_errors_propagate() {
        let acc = Accuracy::new(1e-12, 2, 4096).unwrap();
        let q = OutageQuery::new(7.0, 3.0, 1e-12).unwrap();
        let err = quad_outage(&q, TagState::Reflecting, &eff(), &acc).unwrap_err();
        assert!(err.is_convergence(), "{err:?}");
    }
}
