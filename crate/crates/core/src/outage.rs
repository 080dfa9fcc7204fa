//! Outage probability `P_o = Pr[ρ̄ h² ≤ ρ_t]`.
//!
//! Non-reflecting: `erf(√q)` with `q = ρ_t / (2ρ̄σ²_sr)`.
//!
//! Reflecting: the series
//!
//! ```text
//! P_o = Σ_k 2^{2k} Γ²(k+½) e^{ν/2} W_{-k,0}(ν) γ(k+½, q) / (π^{3/2} (2k)!)
//! ```
//!
//! truncated after the first `T` for which the a-priori tail bound
//!
//! ```text
//! |ε_T| ≤ Ψ(½, 0, ν) / (√(πν) T!) · [2√q γ(T+1, q) − 2γ(T+3/2, q)]
//! ```
//!
//! drops below the requested tolerance. `partial_sum(T)` sums `k = 0..=T`,
//! and `truncation_bound(T)` bounds everything from `k = T + 1` on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    derive_effective, EffectiveVariances, OutageQuery, ScenarioParams, TagState, WhittakerTable,
};
use crate::specfun::{erf, ln_diff_exp, ln_gamma, ln_lower_inc_gamma, ln_tricomi_psi, Accuracy};

const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Outcome of a truncated series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    /// Index `T` of the last summed term (`T + 1` terms in total).
    pub terms_used: usize,
    pub error_bound: f64,
    pub converged: bool,
    /// The bound's bracket came out negative through roundoff and was set to 0.
    pub bound_clamped: bool,
}

/// Reflecting-state outage series for one query, with its Whittaker
/// coefficients cached.
#[derive(Debug)]
pub struct OutageSeries {
    q: f64,
    table: WhittakerTable,
    ln_bound_prefactor: f64,
}

impl OutageSeries {
    pub fn new(query: &OutageQuery, eff: &EffectiveVariances, acc: &Accuracy) -> Result<Self> {
        query.validate()?;
        acc.validate()?;
        eff.require_backscatter("outage_exact")?;
        let nu = eff.nu;
        // Ψ(½, 0, ν) / √(πν)
        let ln_bound_prefactor = ln_tricomi_psi(0.5, 0.0, nu, acc)? - 0.5 * (LN_PI + nu.ln());
        Ok(OutageSeries {
            q: query.normalized_threshold(eff.var_sr),
            table: WhittakerTable::new(nu, *acc),
            ln_bound_prefactor,
        })
    }

    /// `ρ_t / (2ρ̄σ²_sr)`.
    pub fn normalized_threshold(&self) -> f64 {
        self.q
    }

    pub fn max_terms(&self) -> usize {
        self.table.max_terms()
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k > self.table.max_terms() {
            return Err(Error::convergence(
                "outage_exact",
                format!(
                    "term index {k} exceeds max_terms = {}",
                    self.table.max_terms()
                ),
            ));
        }
        Ok(())
    }

    /// The `k`-th series term.
    pub fn term(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        let ln_gamma_inc = ln_lower_inc_gamma(k as f64 + 0.5, self.q)?;
        Ok((self.table.ln_coefficient(k)? - 1.5 * LN_PI + ln_gamma_inc).exp())
    }

    /// Sum of terms `k = 0..=t`.
    pub fn partial_sum(&self, t: usize) -> Result<f64> {
        let mut sum = 0.0;
        for k in 0..=t {
            sum += self.term(k)?;
        }
        Ok(sum)
    }

    /// Tail bound after term `t`; the flag reports a roundoff clamp.
    pub fn bound(&self, t: usize) -> Result<(f64, bool)> {
        let q = self.q;
        let tf = t as f64;
        let ln_first = std::f64::consts::LN_2 + 0.5 * q.ln() + ln_lower_inc_gamma(tf + 1.0, q)?;
        let ln_second = std::f64::consts::LN_2 + ln_lower_inc_gamma(tf + 1.5, q)?;
        if !(ln_first > ln_second) {
            return Ok((0.0, ln_first.is_finite()));
        }
        let ln_bracket = ln_diff_exp(ln_first, ln_second);
        let ln_bound = self.ln_bound_prefactor - ln_gamma(tf + 1.0)? + ln_bracket;
        Ok((ln_bound.exp(), false))
    }

    /// Sums up to the first `T` whose bound is at most `abs_tol`.
    pub fn evaluate(&self, abs_tol: f64) -> Result<SeriesResult> {
        let mut sum = 0.0;
        for t in 0..=self.table.max_terms() {
            sum += self.term(t)?;
            let (bound, clamped) = self.bound(t)?;
            if bound <= abs_tol {
                return Ok(SeriesResult {
                    value: sum.clamp(0.0, 1.0),
                    terms_used: t,
                    error_bound: bound,
                    converged: true,
                    bound_clamped: clamped,
                });
            }
        }
        Err(Error::convergence(
            "outage_exact",
            format!(
                "truncation bound still above {abs_tol:.1e} after {} terms (q = {:.3e}, ν = {:.3e})",
                self.table.max_terms(),
                self.q,
                self.table.nu()
            ),
        ))
    }
}

/// Exact outage probability with default special-function accuracy.
pub fn outage_exact(
    query: &OutageQuery,
    state: TagState,
    eff: &EffectiveVariances,
) -> Result<SeriesResult> {
    outage_exact_with(query, state, eff, &Accuracy::default())
}

/// Exact outage probability. `acc` governs the special-function kernel and
/// the term budget; `query.abs_tol` is the series truncation target.
pub fn outage_exact_with(
    query: &OutageQuery,
    state: TagState,
    eff: &EffectiveVariances,
    acc: &Accuracy,
) -> Result<SeriesResult> {
    query.validate()?;
    match state {
        TagState::NonReflecting => Ok(SeriesResult {
            value: erf(query.normalized_threshold(eff.var_sr).sqrt()),
            terms_used: 0,
            error_bound: 0.0,
            converged: true,
            bound_clamped: false,
        }),
        TagState::Reflecting => OutageSeries::new(query, eff, acc)?.evaluate(query.abs_tol),
    }
}

/// Tail bound after term `t` of the reflecting-state series.
pub fn truncation_bound(
    t: usize,
    query: &OutageQuery,
    eff: &EffectiveVariances,
    acc: &Accuracy,
) -> Result<f64> {
    Ok(OutageSeries::new(query, eff, acc)?.bound(t)?.0)
}

/// Leading high-SNR term, proportional to `ρ̄^{-1/2}`. Not clamped to 1.
pub fn outage_asymptotic(
    query: &OutageQuery,
    state: TagState,
    eff: &EffectiveVariances,
    acc: &Accuracy,
) -> Result<f64> {
    query.validate()?;
    let pi = std::f64::consts::PI;
    let base = (2.0 * query.rho_t() / (pi * eff.var_sr)).sqrt() / query.rho_bar().sqrt();
    match state {
        TagState::NonReflecting => Ok(base),
        TagState::Reflecting => {
            eff.require_backscatter("outage_asymptotic")?;
            // e^{ν/2} W_{0,0}(ν) = √ν Ψ(½, 1, ν)
            let scaled_w = crate::specfun::ln_scaled_whittaker_w_neg_k_0(0, eff.nu, acc)?.exp();
            Ok(base * scaled_w)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutageMethod {
    Exact,
    Asymptotic,
}

const DIVERSITY_POINTS: usize = 11;

/// Negated least-squares slope of `log₁₀ P_o` against `log₁₀ ρ̄` over
/// `[snr_db_lo, snr_db_hi]` (both at least 30 dB).
pub fn diversity_gain_estimate(
    state: TagState,
    eff: &EffectiveVariances,
    query_template: &OutageQuery,
    snr_db_lo: f64,
    snr_db_hi: f64,
) -> Result<f64> {
    diversity_gain_estimate_with(
        state,
        eff,
        query_template,
        snr_db_lo,
        snr_db_hi,
        OutageMethod::Exact,
        &Accuracy::default(),
    )
}

pub fn diversity_gain_estimate_with(
    state: TagState,
    eff: &EffectiveVariances,
    query_template: &OutageQuery,
    snr_db_lo: f64,
    snr_db_hi: f64,
    method: OutageMethod,
    acc: &Accuracy,
) -> Result<f64> {
    if !(snr_db_lo >= 30.0 && snr_db_hi > snr_db_lo) {
        return Err(Error::domain(
            "diversity_gain_estimate",
            format!("need 30 <= lo < hi (dB), got [{snr_db_lo}, {snr_db_hi}]"),
        ));
    }
    let mut xs = Vec::with_capacity(DIVERSITY_POINTS);
    let mut ys = Vec::with_capacity(DIVERSITY_POINTS);
    for i in 0..DIVERSITY_POINTS {
        let db = snr_db_lo + (snr_db_hi - snr_db_lo) * i as f64 / (DIVERSITY_POINTS - 1) as f64;
        let q = query_template.with_snr_db(db);
        let p = match method {
            OutageMethod::Exact => outage_exact_with(&q, state, eff, acc)?.value,
            OutageMethod::Asymptotic => outage_asymptotic(&q, state, eff, acc)?,
        };
        xs.push(db / 10.0);
        ys.push(p.log10());
    }
    Ok(-least_squares_slope(&xs, &ys))
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Resolution of the distance search, in meters.
pub const DISTANCE_RESOLUTION: f64 = 0.01;
const DISTANCE_FLOOR: f64 = 1e-3;

/// Largest tag–reader distance keeping the reflecting-state outage at or
/// below `target_po`, by bisection over `[1 mm, 10·d_sr]`.
pub fn max_distance_for_outage(
    target_po: f64,
    query: &OutageQuery,
    params: &ScenarioParams,
    state: TagState,
) -> Result<f64> {
    max_distance_for_outage_with(target_po, query, params, state, &Accuracy::default())
}

pub fn max_distance_for_outage_with(
    target_po: f64,
    query: &OutageQuery,
    params: &ScenarioParams,
    state: TagState,
    acc: &Accuracy,
) -> Result<f64> {
    if !(target_po > 0.0 && target_po < 1.0) {
        return Err(Error::domain(
            "max_distance_for_outage",
            format!("target must lie in (0, 1), got {target_po}"),
        ));
    }
    if state == TagState::NonReflecting {
        return Err(Error::Unbounded(
            "outage does not depend on d_tr when the tag does not reflect".into(),
        ));
    }
    params.validate()?;
    let outage_at = |d: f64| -> Result<f64> {
        let eff = derive_effective(&params.with_d_tr(d))?;
        Ok(outage_exact_with(query, state, &eff, acc)?.value)
    };

    let mut lo = DISTANCE_FLOOR;
    let mut hi = 10.0 * params.d_sr;
    if hi <= lo {
        return Err(Error::domain(
            "max_distance_for_outage",
            format!("search bracket [{lo}, {hi}] is empty"),
        ));
    }
    let p_lo = outage_at(lo)?;
    if p_lo > target_po {
        return Err(Error::Infeasible(format!(
            "outage {p_lo:.3e} at d_tr = {lo} m already exceeds {target_po:.1e}"
        )));
    }
    if outage_at(hi)? <= target_po {
        return Ok(hi);
    }
    while hi - lo > DISTANCE_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if outage_at(mid)? <= target_po {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
