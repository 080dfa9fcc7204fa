//! Scenario parameters and the effective-channel / SNR densities.
//!
//! With the tag reflecting, the effective channel `h = h_sr + η h_st h_tr`
//! has density
//!
//! ```text
//! f_h(x) = e^{ν/2}/δ · e^{-x²/2σ²_sr} Σ_k 2^k Γ²(k+½) W_{-k,0}(ν) x^{2k} / ((2k)! σ_sr^{2k})
//! ```
//!
//! with `δ = √(2π³σ²_sr)`, `φ = η√(σ²_st σ²_tr)` and
//! `ν = σ²_sr / (2η²σ²_st σ²_tr)`. Every factor is combined in log space.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{
    bessel_k0, ln_add_exp, ln_gamma_half_and_factorial, ln_scaled_whittaker_w_neg_k_0, Accuracy,
};

/// Converts a decibel value to linear scale, `10^{dB/10}`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Physical scenario before path loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub eta: f64,
    pub var_sr_raw: f64,
    pub var_st_raw: f64,
    pub var_tr_raw: f64,
    pub d_sr: f64,
    pub d_st: f64,
    pub d_tr: f64,
    pub alpha: f64,
}

impl Default for ScenarioParams {
    /// η = 0.7, raw variances (1, 1, 3), unit distances, α = 3.
    fn default() -> Self {
        ScenarioParams {
            eta: 0.7,
            var_sr_raw: 1.0,
            var_st_raw: 1.0,
            var_tr_raw: 3.0,
            d_sr: 1.0,
            d_st: 1.0,
            d_tr: 1.0,
            alpha: 3.0,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "ScenarioParams";
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::domain(
                OP,
                format!("eta must lie in [0, 1], got {}", self.eta),
            ));
        }
        for (name, v) in [
            ("var_sr_raw", self.var_sr_raw),
            ("var_st_raw", self.var_st_raw),
            ("var_tr_raw", self.var_tr_raw),
            ("d_sr", self.d_sr),
            ("d_st", self.d_st),
            ("d_tr", self.d_tr),
            ("alpha", self.alpha),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(
                    OP,
                    format!("{name} must be positive, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn with_d_tr(self, d_tr: f64) -> Self {
        ScenarioParams { d_tr, ..self }
    }
}

/// Post-path-loss variances and the constants built from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveVariances {
    pub eta: f64,
    pub var_sr: f64,
    pub var_st: f64,
    pub var_tr: f64,
    /// `σ²_sr / (2η²σ²_st σ²_tr)`; infinite when `η = 0`.
    pub nu: f64,
    /// `√(2π³σ²_sr)`.
    pub delta: f64,
    /// `η√(σ²_st σ²_tr)`, the scale of the product `η h_st h_tr`.
    pub phi: f64,
}

impl EffectiveVariances {
    /// Builds the record from already path-loss-adjusted variances.
    pub fn from_variances(eta: f64, var_sr: f64, var_st: f64, var_tr: f64) -> Result<Self> {
        ScenarioParams {
            eta,
            var_sr_raw: var_sr,
            var_st_raw: var_st,
            var_tr_raw: var_tr,
            d_sr: 1.0,
            d_st: 1.0,
            d_tr: 1.0,
            alpha: 1.0,
        }
        .validate()?;
        Ok(Self::assemble(eta, var_sr, var_st, var_tr))
    }

    fn assemble(eta: f64, var_sr: f64, var_st: f64, var_tr: f64) -> Self {
        let cross = eta * eta * var_st * var_tr;
        EffectiveVariances {
            eta,
            var_sr,
            var_st,
            var_tr,
            nu: if cross > 0.0 {
                var_sr / (2.0 * cross)
            } else {
                f64::INFINITY
            },
            delta: (2.0 * PI.powi(3) * var_sr).sqrt(),
            phi: eta * (var_st * var_tr).sqrt(),
        }
    }

    pub fn sigma_sr(&self) -> f64 {
        self.var_sr.sqrt()
    }

    /// Variance of `h`: `σ²_sr`, plus `η²σ²_st σ²_tr` when reflecting.
    pub fn channel_variance(&self, state: TagState) -> f64 {
        match state {
            TagState::NonReflecting => self.var_sr,
            TagState::Reflecting => self.var_sr + self.phi * self.phi,
        }
    }

    pub(crate) fn require_backscatter(&self, op: &'static str) -> Result<()> {
        if self.eta > 0.0 && self.phi > 0.0 && self.nu.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(
                op,
                "the reflecting-state density is undefined for eta = 0",
            ))
        }
    }
}

/// Applies path loss `σ² = σ̃² / d^α` to each link.
pub fn derive_effective(params: &ScenarioParams) -> Result<EffectiveVariances> {
    params.validate()?;
    let loss = |var: f64, d: f64| var / d.powf(params.alpha);
    Ok(EffectiveVariances::assemble(
        params.eta,
        loss(params.var_sr_raw, params.d_sr),
        loss(params.var_st_raw, params.d_st),
        loss(params.var_tr_raw, params.d_tr),
    ))
}

/// Tag state `B`: 0 absorbs the ambient signal, 1 reflects it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TagState {
    NonReflecting,
    Reflecting,
}

impl TagState {
    pub const BOTH: [TagState; 2] = [TagState::NonReflecting, TagState::Reflecting];

    pub fn bit(self) -> u8 {
        match self {
            TagState::NonReflecting => 0,
            TagState::Reflecting => 1,
        }
    }
}

impl TryFrom<u8> for TagState {
    type Error = Error;

    fn try_from(b: u8) -> Result<Self> {
        match b {
            0 => Ok(TagState::NonReflecting),
            1 => Ok(TagState::Reflecting),
            other => Err(Error::domain(
                "TagState",
                format!("state must be 0 or 1, got {other}"),
            )),
        }
    }
}

impl From<TagState> for u8 {
    fn from(s: TagState) -> u8 {
        s.bit()
    }
}

impl fmt::Display for TagState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B={}", self.bit())
    }
}

/// Threshold and average transmit SNR (both in dB) plus the accuracy target
/// for the outage series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageQuery {
    pub rho_t_db: f64,
    pub rho_bar_db: f64,
    pub abs_tol: f64,
}

impl OutageQuery {
    pub fn new(rho_t_db: f64, rho_bar_db: f64, abs_tol: f64) -> Result<Self> {
        let q = OutageQuery {
            rho_t_db,
            rho_bar_db,
            abs_tol,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain(
                "OutageQuery",
                format!("abs_tol must be positive, got {}", self.abs_tol),
            ));
        }
        let (t, r) = (self.rho_t(), self.rho_bar());
        if !(t > 0.0 && t.is_finite() && r > 0.0 && r.is_finite()) {
            return Err(Error::domain(
                "OutageQuery",
                format!(
                    "linear SNRs must be positive and finite (threshold {} dB, average {} dB)",
                    self.rho_t_db, self.rho_bar_db
                ),
            ));
        }
        Ok(())
    }

    /// Linear threshold `ρ_t`.
    pub fn rho_t(&self) -> f64 {
        db_to_linear(self.rho_t_db)
    }

    /// Linear average transmit SNR `ρ̄`.
    pub fn rho_bar(&self) -> f64 {
        db_to_linear(self.rho_bar_db)
    }

    /// `ρ_t / (2 ρ̄ σ²_sr)`, the argument of every incomplete gamma in the
    /// outage series.
    pub fn normalized_threshold(&self, var_sr: f64) -> f64 {
        self.rho_t() / (2.0 * self.rho_bar() * var_sr)
    }

    pub fn with_snr_db(self, rho_bar_db: f64) -> Self {
        OutageQuery { rho_bar_db, ..self }
    }

    pub fn with_threshold_db(self, rho_t_db: f64) -> Self {
        OutageQuery { rho_t_db, ..self }
    }
}

/// Lazily filled table of `ln(e^{ν/2} W_{-k,0}(ν))`, shared by the density
/// and outage series. Thread-safe; each entry is computed at most once.
#[derive(Debug)]
pub(crate) struct WhittakerTable {
    nu: f64,
    acc: Accuracy,
    slots: Vec<OnceLock<f64>>,
}

impl WhittakerTable {
    pub(crate) fn new(nu: f64, acc: Accuracy) -> Self {
        WhittakerTable {
            nu,
            acc,
            slots: (0..=acc.max_terms).map(|_| OnceLock::new()).collect(),
        }
    }

    pub(crate) fn nu(&self) -> f64 {
        self.nu
    }

    pub(crate) fn max_terms(&self) -> usize {
        self.acc.max_terms
    }

    pub(crate) fn ln_scaled(&self, k: usize) -> Result<f64> {
        let slot = &self.slots[k];
        if let Some(v) = slot.get() {
            return Ok(*v);
        }
        let v = ln_scaled_whittaker_w_neg_k_0(k as u32, self.nu, &self.acc)?;
        Ok(*slot.get_or_init(|| v))
    }

    /// `ln[2^{2k} Γ²(k+½) e^{ν/2} W_{-k,0}(ν) / (2k)!]`.
    pub(crate) fn ln_coefficient(&self, k: usize) -> Result<f64> {
        let (ln_gamma_half, ln_fact_2k) = ln_gamma_half_and_factorial(k);
        Ok(
            2.0 * k as f64 * std::f64::consts::LN_2 + 2.0 * ln_gamma_half - ln_fact_2k
                + self.ln_scaled(k)?,
        )
    }
}

/// Channel density for one state, with the series coefficients cached so
/// repeated evaluation (quadrature, histograms) stays cheap.
#[derive(Debug)]
pub struct ChannelDensity {
    state: TagState,
    eff: EffectiveVariances,
    acc: Accuracy,
    table: Option<WhittakerTable>,
}

impl ChannelDensity {
    pub fn new(state: TagState, eff: &EffectiveVariances, acc: &Accuracy) -> Result<Self> {
        acc.validate()?;
        let table = match state {
            TagState::NonReflecting => None,
            TagState::Reflecting => {
                eff.require_backscatter("channel_pdf")?;
                Some(WhittakerTable::new(eff.nu, *acc))
            }
        };
        Ok(ChannelDensity {
            state,
            eff: *eff,
            acc: *acc,
            table,
        })
    }

    pub fn state(&self) -> TagState {
        self.state
    }

    pub fn effective(&self) -> &EffectiveVariances {
        &self.eff
    }

    /// `f_h(x)`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(
                "channel_pdf",
                format!("x must be finite, got {x}"),
            ));
        }
        let var = self.eff.var_sr;
        let u = x * x / (2.0 * var);
        let Some(table) = &self.table else {
            return Ok((-u).exp() / (2.0 * PI * var).sqrt());
        };
        let ln_prefix = -u - self.eff.delta.ln();
        // Coefficient of x^{2k}/σ^{2k} is 2^k Γ²(k+½) e^{ν/2}W_k/(2k)!,
        // i.e. the table coefficient divided by 2^k.
        let ln_ratio = (x * x / var).ln();
        let first = ln_prefix + table.ln_coefficient(0)?;
        if x == 0.0 {
            return Ok(first.exp());
        }
        let ln_tol = self.acc.abs_tol.ln();
        let mut ln_sum = first;
        let mut prev = first;
        let mut decreasing = 0;
        for k in 1..=table.max_terms() {
            let kf = k as f64;
            let ln_term =
                ln_prefix + table.ln_coefficient(k)? - kf * std::f64::consts::LN_2 + kf * ln_ratio;
            ln_sum = ln_add_exp(ln_sum, ln_term);
            decreasing = if ln_term < prev { decreasing + 1 } else { 0 };
            prev = ln_term;
            if ln_term < ln_tol && decreasing >= 3 {
                return Ok(ln_sum.exp());
            }
        }
        Err(Error::convergence(
            "channel_pdf",
            format!(
                "series at x = {x} not below {:.1e} after {} terms",
                self.acc.abs_tol,
                table.max_terms()
            ),
        ))
    }
}

/// Effective-channel density `f_h(x)` for the given tag state.
pub fn channel_pdf(
    x: f64,
    state: TagState,
    eff: &EffectiveVariances,
    acc: &Accuracy,
) -> Result<f64> {
    ChannelDensity::new(state, eff, acc)?.pdf(x)
}

/// Density of `ξ = η h_st h_tr`: `K₀(|x|/φ) / (πφ)`. Undefined at `x = 0`.
pub fn product_pdf(x: f64, eff: &EffectiveVariances) -> Result<f64> {
    eff.require_backscatter("product_pdf")?;
    if x == 0.0 || !x.is_finite() {
        return Err(Error::domain(
            "product_pdf",
            format!("density has a logarithmic singularity at 0; got x = {x}"),
        ));
    }
    Ok(bessel_k0(x.abs() / eff.phi)? / (PI * eff.phi))
}

/// Density of the receive SNR `ρ = ρ̄ h²`: `f_h(√(x/ρ̄)) / √(ρ̄ x)`.
pub fn snr_pdf(
    x: f64,
    state: TagState,
    query: &OutageQuery,
    eff: &EffectiveVariances,
    acc: &Accuracy,
) -> Result<f64> {
    ChannelDensity::new(state, eff, acc)?.snr_pdf(x, query.rho_bar())
}

impl ChannelDensity {
    /// SNR density at `x > 0` for average transmit SNR `rho_bar` (linear).
    pub fn snr_pdf(&self, x: f64, rho_bar: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::domain(
                "snr_pdf",
                format!("density is defined for x > 0, got {x}"),
            ));
        }
        Ok(self.pdf((x / rho_bar).sqrt())? / (rho_bar * x).sqrt())
    }
}
