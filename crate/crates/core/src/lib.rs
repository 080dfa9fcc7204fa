//! Outage analysis for a two-state ambient backscatter link.
//!
//! A passive tag either absorbs the ambient signal (`B = 0`) or reflects it
//! (`B = 1`). The reader then sees an effective real Gaussian channel
//! `h = h_sr` or `h = h_sr + η·h_st·h_tr`. This crate provides:
//!
//! * [`specfun`]: the special-function kernel (erf, incomplete gamma, `K₀`,
//!   Tricomi `Ψ`, Whittaker `W_{-k,0}`), all evaluated in log space where
//!   overflow is a concern.
//! * [`model`]: scenario parameters, path-loss variances and the channel/SNR
//!   densities.
//! * [`outage`]: the outage-probability series with a-priori truncation
//!   control, the high-SNR asymptote and diversity-gain fitting.
//! * [`oracle`]: independent ground truth, i.e. a reproducible Monte Carlo
//!   simulator and quadrature-based references.
//! * [`quadrature`]: the adaptive Gauss–Kronrod engine shared by the above.

pub mod error;
pub mod model;
pub mod oracle;
pub mod outage;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{
    channel_pdf, db_to_linear, derive_effective, product_pdf, snr_pdf, ChannelDensity,
    EffectiveVariances, OutageQuery, ScenarioParams, TagState,
};
pub use outage::{
    diversity_gain_estimate, max_distance_for_outage, outage_asymptotic, outage_exact,
    truncation_bound, OutageMethod, OutageSeries, SeriesResult,
};
pub use specfun::Accuracy;
