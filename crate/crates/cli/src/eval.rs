//! Single operating-point evaluation.

use std::path::PathBuf;

use backscatter_outage::oracle::{mc_outage, McConfig};
use backscatter_outage::outage::{max_distance_for_outage_with, outage_exact_with};
use backscatter_outage::{
    derive_effective, outage_asymptotic, Accuracy, Error, OutageQuery, ScenarioParams, TagState,
};
use clap::Args;
use serde::Serialize;

use crate::scenario::Scenario;
use crate::UsageError;

#[derive(Args)]
pub struct EvalArgs {
    /// Tag state: 0 absorbs, 1 reflects.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    state: u8,
    /// Average transmit SNR in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: f64,
    /// Outage threshold in dB.
    #[arg(long, allow_hyphen_values = true)]
    threshold_db: f64,
    /// Absolute tolerance for the outage series.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Series term budget.
    #[arg(long)]
    max_terms: Option<usize>,
    /// Scenario file supplying parameters; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    var_sr: Option<f64>,
    #[arg(long)]
    var_st: Option<f64>,
    #[arg(long)]
    var_tr: Option<f64>,
    #[arg(long)]
    d_sr: Option<f64>,
    #[arg(long)]
    d_st: Option<f64>,
    #[arg(long)]
    d_tr: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Also simulate with this many samples.
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also search for the largest `d_tr` meeting this outage target.
    #[arg(long)]
    target_po: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct EvalRecord {
    pub state: u8,
    pub snr_db: f64,
    pub threshold_db: f64,
    pub po_exact: f64,
    pub terms_used: usize,
    pub error_bound: f64,
    pub converged: bool,
    pub po_asymptotic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub po_mc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_d_tr: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_d_tr_status: Option<&'static str>,
}

impl EvalArgs {
    fn params(&self) -> anyhow::Result<(ScenarioParams, Accuracy)> {
        let (mut p, mut acc) = match &self.config {
            Some(path) => {
                let s = Scenario::load(path)?;
                (s.params, s.accuracy)
            }
            None => (ScenarioParams::default(), Accuracy::default()),
        };
        let overrides = [
            (self.eta, &mut p.eta),
            (self.var_sr, &mut p.var_sr_raw),
            (self.var_st, &mut p.var_st_raw),
            (self.var_tr, &mut p.var_tr_raw),
            (self.d_sr, &mut p.d_sr),
            (self.d_st, &mut p.d_st),
            (self.d_tr, &mut p.d_tr),
            (self.alpha, &mut p.alpha),
        ];
        for (v, slot) in overrides {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(m) = self.max_terms {
            acc.max_terms = m;
        }
        p.validate()?;
        acc.validate()?;
        Ok((p, acc))
    }
}

pub fn evaluate(args: &EvalArgs) -> anyhow::Result<EvalRecord> {
    if !(args.tol > 0.0) {
        return Err(UsageError(format!("--tol must be positive, got {}", args.tol)).into());
    }
    let state = TagState::try_from(args.state)?;
    let (params, acc) = args.params()?;
    let eff = derive_effective(&params)?;
    let q = OutageQuery::new(args.threshold_db, args.snr_db, args.tol)?;

    let exact = outage_exact_with(&q, state, &eff, &acc)?;
    let asym = outage_asymptotic(&q, state, &eff, &acc)?;
    let mc = match args.mc_samples {
        Some(n) => {
            let cfg = McConfig {
                n_samples: n,
                seed: args.seed.unwrap_or(McConfig::default().seed),
                ..McConfig::default()
            };
            Some(mc_outage(&q, state, &eff, &cfg)?)
        }
        None => None,
    };
    let (max_d_tr, max_d_tr_status) = match args.target_po {
        None => (None, None),
        Some(target) => match max_distance_for_outage_with(target, &q, &params, state, &acc) {
            Ok(d) => (Some(Some(d)), Some("ok")),
            Err(Error::Infeasible(_)) => (Some(None), Some("infeasible")),
            Err(Error::Unbounded(_)) => (Some(None), Some("unbounded")),
            Err(e) => return Err(e.into()),
        },
    };

    Ok(EvalRecord {
        state: args.state,
        snr_db: args.snr_db,
        threshold_db: args.threshold_db,
        po_exact: exact.value,
        terms_used: exact.terms_used,
        error_bound: exact.error_bound,
        converged: exact.converged,
        po_asymptotic: asym.min(1.0),
        po_mc: mc.map(|m| m.p_hat),
        mc_stderr: mc.map(|m| m.stderr),
        mc_samples: mc.map(|m| m.n),
        max_d_tr,
        max_d_tr_status,
    })
}

pub fn run(args: &EvalArgs) -> anyhow::Result<()> {
    let record = evaluate(args)?;
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}
