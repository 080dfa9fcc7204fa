//! Figure-data commands. Rows come out ordered by their axis values no
//! matter how the work was scheduled.

use backscatter_outage::oracle::{mc_outage, quad_outage_with_error};
use backscatter_outage::outage::{max_distance_for_outage_with, outage_exact_with};
use backscatter_outage::{
    derive_effective, outage_asymptotic, Error, OutageQuery, OutageSeries, TagState,
};
use rayon::prelude::*;

use crate::scenario::{Axis, Scenario};
use crate::table::{Cell, Table};

pub const FIG2_COLUMNS: &[&str] = &[
    "rho_bar_db",
    "rho_t_db",
    "terms",
    "po_truncated",
    "po_reference",
    "reference_error",
    "bound",
    "bound_clamped",
    "rel_err_truncation",
    "rel_err_bound",
];

pub const FIG3_COLUMNS: &[&str] = &[
    "rho_t_db",
    "rho_bar_db",
    "po_exact_b0",
    "po_exact_b1",
    "terms_b1",
    "bound_b1",
    "po_asym_b0",
    "po_asym_b1",
    "po_mc_b0",
    "po_mc_b1",
    "mc_stderr_b0",
    "mc_stderr_b1",
    "mc_samples",
];

pub const FIG4_COLUMNS: &[&str] = &[
    "rho_bar_db",
    "rho_t_db",
    "d_tr",
    "po_b0",
    "po_b1",
    "terms_b1",
    "bound_b1",
];

fn query(s: &Scenario, threshold_db: f64, snr_db: f64) -> anyhow::Result<OutageQuery> {
    Ok(OutageQuery::new(threshold_db, snr_db, s.queries.abs_tol)?)
}

/// Truncated series against the quadrature reference for each `T`.
pub fn fig2(s: &Scenario) -> anyhow::Result<Table> {
    Scenario::require(&s.queries.snr_db, "snr_db")?;
    Scenario::require(&s.queries.threshold_db, "threshold_db")?;
    let sweep = s.sweep(Axis::Terms)?;
    let (t_lo, t_hi) = (sweep.lo as usize, sweep.hi as usize);
    let eff = derive_effective(&s.params)?;

    let cases: Vec<(f64, f64)> = s
        .queries
        .snr_db
        .iter()
        .flat_map(|&snr| s.queries.threshold_db.iter().map(move |&t| (snr, t)))
        .collect();
    let blocks = cases
        .par_iter()
        .map(|&(snr, t_db)| -> anyhow::Result<Vec<Vec<Cell>>> {
            let q = query(s, t_db, snr)?;
            let reference = quad_outage_with_error(&q, TagState::Reflecting, &eff, &s.accuracy)?;
            let series = OutageSeries::new(&q, &eff, &s.accuracy)?;
            let exact = reference.value;
            let mut partial = series.partial_sum(t_lo)?;
            let mut rows = Vec::with_capacity(t_hi - t_lo + 1);
            for t in t_lo..=t_hi {
                if t > t_lo {
                    partial += series.term(t)?;
                }
                let (bound, clamped) = series.bound(t)?;
                rows.push(vec![
                    snr.into(),
                    t_db.into(),
                    t.into(),
                    partial.into(),
                    exact.into(),
                    reference.error.into(),
                    bound.into(),
                    clamped.into(),
                    ((exact - partial).abs() / exact).into(),
                    (bound / exact).into(),
                ]);
            }
            Ok(rows)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut table = Table::new("fig2", FIG2_COLUMNS);
    blocks.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

/// Outage versus average SNR for both states. The asymptote grows past 1
/// at low SNR and is capped there.
pub fn fig3(s: &Scenario) -> anyhow::Result<Table> {
    Scenario::require(&s.queries.threshold_db, "threshold_db")?;
    let snrs = s.sweep(Axis::SnrDb)?.points();
    let eff = derive_effective(&s.params)?;
    let mc = s.mc.enabled.then(|| s.mc.config());

    let cases: Vec<(f64, f64)> = s
        .queries
        .threshold_db
        .iter()
        .flat_map(|&t| snrs.iter().map(move |&snr| (t, snr)))
        .collect();
    let rows = cases
        .par_iter()
        .map(|&(t_db, snr)| -> anyhow::Result<Vec<Cell>> {
            let q = query(s, t_db, snr)?;
            let b0 = outage_exact_with(&q, TagState::NonReflecting, &eff, &s.accuracy)?;
            let b1 = outage_exact_with(&q, TagState::Reflecting, &eff, &s.accuracy)?;
            let a0 = outage_asymptotic(&q, TagState::NonReflecting, &eff, &s.accuracy)?;
            let a1 = outage_asymptotic(&q, TagState::Reflecting, &eff, &s.accuracy)?;
            let (m0, m1) = match &mc {
                Some(cfg) => (
                    Some(mc_outage(&q, TagState::NonReflecting, &eff, cfg)?),
                    Some(mc_outage(&q, TagState::Reflecting, &eff, cfg)?),
                ),
                None => (None, None),
            };
            Ok(vec![
                t_db.into(),
                snr.into(),
                b0.value.into(),
                b1.value.into(),
                b1.terms_used.into(),
                b1.error_bound.into(),
                a0.min(1.0).into(),
                a1.min(1.0).into(),
                m0.map(|m| m.p_hat).into(),
                m1.map(|m| m.p_hat).into(),
                m0.map(|m| m.stderr).into(),
                m1.map(|m| m.stderr).into(),
                mc.map_or(Cell::Empty, |c| Cell::Int(c.n_samples)),
            ])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut table = Table::new("fig3", FIG3_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Outage versus tag-reader distance.
pub fn fig4(s: &Scenario) -> anyhow::Result<Table> {
    Scenario::require(&s.queries.snr_db, "snr_db")?;
    Scenario::require(&s.queries.threshold_db, "threshold_db")?;
    let distances = s.sweep(Axis::DTr)?.points();

    let mut cases = Vec::new();
    for &snr in &s.queries.snr_db {
        for &t in &s.queries.threshold_db {
            for &d in &distances {
                cases.push((snr, t, d));
            }
        }
    }
    let rows = cases
        .par_iter()
        .map(|&(snr, t_db, d)| -> anyhow::Result<Vec<Cell>> {
            let q = query(s, t_db, snr)?;
            let eff = derive_effective(&s.params.with_d_tr(d))?;
            let b0 = outage_exact_with(&q, TagState::NonReflecting, &eff, &s.accuracy)?;
            let b1 = outage_exact_with(&q, TagState::Reflecting, &eff, &s.accuracy)?;
            Ok(vec![
                snr.into(),
                t_db.into(),
                d.into(),
                b0.value.into(),
                b1.value.into(),
                b1.terms_used.into(),
                b1.error_bound.into(),
            ])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut table = Table::new("fig4", FIG4_COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Largest tag distance meeting the scenario's outage target, per
/// (SNR, threshold) pair. Failures are reported, not raised.
pub fn fig4_limits(s: &Scenario) -> Vec<(f64, f64, Result<f64, Error>)> {
    let Some(target) = s.queries.target_po else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &snr in &s.queries.snr_db {
        for &t in &s.queries.threshold_db {
            let r = OutageQuery::new(t, snr, s.queries.abs_tol).and_then(|q| {
                max_distance_for_outage_with(
                    target,
                    &q,
                    &s.params,
                    TagState::Reflecting,
                    &s.accuracy,
                )
            });
            out.push((snr, t, r));
        }
    }
    out
}
