//! Monte Carlo simulation of the effective channel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::GaussianStream;
use crate::error::{Error, Result};
use crate::model::{EffectiveVariances, OutageQuery, TagState};
use crate::specfun::regularized_upper_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub batch_size: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_samples: 1_000_000,
            seed: 0x5EED,
            batch_size: 65_536,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.batch_size == 0 {
            return Err(Error::domain(
                "McConfig",
                "n_samples and batch_size must be positive",
            ));
        }
        Ok(())
    }

    fn batches(&self) -> impl ParallelIterator<Item = (u64, u64)> + '_ {
        let n_batches = self.n_samples.div_ceil(self.batch_size);
        (0..n_batches).into_par_iter().map(move |b| {
            let start = b * self.batch_size;
            (start, (start + self.batch_size).min(self.n_samples))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub n: u64,
}

impl McEstimate {
    pub fn from_count(hits: u64, n: u64) -> Self {
        let p_hat = hits as f64 / n as f64;
        McEstimate {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
            n,
        }
    }
}

/// One draw of `h`. Always consumes three normals so that both states read
/// the same stream positions.
pub fn sample_effective_channel(
    state: TagState,
    eff: &EffectiveVariances,
    stream: &mut GaussianStream,
) -> f64 {
    let z_sr = stream.standard_normal();
    let z_st = stream.standard_normal();
    let z_tr = stream.standard_normal();
    let h_sr = eff.var_sr.sqrt() * z_sr;
    match state {
        TagState::NonReflecting => h_sr,
        TagState::Reflecting => {
            h_sr + eff.eta * (eff.var_st.sqrt() * z_st) * (eff.var_tr.sqrt() * z_tr)
        }
    }
}

fn count_where<F>(state: TagState, eff: &EffectiveVariances, cfg: &McConfig, pred: F) -> u64
where
    F: Fn(f64) -> bool + Sync,
{
    cfg.batches()
        .map(|(start, end)| {
            let mut stream = GaussianStream::at_sample(cfg.seed, start);
            (start..end)
                .filter(|_| pred(sample_effective_channel(state, eff, &mut stream)))
                .count() as u64
        })
        .sum()
}

/// Fraction of samples with `ρ̄ h² ≤ ρ_t`.
pub fn mc_outage(
    query: &OutageQuery,
    state: TagState,
    eff: &EffectiveVariances,
    cfg: &McConfig,
) -> Result<McEstimate> {
    query.validate()?;
    cfg.validate()?;
    let (rho_bar, rho_t) = (query.rho_bar(), query.rho_t());
    let hits = count_where(state, eff, cfg, |h| rho_bar * h * h <= rho_t);
    Ok(McEstimate::from_count(hits, cfg.n_samples))
}

/// Equal-width bins over `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub lo: f64,
    pub hi: f64,
    pub n_bins: usize,
}

impl BinSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || self.n_bins == 0 || !self.lo.is_finite() || !self.hi.is_finite()
        {
            return Err(Error::domain(
                "BinSpec",
                format!("need finite lo < hi and n_bins > 0, got {self:?}"),
            ));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.n_bins as f64
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w)
    }

    fn index(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x < self.hi) {
            return None;
        }
        Some((((x - self.lo) / self.width()) as usize).min(self.n_bins - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: BinSpec,
    pub counts: Vec<u64>,
    pub out_of_range: u64,
    pub n: u64,
}

impl Histogram {
    /// Count per bin divided by `n · width`.
    pub fn density(&self) -> Vec<f64> {
        let norm = self.n as f64 * self.bins.width();
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    /// Binomial standard error of each density value.
    pub fn density_stderr(&self) -> Vec<f64> {
        let n = self.n as f64;
        let w = self.bins.width();
        self.counts
            .iter()
            .map(|&c| {
                let p = c as f64 / n;
                (p * (1.0 - p) / n).sqrt() / w
            })
            .collect()
    }
}

pub fn mc_channel_histogram(
    state: TagState,
    eff: &EffectiveVariances,
    cfg: &McConfig,
    bins: &BinSpec,
) -> Result<Histogram> {
    cfg.validate()?;
    bins.validate()?;
    let (counts, out_of_range) = cfg
        .batches()
        .map(|(start, end)| {
            let mut stream = GaussianStream::at_sample(cfg.seed, start);
            let mut counts = vec![0u64; bins.n_bins];
            let mut outside = 0u64;
            for _ in start..end {
                match bins.index(sample_effective_channel(state, eff, &mut stream)) {
                    Some(i) => counts[i] += 1,
                    None => outside += 1,
                }
            }
            (counts, outside)
        })
        .reduce(
            || (vec![0u64; bins.n_bins], 0),
            |(mut a, oa), (b, ob)| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                (a, oa + ob)
            },
        );
    Ok(Histogram {
        bins: *bins,
        counts,
        out_of_range,
        n: cfg.n_samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `observed` against cell probabilities
/// `expected_p` (which need not sum to 1; the remainder forms one extra
/// cell together with `extra_observed`). Adjacent cells are pooled until
/// each expects at least 5 counts.
pub fn chi_square_test(
    observed: &[u64],
    expected_p: &[f64],
    extra_observed: u64,
    n: u64,
) -> Result<ChiSquare> {
    if observed.len() != expected_p.len() {
        return Err(Error::domain("chi_square_test", "cell count mismatch"));
    }
    let nf = n as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pending = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected_p) {
        pending.0 += o as f64;
        pending.1 += p * nf;
        if pending.1 >= 5.0 {
            cells.push(pending);
            pending = (0.0, 0.0);
        }
    }
    let rest = (1.0 - expected_p.iter().sum::<f64>()).max(0.0) * nf;
    pending.0 += extra_observed as f64;
    pending.1 += rest;
    if pending.1 >= 5.0 || cells.is_empty() {
        cells.push(pending);
    } else if let Some(last) = cells.last_mut() {
        last.0 += pending.0;
        last.1 += pending.1;
    }
    if cells.len() < 2 {
        return Err(Error::domain(
            "chi_square_test",
            "fewer than two usable cells",
        ));
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let p_value = regularized_upper_gamma(0.5 * dof as f64, 0.5 * statistic)?;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eff() -> EffectiveVariances {
        EffectiveVariances::from_variances(0.7, 1.0, 1.0, 3.0).unwrap()
    }

    #[test]
    fn batch_size_does_not_change_the_estimate() {
        let q = OutageQuery::new(2.0, 3.0, 1e-12).unwrap();
        let base = McConfig {
            n_samples: 50_001,
            seed: 9,
            batch_size: 50_001,
        };
        let a = mc_outage(&q, TagState::Reflecting, &eff(), &base).unwrap();
        for bs in [1, 7, 1000, 65_536] {
            let cfg = McConfig {
                batch_size: bs,
                ..base
            };
            let b = mc_outage(&q, TagState::Reflecting, &eff(), &cfg).unwrap();
            assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
        }
    }

    #[test]
    fn stderr_is_binomial() {
        let e = McEstimate::from_count(250, 1000);
        assert_eq!(e.p_hat, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn histogram_accounts_for_every_sample() {
        let cfg = McConfig {
            n_samples: 20_000,
            seed: 3,
            batch_size: 999,
        };
        let bins = BinSpec {
            lo: -1.0,
            hi: 1.0,
            n_bins: 20,
        };
        let h = mc_channel_histogram(TagState::NonReflecting, &eff(), &cfg, &bins).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>() + h.out_of_range, 20_000);
        assert!(h.out_of_range > 0);
    }

    #[test]
    fn chi_square_of_exact_counts_is_zero() {
        let r = chi_square_test(&[250, 250, 250, 250], &[0.25; 4], 0, 1000).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 3);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs() {
        assert!(McConfig {
            n_samples: 0,
            ..McConfig::default()
        }
        .validate()
        .is_err());
        assert!(BinSpec {
            lo: 1.0,
            hi: 1.0,
            n_bins: 3
        }
        .validate()
        .is_err());
    }
}
