//! Quick agreement checks between the series and the oracles.

use backscatter_outage::oracle::{
    convolution_outage, mc_outage, quad_convolution_pdf, quad_outage, McConfig,
};
use backscatter_outage::outage::outage_exact_with;
use backscatter_outage::specfun::erf;
use backscatter_outage::{
    channel_pdf, derive_effective, Accuracy, OutageQuery, ScenarioParams, TagState,
};

struct Check {
    name: String,
    value: f64,
    limit: f64,
}

fn check(name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check {
        name: name.into(),
        value,
        limit,
    }
}

fn checks() -> anyhow::Result<Vec<Check>> {
    let eff = derive_effective(&ScenarioParams::default())?;
    let acc = Accuracy::default();
    let mut out = Vec::new();

    for (snr, t) in [(3.0, -3.0), (3.0, 7.0), (20.0, 2.0), (35.0, 15.0)] {
        let q = OutageQuery::new(t, snr, 1e-13)?;
        let series = outage_exact_with(&q, TagState::Reflecting, &eff, &acc)?.value;
        let quad = quad_outage(&q, TagState::Reflecting, &eff, &acc)?;
        let conv = convolution_outage(&q, &eff, &acc)?;
        out.push(check(
            format!("B=1 series vs quadrature at {snr} dB, {t} dB"),
            (series - quad).abs(),
            1e-9,
        ));
        out.push(check(
            format!("B=1 series vs convolution at {snr} dB, {t} dB"),
            (series - conv).abs(),
            1e-9,
        ));

        let b0 = outage_exact_with(&q, TagState::NonReflecting, &eff, &acc)?.value;
        let closed = erf((q.rho_t() / (2.0 * q.rho_bar() * eff.var_sr)).sqrt());
        let quad0 = quad_outage(&q, TagState::NonReflecting, &eff, &acc)?;
        out.push(check(
            format!("B=0 closed form vs quadrature at {snr} dB, {t} dB"),
            (b0 - quad0).abs().max((b0 - closed).abs()),
            1e-10,
        ));
    }

    for x in [0.0, 0.05, 0.5, 1.5, 4.0] {
        let series = channel_pdf(x, TagState::Reflecting, &eff, &acc)?;
        let conv = quad_convolution_pdf(x, &eff, &acc)?;
        out.push(check(
            format!("B=1 density vs convolution at h = {x}"),
            (series - conv).abs(),
            1e-7,
        ));
    }

    let cfg = McConfig {
        n_samples: 200_000,
        ..McConfig::default()
    };
    for state in TagState::BOTH {
        let q = OutageQuery::new(7.0, 3.0, 1e-12)?;
        let exact = outage_exact_with(&q, state, &eff, &acc)?.value;
        let mc = mc_outage(&q, state, &eff, &cfg)?;
        out.push(check(
            format!("B={} Monte Carlo z-score at 3 dB, 7 dB", state.bit()),
            (mc.p_hat - exact).abs() / mc.stderr,
            4.5,
        ));
    }
    Ok(out)
}

pub fn run() -> anyhow::Result<()> {
    let mut failed = 0;
    for c in checks()? {
        let ok = c.value <= c.limit;
        if !ok {
            failed += 1;
        }
        println!(
            "{} {}: {:.3e} (limit {:.1e})",
            if ok { "ok  " } else { "FAIL" },
            c.name,
            c.value,
            c.limit
        );
    }
    if failed > 0 {
        anyhow::bail!("{failed} self-test check(s) failed");
    }
    Ok(())
}
