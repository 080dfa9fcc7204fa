//! Fixed 50-point comparison grids for every special function.

use backscatter_outage::specfun::{
    bessel_k0, erf, erfc, ln_gamma, lower_inc_gamma, tricomi_psi, whittaker_w_neg_k_0,
};
use backscatter_outage::Accuracy;

use super::{
    grid, log_grid, maclaurin_erf, quad_erfc, quad_k0, quad_lower_gamma, quad_tricomi,
    stirling_ln_gamma,
};

pub const GRID_POINTS: usize = 50;

#[derive(Debug, Clone)]
pub struct GridReport {
    pub name: &'static str,
    pub oracle: &'static str,
    pub points: usize,
    pub max_err: f64,
    pub tol: f64,
    pub worst_at: String,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.max_err <= self.tol
    }
}

struct Collector {
    report: GridReport,
}

impl Collector {
    fn new(name: &'static str, oracle: &'static str, tol: f64) -> Self {
        Collector {
            report: GridReport {
                name,
                oracle,
                points: 0,
                max_err: 0.0,
                tol,
                worst_at: String::new(),
            },
        }
    }

    fn record(&mut self, err: f64, at: impl FnOnce() -> String) {
        self.report.points += 1;
        // NaN must count as a failure.
        if !(err <= self.report.max_err) {
            self.report.max_err = if err.is_nan() { f64::INFINITY } else { err };
            self.report.worst_at = at();
        }
    }
}

fn scaled_err(v: f64, r: f64) -> f64 {
    (v - r).abs() / r.abs().max(1.0)
}

fn rel(v: f64, r: f64) -> f64 {
    ((v - r) / r).abs()
}

pub fn erf_grid() -> GridReport {
    let mut c = Collector::new("erf", "Maclaurin series", 1e-12);
    for x in grid(-2.9, 2.9, GRID_POINTS) {
        c.record((erf(x) - maclaurin_erf(x)).abs(), || format!("x={x}"));
    }
    c.report
}

pub fn erfc_grid() -> GridReport {
    let mut c = Collector::new("erfc", "exp-sinh quadrature (relative)", 1e-12);
    for x in grid(0.25, 9.0, GRID_POINTS) {
        c.record(rel(erfc(x), quad_erfc(x)), || format!("x={x}"));
    }
    c.report
}

pub fn ln_gamma_grid() -> GridReport {
    let mut c = Collector::new("ln_gamma", "Stirling series with recurrence", 1e-12);
    for a in log_grid(0.05, 80.0, GRID_POINTS) {
        let v = ln_gamma(a).unwrap_or(f64::NAN);
        c.record(scaled_err(v, stirling_ln_gamma(a)), || format!("a={a}"));
    }
    c.report
}

pub fn lower_gamma_grid() -> GridReport {
    let mut c = Collector::new("lower_inc_gamma", "tanh-sinh quadrature (relative)", 1e-12);
    let shapes = log_grid(0.5, 20.0, GRID_POINTS);
    for (i, &a) in shapes.iter().enumerate() {
        // Sweep x/a across both the series and continued-fraction regimes.
        let x = a * (0.1 + 2.9 * ((i * 7) % GRID_POINTS) as f64 / (GRID_POINTS - 1) as f64);
        let v = lower_inc_gamma(a, x).unwrap_or(f64::NAN);
        c.record(rel(v, quad_lower_gamma(a, x)), || format!("a={a} x={x}"));
    }
    c.report
}

pub fn k0_grid() -> GridReport {
    let mut c = Collector::new("bessel_k0", "cosh integral, exp-sinh quadrature", 1e-10);
    for x in log_grid(0.01, 40.0, GRID_POINTS) {
        let v = bessel_k0(x).unwrap_or(f64::NAN);
        c.record(rel(v, quad_k0(x)), || format!("x={x}"));
    }
    c.report
}

pub fn tricomi_grid() -> GridReport {
    let acc = Accuracy::default();
    let mut c = Collector::new(
        "tricomi_psi",
        "defining integral, exp-sinh quadrature",
        1e-10,
    );
    let shapes = log_grid(0.5, 12.0, GRID_POINTS);
    let args = log_grid(0.05, 50.0, GRID_POINTS);
    for (i, &a) in shapes.iter().enumerate() {
        let z = args[(i * 13) % GRID_POINTS];
        let b = [0.0, 1.0, 0.5][i % 3];
        let v = tricomi_psi(a, b, z, &acc).unwrap_or(f64::NAN);
        c.record(rel(v, quad_tricomi(a, b, z)), || {
            format!("a={a} b={b} z={z}")
        });
    }
    c.report
}

pub fn whittaker_grid() -> GridReport {
    let acc = Accuracy::default();
    let mut c = Collector::new(
        "whittaker_w_neg_k_0",
        "defining integral of Ψ(k+1/2, 1, ν)",
        1e-9,
    );
    let nus = [0.340_136_054_421_768_7, 0.05, 1.0, 4.0, 20.0];
    for k in 0..GRID_POINTS as u32 {
        let nu = nus[k as usize % nus.len()];
        let v = whittaker_w_neg_k_0(k, nu, &acc)
            .map(|w| w.value())
            .unwrap_or(f64::NAN);
        let o = (-0.5 * nu).exp() * nu.sqrt() * quad_tricomi(k as f64 + 0.5, 1.0, nu);
        c.record(rel(v, o), || format!("k={k} nu={nu}"));
    }
    c.report
}

pub fn all() -> Vec<GridReport> {
    vec![
        erf_grid(),
        erfc_grid(),
        ln_gamma_grid(),
        lower_gamma_grid(),
        k0_grid(),
        tricomi_grid(),
        whittaker_grid(),
    ]
}
