//! Special-function kernel.
//!
//! Real-argument only, restricted to the parameter ranges the outage
//! formulas need. Functions whose values span many orders of magnitude have
//! `ln_*` companions so callers can combine factors in log space.

mod bessel;
mod confluent;
mod erf;
mod gamma;

pub use bessel::{bessel_k0, bessel_k0e};
pub use confluent::{
    ln_scaled_whittaker_w_neg_k_0, ln_tricomi_psi, tricomi_psi, whittaker_w_neg_k_0, LogValue,
};
pub use erf::{erf, erfc};
pub use gamma::{
    ln_gamma, ln_lower_inc_gamma, lower_inc_gamma, regularized_lower_gamma, regularized_upper_gamma,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation budget shared by the series and quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Accuracy {
    pub abs_tol: f64,
    pub max_terms: usize,
    pub max_quad_nodes: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy {
            abs_tol: 1e-12,
            max_terms: 200,
            max_quad_nodes: 4096,
        }
    }
}

impl Accuracy {
    pub fn new(abs_tol: f64, max_terms: usize, max_quad_nodes: usize) -> Result<Self> {
        let acc = Accuracy {
            abs_tol,
            max_terms,
            max_quad_nodes,
        };
        acc.validate()?;
        Ok(acc)
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Result<Self> {
        Accuracy::new(abs_tol, self.max_terms, self.max_quad_nodes)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::domain(
                "Accuracy",
                format!("abs_tol must be positive, got {}", self.abs_tol),
            ));
        }
        if self.max_terms < 1 {
            return Err(Error::domain("Accuracy", "max_terms must be at least 1"));
        }
        if self.max_quad_nodes < 8 {
            return Err(Error::domain(
                "Accuracy",
                format!(
                    "max_quad_nodes must be at least 8, got {}",
                    self.max_quad_nodes
                ),
            ));
        }
        Ok(())
    }
}

/// `(ln Γ(k + 1/2), ln (2k)!)`.
pub(crate) fn ln_gamma_half_and_factorial(k: usize) -> (f64, f64) {
    let kf = k as f64;
    (
        gamma::ln_gamma_unchecked(kf + 0.5),
        gamma::ln_gamma_unchecked(2.0 * kf + 1.0),
    )
}

/// `ln(e^a - e^b)` for `a >= b`, without forming either exponential.
pub(crate) fn ln_diff_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + ln_one_minus_exp(b - a)
}

/// `ln(1 - e^x)` for `x <= 0`.
pub(crate) fn ln_one_minus_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)`.
pub(crate) fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}
