//! Independent ground truth: Monte Carlo simulation of the effective
//! channel and quadrature of the densities.

mod monte_carlo;
mod reference;
pub mod rng;

pub use monte_carlo::{
    chi_square_test, mc_channel_histogram, mc_outage, sample_effective_channel, BinSpec, ChiSquare,
    Histogram, McConfig, McEstimate,
};
pub use reference::{
    bin_probabilities, convolution_outage, quad_convolution_pdf, quad_outage, quad_outage_between,
    quad_outage_with_error,
};
