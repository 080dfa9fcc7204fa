use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;

// Minimax rational approximation of √x·eˣ·K₀(x) in 1/x, valid for x ≥ 1.
const ASYMPT_P: [f64; 12] = [
    1.253_314_137_315_500_3,
    32.783_734_412_813_85,
    343.256_262_792_778_84,
    1_875.598_840_074_767,
    5_853.199_060_535_489,
    10_746.276_640_127_457,
    11_551.328_671_908_634,
    7_023.742_322_961_081,
    2_250.595_730_952_708,
    333.174_560_658_973_63,
    17.425_778_081_168_55,
    0.148_087_500_814_148_43,
];
const ASYMPT_Q: [f64; 12] = [
    1.0,
    26.282_635_533_445_763,
    277.093_889_422_93,
    1_529.373_337_309_839_8,
    4_843.678_510_390_914,
    9_089.788_386_140_595,
    10_098.613_689_756_849,
    6_460.186_822_803_354_5,
    2_243.738_919_495_703,
    380.226_818_234_308_55,
    25.632_202_808_225_546,
    0.421_770_352_354_103_8,
];

fn check(x: f64) -> Result<()> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "bessel_k0",
            format!("argument must be positive, got {x}"),
        ));
    }
    Ok(())
}

/// Modified Bessel function of the second kind, order zero.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check(x)?;
    if x <= SERIES_LIMIT {
        Ok(k0_series(x))
    } else {
        Ok(k0e_rational(x) * (-x).exp())
    }
}

/// Exponentially scaled `eˣ·K₀(x)`.
pub fn bessel_k0e(x: f64) -> Result<f64> {
    check(x)?;
    if x <= SERIES_LIMIT {
        Ok(k0_series(x) * x.exp())
    } else {
        Ok(k0e_rational(x))
    }
}

// K₀(x) = -(ln(x/2) + γ)·I₀(x) + Σ_{k≥1} H_k (x²/4)^k / (k!)²
fn k0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += harmonic * term;
        if term < f64::EPSILON * 1e-3 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

fn k0e_rational(x: f64) -> f64 {
    let r = 1.0 / x;
    let num = ASYMPT_P.iter().rev().fold(0.0, |acc, &c| acc * r + c);
    let den = ASYMPT_Q.iter().rev().fold(0.0, |acc, &c| acc * r + c);
    num / den / x.sqrt()
}
