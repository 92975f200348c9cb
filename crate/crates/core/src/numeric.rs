//! Small numeric helpers shared across modules.

use num_bigint::{BigInt, Sign};
use num_traits::ToPrimitive;

/// Natural log of a positive big integer without overflowing `f64`.
pub fn ln_big(x: &BigInt) -> f64 {
    if x.sign() != Sign::Plus {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().expect("64 bits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Greatest common divisor on machine words.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Ordinary least-squares fit `y ≈ slope·x + intercept`, with the RMS residual.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}
