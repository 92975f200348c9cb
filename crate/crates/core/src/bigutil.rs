//! Small conversions between arbitrary-precision integers and `f64`.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

const LN_2: f64 = std::f64::consts::LN_2;

/// Natural log of a positive big integer without overflowing through `f64`.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * LN_2
}

/// `num / den` rounded to `f64`, for any magnitudes.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if den.is_zero() {
        return f64::NAN;
    }
    if num.is_zero() {
        return 0.0;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let n = num.magnitude();
    let d = den.magnitude();
    // Scale so the integer quotient carries ~64 significant bits.
    let shift = d.bits() as i64 - n.bits() as i64 + 64;
    let q = if shift >= 0 {
        (n << shift as u64) / d
    } else {
        (n >> (-shift) as u64) / d
    };
    let mag = q.to_f64().unwrap_or(f64::INFINITY) * pow2(-shift);
    if negative {
        -mag
    } else {
        mag
    }
}

/// 2^e as `f64`, saturating to 0 or infinity outside the exponent range.
pub fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1074 {
        0.0
    } else if e < -1022 {
        // subnormal result
        pow2_normal(e + 64) * pow2_normal(-64)
    } else {
        pow2_normal(e)
    }
}

fn pow2_normal(e: i64) -> f64 {
    f64::from_bits(((e + 1023) as u64) << 52)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_of_huge_integer() {
        let n = BigUint::from(1u8) << 5000u32;
        let got = ln_biguint(&n);
        assert!((got - 5000.0 * LN_2).abs() < 1e-9);
        assert!((ln_biguint(&BigUint::from(10u8)) - 10f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ratio_matches_float_division() {
        let r = ratio_to_f64(&BigInt::from(355), &BigInt::from(113));
        assert_eq!(r, 355.0 / 113.0);
        let r = ratio_to_f64(&BigInt::from(-1), &BigInt::from(3));
        assert_eq!(r, -1.0 / 3.0);
        let big = BigInt::from(1) << 3000u32;
        let r = ratio_to_f64(&(big.clone() * 3), &(big * 4));
        assert_eq!(r, 0.75);
    }

    #[test]
    fn pow2_range() {
        assert_eq!(pow2(0), 1.0);
        assert_eq!(pow2(-3), 0.125);
        assert_eq!(pow2(1024), f64::INFINITY);
        assert_eq!(pow2(-2000), 0.0);
    }
}
