//! Lossless hex-float strings for certificate endpoints.
//!
//! Interval endpoints must round-trip exactly through JSON, so they are
//! written as C99-style hex floats (`-0x1.5bf0a8b145769p+1`) rather than
//! decimal. This module also provides the `serde` impls for [`Interval`],
//! which serialize as a two-element `[lo, hi]` array of such strings.

use std::fmt;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::interval::Interval;

/// Render a finite or infinite `f64` as a hex-float string (round-trips via
/// [`parse_hex`]).
pub fn to_hex(x: f64) -> String {
    if x.is_nan() {
        panic!("NaN has no place in a certificate");
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x == 0.0 {
        return format!("{sign}0x0p+0");
    }
    if x.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        // subnormal: value = 0x0.{frac} * 2^-1022
        format!("{sign}0x0.{frac:013x}p-1022")
    } else {
        let exp = exp_bits - 1023;
        format!("{sign}0x1.{frac:013x}p{exp:+}")
    }
}

/// Parse a string produced by [`to_hex`].
pub fn parse_hex(s: &str) -> Result<f64, String> {
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s),
    };
    if rest == "inf" {
        return Ok(sign * f64::INFINITY);
    }
    let rest = rest
        .strip_prefix("0x")
        .ok_or_else(|| format!("missing 0x prefix in {s:?}"))?;
    let (mantissa, exp) = rest
        .split_once(['p', 'P'])
        .ok_or_else(|| format!("missing exponent in {s:?}"))?;
    let exp: i64 = exp
        .trim_start_matches('+')
        .parse()
        .map_err(|e| format!("bad exponent in {s:?}: {e}"))?;
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let mut mant: u128 = u128::from_str_radix(int_part, 16).map_err(|e| e.to_string())?;
    let mut shift = 0i64;
    for c in frac_part.chars() {
        let d = c.to_digit(16).ok_or_else(|| format!("bad digit {c:?}"))? as u128;
        mant = mant
            .checked_mul(16)
            .and_then(|m| m.checked_add(d))
            .ok_or_else(|| format!("mantissa overflow in {s:?}"))?;
        shift += 4;
    }
    if mant == 0 {
        return Ok(sign * 0.0);
    }
    // value = mant * 2^(exp - shift), exactly representable by construction
    let mut x = mant as f64;
    let mut e = exp - shift;
    // apply the exponent in safe chunks to avoid premature overflow/underflow
    while e > 0 {
        let step = e.min(512);
        x *= f64::powi(2.0, step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(512);
        x *= f64::powi(2.0, -(step as i32));
        e += step;
    }
    Ok(sign * x)
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&to_hex(self.lo()))?;
        seq.serialize_element(&to_hex(self.hi()))?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Interval, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Interval;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a [lo, hi] pair of hex-float strings")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Interval, A::Error> {
                let lo: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let hi: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let lo = parse_hex(&lo).map_err(de::Error::custom)?;
                let hi = parse_hex(&hi).map_err(de::Error::custom)?;
                Interval::try_new(lo, hi).map_err(de::Error::custom)
            }
        }
        deserializer.deserialize_seq(V)
    }
}

/// A plain `f64` wrapper that serializes as a hex string (for scalar fields
/// that must round-trip exactly, like witness times).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HexF64(pub f64);

impl Serialize for HexF64 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        to_hex(self.0).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HexF64 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<HexF64, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_hex(&s).map(HexF64).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(to_hex(1.0), "0x1.0000000000000p+0");
        assert_eq!(to_hex(-2.0), "-0x1.0000000000000p+1");
        assert_eq!(to_hex(0.0), "0x0p+0");
        assert_eq!(parse_hex("0x1.8p+1").unwrap(), 3.0);
    }

    #[test]
    fn round_trip_exact() {
        let samples = [
            0.0,
            -0.0,
            1.0,
            0.1,
            -1.0 / 3.0,
            2f64.sqrt(),
            f64::MIN_POSITIVE,
            f64::MIN_POSITIVE / 8.0, // subnormal
            f64::MAX,
            -f64::MAX,
            f64::INFINITY,
            f64::NEG_INFINITY,
            4.3373e0,
            1e-300,
            1e300,
        ];
        for &x in &samples {
            let s = to_hex(x);
            let back = parse_hex(&s).unwrap();
            assert_eq!(x.to_bits(), back.to_bits(), "{x} -> {s} -> {back}");
        }
    }

    #[test]
    fn round_trip_random_bit_patterns() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..10_000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = f64::from_bits(state);
            if x.is_nan() {
                continue;
            }
            let back = parse_hex(&to_hex(x)).unwrap();
            assert_eq!(x.to_bits(), back.to_bits());
        }
    }

    #[test]
    fn interval_serde_round_trip() {
        let iv = Interval::new(-1.0 / 3.0, 2f64.sqrt());
        let json = serde_json::to_string(&iv).unwrap();
        let back: Interval = serde_json::from_str(&json).unwrap();
        assert_eq!(back.lo().to_bits(), iv.lo().to_bits());
        assert_eq!(back.hi().to_bits(), iv.hi().to_bits());
    }

    #[test]
    fn malformed_interval_rejected() {
        let r: Result<Interval, _> = serde_json::from_str("[\"0x1.0p+1\", \"0x1.0p+0\"]");
        assert!(r.is_err());
    }
}
