//! Helpers for exact rational values serialized as `"p/q"` strings.
//!
//! Reports and input documents never carry floats; every numeric field is a
//! reduced fraction rendered as `"p/q"` (the denominator is kept even when
//! it is 1, so `0` prints as `"0/1"`).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

/// Exact rational used throughout the crate.
pub type Rat = BigRational;

/// Renders a rational in the canonical `"p/q"` form.
pub fn to_frac_string(q: &Rat) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"` or a bare integer `"p"` into a reduced rational.
pub fn parse_frac(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let numer = BigInt::from_str(p.trim())
                .map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
            let denom = BigInt::from_str(q.trim())
                .map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
            if denom.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Rat::new(numer, denom))
        }
        None => {
            let numer =
                BigInt::from_str(s).map_err(|e| format!("bad rational literal {s:?}: {e}"))?;
            Ok(Rat::from_integer(numer))
        }
    }
}

/// Convenience constructor from machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// True when the reduced denominator is a power of two (1, 2, 4, ...).
pub fn is_dyadic(q: &Rat) -> bool {
    let mut d = q.denom().abs();
    let two = BigInt::from(2);
    while (&d % &two).is_zero() {
        d /= &two;
    }
    d.is_one()
}

/// 2^(-k) as an exact rational.
pub fn pow2_inv(k: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(2u8).pow(k))
}

/// Serde adapter: (de)serializes a [`Rat`] as a `"p/q"` string.
pub mod serde_frac {
    use super::{parse_frac, to_frac_string, Rat};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(q: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        to_frac_string(q).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        parse_frac(&s).map_err(serde::de::Error::custom)
    }
}
