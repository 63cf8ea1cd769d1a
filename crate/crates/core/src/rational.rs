//! Arbitrary-precision rationals and their textual form.
//!
//! `Ratio` keeps itself reduced with a positive denominator, so the
//! invariants of the rational type hold by construction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub(crate) mod serde_vec {
    use serde::{Deserialize, Serializer};

    use super::Rational;

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum Repr {
        Str(String),
        Int(i64),
    }

    impl Repr {
        pub(crate) fn into_rational(self) -> Result<Rational, String> {
            match self {
                Repr::Str(s) => super::parse(&s).map_err(|e| e.to_string()),
                Repr::Int(i) => Ok(super::int(i)),
            }
        }
    }

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(super::format))
    }
}
