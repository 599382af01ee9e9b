//! Arbitrary-precision rational scalars and small helpers.
//!
//! Every mass, coordinate and value in the crate is a [`Rat`]; no floating
//! point enters the core. Floats appear only in test oracles.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The scalar type of the whole crate: an arbitrary-precision rational.
pub type Rat = num_rational::BigRational;

/// Builds `p/q` as a [`Rat`]. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Builds the integer `n` as a [`Rat`].
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Exact integer power with a non-negative exponent.
pub fn pow(x: &Rat, k: u32) -> Rat {
    let mut acc = one();
    let mut base = x.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Ceiling of `x` as a BigInt-backed rational, for block-count choices.
pub fn ceil_to_int(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// Lossy conversion for reporting and float cross-checks.
pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to separate conversion; only reachable for huge terms.
        let n = x.numer().to_f64().unwrap_or(f64::MAX * x.numer().signum().to_f64().unwrap());
        let d = x.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Parses `"p/q"`, `"p"`, or a plain integer string into a [`Rat`].
pub fn parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
        None => {
            let p: BigInt = s.parse().ok()?;
            Some(Rat::from_integer(p))
        }
    }
}

/// Renders a [`Rat`] as `"p/q"` (or `"p"` when the denominator is 1).
pub fn render(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
