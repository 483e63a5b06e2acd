//! Exact rational scalars and small vector helpers.
//!
//! All quantities in the crate are [`Rational`]s: arbitrary-precision
//! numerator and positive denominator, always reduced.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

/// A point or vector with rational coordinates.
pub type Point = Vec<Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn point(coords: &[i64]) -> Point {
    coords.iter().map(|&c| rat(c)).collect()
}

/// Parses `"p/q"`, `"p"` or a decimal-free integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rational::from_integer(n))
    }
}

/// Renders `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn fmt_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(fmt_rational).collect();
    format!("({})", parts.join(","))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> Point {
    a.iter().map(|x| x * s).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Scales a nonzero rational vector to the primitive integer vector on the
/// same ray (positive multiple, coordinates with gcd 1).
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Same ray as `v`, primitive integer entries, returned as rationals.
pub fn primitive(v: &[Rational]) -> Point {
    primitive_integer(v)
        .into_iter()
        .map(Rational::from_integer)
        .collect()
}

pub fn to_rationals(v: &[BigInt]) -> Point {
    v.iter().cloned().map(Rational::from_integer).collect()
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-6/4"), Some(ratio(-3, 2)));
        assert_eq!(parse_rational("7"), Some(rat(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(fmt_rational(&ratio(4, 2)), "2");
        assert_eq!(fmt_rational(&ratio(-1, 3)), "-1/3");
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![ratio(2, 3), ratio(-4, 3), rat(0)];
        assert_eq!(primitive(&v), point(&[1, -2, 0]));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(factorial(4), BigInt::from(24));
    }
}
