//! Gaussian rationals: the exact coefficient field for everything downstream.
//!
//! A `Scalar` is `re + im*i` with both parts arbitrary-precision rationals in
//! canonical reduced form (that is what `BigRational` maintains). Arithmetic
//! is exact; there is no floating point anywhere in this crate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// Real rational `n/d`. Panics when `d == 0`.
    pub fn rational(n: i64, d: i64) -> Self {
        Scalar::new(
            BigRational::new(BigInt::from(n), BigInt::from(d)),
            BigRational::zero(),
        )
    }

    /// Imaginary rational `(n/d) i`.
    pub fn imaginary(n: i64, d: i64) -> Self {
        Scalar::new(
            BigRational::zero(),
            BigRational::new(BigInt::from(n), BigInt::from(d)),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Scalar {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 as a rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::Invalid("division by zero scalar".into()));
        }
        let n = self.norm_sq();
        Ok(Scalar::new(&self.re / &n, -(&self.im / &n)))
    }

    /// Sign of a real scalar: -1, 0 or 1. Panics on non-real input.
    pub fn real_sign(&self) -> i8 {
        assert!(self.is_real(), "real_sign on non-real scalar {self}");
        if self.re.is_zero() {
            0
        } else if self.re.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn parse(s: &str) -> Result<Scalar> {
        s.parse()
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

// Total order: lexicographic on (re, im). Mathematically arbitrary, but it
// makes spectra and maps keyed by eigenvalues deterministic.
impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        if !self.re.is_zero() {
            out.push_str(&fmt_rational(&self.re));
        }
        if !self.im.is_zero() {
            let mag = self.im.abs();
            let sign = if self.im.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if self.im.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(sign);
            }
            if !mag.is_one() {
                out.push_str(&fmt_rational(&mag));
            }
            out.push('i');
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// One additive term of the scalar grammar: a rational, optionally imaginary.
fn parse_term(term: &str) -> Result<(BigRational, bool)> {
    let err = |s: &str| Error::Parse(format!("malformed scalar term {s:?}"));
    let (neg, rest) = match term.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, term.strip_prefix('+').unwrap_or(term)),
    };
    if rest.is_empty() {
        return Err(err(term));
    }
    if rest == "i" {
        let one = BigRational::one();
        return Ok((if neg { -one } else { one }, true));
    }
    let (body, imag) = match rest.strip_suffix('i') {
        Some(b) => (b, true),
        None => (rest, false),
    };
    if body.is_empty() {
        return Err(err(term));
    }
    let (num_s, den_s) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits_only = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits_only(num_s) {
        return Err(err(term));
    }
    let num: BigInt = num_s.parse().map_err(|_| err(term))?;
    let den: BigInt = match den_s {
        Some(d) => {
            if !digits_only(d) {
                return Err(err(term));
            }
            d.parse().map_err(|_| err(term))?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {term:?}")));
    }
    let mut r = BigRational::new(num, den);
    if neg {
        r = -r;
    }
    Ok((r, imag))
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `a/b`, `-a/b`, `a/b+c/di`, `i`, `-i`, `0` and friends;
    /// denominators may be omitted. Whitespace around the string is ignored.
    fn from_str(s: &str) -> Result<Scalar> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        // Split at the first interior sign to get at most two terms.
        let bytes = s.as_bytes();
        let mut split = None;
        for (k, &b) in bytes.iter().enumerate().skip(1) {
            if b == b'+' || b == b'-' {
                split = Some(k);
                break;
            }
        }
        let terms: Vec<&str> = match split {
            Some(k) => vec![&s[..k], &s[k..]],
            None => vec![s],
        };
        let mut re: Option<BigRational> = None;
        let mut im: Option<BigRational> = None;
        for t in terms {
            let (val, is_im) = parse_term(t)?;
            let slot = if is_im { &mut im } else { &mut re };
            if slot.is_some() {
                return Err(Error::Parse(format!("repeated component in scalar {s:?}")));
            }
            *slot = Some(val);
        }
        Ok(Scalar::new(
            re.unwrap_or_else(BigRational::zero),
            im.unwrap_or_else(BigRational::zero),
        ))
    }
}

/// Exact square root of a non-negative rational, if it stays rational.
pub fn sqrt_rational(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Scalar {
        Scalar::parse(text).unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        for text in [
            "0", "1", "-1", "i", "-i", "2i", "1/2", "-3/4", "1/2i", "1+i", "1-i", "-1/2+3/4i",
            "5-2/3i", "-7/5-i",
        ] {
            let v = s(text);
            assert_eq!(v.to_string(), text, "printer is canonical on {text}");
            assert_eq!(s(&v.to_string()), v);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        for text in ["", "x", "1//2", "1/0", "i5", "1+2", "i+i", "1+1", "--1", "1/2+", "2ii"] {
            assert!(Scalar::parse(text).is_err(), "{text:?} should not parse");
        }
    }

    #[test]
    fn field_arithmetic() {
        let a = s("1/2+3/4i");
        let b = s("-2+i");
        assert_eq!(&a + &b, s("-3/2+7/4i"));
        assert_eq!(&a * &b, s("-7/4-i"));
        assert_eq!(&(&a / &b) * &b, a);
        assert_eq!(&a - &a, Scalar::zero());
        let inv = a.inv().unwrap();
        assert_eq!(&a * &inv, Scalar::one());
        assert_eq!(Scalar::i().pow(2), Scalar::from_int(-1));
    }

    #[test]
    fn conjugation_and_norm() {
        let a = s("3/5+2i");
        assert_eq!((&a * &a.conj()).re(), &a.norm_sq());
        assert!((&a * &a.conj()).is_real());
    }

    #[test]
    fn rational_square_roots() {
        assert_eq!(
            sqrt_rational(s("9/4").re()),
            Some(s("3/2").re().clone())
        );
        assert_eq!(sqrt_rational(s("2").re()), None);
        assert_eq!(sqrt_rational(s("-1").re()), None);
        assert_eq!(sqrt_rational(s("0").re()), Some(BigRational::zero()));
    }
}
