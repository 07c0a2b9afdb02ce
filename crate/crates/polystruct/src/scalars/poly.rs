//! Univariate polynomials over the Gaussian rationals, plus the two root
//! routines the spectral layer is built on: exact partial fractions and
//! spectrum extraction for even/odd real polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalars::scalar::{sqrt_rational, Scalar};

/// Coefficients in ascending degree; the top coefficient of a nonzero
/// polynomial is nonzero. The zero polynomial is the empty list and its
/// degree is `None`.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn x() -> Self {
        Poly::new(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(deg: usize, c: Scalar) -> Self {
        let mut coeffs = vec![Scalar::zero(); deg + 1];
        coeffs[deg] = c;
        Poly::new(coeffs)
    }

    /// `x - root`
    pub fn linear(root: &Scalar) -> Self {
        Poly::new(vec![-root, Scalar::one()])
    }

    pub fn from_roots(roots: &[(Scalar, usize)]) -> Self {
        let mut p = Poly::one();
        for (root, mult) in roots {
            for _ in 0..*mult {
                p = &p * &Poly::linear(root);
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(Scalar::is_one)
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_real)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * &Scalar::from_int((k + 1) as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients of `p(center + t)` as a polynomial in `t`.
    pub fn taylor_at(&self, center: &Scalar) -> Poly {
        let shift = Poly::new(vec![center.clone(), Scalar::one()]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &shift) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Exact Euclidean division: `self = q * rhs + r` with `deg r < deg rhs`.
    pub fn divrem(&self, rhs: &Poly) -> Result<(Poly, Poly)> {
        let d_rhs = rhs.degree().ok_or(Error::ZeroPolyDivision)?;
        let lead_inv = rhs.leading().unwrap().inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() < d_rhs + 1 {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Scalar::zero(); rem.len() - d_rhs];
        for k in (d_rhs..rem.len()).rev() {
            let c = &rem[k] * &lead_inv;
            if !c.is_zero() {
                for j in 0..=d_rhs {
                    let t = &c * &rhs.coeffs[j];
                    rem[k - d_rhs + j] -= &t;
                }
            }
            quot[k - d_rhs] = c;
        }
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, rhs: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p(-x)`
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 0 { c.clone() } else { -c })
                .collect(),
        )
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Scalar::is_zero)
    }

    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(Scalar::is_zero)
    }
}

impl std::ops::Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero);
            if let Some(b) = rhs.coeffs.get(k) {
                c += b;
            }
            out.push(c);
        }
        Poly::new(out)
    }
}

impl std::ops::Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl std::ops::Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let t = a * b;
                out[i + j] += &t;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let var = match k {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{k}"),
            };
            let coeff = if k > 0 && c.is_one() {
                String::new()
            } else if k > 0 && *c == Scalar::from_int(-1) {
                "-".into()
            } else if c.is_real() || c.re().is_zero() {
                c.to_string()
            } else {
                format!("({c})")
            };
            parts.push(format!("{coeff}{var}"));
        }
        let mut out = String::new();
        for (k, p) in parts.iter().enumerate() {
            if k == 0 {
                out.push_str(p);
            } else if let Some(stripped) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Exact partial fraction data for `1/P`: the map `(lambda, i) -> a_{lambda,i}`
/// so that `1/P(x) = sum over lambda, i of a_{lambda,i} / (x-lambda)^i`.
///
/// `roots` must be exactly the root multiset of the monic `P`; this is checked
/// by reconstructing `P` from it.
pub fn partial_fractions(
    p: &Poly,
    roots: &[(Scalar, usize)],
) -> Result<Vec<(Scalar, Vec<Scalar>)>> {
    if !p.is_monic() {
        return Err(Error::Invalid(format!("partial fractions of non-monic {p}")));
    }
    let rebuilt = Poly::from_roots(roots);
    if &rebuilt != p {
        return Err(Error::RootsMismatch(format!(
            "product of (x-lambda)^m is {rebuilt}, expected {p}"
        )));
    }
    let mut out = Vec::new();
    for (lambda, mult) in roots {
        let m = *mult;
        // P = (x-lambda)^m * Q with Q(lambda) != 0; the coefficients a_{lambda,i}
        // are the Taylor coefficients of 1/Q at lambda: invert the power series.
        let factor = Poly::linear(lambda).pow(m);
        let (q, r) = p.divrem(&factor)?;
        debug_assert!(r.is_zero());
        let c = q.taylor_at(lambda);
        let c0_inv = c.coeff(0).inv()?;
        let mut inv_series = vec![Scalar::zero(); m];
        inv_series[0] = c0_inv.clone();
        for k in 1..m {
            let mut acc = Scalar::zero();
            for j in 1..=k {
                let t = &c.coeff(j) * &inv_series[k - j];
                acc += &t;
            }
            inv_series[k] = -(&acc * &c0_inv);
        }
        // a_{lambda,i} = coefficient of t^{m-i} in 1/Q(lambda+t); store i = 1..m.
        let a: Vec<Scalar> = (1..=m).map(|i| inv_series[m - i].clone()).collect();
        out.push((lambda.clone(), a));
    }
    debug_assert!({
        let mut total = Poly::zero();
        for (lambda, a) in &out {
            for (idx, coeff) in a.iter().enumerate() {
                let i = idx + 1;
                let (q, _) = p.divrem(&Poly::linear(lambda).pow(i)).unwrap();
                total = &total + &q.scale(coeff);
            }
        }
        total == Poly::one()
    });
    Ok(out)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    if n.is_zero() {
        return vec![];
    }
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    while &(&d * &d) <= &n {
        if n.is_multiple_of(&d) {
            let mut e = 0u32;
            while n.is_multiple_of(&d) {
                n /= &d;
                e += 1;
            }
            primes.push((d.clone(), e));
        }
        d += 1;
    }
    if n > BigInt::one() {
        primes.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs
}

/// All rational roots of a rational polynomial, with multiplicities, plus the
/// remaining rootless (over the rationals) factor.
fn rational_roots(p: &Poly) -> (Vec<(BigRational, usize)>, Poly) {
    let mut cur = p.clone();
    let mut found: Vec<(BigRational, usize)> = Vec::new();
    'outer: loop {
        let deg = match cur.degree() {
            None | Some(0) => break,
            Some(d) => d,
        };
        // Clear denominators to get an integer polynomial.
        let mut lcm = BigInt::one();
        for c in cur.coeffs() {
            lcm = lcm.lcm(c.re().denom());
        }
        let int_coeffs: Vec<BigInt> = cur
            .coeffs()
            .iter()
            .map(|c| (c.re() * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let a0 = &int_coeffs[0];
        let alead = &int_coeffs[deg];
        if a0.is_zero() {
            // x divides
            let root = BigRational::zero();
            let (q, r) = cur.divrem(&Poly::x()).unwrap();
            debug_assert!(r.is_zero());
            cur = q;
            push_root(&mut found, root);
            continue;
        }
        for num in divisors(a0) {
            for den in divisors(alead) {
                for sign in [1i64, -1] {
                    let cand = BigRational::new(&num * BigInt::from(sign), den.clone());
                    let cand_s = Scalar::new(cand.clone(), BigRational::zero());
                    if cur.eval(&cand_s).is_zero() {
                        let (q, r) = cur.divrem(&Poly::linear(&cand_s)).unwrap();
                        debug_assert!(r.is_zero());
                        cur = q;
                        push_root(&mut found, cand);
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    (found, cur)
}

fn push_root(found: &mut Vec<(BigRational, usize)>, root: BigRational) {
    for (r, m) in found.iter_mut() {
        if *r == root {
            *m += 1;
            return;
        }
    }
    found.push((root, 1));
}

/// Root multiset over the Gaussian rationals of a monic even-or-odd real
/// polynomial. The spectrum of a pairing-skew endomorphism is symmetric under
/// negation, so its minimal polynomial is always of this shape: `x^k Q(x^2)`.
///
/// Roots are recovered by finding the rational roots `y` of `Q` and taking
/// exact square roots; a rational `y` that is neither `r^2` nor `-r^2`, or a
/// nontrivial rootless factor of `Q`, yields `UnsupportedSpectrum` naming the
/// offending factor so callers can rescale their structure.
pub fn spectrum_extract(p: &Poly) -> Result<Vec<(Scalar, usize)>> {
    if !p.is_monic() {
        return Err(Error::Invalid(format!("spectrum of non-monic {p}")));
    }
    if !p.has_real_coeffs() {
        return Err(Error::Invalid(format!("spectrum of non-real {p}")));
    }
    let k = p
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .expect("monic polynomial is nonzero");
    let reduced = Poly::new(p.coeffs()[k..].to_vec());
    if !reduced.is_even() {
        return Err(Error::Invalid(format!("{p} is neither even nor odd")));
    }
    // reduced(x) = Q(x^2)
    let q = Poly::new(reduced.coeffs().iter().cloned().step_by(2).collect());
    let (ys, rest) = rational_roots(&q);
    if rest.degree().unwrap_or(0) > 0 {
        return Err(Error::UnsupportedSpectrum(format!(
            "factor {rest} of Q(y) (with x^2 = y) has no rational root"
        )));
    }
    let mut spectrum: Vec<(Scalar, usize)> = Vec::new();
    if k > 0 {
        spectrum.push((Scalar::zero(), k));
    }
    for (y, m) in ys {
        let lambda = if y.is_positive() {
            match sqrt_rational(&y) {
                Some(r) => Scalar::new(r, BigRational::zero()),
                None => {
                    return Err(Error::UnsupportedSpectrum(format!(
                        "factor (y - {}) of Q(y): root +-sqrt({}) leaves Q(i)",
                        fmt_rat(&y),
                        fmt_rat(&y)
                    )))
                }
            }
        } else {
            let neg = -&y;
            match sqrt_rational(&neg) {
                Some(r) => Scalar::new(BigRational::zero(), r),
                None => {
                    return Err(Error::UnsupportedSpectrum(format!(
                        "factor (y - {}) of Q(y): root +-sqrt({}) leaves Q(i)",
                        fmt_rat(&y),
                        fmt_rat(&y)
                    )))
                }
            }
        };
        spectrum.push((lambda.clone(), m));
        spectrum.push((-&lambda, m));
    }
    spectrum.sort_by(|a, b| a.0.cmp(&b.0));
    debug_assert_eq!(&Poly::from_roots(&spectrum), p);
    Ok(spectrum)
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
