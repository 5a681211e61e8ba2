//! Exact coefficient fields and the `(q, μ)` parameter bookkeeping.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// An exact field. Equality is representation equality.
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// `"rational"` or `"modular"`.
    const BACKEND: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Image of a rational number; fails when the denominator vanishes in the field.
    fn from_rational(r: &BigRational) -> Result<Self>;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Parses the serialized form written by `Display`.
    fn parse(s: &str) -> Result<Self>;
    /// Characteristic of the field, `None` for the rationals.
    fn modulus() -> Option<u64>;

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a.mul_ref(b);
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn try_inv(&self) -> Result<Self> {
        self.inv()
            .ok_or_else(|| Error::DivisionByZero(format!("inverse of {self}")))
    }

    fn try_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.try_inv()?))
    }

    /// Integer power; negative exponents need an invertible base.
    fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.try_inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&b);
            }
            b = b.mul_ref(&b);
            e >>= 1;
        }
        Ok(acc)
    }
}

/// Exact rational number; serializes as `"num/den"`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero(format!("{num}/0")));
        }
        Ok(Rational(BigRational::new(num.into(), den.into())))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

macro_rules! forward_ops {
    ($t:ty, $inner:tt) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                Rational(self.$inner + o.$inner)
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                Rational(self.$inner - o.$inner)
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                Rational(self.$inner * o.$inner)
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                Rational(-self.$inner)
            }
        }
        impl AddAssign for $t {
            fn add_assign(&mut self, o: $t) {
                self.$inner += o.$inner;
            }
        }
        impl SubAssign for $t {
            fn sub_assign(&mut self, o: $t) {
                self.$inner -= o.$inner;
            }
        }
        impl MulAssign for $t {
            fn mul_assign(&mut self, o: $t) {
                self.$inner *= o.$inner;
            }
        }
    };
}
forward_ops!(Rational, 0);

/// Parses `"n"` or `"n/d"` into a big rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let d = BigInt::from_str(d).map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

impl Field for Rational {
    const BACKEND: &'static str = "rational";

    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn from_i64(v: i64) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }
    fn from_rational(r: &BigRational) -> Result<Self> {
        Ok(Rational(r.clone()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }
    fn parse(s: &str) -> Result<Self> {
        parse_rational(s).map(Rational)
    }
    fn modulus() -> Option<u64> {
        None
    }
    fn mul_ref(&self, other: &Self) -> Self {
        Rational(&self.0 * &other.0)
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        if a.0.is_zero() || b.0.is_zero() {
            return;
        }
        self.0 += &a.0 * &b.0;
    }
}

/// Element of the prime field `Z/P`; serializes as `"r mod P"`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: u64) -> Self {
        Fp(v % P)
    }
    pub fn value(self) -> u64 {
        self.0
    }
    fn mulmod(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }
    fn powmod(mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64 % P;
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::mulmod(acc, b);
            }
            b = Self::mulmod(b, b);
            e >>= 1;
        }
        acc
    }
    fn from_bigint(v: &BigInt) -> Self {
        let p = BigInt::from(P);
        let r = v.mod_floor(&p);
        Fp(r.to_u64().expect("reduced residue fits in u64"))
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.0, P)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let s = self.0 as u128 + o.0 as u128;
        Fp((s % P as u128) as u64)
    }
}
impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        if self.0 >= o.0 {
            Fp(self.0 - o.0)
        } else {
            Fp(P - (o.0 - self.0))
        }
    }
}
impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(Self::mulmod(self.0, o.0))
    }
}
impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Fp(P - self.0)
        }
    }
}
impl<const P: u64> AddAssign for Fp<P> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}
impl<const P: u64> SubAssign for Fp<P> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}
impl<const P: u64> MulAssign for Fp<P> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<const P: u64> Field for Fp<P> {
    const BACKEND: &'static str = "modular";

    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1 % P)
    }
    fn from_i64(v: i64) -> Self {
        Self::from_bigint(&BigInt::from(v))
    }
    fn from_rational(r: &BigRational) -> Result<Self> {
        let d = Self::from_bigint(r.denom());
        let dinv = d
            .inv()
            .ok_or_else(|| Error::DivisionByZero(format!("denominator of {r} vanishes mod {P}")))?;
        Ok(Self::from_bigint(r.numer()) * dinv)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(Fp(Self::powmod(self.0, P - 2)))
        }
    }
    fn parse(s: &str) -> Result<Self> {
        match s.split_once("mod") {
            Some((r, p)) => {
                let p: u64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
                if p != P {
                    return Err(Error::Parse(format!(
                        "modulus {p} does not match field {P}"
                    )));
                }
                let r: u64 = r
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad residue in {s:?}")))?;
                if r >= P {
                    return Err(Error::Parse(format!("residue {r} not reduced mod {P}")));
                }
                Ok(Fp(r))
            }
            None => Self::from_rational(&parse_rational(s)?),
        }
    }
    fn modulus() -> Option<u64> {
        Some(P)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        *self * *other
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += *a * *b;
    }
}

/// Candidate primes for the modular backend, all above 2³¹. Replacement walks this list.
pub const PRIMES: [u64; 4] = [2305843009213693951, 4294967311, 4294967291, 4294967279];

pub type F0 = Fp<{ PRIMES[0] }>;
pub type F1 = Fp<{ PRIMES[1] }>;
pub type F2 = Fp<{ PRIMES[2] }>;
pub type F3 = Fp<{ PRIMES[3] }>;

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `i_q = (q^i − q^{−i})/(q − q^{−1})`, evaluated as the symmetric sum so that no division occurs.
pub fn q_number<S: Field>(i: i64, q: &S) -> Result<S> {
    if i < 0 {
        return Ok(-q_number(-i, q)?);
    }
    let mut acc = S::zero();
    let mut e = i - 1;
    while e >= -(i - 1) && i > 0 {
        acc += q.pow(e)?;
        e -= 2;
    }
    Ok(acc)
}

/// Which family of idempotents an admissibility verdict refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Antisym,
    Sym,
    Both,
}

/// A violated constraint at order `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inadmissible {
    pub j: usize,
    pub side: Side,
    pub constraint: String,
}

impl Display for Inadmissible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Antisym => "antisymmetrizer",
            Side::Sym => "symmetrizer",
            Side::Both => "both sides",
        };
        write!(f, "{} (order {}, {} side)", self.constraint, self.j, side)
    }
}

/// Parameters of the BMW algebra `W_n(q, μ)` together with the derived `η`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraParams<S> {
    pub q: S,
    pub mu: S,
    pub eta: S,
    pub max_order: usize,
}

fn signed_power(exp: i64) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let digits: String = exp
        .unsigned_abs()
        .to_string()
        .bytes()
        .map(|b| SUP[(b - b'0') as usize])
        .collect();
    match exp {
        1 => "q".into(),
        e if e < 0 => format!("q⁻{digits}"),
        _ => format!("q{digits}"),
    }
}

impl<S: Field> AlgebraParams<S> {
    pub fn new(q: S, mu: S, max_order: usize) -> Result<Self> {
        let one = S::one();
        if q.is_zero() || q == one || q == -one.clone() {
            return Err(Error::InvalidParams(format!("q = {q} is excluded")));
        }
        let qinv = q.try_inv()?;
        if mu.is_zero() || mu == q || mu == -qinv.clone() {
            return Err(Error::InvalidParams(format!("μ = {mu} is excluded")));
        }
        let num = (q.clone() - mu.clone()) * (qinv.clone() + mu.clone());
        let den = mu.clone() * (q.clone() - qinv);
        let eta = num.try_div(&den)?;
        Ok(AlgebraParams {
            q,
            mu,
            eta,
            max_order,
        })
    }

    pub fn qinv(&self) -> S {
        self.q.inv().expect("q is invertible")
    }

    pub fn muinv(&self) -> S {
        self.mu.inv().expect("μ is invertible")
    }

    pub fn etainv(&self) -> Result<S> {
        self.eta.try_inv()
    }

    pub fn qpow(&self, e: i64) -> S {
        self.q.pow(e).expect("q is invertible")
    }

    pub fn mupow(&self, e: i64) -> S {
        self.mu.pow(e).expect("μ is invertible")
    }

    /// `q − q⁻¹`
    pub fn qdiff(&self) -> S {
        self.q.clone() - self.qinv()
    }

    pub fn q_number(&self, i: i64) -> S {
        q_number(i, &self.q).expect("q is invertible")
    }

    /// The parameters `(−q⁻¹, μ)` of the isomorphic algebra used by the morphism ι.
    pub fn iota(&self) -> Result<Self> {
        AlgebraParams::new(-self.qinv(), self.mu.clone(), self.max_order)
    }

    pub fn with_max_order(mut self, n: usize) -> Self {
        self.max_order = n;
        self
    }
}

/// Verdict of the singularity constraints for the idempotents up to order `n`.
pub fn check_admissible<S: Field>(
    params: &AlgebraParams<S>,
    n: usize,
    side: Side,
) -> std::result::Result<(), Inadmissible> {
    for j in 2..=n as i64 {
        if params.q_number(j).is_zero() {
            return Err(Inadmissible {
                j: j as usize,
                side,
                constraint: format!("{j}_q = 0"),
            });
        }
        if matches!(side, Side::Antisym | Side::Both) && params.mu == -params.qpow(3 - 2 * j) {
            return Err(Inadmissible {
                j: j as usize,
                side: Side::Antisym,
                constraint: format!("μ = −{}", signed_power(3 - 2 * j)),
            });
        }
        if matches!(side, Side::Sym | Side::Both) && params.mu == params.qpow(2 * j - 3) {
            return Err(Inadmissible {
                j: j as usize,
                side: Side::Sym,
                constraint: format!("μ = {}", signed_power(2 * j - 3)),
            });
        }
    }
    Ok(())
}

/// Samples a rational `q = ±a/b` with small coprime `a ≠ b`, rejecting values refused by `accept`.
pub fn sample_q<R: Rng>(rng: &mut R, mut accept: impl FnMut(&BigRational) -> bool) -> BigRational {
    loop {
        let a: i64 = rng.gen_range(1..=13);
        let b: i64 = rng.gen_range(1..=13);
        if a == b || a.gcd(&b) != 1 {
            continue;
        }
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let q = BigRational::new((sign * a).into(), b.into());
        if q.abs().is_one() || q.is_zero() {
            continue;
        }
        if accept(&q) {
            return q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn q_numbers() {
        let q = r(2, 1);
        assert_eq!(q_number(1, &q).unwrap(), r(1, 1));
        assert_eq!(q_number(0, &q).unwrap(), r(0, 1));
        assert_eq!(q_number(2, &q).unwrap(), r(5, 2));
        assert_eq!(q_number(-2, &q).unwrap(), r(-5, 2));
    }

    #[test]
    fn primes_are_prime() {
        for p in PRIMES {
            assert!(p > 1 << 31);
            assert!(is_prime_u64(p), "{p}");
        }
        assert!(!is_prime_u64(4294967297));
        assert!(!is_prime_u64(1 << 61));
    }

    #[test]
    fn serialization_round_trip() {
        let x = r(-459, 343);
        assert_eq!(x.to_string(), "-459/343");
        assert_eq!(Rational::parse(&x.to_string()).unwrap(), x);
        let y = F1::from_rational(x.inner()).unwrap();
        assert_eq!(F1::parse(&y.to_string()).unwrap(), y);
        assert!(Rational::parse("7/0").is_err());
        assert!(F1::parse("3 mod 5").is_err());
    }

    #[test]
    fn modular_matches_rational() {
        let a = r(7, 5);
        let b = r(-3, 11);
        let m = |x: &Rational| F0::from_rational(x.inner()).unwrap();
        assert_eq!(m(&(a.clone() * b.clone())), m(&a) * m(&b));
        assert_eq!(m(&(a.clone() - b.clone())), m(&a) - m(&b));
        assert_eq!(m(&a.inv().unwrap()), m(&a).inv().unwrap());
    }

    #[test]
    fn admissibility_examples() {
        let q = r(7, 5);
        let so3 = AlgebraParams::new(q.clone(), q.pow(-2).unwrap(), 4).unwrap();
        assert!(check_admissible(&so3, 4, Side::Antisym).is_ok());
        let sp2 = AlgebraParams::new(q.clone(), -q.pow(-3).unwrap(), 3).unwrap();
        let v = check_admissible(&sp2, 3, Side::Antisym).unwrap_err();
        assert_eq!(v.j, 3);
        assert_eq!(v.constraint, "μ = −q⁻³");
        assert!(check_admissible(&sp2, 2, Side::Antisym).is_ok());
    }

    #[test]
    fn eta_for_so3() {
        let q = r(7, 5);
        let p = AlgebraParams::new(q.clone(), q.pow(-2).unwrap(), 2).unwrap();
        let closed = q.pow(-1).unwrap() + q.pow(-2).unwrap() + q.pow(-3).unwrap();
        assert_eq!(p.mu.clone() * p.eta.clone(), closed);
        assert_eq!(closed, r(545, 343));
    }
}
