//! `sign · √(rational)` values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::primes::{product_of_powers, PrimeFactored};
use super::Rational;
use crate::error::{Error, Result};

/// Splits `coefficient · √radicand` into a new coefficient and a square-free radicand.
///
/// Each exponent `e` is written `e = 2q + r` with `q` truncated toward zero, so
/// the remaining radicand exponents are `±1`. A prime with a negative odd
/// exponent stays in the radicand denominator.
pub fn canonicalize_sqrt(coefficient: &Rational, radicand: &PrimeFactored) -> (Rational, PrimeFactored) {
    let mut kept = Vec::new();
    let mut up = Vec::new();
    let mut down = Vec::new();
    for (p, e) in radicand.iter() {
        let q = e / 2;
        let r = e - 2 * q;
        if r != 0 {
            kept.push((p, r));
        }
        match q.cmp(&0) {
            Ordering::Greater => up.push((p, q as u64)),
            Ordering::Less => down.push((p, (-q) as u64)),
            Ordering::Equal => {}
        }
    }
    let scale = Rational::new(
        BigInt::from(product_of_powers(up.into_iter())),
        BigInt::from(product_of_powers(down.into_iter())),
    );
    (coefficient * scale, PrimeFactored::from_pairs(kept))
}

/// Divides `m` by `p` up to `limit` times; returns how many times it did.
///
/// Works in powers of `p` that fit a `u32`, testing each with a single-digit
/// remainder. If `m ≡ r (mod p^k)` with `r != 0` then `v_p(m) = v_p(r)`.
fn cancel_prime(m: &mut BigUint, p: u64, limit: i64) -> i64 {
    let Ok(p32) = u32::try_from(p) else {
        let divisor = BigUint::from(p);
        let mut done = 0;
        while done < limit {
            let (d, rem) = m.div_rem(&divisor);
            if !rem.is_zero() {
                break;
            }
            *m = d;
            done += 1;
        }
        return done;
    };
    let mut done = 0;
    while done < limit {
        let mut k = 0;
        let mut pk: u32 = 1;
        while done + k < limit {
            match pk.checked_mul(p32) {
                Some(next) => {
                    pk = next;
                    k += 1;
                }
                None => break,
            }
        }
        let r: u32 = (&*m % pk).try_into().expect("remainder below a u32 modulus");
        if r == 0 {
            *m = std::mem::take(m) / pk;
            done += k;
            continue;
        }
        let (mut v, mut r, mut div) = (0, r, 1u32);
        while r % p32 == 0 {
            r /= p32;
            div *= p32;
            v += 1;
        }
        if v > 0 {
            *m = std::mem::take(m) / div;
        }
        return done + v;
    }
    done
}

/// An exact real `sign · c · √r` with `c > 0` rational and `r` square-free.
///
/// The stored form is canonical, so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SqrtRational {
    sign: i8,
    coefficient: Rational,
    radicand: PrimeFactored,
}

impl SqrtRational {
    pub fn zero() -> Self {
        Self {
            sign: 0,
            coefficient: Rational::zero(),
            radicand: PrimeFactored::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_parts(r, &PrimeFactored::one())
    }

    /// `sign · √radicand`; `sign == 0` gives zero.
    pub fn from_factored(sign: i8, radicand: &PrimeFactored) -> Self {
        Self::from_integer_and_factored(BigInt::from(sign), radicand)
    }

    /// `m · √square` for an integer `m`.
    ///
    /// `m` is reduced against the denominator by trial division over the primes
    /// of `square`, so no bignum gcd is needed.
    pub fn from_integer_and_factored(m: BigInt, square: &PrimeFactored) -> Self {
        if m.is_zero() {
            return Self::zero();
        }
        let sign = if m.is_negative() { -1 } else { 1 };
        let (_, mut m) = m.into_parts();
        let mut kept = Vec::new();
        let mut up = Vec::new();
        let mut down = Vec::new();
        for (p, e) in square.iter() {
            let mut q = e / 2;
            let r = e - 2 * q;
            if r != 0 {
                kept.push((p, r));
            }
            if q < 0 {
                q += cancel_prime(&mut m, p, -q);
            }
            match q.cmp(&0) {
                Ordering::Greater => up.push((p, q as u64)),
                Ordering::Less => down.push((p, (-q) as u64)),
                Ordering::Equal => {}
            }
        }
        // m keeps no factor of the remaining denominator primes
        let coefficient = Rational::new_raw(
            BigInt::from(m * product_of_powers(up.into_iter())),
            BigInt::from(product_of_powers(down.into_iter())),
        );
        Self::normalized(sign, coefficient, PrimeFactored::from_pairs(kept))
    }

    /// `coefficient · √radicand` for any rational coefficient.
    pub fn from_parts(coefficient: Rational, radicand: &PrimeFactored) -> Self {
        if coefficient.is_zero() {
            return Self::zero();
        }
        let sign = if coefficient.is_negative() { -1 } else { 1 };
        let (c, r) = canonicalize_sqrt(&coefficient.abs(), radicand);
        Self::normalized(sign, c, r)
    }

    /// Moves one power of each radicand prime across the root where the
    /// coefficient holds it on the opposite side, so that every radicand
    /// exponent has the sign of the prime's total exponent in the value.
    fn normalized(sign: i8, coefficient: Rational, radicand: PrimeFactored) -> Self {
        let mut up: Vec<u64> = Vec::new();
        let mut down: Vec<u64> = Vec::new();
        let mut flipped = Vec::new();
        for (p, e) in radicand.iter() {
            let side = if e > 0 { coefficient.denom() } else { coefficient.numer() };
            if (side % p).is_zero() {
                if e > 0 {
                    up.push(p);
                } else {
                    down.push(p);
                }
                flipped.push((p, -2 * e));
            }
        }
        if flipped.is_empty() {
            return Self {
                sign,
                coefficient,
                radicand,
            };
        }
        // p^1 under the root with 1/p outside is p^{-1} under the root, and vice versa
        let scale = Rational::new(
            BigInt::from(product_of_powers(up.into_iter().map(|p| (p, 1)))),
            BigInt::from(product_of_powers(down.into_iter().map(|p| (p, 1)))),
        );
        Self {
            sign,
            coefficient: coefficient * scale,
            radicand: radicand.mul(&PrimeFactored::from_pairs(flipped)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn signum(&self) -> i8 {
        self.sign
    }

    /// The signed rational coefficient in front of the square root.
    pub fn coefficient(&self) -> Rational {
        match self.sign {
            -1 => -self.coefficient.clone(),
            _ => self.coefficient.clone(),
        }
    }

    /// Square-free radicand; `1` for rational values and zero.
    pub fn radicand(&self) -> &PrimeFactored {
        &self.radicand
    }

    /// The value squared, which is rational.
    pub fn square(&self) -> Rational {
        &self.coefficient * &self.coefficient * self.radicand.to_rational()
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        if r.is_zero() || self.is_zero() {
            return Self::zero();
        }
        Self::normalized(
            if r.is_negative() { -self.sign } else { self.sign },
            &self.coefficient * r.abs(),
            self.radicand.clone(),
        )
    }

    /// Sum of two values sharing a radicand (zero shares any radicand).
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let (c1, r1) = self.integral_form();
        let (c2, r2) = other.integral_form();
        if r1 != r2 {
            return Err(Error::MixedRadicands(self.radicand.to_string(), other.radicand.to_string()));
        }
        Ok(Self::from_parts(c1 + c2, &r1))
    }

    /// The same value as `c·√n` with `n` a square-free integer.
    fn integral_form(&self) -> (Rational, PrimeFactored) {
        let (_, den) = self.radicand.to_parts();
        let flip: Vec<(u64, i64)> = self.radicand.iter().filter(|&(_, e)| e < 0).map(|(p, _)| (p, 2)).collect();
        (
            self.coefficient() / Rational::from_integer(BigInt::from(den)),
            self.radicand.mul(&PrimeFactored::from_pairs(flip)),
        )
    }

    /// Decimal rendering with `digits` significant digits, rounded half to even.
    pub fn to_decimal(&self, digits: usize) -> String {
        assert!(digits >= 1, "need at least one significant digit");
        if self.is_zero() {
            return "0".to_string();
        }
        let (r, s) = self.radicand.to_parts();
        let p = self.coefficient.numer().magnitude();
        let q = self.coefficient.denom().magnitude();
        // value² = a / b
        let a: BigUint = p * p * r;
        let b: BigUint = q * q * s;

        let ten = BigUint::from(10u32);
        let ge_pow10 = |e: i64| -> bool {
            // value >= 10^e  <=>  a >= b · 10^(2e)
            if e >= 0 {
                a >= &b * ten.pow(2 * e as u32)
            } else {
                &a * ten.pow((-2 * e) as u32) >= b
            }
        };
        let mut exp = (a.to_string().len() as i64 - b.to_string().len() as i64).div_euclid(2);
        while !ge_pow10(exp) {
            exp -= 1;
        }
        while ge_pow10(exp + 1) {
            exp += 1;
        }

        let shift = digits as i64 - 1 - exp;
        let (sa, sb) = if shift >= 0 {
            (&a * ten.pow(2 * shift as u32), b.clone())
        } else {
            (a.clone(), &b * ten.pow((-2 * shift) as u32))
        };
        // twice = floor(2 · value · 10^shift)
        let four_a = &sa * 4u32;
        let twice = (&four_a / &sb).sqrt();
        let mut n = if (&twice % 2u32).is_zero() {
            &twice / 2u32
        } else {
            let floor = &twice / 2u32;
            let tie = &twice * &twice * &sb == four_a;
            if tie && (&floor % 2u32).is_zero() {
                floor
            } else {
                floor + 1u32
            }
        };
        if n == ten.pow(digits as u32) {
            n /= 10u32;
            exp += 1;
        }
        let mantissa = n.to_string();
        let body = format_decimal(&mantissa, exp);
        if self.sign < 0 {
            format!("-{body}")
        } else {
            body
        }
    }
}

fn format_decimal(mantissa: &str, exp: i64) -> String {
    let digits = mantissa.len() as i64;
    if (0..digits).contains(&exp) {
        let (int_part, frac) = mantissa.split_at(exp as usize + 1);
        if frac.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac}")
        }
    } else if (-6..0).contains(&exp) {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), mantissa)
    } else {
        let (lead, rest) = mantissa.split_at(1);
        if rest.is_empty() {
            format!("{lead}e{exp}")
        } else {
            format!("{lead}.{rest}e{exp}")
        }
    }
}

/// Sums `c_i · √r_i` where every square-free `r_i` is the same.
pub fn sqrt_add_same_radicand(terms: &[(Rational, PrimeFactored)]) -> Result<SqrtRational> {
    terms
        .iter()
        .try_fold(SqrtRational::zero(), |acc, (c, r)| acc.checked_add(&SqrtRational::from_parts(c.clone(), r)))
}

/// Exact product; signs multiply and radicands combine.
pub fn sqrt_mul(x: &SqrtRational, y: &SqrtRational) -> SqrtRational {
    if x.is_zero() || y.is_zero() {
        return SqrtRational::zero();
    }
    let c = &x.coefficient * &y.coefficient;
    let mut v = SqrtRational::from_parts(c, &x.radicand.mul(&y.radicand));
    v.sign = x.sign * y.sign;
    v
}

impl Mul for &SqrtRational {
    type Output = SqrtRational;

    fn mul(self, rhs: &SqrtRational) -> SqrtRational {
        sqrt_mul(self, rhs)
    }
}

impl Mul for SqrtRational {
    type Output = SqrtRational;

    fn mul(self, rhs: SqrtRational) -> SqrtRational {
        sqrt_mul(&self, &rhs)
    }
}

impl Neg for SqrtRational {
    type Output = SqrtRational;

    fn neg(mut self) -> SqrtRational {
        self.sign = -self.sign;
        self
    }
}

impl fmt::Display for SqrtRational {
    /// `p/q*sqrt(r/s)`, dropping unit parts; `0` for zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.sign < 0 {
            write!(f, "-")?;
        }
        match (self.coefficient.is_one(), self.radicand.is_one()) {
            (_, true) => write!(f, "{}", self.coefficient),
            (true, false) => write!(f, "sqrt({})", self.radicand),
            (false, false) => write!(f, "{}*sqrt({})", self.coefficient, self.radicand),
        }
    }
}

impl From<Rational> for SqrtRational {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}
