//! Terminating generalized hypergeometric series at unit argument.
//!
//! A `pFq(1)` terminates when some upper parameter is a nonpositive integer
//! `-N`; its value is then the finite sum of `N + 1` terms. Two evaluators are
//! provided: a term-ratio accumulator and the nested (Horner) form
//!
//! ```text
//! 1 + A_0/B_0 (1 + A_1/B_1 (1 + ... (1 + A_{N-1}/B_{N-1})))
//! A_i = Π_j (α_j + i),   B_i = (i + 1) Π_k (β_k + i)
//! ```
//!
//! evaluated innermost-first over big-integer numerator and denominator with a
//! single reduction at the end.
//!
//! The well-poised `5F4` of the Dougall summation gets its own evaluator in
//! which `(n/2+1)_k (n)_k / (n/2)_k` has been cancelled to `(n+2k)(n+1)_{k-1}`,
//! so that `n = 0` gives the limiting value instead of a truncated series.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{gamma_product_ratio, int, is_nonpositive_integer, FactorialProduct, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PFQSpec {
    pub numerator: Vec<Rational>,
    pub denominator: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SeriesMethod {
    Direct,
    Horner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesReport {
    pub value: Rational,
    pub terms_evaluated: u64,
    pub method: SeriesMethod,
}

impl PFQSpec {
    pub fn new(numerator: Vec<Rational>, denominator: Vec<Rational>) -> Self {
        Self { numerator, denominator }
    }

    pub fn p(&self) -> usize {
        self.numerator.len()
    }

    pub fn q(&self) -> usize {
        self.denominator.len()
    }

    /// Drops numerator/denominator parameters that appear on both sides.
    pub fn cancel_pairs(&self) -> Self {
        let mut den = self.denominator.clone();
        let mut num = Vec::with_capacity(self.numerator.len());
        for a in &self.numerator {
            match den.iter().position(|b| b == a) {
                Some(i) => {
                    den.remove(i);
                }
                None => num.push(a.clone()),
            }
        }
        Self::new(num, den)
    }
}

impl fmt::Display for PFQSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "{}F{}[{}; {}; 1]",
            self.p(),
            self.q(),
            join(&self.numerator),
            join(&self.denominator)
        )
    }
}

/// Smallest `|α|` over nonpositive-integer numerator parameters.
pub fn termination_index(spec: &PFQSpec) -> Result<u64> {
    spec.numerator
        .iter()
        .filter(|a| is_nonpositive_integer(a))
        .map(|a| {
            (-a).to_integer()
                .to_u64()
                .expect("termination index does not fit in u64")
        })
        .min()
        .ok_or(Error::NonTerminating)
}

/// Termination index after checking no `β + i` vanishes for `i < N`.
fn checked_depth(spec: &PFQSpec) -> Result<u64> {
    let depth = termination_index(spec)?;
    for b in &spec.denominator {
        if is_nonpositive_integer(b) && (-b).to_integer() < BigInt::from(depth) {
            return Err(Error::DenominatorPole(b.to_string()));
        }
    }
    Ok(depth)
}

/// Term-ratio summation `t_{k+1} = t_k · A_k / B_k`.
pub fn eval_direct(spec: &PFQSpec) -> Result<SeriesReport> {
    let depth = checked_depth(spec)?;
    let mut term = Rational::one();
    let mut sum = Rational::one();
    for k in 0..depth {
        let shift = int(k as i64);
        let mut ratio: Rational = spec.numerator.iter().map(|a| a + &shift).product();
        ratio /= spec
            .denominator
            .iter()
            .map(|b| b + &shift)
            .product::<Rational>()
            * int(k as i64 + 1);
        term *= ratio;
        sum += &term;
    }
    Ok(SeriesReport {
        value: sum,
        terms_evaluated: depth + 1,
        method: SeriesMethod::Direct,
    })
}

/// `Π (r_i + shift)` as an unreduced fraction.
fn shifted_product(params: &[Rational], shift: i64) -> (BigInt, BigInt) {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for r in params {
        let d = r.denom();
        num *= r.numer() + d * shift;
        if !d.is_one() {
            den *= d;
        }
    }
    (num, den)
}

/// Nested evaluation, innermost level first.
pub fn eval_horner(spec: &PFQSpec) -> Result<SeriesReport> {
    let depth = checked_depth(spec)?;
    let mut p = BigInt::one();
    let mut q = BigInt::one();
    for i in (0..depth as i64).rev() {
        let (an, ad) = shifted_product(&spec.numerator, i);
        let (mut bn, bd) = shifted_product(&spec.denominator, i);
        bn *= i + 1;
        // r <- 1 + (an/ad)/(bn/bd) · p/q
        let scale = ad * bn;
        q *= &scale;
        p = &q + an * bd * p;
    }
    Ok(SeriesReport {
        value: Rational::new(p, q),
        terms_evaluated: depth + 1,
        method: SeriesMethod::Horner,
    })
}

/// `Σ β = 1 + Σ α`.
pub fn is_balanced(spec: &PFQSpec) -> bool {
    let a: Rational = spec.numerator.iter().sum();
    let b: Rational = spec.denominator.iter().sum();
    b == a + Rational::one()
}

/// `1 + α_1 = β_1 + α_2 = ... = β_q + α_p` with parameters in the given order.
pub fn is_well_poised(spec: &PFQSpec) -> Result<bool> {
    if spec.p() != spec.q() + 1 {
        return Err(Error::ArityMismatch {
            p: spec.p(),
            q: spec.q(),
        });
    }
    let target = &spec.numerator[0] + Rational::one();
    Ok(spec
        .denominator
        .iter()
        .zip(&spec.numerator[1..])
        .all(|(b, a)| b + a == target))
}

/// Whether some reordering of the parameters is well-poised.
pub fn is_well_poised_any_order(spec: &PFQSpec) -> Result<bool> {
    if spec.p() != spec.q() + 1 {
        return Err(Error::ArityMismatch {
            p: spec.p(),
            q: spec.q(),
        });
    }
    let mut den = spec.denominator.clone();
    den.sort();
    for (i, lead) in spec.numerator.iter().enumerate() {
        let target = lead + Rational::one();
        let mut partners: Vec<Rational> = spec
            .numerator
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, a)| &target - a)
            .collect();
        partners.sort();
        if partners == den {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The parameter list `[n, n/2+1, -x, -y, -z; n/2, x+n+1, y+n+1, z+n+1]`.
///
/// `n` leads so that the list is well-poised in the order given.
pub fn wp5f4_spec(n: &Rational, x: &Rational, y: &Rational, z: &Rational) -> PFQSpec {
    let one = Rational::one();
    let half_n = n / int(2);
    let shift = n + &one;
    PFQSpec::new(
        vec![n.clone(), &half_n + &one, -x, -y, -z],
        vec![half_n, x + &shift, y + &shift, z + &shift],
    )
}

/// The well-poised `3F2[n, -x, -y; x+n+1, y+n+1; 1]` of Dixon's theorem.
pub fn dixon_spec(n: &Rational, x: &Rational, y: &Rational) -> PFQSpec {
    let shift = n + Rational::one();
    PFQSpec::new(vec![n.clone(), -x, -y], vec![x + &shift, y + &shift])
}

fn nonnegative_integer(name: &'static str, r: &Rational) -> Result<i64> {
    match crate::exact::as_i64(r) {
        Some(v) if v >= 0 => Ok(v),
        _ => Err(Error::InvalidParameter {
            name,
            value: r.to_string(),
        }),
    }
}

/// Product of machine integers, kept in `i128` until it would overflow.
fn product(factors: &[i128]) -> BigInt {
    let mut word: i128 = 1;
    let mut acc: Option<BigInt> = None;
    for &f in factors {
        match word.checked_mul(f) {
            Some(w) => word = w,
            None => {
                let big = acc.take().unwrap_or_else(BigInt::one);
                acc = Some(big * word);
                word = f;
            }
        }
    }
    match acc {
        Some(big) => big * word,
        None => BigInt::from(word),
    }
}

/// `5F4[n/2+1, n, -x, -y, -z; n/2, x+n+1, y+n+1, z+n+1; 1]` with the
/// `(n/2+1)_k (n)_k / (n/2)_k` factor cancelled symbolically.
///
/// Term `k >= 1` is `(n+2k) (n+1)_{k-1} (-x)_k (-y)_k (-z)_k / [(x+n+1)_k (y+n+1)_k (z+n+1)_k k!]`.
/// `x, y, z` must be nonnegative integers and `n >= 0`.
pub fn eval_wp5f4(n: &Rational, x: &Rational, y: &Rational, z: &Rational) -> Result<Rational> {
    let x = nonnegative_integer("x", x)? as i128;
    let y = nonnegative_integer("y", y)? as i128;
    let z = nonnegative_integer("z", z)? as i128;
    if n.is_negative() {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n.to_string(),
        });
    }
    // n = np / nq
    let np: i128 = n.numer().to_i128().ok_or(Error::InvalidParameter {
        name: "n",
        value: n.to_string(),
    })?;
    let nq: i128 = n.denom().to_i128().ok_or(Error::InvalidParameter {
        name: "n",
        value: n.to_string(),
    })?;
    let depth = x.min(y).min(z);
    let q_squared = product(&[nq, nq]);

    // Every ratio t_{k+1}/t_k is num_k · nq² / den_k.
    let mut p = BigInt::one();
    let mut q = BigInt::one();
    for k in (0..depth).rev() {
        let shifted = |c: i128| np + c * nq;
        let mut num = vec![k - x, k - y, k - z, shifted(2 * k + 2)];
        let mut den = vec![
            shifted(x + 1 + k),
            shifted(y + 1 + k),
            shifted(z + 1 + k),
            k + 1,
        ];
        // at k = 0 the (n+k)/(n+2k) factor is the cancelled n/n
        if k > 0 {
            num.push(shifted(k));
            den.push(shifted(2 * k));
        }
        let num = product(&num) * &q_squared;
        let den = product(&den);
        q *= &den;
        p = &q + num * p;
    }
    if q.is_zero() {
        return Err(Error::DenominatorPole(format!("n = {n}")));
    }
    Ok(Rational::new(p, q))
}

/// `Π_{i<len} (start + i)`, raised to `power`, as a factorial ratio.
fn mul_rising(acc: &mut FactorialProduct, start: u64, len: u64, power: i64) {
    if len > 0 {
        acc.mul_factorial(start + len - 1, power).mul_factorial(start - 1, -power);
    }
}

/// `Π_{i<len} (start + 2i)` for `start >= 1`, raised to `power`.
fn mul_stride2(acc: &mut FactorialProduct, start: u64, len: u64, power: i64) {
    if len == 0 {
        return;
    }
    if start.is_multiple_of(2) {
        // 2^len · Π (start/2 + i)
        acc.mul_int(2, power * len as i64);
        mul_rising(acc, start / 2, len, power);
    } else {
        // all of start..=last over the even numbers between them
        let last = start + 2 * (len - 1);
        mul_rising(acc, start, last - start + 1, power);
        if len > 1 {
            acc.mul_int(2, -power * (len - 1) as i64);
            mul_rising(acc, start.div_ceil(2), len - 1, -power);
        }
    }
}

/// Integer-parameter form of [`eval_wp5f4`]: returns `p` such that the series
/// is `p / D`, and multiplies `denominator` by `D^power`.
///
/// `D` is the product of the Horner step denominators, which are
/// consecutive runs and so enter as factorial ratios.
/// Arguments must stay below `2^24`, so every step fits an `i128`.
pub fn wp5f4_integer_parts(n: u64, x: u64, y: u64, z: u64, denominator: &mut FactorialProduct, power: i64) -> BigInt {
    const LIMIT: u64 = 1 << 24;
    assert!(n < LIMIT && x < LIMIT && y < LIMIT && z < LIMIT, "5F4 parameters too large");
    let depth = x.min(y).min(z);
    for w in [x, y, z] {
        mul_rising(denominator, n + w + 1, depth, power);
    }
    denominator.mul_factorial(depth, power);
    mul_stride2(denominator, n + 2, depth.saturating_sub(1), power);

    let (n, x, y, z) = (n as i128, x as i128, y as i128, z as i128);
    let mut p = BigInt::one();
    let mut q = BigInt::one();
    for k in (0..depth as i128).rev() {
        let mut num = (k - x) * (k - y) * (k - z) * (n + 2 * k + 2);
        let mut den = (n + x + 1 + k) * (n + y + 1 + k) * (n + z + 1 + k) * (k + 1);
        if k > 0 {
            num *= n + k;
            den *= n + 2 * k;
        }
        q *= den;
        p = &q + p * num;
    }
    p
}

/// `Γ(x+n+1)Γ(y+n+1)Γ(z+n+1)Γ(x+y+z+n+1) / [Γ(n+1)Γ(x+y+n+1)Γ(x+z+n+1)Γ(y+z+n+1)]`.
pub fn dougall_rhs(n: &Rational, x: &Rational, y: &Rational, z: &Rational) -> Result<Rational> {
    let s = n + Rational::one();
    gamma_product_ratio(
        &[x + &s, y + &s, z + &s, x + y + z + &s],
        &[s.clone(), x + y + &s, x + z + &s, y + z + &s],
    )
}

/// The Dougall right-hand side with `Γ(x+y+n+1)` and `Γ(x+y+z+n+1)` exchanged
/// between numerator and denominator. Incorrect; kept to show where it fails.
pub fn dougall_rhs_transposed(n: &Rational, x: &Rational, y: &Rational, z: &Rational) -> Result<Rational> {
    let s = n + Rational::one();
    gamma_product_ratio(
        &[x + &s, y + &s, z + &s, x + y + &s],
        &[s.clone(), x + y + z + &s, y + z + &s, x + z + &s],
    )
}

/// Dixon's sum of `3F2[n, -x, -y; x+n+1, y+n+1; 1]`:
/// `Γ(1+n/2)Γ(1+n+x)Γ(1+n+y)Γ(1+n/2+x+y) / [Γ(1+n)Γ(1+n/2+x)Γ(1+n/2+y)Γ(1+n+x+y)]`.
pub fn dixon_rhs(n: &Rational, x: &Rational, y: &Rational) -> Result<Rational> {
    let one = Rational::one();
    let h = n / int(2) + &one;
    let s = n + &one;
    gamma_product_ratio(
        &[h.clone(), &s + x, &s + y, &h + x + y],
        &[s.clone(), &h + x, &h + y, &s + x + y],
    )
}
