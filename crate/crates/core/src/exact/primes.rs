//! Prime tables, prime-exponent maps and the factorial memo.

use std::fmt;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

static PRIMES: RwLock<PrimeTable> = RwLock::new(PrimeTable {
    limit: 1,
    primes: Vec::new(),
});

/// n! stored densely: entry `i` is the exponent of the `i`-th prime.
static FACTORIALS: RwLock<Vec<Vec<i32>>> = RwLock::new(Vec::new());

fn sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Makes sure every prime `<= limit` is in the table.
fn ensure_primes(limit: u64) {
    if PRIMES.read().unwrap().limit >= limit {
        return;
    }
    let mut table = PRIMES.write().unwrap();
    if table.limit >= limit {
        return;
    }
    let new_limit = limit.max(table.limit.saturating_mul(2)).max(256);
    table.primes = sieve(new_limit);
    table.limit = new_limit;
}

/// Index of the prime `p` in the global table.
pub(crate) fn prime_index(p: u64) -> usize {
    ensure_primes(p);
    let table = PRIMES.read().unwrap();
    table
        .primes
        .binary_search(&p)
        .unwrap_or_else(|_| panic!("{p} is not prime"))
}

/// Trial-division factorization of a positive machine integer.
pub fn factor_u64(mut n: u64) -> Vec<(u64, i64)> {
    assert!(n > 0, "cannot factor zero");
    let mut out = Vec::new();
    if n == 1 {
        return out;
    }
    let root = n.isqrt() + 1;
    ensure_primes(root);
    let table = PRIMES.read().unwrap();
    for &p in &table.primes {
        if p * p > n {
            break;
        }
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn factor_biguint(n: &BigUint) -> Vec<(u64, i64)> {
    if let Some(small) = n.to_u64() {
        return factor_u64(small);
    }
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p: u64 = 2;
    loop {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
            if let Some(small) = n.to_u64() {
                for (q, f) in factor_u64(small) {
                    out.push((q, f));
                }
                return out;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        out.push((n.to_u64().expect("prime factor exceeds u64"), 1));
    }
    out
}

fn ensure_factorials(n: usize) {
    if FACTORIALS.read().unwrap().len() > n {
        return;
    }
    ensure_primes(n as u64);
    let mut memo = FACTORIALS.write().unwrap();
    if memo.is_empty() {
        memo.push(Vec::new());
    }
    while memo.len() <= n {
        let k = memo.len() as u64;
        let mut next = memo.last().unwrap().clone();
        for (p, e) in factor_u64(k) {
            let idx = prime_index(p);
            if next.len() <= idx {
                next.resize(idx + 1, 0);
            }
            next[idx] += e as i32;
        }
        memo.push(next);
    }
}

/// A positive rational number as a finite product `Π p^e` with `e != 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PrimeFactored {
    factors: Vec<(u64, i64)>,
}

impl PrimeFactored {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds from `(prime, exponent)` pairs; pairs may repeat and need not be sorted.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, i64)>) -> Self {
        let mut factors: Vec<(u64, i64)> = pairs.into_iter().collect();
        factors.sort_unstable_by_key(|&(p, _)| p);
        let mut merged: Vec<(u64, i64)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        merged.retain(|&(_, e)| e != 0);
        Self { factors: merged }
    }

    pub fn from_u64(n: u64) -> Self {
        Self {
            factors: factor_u64(n),
        }
    }

    /// Factorizes a positive rational by trial division. Returns `None` for zero or negatives.
    pub fn from_rational(r: &Rational) -> Option<Self> {
        if !r.is_positive() {
            return None;
        }
        let num = factor_biguint(r.numer().magnitude());
        let den = factor_biguint(r.denom().magnitude());
        Some(Self::from_pairs(
            num.into_iter().chain(den.into_iter().map(|(p, e)| (p, -e))),
        ))
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.factors.iter().copied()
    }

    pub fn exponent(&self, p: u64) -> i64 {
        self.factors
            .binary_search_by_key(&p, |&(q, _)| q)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// `self * other^power`.
    pub fn mul_pow(&self, other: &Self, power: i64) -> Self {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&(p, e)), Some(&(q, f))) if p == q => {
                    i += 1;
                    j += 1;
                    (p, e + power * f)
                }
                (Some(&(p, e)), Some(&(q, _))) if p < q => {
                    i += 1;
                    (p, e)
                }
                (Some(&(p, e)), None) => {
                    i += 1;
                    (p, e)
                }
                (_, Some(&(q, f))) => {
                    j += 1;
                    (q, power * f)
                }
                (None, None) => unreachable!(),
            };
            if next.1 != 0 {
                out.push(next);
            }
        }
        Self { factors: out }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_pow(other, 1)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul_pow(other, -1)
    }

    pub fn pow(&self, power: i64) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .filter(|_| power != 0)
                .map(|&(p, e)| (p, e * power))
                .collect(),
        }
    }

    pub fn recip(&self) -> Self {
        self.pow(-1)
    }

    /// Numerator and denominator as big integers.
    pub fn to_parts(&self) -> (BigUint, BigUint) {
        (
            product_of_powers(self.factors.iter().filter(|f| f.1 > 0).map(|&(p, e)| (p, e as u64))),
            product_of_powers(self.factors.iter().filter(|f| f.1 < 0).map(|&(p, e)| (p, (-e) as u64))),
        )
    }

    pub fn to_rational(&self) -> Rational {
        let (n, d) = self.to_parts();
        // coprime by construction
        Rational::new_raw(BigInt::from(n), BigInt::from(d))
    }
}

impl fmt::Display for PrimeFactored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

/// Π p^e, batching small factors in a machine word before touching the bignum.
pub(crate) fn product_of_powers(powers: impl Iterator<Item = (u64, u64)>) -> BigUint {
    let mut acc = BigUint::one();
    let mut word: u64 = 1;
    for (p, e) in powers {
        for _ in 0..e {
            match word.checked_mul(p) {
                Some(w) => word = w,
                None => {
                    acc *= word;
                    word = p;
                }
            }
        }
    }
    if word != 1 {
        acc *= word;
    }
    acc
}

/// n! as a prime-exponent map. Memoized process-wide.
pub fn factorial(n: u64) -> PrimeFactored {
    let mut acc = FactorialProduct::new();
    acc.mul_factorial(n, 1);
    acc.finish()
}

/// Dense accumulator for products of factorials and small integers.
///
/// Exponents are indexed by position in the global prime table, which makes
/// each factorial a vector add.
#[derive(Clone, Debug, Default)]
pub struct FactorialProduct {
    exps: Vec<i64>,
}

impl FactorialProduct {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiplies by `(n!)^power`.
    pub fn mul_factorial(&mut self, n: u64, power: i64) -> &mut Self {
        if n < 2 || power == 0 {
            return self;
        }
        ensure_factorials(n as usize);
        let memo = FACTORIALS.read().unwrap();
        let row = &memo[n as usize];
        if self.exps.len() < row.len() {
            self.exps.resize(row.len(), 0);
        }
        for (slot, &e) in self.exps.iter_mut().zip(row.iter()) {
            *slot += power * e as i64;
        }
        self
    }

    /// Multiplies by `n^power` for a positive machine integer `n`.
    pub fn mul_int(&mut self, n: u64, power: i64) -> &mut Self {
        assert!(n > 0, "zero factor in a prime-exponent product");
        for (p, e) in factor_u64(n) {
            let idx = prime_index(p);
            if self.exps.len() <= idx {
                self.exps.resize(idx + 1, 0);
            }
            self.exps[idx] += power * e;
        }
        self
    }

    pub fn mul_factored(&mut self, other: &PrimeFactored, power: i64) -> &mut Self {
        for (p, e) in other.iter() {
            let idx = prime_index(p);
            if self.exps.len() <= idx {
                self.exps.resize(idx + 1, 0);
            }
            self.exps[idx] += power * e;
        }
        self
    }

    pub fn finish(&self) -> PrimeFactored {
        let table = PRIMES.read().unwrap();
        PrimeFactored {
            factors: self
                .exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| (table.primes[i], e))
                .collect(),
        }
    }
}
