//! Exact rational, prime-exponent and square-root-of-rational arithmetic.

mod primes;
mod rational;
mod sqrt;

pub use primes::{factor_u64, factorial, FactorialProduct, PrimeFactored};
pub use rational::{as_i64, gamma_product_ratio, gamma_ratio, int, is_nonpositive_integer, pochhammer, rat, Rational};
pub use sqrt::{canonicalize_sqrt, sqrt_add_same_radicand, sqrt_mul, SqrtRational};
