use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The value as `i64` if it is an integer that fits.
pub fn as_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

pub fn is_nonpositive_integer(r: &Rational) -> bool {
    r.is_integer() && !r.is_positive()
}

/// Rising factorial `a (a+1) ... (a+k-1)`; `1` when `k == 0`.
pub fn pochhammer(a: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    let mut x = a.clone();
    for _ in 0..k {
        acc *= &x;
        x += BigInt::one();
    }
    acc
}

/// `Γ(a) / Γ(b)` for `a - b` an integer, as a finite Pochhammer product.
pub fn gamma_ratio(a: &Rational, b: &Rational) -> Result<Rational> {
    let offset = a - b;
    if !offset.is_integer() {
        return Err(Error::NonIntegerOffset {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    for arg in [a, b] {
        if is_nonpositive_integer(arg) {
            return Err(Error::PoleError(format!("Γ({arg})")));
        }
    }
    let m = offset
        .to_integer()
        .to_i64()
        .expect("gamma ratio offset does not fit in i64");
    Ok(if m >= 0 {
        pochhammer(b, m as u64)
    } else {
        pochhammer(a, m.unsigned_abs()).recip()
    })
}

/// `Π Γ(num_i) / Π Γ(den_j)`, pairing arguments with integer offsets.
///
/// Fails with `NonIntegerOffset` if some argument has no partner whose offset is an integer.
pub fn gamma_product_ratio(num: &[Rational], den: &[Rational]) -> Result<Rational> {
    if num.len() != den.len() {
        return Err(Error::InvalidParameter {
            name: "gamma argument count",
            value: format!("{} over {}", num.len(), den.len()),
        });
    }
    let mut unused: Vec<&Rational> = den.iter().collect();
    let mut acc = Rational::one();
    for a in num {
        let Some(pos) = unused.iter().position(|b| (a - *b).is_integer()) else {
            return Err(Error::NonIntegerOffset {
                a: a.to_string(),
                b: den.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "),
            });
        };
        let b = unused.swap_remove(pos);
        acc *= gamma_ratio(a, b)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&int(1), 4), int(24));
        assert_eq!(pochhammer(&rat(-7, 3), 0), int(1));
        assert_eq!(pochhammer(&rat(1, 2), 3), rat(15, 8));
        assert_eq!(pochhammer(&int(-2), 3), int(0));
    }

    #[test]
    fn gamma_ratio_examples() {
        assert_eq!(gamma_ratio(&int(5), &int(3)).unwrap(), int(12));
        assert_eq!(gamma_ratio(&rat(9, 4), &rat(9, 4)).unwrap(), int(1));
        assert_eq!(gamma_ratio(&rat(7, 2), &rat(3, 2)).unwrap(), rat(15, 4));
        assert_eq!(gamma_ratio(&rat(3, 2), &rat(7, 2)).unwrap(), rat(4, 15));
    }

    #[test]
    fn gamma_ratio_errors() {
        assert!(matches!(
            gamma_ratio(&rat(1, 2), &int(1)),
            Err(Error::NonIntegerOffset { .. })
        ));
        assert!(matches!(gamma_ratio(&int(0), &int(3)), Err(Error::PoleError(_))));
        assert!(matches!(gamma_ratio(&int(4), &int(-1)), Err(Error::PoleError(_))));
    }

    #[test]
    fn gamma_product_pairs_by_offset() {
        // Γ(3)Γ(5/2) / (Γ(1/2)Γ(1)) = 2 · 3/4
        let v = gamma_product_ratio(&[int(3), rat(5, 2)], &[rat(1, 2), int(1)]).unwrap();
        assert_eq!(v, rat(3, 2));
        assert!(gamma_product_ratio(&[rat(1, 3)], &[int(1)]).is_err());
    }
}
