//! Reference 3j, 6j and 9j symbols from the classical single-sum formulas.
//!
//! These are the slow, trusted paths every closed form is checked against.
//! Invalid arguments give an exact zero.

use num_traits::Zero;

use crate::angular::{mul_delta_squared, phase, HalfInt, NineJ, Orientation, Triad};
use crate::error::Result;
use crate::exact::{int, sqrt_mul, FactorialProduct, Rational, SqrtRational};
use crate::hypergeom::PFQSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThreeJ {
    pub j: [HalfInt; 3],
    pub m: [HalfInt; 3],
}

/// `{j1 j2 j3; j4 j5 j6}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SixJ {
    pub top: [HalfInt; 3],
    pub bottom: [HalfInt; 3],
}

impl SixJ {
    pub fn new(top: [HalfInt; 3], bottom: [HalfInt; 3]) -> Self {
        Self { top, bottom }
    }

    pub fn from_twice(top: [i64; 3], bottom: [i64; 3]) -> Self {
        Self::new(top.map(HalfInt::from_twice), bottom.map(HalfInt::from_twice))
    }

    /// `(j1 j2 j3), (j1 j5 j6), (j4 j2 j6), (j4 j5 j3)`.
    pub fn triads(&self) -> [Triad; 4] {
        let [a, b, c] = self.top;
        let [d, e, f] = self.bottom;
        [Triad(a, b, c), Triad(a, e, f), Triad(d, b, f), Triad(d, e, c)]
    }

    pub fn is_valid(&self) -> bool {
        self.triads().iter().all(Triad::is_triangle)
    }
}

fn sign_of(p: i8) -> Rational {
    int(p as i64)
}

/// Wigner 3j symbol by the Racah single-sum formula.
pub fn three_j(s: &ThreeJ) -> Result<SqrtRational> {
    let [j1, j2, j3] = s.j;
    let [m1, m2, m3] = s.m;
    for (j, m) in s.j.iter().zip(&s.m) {
        if m.abs() > *j || !(*j - *m).is_integer() {
            return Ok(SqrtRational::zero());
        }
    }
    if (m1 + m2 + m3).twice() != 0 || !Triad(j1, j2, j3).is_triangle() {
        return Ok(SqrtRational::zero());
    }

    let mut pre = FactorialProduct::new();
    mul_delta_squared(&mut pre, Triad(j1, j2, j3), 1)?;
    for (j, m) in s.j.iter().zip(&s.m) {
        pre.mul_factorial((*j + *m).factorial_arg()?, 1)
            .mul_factorial((*j - *m).factorial_arg()?, 1);
    }

    let zero = HalfInt::ZERO;
    let lo = [zero, j2 - j3 - m1, j1 - j3 + m2].into_iter().max().unwrap();
    let hi = [j1 + j2 - j3, j1 - m1, j2 + m2].into_iter().min().unwrap();
    let mut sum = Rational::zero();
    let mut k = lo;
    while k <= hi {
        let mut den = FactorialProduct::new();
        for arg in [k, j3 - j2 + k + m1, j3 - j1 + k - m2, j1 + j2 - j3 - k, j1 - k - m1, j2 - k + m2] {
            den.mul_factorial(arg.factorial_arg()?, -1);
        }
        sum += den.finish().to_rational() * sign_of(phase(k)?);
        k = k + HalfInt::from_int(1);
    }
    let value = SqrtRational::from_factored(1, &pre.finish()).mul_rational(&sum);
    Ok(value.mul_rational(&sign_of(phase(j1 - j2 - m3)?)))
}

/// Sum bounds and triad sums for the Racah 6j formula.
struct RacahSixJ {
    triad_sums: [i64; 4],
    pair_sums: [i64; 3],
    t_min: i64,
    t_max: i64,
}

impl RacahSixJ {
    fn new(s: &SixJ) -> Result<Self> {
        let [a, b, c] = s.top;
        let [d, e, f] = s.bottom;
        let triad_sums = [
            (a + b + c).to_int()?,
            (a + e + f).to_int()?,
            (d + b + f).to_int()?,
            (d + e + c).to_int()?,
        ];
        let pair_sums = [
            (a + b + d + e).to_int()?,
            (a + c + d + f).to_int()?,
            (b + c + e + f).to_int()?,
        ];
        Ok(Self {
            t_min: *triad_sums.iter().max().unwrap(),
            t_max: *pair_sums.iter().min().unwrap(),
            triad_sums,
            pair_sums,
        })
    }

    /// `(-1)^t (t+1)! / [Π (t - T_i)! Π (P_j - t)!]`.
    fn term(&self, t: i64) -> Rational {
        let mut acc = FactorialProduct::new();
        acc.mul_factorial((t + 1) as u64, 1);
        for ts in self.triad_sums {
            acc.mul_factorial((t - ts) as u64, -1);
        }
        for ps in self.pair_sums {
            acc.mul_factorial((ps - t) as u64, -1);
        }
        let v = acc.finish().to_rational();
        if t % 2 == 0 {
            v
        } else {
            -v
        }
    }
}

fn six_j_delta_product(s: &SixJ) -> Result<SqrtRational> {
    let mut acc = FactorialProduct::new();
    for t in s.triads() {
        mul_delta_squared(&mut acc, t, 1)?;
    }
    Ok(SqrtRational::from_factored(1, &acc.finish()))
}

/// Racah 6j symbol by the single-sum formula.
pub fn six_j(s: &SixJ) -> Result<SqrtRational> {
    if !s.is_valid() {
        return Ok(SqrtRational::zero());
    }
    let racah = RacahSixJ::new(s)?;
    let sum: Rational = (racah.t_min..=racah.t_max).map(|t| racah.term(t)).sum();
    Ok(six_j_delta_product(s)?.mul_rational(&sum))
}

/// The 6j as `prefactor · 4F3(1)`, with the series a balanced `4F3` summed from `t_min`.
pub fn six_j_as_4f3(s: &SixJ) -> Result<(SqrtRational, PFQSpec)> {
    if let Some(bad) = s.triads().iter().find(|t| !t.is_triangle()) {
        return Err(bad.invalid());
    }
    let racah = RacahSixJ::new(s)?;
    let t = racah.t_min;
    let lead = racah
        .triad_sums
        .iter()
        .position(|&ts| ts == t)
        .expect("t_min is one of the triad sums");
    let mut numerator = vec![int(t + 2)];
    numerator.extend(racah.pair_sums.iter().map(|&ps| int(t - ps)));
    let denominator = racah
        .triad_sums
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != lead)
        .map(|(_, &ts)| int(t - ts + 1))
        .collect();
    let prefactor = six_j_delta_product(s)?.mul_rational(&racah.term(t));
    Ok((prefactor, PFQSpec::new(numerator, denominator)))
}

/// The three 6j arguments and weight of the `x` term in the Racah 9j sum.
fn nine_j_term(s: &NineJ, x: HalfInt) -> Result<SqrtRational> {
    let e = &s.entries;
    let (j1, j2, j3) = (e[0][0], e[0][1], e[0][2]);
    let (j4, j5, j6) = (e[1][0], e[1][1], e[1][2]);
    let (j7, j8, j9) = (e[2][0], e[2][1], e[2][2]);
    let first = six_j(&SixJ::new([j1, j4, j7], [j8, j9, x]))?;
    let second = six_j(&SixJ::new([j2, j5, j8], [j4, x, j6]))?;
    let third = six_j(&SixJ::new([j3, j6, j9], [x, j1, j2]))?;
    let weight = int(x.twice() + 1) * sign_of(phase(x + x)?);
    Ok(sqrt_mul(&sqrt_mul(&first, &second), &third).mul_rational(&weight))
}

/// General 9j symbol as `Σ_x (-1)^{2x} (2x+1)` times three 6j symbols.
///
/// Every term carries the same square-free radicand; a mismatch is reported
/// as `MixedRadicands`.
pub fn nine_j_sum(s: &NineJ) -> Result<SqrtRational> {
    if !s.is_valid() {
        return Ok(SqrtRational::zero());
    }
    let e = &s.entries;
    let pairs = [(e[0][0], e[2][2]), (e[1][0], e[2][1]), (e[0][1], e[1][2])];
    let lo = pairs.iter().map(|&(a, b)| (a - b).abs()).max().unwrap();
    let hi = pairs.iter().map(|&(a, b)| a + b).min().unwrap();
    let mut total = SqrtRational::zero();
    let mut x = lo;
    while x <= hi {
        total = total.checked_add(&nine_j_term(s, x)?)?;
        x = x + HalfInt::from_int(1);
    }
    Ok(total)
}

/// A 9j with a zero entry through the standard reduction to one 6j:
/// `{a b c; d e f; g h 0} = δ_cf δ_gh (-1)^{b+c+d+g} / √((2c+1)(2g+1)) · {a b c; e d g}`.
///
/// Returns `None` when no entry is zero.
pub fn nine_j_via_zero_reduction(s: &NineJ) -> Result<Option<SqrtRational>> {
    let Some(pos) = (0..9).find(|&k| s.entries[k / 3][k % 3].twice() == 0) else {
        return Ok(None);
    };
    if !s.is_valid() {
        return Ok(Some(SqrtRational::zero()));
    }
    let swap = |i: usize| match i {
        2 => [0, 1, 2],
        1 => [0, 2, 1],
        _ => [2, 1, 0],
    };
    let orientation = Orientation {
        transpose: false,
        rows: swap(pos / 3),
        columns: swap(pos % 3),
    };
    let t = orientation.apply(s);
    let e = &t.entries;
    let (a, b, c) = (e[0][0], e[0][1], e[0][2]);
    let (d, ee, f) = (e[1][0], e[1][1], e[1][2]);
    let (g, h) = (e[2][0], e[2][1]);
    if c != f || g != h {
        return Ok(Some(SqrtRational::zero()));
    }
    let mut norm = FactorialProduct::new();
    norm.mul_int((c.twice() + 1) as u64, -1)
        .mul_int((g.twice() + 1) as u64, -1);
    let sign = phase(b + c + d + g)? * orientation.phase(s);
    let six = six_j(&SixJ::new([a, b, c], [ee, d, g]))?;
    Ok(Some(sqrt_mul(&SqrtRational::from_factored(sign, &norm.finish()), &six)))
}
