//! Half-integer momenta, triads, the Δ and η triangle coefficients, and the 9j container.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{FactorialProduct, SqrtRational};

/// An angular momentum or projection, stored as the integer `2j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    pub const fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    pub const fn from_int(j: i64) -> Self {
        Self { twice: 2 * j }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn abs(self) -> Self {
        Self { twice: self.twice.abs() }
    }

    /// The value as an integer; a half-integer here is a bookkeeping error.
    pub fn to_int(self) -> Result<i64> {
        if self.is_integer() {
            Ok(self.twice / 2)
        } else {
            Err(Error::ParityViolation(self.to_string()))
        }
    }

    /// The value as a factorial argument: integer and nonnegative.
    pub fn factorial_arg(self) -> Result<u64> {
        let n = self.to_int()?;
        u64::try_from(n).map_err(|_| Error::InvalidParameter {
            name: "factorial argument",
            value: self.to_string(),
        })
    }
}

/// `(-1)^j` for an integer `j`.
pub fn phase(j: HalfInt) -> Result<i8> {
    Ok(if j.to_int()?.rem_euclid(2) == 0 { 1 } else { -1 })
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Parses `"7"`, `"7/2"` or `"3.5"` (optionally signed) into an exact half-integer.
pub fn parse_halfint(text: &str) -> Result<HalfInt> {
    let bad = || Error::ParseError {
        token: text.to_string(),
    };
    let t = text.trim();
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let twice = if let Some((n, d)) = body.split_once('/') {
        if !digits(n) || !digits(d) {
            return Err(bad());
        }
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        if d == 0 || (2 * n) % d != 0 {
            return Err(bad());
        }
        2 * n / d
    } else if let Some((whole, frac)) = body.split_once('.') {
        if !digits(whole) || !(frac.is_empty() || digits(frac)) {
            return Err(bad());
        }
        let whole: i64 = whole.parse().map_err(|_| bad())?;
        let frac = frac.trim_end_matches('0');
        match frac {
            "" => 2 * whole,
            "5" => 2 * whole + 1,
            _ => return Err(bad()),
        }
    } else {
        if !digits(body) {
            return Err(bad());
        }
        2 * body.parse::<i64>().map_err(|_| bad())?
    };
    Ok(HalfInt::from_twice(if negative { -twice } else { twice }))
}

impl FromStr for HalfInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_halfint(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triad(pub HalfInt, pub HalfInt, pub HalfInt);

impl Triad {
    pub fn new(a: HalfInt, b: HalfInt, c: HalfInt) -> Self {
        Self(a, b, c)
    }

    /// Triangle inequality plus integer perimeter.
    pub fn is_triangle(&self) -> bool {
        let (a, b, c) = (self.0.twice, self.1.twice, self.2.twice);
        a >= 0 && b >= 0 && c >= 0 && (a - b).abs() <= c && c <= a + b && (a + b + c) % 2 == 0
    }

    fn check(&self) -> Result<()> {
        if self.is_triangle() {
            Ok(())
        } else {
            Err(self.invalid())
        }
    }

    pub(crate) fn invalid(&self) -> Error {
        Error::InvalidTriad(self.0.to_string(), self.1.to_string(), self.2.to_string())
    }
}

impl fmt::Display for Triad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0, self.1, self.2)
    }
}

pub fn is_triangle(t: Triad) -> bool {
    t.is_triangle()
}

/// Multiplies `acc` by `Δ(a,b,c)^(2·power)`.
pub(crate) fn mul_delta_squared(acc: &mut FactorialProduct, t: Triad, power: i64) -> Result<()> {
    t.check()?;
    let Triad(a, b, c) = t;
    acc.mul_factorial((a + b - c).factorial_arg()?, power)
        .mul_factorial((a - b + c).factorial_arg()?, power)
        .mul_factorial((b + c - a).factorial_arg()?, power)
        .mul_factorial((a + b + c + HalfInt::from_int(1)).factorial_arg()?, -power);
    Ok(())
}

/// Multiplies `acc` by `η(a,b,c)^(2·power)`.
pub(crate) fn mul_eta_squared(acc: &mut FactorialProduct, t: Triad, power: i64) -> Result<()> {
    t.check()?;
    let Triad(a, b, c) = t;
    acc.mul_factorial((a - b + c).factorial_arg()?, power)
        .mul_factorial((a + b - c).factorial_arg()?, power)
        .mul_factorial((a + b + c + HalfInt::from_int(1)).factorial_arg()?, power)
        .mul_factorial((b + c - a).factorial_arg()?, -power);
    Ok(())
}

/// `Δ(a,b,c) = [(a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!]^{1/2}`.
pub fn delta_coeff(t: Triad) -> Result<SqrtRational> {
    let mut acc = FactorialProduct::new();
    mul_delta_squared(&mut acc, t, 1)?;
    Ok(SqrtRational::from_factored(1, &acc.finish()))
}

/// `η(a,b,c) = [(a-b+c)!(a+b-c)!(a+b+c+1)!/(-a+b+c)!]^{1/2}`. Symmetric in `b, c` only.
pub fn eta_coeff(t: Triad) -> Result<SqrtRational> {
    let mut acc = FactorialProduct::new();
    mul_eta_squared(&mut acc, t, 1)?;
    Ok(SqrtRational::from_factored(1, &acc.finish()))
}

/// Which line of a 9j array a triad came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Line {
    Row(usize),
    Column(usize),
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::Row(i) => write!(f, "row {}", i + 1),
            Line::Column(j) => write!(f, "column {}", j + 1),
        }
    }
}

/// A 9j symbol `{j11 j12 j13; j21 j22 j23; j31 j32 j33}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct NineJ {
    pub entries: [[HalfInt; 3]; 3],
}

impl NineJ {
    pub fn new(entries: [[HalfInt; 3]; 3]) -> Self {
        Self { entries }
    }

    pub fn from_twice(t: [[i64; 3]; 3]) -> Self {
        Self::new(t.map(|row| row.map(HalfInt::from_twice)))
    }

    pub fn from_ints(t: [[i64; 3]; 3]) -> Self {
        Self::new(t.map(|row| row.map(HalfInt::from_int)))
    }

    pub fn get(&self, row: usize, col: usize) -> HalfInt {
        self.entries[row][col]
    }

    pub fn row(&self, i: usize) -> Triad {
        let r = self.entries[i];
        Triad(r[0], r[1], r[2])
    }

    pub fn column(&self, j: usize) -> Triad {
        Triad(self.entries[0][j], self.entries[1][j], self.entries[2][j])
    }

    /// The three rows followed by the three columns.
    pub fn triads(&self) -> [(Line, Triad); 6] {
        [
            (Line::Row(0), self.row(0)),
            (Line::Row(1), self.row(1)),
            (Line::Row(2), self.row(2)),
            (Line::Column(0), self.column(0)),
            (Line::Column(1), self.column(1)),
            (Line::Column(2), self.column(2)),
        ]
    }

    pub fn is_valid(&self) -> bool {
        self.triads().iter().all(|(_, t)| t.is_triangle())
    }

    /// Twice the sum of all nine entries.
    pub fn twice_sum(&self) -> i64 {
        self.entries.iter().flatten().map(|j| j.twice()).sum()
    }

    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        Self::new([0, 1, 2].map(|i| [e[0][i], e[1][i], e[2][i]]))
    }

    /// Rows reordered so that new row `i` is old row `perm[i]`.
    pub fn permute_rows(&self, perm: [usize; 3]) -> Self {
        Self::new(perm.map(|i| self.entries[i]))
    }

    /// Columns reordered so that new column `j` is old column `perm[j]`.
    pub fn permute_columns(&self, perm: [usize; 3]) -> Self {
        Self::new(self.entries.map(|row| perm.map(|j| row[j])))
    }
}

/// One of the 72 row/column symmetry operations of a 9j array.
///
/// Applied as optional transposition, then row permutation, then column permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    pub transpose: bool,
    pub rows: [usize; 3],
    pub columns: [usize; 3],
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn is_odd(p: [usize; 3]) -> bool {
    let inversions = (p[0] > p[1]) as u8 + (p[0] > p[2]) as u8 + (p[1] > p[2]) as u8;
    inversions % 2 == 1
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation {
        transpose: false,
        rows: [0, 1, 2],
        columns: [0, 1, 2],
    };

    pub const TRANSPOSE: Orientation = Orientation {
        transpose: true,
        rows: [0, 1, 2],
        columns: [0, 1, 2],
    };

    /// All 72 operations, identity first, then the other non-transposed ones.
    pub fn all() -> impl Iterator<Item = Orientation> {
        [false, true].into_iter().flat_map(|transpose| {
            PERMUTATIONS.into_iter().flat_map(move |rows| {
                PERMUTATIONS.into_iter().map(move |columns| Orientation {
                    transpose,
                    rows,
                    columns,
                })
            })
        })
    }

    pub fn apply(&self, s: &NineJ) -> NineJ {
        let t = if self.transpose { s.transpose() } else { *s };
        t.permute_rows(self.rows).permute_columns(self.columns)
    }

    /// Whether the operation is an odd permutation of rows and columns combined.
    pub fn is_odd(&self) -> bool {
        is_odd(self.rows) != is_odd(self.columns)
    }

    /// `±1` for `value(s) = phase · value(apply(s))`: `(-1)^S` for odd operations.
    pub fn phase(&self, s: &NineJ) -> i8 {
        if self.is_odd() && s.twice_sum() % 4 != 0 {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::IDENTITY {
            return write!(f, "identity");
        }
        if *self == Self::TRANSPOSE {
            return write!(f, "transposed");
        }
        let perm = |p: [usize; 3]| format!("{}{}{}", p[0] + 1, p[1] + 1, p[2] + 1);
        write!(
            f,
            "{}rows {} columns {}",
            if self.transpose { "transposed, " } else { "" },
            perm(self.rows),
            perm(self.columns)
        )
    }
}

/// Triads of `s` that fail the triangle condition.
pub fn ninej_validate(s: &NineJ) -> Vec<(Line, Triad)> {
    s.triads().into_iter().filter(|(_, t)| !t.is_triangle()).collect()
}

impl fmt::Display for NineJ {
    /// Nine whitespace-separated tokens, row-major.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<String> = self.entries.iter().flatten().map(|j| j.to_string()).collect();
        write!(f, "{}", tokens.join(" "))
    }
}

impl FromStr for NineJ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        parse_ninej(&tokens)
    }
}

/// Nine row-major tokens; every entry must be a nonnegative half-integer.
pub fn parse_ninej<S: AsRef<str>>(tokens: &[S]) -> Result<NineJ> {
    if tokens.len() != 9 {
        return Err(Error::InvalidParameter {
            name: "token count",
            value: tokens.len().to_string(),
        });
    }
    let mut entries = [[HalfInt::ZERO; 3]; 3];
    for (k, tok) in tokens.iter().enumerate() {
        let j = parse_halfint(tok.as_ref())?;
        if j.twice() < 0 {
            return Err(Error::ParseError {
                token: tok.as_ref().to_string(),
            });
        }
        entries[k / 3][k % 3] = j;
    }
    Ok(NineJ::new(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{factorial, rat, Rational};
    use proptest::prelude::*;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_halfint("7/2").unwrap().twice(), 7);
        assert_eq!(parse_halfint("3.5").unwrap().twice(), 7);
        assert_eq!(parse_halfint("4").unwrap().twice(), 8);
        assert_eq!(parse_halfint("-1/2").unwrap().twice(), -1);
        assert_eq!(parse_halfint("2.50").unwrap().twice(), 5);
        assert_eq!(parse_halfint("6/4").unwrap().twice(), 3);
        for bad in ["0.3", "1/3", "", "x", "1/0", "--1", "1.5.5", "/2"] {
            match parse_halfint(bad) {
                Err(Error::ParseError { token }) => assert_eq!(token, bad),
                other => panic!("{bad:?} parsed as {other:?}"),
            }
        }
    }

    #[test]
    fn display_uses_fractions() {
        assert_eq!(h(7).to_string(), "7/2");
        assert_eq!(h(-3).to_string(), "-3/2");
        assert_eq!(h(6).to_string(), "3");
    }

    #[test]
    fn triangles() {
        assert!(Triad(h(1), h(1), h(2)).is_triangle());
        assert!(!Triad(h(2), h(2), h(6)).is_triangle());
        assert!(!Triad(h(1), h(1), h(1)).is_triangle());
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_coeff(Triad(h(0), h(0), h(0))).unwrap(), SqrtRational::one());
        assert_eq!(delta_coeff(Triad(h(1), h(1), h(2))).unwrap().square(), rat(1, 6));
        assert_eq!(delta_coeff(Triad(h(2), h(2), h(2))).unwrap().square(), rat(1, 24));
        assert!(matches!(delta_coeff(Triad(h(2), h(2), h(6))), Err(Error::InvalidTriad(..))));
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_coeff(Triad(h(0), h(0), h(0))).unwrap(), SqrtRational::one());
        assert_eq!(eta_coeff(Triad(h(1), h(1), h(2))).unwrap().square(), rat(6, 1));
    }

    #[test]
    fn validate_examples() {
        assert!(ninej_validate(&NineJ::default()).is_empty());
        let example = NineJ::from_ints([[6, 10, 16], [14, 12, 8], [12, 14, 24]]);
        assert!(ninej_validate(&example).is_empty());
        let bad = NineJ::from_ints([[1, 1, 3], [0, 0, 0], [0, 0, 0]]);
        let invalid = ninej_validate(&bad);
        assert!(invalid.iter().any(|(line, _)| *line == Line::Row(0)));
    }

    #[test]
    fn ninej_text_round_trip() {
        let s: NineJ = "3/2 3.5 2 0 1 1 3/2 5/2 1".parse().unwrap();
        assert_eq!(s.get(0, 1).twice(), 7);
        assert_eq!(s.to_string(), "3/2 7/2 2 0 1 1 3/2 5/2 1");
        assert!("1 2 3".parse::<NineJ>().is_err());
        assert!("1 2 3 4 5 6 7 8 -1".parse::<NineJ>().is_err());
    }

    fn valid_triad() -> impl Strategy<Value = Triad> {
        (0i64..16, 0i64..16, 0i64..32).prop_filter_map("not a triangle", |(a, b, c)| {
            let t = Triad(h(a), h(b), h(c));
            t.is_triangle().then_some(t)
        })
    }

    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

    proptest! {
        #[test]
        fn triangle_is_permutation_invariant(a in 0i64..12, b in 0i64..12, c in 0i64..12) {
            let v = [h(a), h(b), h(c)];
            let base = Triad(v[0], v[1], v[2]).is_triangle();
            for p in PERMS {
                prop_assert_eq!(Triad(v[p[0]], v[p[1]], v[p[2]]).is_triangle(), base);
            }
        }

        #[test]
        fn delta_is_fully_symmetric(t in valid_triad()) {
            let v = [t.0, t.1, t.2];
            let base = delta_coeff(t).unwrap();
            for p in PERMS {
                prop_assert_eq!(delta_coeff(Triad(v[p[0]], v[p[1]], v[p[2]])).unwrap(), base.clone());
            }
        }

        #[test]
        fn eta_symmetric_in_last_two(t in valid_triad()) {
            prop_assert_eq!(eta_coeff(t).unwrap(), eta_coeff(Triad(t.0, t.2, t.1)).unwrap());
        }

        #[test]
        fn eta_times_delta(t in valid_triad()) {
            // η·Δ = (a-b+c)!(a+b-c)!
            let Triad(a, b, c) = t;
            let prod = eta_coeff(t).unwrap() * delta_coeff(t).unwrap();
            let expected = factorial((a - b + c).factorial_arg().unwrap())
                .mul(&factorial((a + b - c).factorial_arg().unwrap()))
                .to_rational();
            prop_assert_eq!(prod, SqrtRational::from_rational(expected));
        }

        #[test]
        fn delta_squared_times_perimeter_factorial(t in valid_triad()) {
            let Triad(a, b, c) = t;
            let one = HalfInt::from_int(1);
            let lhs: Rational = delta_coeff(t).unwrap().square()
                * factorial((a + b + c + one).factorial_arg().unwrap()).to_rational();
            let rhs = [a + b - c, a - b + c, b + c - a]
                .iter()
                .map(|x| factorial(x.factorial_arg().unwrap()).to_rational())
                .product::<Rational>();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
