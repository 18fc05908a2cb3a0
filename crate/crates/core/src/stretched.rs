//! Stretched 9j symbols: template detection over the 72 symmetry images and
//! the closed forms that apply to each template.
//!
//! Doubly stretched `{a b a+b; d e f; e d a+b+f}` has two routes sharing one
//! prefactor: the factorial ratio closed form and the well-poised `5F4(1)`.
//! Both build the square of the prefactor as a single prime-exponent product.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::angular::{mul_delta_squared, mul_eta_squared, phase, HalfInt, NineJ, Orientation, Triad};
use crate::error::{Error, Result};
use crate::exact::{int, FactorialProduct, SqrtRational};
use crate::hypergeom::{eval_direct, wp5f4_integer_parts, wp5f4_spec, PFQSpec};
use crate::oracle::nine_j_sum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PatternKind {
    /// `{a b a+b; d e f; e d a+b+f}`.
    DoublyStretchedVarshalovich,
    /// `{a b c; d e f; a+d a+d+g g}`.
    ColumnStretched,
    /// `{a a 0; d e f; g h f}`.
    ZeroArgument,
    /// `{a b c; d e f; a+d b+e g}`, proportional to a 3j; no closed form is served.
    ThreeJProportional,
    None,
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PatternKind {
    /// Whether the canonical image `t` has this kind's shape.
    fn matches(self, t: &NineJ) -> bool {
        let m = |i: usize, j: usize| t.get(i, j);
        match self {
            Self::DoublyStretchedVarshalovich => {
                m(0, 2) == m(0, 0) + m(0, 1) && m(2, 0) == m(1, 1) && m(2, 1) == m(1, 0) && m(2, 2) == m(0, 2) + m(1, 2)
            }
            Self::ColumnStretched => m(2, 0) == m(0, 0) + m(1, 0) && m(2, 1) == m(2, 0) + m(2, 2),
            Self::ZeroArgument => m(0, 2) == HalfInt::ZERO && m(0, 0) == m(0, 1) && m(1, 2) == m(2, 2),
            Self::ThreeJProportional => m(2, 0) == m(0, 0) + m(1, 0) && m(2, 1) == m(0, 1) + m(1, 1),
            Self::None => true,
        }
    }
}

/// Search order for [`detect`].
const KINDS: [PatternKind; 4] = [
    PatternKind::DoublyStretchedVarshalovich,
    PatternKind::ZeroArgument,
    PatternKind::ColumnStretched,
    PatternKind::ThreeJProportional,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StretchedPattern {
    pub kind: PatternKind,
    /// Maps the input onto the kind's template.
    pub orientation: Orientation,
    /// `value(input) = phase · value(orientation.apply(input))`.
    pub phase: i8,
}

impl StretchedPattern {
    fn none() -> Self {
        Self {
            kind: PatternKind::None,
            orientation: Orientation::IDENTITY,
            phase: 1,
        }
    }
}

impl fmt::Display for StretchedPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == PatternKind::None {
            return write!(f, "None");
        }
        write!(f, "{} / {}", self.kind, self.orientation)?;
        if self.phase < 0 {
            write!(f, " / phase -1")?;
        }
        Ok(())
    }
}

fn check_valid(s: &NineJ) -> Result<()> {
    match s.triads().into_iter().find(|(_, t)| !t.is_triangle()) {
        Some((_, t)) => Err(Error::InvalidTriad(t.0.to_string(), t.1.to_string(), t.2.to_string())),
        None => Ok(()),
    }
}

/// Matches of one kind, in orientation order.
fn matches_of(s: &NineJ, kind: PatternKind) -> impl Iterator<Item = StretchedPattern> + '_ {
    Orientation::all()
        .filter(move |orientation| kind.matches(&orientation.apply(s)))
        .map(move |orientation| StretchedPattern {
            kind,
            orientation,
            phase: orientation.phase(s),
        })
}

/// Every (kind, orientation) match, in search order: kinds first, then orientations.
pub fn detect_all(s: &NineJ) -> Result<Vec<StretchedPattern>> {
    check_valid(s)?;
    Ok(KINDS.into_iter().flat_map(|kind| matches_of(s, kind)).collect())
}

/// The first template match, or `PatternKind::None`.
pub fn detect(s: &NineJ) -> Result<StretchedPattern> {
    Ok(detect_all(s)?.into_iter().next().unwrap_or_else(StretchedPattern::none))
}

fn one() -> HalfInt {
    HalfInt::from_int(1)
}

fn fact(h: HalfInt) -> Result<u64> {
    h.factorial_arg()
}

fn doubly_stretched(a: HalfInt, b: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt) -> NineJ {
    NineJ::new([[a, b, a + b], [d, e, f], [e, d, a + b + f]])
}

/// Square of everything in the doubly stretched closed form except the trailing ratio.
fn doubly_stretched_prefactor(acc: &mut FactorialProduct, a: HalfInt, b: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt) -> Result<()> {
    mul_delta_squared(acc, Triad(a + b + f, e, d), 1)?;
    mul_delta_squared(acc, Triad(a, d, e), -1)?;
    mul_delta_squared(acc, Triad(b, e, d), -1)?;
    mul_delta_squared(acc, Triad(d, e, f), -1)?;
    acc.mul_factorial(fact(a + a)?, 1)
        .mul_factorial(fact(b + b)?, 1)
        .mul_factorial(fact(f + f)?, 1)
        .mul_int(fact(a + a + b + b + one())?, -1)
        .mul_factorial(fact(a + a + b + b + f + f + one())?, -1);
    // the linear factor, squared
    acc.mul_int(fact(a + b + e + d + f + one())?, 2)
        .mul_int(fact(a + e + d + one())?, -2)
        .mul_int(fact(b + e + d + one())?, -2)
        .mul_int(fact(d + e + f + one())?, -2);
    Ok(())
}

/// Doubly stretched 9j `{a b a+b; d e f; e d a+b+f}` by the factorial closed form.
///
/// Arguments outside the triangle conditions give zero.
pub fn nine_j_varshalovich(a: HalfInt, b: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt) -> Result<SqrtRational> {
    if !doubly_stretched(a, b, d, e, f).is_valid() {
        return Ok(SqrtRational::zero());
    }
    let sign = phase(a + d - e)?;
    let mut acc = FactorialProduct::new();
    doubly_stretched_prefactor(&mut acc, a, b, d, e, f)?;
    let n = e + d - a - b - f;
    acc.mul_factorial(fact(a + b + e + d + f)?, 2)
        .mul_factorial(fact(e - a + d)?, 2)
        .mul_factorial(fact(e - b + d)?, 2)
        .mul_factorial(fact(d + e - f)?, 2)
        .mul_factorial(fact(n)?, -2)
        .mul_factorial(fact(a + e + d)?, -2)
        .mul_factorial(fact(b + e + d)?, -2)
        .mul_factorial(fact(d + e + f)?, -2);
    Ok(SqrtRational::from_factored(sign, &acc.finish()))
}

/// `(n, x, y, z) = (e+d-a-b-f, b+f, a+f, a+b)`, each a nonnegative integer on valid input.
fn wp5f4_parameters(a: HalfInt, b: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt) -> Result<[i64; 4]> {
    let n = (e + d - a - b - f).to_int()?;
    if n < 0 {
        return Err(Error::InvalidTriad(
            (a + b + f).to_string(),
            e.to_string(),
            d.to_string(),
        ));
    }
    Ok([n, (b + f).to_int()?, (a + f).to_int()?, (a + b).to_int()?])
}

/// The well-poised series behind [`nine_j_5f4`].
pub fn stretched_5f4_spec(a: HalfInt, b: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt) -> Result<PFQSpec> {
    let [n, x, y, z] = wp5f4_parameters(a, b, d, e, f)?;
    Ok(wp5f4_spec(&int(n), &int(x), &int(y), &int(z)))
}

/// Doubly stretched 9j `{a b a+b; d e f; e d a+b+f}` as a prefactor times a well-poised `5F4(1)`.
///
/// Arguments outside the triangle conditions give zero.
pub fn nine_j_5f4(a: HalfInt, b: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt) -> Result<SqrtRational> {
    if !doubly_stretched(a, b, d, e, f).is_valid() {
        return Ok(SqrtRational::zero());
    }
    let sign = phase(a + d - e)?;
    let [n, x, y, z] = wp5f4_parameters(a, b, d, e, f)?;
    let mut acc = FactorialProduct::new();
    doubly_stretched_prefactor(&mut acc, a, b, d, e, f)?;
    // series = p / D, and D joins the squared prime-exponent product
    let p = wp5f4_integer_parts(n as u64, x as u64, y as u64, z as u64, &mut acc, -2);
    let m = if sign < 0 { -p } else { p };
    Ok(SqrtRational::from_integer_and_factored(m, &acc.finish()))
}

/// Which factorial closes the square root of the column stretched form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ColumnFactorial {
    /// `(2a+2b+2g+1)!`, as the formula is usually quoted.
    Uncorrected,
    /// `(2a+2d+2g+1)!`, the one that agrees with the oracle.
    Corrected,
}

/// Column stretched 9j `{a b c; d e f; a+d a+d+g g}`.
pub fn nine_j_column_stretched_with(
    variant: ColumnFactorial,
    [a, b, c, d, e, f, g]: [HalfInt; 7],
) -> Result<SqrtRational> {
    let s = NineJ::new([[a, b, c], [d, e, f], [a + d, a + d + g, g]]);
    if !s.is_valid() {
        return Ok(SqrtRational::zero());
    }
    let sign = phase(d - e + f)?;
    let mut acc = FactorialProduct::new();
    mul_eta_squared(&mut acc, Triad(a + d + g, b, e), 1)?;
    mul_eta_squared(&mut acc, Triad(a, b, c), -1)?;
    mul_eta_squared(&mut acc, Triad(d, e, f), -1)?;
    mul_eta_squared(&mut acc, Triad(g, c, f), -1)?;
    let closing = match variant {
        ColumnFactorial::Uncorrected => a + a + b + b + g + g + one(),
        ColumnFactorial::Corrected => a + a + d + d + g + g + one(),
    };
    acc.mul_factorial(fact(a + a)?, 1)
        .mul_factorial(fact(d + d)?, 1)
        .mul_factorial(fact(g + g)?, 1)
        .mul_int(fact(a + a + d + d + one())?, -1)
        .mul_factorial(fact(closing)?, -1);
    Ok(SqrtRational::from_factored(sign, &acc.finish()))
}

/// Column stretched 9j `{a b c; d e f; a+d a+d+g g}` with the corrected closing factorial.
pub fn nine_j_column_stretched(a: HalfInt, b: HalfInt, c: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt, g: HalfInt) -> Result<SqrtRational> {
    nine_j_column_stretched_with(ColumnFactorial::Corrected, [a, b, c, d, e, f, g])
}

/// Column stretched form checked against the oracle before being returned.
pub fn nine_j_column_stretched_verified(args: [HalfInt; 7]) -> Result<SqrtRational> {
    let [a, b, c, d, e, f, g] = args;
    let closed = nine_j_column_stretched_with(ColumnFactorial::Corrected, args)?;
    let oracle = nine_j_sum(&NineJ::new([[a, b, c], [d, e, f], [a + d, a + d + g, g]]))?;
    if closed != oracle {
        return Err(Error::FormulaMismatch {
            closed: closed.to_string(),
            oracle: oracle.to_string(),
        });
    }
    Ok(closed)
}

/// Entries up to this (doubled) bound are swept before the column closed form is served.
const CALIBRATION_TWICE: i64 = 4;

/// First disagreement of a column stretched variant with the oracle over a small sweep.
pub fn column_sweep(variant: ColumnFactorial, max_twice: i64) -> Result<Option<NineJ>> {
    let range = 0..=max_twice;
    for ta in range.clone() {
        for tb in range.clone() {
            for tc in range.clone() {
                for td in range.clone() {
                    for te in range.clone() {
                        for tf in range.clone() {
                            for tg in range.clone() {
                                let h = HalfInt::from_twice;
                                let args = [h(ta), h(tb), h(tc), h(td), h(te), h(tf), h(tg)];
                                let [a, b, c, d, e, f, g] = args;
                                let s = NineJ::new([[a, b, c], [d, e, f], [a + d, a + d + g, g]]);
                                if !s.is_valid() {
                                    continue;
                                }
                                if nine_j_column_stretched_with(variant, args)? != nine_j_sum(&s)? {
                                    return Ok(Some(s));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Whether the column closed form passed its calibration sweep; computed once.
pub fn column_closed_enabled() -> bool {
    static ENABLED: OnceLock<bool> = OnceLock::new();
    *ENABLED.get_or_init(|| matches!(column_sweep(ColumnFactorial::Corrected, CALIBRATION_TWICE), Ok(None)))
}

/// `{a a 0; d e f; g h f}` as a prefactor times a `4F3(1)`.
///
/// The series is the Racah sum of the reduced 6j taken downward from
/// `a+e+f+g`; it needs `β2, β3 > 0`, otherwise `PoleError`.
pub fn nine_j_zero_arg(a: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt, g: HalfInt, h: HalfInt) -> Result<SqrtRational> {
    let s = NineJ::new([[a, a, HalfInt::ZERO], [d, e, f], [g, h, f]]);
    if !s.is_valid() {
        return Ok(SqrtRational::zero());
    }
    let (spec, beta) = zero_arg_spec(a, d, e, f, g, h)?;
    for (i, b) in beta.iter().enumerate().skip(1) {
        if *b <= 0 {
            return Err(Error::PoleError(format!("Γ(β{}) with β{} = {b}", i + 1, i + 1)));
        }
    }
    let sign = phase(a + e + f + g)? * phase(HalfInt::from_int(beta[0] + 1))?;
    let mut acc = FactorialProduct::new();
    acc.mul_int(fact(a + a + one())?, -1).mul_int(fact(f + f + one())?, -1);
    for t in [Triad(a, e, h), Triad(f, g, h), Triad(a, g, d), Triad(f, e, d)] {
        mul_delta_squared(&mut acc, t, 1)?;
    }
    // Γ(1-β1) / [Π Γ(1-αi) Γ(β2) Γ(β3)], squared to sit under the root
    acc.mul_factorial((1 - beta[0]) as u64 - 1, 2);
    for alpha in &spec.numerator {
        let m = crate::exact::as_i64(alpha).expect("alpha is an integer");
        acc.mul_factorial((-m) as u64, -2);
    }
    acc.mul_factorial(beta[1] as u64 - 1, -2).mul_factorial(beta[2] as u64 - 1, -2);
    let series = eval_direct(&spec)?.value;
    Ok(SqrtRational::from_factored(sign, &acc.finish()).mul_rational(&series))
}

/// The `4F3` of [`nine_j_zero_arg`] and its lower parameters as integers.
pub fn zero_arg_spec(a: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt, g: HalfInt, h: HalfInt) -> Result<(PFQSpec, [i64; 3])> {
    let alpha = [(h - a - e).to_int()?, (h - f - g).to_int()?, (d - a - g).to_int()?, (d - e - f).to_int()?];
    let beta = [
        (-a - e - f - g - one()).to_int()?,
        (d + h - e - g + one()).to_int()?,
        (d + h - a - f + one()).to_int()?,
    ];
    let spec = PFQSpec::new(alpha.iter().map(|&v| int(v)).collect(), beta.iter().map(|&v| int(v)).collect());
    Ok((spec, beta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    FiveF4,
    VarshalovichClosed,
    ZeroArg4F3,
    ColumnClosed,
    OracleSum,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::FiveF4,
        Method::VarshalovichClosed,
        Method::ZeroArg4F3,
        Method::ColumnClosed,
        Method::OracleSum,
    ];

    /// The template this method evaluates, or `None` for the oracle.
    pub fn kind(self) -> Option<PatternKind> {
        match self {
            Self::FiveF4 | Self::VarshalovichClosed => Some(PatternKind::DoublyStretchedVarshalovich),
            Self::ZeroArg4F3 => Some(PatternKind::ZeroArgument),
            Self::ColumnClosed => Some(PatternKind::ColumnStretched),
            Self::OracleSum => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.to_string().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::ParseError { token: s.to_string() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Fast,
    /// Also evaluates the oracle and fails on disagreement.
    Verified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodReport {
    pub method: Method,
    pub value: SqrtRational,
    pub pattern: StretchedPattern,
}

/// Evaluates the canonical image `t` of a pattern by `method`.
fn evaluate_image(method: Method, t: &NineJ) -> Result<SqrtRational> {
    let m = |i: usize, j: usize| t.get(i, j);
    match method {
        Method::FiveF4 => nine_j_5f4(m(0, 0), m(0, 1), m(1, 0), m(1, 1), m(1, 2)),
        Method::VarshalovichClosed => nine_j_varshalovich(m(0, 0), m(0, 1), m(1, 0), m(1, 1), m(1, 2)),
        Method::ZeroArg4F3 => nine_j_zero_arg(m(0, 0), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1)),
        Method::ColumnClosed => nine_j_column_stretched(m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 2)),
        Method::OracleSum => nine_j_sum(t),
    }
}

/// Fast-path dispatch with a configurable method priority.
#[derive(Clone, Debug)]
pub struct Dispatcher {
    priority: Vec<Method>,
}

impl Default for Dispatcher {
    fn default() -> Self {
        Self {
            priority: Method::ALL.to_vec(),
        }
    }
}

impl Dispatcher {
    /// Methods are tried in the given order; `OracleSum` is always the last resort.
    pub fn with_priority(priority: Vec<Method>) -> Self {
        Self { priority }
    }

    pub fn priority(&self) -> &[Method] {
        &self.priority
    }

    fn allowed(method: Method) -> bool {
        method != Method::ColumnClosed || column_closed_enabled()
    }

    /// The method and pattern [`Dispatcher::evaluate`] would use in fast mode.
    pub fn select(&self, s: &NineJ) -> Result<(Method, StretchedPattern)> {
        let report = self.evaluate(s, Mode::Fast)?;
        Ok((report.method, report.pattern))
    }

    pub fn evaluate(&self, s: &NineJ, mode: Mode) -> Result<MethodReport> {
        let report = self.fast(s)?;
        if mode == Mode::Verified && report.method != Method::OracleSum {
            let oracle = nine_j_sum(s)?;
            if oracle != report.value {
                if report.method == Method::ColumnClosed {
                    return Err(Error::FormulaMismatch {
                        closed: report.value.to_string(),
                        oracle: oracle.to_string(),
                    });
                }
                return Err(Error::VerificationMismatch {
                    method: report.method.to_string(),
                    got: report.value.to_string(),
                    expected: oracle.to_string(),
                });
            }
        }
        Ok(report)
    }

    fn fast(&self, s: &NineJ) -> Result<MethodReport> {
        let oracle = |pattern| -> Result<MethodReport> {
            Ok(MethodReport {
                method: Method::OracleSum,
                value: nine_j_sum(s)?,
                pattern,
            })
        };
        if !s.is_valid() {
            return oracle(StretchedPattern::none());
        }
        let patterns = detect_all(s)?;
        for &method in self.priority.iter().filter(|&&m| Self::allowed(m)) {
            let Some(kind) = method.kind() else {
                break;
            };
            for p in patterns.iter().filter(|p| p.kind == kind) {
                match evaluate_image(method, &p.orientation.apply(s)) {
                    Ok(v) => {
                        return Ok(MethodReport {
                            method,
                            value: if p.phase < 0 { -v } else { v },
                            pattern: *p,
                        })
                    }
                    Err(Error::PoleError(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
        oracle(patterns.first().copied().unwrap_or_else(StretchedPattern::none))
    }
}

/// Dispatch with the default priority `FiveF4 > VarshalovichClosed > ZeroArg4F3 > ColumnClosed > OracleSum`.
pub fn nine_j_auto(s: &NineJ, mode: Mode) -> Result<MethodReport> {
    Dispatcher::default().evaluate(s, mode)
}

/// Evaluates `s` by exactly `method`, in the first orientation where it applies.
pub fn evaluate_with(s: &NineJ, method: Method) -> Result<SqrtRational> {
    let Some(kind) = method.kind() else {
        return nine_j_sum(s);
    };
    let inapplicable = || Error::MethodInapplicable {
        method: method.to_string(),
        symbol: s.to_string(),
    };
    if !s.is_valid() {
        return Err(inapplicable());
    }
    let mut last_pole = None;
    for p in matches_of(s, kind) {
        match evaluate_image(method, &p.orientation.apply(s)) {
            Ok(v) => return Ok(if p.phase < 0 { -v } else { v }),
            Err(Error::PoleError(e)) => last_pole = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_pole.map(Error::PoleError).unwrap_or_else(inapplicable))
}
