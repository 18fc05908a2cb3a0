//! `wigner9j`: compute, classify, verify and benchmark Wigner symbols.
//!
//! Exit codes: 0 ok, 1 I/O failure, 2 usage or parse error, 3 value mismatch,
//! 4 identity sweep failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use wigner9j::angular::{parse_halfint, parse_ninej, HalfInt, NineJ};
use wigner9j::bench::bench;
use wigner9j::exact::{int, SqrtRational};
use wigner9j::hypergeom::{dixon_rhs, dougall_rhs, dougall_rhs_transposed, eval_direct, eval_wp5f4, wp5f4_spec};
use wigner9j::oracle::{nine_j_sum, six_j, three_j, SixJ, ThreeJ};
use wigner9j::stretched::{
    detect_all, evaluate_with, nine_j_5f4, nine_j_auto, nine_j_varshalovich, Dispatcher, Method, Mode, PatternKind,
};
use wigner9j::Error;

#[derive(Parser)]
#[command(name = "wigner9j", version, about = "Exact Wigner 3j, 6j and 9j symbols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 3j symbol: j1 j2 j3 m1 m2 m3
    #[command(name = "3j")]
    ThreeJ(ComputeArgs),
    /// 6j symbol: j1 j2 j3 j4 j5 j6
    #[command(name = "6j")]
    SixJ(ComputeArgs),
    /// 9j symbol, nine entries in row order
    #[command(name = "9j")]
    NineJ(ComputeArgs),
    /// Stretched pattern and the method the dispatcher would pick
    Classify(ClassifyArgs),
    /// Sweep the Dougall and Dixon identities and the stretched-path corpus
    Verify(VerifyArgs),
    /// Time methods on one 9j symbol; prints JSON lines
    Bench(BenchArgs),
    /// Tabulate a grid of 9j symbols as CSV or JSON lines
    Table(TableArgs),
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(required = true, allow_hyphen_values = true)]
    tokens: Vec<String>,
    /// Force one method (9j only)
    #[arg(long)]
    method: Option<String>,
    /// exact, decimal=N or json
    #[arg(long, default_value = "exact")]
    format: String,
    /// Cross-check against the oracle sum (9j only)
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(required = true)]
    tokens: Vec<String>,
    /// exact or json
    #[arg(long, default_value = "exact")]
    format: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest n in the Dougall grid
    #[arg(long, default_value_t = 6)]
    max_n: i64,
    /// Largest x, y, z in the Dougall grid
    #[arg(long, default_value_t = 5)]
    max_xyz: i64,
    /// Largest momentum in the stretched-path corpus
    #[arg(long, default_value = "3")]
    max_j: String,
    /// Check the Dougall right-hand side with the transposed Gamma ratio
    #[arg(long, hide = true)]
    transposed_dougall: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(required = true)]
    tokens: Vec<String>,
    /// Methods to time, repeated or comma separated; default is every applicable one
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    #[arg(long, default_value_t = 101)]
    reps: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Nine ranges, one per entry in row order
    General,
    /// Five ranges a b d e f of `{a b a+b; d e f; e d a+b+f}`
    Stretched,
}

#[derive(Args)]
struct TableArgs {
    /// Ranges `lo:hi[:step]` or single values; `lo > hi` is empty
    #[arg(required = true)]
    ranges: Vec<String>,
    #[arg(long, value_enum, default_value_t = Family::General)]
    family: Family,
    /// csv (default), decimal=N for the decimal column, or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Check every row against the oracle sum
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ParseError { .. }
            | Error::InvalidParameter { .. }
            | Error::InvalidTriad(..)
            | Error::MethodInapplicable { .. } => 2,
            Error::VerificationMismatch { .. } | Error::FormulaMismatch { .. } => 3,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Exact,
    Decimal(usize),
    Json,
}

impl FromStr for Format {
    type Err = Failure;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || Failure::new(2, format!("unknown format '{s}', expected exact, decimal=N or json"));
        match s {
            "exact" => Ok(Format::Exact),
            "json" => Ok(Format::Json),
            _ => {
                let digits = s.strip_prefix("decimal=").ok_or_else(bad)?;
                match digits.parse::<usize>() {
                    Ok(d) if d >= 1 => Ok(Format::Decimal(d)),
                    _ => Err(Failure::new(2, format!("decimal digits must be a positive integer, got '{digits}'"))),
                }
            }
        }
    }
}

const DEFAULT_DIGITS: usize = 15;

fn render(value: &SqrtRational, format: Format) -> String {
    match format {
        Format::Decimal(d) => value.to_decimal(d),
        _ => value.to_string(),
    }
}

fn parse_tokens(tokens: &[String], count: usize, what: &str) -> CliResult<Vec<HalfInt>> {
    if tokens.len() != count {
        return Err(Failure::new(2, format!("{what} needs {count} tokens, got {}", tokens.len())));
    }
    Ok(tokens.iter().map(|t| parse_halfint(t)).collect::<Result<_, _>>()?)
}

fn parse_symbol(tokens: &[String]) -> CliResult<NineJ> {
    if tokens.len() != 9 {
        return Err(Failure::new(2, format!("9j needs 9 tokens, got {}", tokens.len())));
    }
    Ok(parse_ninej(tokens)?)
}

fn parse_method(name: &str) -> CliResult<Method> {
    Method::from_str(name).map_err(|_| {
        let known: Vec<String> = Method::ALL.iter().map(|m| m.to_string()).collect();
        Failure::new(2, format!("unknown method '{name}', expected one of {}", known.join(", ")))
    })
}

fn reject_negative(values: &[HalfInt], tokens: &[String]) -> CliResult<()> {
    match values.iter().position(|v| v.twice() < 0) {
        Some(i) => Err(Failure::new(2, format!("cannot parse '{}': momenta are nonnegative", tokens[i]))),
        None => Ok(()),
    }
}

fn print_value(kind: &str, symbol: String, value: &SqrtRational, format: Format, extra: serde_json::Value) {
    if format == Format::Json {
        let mut record = json!({
            "symbol": symbol,
            "kind": kind,
            "value": value.to_string(),
            "decimal": value.to_decimal(DEFAULT_DIGITS),
        });
        if let (Some(map), serde_json::Value::Object(more)) = (record.as_object_mut(), extra) {
            map.extend(more);
        }
        println!("{record}");
    } else {
        println!("{}", render(value, format));
    }
}

fn cmd_three_j(args: &ComputeArgs) -> CliResult<()> {
    let format: Format = args.format.parse()?;
    let v = parse_tokens(&args.tokens, 6, "3j")?;
    reject_negative(&v[..3], &args.tokens)?;
    let value = three_j(&ThreeJ {
        j: [v[0], v[1], v[2]],
        m: [v[3], v[4], v[5]],
    })?;
    let symbol = v.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(" ");
    print_value("3j", symbol, &value, format, json!({}));
    Ok(())
}

fn cmd_six_j(args: &ComputeArgs) -> CliResult<()> {
    let format: Format = args.format.parse()?;
    let v = parse_tokens(&args.tokens, 6, "6j")?;
    reject_negative(&v, &args.tokens)?;
    let value = six_j(&SixJ::new([v[0], v[1], v[2]], [v[3], v[4], v[5]]))?;
    let symbol = v.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(" ");
    print_value("6j", symbol, &value, format, json!({}));
    Ok(())
}

fn cmd_nine_j(args: &ComputeArgs) -> CliResult<()> {
    let format: Format = args.format.parse()?;
    let s = parse_symbol(&args.tokens)?;
    let mode = if args.verify { Mode::Verified } else { Mode::Fast };
    let (method, value) = match &args.method {
        Some(name) => {
            let method = parse_method(name)?;
            let value = evaluate_with(&s, method)?;
            if args.verify {
                let oracle = nine_j_sum(&s)?;
                if oracle != value {
                    return Err(Error::VerificationMismatch {
                        method: method.to_string(),
                        got: value.to_string(),
                        expected: oracle.to_string(),
                    }
                    .into());
                }
            }
            (method, value)
        }
        None => {
            let report = nine_j_auto(&s, mode)?;
            (report.method, report.value)
        }
    };
    print_value("9j", s.to_string(), &value, format, json!({ "method": method, "verified": args.verify }));
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs) -> CliResult<()> {
    let s = parse_symbol(&args.tokens)?;
    let (method, pattern) = Dispatcher::default().select(&s)?;
    if args.format == "json" {
        println!(
            "{}",
            json!({
                "symbol": s.to_string(),
                "kind": pattern.kind,
                "orientation": pattern.orientation.to_string(),
                "phase": pattern.phase,
                "method": method,
            })
        );
    } else {
        println!("{pattern} / {method}");
    }
    Ok(())
}

/// Tally of one sweep: checked count and the first failing case.
#[derive(Default)]
struct Sweep {
    checked: usize,
    failed: usize,
    first_failure: Option<String>,
}

impl Sweep {
    fn record(&mut self, ok: bool, case: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(case());
            }
        }
    }

    fn report(&self, name: &str) {
        let status = if self.failed == 0 { "PASS" } else { "FAIL" };
        print!("{status} {name}: {} checked, {} failed", self.checked, self.failed);
        match &self.first_failure {
            Some(case) => println!(", first failure {case}"),
            None => println!(),
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    if args.max_n < 0 || args.max_xyz < 0 {
        return Err(Failure::new(2, "grid bounds must be nonnegative"));
    }
    let max_j = parse_halfint(&args.max_j)?;
    if max_j.twice() < 0 {
        return Err(Failure::new(2, format!("cannot parse '{}': bound must be nonnegative", args.max_j)));
    }

    let mut dougall = Sweep::default();
    for n in 0..=args.max_n {
        for x in 0..=args.max_xyz {
            for y in 0..=args.max_xyz {
                for z in 0..=args.max_xyz {
                    let (n, x, y, z) = (int(n), int(x), int(y), int(z));
                    let lhs = eval_wp5f4(&n, &x, &y, &z)?;
                    let rhs = if args.transposed_dougall {
                        dougall_rhs_transposed(&n, &x, &y, &z)?
                    } else {
                        dougall_rhs(&n, &x, &y, &z)?
                    };
                    dougall.record(lhs == rhs, || format!("(n, x, y, z) = ({n}, {x}, {y}, {z}): series {lhs}, right-hand side {rhs}"));
                }
            }
        }
    }
    dougall.report(if args.transposed_dougall { "Dougall (transposed form)" } else { "Dougall" });

    let mut dixon = Sweep::default();
    for n in (0..=args.max_n).step_by(2) {
        for x in 0..=args.max_xyz {
            for y in 0..=args.max_xyz {
                let (n, x, y) = (int(n), int(x), int(y));
                let series = wp5f4_spec(&n, &x, &y, &(-&n / int(2))).cancel_pairs();
                let lhs = eval_direct(&series)?.value;
                let rhs = dixon_rhs(&n, &x, &y)?;
                dixon.record(lhs == rhs, || format!("(n, x, y) = ({n}, {x}, {y}): series {lhs}, Dixon {rhs}"));
            }
        }
    }
    dixon.report("Dixon");

    let mut stretched = Sweep::default();
    let top = max_j.twice();
    for ta in 0..=top {
        for tb in 0..=top {
            for td in 0..=top {
                for te in 0..=top {
                    for tf in 0..=top {
                        let [a, b, d, e, f] = [ta, tb, td, te, tf].map(HalfInt::from_twice);
                        let s = NineJ::new([[a, b, a + b], [d, e, f], [e, d, a + b + f]]);
                        if !s.is_valid() {
                            continue;
                        }
                        let five = nine_j_5f4(a, b, d, e, f)?;
                        let closed = nine_j_varshalovich(a, b, d, e, f)?;
                        let oracle = nine_j_sum(&s)?;
                        stretched.record(five == closed && closed == oracle, || {
                            format!("{{{s}}}: FiveF4 {five}, closed {closed}, oracle {oracle}")
                        });
                    }
                }
            }
        }
    }
    stretched.report("stretched paths");

    let sweeps = [&dougall, &dixon, &stretched];
    match sweeps.iter().find_map(|s| s.first_failure.as_ref()) {
        Some(case) => Err(Failure::new(4, format!("identity sweep failed at {case}"))),
        None => Ok(()),
    }
}

fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    if args.reps == 0 {
        return Err(Failure::new(2, "--reps must be at least 1"));
    }
    let s = parse_symbol(&args.tokens)?;
    let methods: Vec<Method> = if args.method.is_empty() {
        let kinds: Vec<PatternKind> = if s.is_valid() {
            detect_all(&s)?.iter().map(|p| p.kind).collect()
        } else {
            Vec::new()
        };
        Method::ALL
            .into_iter()
            .filter(|m| m.kind().is_none_or(|k| kinds.contains(&k)))
            .filter(|&m| evaluate_with(&s, m).is_ok())
            .collect()
    } else {
        args.method.iter().map(|m| parse_method(m)).collect::<CliResult<_>>()?
    };
    let records = bench(&s, &methods, args.reps)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for r in records {
        let line = serde_json::to_string(&r).map_err(|e| Failure::new(1, e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| Failure::new(1, e.to_string()))?;
    }
    Ok(())
}

/// Values of a range token `lo:hi[:step]` or `v`.
fn parse_range(token: &str) -> CliResult<Vec<HalfInt>> {
    let bad = |why: &str| Failure::new(2, format!("malformed range '{token}': {why}"));
    let parts: Vec<&str> = token.split(':').collect();
    let parse = |t: &str| parse_halfint(t).map_err(|_| bad(&format!("cannot parse '{t}'")));
    let (lo, hi, step) = match parts.as_slice() {
        [v] => {
            let v = parse(v)?;
            (v, v, HalfInt::from_int(1))
        }
        [lo, hi] => (parse(lo)?, parse(hi)?, HalfInt::from_int(1)),
        [lo, hi, step] => (parse(lo)?, parse(hi)?, parse(step)?),
        _ => return Err(bad("expected lo:hi or lo:hi:step")),
    };
    if step.twice() <= 0 {
        return Err(bad("step must be positive"));
    }
    if lo.twice() < 0 {
        return Err(bad("momenta are nonnegative"));
    }
    let mut out = Vec::new();
    let mut v = lo;
    while v <= hi {
        out.push(v);
        v = v + step;
    }
    Ok(out)
}

/// Cartesian product in row order, last range fastest.
fn grid(ranges: &[Vec<HalfInt>]) -> Vec<Vec<HalfInt>> {
    let mut rows: Vec<Vec<HalfInt>> = vec![Vec::new()];
    for r in ranges {
        rows = rows
            .into_iter()
            .flat_map(|prefix| {
                r.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    rows
}

const CSV_HEADER: [&str; 13] = [
    "j11", "j12", "j13", "j21", "j22", "j23", "j31", "j32", "j33", "pattern", "method", "exact_value", "decimal_value",
];

fn cmd_table(args: &TableArgs) -> CliResult<()> {
    let (json_rows, digits) = match args.format.as_str() {
        "csv" => (false, DEFAULT_DIGITS),
        other => match other.parse::<Format>()? {
            Format::Json => (true, DEFAULT_DIGITS),
            Format::Decimal(d) => (false, d),
            Format::Exact => (false, DEFAULT_DIGITS),
        },
    };
    let expected = match args.family {
        Family::General => 9,
        Family::Stretched => 5,
    };
    if args.ranges.len() != expected {
        return Err(Failure::new(2, format!("expected {expected} ranges, got {}", args.ranges.len())));
    }
    let ranges: Vec<Vec<HalfInt>> = args.ranges.iter().map(|r| parse_range(r)).collect::<CliResult<_>>()?;
    let symbols: Vec<NineJ> = grid(&ranges)
        .into_iter()
        .map(|v| match args.family {
            Family::General => NineJ::new([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]]),
            Family::Stretched => {
                let [a, b, d, e, f] = [v[0], v[1], v[2], v[3], v[4]];
                NineJ::new([[a, b, a + b], [d, e, f], [e, d, a + b + f]])
            }
        })
        .filter(|s| s.is_valid())
        .collect();

    let mode = if args.verify { Mode::Verified } else { Mode::Fast };
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?),
        None => Box::new(io::stdout()),
    };
    let io_err = |e: &dyn std::fmt::Display| match &args.out {
        Some(path) => Failure::new(1, format!("{}: {e}", path.display())),
        None => Failure::new(1, e.to_string()),
    };
    let mut out = BufWriter::new(sink);
    let mut writer = (!json_rows).then(|| csv::Writer::from_writer(Vec::new()));
    if let Some(w) = writer.as_mut() {
        w.write_record(CSV_HEADER).map_err(|e| io_err(&e))?;
    }
    for s in &symbols {
        let report = nine_j_auto(s, mode)?;
        let exact = report.value.to_string();
        let decimal = report.value.to_decimal(digits);
        let pattern = report.pattern.to_string();
        let method = report.method.to_string();
        match writer.as_mut() {
            Some(w) => {
                let mut row: Vec<String> = s.entries.iter().flatten().map(|h| h.to_string()).collect();
                row.extend([pattern, method, exact, decimal]);
                w.write_record(&row).map_err(|e| io_err(&e))?;
            }
            None => {
                let entries: Vec<String> = s.entries.iter().flatten().map(|h| h.to_string()).collect();
                let line = json!({
                    "symbol": entries,
                    "pattern": pattern,
                    "method": method,
                    "exact_value": exact,
                    "decimal_value": decimal,
                });
                writeln!(out, "{line}").map_err(|e| io_err(&e))?;
            }
        }
    }
    if let Some(w) = writer {
        let bytes = w.into_inner().map_err(|e| io_err(&e))?;
        out.write_all(&bytes).map_err(|e| io_err(&e))?;
    }
    out.flush().map_err(|e| io_err(&e))?;
    Ok(())
}

/// Moves options of the compute subcommands ahead of their tokens, so that
/// negative projections can follow options without being read as flags.
fn hoist_options(args: Vec<String>) -> Vec<String> {
    const WITH_VALUE: [&str; 2] = ["--method", "--format"];
    if args.len() < 2 || !["3j", "6j", "9j"].contains(&args[1].as_str()) {
        return args;
    }
    let is_number = |t: &str| t.strip_prefix('-').is_some_and(|r| r.starts_with(|c: char| c.is_ascii_digit() || c == '.'));
    let mut head = args[..2].to_vec();
    let mut tokens = Vec::new();
    let mut rest = args.into_iter().skip(2);
    while let Some(arg) = rest.next() {
        if arg.starts_with('-') && !is_number(&arg) {
            let takes_value = WITH_VALUE.contains(&arg.as_str());
            head.push(arg);
            if takes_value {
                head.extend(rest.next());
            }
        } else {
            tokens.push(arg);
        }
    }
    head.extend(tokens);
    head
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(hoist_options(std::env::args().collect()));
    let result = match &cli.command {
        Command::ThreeJ(a) => cmd_three_j(a),
        Command::SixJ(a) => cmd_six_j(a),
        Command::NineJ(a) => cmd_nine_j(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Table(a) => cmd_table(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
