use std::process::{Command, Output};
use std::str::FromStr;

use wigner9j::angular::NineJ;
use wigner9j::exact::{PrimeFactored, Rational, SqrtRational};
use wigner9j::oracle::nine_j_sum;

const EXAMPLE: [&str; 9] = ["6", "10", "16", "14", "12", "8", "12", "14", "24"];
const EXAMPLE_VALUE: &str = "13/124062*sqrt(1615/7683753)";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigner9j")).args(args).output().expect("binary runs")
}

fn with(sub: &str, tokens: &[&str], extra: &[&str]) -> Vec<String> {
    std::iter::once(sub).chain(tokens.iter().copied()).chain(extra.iter().copied()).map(String::from).collect()
}

fn run_owned(args: &[String]) -> Output {
    run(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Reads the canonical `[-][c*]sqrt(r)` or rational rendering back.
fn parse_rendered(text: &str) -> SqrtRational {
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text),
    };
    let (coefficient, radicand) = match body.find("sqrt(") {
        Some(at) => {
            let c = if at == 0 { Rational::from_integer(1.into()) } else { Rational::from_str(body[..at].strip_suffix('*').unwrap()).unwrap() };
            let r = Rational::from_str(body[at + 5..].strip_suffix(')').unwrap()).unwrap();
            (c, PrimeFactored::from_rational(&r).unwrap())
        }
        None => (Rational::from_str(body).unwrap(), PrimeFactored::one()),
    };
    SqrtRational::from_parts(coefficient * Rational::from_integer(sign.into()), &radicand)
}

#[test]
fn compute_examples() {
    let o = run_owned(&with("9j", &EXAMPLE, &[]));
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), EXAMPLE_VALUE);
    let o = run(&["9j", "3/2", "3/2", "2", "3/2", "3/2", "2", "2", "0", "2"]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = run(&["9j", "1", "1", "3", "0", "0", "0", "0", "0", "0"]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = run(&["9j", "1.5", "1.5", "2", "3/2", "3/2", "2", "2", "0", "2", "--verify"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn three_j_and_six_j() {
    let o = run(&["3j", "1", "1", "0", "1", "-1", "0"]);
    assert_eq!(stdout(&o).trim(), "sqrt(1/3)");
    let o = run(&["3j", "--format", "exact", "1/2", "1/2", "1", "-1/2", "-1/2", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "-sqrt(1/3)");
    let o = run(&["6j", "1", "1", "1", "1", "1", "1"]);
    assert_eq!(stdout(&o).trim(), "1/6");
}

#[test]
fn formats() {
    let o = run_owned(&with("9j", &EXAMPLE, &["--format", "decimal=6"]));
    assert_eq!(stdout(&o).trim(), "0.00000151916");
    let o = run_owned(&with("9j", &EXAMPLE, &["--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["value"], EXAMPLE_VALUE);
    assert_eq!(v["method"], "FiveF4");
    let o = run_owned(&with("9j", &EXAMPLE, &["--format", "decimal=0"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors_name_the_token() {
    let o = run(&["9j", "1", "1", "1", "1", "q", "1", "1", "1", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("'q'"));
    assert_eq!(run(&["9j", "1", "1", "1"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "1", "1", "1", "1", "1", "1", "1", "1", "1/3"]).status.code(), Some(2));
    assert_eq!(run(&["6j", "1", "1", "1", "1", "1", "-1"]).status.code(), Some(2));
}

#[test]
fn forced_methods() {
    for m in ["FiveF4", "VarshalovichClosed", "ColumnClosed", "OracleSum"] {
        let o = run_owned(&with("9j", &EXAMPLE, &["--method", m, "--verify"]));
        assert!(o.status.success(), "{m}");
        assert_eq!(stdout(&o).trim(), EXAMPLE_VALUE);
    }
    let o = run_owned(&with("9j", &EXAMPLE, &["--method", "ZeroArg4F3"]));
    assert_eq!(o.status.code(), Some(2));
    let o = run_owned(&with("9j", &EXAMPLE, &["--method", "Bogus"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_examples() {
    let o = run_owned(&with("classify", &EXAMPLE, &[]));
    assert_eq!(stdout(&o).trim(), "DoublyStretchedVarshalovich / identity / FiveF4");
    let transposed = ["6", "14", "12", "10", "12", "14", "16", "8", "24"];
    let o = run_owned(&with("classify", &transposed, &[]));
    assert_eq!(stdout(&o).trim(), "DoublyStretchedVarshalovich / transposed / FiveF4");
    let o = run(&["classify", "4", "5", "8", "7", "6", "4", "6", "7", "12"]);
    assert_eq!(stdout(&o).trim(), "None / OracleSum");
    let o = run_owned(&with("classify", &EXAMPLE, &["--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["kind"], "DoublyStretchedVarshalovich");
    assert_eq!(v["method"], "FiveF4");
}

#[test]
fn verify_sweeps() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS Dougall: 1512 checked, 0 failed"));
    let o = run(&["verify", "--max-n", "0", "--max-xyz", "0", "--max-j", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", "--transposed-dougall"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(n, x, y, z) = "));
    let o = run(&["verify", "--max-n", "0", "--max-xyz", "2", "--max-j", "0", "--transposed-dougall"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn bench_records() {
    let o = run_owned(&with("bench", &EXAMPLE, &["--method", "OracleSum,VarshalovichClosed,FiveF4", "--reps", "5"]));
    assert!(o.status.success());
    let records: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 3);
    for r in &records {
        assert_eq!(r["value"], EXAMPLE_VALUE);
        assert_eq!(r["repetitions"], 5);
        assert!(r["min_ns"].as_u64().unwrap() <= r["median_ns"].as_u64().unwrap());
    }
    let o = run_owned(&with("bench", &EXAMPLE, &["--method", "FiveF4", "--reps", "1"]));
    let r: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(r["min_ns"], r["median_ns"]);
    let o = run_owned(&with("bench", &EXAMPLE, &["--method", "ZeroArg4F3"]));
    assert_eq!(o.status.code(), Some(2));
    let o = run_owned(&with("bench", &EXAMPLE, &["--reps", "0"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn table_rows() {
    let o = run_owned(&with("table", &EXAMPLE, &[]));
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "j11,j12,j13,j21,j22,j23,j31,j32,j33,pattern,method,exact_value,decimal_value");
    let row = lines.next().unwrap();
    assert!(row.contains(EXAMPLE_VALUE));
    assert!(row.starts_with("6,10,16,14,12,8,12,14,24,DoublyStretchedVarshalovich / identity,FiveF4,"));
    assert!(lines.next().is_none());
}

#[test]
fn empty_table_is_header_only() {
    let dir = std::env::temp_dir().join(format!("wigner9j-table-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("empty.csv");
    let o = run(&["table", "3:1", "1", "1", "1", "1", "1", "1", "1", "1", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn table_errors() {
    assert_eq!(run(&["table", "1:", "1", "1", "1", "1", "1", "1", "1", "1"]).status.code(), Some(2));
    assert_eq!(run(&["table", "1:2:0", "1", "1", "1", "1", "1", "1", "1", "1"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--family", "stretched", "1", "1", "1"]).status.code(), Some(2));
    let o = run(&["table", "1", "1", "1", "1", "1", "1", "1", "1", "1", "--out", "/nonexistent-dir/t.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/t.csv"));
}

#[test]
fn verified_stretched_sweep() {
    let o = run(&["table", "--family", "stretched", "0:3:1/2", "0:2", "0:3:1/2", "0:3:1/2", "0:2:1/2", "--verify", "--format", "json"]);
    assert!(o.status.success());
    let rows: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(rows.len() >= 100, "{} rows", rows.len());
    for r in &rows {
        let entries: Vec<i64> = r["symbol"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| {
                let q = Rational::from_str(t.as_str().unwrap()).unwrap() * Rational::from_integer(2.into());
                i64::try_from(q.to_integer()).unwrap()
            })
            .collect();
        let s = NineJ::from_twice([[entries[0], entries[1], entries[2]], [entries[3], entries[4], entries[5]], [entries[6], entries[7], entries[8]]]);
        assert_eq!(parse_rendered(r["exact_value"].as_str().unwrap()), nine_j_sum(&s).unwrap());
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["table", "--family", "stretched", "0:1:1/2", "0:1", "1:2", "1:2", "0:1"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let a = run_owned(&with("classify", &EXAMPLE, &["--format", "json"]));
    let b = run_owned(&with("classify", &EXAMPLE, &["--format", "json"]));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn rendered_values_round_trip() {
    let cases: [[i64; 9]; 5] = [
        [6, 10, 16, 14, 12, 8, 12, 14, 24],
        [2, 4, 6, 4, 2, 2, 2, 4, 6],
        [1, 1, 2, 1, 1, 2, 2, 2, 2],
        [1, 3, 4, 2, 2, 2, 3, 1, 4],
        [3, 1, 2, 3, 3, 2, 2, 2, 2],
    ];
    for t in cases {
        let tokens: Vec<String> = t.iter().map(|x| format!("{}/2", x)).collect();
        let tokens: Vec<&str> = tokens.iter().map(String::as_str).collect();
        let o = run_owned(&with("9j", &tokens, &[]));
        assert!(o.status.success());
        let rendered = stdout(&o).trim().to_string();
        let s = NineJ::from_twice([[t[0], t[1], t[2]], [t[3], t[4], t[5]], [t[6], t[7], t[8]]]);
        let value = nine_j_sum(&s).unwrap();
        assert_eq!(parse_rendered(&rendered), value, "{rendered}");
        assert_eq!(rendered, value.to_string());
    }
}
