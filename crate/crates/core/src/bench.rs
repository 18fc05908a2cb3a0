//! Wall-clock comparison of 9j methods on one symbol.

use std::fmt::Display;
use std::hint::black_box;
use std::time::Instant;

use serde::{Serialize, Serializer};

use crate::angular::NineJ;
use crate::error::{Error, Result};
use crate::exact::SqrtRational;
use crate::stretched::{evaluate_with, Method};

/// Untimed calls made before sampling starts.
pub const WARMUP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchmarkRecord {
    #[serde(serialize_with = "as_string")]
    pub symbol: NineJ,
    pub method: Method,
    pub repetitions: usize,
    pub median_ns: u64,
    pub min_ns: u64,
    pub value: String,
}

fn as_string<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Timing samples in nanoseconds for `repetitions` calls after the warmup.
pub fn sample(s: &NineJ, method: Method, repetitions: usize) -> Result<(SqrtRational, Vec<u64>)> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter {
            name: "repetitions",
            value: "0".to_string(),
        });
    }
    let value = evaluate_with(s, method)?;
    for _ in 0..WARMUP {
        black_box(evaluate_with(black_box(s), method)?);
    }
    let mut samples = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        black_box(evaluate_with(black_box(s), method)?);
        samples.push(start.elapsed().as_nanos() as u64);
    }
    Ok((value, samples))
}

/// The median; for an even count, the lower of the two middle samples.
pub fn median(samples: &[u64]) -> u64 {
    let mut v = samples.to_vec();
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

/// One record per method. Fails with `VerificationMismatch` if any two methods
/// disagree, before any record is returned.
pub fn bench(s: &NineJ, methods: &[Method], repetitions: usize) -> Result<Vec<BenchmarkRecord>> {
    let mut runs = Vec::with_capacity(methods.len());
    for &method in methods {
        runs.push((method, sample(s, method, repetitions)?));
    }
    if let Some((_, (reference, _))) = runs.first() {
        for (method, (value, _)) in &runs[1..] {
            if value != reference {
                return Err(Error::VerificationMismatch {
                    method: method.to_string(),
                    got: value.to_string(),
                    expected: reference.to_string(),
                });
            }
        }
    }
    Ok(runs
        .into_iter()
        .map(|(method, (value, samples))| BenchmarkRecord {
            symbol: *s,
            method,
            repetitions,
            median_ns: median(&samples),
            min_ns: *samples.iter().min().unwrap(),
            value: value.to_string(),
        })
        .collect())
}
