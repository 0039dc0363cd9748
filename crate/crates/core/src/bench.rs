//! Timing of the closed form against both reference routes.

use std::f64::consts::PI;
use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use crate::basis::{check_dim, AlgebraVector};
use crate::error::{Error, Result};
use crate::expm::{evaluate, ExpmOptions, Method};
use crate::sample::{SampleMode, Sampler};

pub const MIN_REPETITIONS: usize = 100;

const METHODS: [Method; 3] = [Method::Closed, Method::Taylor, Method::Companion];

#[derive(Debug, Clone, Serialize)]
pub struct MethodTiming {
    pub method: Method,
    pub median_ns: f64,
    pub p95_ns: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    pub n: usize,
    pub methods: Vec<MethodTiming>,
    /// Largest Frobenius distance between any two methods on the same input.
    pub max_deviation: f64,
    /// Inputs the closed form handed to the companion route.
    pub fallbacks: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub repetitions: usize,
    pub seed: u64,
    pub max_v: f64,
    pub dimensions: Vec<DimensionReport>,
    pub max_deviation: f64,
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * p).round() as usize;
    sorted[idx]
}

/// Times each method once per sampled input, `repetitions` inputs per n,
/// with norms uniform on `(0, 4π]`.
pub fn run_bench(ns: &[usize], repetitions: usize, seed: u64, opts: &ExpmOptions) -> Result<BenchReport> {
    if repetitions < MIN_REPETITIONS {
        return Err(Error::Domain(format!("repetitions must be at least {MIN_REPETITIONS}, got {repetitions}")));
    }
    let max_v = 4.0 * PI;
    let mut dimensions = Vec::with_capacity(ns.len());
    for &n in ns {
        check_dim(n)?;
        let inputs: Vec<AlgebraVector> =
            Sampler::new(n, seed.wrapping_add(n as u64), SampleMode::Ball(max_v))?.take(repetitions).collect();
        let mut times = vec![Vec::with_capacity(repetitions); METHODS.len()];
        let mut max_deviation = 0.0f64;
        let mut fallbacks = 0;
        for av in &inputs {
            let mut results = Vec::with_capacity(METHODS.len());
            for (k, &method) in METHODS.iter().enumerate() {
                let start = Instant::now();
                let r = black_box(evaluate(black_box(av), method, opts))?;
                times[k].push(start.elapsed().as_nanos() as f64);
                if r.method == Method::Fallback {
                    fallbacks += 1;
                }
                results.push(r.rotation.matrix);
            }
            for i in 0..results.len() {
                for j in i + 1..results.len() {
                    max_deviation = max_deviation.max((&results[i] - &results[j]).norm());
                }
            }
        }
        let methods = METHODS
            .iter()
            .zip(times.iter_mut())
            .map(|(&method, t)| {
                t.sort_by(f64::total_cmp);
                MethodTiming { method, median_ns: percentile(t, 0.5), p95_ns: percentile(t, 0.95) }
            })
            .collect();
        dimensions.push(DimensionReport { n, methods, max_deviation, fallbacks });
    }
    let max_deviation = dimensions.iter().map(|d| d.max_deviation).fold(0.0, f64::max);
    Ok(BenchReport { repetitions, seed, max_v, dimensions, max_deviation })
}
