//! Monte Carlo summaries: batch-means errors, autocorrelation times and
//! distribution distances.

use std::collections::BTreeMap;

pub const DEFAULT_BATCHES: usize = 30;

/// A sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    /// `mean ≤ bound + k·se`.
    pub fn below(&self, bound: f64, k: f64) -> bool {
        self.mean <= bound + k * self.se
    }

    /// `|mean - target| ≤ k·se`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se
    }

    /// Pools independent estimates weighted by sample count. Inputs are
    /// sorted first so that the result does not depend on their order.
    pub fn combine(parts: &[Estimate]) -> Estimate {
        let mut parts = parts.to_vec();
        parts.sort_by(|a, b| {
            (a.n, a.mean, a.se)
                .partial_cmp(&(b.n, b.mean, b.se))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let n: usize = parts.iter().map(|p| p.n).sum();
        if n == 0 {
            return Estimate {
                mean: f64::NAN,
                se: f64::NAN,
                n: 0,
            };
        }
        let total = n as f64;
        let mean = parts.iter().map(|p| p.n as f64 * p.mean).sum::<f64>() / total;
        let var = parts
            .iter()
            .map(|p| (p.n as f64 * p.se).powi(2))
            .sum::<f64>()
            / (total * total);
        Estimate {
            mean,
            se: var.sqrt(),
            n,
        }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample mean with a batch-means standard error over `batches` batches.
/// Falls back to the naive i.i.d. error when there are fewer samples than
/// batches.
pub fn batch_means(xs: &[f64], batches: usize) -> Estimate {
    let n = xs.len();
    let m = mean(xs);
    if n < 2 {
        return Estimate {
            mean: m,
            se: f64::INFINITY,
            n,
        };
    }
    if n < 2 * batches {
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        return Estimate {
            mean: m,
            se: (var / n as f64).sqrt(),
            n,
        };
    }
    let size = n / batches;
    let batch_means: Vec<f64> = (0..batches).map(|b| mean(&xs[b * size..(b + 1) * size])).collect();
    let bm = mean(&batch_means);
    let var = batch_means.iter().map(|x| (x - bm).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Estimate {
        mean: m,
        se: (var / batches as f64).sqrt(),
        n,
    }
}

/// Integrated autocorrelation time with Sokal's self-consistent window
/// (`M ≥ c·τ(M)`, `c = 5`).
pub fn integrated_autocorrelation_time(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return 1.0;
    }
    let m = mean(xs);
    let centered: Vec<f64> = xs.iter().map(|x| x - m).collect();
    let c0 = centered.iter().map(|x| x * x).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 1.0;
    }
    let mut tau = 1.0;
    for lag in 1..n / 2 {
        let c = centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64;
        tau += 2.0 * c / c0;
        if lag as f64 >= 5.0 * tau {
            break;
        }
    }
    tau.max(1.0)
}

pub fn effective_sample_size(xs: &[f64]) -> f64 {
    xs.len() as f64 / integrated_autocorrelation_time(xs)
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `samples` and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Total-variation distance between two empirical distributions given as
/// outcome counts.
pub fn total_variation<K: Ord>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> f64 {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / na as f64;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / nb as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
}
