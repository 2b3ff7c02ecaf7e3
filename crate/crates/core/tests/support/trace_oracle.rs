//! Dense Riemann-sum reference for piecewise-linear power traces.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Watts at `t` by linear interpolation between the bracketing samples.
fn power_at(samples: &[(f64, f64)], t: f64) -> f64 {
    let i = samples.partition_point(|&(ts, _)| ts <= t).clamp(1, samples.len() - 1);
    let (t0, w0) = samples[i - 1];
    let (t1, w1) = samples[i];
    w0 + (w1 - w0) * (t - t0) / (t1 - t0)
}

/// Midpoint Riemann sum in watt-hours with `density` cells per sample
/// interval.
pub fn riemann_wh(samples: &[(f64, f64)], density: usize) -> f64 {
    let mut joules = 0.0;
    for pair in samples.windows(2) {
        let (a, b) = (pair[0].0, pair[1].0);
        let h = (b - a) / density as f64;
        for j in 0..density {
            joules += power_at(samples, a + (j as f64 + 0.5) * h) * h;
        }
    }
    joules / 3600.0
}

/// A trace of up to 1000 samples with irregular spacing (0.5 s to 120 s)
/// and power between 0 and 2 kW.
pub fn random_trace(seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=1000);
    let mut t = rng.random_range(0.0..100.0);
    (0..n)
        .map(|_| {
            let s = (t, rng.random_range(0.0..2000.0));
            t += rng.random_range(0.5..120.0);
            s
        })
        .collect()
}
