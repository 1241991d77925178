//! Fubini–Study-uniform sampling and Monte Carlo averages.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::point::ChartPoint;

/// Points with `|w₀| < RESAMPLE_RATIO·|w|` are redrawn to stay away from the chart boundary.
pub const RESAMPLE_RATIO: f64 = 1e-3;
const RETRY_CAP: usize = 1000;
/// Fixed worker-chunk count; independent of the thread pool size so results are reproducible.
pub const MC_CHUNKS: u64 = 32;

/// A uniformly distributed point of ℂP^{2m−1}, returned in the chart `z₀ = 1`.
///
/// A standard complex Gaussian vector is uniform in direction, so its class in
/// projective space is Fubini–Study uniform.
pub fn sample_point<R: Rng + ?Sized>(m: usize, rng: &mut R) -> ChartPoint {
    let mut last = None;
    for _ in 0..RETRY_CAP {
        let w: Vec<Complex64> = (0..2 * m)
            .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let norm = w.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        let ok = w[0].norm() >= RESAMPLE_RATIO * norm;
        last = Some(w);
        if ok {
            break;
        }
    }
    let w = last.expect("at least one draw");
    ChartPoint::from_homogeneous(m, &w).expect("w0 is nonzero with probability one")
}

/// A point with real and imaginary parts uniform in `[−r, r]`, for pointwise checks.
pub fn box_point<R: Rng + ?Sized>(m: usize, r: f64, rng: &mut R) -> ChartPoint {
    let z = (0..2 * m - 1).map(|_| Complex64::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r))).collect();
    ChartPoint::new(m, z).expect("finite coordinates")
}

/// The RNG stream used by chunk `k` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard error from the spread of the per-chunk means.
    pub se: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Distance from `target` in units of the standard error (infinite if `se = 0` and they differ).
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.se
        }
    }
}

/// Normalized average `⨍f` over ℂP^{2m−1}.
///
/// Samples are split into [`MC_CHUNKS`] chunks with their own ChaCha streams
/// and merged in chunk order, so the estimate is bitwise reproducible.
pub fn mc_integrate<F>(f: F, m: usize, samples: usize, seed: u64) -> McEstimate
where
    F: Fn(&ChartPoint) -> f64 + Sync,
{
    let chunks = MC_CHUNKS as usize;
    let base = samples / chunks;
    let extra = samples % chunks;
    let sums: Vec<(f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let count = base + usize::from(k < extra);
            let mut rng = stream_rng(seed, k as u64);
            let mut acc = 0.0;
            for _ in 0..count {
                acc += f(&sample_point(m, &mut rng));
            }
            (acc, count)
        })
        .collect();
    let total: f64 = sums.iter().map(|s| s.0).sum();
    let mean = total / samples as f64;
    let means: Vec<f64> = sums.iter().filter(|s| s.1 > 0).map(|s| s.0 / s.1 as f64).collect();
    let b = means.len() as f64;
    let var = if b > 1.0 { means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (b - 1.0) } else { 0.0 };
    McEstimate { mean, se: (var / b).sqrt(), samples }
}
