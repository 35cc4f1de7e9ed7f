//! Deterministic path-parallel Monte Carlo.
//!
//! Each path is a pure function of `(seed, path index)`, so the ensemble is
//! independent of the worker count; threads fill disjoint slices in index
//! order. `FELLERLAB_THREADS` caps the workers.

use std::num::NonZeroUsize;

use fellerlab_core::{simulate_path_summary, JumpingMeasure, PathSummary};

pub fn worker_count(paths: usize) -> usize {
    let hw = std::thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1);
    let cap = std::env::var("FELLERLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(hw);
    cap.min(hw.max(1)).min(paths.max(1))
}

/// Runs `paths` summary simulations in parallel; identical output for any
/// worker count.
pub fn run_summaries(
    measure: &JumpingMeasure,
    start: u32,
    steps: usize,
    paths: usize,
    seed: u64,
    track: Option<(u32, u32)>,
) -> Vec<PathSummary> {
    let workers = worker_count(paths);
    let mut out: Vec<PathSummary> = Vec::with_capacity(paths);
    if workers <= 1 {
        for index in 0..paths as u64 {
            out.push(simulate_path_summary(measure, start, steps, seed, index, track));
        }
        return out;
    }
    out.resize(
        paths,
        PathSummary {
            final_state: None,
            killed_at: None,
            visits_to_zero: 0,
            departures: 0,
            departures_in_range: 0,
        },
    );
    let chunk = paths.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, slice) in out.chunks_mut(chunk).enumerate() {
            let base = (w * chunk) as u64;
            scope.spawn(move || {
                for (offset, slot) in slice.iter_mut().enumerate() {
                    *slot = simulate_path_summary(
                        measure,
                        start,
                        steps,
                        seed,
                        base + offset as u64,
                        track,
                    );
                }
            });
        }
    });
    out
}

/// Ensemble statistics extracted from one summary batch.
pub struct EnsembleStats {
    /// Sorted rescaled final positions of surviving paths.
    pub samples: Vec<f64>,
    pub killed: usize,
    pub at_zero: usize,
    pub paths: usize,
    /// Mean visits to 0 per path and its 95% halfwidth.
    pub mean_visits: f64,
    pub visits_halfwidth: f64,
    /// Mean rescaled occupation `visits / n^2`.
    pub occupation: f64,
    pub departures: u64,
    pub departures_in_range: u64,
}

pub fn collect_stats(summaries: &[PathSummary], n: u32) -> EnsembleStats {
    let nf = n as f64;
    let mut samples = Vec::with_capacity(summaries.len());
    let mut killed = 0usize;
    let mut at_zero = 0usize;
    let mut visits_sum = 0.0f64;
    let mut visits_sq = 0.0f64;
    let mut departures = 0u64;
    let mut in_range = 0u64;
    for s in summaries {
        match s.final_state {
            Some(0) => {
                at_zero += 1;
                samples.push(0.0);
            }
            Some(v) => samples.push(v as f64 / nf),
            None => killed += 1,
        }
        let v = s.visits_to_zero as f64;
        visits_sum += v;
        visits_sq += v * v;
        departures += s.departures;
        in_range += s.departures_in_range;
    }
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let count = summaries.len() as f64;
    let mean_visits = visits_sum / count;
    let var = (visits_sq / count - mean_visits * mean_visits).max(0.0);
    EnsembleStats {
        samples,
        killed,
        at_zero,
        paths: summaries.len(),
        mean_visits,
        visits_halfwidth: 1.96 * (var / count).sqrt(),
        occupation: mean_visits / (nf * nf),
        departures,
        departures_in_range: in_range,
    }
}

/// Two-sample Kolmogorov-Smirnov distance between sorted samples, each
/// normalized to its own (alive) mass.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let (mut i, mut j) = (0usize, 0usize);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let (va, vb) = (a[i], b[j]);
        if va <= vb {
            i += 1;
        }
        if vb <= va {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use fellerlab_core::JumpingMeasure;

    #[test]
    fn parallel_matches_serial() {
        let m = JumpingMeasure::new(0.02, vec![0.38, 0.6]).unwrap();
        let par = run_summaries(&m, 0, 300, 500, 11, Some((1, 1)));
        let mut serial = Vec::new();
        for index in 0..500u64 {
            serial.push(fellerlab_core::simulate_path_summary(
                &m,
                0,
                300,
                11,
                index,
                Some((1, 1)),
            ));
        }
        assert_eq!(par, serial);
    }

    #[test]
    fn thread_cap_respected() {
        std::env::set_var("FELLERLAB_THREADS", "1");
        assert_eq!(worker_count(100), 1);
        std::env::remove_var("FELLERLAB_THREADS");
        assert!(worker_count(100) >= 1);
        assert_eq!(worker_count(0), 1);
    }

    #[test]
    fn two_sample_ks_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(two_sample_ks(&a, &a), 0.0);
        let b = [10.0, 11.0];
        assert_eq!(two_sample_ks(&a, &b), 1.0);
        let c = [1.5, 2.5, 3.5, 4.5];
        assert!((two_sample_ks(&a, &c) - 0.25).abs() < 1e-12);
    }
}
