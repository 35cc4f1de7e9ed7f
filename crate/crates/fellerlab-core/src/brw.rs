//! The boundary random walk: simple symmetric random walk on the nonnegative
//! integers, with an arbitrary jumping measure at 0 and a cemetery state.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::KahanSum;
use crate::rng::PathRng;

/// Discrete boundary law at state 0: kill weight plus jump probabilities
/// `p_0, p_1, ..., p_J` (trailing zeros trimmed).
#[derive(Clone, Debug)]
pub struct JumpingMeasure {
    kill: f64,
    probs: Vec<f64>,
    /// cumulative[j] = kill + p_0 + ... + p_j, for inverse-CDF sampling
    cumulative: Vec<f64>,
}

pub const MASS_TOL: f64 = 1e-12;

impl JumpingMeasure {
    pub fn new(kill: f64, mut probs: Vec<f64>) -> Result<Self> {
        if kill < 0.0 || probs.iter().any(|&p| p < 0.0) {
            return Err(Error::Precondition("jumping measure entries must be >= 0"));
        }
        let mut total = KahanSum::new();
        total.add(kill);
        for &p in &probs {
            total.add(p);
        }
        if (total.value() - 1.0).abs() > MASS_TOL {
            return Err(Error::Precondition("jumping measure must sum to 1"));
        }
        while probs.last() == Some(&0.0) {
            probs.pop();
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = kill;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        Ok(JumpingMeasure {
            kill,
            probs,
            cumulative,
        })
    }

    /// Measure concentrated at a single state (no killing).
    pub fn point(j: u32) -> Self {
        let mut probs = alloc::vec![0.0; j as usize + 1];
        probs[j as usize] = 1.0;
        JumpingMeasure::new(0.0, probs).unwrap()
    }

    /// Pure killing at the boundary.
    pub fn killing() -> Self {
        JumpingMeasure::new(1.0, Vec::new()).unwrap()
    }

    pub fn kill(&self) -> f64 {
        self.kill
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, j: usize) -> f64 {
        self.probs.get(j).copied().unwrap_or(0.0)
    }

    /// Largest state with positive jump probability, or 0 for a trivial measure.
    pub fn support_max(&self) -> usize {
        self.probs.len().saturating_sub(1)
    }

    /// One transition target sampled at state 0. `None` means killed.
    fn sample_boundary(&self, rng: &mut PathRng) -> Option<u32> {
        let u = rng.next_f64();
        if u < self.kill {
            return None;
        }
        // binary search over the cumulative table
        let mut lo = 0usize;
        let mut hi = self.cumulative.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            if u < self.cumulative[mid] {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo.min(self.probs.len().saturating_sub(1)) as u32)
    }
}

/// A transition target of the walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    State(u32),
    Killed,
}

/// One-step law from `state`: `{i-1: 1/2, i+1: 1/2}` in the interior, the
/// jumping measure at 0.
pub fn step_law(measure: &JumpingMeasure, state: u32) -> Vec<(Target, f64)> {
    if state >= 1 {
        return alloc::vec![
            (Target::State(state - 1), 0.5),
            (Target::State(state + 1), 0.5),
        ];
    }
    let mut out = Vec::new();
    if measure.kill > 0.0 {
        out.push((Target::Killed, measure.kill));
    }
    for (j, &p) in measure.probs.iter().enumerate() {
        if p > 0.0 {
            out.push((Target::State(j as u32), p));
        }
    }
    out
}

/// An integer-state trajectory. `states[k] = X_k` with `states[0]` the start;
/// if killed at step `m`, `killed_at = Some(m)` and states from step m on are
/// absent (the path is truncated at the cemetery).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrwPath {
    pub start: u32,
    pub states: Vec<u32>,
    pub killed_at: Option<usize>,
}

impl BrwPath {
    /// State at step `k`, or `None` if the walk is already killed.
    pub fn state_at(&self, k: usize) -> Option<u32> {
        match self.killed_at {
            Some(m) if k >= m => None,
            _ => self.states.get(k).copied(),
        }
    }

    /// Last attained state (the state just before killing, for killed paths).
    pub fn final_state(&self) -> u32 {
        *self.states.last().unwrap_or(&self.start)
    }

    /// Number of steps `k < m` with `X_k = 0` (post-killing steps contribute 0).
    pub fn visits_to_zero(&self, m: usize) -> usize {
        self.states
            .iter()
            .take(m)
            .filter(|&&s| s == 0)
            .count()
    }
}

/// Seeded batch of paths; identical `(measure, start, steps, count, seed)`
/// yields identical ensembles.
#[derive(Clone, Debug)]
pub struct PathEnsemble {
    pub paths: Vec<BrwPath>,
    pub seed: u64,
    pub steps: usize,
}

/// Simulates path `index` of the ensemble keyed by `seed`. Pure function of
/// its arguments, so batches can be distributed across workers freely.
pub fn simulate_path(
    measure: &JumpingMeasure,
    start: u32,
    steps: usize,
    seed: u64,
    index: u64,
) -> BrwPath {
    let mut rng = PathRng::new(seed, index);
    let mut states = Vec::with_capacity(steps + 1);
    states.push(start);
    let mut state = start;
    for k in 0..steps {
        if state >= 1 {
            state = if rng.next_u64() & 1 == 0 {
                state - 1
            } else {
                state + 1
            };
        } else {
            match measure.sample_boundary(&mut rng) {
                Some(next) => state = next,
                None => {
                    return BrwPath {
                        start,
                        states,
                        killed_at: Some(k + 1),
                    }
                }
            }
        }
        states.push(state);
    }
    BrwPath {
        start,
        states,
        killed_at: None,
    }
}

/// Compact trajectory summary for long runs where storing every state is
/// prohibitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathSummary {
    /// Final state after `steps` steps, `None` if killed first.
    pub final_state: Option<u32>,
    pub killed_at: Option<usize>,
    /// Number of steps `k < steps` with `X_k = 0`.
    pub visits_to_zero: usize,
    /// Boundary departures: transitions from 0 to some `j >= 1` or to the
    /// cemetery (sojourns `0 -> 0` excluded).
    pub departures: u64,
    /// Departures landing in the (inclusive) tracked state range.
    pub departures_in_range: u64,
}

/// Streaming counterpart of [`simulate_path`]: identical random stream and
/// trajectory, but only summary statistics are retained. `track` is an
/// optional inclusive state range for departure counting.
pub fn simulate_path_summary(
    measure: &JumpingMeasure,
    start: u32,
    steps: usize,
    seed: u64,
    index: u64,
    track: Option<(u32, u32)>,
) -> PathSummary {
    let mut rng = PathRng::new(seed, index);
    let mut state = start;
    let mut visits = (state == 0) as usize;
    let mut departures = 0u64;
    let mut in_range = 0u64;
    for k in 0..steps {
        if state >= 1 {
            state = if rng.next_u64() & 1 == 0 {
                state - 1
            } else {
                state + 1
            };
        } else {
            match measure.sample_boundary(&mut rng) {
                Some(next) => {
                    if next >= 1 {
                        departures += 1;
                        if let Some((lo, hi)) = track {
                            if (lo..=hi).contains(&next) {
                                in_range += 1;
                            }
                        }
                    }
                    state = next;
                }
                None => {
                    return PathSummary {
                        final_state: None,
                        killed_at: Some(k + 1),
                        visits_to_zero: visits,
                        departures: departures + 1,
                        departures_in_range: in_range,
                    }
                }
            }
        }
        if state == 0 && k + 1 < steps {
            visits += 1;
        }
    }
    PathSummary {
        final_state: Some(state),
        killed_at: None,
        visits_to_zero: visits,
        departures,
        departures_in_range: in_range,
    }
}

/// Simulates `count` independent trajectories of `steps` steps each.
pub fn simulate(
    measure: &JumpingMeasure,
    start: u32,
    steps: usize,
    count: usize,
    seed: u64,
) -> PathEnsemble {
    let paths = (0..count as u64)
        .map(|k| simulate_path(measure, start, steps, seed, k))
        .collect();
    PathEnsemble { paths, seed, steps }
}

/// First-passage probability `P_i(tau_0 = j)` of the simple random walk by
/// exhaustive enumeration over all `2^j` step sequences. Exact dyadic value.
pub fn first_passage_time(i: u32, j: u32) -> Result<f64> {
    if i < 1 {
        return Err(Error::Precondition("first_passage_time requires i >= 1"));
    }
    if j > 24 {
        return Err(Error::BudgetExceeded {
            leaves: 1u64 << j.min(63),
            budget: 1 << 24,
        });
    }
    if j < i || (j - i) % 2 != 0 {
        return Ok(0.0);
    }
    let total = 1u64 << j;
    let mut hits = 0u64;
    for mask in 0..total {
        let mut pos = i as i64;
        let mut first_hit = None;
        for step in 0..j {
            pos += if (mask >> step) & 1 == 1 { 1 } else { -1 };
            if pos == 0 {
                first_hit = Some(step + 1);
                break;
            }
        }
        if first_hit == Some(j) {
            hits += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}

/// Sample mean of the visit count to 0 before step `m`, with a 95% confidence
/// half-width.
pub fn occupation_count(ensemble: &PathEnsemble, m: usize) -> (f64, f64) {
    let n = ensemble.paths.len();
    let mut sum = KahanSum::new();
    let mut sum_sq = KahanSum::new();
    for path in &ensemble.paths {
        let v = path.visits_to_zero(m) as f64;
        sum.add(v);
        sum_sq.add(v * v);
    }
    let mean = sum.value() / n as f64;
    let var = (sum_sq.value() / n as f64 - mean * mean).max(0.0);
    let half = 1.96 * crate::math::sqrt(var / n as f64);
    (mean, half)
}

const LEAF_BUDGET: u64 = 10_000_000;

/// Exact expectation of a path functional by full tree expansion.
///
/// The functional receives the visited states (truncated at killing) and the
/// killing step, if any. Probabilities accumulate with compensated summation.
pub fn enumerate_exact<F>(
    measure: &JumpingMeasure,
    start: u32,
    depth: usize,
    functional: F,
) -> Result<f64>
where
    F: Fn(&[u32], Option<usize>) -> f64,
{
    if depth > 14 {
        return Err(Error::BudgetExceeded {
            leaves: u64::MAX,
            budget: LEAF_BUDGET,
        });
    }
    let mut acc = KahanSum::new();
    let mut path = Vec::with_capacity(depth + 1);
    path.push(start);
    let mut leaves = 0u64;
    expand(
        measure,
        depth,
        1.0,
        &mut path,
        &mut acc,
        &mut leaves,
        &functional,
    )?;
    Ok(acc.value())
}

fn expand<F>(
    measure: &JumpingMeasure,
    depth_left: usize,
    prob: f64,
    path: &mut Vec<u32>,
    acc: &mut KahanSum,
    leaves: &mut u64,
    functional: &F,
) -> Result<()>
where
    F: Fn(&[u32], Option<usize>) -> f64,
{
    if depth_left == 0 {
        *leaves += 1;
        if *leaves > LEAF_BUDGET {
            return Err(Error::BudgetExceeded {
                leaves: *leaves,
                budget: LEAF_BUDGET,
            });
        }
        acc.add(prob * functional(path, None));
        return Ok(());
    }
    let state = *path.last().unwrap();
    if state >= 1 {
        for next in [state - 1, state + 1] {
            path.push(next);
            expand(measure, depth_left - 1, prob * 0.5, path, acc, leaves, functional)?;
            path.pop();
        }
    } else {
        if measure.kill > 0.0 {
            *leaves += 1;
            // killed path: frozen from here on
            acc.add(prob * measure.kill * functional(path, Some(path.len())));
        }
        for (j, &p) in measure.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            path.push(j as u32);
            expand(measure, depth_left - 1, prob * p, path, acc, leaves, functional)?;
            path.pop();
        }
    }
    Ok(())
}
