//! n-indexed jumping measures whose rescaled walks converge to a given FBM,
//! plus the diffusive rescaling itself and the classical presets.

use alloc::vec::Vec;

use crate::boundary::{FellerParams, P4Measure};
use crate::brw::{BrwPath, JumpingMeasure};
use crate::error::{Error, Result};
use crate::math::KahanSum;

/// The two admissible power-law scaling regimes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `p3 > 0`: boundary sojourn dominates, kill and jump rates scale as 1/n^2.
    Sojourn,
    /// `p2 > 0, p3 = 0`: reflection dominates, rates scale as 1/n.
    Reflection,
}

/// A validated (regime, n, params) triple ready for measure construction.
#[derive(Clone)]
pub struct ScalingScheme {
    pub regime: Regime,
    pub n: u32,
    pub params: FellerParams,
}

impl ScalingScheme {
    pub fn new(regime: Regime, n: u32, params: FellerParams) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition("scaling requires n >= 2"));
        }
        match regime {
            Regime::Sojourn if params.p3 <= 0.0 => {
                return Err(Error::Precondition("sojourn regime requires p3 > 0"))
            }
            Regime::Reflection if params.p2 <= 0.0 || params.p3 != 0.0 => {
                return Err(Error::Precondition(
                    "reflection regime requires p2 > 0 and p3 = 0",
                ))
            }
            _ => {}
        }
        Ok(ScalingScheme { regime, n, params })
    }

    /// Picks the regime dictated by the parameters.
    pub fn auto(n: u32, params: FellerParams) -> Result<Self> {
        let regime = if params.p3 > 0.0 {
            Regime::Sojourn
        } else if params.p2 > 0.0 {
            Regime::Reflection
        } else {
            return Err(Error::Precondition(
                "pure-jump boundary admits no scaling scheme",
            ));
        };
        ScalingScheme::new(regime, n, params)
    }

    pub fn with_n(&self, n: u32) -> Result<Self> {
        ScalingScheme::new(self.regime, n, self.params.clone())
    }
}

/// Raw ingredients of a built measure before residual normalization.
fn measure_parts(scheme: &ScalingScheme) -> Result<(f64, Vec<(usize, f64)>)> {
    let n = scheme.n as f64;
    let p = &scheme.params;
    let (kill, p1_entry, denom) = match scheme.regime {
        Regime::Sojourn => (p.p1 / (n * n * p.p3), p.p2 / (n * p.p3), n * n * p.p3),
        Regime::Reflection => (p.p1 / (n * p.p2), 0.0, n * p.p2),
    };
    let mut entries = Vec::new();
    if p1_entry > 0.0 {
        entries.push((1usize, p1_entry));
    }
    for (j, mass) in p4_cells(&p.p4, scheme.n)? {
        entries.push((j, mass / denom));
    }
    Ok((kill, entries))
}

/// Masses `p4((j/n, (j+1)/n])` for the cells `2 <= j <= n^2 - 1` that carry
/// mass. Atoms are binned directly; densities are integrated cell by cell up
/// to their support bound.
fn p4_cells(p4: &P4Measure, n: u32) -> Result<Vec<(usize, f64)>> {
    let n_sq = (n as usize) * (n as usize);
    let nf = n as f64;
    let mut cells: Vec<(usize, f64)> = Vec::new();
    match p4 {
        P4Measure::Zero => {}
        P4Measure::Atoms(atoms) => {
            for &(x, mass) in atoms {
                // x in (j/n, (j+1)/n] gives j = ceil(x n) - 1
                let j = crate::math::floor(x * nf + 1.0 - 1e-12) as usize;
                let j = j.saturating_sub(1);
                if (2..n_sq).contains(&j) {
                    match cells.iter_mut().find(|(c, _)| *c == j) {
                        Some((_, m)) => *m += mass,
                        None => cells.push((j, mass)),
                    }
                }
            }
            cells.sort_unstable_by_key(|&(j, _)| j);
        }
        P4Measure::Power { upper, .. } => {
            let j_hi = cell_limit(*upper, nf, n_sq);
            for j in 2..j_hi {
                let mass = p4.interval_mass(j as f64 / nf, (j + 1) as f64 / nf)?;
                if mass > 0.0 {
                    cells.push((j, mass));
                }
            }
        }
        P4Measure::Custom(_) => {
            let j_hi = cell_limit(p4.support_upper(), nf, n_sq);
            for j in 2..j_hi {
                let mass = p4.interval_mass(j as f64 / nf, (j + 1) as f64 / nf)?;
                if mass > 0.0 {
                    cells.push((j, mass));
                }
            }
        }
    }
    Ok(cells)
}

fn cell_limit(upper: f64, nf: f64, n_sq: usize) -> usize {
    if !upper.is_finite() {
        return n_sq;
    }
    let hi = crate::math::floor(upper * nf) as usize + 1;
    hi.min(n_sq)
}

fn residual(kill: f64, entries: &[(usize, f64)]) -> f64 {
    let mut used = KahanSum::new();
    used.add(kill);
    for &(_, p) in entries {
        used.add(p);
    }
    1.0 - used.value()
}

/// Builds the jumping measure of the scheme. Fails with the smallest
/// admissible n (located by doubling search) when the residual probability is
/// negative, which happens for small n.
pub fn build_measure(scheme: &ScalingScheme) -> Result<JumpingMeasure> {
    let (kill, entries) = measure_parts(scheme)?;
    let rest = residual(kill, &entries);
    if rest < 0.0 {
        return Err(Error::NTooSmall {
            n: scheme.n,
            min_n: minimal_admissible_n(scheme)?,
        });
    }
    let residual_index = match scheme.regime {
        Regime::Sojourn => 0usize,
        Regime::Reflection => 1usize,
    };
    let support = entries
        .iter()
        .map(|&(j, _)| j)
        .max()
        .unwrap_or(0)
        .max(residual_index);
    let mut probs = alloc::vec![0.0f64; support + 1];
    for &(j, p) in &entries {
        probs[j] += p;
    }
    probs[residual_index] += rest;
    JumpingMeasure::new(kill, probs)
}

fn minimal_admissible_n(scheme: &ScalingScheme) -> Result<u32> {
    let admissible = |n: u32| -> Result<bool> {
        let s = scheme.with_n(n)?;
        let (kill, entries) = measure_parts(&s)?;
        Ok(residual(kill, &entries) >= 0.0)
    };
    let mut hi = scheme.n.max(2);
    let mut doublings = 0;
    while !admissible(hi)? {
        hi = hi.saturating_mul(2);
        doublings += 1;
        if doublings > 32 {
            return Err(Error::Precondition(
                "no admissible n found by doubling search",
            ));
        }
    }
    let mut lo = scheme.n.max(2);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if admissible(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(hi)
}

/// Named classical parameter sets. `coeffs` supplies the positive weights a
/// preset leaves free, in the order listed; missing entries default to 1.
pub fn preset(name: &str, coeffs: &[f64]) -> Result<(FellerParams, Regime)> {
    let c = |idx: usize| coeffs.get(idx).copied().unwrap_or(1.0);
    let params = |p1, p2, p3| FellerParams::new(p1, p2, p3, P4Measure::Zero);
    match name {
        "absorbed" => Ok((params(0.0, 0.0, 1.0)?, Regime::Sojourn)),
        "exponential_holding" => Ok((params(c(0), 0.0, c(1))?, Regime::Sojourn)),
        "sticky" => Ok((params(0.0, c(0), c(1))?, Regime::Sojourn)),
        "mixed" => Ok((params(c(0), c(1), c(2))?, Regime::Sojourn)),
        "reflected" => Ok((params(0.0, c(0), 0.0)?, Regime::Reflection)),
        "elastic" => Ok((params(c(0), c(1), 0.0)?, Regime::Reflection)),
        other => Err(Error::UnknownPreset(alloc::string::String::from(other))),
    }
}

/// Start state `floor(n * x0)` of the approximating walk.
pub fn start_state(x0: f64, n: u32) -> u32 {
    crate::math::floor(n as f64 * x0) as u32
}

/// The rescaled path `B^(n)_t = X_{floor(n^2 t)} / n` on the step grid.
/// `None` marks the cemetery.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledPath {
    pub n: u32,
    pub horizon: f64,
    /// values[k] is the rescaled state at grid time k/n^2
    pub values: Vec<Option<f64>>,
}

impl RescaledPath {
    pub fn grid_dt(&self) -> f64 {
        1.0 / (self.n as f64 * self.n as f64)
    }

    /// Value at continuous time `t <= horizon`; step-function convention.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let k = crate::math::floor(self.n as f64 * self.n as f64 * t) as usize;
        self.values[k.min(self.values.len() - 1)]
    }
}

/// Rescales an integer path; requires the path to cover `floor(n^2 T)` steps
/// (killed paths are frozen at the cemetery, so truncation is fine there).
pub fn rescale(path: &BrwPath, n: u32, horizon: f64) -> Result<RescaledPath> {
    let need = crate::math::floor(n as f64 * n as f64 * horizon) as usize;
    if path.killed_at.is_none() && path.states.len() <= need {
        return Err(Error::InsufficientPath {
            need: need + 1,
            have: path.states.len(),
        });
    }
    let values = (0..=need)
        .map(|k| path.state_at(k).map(|s| s as f64 / n as f64))
        .collect();
    Ok(RescaledPath {
        n,
        horizon,
        values,
    })
}

/// The first-stage duration estimate of the discrete walk,
/// `(1/n^2) [p_0/q + (p_1/q)^2]` with `q = p_Delta + sum_{j>=2} p_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscreteStageEstimate {
    pub xi_n: f64,
}

pub fn discrete_stage(measure: &JumpingMeasure, n: u32) -> Result<DiscreteStageEstimate> {
    let mut q = KahanSum::new();
    q.add(measure.kill());
    for &p in measure.probs().iter().skip(2) {
        q.add(p);
    }
    let q = q.value();
    let p0 = measure.prob(0);
    let p1 = measure.prob(1);
    if q == 0.0 {
        if p0 == 0.0 && p1 == 0.0 {
            return Ok(DiscreteStageEstimate { xi_n: 0.0 });
        }
        return Err(Error::Precondition("discrete_stage requires q > 0"));
    }
    let n2 = n as f64 * n as f64;
    Ok(DiscreteStageEstimate {
        xi_n: (p0 / q + (p1 / q) * (p1 / q)) / n2,
    })
}
