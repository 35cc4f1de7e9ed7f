//! Closed-form time-t marginals of the limiting boundary diffusions, used as
//! references for distributional comparisons.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::brw::{simulate, JumpingMeasure};
use crate::error::{Error, Result};
use crate::math::{self, norm_cdf};

/// A (possibly defective) law on `[0, infinity)`: an atom at 0, an absolutely
/// continuous part described through its sub-CDF, and killed mass.
/// `cdf(y)` returns `P(X_t <= y, alive)`, including the atom at 0.
#[derive(Clone)]
pub struct MarginalLaw {
    pub cdf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub atom_at_zero: f64,
    pub kill_mass: f64,
    pub t: f64,
    pub x0: f64,
}

impl MarginalLaw {
    /// Total mass carried by living trajectories.
    pub fn alive_mass(&self) -> f64 {
        1.0 - self.kill_mass
    }
}

/// Reflecting Brownian motion started at `x0 >= 0`: the folded normal
/// `P(|x0 + B_t| <= y) = Phi((y - x0)/sqrt t) - Phi((-y - x0)/sqrt t)`.
pub fn reflected_marginal(x0: f64, t: f64) -> Result<MarginalLaw> {
    if !(t > 0.0) || !(x0 >= 0.0) {
        return Err(Error::OutOfDomain {
            what: "reflected marginal needs t > 0 and x0 >= 0",
        });
    }
    let s = math::sqrt(t);
    let cdf = Arc::new(move |y: f64| {
        if y < 0.0 {
            0.0
        } else {
            norm_cdf((y - x0) / s) - norm_cdf((-y - x0) / s)
        }
    });
    Ok(MarginalLaw {
        cdf,
        atom_at_zero: 0.0,
        kill_mass: 0.0,
        t,
        x0,
    })
}

/// Brownian motion absorbed at 0, started at `x0 > 0`, with absorbed paths
/// sent to the cemetery: killed mass `2 Phi(-x0 / sqrt t)` and sub-CDF
/// `Phi((y - x0)/sqrt t) - Phi((-y - x0)/sqrt t)` on the living part.
pub fn absorbed_marginal(x0: f64, t: f64) -> Result<MarginalLaw> {
    if !(t > 0.0) || !(x0 > 0.0) {
        return Err(Error::OutOfDomain {
            what: "absorbed marginal needs t > 0 and x0 > 0",
        });
    }
    let s = math::sqrt(t);
    let kill_mass = 2.0 * norm_cdf(-x0 / s);
    let cdf = Arc::new(move |y: f64| {
        if y <= 0.0 {
            0.0
        } else {
            // reflection principle: density phi_t(y - x0) - phi_t(y + x0),
            // integrated from 0 to y term by term
            (norm_cdf((y - x0) / s) - norm_cdf(-x0 / s))
                - (norm_cdf((y + x0) / s) - norm_cdf(x0 / s))
        }
    });
    Ok(MarginalLaw {
        cdf,
        atom_at_zero: 0.0,
        kill_mass,
        t,
        x0,
    })
}

/// Survival probability of the exponentially-held-then-killed motion started
/// at 0 with killing rate `p1/p3`: `exp(-p1 t / p3)` stays valid while the
/// process has not yet left the boundary (pure holding case, p4 = 0, p2 = 0).
pub fn exp_holding_survival(p1: f64, p3: f64, t: f64) -> Result<f64> {
    if !(p3 > 0.0) || !(p1 >= 0.0) || !(t >= 0.0) {
        return Err(Error::OutOfDomain {
            what: "exponential holding needs p3 > 0, p1 >= 0, t >= 0",
        });
    }
    Ok(math::exp(-p1 * t / p3))
}

/// Empirical marginal of the walk itself on a fine lattice, used as a
/// self-consistency reference when no closed form is available: simulates
/// `count` paths of the given measure for `steps` steps and reports the
/// rescaled empirical law of the final state.
pub struct EmpiricalMarginal {
    /// sorted rescaled final positions of surviving paths
    pub samples: Vec<f64>,
    pub killed: usize,
    pub count: usize,
}

pub fn fine_grid_reference(
    measure: &JumpingMeasure,
    start: u32,
    n: u32,
    steps: usize,
    count: usize,
    seed: u64,
) -> EmpiricalMarginal {
    let ens = simulate(measure, start, steps, count, seed);
    let nf = n as f64;
    let mut samples = Vec::with_capacity(count);
    let mut killed = 0usize;
    for p in &ens.paths {
        match p.state_at(steps) {
            Some(s) => samples.push(s as f64 / nf),
            None => killed += 1,
        }
    }
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    EmpiricalMarginal {
        samples,
        killed,
        count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflected_limits() {
        let law = reflected_marginal(0.5, 1.0).unwrap();
        assert_eq!((law.cdf)(-1.0), 0.0);
        assert!(math::fabs((law.cdf)(50.0) - 1.0) < 1e-15);
        assert_eq!(law.kill_mass, 0.0);
        // started at 0 the law is |N(0, t)|: median at 0.6745 sqrt(t)
        let law = reflected_marginal(0.0, 4.0).unwrap();
        let med = (law.cdf)(0.674489750196082 * 2.0);
        assert!(math::fabs(med - 0.5) < 1e-12, "median cdf = {med}");
    }

    #[test]
    fn reflected_monotone() {
        let law = reflected_marginal(1.0, 0.7).unwrap();
        let mut prev = 0.0;
        for k in 0..200 {
            let v = (law.cdf)(k as f64 * 0.05);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn absorbed_mass_split() {
        let law = absorbed_marginal(1.0, 1.0).unwrap();
        // killed mass 2 Phi(-1) = 0.31731050786291415
        assert!(math::fabs(law.kill_mass - 0.31731050786291415) < 1e-14);
        let total = (law.cdf)(60.0) + law.kill_mass;
        assert!(math::fabs(total - 1.0) < 1e-14, "total = {total}");
        assert_eq!((law.cdf)(0.0), 0.0);
        // the sub-CDF vanishes continuously at the absorbing end
        assert!((law.cdf)(1e-8) < 1e-7);
        // quadrature of the reflection-principle density agrees mid-range
        let dens = |y: f64| math::norm_pdf(y - 1.0) - math::norm_pdf(y + 1.0);
        let q = crate::math::adaptive_simpson(&dens, 0.0, 1.5, 1e-12);
        assert!(math::fabs((law.cdf)(1.5) - q) < 1e-10);
    }

    #[test]
    fn absorbed_small_t_keeps_mass() {
        let law = absorbed_marginal(1.0, 0.01).unwrap();
        assert!(law.kill_mass < 1e-20);
        assert!((law.cdf)(2.0) > 1.0 - 1e-15);
    }

    #[test]
    fn exp_holding_values() {
        assert_eq!(exp_holding_survival(1.0, 1.0, 0.0).unwrap(), 1.0);
        let v = exp_holding_survival(2.0, 1.0, 1.0).unwrap();
        assert!(math::fabs(v - math::exp(-2.0)) < 1e-16);
        assert!(exp_holding_survival(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn fine_grid_reference_counts() {
        let m = JumpingMeasure::new(0.5, alloc::vec![0.0, 0.5]).unwrap();
        let emp = fine_grid_reference(&m, 0, 10, 5, 1000, 42);
        assert_eq!(emp.samples.len() + emp.killed, 1000);
        assert!(emp.killed > 0);
        for w in emp.samples.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }
}
