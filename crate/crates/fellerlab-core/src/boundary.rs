//! Boundary parameters of a Feller Brownian motion and the jump-in measure p4.
//!
//! The quadruple `(p1, p2, p3, p4)` encodes killing, reflection, sojourn and
//! jumping weight at the boundary point 0. It is unique only up to a
//! multiplicative constant, so parameters are stored exactly as given and every
//! downstream formula is ratio-based.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type IntervalMassFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// User-supplied density with a declared weighted moment. An analytic
/// interval-mass closure may be provided; otherwise adaptive quadrature with
/// absolute tolerance 1e-12 is used.
#[derive(Clone)]
pub struct CustomDensity {
    density: DensityFn,
    interval_mass: Option<IntervalMassFn>,
    weighted_moment: f64,
    total_mass: f64,
    upper: f64,
}

/// The jump-in measure p4 on (0, infinity).
///
/// Intervals are always half-open `(a, b]`: an atom exactly at `a` is excluded.
#[derive(Clone)]
pub enum P4Measure {
    Zero,
    /// Finite list of point masses `(location > 0, mass > 0)`.
    Atoms(Vec<(f64, f64)>),
    /// Density `c * x^alpha` on `(0, upper]`.
    Power { c: f64, alpha: f64, upper: f64 },
    Custom(CustomDensity),
}

const QUAD_TOL: f64 = 1e-12;

impl P4Measure {
    /// Single atom of mass `mass` at `location`.
    pub fn atom(location: f64, mass: f64) -> Self {
        P4Measure::Atoms(alloc::vec![(location, mass)])
    }

    /// Builds a custom density, cross-checking the declared weighted moment
    /// `int (x ^ 1) p4(dx)` against quadrature on (0, 1] to relative 1e-6.
    pub fn custom(
        density: DensityFn,
        interval_mass: Option<IntervalMassFn>,
        weighted_moment: f64,
        total_mass: f64,
        upper: f64,
    ) -> Result<Self> {
        if !(weighted_moment.is_finite() && weighted_moment >= 0.0) {
            return Err(Error::Precondition("declared weighted_moment must be finite"));
        }
        let d = density.clone();
        let f = move |x: f64| x.min(1.0) * d(x);
        let cut = upper.min(1.0);
        let mut checked = math::adaptive_simpson(&f, 1e-10, cut, 1e-10);
        if upper > 1.0 {
            let d2 = density.clone();
            let g = move |x: f64| d2(x);
            checked += math::adaptive_simpson(&g, 1.0, upper, 1e-10);
        }
        let rel = math::fabs(checked - weighted_moment) / weighted_moment.max(1e-300);
        if rel > 1e-6 && math::fabs(checked - weighted_moment) > 1e-9 {
            return Err(Error::QuadratureFailure);
        }
        Ok(P4Measure::Custom(CustomDensity {
            density,
            interval_mass,
            weighted_moment,
            total_mass,
            upper,
        }))
    }

    /// Total mass `|p4| = p4((0, infinity))`, possibly infinite.
    pub fn total_mass(&self) -> f64 {
        match self {
            P4Measure::Zero => 0.0,
            P4Measure::Atoms(atoms) => atoms.iter().map(|&(_, m)| m).sum(),
            P4Measure::Power { c, alpha, upper } => {
                if *alpha > -1.0 {
                    c * math::pow(*upper, alpha + 1.0) / (alpha + 1.0)
                } else {
                    f64::INFINITY
                }
            }
            P4Measure::Custom(d) => d.total_mass,
        }
    }

    /// The weighted moment `int (x ^ 1) p4(dx)`, possibly infinite.
    pub fn weighted_moment(&self) -> f64 {
        match self {
            P4Measure::Zero => 0.0,
            P4Measure::Atoms(atoms) => atoms.iter().map(|&(x, m)| x.min(1.0) * m).sum(),
            P4Measure::Power { c, alpha, upper } => {
                // near 0 the integrand is c * x^{alpha+1}, integrable iff alpha > -2
                if *alpha <= -2.0 {
                    return f64::INFINITY;
                }
                let cut = upper.min(1.0);
                let mut v = c * math::pow(cut, alpha + 2.0) / (alpha + 2.0);
                if *upper > 1.0 {
                    v += if math::fabs(alpha + 1.0) < 1e-300 {
                        c * math::log(*upper)
                    } else {
                        c * (math::pow(*upper, alpha + 1.0) - 1.0) / (alpha + 1.0)
                    };
                }
                v
            }
            P4Measure::Custom(d) => d.weighted_moment,
        }
    }

    /// Mass of the half-open interval `(a, b]`. Requires `0 < a <= b`.
    pub fn interval_mass(&self, a: f64, b: f64) -> Result<f64> {
        if !(a > 0.0 && b >= a) {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(match self {
            P4Measure::Zero => 0.0,
            P4Measure::Atoms(atoms) => atoms
                .iter()
                .filter(|&&(x, _)| x > a && x <= b)
                .map(|&(_, m)| m)
                .sum(),
            P4Measure::Power { c, alpha, upper } => {
                let lo = a;
                let hi = b.min(*upper);
                if hi <= lo {
                    0.0
                } else if math::fabs(alpha + 1.0) < 1e-300 {
                    c * math::log(hi / lo)
                } else {
                    c * (math::pow(hi, alpha + 1.0) - math::pow(lo, alpha + 1.0)) / (alpha + 1.0)
                }
            }
            P4Measure::Custom(d) => {
                let lo = a;
                let hi = b.min(d.upper);
                if hi <= lo {
                    0.0
                } else if let Some(im) = &d.interval_mass {
                    im(lo, hi)
                } else {
                    let rho = d.density.clone();
                    math::adaptive_simpson(&move |x| rho(x), lo, hi, QUAD_TOL)
                }
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, P4Measure::Zero)
    }

    /// Upper end of the support, `+inf` when unbounded.
    pub fn support_upper(&self) -> f64 {
        match self {
            P4Measure::Zero => 0.0,
            P4Measure::Atoms(atoms) => atoms
                .iter()
                .map(|&(x, _)| x)
                .fold(0.0, f64::max),
            P4Measure::Power { upper, .. } => *upper,
            P4Measure::Custom(d) => d.upper,
        }
    }
}

/// Boundary parameters `(p1, p2, p3, p4)` of a Feller Brownian motion:
/// killing, reflection, sojourn weight and the jump-in measure.
#[derive(Clone)]
pub struct FellerParams {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: P4Measure,
}

/// Outcome of admissibility validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationReport {
    Admissible,
    Inadmissible { reason: String },
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        matches!(self, ValidationReport::Admissible)
    }
}

/// First-stage boundary timing heuristic: expected sojourn time
/// `p3/(p1+|p4|)`, approximate reflection time `(p2/(p1+|p4|))^2`, and their sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryStageEstimate {
    pub sojourn_mean: f64,
    pub reflection_time: f64,
    pub total: f64,
}

impl FellerParams {
    pub fn new(p1: f64, p2: f64, p3: f64, p4: P4Measure) -> Result<Self> {
        for (v, name) in [(p1, "p1"), (p2, "p2"), (p3, "p3")] {
            if !(v.is_finite() && v >= 0.0) {
                let _ = name;
                return Err(Error::Precondition("p1, p2, p3 must be finite and >= 0"));
            }
        }
        Ok(FellerParams { p1, p2, p3, p4 })
    }

    /// Checks whether the parameters admit a BRW approximation scheme.
    ///
    /// Admissible iff `p3 > 0`, or `p3 = 0` and `p2 > 0`. The pure-jump regime
    /// `p2 = p3 = 0` and a divergent weighted moment are each rejected.
    pub fn validate(&self) -> ValidationReport {
        let inadmissible = |reason: &str| ValidationReport::Inadmissible {
            reason: String::from(reason),
        };
        if self.p1 == 0.0 && self.p2 == 0.0 && self.p3 == 0.0 && self.p4.is_zero() {
            return inadmissible("all parameters zero");
        }
        if !self.p4.weighted_moment().is_finite() {
            return inadmissible("infinite weighted moment");
        }
        if self.p2 == 0.0 && self.p3 == 0.0 {
            return inadmissible("pure-jump boundary");
        }
        ValidationReport::Admissible
    }

    /// Expected duration of the first boundary stage. Defined only when
    /// `|p4| < infinity` and `p1 + |p4| > 0`.
    pub fn boundary_stage(&self) -> Result<BoundaryStageEstimate> {
        let rate = self.p1 + self.p4.total_mass();
        if !rate.is_finite() || rate == 0.0 {
            return Err(Error::JumpRateUndefined);
        }
        let sojourn_mean = self.p3 / rate;
        let reflection_time = (self.p2 / rate) * (self.p2 / rate);
        Ok(BoundaryStageEstimate {
            sojourn_mean,
            reflection_time,
            total: sojourn_mean + reflection_time,
        })
    }

    /// Normalized second-stage jump law `(p1 * delta_Delta + p4) / (p1 + |p4|)`.
    pub fn fbm_jump_law(&self) -> Result<FbmJumpLaw> {
        let rate = self.p1 + self.p4.total_mass();
        if !rate.is_finite() || rate == 0.0 {
            return Err(Error::JumpRateUndefined);
        }
        let kill = self.p1 / rate;
        let jump_total = self.p4.total_mass() / rate;
        let atoms = match &self.p4 {
            P4Measure::Atoms(atoms) => Some(
                atoms
                    .iter()
                    .map(|&(x, m)| (x, m / rate))
                    .collect::<Vec<_>>(),
            ),
            P4Measure::Zero => Some(Vec::new()),
            _ => None,
        };
        Ok(FbmJumpLaw {
            kill,
            jump_total,
            atoms,
        })
    }
}

/// Discrete description of the FBM jumping measure at 0.
#[derive(Clone, Debug)]
pub struct FbmJumpLaw {
    /// Normalized killing weight `p1/(p1+|p4|)`.
    pub kill: f64,
    /// Normalized jump-in weight `|p4|/(p1+|p4|)`; `kill + jump_total = 1`.
    pub jump_total: f64,
    /// Normalized atom weights when p4 is purely atomic (or zero).
    pub atoms: Option<Vec<(f64, f64)>>,
}
