//! Return-probability generating function of the walk at 0, shifted Catalan
//! numbers, first-passage laws and the occupation bound.
//!
//! Two independent routes are kept side by side: the closed form
//! `F(x) = 1 / (1 - x * sum_k p_k g(x)^k)` with `g(x) = (1 - sqrt(1-x^2))/x`,
//! and a forward dynamic program on the transition matrix producing the series
//! coefficients `a_k = P_0(X_k = 0)` directly.

use alloc::vec::Vec;

use crate::brw::JumpingMeasure;
use crate::error::{Error, Result};
use crate::math::{self, KahanSum};

/// Coefficients `a_k = P_0(X_k = 0)`, `k = 0..=K`.
#[derive(Clone, Debug)]
pub struct ReturnSeries {
    pub coefficients: Vec<f64>,
}

impl ReturnSeries {
    /// Partial sum `sum_{k<=K} a_k x^k`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = KahanSum::new();
        let mut xk = 1.0;
        for &a in &self.coefficients {
            acc.add(a * xk);
            xk *= x;
        }
        acc.value()
    }

    /// Analytic tail bound `x^{K+1}/(1-x)` for the truncated series.
    pub fn tail_bound(&self, x: f64) -> f64 {
        let k = self.coefficients.len();
        math::pow(x, k as f64) / (1.0 - x)
    }

    /// Partial sum `sum_{k<m} a_k` of raw return probabilities.
    pub fn occupation_partial_sum(&self, m: usize) -> f64 {
        let mut acc = KahanSum::new();
        for &a in self.coefficients.iter().take(m) {
            acc.add(a);
        }
        acc.value()
    }
}

/// The inner ratio `g(x) = (1 - sqrt(1-x^2))/x`, evaluated in the
/// cancellation-free form `x / (1 + sqrt(1-x^2))`. `g(0) = 0`.
fn inner_ratio(x: f64) -> f64 {
    x / (1.0 + math::sqrt(1.0 - x * x))
}

/// Closed-form `F(x)` for `0 <= x < 1`.
pub fn f_closed(measure: &JumpingMeasure, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::OutOfDomain { what: "f_closed requires 0 <= x < 1" });
    }
    let g = inner_ratio(x);
    let mut sum = KahanSum::new();
    let mut gk = 1.0;
    for &p in measure.probs() {
        sum.add(p * gk);
        gk *= g;
    }
    Ok(1.0 / (1.0 - x * sum.value()))
}

/// Total occupation mass `sum_k a_k = lim_{x->1} F(x)`, finite when the
/// measure kills with positive probability.
///
/// Direct partial sums converge only like `1/sqrt(K)` because of the
/// square-root branch at `x = 1`, so instead `F` is evaluated in the branch
/// variable `u = sqrt(1 - x^2)`, in which it is analytic near `u = 0`, and
/// extrapolated to `u = 0` by Neville's scheme. Accurate well past 1e-6.
pub fn occupation_total(measure: &JumpingMeasure) -> Result<f64> {
    if !(measure.kill() > 0.0) {
        return Err(Error::Precondition(
            "occupation total is infinite without killing",
        ));
    }
    const POINTS: usize = 10;
    let mut u_pts = [0.0f64; POINTS];
    let mut vals = [0.0f64; POINTS];
    for j in 0..POINTS {
        let u = 0.01 * (j + 1) as f64;
        let x = math::sqrt(1.0 - u * u);
        let g = x / (1.0 + u);
        let mut sum = KahanSum::new();
        let mut gk = 1.0;
        for &p in measure.probs() {
            sum.add(p * gk);
            gk *= g;
        }
        u_pts[j] = u;
        vals[j] = 1.0 / (1.0 - x * sum.value());
    }
    // Neville tableau evaluated at u = 0
    for level in 1..POINTS {
        for j in 0..POINTS - level {
            let (ua, ub) = (u_pts[j], u_pts[j + level]);
            vals[j] = (ub * vals[j] - ua * vals[j + 1]) / (ub - ua);
        }
    }
    Ok(vals[0])
}

/// Series coefficients `a_0..a_K` by distribution-vector iteration. The state
/// space is truncated at `support_max + K`, which the walk cannot exceed, so
/// the DP is exact up to rounding.
pub fn f_series(measure: &JumpingMeasure, k_max: usize) -> ReturnSeries {
    let bound = measure.support_max() + k_max + 2;
    let mut dist = alloc::vec![0.0f64; bound];
    let mut next = alloc::vec![0.0f64; bound];
    dist[0] = 1.0;
    let mut coefficients = Vec::with_capacity(k_max + 1);
    coefficients.push(1.0);
    for _ in 1..=k_max {
        for v in next.iter_mut() {
            *v = 0.0;
        }
        let at0 = dist[0];
        if at0 > 0.0 {
            for (j, &p) in measure.probs().iter().enumerate() {
                next[j] += at0 * p;
            }
        }
        for i in 1..bound - 1 {
            let d = dist[i];
            if d > 0.0 {
                next[i - 1] += 0.5 * d;
                next[i + 1] += 0.5 * d;
            }
        }
        coefficients.push(next[0]);
        core::mem::swap(&mut dist, &mut next);
    }
    ReturnSeries { coefficients }
}

fn binomial_u128(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1u128;
    for j in 0..k {
        num = num * (n - j) as u128 / (j + 1) as u128;
    }
    num
}

/// Shifted Catalan number `M_{i,j0}`, computed through both closed forms
/// (binomial difference and `i/(i+2j0)` times a binomial) and cross-checked.
pub fn catalan(i: u32, j0: u32) -> Result<u128> {
    if i < 1 {
        return Err(Error::Precondition("catalan requires i >= 1"));
    }
    if i + 2 * j0 > 64 {
        return Err(Error::BudgetExceeded {
            leaves: (i + 2 * j0) as u64,
            budget: 64,
        });
    }
    let n = i + 2 * j0 - 1;
    let diff = binomial_u128(n, j0) - if j0 == 0 { 0 } else { binomial_u128(n, j0 - 1) };
    // i/(i+2j0) * C(i+2j0, j0) is an integer; multiply before dividing
    let prod = i as u128 * binomial_u128(i + 2 * j0, j0);
    debug_assert_eq!(prod % (i + 2 * j0) as u128, 0);
    let ratio_form = prod / (i + 2 * j0) as u128;
    assert_eq!(diff, ratio_form, "Catalan closed forms disagree");
    Ok(diff)
}

/// Generating function `sum_j0 M_{i,j0} t^j0 = ((1-sqrt(1-4t))/(2t))^i`,
/// `0 < t <= 1/4`, evaluated in the stable form `(2/(1+sqrt(1-4t)))^i`.
pub fn catalan_gf(i: u32, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 0.25) {
        return Err(Error::OutOfDomain { what: "catalan_gf requires 0 < t <= 1/4" });
    }
    let base = 2.0 / (1.0 + math::sqrt(1.0 - 4.0 * t));
    Ok(math::pow(base, i as f64))
}

/// First-passage law `P_i(tau_0 = j) = M_{i,(j-i)/2} / 2^j`, zero off-parity.
/// Exact dyadic when `i + (j-i) <= 64`; a term recurrence in floating point
/// otherwise.
pub fn catalan_first_passage(i: u32, j: u32) -> f64 {
    assert!(i >= 1);
    if j < i || (j - i) % 2 != 0 {
        return 0.0;
    }
    let j0 = (j - i) / 2;
    if i + 2 * j0 <= 64 {
        let m = catalan(i, j0).expect("within exact range");
        return m as f64 * math::pow(2.0, -(j as f64));
    }
    first_passage_terms(i, j0 as usize).last().unwrap_or(0.0)
}

/// Terms `t_{j0} = M_{i,j0} / 2^{i+2j0}` for `j0 = 0..=j0_max`, by the exact
/// ratio recurrence `t_{j0+1}/t_{j0} = (i+2j0)(i+2j0+1) / (4 (j0+1)(i+j0+1))`.
pub struct FirstPassageTerms {
    i: f64,
    j0: f64,
    t: f64,
    remaining: usize,
}

pub fn first_passage_terms(i: u32, j0_max: usize) -> FirstPassageTerms {
    FirstPassageTerms {
        i: i as f64,
        j0: 0.0,
        t: math::pow(2.0, -(i as f64)),
        remaining: j0_max + 1,
    }
}

impl Iterator for FirstPassageTerms {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let current = self.t;
        let (i, j) = (self.i, self.j0);
        self.t *= (i + 2.0 * j) * (i + 2.0 * j + 1.0) / (4.0 * (j + 1.0) * (i + j + 1.0));
        self.j0 += 1.0;
        Some(current)
    }
}

/// Occupation-time bound `e / sqrt(1 - e^{-2/m})` for the visit count to 0
/// before step `m`, valid whenever `p_0 = 0`.
pub fn occupation_bound(m: u64) -> f64 {
    assert!(m >= 1);
    core::f64::consts::E / math::sqrt(-math::expm1(-2.0 / m as f64))
}
