//! Truncation planning: the normalization `s(t)`, the per-step error bound
//! `epsilon = 2 - s(t_inf)`, insertion gains, and the greedy by-weight
//! construction of truncation vectors.
//!
//! A truncation vector `L = (L_1, L_2, ...)` keeps the `L_k` largest terms of
//! the Hamiltonian in Taylor order `k`. With `Lambda_j` the total weight of the
//! `L_j` largest terms,
//!
//! ```text
//! s_L(t) = sum_k  t^k / k!  *  Lambda_1 * ... * Lambda_k
//! ```
//!
//! and every product containing an empty order vanishes, so all sums here are
//! finite.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SortedHamiltonian;

/// Per-order term counts `L_k`, `k = 1, 2, ...`; trailing zeros are implied.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct TruncationVector {
    levels: Vec<usize>,
}

impl From<Vec<usize>> for TruncationVector {
    fn from(levels: Vec<usize>) -> Self {
        Self::new(levels)
    }
}

impl From<TruncationVector> for Vec<usize> {
    fn from(v: TruncationVector) -> Self {
        v.levels
    }
}

impl TruncationVector {
    pub fn new(mut levels: Vec<usize>) -> Self {
        while levels.last() == Some(&0) {
            levels.pop();
        }
        Self { levels }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Orders `1..=order` each hold all `terms` terms.
    pub fn full_order(order: usize, terms: usize) -> Self {
        Self::new(vec![terms; order])
    }

    /// `L_k` for 1-based order `k`; zero beyond the stored length.
    pub fn level(&self, k: usize) -> usize {
        if k == 0 {
            return 0;
        }
        self.levels.get(k - 1).copied().unwrap_or(0)
    }

    /// Stored levels without trailing zeros.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Number of nonzero orders, `||L||_0`.
    pub fn kappa(&self) -> usize {
        self.levels.iter().filter(|&&l| l > 0).count()
    }

    /// Gate-cost proxy `||L||_1`.
    pub fn cost(&self) -> usize {
        self.levels.iter().sum()
    }

    /// Length of the leading run of nonzero orders. Orders past the first
    /// empty one never contribute to `s`.
    pub fn active_orders(&self) -> usize {
        self.levels.iter().take_while(|&&l| l > 0).count()
    }

    /// True when no empty order precedes a nonzero one.
    pub fn is_contiguous(&self) -> bool {
        self.active_orders() == self.levels.len()
    }

    pub fn incremented(&self, k: usize) -> Self {
        assert!(k >= 1, "orders are 1-based");
        let mut levels = self.levels.clone();
        if levels.len() < k {
            levels.resize(k, 0);
        }
        levels[k - 1] += 1;
        Self { levels }
    }

    pub fn validate(&self, h: &SortedHamiltonian) -> Result<()> {
        match self.levels.iter().position(|&l| l > h.len()) {
            Some(i) => Err(Error::invalid(format!(
                "L_{} = {} exceeds the term count {}",
                i + 1,
                self.levels[i],
                h.len()
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for TruncationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for TruncationVector {
    type Err = Error;

    /// Accepts `2,1`, `(2, 1)` or `2;1`; the empty string is the zero vector.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if body.is_empty() {
            return Ok(Self::zero());
        }
        body.split([',', ';'])
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("invalid level {part:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

/// Step size at which the untruncated series has `s = 2`: `ln 2 / Lambda`.
pub fn t_infinity(h: &SortedHamiltonian) -> f64 {
    LN_2 / h.lambda_total()
}

pub fn cost_of(levels: &TruncationVector) -> usize {
    levels.cost()
}

pub fn full_order_levels(h: &SortedHamiltonian, order: usize) -> TruncationVector {
    TruncationVector::full_order(order, h.len())
}

/// `s_L(t)`, evaluated as an exact finite sum.
pub fn s_value(h: &SortedHamiltonian, levels: &TruncationVector, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("time step must be finite and >= 0, got {t}")));
    }
    levels.validate(h)?;
    let mut total = 1.0;
    let mut term = 1.0;
    for (i, &l) in levels.levels().iter().enumerate() {
        if l == 0 {
            break;
        }
        term *= t * h.prefix_lambda(l)? / (i + 1) as f64;
        total += term;
    }
    Ok(total)
}

/// Per-step error bound `epsilon_L = 2 - s_L(t_inf)`.
///
/// Evaluated as `sum_k ln(2)^k / k! * (1 - prod_{j<=k} (1 - d_j))` with
/// `d_j = (Lambda - Lambda_j) / Lambda`, which equals `2 - s_L(t_inf)` but keeps
/// full relative precision when the bound is far below machine epsilon.
pub fn epsilon_bound(h: &SortedHamiltonian, levels: &TruncationVector) -> Result<f64> {
    levels.validate(h)?;
    let lambda = h.lambda_total();
    let mut eps = 0.0;
    let mut coef = 1.0;
    let mut log_kept = 0.0;
    let mut truncated = false;
    for k in 1usize.. {
        coef *= LN_2 / k as f64;
        if !truncated {
            match levels.level(k) {
                0 => truncated = true,
                l => log_kept += (-h.tail_lambda(l)? / lambda).ln_1p(),
            }
        }
        let deficit = if truncated { 1.0 } else { -log_kept.exp_m1() };
        eps += coef * deficit;
        if truncated && (coef <= eps * 1e-18 || coef == 0.0) {
            break;
        }
    }
    Ok(eps)
}

/// Increase of `s_L(t_inf)` when `L_k` is incremented by one.
pub fn insertion_gain(h: &SortedHamiltonian, levels: &TruncationVector, k: usize) -> Result<f64> {
    insertion_gain_at(h, levels, k, t_infinity(h))
}

/// Increase of `s_L(t)` when the next-largest unused term is added to order `k`:
///
/// ```text
/// sum_{nu >= k} t^nu / nu! * alpha_{L_k} * prod_{j <= nu, j != k} Lambda_j
/// ```
///
/// Zero when an earlier order is empty.
pub fn insertion_gain_at(
    h: &SortedHamiltonian,
    levels: &TruncationVector,
    k: usize,
    t: f64,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("orders are 1-based"));
    }
    levels.validate(h)?;
    let current = levels.level(k);
    if current >= h.len() {
        return Err(Error::OrderFull { k, terms: h.len() });
    }
    let next_alpha = h.terms()[current].alpha;

    let mut coef = 1.0;
    for nu in 1..k {
        let l = levels.level(nu);
        if l == 0 {
            return Ok(0.0);
        }
        coef *= t * h.prefix_lambda(l)? / nu as f64;
    }
    coef *= t / k as f64;
    let mut gain = coef * next_alpha;
    for nu in (k + 1).. {
        let l = levels.level(nu);
        if l == 0 {
            break;
        }
        coef *= t * h.prefix_lambda(l)? / nu as f64;
        gain += coef * next_alpha;
    }
    Ok(gain)
}

/// `t_L`, the root of `s_L(t) = 2`, by bracketing and bisection.
pub fn solve_t_root(h: &SortedHamiltonian, levels: &TruncationVector) -> Result<f64> {
    levels.validate(h)?;
    if levels.active_orders() == 0 {
        return Err(Error::NoActiveOrders);
    }
    let residual = |t: f64| s_value(h, levels, t).map(|s| s - 2.0);

    let mut lo = 0.0;
    let mut hi = 1.0 / h.prefix_lambda(levels.level(1))?;
    let mut doublings = 0;
    while residual(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return Err(Error::NoConvergence("could not bracket the root of s(t) = 2".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (r_lo, r_hi) = (residual(lo)?, residual(hi)?);
    let (t, r) = if r_lo.abs() <= r_hi.abs() { (lo, r_lo) } else { (hi, r_hi) };
    if r.abs() > 1e-12 {
        return Err(Error::NoConvergence(format!(
            "bisection stalled at t = {t} with |s - 2| = {:e}",
            r.abs()
        )));
    }
    Ok(t)
}

/// The same Taylor-remainder bound evaluated at the step `t_L` instead of
/// `t_inf`: `e^(Lambda t_L) - 2`. Differs from [`epsilon_bound`] only at
/// higher order in `epsilon`.
pub fn epsilon_at_root_step(h: &SortedHamiltonian, levels: &TruncationVector) -> Result<f64> {
    let t_root = solve_t_root(h, levels)?;
    Ok(2.0 * (h.lambda_total() * t_root - LN_2).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Stop once the cost `||L||_1` reaches this value.
    Budget(usize),
    /// Stop once `epsilon <= target`.
    TargetEpsilon(f64),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyOptions {
    /// Cost at which a [`StopRule::TargetEpsilon`] plan gives up; defaults to `64 L`.
    pub cost_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStep {
    #[serde(rename = "k")]
    pub order: usize,
    pub gain: f64,
    #[serde(rename = "epsilon")]
    pub epsilon_after: f64,
    #[serde(rename = "cost")]
    pub cost_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanTrace {
    pub hamiltonian: String,
    pub t: f64,
    pub steps: Vec<PlanStep>,
    pub final_levels: TruncationVector,
}

impl PlanTrace {
    /// Truncation vector after the first `cost` insertions.
    pub fn levels_at_cost(&self, cost: usize) -> Result<TruncationVector> {
        if cost > self.steps.len() {
            return Err(Error::invalid(format!(
                "trace only reaches cost {}, asked for {cost}",
                self.steps.len()
            )));
        }
        Ok(self.steps[..cost]
            .iter()
            .fold(TruncationVector::zero(), |v, s| v.incremented(s.order)))
    }

    /// Bound after the first `cost` insertions; 1 for the empty vector.
    pub fn epsilon_at_cost(&self, cost: usize) -> Option<f64> {
        match cost {
            0 => Some(1.0),
            c => self.steps.get(c - 1).map(|s| s.epsilon_after),
        }
    }

    pub fn final_epsilon(&self) -> f64 {
        self.epsilon_at_cost(self.steps.len()).unwrap_or(1.0)
    }

    /// Smallest cost on this trace whose bound is at most `epsilon`.
    pub fn cost_to_reach(&self, epsilon: f64) -> Option<usize> {
        if epsilon >= 1.0 {
            return Some(0);
        }
        self.steps
            .iter()
            .find(|s| s.epsilon_after <= epsilon)
            .map(|s| s.cost_after)
    }
}

/// Greedy construction starting from the zero vector: each step increments
/// the `L_k` with the largest insertion gain at `t_inf` (lowest `k` on ties).
pub fn greedy_plan(h: &SortedHamiltonian, stop: StopRule) -> Result<PlanTrace> {
    greedy_plan_with(h, stop, GreedyOptions::default())
}

pub fn greedy_plan_with(
    h: &SortedHamiltonian,
    stop: StopRule,
    options: GreedyOptions,
) -> Result<PlanTrace> {
    let cap = options.cost_cap.unwrap_or(64 * h.len());
    match stop {
        StopRule::Budget(0) => return Err(Error::invalid("budget must be at least 1")),
        StopRule::TargetEpsilon(e) if !(e > 0.0 && e < 1.0) => {
            return Err(Error::invalid(format!("target epsilon must lie in (0, 1), got {e}")))
        }
        _ => {}
    }

    let t = t_infinity(h);
    let mut levels = TruncationVector::zero();
    let mut epsilon = 1.0;
    let mut steps = Vec::new();
    loop {
        match stop {
            StopRule::Budget(b) if levels.cost() >= b => break,
            StopRule::TargetEpsilon(target) if epsilon <= target => break,
            StopRule::TargetEpsilon(target) if levels.cost() >= cap => {
                return Err(Error::TargetUnreachable {
                    target,
                    cap,
                    reached: epsilon,
                })
            }
            _ => {}
        }

        let mut best: Option<(usize, f64)> = None;
        for k in 1..=levels.active_orders() + 1 {
            if levels.level(k) >= h.len() {
                continue;
            }
            let gain = insertion_gain_at(h, &levels, k, t)?;
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((k, gain));
            }
        }
        // order active_orders + 1 is always empty, so a candidate exists
        let (order, gain) = best.expect("an empty order is always a candidate");
        levels = levels.incremented(order);
        epsilon = epsilon_bound(h, &levels)?;
        steps.push(PlanStep {
            order,
            gain,
            epsilon_after: epsilon,
            cost_after: levels.cost(),
        });
    }

    Ok(PlanTrace {
        hamiltonian: h.label().to_string(),
        t,
        steps,
        final_levels: levels,
    })
}
