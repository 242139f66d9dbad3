//! Lovász-local-lemma bound engines with exact enumeration oracles.
//!
//! Four entry points cover the lemma family used by the code analyses:
//!
//! - [`symmetric_bound`]: uniform event probability `p`, dependency degree
//!   `d`, lopsidedness constant `c`; condition `c·e·(d+1)·p ≤ 1` certifies
//!   the bound `(1 − c·e·p)^n` on the probability that no event occurs.
//! - [`glll_bound`]: per-event weights `x_i`; condition
//!   `P(A_i) ≤ x_i·Π_{j∈Γ(i)}(1 − c·x_j)` certifies `Π_i(1 − c·x_i)`.
//! - [`exact_none_probability`]: brute-force enumeration of
//!   `P(no listed event occurs)` on an explicit joint distribution, used to
//!   certify or refute the bounds above.
//! - [`verify_lopsided_condition`]: exhaustive check of
//!   `P(A_i | ∧_{j∈S} ¬A_j) ≤ c·P(A_i)` over all admissible conditioning
//!   sets `S`, reporting the worst ratio.
//!
//! A failed lemma hypothesis is data, not an error: both bound functions
//! return [`BoundOutcome`] so callers can chain parameter attempts.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::bisect_root;

/// Most events [`verify_lopsided_condition`] will enumerate over
/// (`2^n` conditioning sets per event).
pub const MAX_LOPSIDED_EVENTS: usize = 20;

/// Tolerance on `Σ probs = 1` for [`JointDistribution::validate`].
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Relative roundoff allowance when comparing the worst conditional ratio
/// against `c`: exactly independent instances must pass `c = 1` even though
/// their ratios are computed from finite sums.
pub const RATIO_PASS_TOL: f64 = 1e-9;

/// A named event: the set of elementary outcomes on which it occurs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Event {
    /// Display name carried into reports.
    pub name: String,
    /// Outcome indices on which the event occurs (duplicates are harmless).
    pub outcomes: Vec<usize>,
}

/// An explicit finite probability space with a list of events on it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointDistribution {
    /// One probability per elementary outcome.
    pub probs: Vec<f64>,
    /// Events defined over those outcomes.
    pub events: Vec<Event>,
}

impl JointDistribution {
    /// Number of elementary outcomes.
    #[must_use]
    pub fn outcome_count(&self) -> usize {
        self.probs.len()
    }

    /// Checks probabilities are nonnegative and sum to 1 within
    /// [`PROBABILITY_SUM_TOL`], and that every event stays inside the
    /// outcome range.
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidInput(format!(
                "outcome probabilities must be finite and nonnegative, got {p}"
            )));
        }
        let total = kahan_sum(self.probs.iter().copied());
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "outcome probabilities sum to {total}, expected 1 within {PROBABILITY_SUM_TOL:.0e}"
            )));
        }
        for (k, event) in self.events.iter().enumerate() {
            if let Some(&bad) = event.outcomes.iter().find(|&&o| o >= self.probs.len()) {
                return Err(Error::InvalidInput(format!(
                    "event {k} ({:?}) references outcome {bad}, but only {} outcomes exist",
                    event.name,
                    self.probs.len()
                )));
            }
        }
        Ok(())
    }

    /// Probability of the event at `index`.
    pub fn event_probability(&self, index: usize) -> Result<f64> {
        let event = self.events.get(index).ok_or_else(|| {
            Error::InvalidInput(format!(
                "event index {index} out of range ({} events)",
                self.events.len()
            ))
        })?;
        let mut seen = vec![false; self.probs.len()];
        for &o in &event.outcomes {
            seen[o] = true;
        }
        Ok(kahan_sum(
            seen.iter()
                .zip(&self.probs)
                .filter(|(s, _)| **s)
                .map(|(_, p)| *p),
        ))
    }
}

/// Adjacency structure over a list of events: `gamma[i]` is the set of
/// events that may constrain event `i` in the lemma condition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DependencyGraph {
    /// Per-event neighbor lists; `i ∉ gamma[i]`.
    pub gamma: Vec<Vec<usize>>,
}

impl DependencyGraph {
    /// Neighbor-free graph on `n` events.
    #[must_use]
    pub fn empty(n: usize) -> Self {
        Self {
            gamma: vec![Vec::new(); n],
        }
    }

    /// Number of events the graph is defined over.
    #[must_use]
    pub fn event_count(&self) -> usize {
        self.gamma.len()
    }

    /// Largest neighborhood size (duplicates counted once).
    #[must_use]
    pub fn max_degree(&self) -> usize {
        self.neighbor_masks_wide()
            .iter()
            .map(|m| m.iter().map(|w| w.count_ones() as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Checks all neighbor indices are in range and no event neighbors
    /// itself.
    pub fn validate(&self) -> Result<()> {
        let n = self.gamma.len();
        for (i, nbrs) in self.gamma.iter().enumerate() {
            for &j in nbrs {
                if j >= n {
                    return Err(Error::InvalidInput(format!(
                        "gamma[{i}] references event {j}, but only {n} events exist"
                    )));
                }
                if j == i {
                    return Err(Error::InvalidInput(format!(
                        "gamma[{i}] contains event {i} itself"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether `j ∈ gamma[i]` implies `i ∈ gamma[j]`.
    #[must_use]
    pub fn is_symmetric(&self) -> bool {
        let masks = self.neighbor_masks_wide();
        for (i, nbrs) in self.gamma.iter().enumerate() {
            for &j in nbrs {
                if masks[j][i / 64] & (1 << (i % 64)) == 0 {
                    return false;
                }
            }
        }
        true
    }

    fn neighbor_masks_wide(&self) -> Vec<Vec<u64>> {
        let words = self.gamma.len().div_ceil(64).max(1);
        self.gamma
            .iter()
            .map(|nbrs| {
                let mut mask = vec![0u64; words];
                for &j in nbrs {
                    mask[j / 64] |= 1 << (j % 64);
                }
                mask
            })
            .collect()
    }
}

/// Weight assignment for the generalized bound: lopsidedness constant `c`
/// and per-event weights `x_i ∈ [0, 1/c)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LllAssignment {
    /// Lopsidedness constant, at least 1.
    pub c: f64,
    /// Per-event weights.
    pub x: Vec<f64>,
}

impl LllAssignment {
    /// Checks `c ≥ 1` and `0 ≤ x_i < 1/c` for all `i`.
    pub fn validate(&self) -> Result<()> {
        if !(self.c >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "lopsidedness constant must satisfy c ≥ 1, got {}",
                self.c
            )));
        }
        let cap = 1.0 / self.c;
        for (i, &xi) in self.x.iter().enumerate() {
            if !(0.0..cap).contains(&xi) {
                return Err(Error::InvalidInput(format!(
                    "weight x[{i}] = {xi} outside [0, 1/c) = [0, {cap})"
                )));
            }
        }
        Ok(())
    }
}

/// Result of a bound attempt: either a certified lower bound on the
/// no-event probability, or the hypothesis comparison that failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum BoundOutcome {
    /// The lemma hypothesis holds and `bound` applies.
    Applicable {
        /// Certified lower bound on the probability that no event occurs.
        bound: f64,
    },
    /// The hypothesis fails; the lemma makes no claim for these inputs.
    ConditionViolation {
        /// First event whose per-event condition failed, when applicable.
        index: Option<usize>,
        /// Left side of the failed comparison.
        lhs: f64,
        /// Right side of the failed comparison.
        rhs: f64,
    },
}

impl BoundOutcome {
    /// The certified bound, if the hypothesis held.
    #[must_use]
    pub fn bound(&self) -> Option<f64> {
        match self {
            Self::Applicable { bound } => Some(*bound),
            Self::ConditionViolation { .. } => None,
        }
    }

    /// Whether the hypothesis held.
    #[must_use]
    pub fn is_applicable(&self) -> bool {
        matches!(self, Self::Applicable { .. })
    }
}

/// Symmetric bound: `n` events of probability at most `p`, each adjacent to
/// at most `d` others, with lopsidedness constant `c`.
///
/// If `c·e·(d+1)·p ≤ 1` the probability that no event occurs is at least
/// `(1 − c·e·p)^n`; otherwise the hypothesis fails and the outcome records
/// the violated comparison.
///
/// ```
/// use aqec_lll::lll::symmetric_bound;
///
/// let outcome = symmetric_bound(0.01, 3, 100, 1.0).unwrap();
/// assert!(outcome.bound().unwrap() > 0.06);
/// ```
pub fn symmetric_bound(p: f64, d: usize, n: usize, c: f64) -> Result<BoundOutcome> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "event probability must lie in [0, 1], got {p}"
        )));
    }
    if !(c >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "lopsidedness constant must satisfy c ≥ 1, got {c}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("event count must be positive".into()));
    }
    let lhs = c * std::f64::consts::E * (d as f64 + 1.0) * p;
    if lhs > 1.0 {
        return Ok(BoundOutcome::ConditionViolation {
            index: None,
            lhs,
            rhs: 1.0,
        });
    }
    let base = 1.0 - c * std::f64::consts::E * p;
    Ok(BoundOutcome::Applicable {
        bound: base.powi(n as i32),
    })
}

/// Generalized bound with per-event weights.
///
/// Verifies `P(A_i) ≤ x_i·Π_{j∈Γ(i)}(1 − c·x_j)` for every event; on
/// success the probability that no event occurs is at least
/// `Π_i(1 − c·x_i)`. The first failing event is reported otherwise.
pub fn glll_bound(
    probs: &[f64],
    graph: &DependencyGraph,
    assign: &LllAssignment,
) -> Result<BoundOutcome> {
    graph.validate()?;
    assign.validate()?;
    if probs.len() != graph.event_count() || probs.len() != assign.x.len() {
        return Err(Error::DimensionMismatch(format!(
            "probs ({}), graph ({}), and weights ({}) must agree on the event count",
            probs.len(),
            graph.event_count(),
            assign.x.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidInput(format!(
            "event probabilities must lie in [0, 1], got {p}"
        )));
    }
    let c = assign.c;
    for (i, (&p_i, nbrs)) in probs.iter().zip(&graph.gamma).enumerate() {
        let mut rhs = assign.x[i];
        let mut seen = vec![false; probs.len()];
        for &j in nbrs {
            if !seen[j] {
                seen[j] = true;
                rhs *= 1.0 - c * assign.x[j];
            }
        }
        if p_i > rhs {
            return Ok(BoundOutcome::ConditionViolation {
                index: Some(i),
                lhs: p_i,
                rhs,
            });
        }
    }
    let bound = assign.x.iter().map(|&xi| 1.0 - c * xi).product();
    Ok(BoundOutcome::Applicable { bound })
}

/// Exact probability that none of the listed events occurs, by direct
/// enumeration of the outcome space.
pub fn exact_none_probability(dist: &JointDistribution, event_indices: &[usize]) -> Result<f64> {
    dist.validate()?;
    let mut excluded = vec![false; dist.outcome_count()];
    for &k in event_indices {
        let event = dist.events.get(k).ok_or_else(|| {
            Error::InvalidInput(format!(
                "event index {k} out of range ({} events)",
                dist.events.len()
            ))
        })?;
        for &o in &event.outcomes {
            excluded[o] = true;
        }
    }
    Ok(kahan_sum(
        excluded
            .iter()
            .zip(&dist.probs)
            .filter(|(ex, _)| !**ex)
            .map(|(_, p)| *p),
    ))
}

/// Outcome of the exhaustive lopsided-condition check.
#[derive(Debug, Clone, Serialize)]
pub struct LopsidedReport {
    /// Constant the ratios were compared against.
    pub c: f64,
    /// Maximum of `P(A_i | ∧_{j∈S} ¬A_j) / P(A_i)` over all events `i` and
    /// all conditioning sets `S` disjoint from `Γ(i) ∪ {i}`.
    pub max_ratio: f64,
    /// Whether `max_ratio ≤ c` (within [`RATIO_PASS_TOL`] relative slack).
    pub passes: bool,
    /// Conditioning sets skipped because `P(∧_S ¬A_j) = 0`.
    pub skipped_conditioning_sets: usize,
    /// Event achieving the maximum ratio, as a position in the supplied
    /// event list.
    pub worst_event: Option<usize>,
    /// Conditioning set achieving the maximum ratio, as positions in the
    /// supplied event list.
    pub worst_conditioning: Vec<usize>,
}

/// Exhaustively verifies the lopsided dependency condition
/// `P(A_i | ∧_{j∈S} ¬A_j) ≤ c·P(A_i)` for every event `i` and every
/// conditioning set `S ⊆ [n] ∖ (Γ(i) ∪ {i})`.
///
/// Events enter by their positions in `event_indices`; the graph indexes
/// those positions. Events with `P(A_i) = 0` contribute ratio 0, and
/// conditioning sets of probability 0 are skipped and counted in the
/// report.
///
/// Runtime is `O(n·2^n)` buckets after a single pass over the outcome
/// space, so the event count is capped at [`MAX_LOPSIDED_EVENTS`].
pub fn verify_lopsided_condition(
    dist: &JointDistribution,
    event_indices: &[usize],
    graph: &DependencyGraph,
    c: f64,
) -> Result<LopsidedReport> {
    dist.validate()?;
    graph.validate()?;
    let n = event_indices.len();
    if n > MAX_LOPSIDED_EVENTS {
        return Err(Error::InvalidInput(format!(
            "lopsided verification enumerates 2^n conditioning sets; {n} events exceed the cap of {MAX_LOPSIDED_EVENTS}"
        )));
    }
    if graph.event_count() != n {
        return Err(Error::DimensionMismatch(format!(
            "graph covers {} events but {n} were supplied",
            graph.event_count()
        )));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "comparison constant must be nonnegative, got {c}"
        )));
    }

    // Bucket the outcome space by which of the selected events occur.
    let mut membership = vec![0usize; dist.outcome_count()];
    for (bit, &k) in event_indices.iter().enumerate() {
        let event = dist.events.get(k).ok_or_else(|| {
            Error::InvalidInput(format!(
                "event index {k} out of range ({} events)",
                dist.events.len()
            ))
        })?;
        for &o in &event.outcomes {
            membership[o] |= 1 << bit;
        }
    }
    let size = 1usize << n;
    let full = size - 1;
    let mut h = vec![0.0f64; size];
    for (o, &p) in dist.probs.iter().enumerate() {
        h[membership[o]] += p;
    }
    // g[T] = P(all occurring events lie inside T); the complement trick
    // turns "no event of S occurs" into a single lookup g[full ∖ S].
    let mut g = h.clone();
    subset_sum_transform(&mut g, n);

    let gamma_masks: Vec<usize> = graph
        .gamma
        .iter()
        .map(|nbrs| nbrs.iter().fold(0usize, |m, &j| m | (1 << j)))
        .collect();

    let mut max_ratio = 0.0f64;
    let mut worst_event = None;
    let mut worst_conditioning = Vec::new();
    let mut skipped = 0usize;
    let mut gi = vec![0.0f64; size];
    for (i, &gamma_mask) in gamma_masks.iter().enumerate() {
        for (m, slot) in gi.iter_mut().enumerate() {
            *slot = if m & (1 << i) != 0 { h[m] } else { 0.0 };
        }
        subset_sum_transform(&mut gi, n);
        let p_i = gi[full];
        if p_i <= 0.0 {
            // Zero-probability events have conditional ratio 0 by convention.
            continue;
        }
        let allowed = full & !(gamma_mask | (1 << i));
        let mut s = allowed;
        loop {
            let survivors = full ^ s;
            let denom = g[survivors];
            if denom > 0.0 {
                let ratio = (gi[survivors] / denom) / p_i;
                if ratio > max_ratio {
                    max_ratio = ratio;
                    worst_event = Some(i);
                    worst_conditioning = bits_of(s);
                }
            } else {
                skipped += 1;
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & allowed;
        }
    }

    Ok(LopsidedReport {
        c,
        max_ratio,
        passes: max_ratio <= c * (1.0 + RATIO_PASS_TOL),
        skipped_conditioning_sets: skipped,
        worst_event,
        worst_conditioning,
    })
}

/// Solves `x·(1 − c·x)^d = p` for the root in `(0, 1/(c·(d+1)))`.
///
/// The left side increases from 0 to its peak at `x = 1/(c·(d+1))`, so the
/// root exists exactly when `p` does not exceed the peak value. The
/// returned root always satisfies `x₀ < e·p`.
///
/// # Errors
///
/// Fails when `p ≤ 0` or `p` exceeds the peak (no root in the bracket).
pub fn solve_x0(p: f64, c: f64, d: usize) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidInput(format!(
            "target probability must be positive, got {p}"
        )));
    }
    if !(c >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "lopsidedness constant must satisfy c ≥ 1, got {c}"
        )));
    }
    let x_peak = 1.0 / (c * (d as f64 + 1.0));
    let f = |x: f64| x * (1.0 - c * x).powi(d as i32);
    let peak = f(x_peak);
    if p > peak {
        // Roundoff grace at the boundary: the hypothesis `c·e·(d+1)·p ≤ 1`
        // guarantees solvability mathematically, so an equality case that
        // rounds above the peak still resolves to the peak position.
        if p <= peak * (1.0 + 1e-12) {
            return Ok(x_peak);
        }
        return Err(Error::InvalidInput(format!(
            "no root: {p} exceeds the maximum {peak} of x(1-cx)^d on the bracket"
        )));
    }
    bisect_root(|x| f(x) - p, 0.0, x_peak, 1e-14, 200)
}

/// Uniform-weight assignment in the style of the symmetric reduction:
/// every weight satisfies `x(1 − c·x)^d ≥ p_max` with `d` the largest
/// neighborhood size, so the assignment certifies whenever the root of the
/// equality lies in the solvable range.
///
/// Returns `None` when `p_max` exceeds the solvable range (the hypothesis
/// cannot be certified with uniform weights).
pub fn uniform_assignment(
    probs: &[f64],
    graph: &DependencyGraph,
    c: f64,
) -> Result<Option<LllAssignment>> {
    graph.validate()?;
    if probs.len() != graph.event_count() {
        return Err(Error::DimensionMismatch(format!(
            "probs ({}) and graph ({}) must agree on the event count",
            probs.len(),
            graph.event_count()
        )));
    }
    let p_max = probs.iter().copied().fold(0.0f64, f64::max);
    if p_max == 0.0 {
        return Ok(Some(LllAssignment {
            c,
            x: vec![0.0; probs.len()],
        }));
    }
    let d = graph.max_degree();
    match solve_x0(p_max, c, d) {
        Ok(root) => {
            // The root meets the target with equality, which rounding can
            // land a hair low; nudge up the increasing branch until the
            // per-event inequality survives, keeping clear of the peak.
            let x_peak = 1.0 / (c * (d as f64 + 1.0));
            let value = |x: f64| x * (1.0 - c * x).powi(d as i32);
            let mut x = root;
            for _ in 0..8 {
                if value(x) >= p_max || x >= x_peak {
                    break;
                }
                x = (x * (1.0 + 1e-12)).min(x_peak);
            }
            Ok(Some(LllAssignment {
                c,
                x: vec![x; probs.len()],
            }))
        }
        Err(Error::InvalidInput(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Compensated (Kahan) summation: keeps the validation and oracle sums
/// accurate to a few ulps regardless of the number of outcomes.
pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// In-place subset-sum (zeta) transform: `buf[T] ← Σ_{m ⊆ T} buf[m]`.
fn subset_sum_transform(buf: &mut [f64], n_bits: usize) {
    for b in 0..n_bits {
        let bit = 1usize << b;
        for t in 0..buf.len() {
            if t & bit != 0 {
                buf[t] += buf[t ^ bit];
            }
        }
    }
}

fn bits_of(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|&b| mask & (1 << b) != 0)
        .collect()
}

/// Random test instance: events are conjunctions of literals over
/// independent biased bits.
///
/// Events that share no bits are independent by construction, so the
/// dependency graph built from shared bits always satisfies the lopsided
/// condition with `c = 1`.
#[derive(Debug, Clone)]
pub struct BitConjunctionInstance {
    /// `P(bit b = 1)` for each independent bit.
    pub bit_probs: Vec<f64>,
    /// Per event: the `(bit, required value)` literals of its conjunction.
    pub literals: Vec<Vec<(usize, bool)>>,
}

impl BitConjunctionInstance {
    /// Draws an instance with a bit count in `bits` and an event count in
    /// `events`; each event is a conjunction of 1 to 3 distinct literals.
    pub fn random(
        rng: &mut impl Rng,
        bits: std::ops::RangeInclusive<usize>,
        events: std::ops::RangeInclusive<usize>,
    ) -> Self {
        let m = rng.random_range(bits);
        let n = rng.random_range(events);
        let bit_probs: Vec<f64> = (0..m).map(|_| 0.05 + 0.45 * rng.random::<f64>()).collect();
        let literals = (0..n)
            .map(|_| {
                let width = rng.random_range(1..=3.min(m));
                sample_indices(rng, m, width)
                    .into_iter()
                    // Mostly positive literals: with bit probabilities below
                    // one half this keeps event probabilities small enough
                    // that the lemma hypothesis is frequently satisfiable.
                    .map(|b| (b, rng.random::<f64>() < 0.75))
                    .collect()
            })
            .collect();
        Self {
            bit_probs,
            literals,
        }
    }

    /// Number of independent bits.
    #[must_use]
    pub fn bit_count(&self) -> usize {
        self.bit_probs.len()
    }

    /// Exact probability of event `i` (product of its literal
    /// probabilities).
    #[must_use]
    pub fn event_probability(&self, i: usize) -> f64 {
        self.literals[i]
            .iter()
            .map(|&(b, v)| {
                if v {
                    self.bit_probs[b]
                } else {
                    1.0 - self.bit_probs[b]
                }
            })
            .product()
    }

    /// Exact probabilities of all events.
    #[must_use]
    pub fn event_probabilities(&self) -> Vec<f64> {
        (0..self.literals.len())
            .map(|i| self.event_probability(i))
            .collect()
    }

    /// Dependency graph linking events that read at least one common bit.
    #[must_use]
    pub fn shared_bit_graph(&self) -> DependencyGraph {
        let supports: Vec<u64> = self
            .literals
            .iter()
            .map(|lits| lits.iter().fold(0u64, |m, &(b, _)| m | (1 << b)))
            .collect();
        let gamma = supports
            .iter()
            .enumerate()
            .map(|(i, &si)| {
                supports
                    .iter()
                    .enumerate()
                    .filter(|&(j, &sj)| j != i && si & sj != 0)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        DependencyGraph { gamma }
    }

    /// Materializes the full `2^m`-outcome distribution with one event per
    /// conjunction.
    #[must_use]
    pub fn to_distribution(&self) -> JointDistribution {
        let m = self.bit_probs.len();
        let size = 1usize << m;
        let probs = (0..size)
            .map(|omega| {
                (0..m)
                    .map(|b| {
                        if omega >> b & 1 == 1 {
                            self.bit_probs[b]
                        } else {
                            1.0 - self.bit_probs[b]
                        }
                    })
                    .product()
            })
            .collect();
        let events = self
            .literals
            .iter()
            .enumerate()
            .map(|(i, lits)| Event {
                name: format!("A{i}"),
                outcomes: (0..size)
                    .filter(|&omega| lits.iter().all(|&(b, v)| (omega >> b & 1 == 1) == v))
                    .collect(),
            })
            .collect();
        JointDistribution { probs, events }
    }
}
