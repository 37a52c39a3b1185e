//! Continuum counterpart of the heavy-tail window: a decreasing weight
//! sequence `M_k = (W_1 + … + W_k)^{-1/s}` from exponential increments, and
//! random subintervals of `[0, 1]`. The truncated passage value `w^k` is the
//! best total weight over pairwise-compatible interval subsets, computed by
//! weighted interval scheduling; the independence number and the telescoping
//! tail bound control how much the discarded indices beyond `k` can add.

use serde::{Deserialize, Serialize};

use crate::rng::{stream, Counter};
use crate::{Error, Result};

/// A closed subinterval of `[0, 1]`, serialized as `[left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval(pub f64, pub f64);

impl Interval {
    /// Builds the interval between two endpoints given in either order.
    pub fn from_endpoints(u: f64, v: f64) -> Interval {
        Interval(u.min(v), u.max(v))
    }

    pub fn left(&self) -> f64 {
        self.0
    }

    pub fn right(&self) -> f64 {
        self.1
    }
}

/// Whether two intervals can lie on one admissible path: disjoint interiors,
/// shared endpoints allowed.
pub fn compatible(x: &Interval, y: &Interval) -> bool {
    x.right() <= y.left() || y.right() <= x.left()
}

/// A sampled continuum model: `m[i]` is the weight and `y[i]` the interval
/// of index `i + 1` (1-based in formulas).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumInstance {
    pub s: f64,
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    #[serde(rename = "Y")]
    pub y: Vec<Interval>,
}

impl ContinuumInstance {
    pub fn k_max(&self) -> usize {
        self.m.len()
    }

    /// Builds an instance from explicit exponential increments and
    /// intervals, for forced fixtures; `seed` is recorded as 0.
    pub fn from_parts(s: f64, increments: &[f64], y: Vec<Interval>) -> Result<Self> {
        validate_tail_index(s)?;
        if increments.len() != y.len() || increments.is_empty() {
            return Err(Error::Config(format!(
                "need matching nonempty increment and interval lists, got {} and {}",
                increments.len(),
                y.len()
            )));
        }
        if increments.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::Config(
                "increments must be finite and positive".to_string(),
            ));
        }
        for iv in &y {
            if !(0.0 <= iv.left() && iv.left() <= iv.right() && iv.right() <= 1.0) {
                return Err(Error::Config(format!(
                    "interval [{}, {}] is not an ordered subinterval of [0, 1]",
                    iv.left(),
                    iv.right()
                )));
            }
        }
        let mut cum = 0.0;
        let m = increments
            .iter()
            .map(|w| {
                cum += w;
                cum.powf(-1.0 / s)
            })
            .collect();
        Ok(ContinuumInstance { s, seed: 0, m, y })
    }
}

fn validate_tail_index(s: f64) -> Result<()> {
    if !(s.is_finite() && 0.0 < s && s < 2.0) {
        return Err(Error::Config(format!(
            "continuum model needs tail index s in (0, 2), got {s}"
        )));
    }
    Ok(())
}

/// Samples an instance: `k_max` exponential(1) increments accumulated into
/// the decreasing weights, and interval endpoints from two independent
/// uniform streams.
pub fn generate_continuum(s: f64, k_max: usize, seed: u64) -> Result<ContinuumInstance> {
    validate_tail_index(s)?;
    if k_max == 0 {
        return Err(Error::Config("k_max must be at least 1".to_string()));
    }
    let mut inc = Counter::new(seed, stream::CONTINUUM_INCREMENT);
    let mut left = Counter::new(seed, stream::CONTINUUM_LEFT);
    let mut right = Counter::new(seed, stream::CONTINUUM_RIGHT);
    let mut cum = 0.0;
    let mut m = Vec::with_capacity(k_max);
    let mut y = Vec::with_capacity(k_max);
    for _ in 0..k_max {
        // -ln of a unit-open draw is a strictly positive exponential sample,
        // so the cumulative sums strictly increase and m strictly decreases.
        cum += -inc.next_unit().ln();
        m.push(cum.powf(-1.0 / s));
        y.push(Interval::from_endpoints(left.next_unit(), right.next_unit()));
    }
    Ok(ContinuumInstance { s, seed, m, y })
}

/// Maximum total weight over pairwise-compatible subsets, by the standard
/// weighted-interval-scheduling dynamic program (sort by right endpoint,
/// binary-search the latest compatible predecessor). The winning subset is
/// re-summed in index order so the reported value does not depend on the
/// dynamic program's accumulation order.
pub fn max_compatible_sum(weights: &[f64], intervals: &[Interval]) -> f64 {
    assert_eq!(weights.len(), intervals.len());
    let k = weights.len();
    if k == 0 {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        (intervals[a].right(), intervals[a].left())
            .partial_cmp(&(intervals[b].right(), intervals[b].left()))
            .expect("interval endpoints are never NaN")
            .then(a.cmp(&b))
    });
    let rights: Vec<f64> = order.iter().map(|&i| intervals[i].right()).collect();

    // dp[i] = best over the first i sorted intervals; pred[i] = number of
    // sorted intervals wholly to the left of interval order[i-1].
    let mut dp = vec![0.0f64; k + 1];
    let mut pred = vec![0usize; k + 1];
    for i in 1..=k {
        let idx = order[i - 1];
        let p = rights[..i - 1].partition_point(|&r| r <= intervals[idx].left());
        pred[i] = p;
        let take = weights[idx] + dp[p];
        dp[i] = if take > dp[i - 1] { take } else { dp[i - 1] };
    }

    let mut chosen = Vec::new();
    let mut i = k;
    while i > 0 {
        if dp[i] == dp[i - 1] {
            i -= 1;
        } else {
            chosen.push(order[i - 1]);
            i = pred[i];
        }
    }
    chosen.sort_unstable();
    chosen.iter().map(|&idx| weights[idx]).sum()
}

/// Exhaustive subset maximum for cross-checking; subset sums accumulate in
/// index order, matching `max_compatible_sum`'s canonical re-summation.
pub fn max_compatible_sum_bruteforce(weights: &[f64], intervals: &[Interval]) -> Result<f64> {
    assert_eq!(weights.len(), intervals.len());
    let k = weights.len();
    const LIMIT: usize = 20;
    if k > LIMIT {
        return Err(Error::Guard {
            what: "brute-force subset enumeration",
            limit: LIMIT,
            got: k,
        });
    }
    let mut compat = vec![true; k * k];
    for a in 0..k {
        for b in 0..k {
            compat[a * k + b] = a == b || compatible(&intervals[a], &intervals[b]);
        }
    }
    let mut best = 0.0f64;
    'mask: for mask in 0u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        for (pos, &a) in members.iter().enumerate() {
            for &b in &members[pos + 1..] {
                if !compat[a * k + b] {
                    continue 'mask;
                }
            }
        }
        let total: f64 = members.iter().map(|&i| weights[i]).sum();
        if total > best {
            best = total;
        }
    }
    Ok(best)
}

/// Truncated passage value over the first `k` indices of the instance.
pub fn wk(instance: &ContinuumInstance, k: usize) -> Result<f64> {
    if k == 0 || k > instance.k_max() {
        return Err(Error::Domain(format!(
            "wk needs 1 <= k <= {}, got {k}",
            instance.k_max()
        )));
    }
    Ok(max_compatible_sum(&instance.m[..k], &instance.y[..k]))
}

/// Exhaustive counterpart of [`wk`] for small `k` (also accepts `k = 0`,
/// where the empty sum is 0).
pub fn wk_bruteforce(instance: &ContinuumInstance, k: usize) -> Result<f64> {
    if k > instance.k_max() {
        return Err(Error::Domain(format!(
            "k = {k} exceeds the instance's {} indices",
            instance.k_max()
        )));
    }
    max_compatible_sum_bruteforce(&instance.m[..k], &instance.y[..k])
}

/// Maximum number of pairwise-compatible intervals, via the earliest-right-
/// endpoint greedy scan (optimal for interval scheduling).
pub fn independence_number(intervals: &[Interval]) -> usize {
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by(|&a, &b| {
        intervals[a]
            .right()
            .partial_cmp(&intervals[b].right())
            .expect("interval endpoints are never NaN")
    });
    let mut count = 0usize;
    let mut frontier = f64::NEG_INFINITY;
    for &i in &order {
        if intervals[i].left() >= frontier {
            count += 1;
            frontier = intervals[i].right();
        }
    }
    count
}

/// Upper bound on what indices beyond `k` can add to the passage value.
///
/// `truncated_sum` is `Σ_{i=k+1}^{i_max} Λ_i (M_i − M_{i+1})` (possibly with
/// the independence numbers relaxed to checkpoint values) and
/// `boundary_term` is `Λ_{i_max+1} · M_{i_max+1}`, which accounts for the
/// mass the telescoping sum leaves at the cut; without it the truncated sum
/// alone does not bound `w^{k_max} − w^k` (three disjoint intervals with
/// `M = (3, 2, 1.9)` already exceed it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub truncated_sum: f64,
    pub boundary_term: f64,
}

impl TailBound {
    /// The actual bound: for `i_max = k_max − 1`,
    /// `w^{k_max} − w^k <= upper_bound()` on every instance.
    pub fn upper_bound(&self) -> f64 {
        self.truncated_sum + self.boundary_term
    }
}

fn validate_tail_args(instance: &ContinuumInstance, k: usize, i_max: usize) -> Result<()> {
    if k == 0 || k >= i_max || i_max + 1 > instance.k_max() {
        return Err(Error::Domain(format!(
            "tail bound needs 1 <= k < i_max <= k_max - 1 = {}, got k = {k}, i_max = {i_max}",
            instance.k_max().saturating_sub(1)
        )));
    }
    Ok(())
}

/// Tail bound with independence numbers evaluated only at geometrically
/// spaced checkpoints; between checkpoints the nondecreasing `Λ` is bounded
/// by its value at the segment end, which telescopes the weight differences.
pub fn tail_bound(instance: &ContinuumInstance, k: usize, i_max: usize) -> Result<TailBound> {
    validate_tail_args(instance, k, i_max)?;
    let m = &instance.m;
    let mut truncated_sum = 0.0;
    // Segments (seg_lo, seg_hi]: the first is the singleton {k+1}, then the
    // segment end doubles until it reaches i_max.
    let mut seg_lo = k; // exclusive
    let mut seg_hi = k + 1;
    while seg_lo < i_max {
        seg_hi = seg_hi.min(i_max);
        let lambda = independence_number(&instance.y[..seg_hi]);
        // Σ_{i in (seg_lo, seg_hi]} (M_i − M_{i+1}) telescopes; 1-based
        // M_i is m[i-1].
        truncated_sum += lambda as f64 * (m[seg_lo] - m[seg_hi]);
        seg_lo = seg_hi;
        seg_hi *= 2;
    }
    let boundary = independence_number(&instance.y[..i_max + 1]) as f64 * m[i_max];
    Ok(TailBound {
        truncated_sum,
        boundary_term: boundary,
    })
}

/// Tail bound with the independence number recomputed exactly at every
/// index; quadratic, for diagnostics and for auditing the checkpointed
/// version's slack.
pub fn tail_bound_exact(instance: &ContinuumInstance, k: usize, i_max: usize) -> Result<TailBound> {
    validate_tail_args(instance, k, i_max)?;
    let m = &instance.m;
    let mut truncated_sum = 0.0;
    for i in k + 1..=i_max {
        let lambda = independence_number(&instance.y[..i]);
        truncated_sum += lambda as f64 * (m[i - 1] - m[i]);
    }
    let boundary = independence_number(&instance.y[..i_max + 1]) as f64 * m[i_max];
    Ok(TailBound {
        truncated_sum,
        boundary_term: boundary,
    })
}
