//! Detection of regeneration structure inside a window: strongly connected
//! points, silver points (backward slope condition), renewal points (all
//! three slope conditions), the admissible range for the slope constant `c`,
//! per-cycle estimators for the drift and diffusion constants, and the
//! depth/gap diagnostics behind the exponential-tail argument.
//!
//! All point-process conditions that range over unbounded distances on the
//! infinite line are truncated at a horizon `H`: candidate positions stay in
//! `[H, n - H]` and each condition is only checked out to depth `H`.
//! Detection is therefore an over-approximation that shrinks monotonically as
//! `H` grows; every reported quantity carries its horizon.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::GraphWindow;
use crate::passage::{passage_from_within, AllSources};
use crate::stats::{self, LineFit};
use crate::{Error, Result};

/// Relative tolerance for the additive split `w(a,b) = w(a,x) + w(x,b)` at a
/// renewal point. The two sides accumulate the same edge weights in different
/// association orders, so bit-exact equality is not attainable; 1e-9 leaves
/// nine orders of magnitude between admissible rounding noise and any real
/// detection bug (a wrong point is off by whole edge weights).
pub const DECOMPOSITION_REL_TOL: f64 = 1e-9;

/// Default truncation depth: a twentieth of the window, at least 1.
pub fn default_horizon(n: u32) -> u32 {
    (n / 20).max(1)
}

/// One regeneration cycle between consecutive renewal points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub length: u32,
    pub weight: f64,
}

/// Result of renewal detection on one window.
///
/// `n` is carried so that the candidate span (and hence the point density)
/// can be recovered from a deserialized analysis alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewalAnalysis {
    pub c: f64,
    pub horizon: u32,
    pub n: u32,
    /// Strongly connected points (directed reachability both ways).
    pub tau: Vec<u32>,
    /// Silver points: backward slope condition alone, within `tau`.
    pub rho: Vec<u32>,
    /// Renewal points: all three conditions, within `tau`.
    #[serde(rename = "gamma")]
    pub gamma_points: Vec<u32>,
    /// Cycles between consecutive renewal points.
    pub cycles: Vec<Cycle>,
}

impl RenewalAnalysis {
    /// Number of candidate positions `[H, n - H]`; 0 when the horizon
    /// exceeds half the window.
    pub fn candidate_span(&self) -> u32 {
        if 2 * self.horizon <= self.n {
            self.n - 2 * self.horizon + 1
        } else {
            0
        }
    }

    /// Renewal-point density over the candidate span (NaN for an empty span).
    pub fn lambda_hat(&self) -> f64 {
        self.gamma_points.len() as f64 / self.candidate_span() as f64
    }
}

/// Per-condition candidate sets, exposed separately so that the opposite
/// monotonicities in `c` can be observed condition by condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSets {
    /// Inclusive candidate range; empty when `candidate_lo > candidate_hi`.
    pub candidate_lo: u32,
    pub candidate_hi: u32,
    /// Candidates with forward passage `w(x, x+l) >= c*l` for all `l <= H`.
    pub forward: Vec<u32>,
    /// Candidates with backward passage `w(x-l, x) >= c*l` for all `l <= H`.
    pub backward: Vec<u32>,
    /// Candidates not straddled by any present edge `(x-j, x+l)` with
    /// `j, l <= H` and weight `>= c*(j+l)` (strict `<` passes).
    pub no_crossing: Vec<u32>,
}

fn validate_detection_params(c: f64, horizon: u32) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Config(format!(
            "slope constant c must be finite and positive, got {c}"
        )));
    }
    if horizon == 0 {
        return Err(Error::Config("horizon must be at least 1".to_string()));
    }
    Ok(())
}

/// Cached short-span edge weights: `rows[i][d-1]` holds the weight of
/// `(i, i+d)` for `d <= min(h, n-i)`, NaN when absent. Spans beyond `h` (or
/// anything when the cache would be too large) fall back to direct queries.
struct SpanCache<'w> {
    w: &'w GraphWindow,
    h: u32,
    rows: Option<Vec<Vec<f64>>>,
}

const SPAN_CACHE_ENTRY_LIMIT: usize = 8_000_000;

impl<'w> SpanCache<'w> {
    fn new(w: &'w GraphWindow, h: u32) -> Self {
        let n = w.n() as usize;
        let rows = if n.saturating_mul(h as usize) <= SPAN_CACHE_ENTRY_LIMIT {
            Some(
                (0..n as u32)
                    .map(|i| {
                        let top = h.min(w.n() - i);
                        (1..=top)
                            .map(|d| w.edge_weight(i, i + d).unwrap_or(f64::NAN))
                            .collect()
                    })
                    .collect(),
            )
        } else {
            None
        };
        SpanCache { w, h, rows }
    }

    #[inline]
    fn get(&self, i: u32, j: u32) -> Option<f64> {
        let d = j - i;
        if d <= self.h {
            if let Some(rows) = &self.rows {
                let v = rows[i as usize][(d - 1) as usize];
                return if v.is_nan() { None } else { Some(v) };
            }
        }
        self.w.edge_weight(i, j)
    }
}

/// Evaluates the three renewal conditions at every candidate position.
pub fn condition_sets(w: &GraphWindow, c: f64, horizon: u32) -> Result<ConditionSets> {
    validate_detection_params(c, horizon)?;
    let n = w.n();
    let lo = horizon;
    let hi = n.saturating_sub(horizon);
    if lo > hi || n == 0 {
        return Ok(ConditionSets {
            candidate_lo: lo,
            candidate_hi: hi,
            forward: Vec::new(),
            backward: Vec::new(),
            no_crossing: Vec::new(),
        });
    }
    // Past this point 2*horizon <= n, so all the u32 arithmetic below is safe.
    let cache = SpanCache::new(w, horizon);
    let count = (hi - lo + 1) as usize;
    let mut forward_ok = vec![true; count];
    let mut backward_ok = vec![true; count];

    // One passage DP per source covers the forward condition at the source
    // and one backward constraint at each target it reaches.
    let h = horizon as usize;
    let mut dp = vec![f64::NEG_INFINITY; h + 1];
    for src in 0..n {
        let span = h.min((n - src) as usize);
        let src_is_candidate = src >= lo && src <= hi;
        let touches_backward = src + 1 <= hi && src + span as u32 >= lo;
        if !src_is_candidate && !touches_backward {
            continue;
        }
        dp[0] = 0.0;
        for t in 1..=span {
            let mut best = f64::NEG_INFINITY;
            for (m, &base) in dp.iter().enumerate().take(t) {
                if base > f64::NEG_INFINITY {
                    if let Some(v) = cache.get(src + m as u32, src + t as u32) {
                        let cand = base + v;
                        if cand > best {
                            best = cand;
                        }
                    }
                }
            }
            dp[t] = best;
        }
        if src_is_candidate {
            // Candidates sit at least H from the right edge, so span == H here.
            forward_ok[(src - lo) as usize] = (1..=span).all(|l| dp[l] >= c * l as f64);
        }
        for (l, &val) in dp.iter().enumerate().skip(1).take(span) {
            let t = src + l as u32;
            if t >= lo && t <= hi && !(val >= c * l as f64) {
                backward_ok[(t - lo) as usize] = false;
            }
        }
    }

    // Crossing condition via a difference array: each offending edge rules
    // out the contiguous run of positions it straddles within depth H.
    let mut straddle = vec![0i64; (n + 2) as usize];
    for a in 0..n {
        let max_d = (2 * horizon).min(n - a);
        for d in 2..=max_d {
            let b = a + d;
            if let Some(v) = cache.get(a, b) {
                if v >= c * d as f64 {
                    let xlo = (a + 1).max(b.saturating_sub(horizon));
                    let xhi = (b - 1).min(a + horizon);
                    if xlo <= xhi {
                        straddle[xlo as usize] += 1;
                        straddle[(xhi + 1) as usize] -= 1;
                    }
                }
            }
        }
    }
    let mut no_crossing_ok = vec![true; count];
    let mut acc = 0i64;
    for x in 0..=hi {
        acc += straddle[x as usize];
        if x >= lo {
            no_crossing_ok[(x - lo) as usize] = acc == 0;
        }
    }

    let collect = |flags: &[bool]| -> Vec<u32> {
        flags
            .iter()
            .enumerate()
            .filter_map(|(k, &ok)| ok.then_some(lo + k as u32))
            .collect()
    };
    Ok(ConditionSets {
        candidate_lo: lo,
        candidate_hi: hi,
        forward: collect(&forward_ok),
        backward: collect(&backward_ok),
        no_crossing: collect(&no_crossing_ok),
    })
}

/// Vertices connected to every other vertex of the window in the directed
/// sense: `x` reaches every `y > x` that has any in-edge at all, and is
/// reached by every `y < x` that has any out-edge at all.
///
/// The in/out-edge proviso keeps the finite window faithful to the infinite
/// line, where isolated vertices do not occur: a vertex no edge enters can
/// never be reached and would otherwise disqualify every other vertex.
pub fn strongly_connected_points(w: &GraphWindow) -> Vec<u32> {
    let n = w.n();
    if n == 0 {
        return vec![0];
    }
    let enterable: Vec<bool> = (0..=n)
        .map(|y| y > 0 && (0..y).rev().any(|i| w.edge_present(i, y)))
        .collect();
    let exitable: Vec<bool> = (0..=n)
        .map(|y| y < n && (y + 1..=n).any(|j| w.edge_present(y, j)))
        .collect();

    let reaches_right = |x: u32| -> bool {
        let mut reached: Vec<u32> = vec![x];
        for y in x + 1..=n {
            // Most recently reached vertices are nearest to y; probe them first.
            let hit = reached.iter().rev().any(|&i| w.edge_present(i, y));
            if hit {
                reached.push(y);
            } else if enterable[y as usize] {
                return false;
            }
        }
        true
    };
    let reached_from_left = |x: u32| -> bool {
        let mut reached: Vec<u32> = vec![x];
        for y in (0..x).rev() {
            let hit = reached.iter().rev().any(|&j| w.edge_present(y, j));
            if hit {
                reached.push(y);
            } else if exitable[y as usize] {
                return false;
            }
        }
        true
    };

    (0..=n)
        .filter(|&x| reaches_right(x) && reached_from_left(x))
        .collect()
}

/// Runs full renewal detection: evaluates the three conditions over the
/// candidate range, intersects with the strongly connected set, and splits
/// the window into cycles at consecutive renewal points.
pub fn detect_renewals(w: &GraphWindow, c: f64, horizon: u32) -> Result<RenewalAnalysis> {
    let sets = condition_sets(w, c, horizon)?;
    let tau = strongly_connected_points(w);
    let tau_set: BTreeSet<u32> = tau.iter().copied().collect();
    let forward: BTreeSet<u32> = sets.forward.iter().copied().collect();
    let no_crossing: BTreeSet<u32> = sets.no_crossing.iter().copied().collect();

    let rho: Vec<u32> = sets
        .backward
        .iter()
        .copied()
        .filter(|x| tau_set.contains(x))
        .collect();
    let gamma_points: Vec<u32> = rho
        .iter()
        .copied()
        .filter(|x| forward.contains(x) && no_crossing.contains(x))
        .collect();

    let mut cycles = Vec::new();
    for pair in gamma_points.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        // Renewal points beyond one horizon apart are not guaranteed mutually
        // reachable by the truncated conditions; such cycles (never observed
        // in practice) are skipped rather than invented.
        if let Some(weight) = passage_from_within(w, a, b)[(b - a) as usize] {
            cycles.push(Cycle {
                length: b - a,
                weight,
            });
        }
    }

    Ok(RenewalAnalysis {
        c,
        horizon,
        n: w.n(),
        tau,
        rho,
        gamma_points,
        cycles,
    })
}

/// One violating triple of the additive split at a renewal point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionViolation {
    pub a: u32,
    pub x: u32,
    pub b: u32,
    /// Direct passage value `w(a, b)` (`None` if unreachable).
    pub whole: Option<f64>,
    /// Split value `w(a, x) + w(x, b)` (`None` if either leg is unreachable).
    pub through: Option<f64>,
}

/// Outcome of verifying the additive split at every detected renewal point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCheck {
    pub ok: bool,
    pub triples_checked: u64,
    /// Largest relative discrepancy seen among finite comparisons.
    pub max_rel_error: f64,
    /// At most the first 8 violations, as witnesses.
    pub counterexamples: Vec<DecompositionViolation>,
}

const MAX_REPORTED_VIOLATIONS: usize = 8;

/// Verifies `w(a, b) = w(a, x) + w(x, b)` for every detected renewal point
/// `x` and all `a < x < b` in the candidate range `[H, n - H]`.
///
/// Quadratic in the candidate span per renewal point, and limited to windows
/// the all-sources passage table accepts.
pub fn check_decomposition(
    w: &GraphWindow,
    analysis: &RenewalAnalysis,
) -> Result<DecompositionCheck> {
    let all = AllSources::new(w)?;
    let lo = analysis.horizon;
    let hi = analysis.n.saturating_sub(analysis.horizon);
    let mut triples_checked = 0u64;
    let mut max_rel_error = 0.0f64;
    let mut counterexamples = Vec::new();

    for &x in &analysis.gamma_points {
        for a in lo..x {
            for b in x + 1..=hi {
                triples_checked += 1;
                let whole = all.value(a, b);
                let through = match (all.value(a, x), all.value(x, b)) {
                    (Some(p), Some(q)) => Some(p + q),
                    _ => None,
                };
                let violation = match (whole, through) {
                    (None, None) => false,
                    (Some(v), Some(t)) => {
                        let rel = (v - t).abs() / v.abs().max(1.0);
                        max_rel_error = max_rel_error.max(rel);
                        rel > DECOMPOSITION_REL_TOL
                    }
                    _ => true,
                };
                if violation && counterexamples.len() < MAX_REPORTED_VIOLATIONS {
                    counterexamples.push(DecompositionViolation {
                        a,
                        x,
                        b,
                        whole,
                        through,
                    });
                }
            }
        }
    }
    Ok(DecompositionCheck {
        ok: counterexamples.is_empty(),
        triples_checked,
        max_rel_error,
        counterexamples,
    })
}

/// How the admissible upper end of the `c` range is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CRangeMode {
    /// `(density * essinf, density * mean)`.
    Basic,
    /// Upper end from the mean minimum edge weight over intervals between
    /// consecutive strongly connected points (tighter; needs a window large
    /// enough to carry intervals).
    ThirdMoment,
}

/// Admissible range for the slope constant `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CRange {
    pub low: f64,
    pub high: f64,
    /// Empirical density of strongly connected points in the window.
    pub gamma_hat: f64,
    pub mode: CRangeMode,
    /// Bootstrap 95% interval for `high` (third-moment mode only).
    pub high_ci95: Option<(f64, f64)>,
}

impl CRange {
    /// Midpoint, the default `c`; `None` when the range is empty or unbounded
    /// (a constant law gives `low == high`, an infinite-mean law `high = inf`).
    pub fn midpoint(&self) -> Option<f64> {
        (self.high.is_finite() && self.high > self.low).then(|| 0.5 * (self.low + self.high))
    }
}

/// Estimates the admissible `c` range from a sampled window.
pub fn c_range(w: &GraphWindow, mode: CRangeMode) -> Result<CRange> {
    let dist = w.dist().ok_or_else(|| {
        Error::Unsupported(
            "c range needs the window's sampling distribution; \
             supply c explicitly for materialized windows"
                .to_string(),
        )
    })?;
    let st = dist.stats();
    let tau = strongly_connected_points(w);
    let gamma_hat = tau.len() as f64 / (w.n() as f64 + 1.0);
    let low = gamma_hat * st.essinf;
    match mode {
        CRangeMode::Basic => Ok(CRange {
            low,
            high: gamma_hat * st.mean,
            gamma_hat,
            mode,
            high_ci95: None,
        }),
        CRangeMode::ThirdMoment => {
            let mut minima = Vec::new();
            for pair in tau.windows(2) {
                let (t0, t1) = (pair[0], pair[1]);
                let mut m = f64::INFINITY;
                for i in t0..t1 {
                    for j in i + 1..=t1 {
                        if let Some(v) = w.edge_weight(i, j) {
                            m = m.min(v);
                        }
                    }
                }
                if m.is_finite() {
                    minima.push(m);
                }
            }
            if minima.is_empty() {
                return Err(Error::InsufficientData(
                    "no interval between strongly connected points carries an edge; \
                     cannot estimate the interval-minimum bound"
                        .to_string(),
                ));
            }
            let high = gamma_hat * stats::mean(&minima);
            let seed = w.seed().unwrap_or(0);
            let high_ci95 = Some(stats::bootstrap_ci95(&minima, seed, |s| {
                gamma_hat * stats::mean(s)
            }));
            Ok(CRange {
                low,
                high,
                gamma_hat,
                mode,
                high_ci95,
            })
        }
    }
}

/// Density, drift, and diffusion estimates from regeneration cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleEstimates {
    /// Renewal points per candidate position.
    pub lambda_hat: f64,
    /// Total cycle weight over total cycle length.
    pub c_cycle: f64,
    /// Sample variance of `weight - c_hat * length` over cycles.
    pub sigma2_hat: f64,
    pub cycles_used: usize,
    pub horizon: u32,
}

fn estimates_from_parts(
    gamma_count: usize,
    candidate_span: f64,
    cycles: &[Cycle],
    c_hat: Option<f64>,
    horizon: u32,
) -> Result<CycleEstimates> {
    if gamma_count < 2 || cycles.is_empty() {
        return Err(Error::InsufficientData(format!(
            "cycle estimators need at least 2 renewal points, found {gamma_count}"
        )));
    }
    let total_w: f64 = cycles.iter().map(|c| c.weight).sum();
    let total_l: f64 = cycles.iter().map(|c| f64::from(c.length)).sum();
    let c_cycle = total_w / total_l;
    let center = c_hat.unwrap_or(c_cycle);
    let increments: Vec<f64> = cycles
        .iter()
        .map(|c| c.weight - center * f64::from(c.length))
        .collect();
    Ok(CycleEstimates {
        lambda_hat: gamma_count as f64 / candidate_span,
        c_cycle,
        sigma2_hat: stats::variance(&increments),
        cycles_used: cycles.len(),
        horizon,
    })
}

/// Cycle estimators for a single analysis, centering the variance at the
/// caller-supplied drift estimate `c_hat`.
pub fn cycle_estimators(analysis: &RenewalAnalysis, c_hat: f64) -> Result<CycleEstimates> {
    estimates_from_parts(
        analysis.gamma_points.len(),
        analysis.candidate_span() as f64,
        &analysis.cycles,
        Some(c_hat),
        analysis.horizon,
    )
}

/// Pools cycles across several analyses (e.g. independent trials of one
/// configuration): density over the combined candidate span, drift from the
/// pooled cycles, and variance centered at that pooled drift.
pub fn pooled_cycle_estimators(analyses: &[RenewalAnalysis]) -> Result<CycleEstimates> {
    let gamma_count: usize = analyses.iter().map(|a| a.gamma_points.len()).sum();
    let span: f64 = analyses.iter().map(|a| a.candidate_span() as f64).sum();
    let cycles: Vec<Cycle> = analyses.iter().flat_map(|a| a.cycles.clone()).collect();
    let horizon = analyses.first().map_or(0, |a| a.horizon);
    estimates_from_parts(gamma_count, span, &cycles, None, horizon)
}

/// Gap and failure-depth diagnostics for the silver-point walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuNuDiagnostics {
    pub c: f64,
    pub horizon: u32,
    /// Gaps between consecutive silver points across the candidate range.
    pub nu_samples: Vec<u32>,
    /// At each silver point, the first depth `d <= H` where the forward or
    /// crossing condition fails (finite observations only).
    pub mu_samples_finite: Vec<u32>,
    /// Fraction of silver points with no failure up to the horizon.
    pub mu_infinite_fraction: f64,
    /// Least-squares slope of the log empirical survival of the gaps
    /// (negative and roughly linear when the gap tail is geometric); `None`
    /// when fewer than 3 survival points exist.
    pub nu_log_survival: Option<LineFit>,
}

/// Walks the candidate range, recording gaps between silver points and the
/// first failing depth of the forward/crossing conditions at each one.
pub fn mu_nu_diagnostics(w: &GraphWindow, c: f64, horizon: u32) -> Result<MuNuDiagnostics> {
    let sets = condition_sets(w, c, horizon)?;
    let silver = &sets.backward;
    let n = w.n();

    let mut nu_samples = Vec::new();
    let mut start = sets.candidate_lo;
    for &x in silver {
        if x > start {
            nu_samples.push(x - start);
            start = x;
        }
        // x == candidate_lo starts the walk without contributing a gap.
    }

    let mut mu_samples_finite = Vec::new();
    let mut mu_infinite = 0usize;
    for &x in silver {
        let depth_cap = horizon.min(n - x);
        let forward = passage_from_within(w, x, x + depth_cap);
        let jmax = horizon.min(x);
        let mut first_fail = None;
        'depth: for d in 1..=depth_cap {
            let forward_holds = forward[d as usize].is_some_and(|v| v >= c * f64::from(d));
            if !forward_holds {
                first_fail = Some(d);
                break;
            }
            for j in 1..=jmax {
                if let Some(v) = w.edge_weight(x - j, x + d) {
                    if v >= c * f64::from(d + j) {
                        first_fail = Some(d);
                        break 'depth;
                    }
                }
            }
        }
        match first_fail {
            Some(d) => mu_samples_finite.push(d),
            None => mu_infinite += 1,
        }
    }
    let mu_infinite_fraction = if silver.is_empty() {
        0.0
    } else {
        mu_infinite as f64 / silver.len() as f64
    };

    let nu_log_survival = log_survival_fit(&nu_samples);

    Ok(MuNuDiagnostics {
        c,
        horizon,
        nu_samples,
        mu_samples_finite,
        mu_infinite_fraction,
        nu_log_survival,
    })
}

/// Fits `log S(g)` against `g` where `S(g)` is the fraction of samples
/// exceeding `g`; needs at least 3 nonzero survival points.
fn log_survival_fit(samples: &[u32]) -> Option<LineFit> {
    if samples.is_empty() {
        return None;
    }
    let total = samples.len() as f64;
    let max = *samples.iter().max().expect("nonempty");
    let points: Vec<(f64, f64)> = (1..max)
        .filter_map(|g| {
            let surv = samples.iter().filter(|&&s| s > g).count() as f64 / total;
            (surv > 0.0).then(|| (f64::from(g), surv.ln()))
        })
        .collect();
    if points.len() < 3 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|&(x, _)| x).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    stats::fit_line(&xs, &ys).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::WeightDistribution;
    use crate::graph::PresenceModel;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn unit_window(n: u32) -> GraphWindow {
        GraphWindow::new(
            n,
            PresenceModel::constant(1.0).unwrap(),
            WeightDistribution::constant(1.0).unwrap(),
            9,
        )
        .unwrap()
    }

    fn lazy_window(n: u32, p: f64, dist: WeightDistribution, seed: u64) -> GraphWindow {
        GraphWindow::new(n, PresenceModel::constant(p).unwrap(), dist, seed).unwrap()
    }

    #[test]
    fn unit_weight_window_keeps_interior_renewals() {
        let w = unit_window(10);
        let analysis = detect_renewals(&w, 0.6, 3).unwrap();
        assert_eq!(analysis.tau, (0..=10).collect::<Vec<_>>());
        assert_eq!(analysis.rho, vec![3, 4, 5, 6, 7]);
        assert_eq!(analysis.gamma_points, vec![3, 4, 5, 6, 7]);
        assert_eq!(analysis.cycles.len(), 4);
        for cycle in &analysis.cycles {
            assert_eq!(cycle.length, 1);
            assert_eq!(cycle.weight, 1.0);
        }

        let est = cycle_estimators(&analysis, 1.0).unwrap();
        assert_eq!(est.lambda_hat, 1.0);
        assert_eq!(est.c_cycle, 1.0);
        assert_eq!(est.sigma2_hat, 0.0);
        assert_eq!(est.cycles_used, 4);
    }

    #[test]
    fn lower_slope_lets_crossing_edges_block_renewals() {
        // At c = 0.4, the direct edge (x-1, x+1) has weight 1 >= 0.4 * 2, so
        // the crossing condition fails at every interior position.
        let w = unit_window(10);
        let analysis = detect_renewals(&w, 0.4, 3).unwrap();
        assert!(analysis.gamma_points.is_empty());
        assert_eq!(analysis.rho, vec![3, 4, 5, 6, 7]);
        assert!(matches!(
            cycle_estimators(&analysis, 1.0),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn strongly_connected_ignores_isolated_vertices() {
        let mut edges = BTreeMap::new();
        edges.insert((0u32, 2u32), 1.0);
        let w = GraphWindow::materialized(2, edges).unwrap();
        assert_eq!(strongly_connected_points(&w), vec![0, 2]);
    }

    #[test]
    fn strongly_connected_hand_example() {
        let mut edges = BTreeMap::new();
        for (i, j) in [(0u32, 1u32), (1, 2), (2, 3), (0, 2)] {
            edges.insert((i, j), 1.0);
        }
        let w = GraphWindow::materialized(3, edges).unwrap();
        assert_eq!(strongly_connected_points(&w), vec![0, 1, 2, 3]);
    }

    #[test]
    fn strongly_connected_full_when_dense() {
        let w = unit_window(10);
        assert_eq!(strongly_connected_points(&w), (0..=10).collect::<Vec<_>>());
    }

    #[test]
    fn strongly_connected_excludes_bypassed_vertex() {
        // 1 has an in-edge but no out-edge beyond 2 … construct: 0->1, 0->2,
        // 2->3. Vertex 1 is enterable but not exitable, so it is skipped when
        // testing others; 1 itself fails (reaches nothing, 2 is enterable).
        let mut edges = BTreeMap::new();
        for (i, j) in [(0u32, 1u32), (0, 2), (2, 3)] {
            edges.insert((i, j), 1.0);
        }
        let w = GraphWindow::materialized(3, edges).unwrap();
        assert_eq!(strongly_connected_points(&w), vec![0, 2, 3]);
    }

    #[test]
    fn detection_rejects_bad_parameters() {
        let w = unit_window(10);
        assert!(matches!(detect_renewals(&w, 0.0, 3), Err(Error::Config(_))));
        assert!(matches!(
            detect_renewals(&w, f64::NAN, 3),
            Err(Error::Config(_))
        ));
        assert!(matches!(detect_renewals(&w, 0.5, 0), Err(Error::Config(_))));
    }

    #[test]
    fn oversized_horizon_leaves_no_candidates() {
        let w = unit_window(10);
        let analysis = detect_renewals(&w, 0.6, 6).unwrap();
        assert!(analysis.gamma_points.is_empty());
        assert_eq!(analysis.candidate_span(), 0);
        assert!(analysis.lambda_hat().is_nan());

        let tight = detect_renewals(&w, 0.6, 5).unwrap();
        assert_eq!(tight.candidate_span(), 1);
        assert_eq!(tight.gamma_points, vec![5]);
    }

    #[test]
    fn default_horizon_is_a_twentieth() {
        assert_eq!(default_horizon(10), 1);
        assert_eq!(default_horizon(100), 5);
        assert_eq!(default_horizon(4000), 200);
    }

    #[test]
    fn decomposition_holds_on_unit_fixture() {
        let w = unit_window(10);
        let analysis = detect_renewals(&w, 0.6, 3).unwrap();
        let check = check_decomposition(&w, &analysis).unwrap();
        assert!(check.ok);
        assert_eq!(check.triples_checked, 10);
        assert_eq!(check.max_rel_error, 0.0);
        assert!(check.counterexamples.is_empty());
    }

    #[test]
    fn decomposition_flags_fake_renewal_point() {
        // w(1,3) = 9 via the direct edge, but w(1,2) + w(2,3) = 2: no
        // geodesic through 2, so a claimed renewal at 2 must be rejected.
        let mut edges = BTreeMap::new();
        for (i, j, v) in [
            (0u32, 1u32, 1.0),
            (1, 2, 1.0),
            (2, 3, 1.0),
            (3, 4, 1.0),
            (1, 3, 9.0),
        ] {
            edges.insert((i, j), v);
        }
        let w = GraphWindow::materialized(4, edges).unwrap();
        let tampered = RenewalAnalysis {
            c: 0.5,
            horizon: 1,
            n: 4,
            tau: strongly_connected_points(&w),
            rho: vec![2],
            gamma_points: vec![2],
            cycles: vec![],
        };
        let check = check_decomposition(&w, &tampered).unwrap();
        assert!(!check.ok);
        let witness = &check.counterexamples[0];
        assert_eq!((witness.a, witness.x, witness.b), (1, 2, 3));
        assert_eq!(witness.whole, Some(9.0));
        assert_eq!(witness.through, Some(2.0));
    }

    #[test]
    fn decomposition_holds_on_seeded_random_windows() {
        for seed in 0..10 {
            for p in [0.6, 1.0] {
                let w = lazy_window(200, p, WeightDistribution::exponential(1.0).unwrap(), seed);
                let c = c_range(&w, CRangeMode::Basic)
                    .unwrap()
                    .midpoint()
                    .expect("exp(1) range is nonempty");
                let analysis = detect_renewals(&w, c, 50).unwrap();
                let check = check_decomposition(&w, &analysis).unwrap();
                assert!(
                    check.ok,
                    "seed {seed} p {p}: {:?}",
                    check.counterexamples.first()
                );
            }
        }
    }

    #[test]
    fn c_range_basic_closed_forms() {
        let exp = lazy_window(50, 1.0, WeightDistribution::exponential(1.0).unwrap(), 1);
        let r = c_range(&exp, CRangeMode::Basic).unwrap();
        assert_eq!(r.gamma_hat, 1.0);
        assert_eq!((r.low, r.high), (0.0, 1.0));
        assert_eq!(r.midpoint(), Some(0.5));

        let uni = lazy_window(50, 1.0, WeightDistribution::uniform(1.0, 3.0).unwrap(), 1);
        let r = c_range(&uni, CRangeMode::Basic).unwrap();
        assert_eq!((r.low, r.high), (1.0, 2.0));
        assert_eq!(r.midpoint(), Some(1.5));
    }

    #[test]
    fn c_range_degenerate_and_unbounded() {
        let constant = unit_window(20);
        let r = c_range(&constant, CRangeMode::Basic).unwrap();
        assert_eq!(r.low, r.high);
        assert_eq!(r.midpoint(), None);

        // Tail index 1 has an infinite mean: the basic range is unbounded.
        let heavy = lazy_window(20, 1.0, WeightDistribution::pareto(1.0).unwrap(), 1);
        let r = c_range(&heavy, CRangeMode::Basic).unwrap();
        assert!(r.high.is_infinite());
        assert_eq!(r.midpoint(), None);
    }

    #[test]
    fn c_range_requires_distribution() {
        let mut edges = BTreeMap::new();
        edges.insert((0u32, 1u32), 1.0);
        let w = GraphWindow::materialized(1, edges).unwrap();
        assert!(matches!(
            c_range(&w, CRangeMode::Basic),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn c_range_third_moment_reports_bootstrap_interval() {
        let w = lazy_window(400, 0.6, WeightDistribution::exponential(1.0).unwrap(), 7);
        let basic = c_range(&w, CRangeMode::Basic).unwrap();
        let tm = c_range(&w, CRangeMode::ThirdMoment).unwrap();
        assert_eq!(tm.low, basic.low);
        assert!(tm.high > 0.0);
        // Interval minima are at most the per-edge values the basic bound
        // averages, so the refined upper end should not exceed it (allowing
        // sampling noise).
        assert!(tm.high <= basic.high + 0.1, "{} vs {}", tm.high, basic.high);
        let (lo, hi) = tm.high_ci95.expect("third-moment mode carries a CI");
        assert!(lo <= tm.high && tm.high <= hi);
        // Deterministic: same window, same interval.
        let again = c_range(&w, CRangeMode::ThirdMoment).unwrap();
        assert_eq!(tm, again);
    }

    #[test]
    fn mu_nu_on_unit_fixture() {
        let w = unit_window(10);
        // c = 0.6: every candidate is silver, so all gaps are 1 and the
        // crossing check never trips within the horizon.
        let d = mu_nu_diagnostics(&w, 0.6, 3).unwrap();
        assert_eq!(d.nu_samples, vec![1, 1, 1, 1]);
        assert!(d.mu_samples_finite.is_empty());
        assert_eq!(d.mu_infinite_fraction, 1.0);
        assert!(d.nu_log_survival.is_none());

        // c = 0.4: the edge (x-1, x+1) of weight 1 >= 0.8 fails the crossing
        // condition at depth 1 at every silver point.
        let d = mu_nu_diagnostics(&w, 0.4, 3).unwrap();
        assert_eq!(d.nu_samples, vec![1, 1, 1, 1]);
        assert_eq!(d.mu_samples_finite, vec![1, 1, 1, 1, 1]);
        assert_eq!(d.mu_infinite_fraction, 0.0);
    }

    #[test]
    fn pooled_estimators_match_single_analysis() {
        let w = unit_window(10);
        let analysis = detect_renewals(&w, 0.6, 3).unwrap();
        let single = cycle_estimators(&analysis, 1.0).unwrap();
        let pooled = pooled_cycle_estimators(std::slice::from_ref(&analysis)).unwrap();
        assert_eq!(single, pooled);

        let double = pooled_cycle_estimators(&[analysis.clone(), analysis]).unwrap();
        assert_eq!(double.lambda_hat, single.lambda_hat);
        assert_eq!(double.c_cycle, single.c_cycle);
        assert_eq!(double.cycles_used, 8);
    }

    #[test]
    fn analysis_serializes_with_documented_field_names() {
        let w = unit_window(10);
        let analysis = detect_renewals(&w, 0.6, 3).unwrap();
        let json = serde_json::to_value(&analysis).unwrap();
        for key in ["c", "horizon", "tau", "rho", "gamma", "cycles"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert!(json.get("gamma_points").is_none());
        let back: RenewalAnalysis =
            serde_json::from_str(&serde_json::to_string(&analysis).unwrap()).unwrap();
        assert_eq!(back, analysis);
    }

    fn proptest_dist(which: u8) -> WeightDistribution {
        match which % 4 {
            0 => WeightDistribution::exponential(1.0).unwrap(),
            1 => WeightDistribution::uniform(0.5, 2.0).unwrap(),
            2 => WeightDistribution::pareto(2.5).unwrap(),
            _ => WeightDistribution::constant(1.0).unwrap(),
        }
    }

    fn is_subset(sub: &[u32], sup: &[u32]) -> bool {
        let sup: BTreeSet<u32> = sup.iter().copied().collect();
        sub.iter().all(|x| sup.contains(x))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inclusion_chain_holds(
            seed in 0u64..1_000_000,
            n in 20u32..=60,
            which in 0u8..4,
            p in prop::sample::select(vec![0.3, 0.6, 1.0]),
            c in 0.05f64..1.2,
            horizon in 1u32..=6,
        ) {
            let w = lazy_window(n, p, proptest_dist(which), seed);
            let analysis = detect_renewals(&w, c, horizon).unwrap();
            prop_assert!(is_subset(&analysis.gamma_points, &analysis.rho));
            prop_assert!(is_subset(&analysis.rho, &analysis.tau));
        }

        #[test]
        fn deeper_horizon_only_removes_renewals(
            seed in 0u64..1_000_000,
            n in 30u32..=60,
            which in 0u8..4,
            h1 in 1u32..=4,
            extra in 1u32..=4,
            c in 0.1f64..1.0,
        ) {
            let w = lazy_window(n, 1.0, proptest_dist(which), seed);
            let shallow = detect_renewals(&w, c, h1).unwrap();
            let deep = detect_renewals(&w, c, h1 + extra).unwrap();
            prop_assert!(is_subset(&deep.gamma_points, &shallow.gamma_points));
        }

        #[test]
        fn slope_moves_conditions_in_opposite_directions(
            seed in 0u64..1_000_000,
            n in 30u32..=60,
            which in 0u8..4,
            c1 in 0.1f64..0.8,
            bump in 0.05f64..0.8,
            horizon in 1u32..=5,
        ) {
            let w = lazy_window(n, 1.0, proptest_dist(which), seed);
            let lo = condition_sets(&w, c1, horizon).unwrap();
            let hi = condition_sets(&w, c1 + bump, horizon).unwrap();
            // Passage conditions get harder as c grows …
            prop_assert!(is_subset(&hi.forward, &lo.forward));
            prop_assert!(is_subset(&hi.backward, &lo.backward));
            // … while the crossing condition gets easier.
            prop_assert!(is_subset(&lo.no_crossing, &hi.no_crossing));
        }
    }
}
