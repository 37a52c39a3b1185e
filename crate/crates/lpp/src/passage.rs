//! Last-passage values and geodesics.
//!
//! The last-passage value `w(i, j)` is the maximum total weight over strictly
//! increasing paths `i = m_0 < m_1 < ... < m_r = j` whose edges are all
//! present. Because paths only move upward, `w(i, j)` depends on the window
//! only through vertices in `[i, j]`, and a single left-to-right dynamic
//! program from a source computes every `w(src, j)` in O((n - src)²) edge
//! queries.
//!
//! Unreachable targets are an explicit `None`, never a numeric sentinel:
//! silently flowing a -inf through arithmetic is exactly the bug class this
//! module wants to make impossible.

use serde::{Deserialize, Serialize};

use crate::graph::GraphWindow;
use crate::{Error, Result};

/// Spans above this limit are refused by the exhaustive reference
/// implementation (the path count grows like 2^(span-1)).
const BRUTE_FORCE_SPAN_LIMIT: u32 = 20;

/// Windows above this size are refused by the all-sources cache
/// (O(n²) memory, O(n³) time).
const ALL_SOURCES_LIMIT: u32 = 4000;

/// Last-passage values from `src` to every vertex of `[src, hi]`, computed
/// within that subwindow. Entry `k` is `w(src, src + k)`; entry 0 is 0.
///
/// Since paths are increasing, the values returned are exact for the whole
/// window as long as the target lies in `[src, hi]`.
pub fn passage_from_within(w: &GraphWindow, src: u32, hi: u32) -> Vec<Option<f64>> {
    assert!(src <= hi && hi <= w.n(), "subwindow [{src}, {hi}] out of range");
    let len = (hi - src) as usize + 1;
    let mut values: Vec<Option<f64>> = vec![None; len];
    values[0] = Some(0.0);
    for j in 1..len {
        let mut best: Option<f64> = None;
        for i in 0..j {
            if let Some(acc) = values[i] {
                if let Some(v) = w.edge_weight(src + i as u32, src + j as u32) {
                    let total = acc + v;
                    if best.map_or(true, |b| total > b) {
                        best = Some(total);
                    }
                }
            }
        }
        values[j] = best;
    }
    values
}

/// Last-passage values from `src` to every vertex of `[src, n]`.
pub fn passage_from(w: &GraphWindow, src: u32) -> Vec<Option<f64>> {
    passage_from_within(w, src, w.n())
}

/// Last-passage values *into* `dst` from every vertex of `[lo, dst]`,
/// computed within that subwindow. Entry `k` is `w(lo + k, dst)`; the last
/// entry is 0.
pub fn passage_to_within(w: &GraphWindow, lo: u32, dst: u32) -> Vec<Option<f64>> {
    assert!(lo <= dst && dst <= w.n(), "subwindow [{lo}, {dst}] out of range");
    let len = (dst - lo) as usize + 1;
    let mut values: Vec<Option<f64>> = vec![None; len];
    values[len - 1] = Some(0.0);
    for i in (0..len - 1).rev() {
        let mut best: Option<f64> = None;
        for j in (i + 1)..len {
            if let Some(acc) = values[j] {
                if let Some(v) = w.edge_weight(lo + i as u32, lo + j as u32) {
                    let total = v + acc;
                    if best.map_or(true, |b| total > b) {
                        best = Some(total);
                    }
                }
            }
        }
        values[i] = best;
    }
    values
}

/// A geodesic (maximizing path) description.
///
/// `value` is the last-passage value, `path` its edges in order, `ell` the
/// longest edge length on the path, and `h` the largest edge weight on it.
/// An unreachable target reports `value: None` with an empty path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicReport {
    pub value: Option<f64>,
    pub path: Vec<(u32, u32)>,
    pub ell: Option<u32>,
    pub h: Option<f64>,
}

/// Computes a geodesic from `i` to `j`. Ties between predecessors are broken
/// toward the smallest vertex index, so reruns reconstruct the same path.
///
/// Panics if `i >= j` or `j > n`.
pub fn geodesic(w: &GraphWindow, i: u32, j: u32) -> GeodesicReport {
    assert!(i < j && j <= w.n(), "geodesic endpoints ({i}, {j}) out of range");
    let len = (j - i) as usize + 1;
    let mut values: Vec<Option<f64>> = vec![None; len];
    let mut preds: Vec<usize> = vec![usize::MAX; len];
    values[0] = Some(0.0);
    for t in 1..len {
        let mut best: Option<f64> = None;
        let mut pred = usize::MAX;
        for s in 0..t {
            if let Some(acc) = values[s] {
                if let Some(v) = w.edge_weight(i + s as u32, i + t as u32) {
                    let total = acc + v;
                    // Strict improvement keeps the first (smallest) maximizer.
                    if best.map_or(true, |b| total > b) {
                        best = Some(total);
                        pred = s;
                    }
                }
            }
        }
        values[t] = best;
        preds[t] = pred;
    }

    let Some(value) = values[len - 1] else {
        return GeodesicReport {
            value: None,
            path: Vec::new(),
            ell: None,
            h: None,
        };
    };

    let mut edges_rev = Vec::new();
    let mut t = len - 1;
    while t != 0 {
        let s = preds[t];
        edges_rev.push((i + s as u32, i + t as u32));
        t = s;
    }
    edges_rev.reverse();
    let ell = edges_rev.iter().map(|&(a, b)| b - a).max();
    let h = edges_rev
        .iter()
        .map(|&(a, b)| w.edge_weight(a, b).expect("path edge must be present"))
        .fold(None::<f64>, |acc, v| Some(acc.map_or(v, |a| a.max(v))));
    GeodesicReport {
        value: Some(value),
        path: edges_rev,
        ell,
        h,
    }
}

/// Best passage value from `i` to `j` over paths with at least one
/// intermediate vertex: `max over m in (i, j) of w(i, m) + w(m, j)`.
/// `None` when no such two-leg route exists.
pub fn passage_excluding_direct(w: &GraphWindow, i: u32, j: u32) -> Option<f64> {
    assert!(i < j && j <= w.n(), "endpoints ({i}, {j}) out of range");
    if j - i < 2 {
        return None;
    }
    let forward = passage_from_within(w, i, j);
    let backward = passage_to_within(w, i, j);
    let mut best: Option<f64> = None;
    for m in 1..(j - i) as usize {
        if let (Some(a), Some(b)) = (forward[m], backward[m]) {
            let total = a + b;
            if best.map_or(true, |v| total > v) {
                best = Some(total);
            }
        }
    }
    best
}

/// Exhaustive reference: enumerates every increasing path from `i` to `j`.
/// Guarded to spans of at most 20 vertices.
pub fn brute_force_passage(w: &GraphWindow, i: u32, j: u32) -> Result<Option<f64>> {
    assert!(i < j && j <= w.n(), "endpoints ({i}, {j}) out of range");
    if j - i > BRUTE_FORCE_SPAN_LIMIT {
        return Err(Error::Guard {
            what: "brute-force passage span",
            limit: BRUTE_FORCE_SPAN_LIMIT as usize,
            got: (j - i) as usize,
        });
    }
    fn explore(w: &GraphWindow, at: u32, dst: u32, acc: f64, best: &mut Option<f64>) {
        if at == dst {
            if best.map_or(true, |b| acc > b) {
                *best = Some(acc);
            }
            return;
        }
        for next in (at + 1)..=dst {
            if let Some(v) = w.edge_weight(at, next) {
                explore(w, next, dst, acc + v, best);
            }
        }
    }
    let mut best = None;
    explore(w, i, j, 0.0, &mut best);
    Ok(best)
}

/// Cached all-pairs table `w(i, j)` for `i <= j`, stored triangularly.
///
/// Guarded to `n <= 4000`: the table costs O(n²) memory and O(n³) time, so
/// larger windows should fall back to per-source [`passage_from`] calls.
pub struct AllSources {
    n: u32,
    rows: Vec<Vec<Option<f64>>>,
}

impl AllSources {
    pub fn new(w: &GraphWindow) -> Result<Self> {
        if w.n() > ALL_SOURCES_LIMIT {
            return Err(Error::Guard {
                what: "all-sources passage table window size",
                limit: ALL_SOURCES_LIMIT as usize,
                got: w.n() as usize,
            });
        }
        let rows = (0..=w.n()).map(|src| passage_from(w, src)).collect();
        Ok(AllSources { n: w.n(), rows })
    }

    /// `w(i, j)`; zero on the diagonal. Panics if `i > j` or `j > n`.
    #[inline]
    pub fn value(&self, i: u32, j: u32) -> Option<f64> {
        assert!(i <= j && j <= self.n, "query ({i}, {j}) out of range");
        self.rows[i as usize][(j - i) as usize]
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::WeightDistribution;
    use crate::graph::PresenceModel;
    use std::collections::BTreeMap;

    fn full_unit_window(n: u32) -> GraphWindow {
        GraphWindow::new(
            n,
            PresenceModel::constant(1.0).unwrap(),
            WeightDistribution::constant(1.0).unwrap(),
            0,
        )
        .unwrap()
    }

    /// Four-vertex fixture: direct edges all weight 1 except (0, 2) = 5.
    /// Paths 0 -> 3 weigh 1, 2, 6, 3; the geodesic is (0,2),(2,3).
    fn detour_fixture() -> GraphWindow {
        let mut edges = BTreeMap::new();
        edges.insert((0, 1), 1.0);
        edges.insert((0, 2), 5.0);
        edges.insert((0, 3), 1.0);
        edges.insert((1, 2), 1.0);
        edges.insert((1, 3), 1.0);
        edges.insert((2, 3), 1.0);
        GraphWindow::materialized(3, edges).unwrap()
    }

    #[test]
    fn unit_chain_counts_vertices() {
        let w = full_unit_window(5);
        let values = passage_from(&w, 0);
        for (k, v) in values.iter().enumerate() {
            assert_eq!(*v, Some(k as f64));
        }
    }

    #[test]
    fn detour_fixture_value_and_geodesic() {
        let w = detour_fixture();
        let values = passage_from(&w, 0);
        assert_eq!(values[3], Some(6.0));
        assert_eq!(brute_force_passage(&w, 0, 3).unwrap(), Some(6.0));

        let g = geodesic(&w, 0, 3);
        assert_eq!(g.value, Some(6.0));
        assert_eq!(g.path, vec![(0, 2), (2, 3)]);
        assert_eq!(g.ell, Some(2));
        assert_eq!(g.h, Some(5.0));
    }

    #[test]
    fn unreachable_is_explicit() {
        let mut edges = BTreeMap::new();
        edges.insert((0, 1), 1.0);
        let w = GraphWindow::materialized(2, edges).unwrap();
        assert_eq!(passage_from(&w, 0)[2], None);

        let g = geodesic(&w, 0, 2);
        assert_eq!(g.value, None);
        assert!(g.path.is_empty());
        assert_eq!(g.ell, None);
        assert_eq!(g.h, None);
    }

    #[test]
    fn geodesic_report_serializes_value_or_null() {
        let w = detour_fixture();
        let g = geodesic(&w, 0, 3);
        let json = serde_json::to_value(&g).unwrap();
        assert_eq!(json["value"], 6.0);
        assert_eq!(json["path"][0][1], 2);

        let mut edges = BTreeMap::new();
        edges.insert((0, 1), 1.0);
        let w = GraphWindow::materialized(2, edges).unwrap();
        let g = geodesic(&w, 0, 2);
        let json = serde_json::to_value(&g).unwrap();
        assert!(json["value"].is_null());
        assert!(json["h"].is_null());
    }

    #[test]
    fn ties_pick_the_smallest_predecessor() {
        // Two weight-2 paths to vertex 3; the backtrack must take pred 1.
        let mut edges = BTreeMap::new();
        edges.insert((0, 1), 1.0);
        edges.insert((0, 2), 1.0);
        edges.insert((1, 3), 1.0);
        edges.insert((2, 3), 1.0);
        let w = GraphWindow::materialized(3, edges).unwrap();
        let g = geodesic(&w, 0, 3);
        assert_eq!(g.value, Some(2.0));
        assert_eq!(g.path, vec![(0, 1), (1, 3)]);
    }

    #[test]
    fn excluding_direct_examples() {
        let w = detour_fixture();
        // The best route 0 -> 3 does not use the direct edge anyway.
        assert_eq!(passage_excluding_direct(&w, 0, 3), Some(6.0));

        // Only the direct edge exists: no two-leg route.
        let mut edges = BTreeMap::new();
        edges.insert((0, 2), 7.0);
        let w = GraphWindow::materialized(2, edges).unwrap();
        assert_eq!(passage_excluding_direct(&w, 0, 2), None);

        // Full unit window: every two-leg route tops out at n.
        let w = full_unit_window(4);
        assert_eq!(passage_excluding_direct(&w, 0, 4), Some(4.0));
    }

    #[test]
    fn brute_force_single_edge_and_guard() {
        let mut edges = BTreeMap::new();
        edges.insert((0, 1), 2.5);
        let w = GraphWindow::materialized(1, edges).unwrap();
        assert_eq!(brute_force_passage(&w, 0, 1).unwrap(), Some(2.5));

        let w = full_unit_window(30);
        assert!(matches!(
            brute_force_passage(&w, 0, 21),
            Err(Error::Guard { .. })
        ));
        assert!(brute_force_passage(&w, 0, 20).is_ok());
    }

    #[test]
    fn all_sources_matches_per_source_dp() {
        let w = GraphWindow::new(
            40,
            PresenceModel::constant(0.5).unwrap(),
            WeightDistribution::exponential(1.0).unwrap(),
            3,
        )
        .unwrap();
        let table = AllSources::new(&w).unwrap();
        for src in 0..=40u32 {
            let row = passage_from(&w, src);
            for j in src..=40u32 {
                assert_eq!(table.value(src, j), row[(j - src) as usize]);
            }
        }
        assert_eq!(table.value(7, 7), Some(0.0));
    }

    #[test]
    fn all_sources_guards_large_windows() {
        let w = GraphWindow::new(
            4001,
            PresenceModel::constant(1.0).unwrap(),
            WeightDistribution::constant(1.0).unwrap(),
            0,
        )
        .unwrap();
        assert!(matches!(AllSources::new(&w), Err(Error::Guard { .. })));
    }

    #[test]
    fn nearest_neighbor_path_is_a_lower_bound() {
        let w = GraphWindow::new(
            60,
            PresenceModel::constant(1.0).unwrap(),
            WeightDistribution::exponential(1.0).unwrap(),
            9,
        )
        .unwrap();
        // Accumulate the nearest-neighbor path in DP order: the DP considers
        // exactly this sum, so >= holds without tolerance.
        let mut nn = 0.0;
        for i in 0..60u32 {
            nn += w.edge_weight(i, i + 1).unwrap();
        }
        let total = passage_from(&w, 0)[60].unwrap();
        assert!(total >= nn);
    }

    #[test]
    fn raising_a_weight_never_lowers_passage_values() {
        let base = detour_fixture();
        let mut edges = BTreeMap::new();
        edges.insert((0, 1), 1.0);
        edges.insert((0, 2), 5.0);
        edges.insert((0, 3), 1.0);
        edges.insert((1, 2), 2.0); // raised
        edges.insert((1, 3), 1.0);
        edges.insert((2, 3), 1.0);
        let raised = GraphWindow::materialized(3, edges).unwrap();
        let before = passage_from(&base, 0);
        let after = passage_from(&raised, 0);
        for (b, a) in before.iter().zip(&after) {
            assert!(a.unwrap() >= b.unwrap());
        }
    }

    #[test]
    fn geodesic_value_equals_path_weight_sum() {
        let w = GraphWindow::new(
            80,
            PresenceModel::constant(0.6).unwrap(),
            WeightDistribution::pareto(1.5).unwrap(),
            21,
        )
        .unwrap();
        let g = geodesic(&w, 0, 80);
        let value = g.value.expect("long p=0.6 window should connect 0 to n");
        let mut sum = 0.0;
        let mut prev = 0;
        for &(a, b) in &g.path {
            assert_eq!(a, prev, "path edges must chain");
            sum += w.edge_weight(a, b).unwrap();
            prev = b;
        }
        assert_eq!(prev, 80);
        assert!((sum - value).abs() <= 1e-12 * value.abs());
        assert_eq!(g.ell, g.path.iter().map(|&(a, b)| b - a).max());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::dist::WeightDistribution;
    use crate::graph::PresenceModel;
    use proptest::prelude::*;

    fn law(which: u8) -> WeightDistribution {
        match which % 4 {
            0 => WeightDistribution::constant(1.0).unwrap(),
            1 => WeightDistribution::uniform(0.0, 2.0).unwrap(),
            2 => WeightDistribution::exponential(1.0).unwrap(),
            _ => WeightDistribution::pareto(1.5).unwrap(),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn dp_matches_exhaustive_enumeration(
            seed in any::<u64>(),
            n in 2u32..=12,
            dense in any::<bool>(),
            which in any::<u8>(),
        ) {
            let p = if dense { 1.0 } else { 0.4 };
            let w = GraphWindow::new(n, PresenceModel::constant(p).unwrap(), law(which), seed).unwrap();
            let values = passage_from(&w, 0);
            for j in 1..=n {
                let brute = brute_force_passage(&w, 0, j).unwrap();
                prop_assert_eq!(values[j as usize], brute, "j = {}", j);
            }
        }

        #[test]
        fn passage_is_superadditive_across_a_midpoint(seed in any::<u64>(), n in 4u32..=40, m in 1u32..=39) {
            let m = m.min(n - 1).max(1);
            let w = GraphWindow::new(
                n,
                PresenceModel::constant(1.0).unwrap(),
                WeightDistribution::exponential(1.0).unwrap(),
                seed,
            ).unwrap();
            let left = passage_from(&w, 0)[m as usize].unwrap();
            let right = passage_from(&w, m)[(n - m) as usize].unwrap();
            let whole = passage_from(&w, 0)[n as usize].unwrap();
            prop_assert!(left + right <= whole + 1e-9 * whole.abs());
        }

        #[test]
        fn forward_and_backward_sweeps_agree(seed in any::<u64>(), n in 2u32..=30) {
            let w = GraphWindow::new(
                n,
                PresenceModel::constant(0.5).unwrap(),
                WeightDistribution::uniform(0.5, 1.5).unwrap(),
                seed,
            ).unwrap();
            let fwd = passage_from_within(&w, 0, n);
            let bwd = passage_to_within(&w, 0, n);
            // w(0, n) computed from either end must agree to rounding.
            match (fwd[n as usize], bwd[0]) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0)),
                (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
            }
        }
    }
}
