//! Random directed windows on the integer line.
//!
//! A window of size `n` holds vertices `0..=n`. Every ordered pair `i < j` is
//! a potential edge, present independently with a probability that may depend
//! on the edge length `j - i`, and carrying an independent positive weight.
//!
//! A *lazy* window stores only `(n, presence model, weight law, seed)`: edge
//! presence and weight are pure functions of `(seed, i, j)` through the
//! counter-based mixer, with separate streams for the presence coin and the
//! weight variate. Queries are O(1) memory, independent of order and thread
//! layout. A *materialized* window stores an explicit edge map instead, for
//! fixtures and for freezing a lazy window to disk.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dist::WeightDistribution;
use crate::rng::{edge_word, stream, unit_open};
use crate::{Error, Result};

/// Edge-presence model: one probability for every edge, or one per length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresenceModel {
    /// Every potential edge is present with the same probability in (0, 1].
    Constant(f64),
    /// `per_length[k-1]` is the probability for edges of length `k`; lengths
    /// beyond the table reuse the final entry. Entries lie in [0, 1]. (The
    /// condition `p_1 < 1`, under which per-length results are usually
    /// stated, is reported by callers, not enforced here.)
    PerLength(Vec<f64>),
}

impl PresenceModel {
    /// Constant model; `p = 0` would make every vertex isolated and is a
    /// configuration error, matching the standing assumption `p > 0`.
    pub fn constant(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Config(format!(
                "edge probability must lie in (0, 1], got {p}"
            )));
        }
        Ok(PresenceModel::Constant(p))
    }

    /// Per-length model from a nonempty table of probabilities.
    pub fn per_length(table: Vec<f64>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::Config(
                "per-length presence table must be nonempty".to_string(),
            ));
        }
        for (k, &p) in table.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!(
                    "presence probability for length {} must lie in [0, 1], got {p}",
                    k + 1
                )));
            }
        }
        if table.iter().all(|&p| p == 0.0) {
            return Err(Error::Config(
                "per-length presence table is identically zero".to_string(),
            ));
        }
        Ok(PresenceModel::PerLength(table))
    }

    /// Presence probability for an edge of the given length (>= 1).
    #[inline]
    pub fn probability(&self, length: u32) -> f64 {
        debug_assert!(length >= 1);
        match self {
            PresenceModel::Constant(p) => *p,
            PresenceModel::PerLength(table) => {
                let idx = (length as usize - 1).min(table.len() - 1);
                table[idx]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            PresenceModel::Constant(p) => {
                Self::constant(*p)?;
            }
            PresenceModel::PerLength(t) => {
                Self::per_length(t.clone())?;
            }
        }
        Ok(())
    }
}

/// A window over vertices `0..=n`.
#[derive(Debug, Clone)]
pub struct GraphWindow {
    n: u32,
    backing: Backing,
}

#[derive(Debug, Clone)]
enum Backing {
    Lazy {
        p_model: PresenceModel,
        dist: WeightDistribution,
        seed: u64,
    },
    Materialized {
        edges: BTreeMap<(u32, u32), f64>,
    },
}

impl GraphWindow {
    /// Lazy window: edges are generated on demand from the seed.
    pub fn new(
        n: u32,
        p_model: PresenceModel,
        dist: WeightDistribution,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("window size must be at least 1".to_string()));
        }
        p_model.validate()?;
        Ok(GraphWindow {
            n,
            backing: Backing::Lazy {
                p_model,
                dist,
                seed,
            },
        })
    }

    /// Materialized window from an explicit edge map. Endpoints must satisfy
    /// `i < j <= n` and weights must be positive and finite.
    pub fn materialized(n: u32, edges: BTreeMap<(u32, u32), f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("window size must be at least 1".to_string()));
        }
        for (&(i, j), &w) in &edges {
            if i >= j || j > n {
                return Err(Error::Config(format!(
                    "edge ({i}, {j}) violates i < j <= n = {n}"
                )));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Config(format!(
                    "edge ({i}, {j}) weight must be positive and finite, got {w}"
                )));
            }
        }
        Ok(GraphWindow {
            n,
            backing: Backing::Materialized { edges },
        })
    }

    /// Window size: vertices are `0..=n`.
    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Weight distribution, when the window is lazily generated.
    pub fn dist(&self) -> Option<&WeightDistribution> {
        match &self.backing {
            Backing::Lazy { dist, .. } => Some(dist),
            Backing::Materialized { .. } => None,
        }
    }

    /// Master seed, when lazily generated.
    pub fn seed(&self) -> Option<u64> {
        match &self.backing {
            Backing::Lazy { seed, .. } => Some(*seed),
            Backing::Materialized { .. } => None,
        }
    }

    /// Presence model, when lazily generated.
    pub fn presence_model(&self) -> Option<&PresenceModel> {
        match &self.backing {
            Backing::Lazy { p_model, .. } => Some(p_model),
            Backing::Materialized { .. } => None,
        }
    }

    /// Whether the edge `(i, j)` is present. Panics if `i >= j` or `j > n`:
    /// only upward pairs inside the window are edges.
    #[inline]
    pub fn edge_present(&self, i: u32, j: u32) -> bool {
        assert!(i < j && j <= self.n, "edge query ({i}, {j}) outside window");
        match &self.backing {
            Backing::Lazy { p_model, seed, .. } => {
                let p = p_model.probability(j - i);
                // The presence coin lies strictly inside (0, 1), so p = 1 means
                // always present; skipping the hash is observationally identical.
                p >= 1.0
                    || unit_open(edge_word(*seed, i as u64, j as u64, stream::EDGE_PRESENCE)) < p
            }
            Backing::Materialized { edges } => edges.contains_key(&(i, j)),
        }
    }

    /// Weight of the edge `(i, j)`, or `None` when the edge is absent.
    /// Panics if `i >= j` or `j > n`.
    #[inline]
    pub fn edge_weight(&self, i: u32, j: u32) -> Option<f64> {
        assert!(i < j && j <= self.n, "edge query ({i}, {j}) outside window");
        match &self.backing {
            Backing::Lazy {
                p_model,
                dist,
                seed,
            } => {
                let p = p_model.probability(j - i);
                let present = p >= 1.0
                    || unit_open(edge_word(*seed, i as u64, j as u64, stream::EDGE_PRESENCE)) < p;
                if present {
                    let u = unit_open(edge_word(*seed, i as u64, j as u64, stream::EDGE_WEIGHT));
                    Some(dist.inverse_cdf(u))
                } else {
                    None
                }
            }
            Backing::Materialized { edges } => edges.get(&(i, j)).copied(),
        }
    }

    /// Freezes every present edge into an explicit map.
    pub fn materialize(&self) -> GraphWindow {
        let mut edges = BTreeMap::new();
        for i in 0..self.n {
            for j in (i + 1)..=self.n {
                if let Some(w) = self.edge_weight(i, j) {
                    edges.insert((i, j), w);
                }
            }
        }
        GraphWindow {
            n: self.n,
            backing: Backing::Materialized { edges },
        }
    }

    /// Serializable instance description.
    ///
    /// Lazy windows serialize as `(n, p_model, dist spec, seed)` and need the
    /// distribution to have a spec string; materialized windows serialize
    /// their edge list.
    pub fn to_instance(&self) -> Result<WindowInstance> {
        match &self.backing {
            Backing::Lazy {
                p_model,
                dist,
                seed,
            } => {
                let spec = dist.spec_string().ok_or_else(|| {
                    Error::Unsupported(
                        "cannot serialize a lazy window whose tabulated law has no file-backed spec"
                            .to_string(),
                    )
                })?;
                Ok(WindowInstance::Lazy {
                    n: self.n,
                    p_model: p_model.clone(),
                    dist: spec,
                    seed: *seed,
                })
            }
            Backing::Materialized { edges } => Ok(WindowInstance::Materialized {
                n: self.n,
                edges: edges
                    .iter()
                    .map(|(&(i, j), &weight)| EdgeRecord { i, j, weight })
                    .collect(),
            }),
        }
    }

    /// Rebuilds a window from an instance description.
    pub fn from_instance(instance: WindowInstance) -> Result<Self> {
        match instance {
            WindowInstance::Lazy {
                n,
                p_model,
                dist,
                seed,
            } => GraphWindow::new(n, p_model, WeightDistribution::parse(&dist)?, seed),
            WindowInstance::Materialized { n, edges } => {
                let mut map = BTreeMap::new();
                for e in edges {
                    if map.insert((e.i, e.j), e.weight).is_some() {
                        return Err(Error::Config(format!(
                            "duplicate edge ({}, {}) in instance",
                            e.i, e.j
                        )));
                    }
                }
                GraphWindow::materialized(n, map)
            }
        }
    }
}

/// JSON-serializable window description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowInstance {
    Lazy {
        n: u32,
        p_model: PresenceModel,
        dist: String,
        seed: u64,
    },
    Materialized { n: u32, edges: Vec<EdgeRecord> },
}

/// One explicit edge in a materialized instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub i: u32,
    pub j: u32,
    pub weight: f64,
}
