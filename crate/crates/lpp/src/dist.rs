//! Edge-weight distributions.
//!
//! All weights are positive and are produced by a single code path: the
//! inverse CDF applied to a uniform variate in (0, 1). That keeps every law —
//! analytic or tabulated — reproducible from the same counter-based uniforms.
//!
//! | kind          | inverse CDF F⁻¹(u)      | essinf | mean            |
//! |---------------|-------------------------|--------|-----------------|
//! | `constant`    | v₀                      | v₀     | v₀              |
//! | `uniform`     | a + u(b − a)            | a      | (a + b)/2       |
//! | `exponential` | −ln(1 − u)/rate         | 0      | 1/rate          |
//! | `pareto`      | (1 − u)^(−1/s), x ≥ 1   | 1      | s/(s−1) (s > 1) |
//! | `tabulated`   | piecewise-linear interp | declared | exact trapezoid |
//!
//! The Pareto family is parameterized by its tail index `s`: P[X > x] = x^(−s)
//! for x ≥ 1, so the k-th moment is finite exactly when k < s. A tabulated law
//! interpolates user-supplied `(u, value)` knots, clamps outside the knot
//! range, and carries a *declared* infimum and optional tail index — inference
//! from finitely many knots would be ill-posed, so neither is inferred.

use std::fmt;
use std::path::Path;

use crate::{Error, Result};

/// Tolerance for validating a declared essential infimum against the
/// numerical limit of the inverse CDF at u = 1e-9.
const ESSINF_CHECK_U: f64 = 1e-9;
const ESSINF_CHECK_TOL: f64 = 1e-6;

/// A positive edge-weight law, sampled exclusively through its inverse CDF.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightDistribution {
    /// Point mass at `v0 > 0`.
    Constant { v0: f64 },
    /// Uniform on `[a, b]` with `0 <= a < b`.
    Uniform { a: f64, b: f64 },
    /// Exponential with the given rate (mean `1/rate`).
    Exponential { rate: f64 },
    /// Pareto with tail index `s`: support `[1, inf)`, P[X > x] = x^(-s).
    Pareto { s: f64 },
    /// Piecewise-linear inverse CDF through `(u, value)` knots.
    Tabulated(Tabulated),
}

/// Tabulated inverse CDF: strictly increasing `u` knots with nondecreasing
/// values, clamped to the first/last value outside the knot range.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    knots: Vec<(f64, f64)>,
    essinf: f64,
    tail_index: Option<f64>,
    /// Spec string the table was loaded from, if any; needed to round-trip
    /// lazy window instances through JSON.
    source: Option<String>,
}

/// Moment summary of a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DistStats {
    /// First moment; `f64::INFINITY` when the mean does not exist.
    pub mean: f64,
    /// Essential infimum of the support.
    pub essinf: f64,
    /// Declared tail index, if the law is (or stands in for) a heavy tail.
    pub tail_index: Option<f64>,
    /// `has_moment[k-1]` says whether E[X^k] is finite, for k = 1, 2, 3.
    pub has_moment: [bool; 3],
}

impl WeightDistribution {
    /// Point mass at `v0`.
    pub fn constant(v0: f64) -> Result<Self> {
        if !v0.is_finite() || v0 <= 0.0 {
            return Err(Error::Config(format!(
                "constant weight must be positive and finite, got {v0}"
            )));
        }
        Ok(WeightDistribution::Constant { v0 })
    }

    /// Uniform on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || a >= b {
            return Err(Error::Config(format!(
                "uniform bounds must satisfy 0 <= a < b, got a={a}, b={b}"
            )));
        }
        Ok(WeightDistribution::Uniform { a, b })
    }

    /// Exponential with the given rate.
    pub fn exponential(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::Config(format!(
                "exponential rate must be positive and finite, got {rate}"
            )));
        }
        Ok(WeightDistribution::Exponential { rate })
    }

    /// Pareto with tail index `s`.
    pub fn pareto(s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::Config(format!(
                "pareto tail index must be positive and finite, got {s}"
            )));
        }
        Ok(WeightDistribution::Pareto { s })
    }

    /// Tabulated law through `(u, value)` knots with a declared infimum and
    /// optional declared tail index.
    ///
    /// Requirements: at least two knots, `u` strictly increasing within
    /// `[0, 1]`, values finite, nonnegative, and nondecreasing. The declared
    /// `essinf` must agree with the inverse CDF near u = 0 (the clamp makes
    /// that limit the first knot's value).
    pub fn tabulated(knots: Vec<(f64, f64)>, essinf: f64, tail_index: Option<f64>) -> Result<Self> {
        Self::tabulated_with_source(knots, essinf, tail_index, None)
    }

    fn tabulated_with_source(
        knots: Vec<(f64, f64)>,
        essinf: f64,
        tail_index: Option<f64>,
        source: Option<String>,
    ) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Config(format!(
                "tabulated law needs at least 2 knots, got {}",
                knots.len()
            )));
        }
        for window in knots.windows(2) {
            let (u0, x0) = window[0];
            let (u1, x1) = window[1];
            if !(u1 > u0) {
                return Err(Error::Config(format!(
                    "tabulated u knots must be strictly increasing, got {u0} then {u1}"
                )));
            }
            if !(x1 >= x0) {
                return Err(Error::Config(format!(
                    "tabulated values must be nondecreasing, got {x0} then {x1}"
                )));
            }
        }
        for &(u, x) in &knots {
            if !(0.0..=1.0).contains(&u) || !x.is_finite() || x < 0.0 {
                return Err(Error::Config(format!(
                    "tabulated knot ({u}, {x}) outside u in [0,1], value >= 0"
                )));
            }
        }
        if let Some(s) = tail_index {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::Config(format!(
                    "declared tail index must be positive, got {s}"
                )));
            }
        }
        let law = Tabulated {
            knots,
            essinf,
            tail_index,
            source,
        };
        let limit = law.inverse_cdf(ESSINF_CHECK_U);
        if (limit - essinf).abs() > ESSINF_CHECK_TOL * limit.abs().max(1.0) {
            return Err(Error::Config(format!(
                "declared essinf {essinf} disagrees with inverse_cdf({ESSINF_CHECK_U}) = {limit}"
            )));
        }
        Ok(WeightDistribution::Tabulated(law))
    }

    /// Parses a spec string:
    /// `const:v=1`, `uniform:a=0,b=2`, `exp:rate=1`, `pareto:s=1.5`, or
    /// `table:path=<csv>[,essinf=<x>][,s=<s>]` where the CSV holds `u,value`
    /// knots. A table's infimum defaults to its first knot's value (which the
    /// clamp makes exact).
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, params) = match spec.split_once(':') {
            Some((k, p)) => (k.trim(), p.trim()),
            None => (spec.trim(), ""),
        };
        let mut pairs = Vec::new();
        if !params.is_empty() {
            for item in params.split(',') {
                let (key, value) = item.split_once('=').ok_or_else(|| {
                    Error::Parse(format!("expected key=value in distribution spec, got `{item}`"))
                })?;
                pairs.push((key.trim().to_string(), value.trim().to_string()));
            }
        }
        let num = |pairs: &[(String, String)], key: &str| -> Result<f64> {
            let raw = pairs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parse(format!("distribution spec `{spec}` is missing `{key}=`")))?;
            raw.parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{raw}` is not a number in spec `{spec}`")))
        };
        let expect_keys = |pairs: &[(String, String)], allowed: &[&str]| -> Result<()> {
            for (k, _) in pairs {
                if !allowed.contains(&k.as_str()) {
                    return Err(Error::Parse(format!(
                        "unknown key `{k}` in distribution spec `{spec}`"
                    )));
                }
            }
            Ok(())
        };
        match kind {
            "const" => {
                expect_keys(&pairs, &["v"])?;
                Self::constant(num(&pairs, "v")?)
            }
            "uniform" => {
                expect_keys(&pairs, &["a", "b"])?;
                Self::uniform(num(&pairs, "a")?, num(&pairs, "b")?)
            }
            "exp" => {
                expect_keys(&pairs, &["rate"])?;
                Self::exponential(num(&pairs, "rate")?)
            }
            "pareto" => {
                expect_keys(&pairs, &["s"])?;
                Self::pareto(num(&pairs, "s")?)
            }
            "table" => {
                expect_keys(&pairs, &["path", "essinf", "s"])?;
                let path = pairs
                    .iter()
                    .find(|(k, _)| k == "path")
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| Error::Parse(format!("table spec `{spec}` is missing `path=`")))?;
                let knots = read_knots(Path::new(&path))?;
                let essinf = match pairs.iter().find(|(k, _)| k == "essinf") {
                    Some(_) => num(&pairs, "essinf")?,
                    None => knots.first().map(|&(_, x)| x).unwrap_or(0.0),
                };
                let tail_index = match pairs.iter().find(|(k, _)| k == "s") {
                    Some(_) => Some(num(&pairs, "s")?),
                    None => None,
                };
                Self::tabulated_with_source(knots, essinf, tail_index, Some(spec.trim().to_string()))
            }
            other => Err(Error::Parse(format!("unknown distribution kind `{other}`"))),
        }
    }

    /// Canonical spec string, when one exists. Tabulated laws constructed
    /// directly from knots (rather than a file) have no spec string.
    pub fn spec_string(&self) -> Option<String> {
        match self {
            WeightDistribution::Constant { v0 } => Some(format!("const:v={v0}")),
            WeightDistribution::Uniform { a, b } => Some(format!("uniform:a={a},b={b}")),
            WeightDistribution::Exponential { rate } => Some(format!("exp:rate={rate}")),
            WeightDistribution::Pareto { s } => Some(format!("pareto:s={s}")),
            WeightDistribution::Tabulated(t) => t.source.clone(),
        }
    }

    /// Inverse CDF, defined for `u` in `[0, 1)`; `u = 0` yields the infimum.
    #[inline]
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        debug_assert!((0.0..1.0).contains(&u), "inverse_cdf needs u in [0,1)");
        match self {
            WeightDistribution::Constant { v0 } => *v0,
            WeightDistribution::Uniform { a, b } => a + u * (b - a),
            // ln_1p keeps precision for u near 0, where 1 - u would round.
            WeightDistribution::Exponential { rate } => -(-u).ln_1p() / rate,
            WeightDistribution::Pareto { s } => (1.0 - u).powf(-1.0 / s),
            WeightDistribution::Tabulated(t) => t.inverse_cdf(u),
        }
    }

    /// Inverse survival function F⁻¹(1 − q), defined for `q` in `(0, 1]`.
    ///
    /// This is the accurate path for upper-tail quantiles: the heavy-tail
    /// scale needs q ≈ 1/n², where computing `1 - q` first would throw away
    /// half the mantissa.
    #[inline]
    pub fn inverse_sf(&self, q: f64) -> f64 {
        debug_assert!(q > 0.0 && q <= 1.0, "inverse_sf needs q in (0,1]");
        match self {
            WeightDistribution::Constant { v0 } => *v0,
            WeightDistribution::Uniform { a, b } => b - q * (b - a),
            WeightDistribution::Exponential { rate } => -q.ln() / rate,
            WeightDistribution::Pareto { s } => q.powf(-1.0 / s),
            WeightDistribution::Tabulated(t) => t.inverse_cdf(1.0 - q),
        }
    }

    /// Samples by inverse transform. `u` must lie strictly inside (0, 1).
    pub fn sample(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!(
                "uniform variate must lie in the open interval (0,1), got {u}"
            )));
        }
        Ok(self.inverse_cdf(u))
    }

    /// Forward CDF P[X <= x].
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            WeightDistribution::Constant { v0 } => {
                if x >= *v0 {
                    1.0
                } else {
                    0.0
                }
            }
            WeightDistribution::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            WeightDistribution::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            WeightDistribution::Pareto { s } => {
                if x <= 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(-s)
                }
            }
            WeightDistribution::Tabulated(t) => t.cdf(x),
        }
    }

    /// Essential infimum of the support.
    pub fn essinf(&self) -> f64 {
        match self {
            WeightDistribution::Constant { v0 } => *v0,
            WeightDistribution::Uniform { a, .. } => *a,
            WeightDistribution::Exponential { .. } => 0.0,
            WeightDistribution::Pareto { .. } => 1.0,
            WeightDistribution::Tabulated(t) => t.essinf,
        }
    }

    /// Mean; `f64::INFINITY` when the first moment diverges.
    pub fn mean(&self) -> f64 {
        match self {
            WeightDistribution::Constant { v0 } => *v0,
            WeightDistribution::Uniform { a, b } => 0.5 * (a + b),
            WeightDistribution::Exponential { rate } => 1.0 / rate,
            WeightDistribution::Pareto { s } => {
                if *s > 1.0 {
                    s / (s - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            WeightDistribution::Tabulated(t) => t.mean(),
        }
    }

    /// Tail index, for laws that are (or stand in for) regularly varying.
    pub fn tail_index(&self) -> Option<f64> {
        match self {
            WeightDistribution::Pareto { s } => Some(*s),
            WeightDistribution::Tabulated(t) => t.tail_index,
            _ => None,
        }
    }

    /// Whether E[X^k] is finite. For a tail index `s` the rule is `k < s`;
    /// the other kinds (and tabulated laws without a declared index, which
    /// are bounded by their last knot) have every moment.
    pub fn has_moment(&self, k: u32) -> bool {
        match self.tail_index() {
            Some(s) => (k as f64) < s,
            None => true,
        }
    }

    /// Moment summary.
    pub fn stats(&self) -> DistStats {
        DistStats {
            mean: self.mean(),
            essinf: self.essinf(),
            tail_index: self.tail_index(),
            has_moment: [self.has_moment(1), self.has_moment(2), self.has_moment(3)],
        }
    }

    /// Scale of the largest of the ~n(n+1)/2 edge weights in a window of
    /// size `n`: F⁻¹(1 − 1/binom(n+1, 2)). Only meaningful for heavy tails,
    /// so a law without a tail index is refused.
    ///
    /// For the Pareto family this is exactly `(n(n+1)/2)^(1/s)`.
    pub fn max_weight_scale(&self, n: u64) -> Result<f64> {
        if self.tail_index().is_none() {
            return Err(Error::Unsupported(
                "the extreme-weight scale is defined for heavy-tailed laws; \
                 this distribution has no tail index"
                    .to_string(),
            ));
        }
        if n == 0 {
            return Err(Error::Domain("window size must be at least 1".to_string()));
        }
        let pairs = (n as u128 * (n as u128 + 1) / 2) as f64;
        Ok(self.inverse_sf(1.0 / pairs))
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.spec_string() {
            Some(s) => write!(f, "{s}"),
            None => write!(f, "table:<inline,{} knots>", match self {
                WeightDistribution::Tabulated(t) => t.knots.len(),
                _ => 0,
            }),
        }
    }
}

impl Tabulated {
    fn inverse_cdf(&self, u: f64) -> f64 {
        let knots = &self.knots;
        if u <= knots[0].0 {
            return knots[0].1;
        }
        if u >= knots[knots.len() - 1].0 {
            return knots[knots.len() - 1].1;
        }
        // Index of the first knot with knot.u > u; the segment is [pos-1, pos].
        let pos = knots.partition_point(|&(ku, _)| ku <= u);
        let (u0, x0) = knots[pos - 1];
        let (u1, x1) = knots[pos];
        x0 + (u - u0) / (u1 - u0) * (x1 - x0)
    }

    fn cdf(&self, x: f64) -> f64 {
        let knots = &self.knots;
        if x < knots[0].1 {
            return 0.0;
        }
        if x >= knots[knots.len() - 1].1 {
            return 1.0;
        }
        // Walk segments; P[X <= x] is the largest u whose value stays <= x.
        let mut u = knots[0].0;
        for window in knots.windows(2) {
            let (u0, x0) = window[0];
            let (u1, x1) = window[1];
            if x >= x1 {
                u = u1;
            } else {
                if x > x0 && x1 > x0 {
                    u = u0 + (x - x0) / (x1 - x0) * (u1 - u0);
                }
                break;
            }
        }
        u
    }

    /// Exact mean of the clamped piecewise-linear law: flat tails plus a
    /// trapezoid per segment.
    fn mean(&self) -> f64 {
        let knots = &self.knots;
        let (u_first, x_first) = knots[0];
        let (u_last, x_last) = knots[knots.len() - 1];
        let mut total = u_first * x_first + (1.0 - u_last) * x_last;
        for window in knots.windows(2) {
            let (u0, x0) = window[0];
            let (u1, x1) = window[1];
            total += (u1 - u0) * 0.5 * (x0 + x1);
        }
        total
    }
}

/// Reads `(u, value)` knots from a two-column CSV file. Blank lines and lines
/// starting with `#` are skipped.
fn read_knots(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    parse_knots(&text)
}

/// Parses two-column CSV text into knots.
pub fn parse_knots(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut knots = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let (u, x) = match (fields.next(), fields.next(), fields.next()) {
            (Some(u), Some(x), None) => (u, x),
            _ => {
                return Err(Error::Parse(format!(
                    "knot file line {}: expected `u,value`, got `{line}`",
                    lineno + 1
                )))
            }
        };
        let parse = |raw: &str| -> Result<f64> {
            raw.parse::<f64>()
                .map_err(|_| Error::Parse(format!("knot file line {}: `{raw}` is not a number", lineno + 1)))
        };
        knots.push((parse(u)?, parse(x)?));
    }
    Ok(knots)
}
