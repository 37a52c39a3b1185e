//! Small statistics toolkit used by the experiment drivers: exact two-sample
//! Kolmogorov-Smirnov distance, least-squares line fits (plain and log-log),
//! moment summaries, and deterministic bootstrap confidence intervals.

use crate::rng::{stream, Counter};
use crate::{Error, Result};

/// Exact two-sample Kolmogorov-Smirnov statistic: the supremum distance
/// between the two empirical CDFs, computed by a merge scan that handles
/// ties by advancing both samples through equal values before comparing.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(
            "KS statistic needs two nonempty samples".to_string(),
        ));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Domain("KS samples must not contain NaN".to_string()));
    }
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);

    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == t {
            i += 1;
        }
        while j < ys.len() && ys[j] == t {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    // Once one sample is exhausted its ECDF sits at 1; the gap can only
    // shrink from here, so the scan can stop.
    Ok(sup)
}

/// Ordinary least-squares line fit with the standard error of the slope.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; 0 for a two-point (exact) fit.
    pub stderr: f64,
}

/// Fits `y = intercept + slope * x` by least squares.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::Domain(format!(
            "fit needs matching sample lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let m = xs.len();
    if m < 2 {
        return Err(Error::InsufficientData(
            "line fit needs at least 2 points".to_string(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Domain("fit points must be finite".to_string()));
    }
    let xbar = xs.iter().sum::<f64>() / m as f64;
    let ybar = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain(
            "fit points must span more than one x value".to_string(),
        ));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let stderr = if m > 2 {
        let ssr: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - (intercept + slope * x);
                r * r
            })
            .sum();
        (ssr / (m as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        stderr,
    })
}

/// Fits `log y = intercept + slope * log x`; the slope is the growth
/// exponent of `y` against `x`. All coordinates must be positive.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::Domain(
            "log-log fit needs strictly positive coordinates".to_string(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|&(x, _)| x.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    fit_line(&xs, &ys)
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    debug_assert!(!xs.is_empty());
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n - 1 denominator); 0 for a single point.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Sample covariance (n - 1 denominator).
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = mean(xs);
    let my = mean(ys);
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (xs.len() as f64 - 1.0)
}

/// Moment summary of a sample: mean, variance, skewness, and (non-excess)
/// kurtosis. Skewness and kurtosis are 0 and 3 for a Gaussian; a degenerate
/// sample (zero variance) reports NaN for both.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

pub fn moment_summary(xs: &[f64]) -> MomentSummary {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    MomentSummary {
        mean: m,
        variance: variance(xs),
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    }
}

/// Quantile of a sorted sample by linear interpolation of order statistics.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let pos = q * (sorted.len() as f64 - 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Median (sorts a copy).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// 95% normal-approximation confidence interval for the mean.
pub fn mean_ci95(xs: &[f64]) -> (f64, f64, f64) {
    let m = mean(xs);
    let se = (variance(xs) / xs.len() as f64).sqrt();
    (m, m - 1.96 * se, m + 1.96 * se)
}

/// Number of bootstrap resamples used throughout.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Deterministic percentile bootstrap: 95% interval for an arbitrary sample
/// statistic, resampling with replacement `BOOTSTRAP_RESAMPLES` times.
pub fn bootstrap_ci95<F>(xs: &[f64], seed: u64, statistic: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
{
    debug_assert!(!xs.is_empty());
    let mut counter = Counter::new(seed, stream::BOOTSTRAP);
    let mut stats = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut resample = vec![0.0; xs.len()];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for slot in resample.iter_mut() {
            *slot = xs[counter.next_index(xs.len())];
        }
        stats.push(statistic(&resample));
    }
    stats.sort_by(f64::total_cmp);
    (
        quantile_sorted(&stats, 0.025),
        quantile_sorted(&stats, 0.975),
    )
}
