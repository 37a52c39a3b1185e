//! Monte Carlo drivers reproducing the limit behaviour at desk scale: ratio
//! stabilization of `w(0,n)/n`, moment checks of the renewal-standardized
//! passage value, growth exponents of the longest/heaviest geodesic edge,
//! and the distributional comparison against the continuum model.
//!
//! Trials are independent work units seeded as `trial_seed(master, index)`;
//! they may run on any number of worker threads, and every aggregate is a
//! deterministic fold over trial index order, so reports are byte-identical
//! across worker counts.
//!
//! Experiments over an n grid reuse the same per-trial seeds at every grid
//! point (common random numbers): per-point statistics are unchanged in
//! distribution, while cross-n comparisons — stabilization, trend and slope
//! fits — see much less noise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuum::{generate_continuum, wk};
use crate::dist::WeightDistribution;
use crate::graph::{GraphWindow, PresenceModel};
use crate::passage::{geodesic, passage_from};
use crate::renewal::{detect_renewals, pooled_cycle_estimators, CycleEstimates, RenewalAnalysis};
use crate::rng::{absorb, trial_seed};
use crate::stats::{self, LineFit, MomentSummary};
use crate::{Error, Result};

/// Resolved configuration embedded in every report; unused fields stay
/// empty. Together with the master seed this reproduces every number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub experiment: String,
    /// Distribution spec string (`None` only for inline tabulated laws).
    pub dist: Option<String>,
    pub p_model: Option<PresenceModel>,
    pub n_grid: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    pub c: Option<f64>,
    pub horizon: Option<u32>,
    pub k: Option<usize>,
    pub flags: Vec<String>,
}

/// One row of the lossy CSV projection: `n, stat, mean, lo, hi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub n: u64,
    pub stat: String,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Renders rows as a CSV table with header.
pub fn rows_to_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from("n,stat,mean,lo,hi\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.n, r.stat, r.mean, r.lo, r.hi));
    }
    out
}

fn validate_common(n_grid: &[u32], trials: u64) -> Result<()> {
    if n_grid.is_empty() {
        return Err(Error::Config("n grid must be nonempty".to_string()));
    }
    if n_grid.iter().any(|&n| n == 0) {
        return Err(Error::Config("window sizes must be at least 1".to_string()));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "n grid must be strictly increasing".to_string(),
        ));
    }
    if trials < 2 {
        return Err(Error::Config("need at least 2 trials".to_string()));
    }
    Ok(())
}

fn validate_geometric(n_grid: &[u32]) -> Result<()> {
    if n_grid.len() < 3 {
        return Err(Error::Config(
            "exponent fits need a geometric grid of at least 3 window sizes".to_string(),
        ));
    }
    let first = f64::from(n_grid[0]);
    let last = f64::from(*n_grid.last().expect("nonempty"));
    let gmean = (last / first).powf(1.0 / (n_grid.len() as f64 - 1.0));
    if gmean < 1.15 {
        return Err(Error::Config(
            "grid spans too little range for a log-log fit (mean ratio < 1.15)".to_string(),
        ));
    }
    for pair in n_grid.windows(2) {
        let r = f64::from(pair[1]) / f64::from(pair[0]);
        if r < gmean / 1.5 || r > gmean * 1.5 {
            return Err(Error::Config(format!(
                "grid is not geometric: step {} -> {} deviates from the mean ratio {gmean:.2}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// Runs one closure per trial index on the current worker pool, collecting
/// results in trial order regardless of completion order.
fn run_trials<T: Send, F: Fn(u64) -> T + Sync + Send>(trials: u64, f: F) -> Vec<T> {
    (0..trials).into_par_iter().map(f).collect()
}

// ---------------------------------------------------------------------------
// Ratio stabilization (law of large numbers regime)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SllnConfig {
    pub dist: WeightDistribution,
    pub p_model: PresenceModel,
    pub n_grid: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    /// Count unreachable trials as ratio 0 instead of excluding them.
    pub l1_plus: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SllnPoint {
    pub n: u32,
    pub samples_used: u64,
    pub unreachable: u64,
    /// Mean of `w(0,n)/n` with its 95% normal-approximation interval;
    /// `None` when no trial produced a value.
    pub ratio_mean: Option<f64>,
    pub ratio_ci: Option<(f64, f64)>,
    pub ratio_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SllnReport {
    pub config: ConfigEcho,
    pub points: Vec<SllnPoint>,
}

impl SllnReport {
    /// Whether every pair of per-n confidence intervals overlaps — the
    /// stabilization criterion for the ratio means.
    pub fn cis_pairwise_overlap(&self) -> bool {
        let cis: Vec<(f64, f64)> = self.points.iter().filter_map(|p| p.ratio_ci).collect();
        cis.iter().enumerate().all(|(i, a)| {
            cis[i + 1..]
                .iter()
                .all(|b| a.0.max(b.0) <= a.1.min(b.1))
        })
    }

    pub fn to_csv_rows(&self) -> Vec<CsvRow> {
        self.points
            .iter()
            .filter_map(|p| {
                let mean = p.ratio_mean?;
                let (lo, hi) = p.ratio_ci?;
                Some(CsvRow {
                    n: u64::from(p.n),
                    stat: "w_over_n".to_string(),
                    mean,
                    lo,
                    hi,
                })
            })
            .collect()
    }
}

/// Samples `w(0,n)/n` over a grid of window sizes.
///
/// Requires a finite second moment; heavy-tailed laws are refused and belong
/// to the scaling experiment, where the growth rate itself is the target.
pub fn run_slln(cfg: &SllnConfig) -> Result<SllnReport> {
    validate_common(&cfg.n_grid, cfg.trials)?;
    if !cfg.dist.has_moment(2) {
        return Err(Error::GateRefused(
            "ratio stabilization needs a finite second moment; this law's tail is too heavy \
             (use the scaling experiment for growth-exponent questions)"
                .to_string(),
        ));
    }
    let mut points = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let values = run_trials(cfg.trials, |t| {
            let seed = trial_seed(cfg.seed, t);
            let w = GraphWindow::new(n, cfg.p_model.clone(), cfg.dist.clone(), seed)
                .expect("validated configuration");
            passage_from(&w, 0)[n as usize]
        });
        let mut ratios: Vec<f64> = Vec::with_capacity(values.len());
        let mut unreachable = 0u64;
        for v in values {
            match v {
                Some(w) => ratios.push(w / f64::from(n)),
                None => {
                    unreachable += 1;
                    if cfg.l1_plus {
                        ratios.push(0.0);
                    }
                }
            }
        }
        let (ratio_mean, ratio_ci, ratio_variance) = if ratios.is_empty() {
            (None, None, None)
        } else {
            let (m, lo, hi) = stats::mean_ci95(&ratios);
            (Some(m), Some((lo, hi)), Some(stats::variance(&ratios)))
        };
        points.push(SllnPoint {
            n,
            samples_used: ratios.len() as u64,
            unreachable,
            ratio_mean,
            ratio_ci,
            ratio_variance,
        });
    }
    Ok(SllnReport {
        config: ConfigEcho {
            experiment: "slln".to_string(),
            dist: cfg.dist.spec_string(),
            p_model: Some(cfg.p_model.clone()),
            n_grid: cfg.n_grid.clone(),
            trials: cfg.trials,
            seed: cfg.seed,
            c: None,
            horizon: None,
            k: None,
            flags: if cfg.l1_plus {
                vec!["l1_plus".to_string()]
            } else {
                vec![]
            },
        },
        points,
    })
}

// ---------------------------------------------------------------------------
// Standardized-shape check (central-limit regime)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CltConfig {
    pub dist: WeightDistribution,
    pub p_model: PresenceModel,
    pub n: u32,
    pub trials: u64,
    pub c: f64,
    pub horizon: u32,
    pub seed: u64,
    /// Run despite an infinite third moment (exploration of the regime where
    /// the normalized sums provably have no Gaussian limit).
    pub override_moment_gate: bool,
    /// Fractions of the window at which the standardized path is sampled;
    /// defaults to `[0.25, 0.5, 0.75, 1.0]` when empty.
    pub t_grid: Vec<f64>,
}

pub const DEFAULT_T_GRID: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub config: ConfigEcho,
    pub gate_overridden: bool,
    /// Present when the gate was overridden: the standardized sums in this
    /// moment regime cannot converge to a Gaussian, so shape statistics are
    /// exploratory only.
    pub note: Option<String>,
    pub trials_used: u64,
    pub unreachable: u64,
    /// Density/drift/diffusion estimates pooled over all trials' cycles.
    pub estimates: CycleEstimates,
    /// True when the pooled cycle variance is 0 (e.g. constant weights):
    /// no standardization is possible and the z fields stay empty.
    pub degenerate: bool,
    pub z_moments: Option<MomentSummary>,
    pub z_mean_ci: Option<(f64, f64)>,
    pub z_variance_ci: Option<(f64, f64)>,
    pub z_skewness_ci: Option<(f64, f64)>,
    pub z_kurtosis_ci: Option<(f64, f64)>,
    pub t_grid: Vec<f64>,
    /// Sample covariance of the standardized path across the t grid;
    /// the Brownian target is `min(t_i, t_j)`.
    pub covariance: Option<Vec<Vec<f64>>>,
    pub max_covariance_deviation: Option<f64>,
}

impl CltReport {
    pub fn to_csv_rows(&self) -> Vec<CsvRow> {
        let n = u64::from(self.config.n_grid.first().copied().unwrap_or(0));
        let mut rows = Vec::new();
        if let (Some(m), Some(mci), Some(vci), Some(sci), Some(kci)) = (
            self.z_moments,
            self.z_mean_ci,
            self.z_variance_ci,
            self.z_skewness_ci,
            self.z_kurtosis_ci,
        ) {
            for (stat, mean, (lo, hi)) in [
                ("z_mean", m.mean, mci),
                ("z_variance", m.variance, vci),
                ("z_skewness", m.skewness, sci),
                ("z_kurtosis", m.kurtosis, kci),
            ] {
                rows.push(CsvRow {
                    n,
                    stat: stat.to_string(),
                    mean,
                    lo,
                    hi,
                });
            }
        }
        rows
    }
}

/// Standardizes `w(0, tn)` by the pooled cycle estimates and reports its
/// moments against the Gaussian/Brownian targets.
pub fn run_clt_shape(cfg: &CltConfig) -> Result<CltReport> {
    validate_common(&[cfg.n], cfg.trials)?;
    if !cfg.dist.has_moment(2) {
        return Err(Error::GateRefused(
            "shape checks need at least a finite variance; heavy tails belong to the \
             scaling and continuum-comparison experiments"
                .to_string(),
        ));
    }
    let gate_overridden = !cfg.dist.has_moment(3);
    if gate_overridden && !cfg.override_moment_gate {
        return Err(Error::GateRefused(
            "the Gaussian shape target assumes a finite third moment, which this law lacks; \
             pass the override to explore the no-limit regime anyway"
                .to_string(),
        ));
    }
    let t_grid: Vec<f64> = if cfg.t_grid.is_empty() {
        DEFAULT_T_GRID.to_vec()
    } else {
        cfg.t_grid.clone()
    };
    if t_grid.iter().any(|&t| !(0.0 < t && t <= 1.0)) {
        return Err(Error::Config(
            "t grid entries must lie in (0, 1]".to_string(),
        ));
    }
    let marks: Vec<u32> = t_grid
        .iter()
        .map(|&t| ((f64::from(cfg.n) * t).round() as u32).clamp(1, cfg.n))
        .collect();

    type TrialOutcome = (Option<Vec<f64>>, RenewalAnalysis);
    let outcomes: Vec<TrialOutcome> = run_trials(cfg.trials, |t| {
        let seed = trial_seed(cfg.seed, t);
        let w = GraphWindow::new(cfg.n, cfg.p_model.clone(), cfg.dist.clone(), seed)
            .expect("validated configuration");
        let prefix = passage_from(&w, 0);
        let values: Option<Vec<f64>> = marks.iter().map(|&m| prefix[m as usize]).collect();
        let analysis =
            detect_renewals(&w, cfg.c, cfg.horizon).expect("validated detection parameters");
        (values, analysis)
    });

    let mut unreachable = 0u64;
    let mut path_values: Vec<Vec<f64>> = Vec::new();
    let mut analyses: Vec<RenewalAnalysis> = Vec::new();
    for (values, analysis) in outcomes {
        match values {
            Some(v) => {
                path_values.push(v);
                analyses.push(analysis);
            }
            None => unreachable += 1,
        }
    }
    if path_values.len() < 2 {
        return Err(Error::InsufficientData(
            "too few reachable trials to estimate shape statistics".to_string(),
        ));
    }

    let estimates = pooled_cycle_estimators(&analyses).map_err(|_| {
        Error::InsufficientData(
            "too few renewal cycles to standardize; increase n, the trial count, \
             or pick c deeper inside the admissible range"
                .to_string(),
        )
    })?;

    let note = gate_overridden.then(|| {
        "third moment is infinite: no Gaussian limit exists in this regime, \
         shape statistics are exploratory"
            .to_string()
    });
    let config = ConfigEcho {
        experiment: "clt_shape".to_string(),
        dist: cfg.dist.spec_string(),
        p_model: Some(cfg.p_model.clone()),
        n_grid: vec![cfg.n],
        trials: cfg.trials,
        seed: cfg.seed,
        c: Some(cfg.c),
        horizon: Some(cfg.horizon),
        k: None,
        flags: if cfg.override_moment_gate {
            vec!["override_moment_gate".to_string()]
        } else {
            vec![]
        },
    };

    if estimates.sigma2_hat <= 0.0 {
        return Ok(CltReport {
            config,
            gate_overridden,
            note,
            trials_used: path_values.len() as u64,
            unreachable,
            estimates,
            degenerate: true,
            z_moments: None,
            z_mean_ci: None,
            z_variance_ci: None,
            z_skewness_ci: None,
            z_kurtosis_ci: None,
            t_grid,
            covariance: None,
            max_covariance_deviation: None,
        });
    }

    let scale = estimates.lambda_hat.sqrt()
        * estimates.sigma2_hat.sqrt()
        * f64::from(cfg.n).sqrt();
    let z_paths: Vec<Vec<f64>> = path_values
        .iter()
        .map(|vals| {
            vals.iter()
                .zip(&marks)
                .map(|(&w, &m)| (w - estimates.c_cycle * f64::from(m)) / scale)
                .collect()
        })
        .collect();
    let last = t_grid.len() - 1;
    let z_final: Vec<f64> = z_paths.iter().map(|p| p[last]).collect();

    let z_moments = stats::moment_summary(&z_final);
    let (_, mean_lo, mean_hi) = stats::mean_ci95(&z_final);
    let z_variance_ci = stats::bootstrap_ci95(&z_final, absorb(cfg.seed, 1), stats::variance);
    let z_skewness_ci = stats::bootstrap_ci95(&z_final, absorb(cfg.seed, 2), |s| {
        stats::moment_summary(s).skewness
    });
    let z_kurtosis_ci = stats::bootstrap_ci95(&z_final, absorb(cfg.seed, 3), |s| {
        stats::moment_summary(s).kurtosis
    });

    let dim = t_grid.len();
    let mut covariance = vec![vec![0.0; dim]; dim];
    let mut max_dev = 0.0f64;
    for i in 0..dim {
        let xi: Vec<f64> = z_paths.iter().map(|p| p[i]).collect();
        for j in 0..dim {
            let xj: Vec<f64> = z_paths.iter().map(|p| p[j]).collect();
            let cov = stats::covariance(&xi, &xj);
            covariance[i][j] = cov;
            // The discrete marks round n*t, so compare against the rounded
            // fractions actually sampled.
            let target =
                (f64::from(marks[i]) / f64::from(cfg.n)).min(f64::from(marks[j]) / f64::from(cfg.n));
            max_dev = max_dev.max((cov - target).abs());
        }
    }

    Ok(CltReport {
        config,
        gate_overridden,
        note,
        trials_used: z_final.len() as u64,
        unreachable,
        estimates,
        degenerate: false,
        z_moments: Some(z_moments),
        z_mean_ci: Some((mean_lo, mean_hi)),
        z_variance_ci: Some(z_variance_ci),
        z_skewness_ci: Some(z_skewness_ci),
        z_kurtosis_ci: Some(z_kurtosis_ci),
        t_grid,
        covariance: Some(covariance),
        max_covariance_deviation: Some(max_dev),
    })
}

// ---------------------------------------------------------------------------
// Longest/heaviest-edge growth exponents
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ScalingConfig {
    pub dist: WeightDistribution,
    pub p_model: PresenceModel,
    pub n_grid: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: u32,
    pub unreachable: u64,
    pub median_ell: f64,
    pub ell_ci: (f64, f64),
    pub median_h: f64,
    pub h_ci: (f64, f64),
    pub mean_w: f64,
    pub w_ci: (f64, f64),
    /// `p^{-1/s} * w / b_n` samples for heavy tails (tail index < 2) under a
    /// constant presence probability; feeds the continuum comparison.
    pub normalized_samples: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub config: ConfigEcho,
    pub points: Vec<ScalingPoint>,
    /// Log-log slope of the median longest-edge length against n.
    pub ell_fit: LineFit,
    /// Log-log slope of the median heaviest-edge weight against n.
    pub h_fit: LineFit,
    /// Log-log slope of the mean passage value against n.
    pub w_fit: LineFit,
    /// Heaviest-of-all-pairs scale per grid point (heavy tails only).
    pub b_n: Option<Vec<f64>>,
}

impl ScalingReport {
    pub fn to_csv_rows(&self) -> Vec<CsvRow> {
        self.points
            .iter()
            .flat_map(|p| {
                [
                    ("median_ell", p.median_ell, p.ell_ci),
                    ("median_h", p.median_h, p.h_ci),
                    ("mean_w", p.mean_w, p.w_ci),
                ]
                .into_iter()
                .map(|(stat, mean, (lo, hi))| CsvRow {
                    n: u64::from(p.n),
                    stat: stat.to_string(),
                    mean,
                    lo,
                    hi,
                })
            })
            .collect()
    }
}

/// Measures how the longest geodesic edge, the heaviest geodesic edge, and
/// the passage value itself grow across a geometric grid of window sizes.
pub fn run_scaling(cfg: &ScalingConfig) -> Result<ScalingReport> {
    validate_common(&cfg.n_grid, cfg.trials)?;
    validate_geometric(&cfg.n_grid)?;

    let s = cfg.dist.tail_index();
    let heavy = s.is_some_and(|s| s < 2.0);
    let p_factor = match (&cfg.p_model, s) {
        (PresenceModel::Constant(p), Some(s)) => p.powf(-1.0 / s),
        _ => 1.0,
    };

    let mut points = Vec::with_capacity(cfg.n_grid.len());
    let mut b_grid = Vec::new();
    for (n_idx, &n) in cfg.n_grid.iter().enumerate() {
        let reports = run_trials(cfg.trials, |t| {
            let seed = trial_seed(cfg.seed, t);
            let w = GraphWindow::new(n, cfg.p_model.clone(), cfg.dist.clone(), seed)
                .expect("validated configuration");
            geodesic(&w, 0, n)
        });
        let mut ells = Vec::new();
        let mut hs = Vec::new();
        let mut ws = Vec::new();
        let mut unreachable = 0u64;
        for r in reports {
            match (r.value, r.ell, r.h) {
                (Some(v), Some(ell), Some(h)) => {
                    ws.push(v);
                    ells.push(f64::from(ell));
                    hs.push(h);
                }
                _ => unreachable += 1,
            }
        }
        if ws.is_empty() {
            return Err(Error::InsufficientData(format!(
                "every trial at n = {n} was unreachable; growth statistics undefined"
            )));
        }
        let boot = absorb(cfg.seed, 0x10 + n_idx as u64);
        let ell_ci = stats::bootstrap_ci95(&ells, boot, stats::median);
        let h_ci = stats::bootstrap_ci95(&hs, absorb(boot, 1), stats::median);
        let (mean_w, w_lo, w_hi) = stats::mean_ci95(&ws);

        let normalized_samples = if heavy {
            let bn = cfg
                .dist
                .max_weight_scale(u64::from(n))
                .expect("tail index checked");
            b_grid.push(bn);
            Some(ws.iter().map(|w| p_factor * w / bn).collect())
        } else {
            None
        };

        points.push(ScalingPoint {
            n,
            unreachable,
            median_ell: stats::median(&ells),
            ell_ci,
            median_h: stats::median(&hs),
            h_ci,
            mean_w,
            w_ci: (w_lo, w_hi),
            normalized_samples,
        });
    }

    let ell_points: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (f64::from(p.n), p.median_ell))
        .collect();
    let h_points: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (f64::from(p.n), p.median_h))
        .collect();
    let w_points: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (f64::from(p.n), p.mean_w))
        .collect();

    Ok(ScalingReport {
        config: ConfigEcho {
            experiment: "scaling".to_string(),
            dist: cfg.dist.spec_string(),
            p_model: Some(cfg.p_model.clone()),
            n_grid: cfg.n_grid.clone(),
            trials: cfg.trials,
            seed: cfg.seed,
            c: None,
            horizon: None,
            k: None,
            flags: vec![],
        },
        ell_fit: stats::fit_loglog(&ell_points)?,
        h_fit: stats::fit_loglog(&h_points)?,
        w_fit: stats::fit_loglog(&w_points)?,
        b_n: heavy.then_some(b_grid),
        points,
    })
}

// ---------------------------------------------------------------------------
// Discrete-to-continuum comparison
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CompareConfig {
    /// Tail index of the polynomial law, in (0, 2).
    pub s: f64,
    /// Constant presence probability.
    pub p: f64,
    pub n_grid: Vec<u32>,
    pub trials: u64,
    /// Truncation depth of the continuum reference values.
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparePoint {
    pub n: u32,
    pub unreachable: u64,
    /// Two-sample KS distance between the normalized window samples and the
    /// continuum reference.
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub config: ConfigEcho,
    pub b_n: Vec<f64>,
    pub points: Vec<ComparePoint>,
    /// Deciles of the continuum reference sample, for cross-run comparison.
    pub reference_deciles: Vec<f64>,
}

impl CompareReport {
    pub fn to_csv_rows(&self) -> Vec<CsvRow> {
        self.points
            .iter()
            .map(|p| CsvRow {
                n: u64::from(p.n),
                stat: "ks".to_string(),
                mean: p.ks,
                lo: p.ks,
                hi: p.ks,
            })
            .collect()
    }
}

/// Compares `p^{-1/s} w(0,n) / b_n` against truncated continuum passage
/// values, one KS distance per grid point, all against one shared reference
/// sample (so runs differing only in `p` are directly comparable).
pub fn run_compare_continuum(cfg: &CompareConfig) -> Result<CompareReport> {
    validate_common(&cfg.n_grid, cfg.trials)?;
    if cfg.k == 0 {
        return Err(Error::Config(
            "continuum truncation depth k must be at least 1".to_string(),
        ));
    }
    let dist = WeightDistribution::pareto(cfg.s)?;
    let p_model = PresenceModel::constant(cfg.p)?;
    let p_factor = cfg.p.powf(-1.0 / cfg.s);

    // Continuum instances and discrete windows share the per-trial seed
    // sequence but draw from disjoint generator streams, so no correlation
    // is introduced; the reference sample depends only on (s, k, trials,
    // seed) and is therefore identical across runs that differ in p.
    let reference: Vec<f64> = run_trials(cfg.trials, |t| {
        let inst = generate_continuum(cfg.s, cfg.k, trial_seed(cfg.seed, t))
            .expect("validated parameters");
        wk(&inst, cfg.k).expect("k within the generated range")
    });

    let mut points = Vec::with_capacity(cfg.n_grid.len());
    let mut b_n = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let bn = dist.max_weight_scale(u64::from(n))?;
        b_n.push(bn);
        let values = run_trials(cfg.trials, |t| {
            let seed = trial_seed(cfg.seed, t);
            let w = GraphWindow::new(n, p_model.clone(), dist.clone(), seed)
                .expect("validated configuration");
            passage_from(&w, 0)[n as usize]
        });
        let mut normalized = Vec::with_capacity(values.len());
        let mut unreachable = 0u64;
        for v in values {
            match v {
                Some(w) => normalized.push(p_factor * w / bn),
                None => unreachable += 1,
            }
        }
        let ks = stats::ks_statistic(&normalized, &reference)?;
        points.push(ComparePoint {
            n,
            unreachable,
            ks,
        });
    }

    let mut sorted_ref = reference;
    sorted_ref.sort_by(f64::total_cmp);
    let reference_deciles = (0..=10)
        .map(|d| stats::quantile_sorted(&sorted_ref, f64::from(d) / 10.0))
        .collect();

    Ok(CompareReport {
        config: ConfigEcho {
            experiment: "compare_continuum".to_string(),
            dist: dist.spec_string(),
            p_model: Some(p_model),
            n_grid: cfg.n_grid.clone(),
            trials: cfg.trials,
            seed: cfg.seed,
            c: None,
            horizon: None,
            k: Some(cfg.k),
            flags: vec![],
        },
        b_n,
        points,
        reference_deciles,
    })
}
