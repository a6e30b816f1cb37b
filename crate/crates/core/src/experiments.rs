//! Seeded Monte-Carlo campaigns and artifact outputs: error-probability
//! curves, region heatmaps, and averaged optimal-vs-benchmark comparisons,
//! all emitted as CSV or structured text.
//!
//! A campaign draws random deployments (AP positions uniform over the
//! coverage square, the uncertainty region uniform inside it), runs the
//! pruned pair selection and the centroid benchmark on each, evaluates the
//! worst-case error probability across a transmit-SNR grid in closed form,
//! and averages pointwise. The headline number is the horizontal gap
//! between the averaged curves at a target error probability, read off by
//! monotone interpolation in `(snr_db, log10 Pe)`.
//!
//! Every iteration derives its seed from `(master seed, K, iteration)`, so
//! outputs are bitwise identical regardless of the worker-thread count.

use rayon::prelude::*;

use crate::detector::pe_from_metric;
use crate::geometry::{partition_centroids, split_key_value, Deployment, Point, Rectangle};
use crate::seeding::derive_seed2;
use crate::selection::{
    benchmark_pair, default_boundary_step, opc1_objective, select_pair, CeSelection,
    PairSelection,
};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Campaign parameters.
///
/// Parsed from a `key = value` text file:
///
/// ```text
/// k = 20 30 50
/// coverage_side = 40
/// region_side = 10
/// kappa = 2 6
/// antennas_per_ap = 8
/// gamma0 = 0
/// gamma1 = 1
/// snr_min_db = 20
/// snr_max_db = 80
/// snr_step_db = 0.25
/// n_deployments = 2000
/// seed = 1
/// target_pe = 1e-3        # optional
/// boundary_step = 0.1     # optional, default perimeter/400
/// workers = 0             # optional, 0 = all cores
/// ```
#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub k_values: Vec<usize>,
    pub coverage_side: f64,
    pub region_side: f64,
    pub kappa_values: Vec<usize>,
    pub antennas_per_ap: usize,
    pub gamma0: f64,
    pub gamma1: f64,
    pub snr_db: Vec<f64>,
    pub n_deployments: usize,
    pub master_seed: u64,
    pub target_pe: f64,
    pub boundary_step: Option<f64>,
    /// Worker threads; 0 uses the global thread pool.
    pub workers: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            k_values: vec![20, 30, 50],
            coverage_side: 40.0,
            region_side: 10.0,
            kappa_values: vec![2, 6],
            antennas_per_ap: 8,
            gamma0: 0.0,
            gamma1: 1.0,
            snr_db: snr_grid(20.0, 80.0, 0.25),
            n_deployments: 2000,
            master_seed: 1,
            target_pe: 1e-3,
            boundary_step: None,
            workers: 0,
        }
    }
}

/// Build the inclusive SNR grid `min, min+step, …` up to `max`.
pub fn snr_grid(min_db: f64, max_db: f64, step_db: f64) -> Vec<f64> {
    let n = ((max_db - min_db) / step_db).round() as usize;
    (0..=n).map(|i| min_db + i as f64 * step_db).collect()
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_values.is_empty() || self.k_values.iter().any(|&k| k < 2) {
            return Err(Error::InvalidConfig(
                "k must list AP counts of at least 2".into(),
            ));
        }
        if self.coverage_side.is_nan()
            || self.coverage_side <= 0.0
            || self.region_side.is_nan()
            || self.region_side <= 0.0
        {
            return Err(Error::InvalidConfig("side lengths must be positive".into()));
        }
        if self.region_side > self.coverage_side {
            return Err(Error::InfeasibleGeometry(format!(
                "region side {} exceeds coverage side {}",
                self.region_side, self.coverage_side
            )));
        }
        let min_k = *self.k_values.iter().min().unwrap();
        if self.kappa_values.is_empty()
            || self.kappa_values.iter().any(|&k| k < 1 || k > min_k - 1)
        {
            return Err(Error::InvalidConfig(format!(
                "kappa values must lie in 1..=K-1 for every K (smallest K is {min_k})"
            )));
        }
        if self.antennas_per_ap < 1 {
            return Err(Error::InvalidConfig("antennas_per_ap must be at least 1".into()));
        }
        if self.gamma1 <= self.gamma0 {
            return Err(Error::InvalidConfig("gamma1 must exceed gamma0".into()));
        }
        if self.snr_db.len() < 2 || self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "the SNR grid must be strictly increasing with at least 2 points".into(),
            ));
        }
        if self.n_deployments < 1 {
            return Err(Error::InvalidConfig("n_deployments must be at least 1".into()));
        }
        if self.target_pe.is_nan() || self.target_pe <= 0.0 || self.target_pe >= 0.5 {
            return Err(Error::InvalidConfig("target_pe must lie in (0, 0.5)".into()));
        }
        if let Some(step) = self.boundary_step {
            if step.is_nan() || step <= 0.0 {
                return Err(Error::InvalidConfig("boundary_step must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Parse a campaign configuration from the documented text format.
pub fn parse_campaign_config(text: &str) -> Result<CampaignConfig> {
    let mut cfg = CampaignConfig::default();
    let mut snr_min = 20.0;
    let mut snr_max = 80.0;
    let mut snr_step = 0.25;
    let parse_f64 = |key: &str, v: &str| -> Result<f64> {
        v.parse::<f64>()
            .map_err(|_| Error::Parse(format!("`{key}`: `{v}` is not a number")))
    };
    let parse_usize = |key: &str, v: &str| -> Result<usize> {
        v.parse::<usize>()
            .map_err(|_| Error::Parse(format!("`{key}`: `{v}` is not an integer")))
    };
    for line in text.lines() {
        let Some((key, value)) = split_key_value(line)? else {
            continue;
        };
        match key.as_str() {
            "k" => {
                cfg.k_values = value
                    .split_whitespace()
                    .map(|v| parse_usize("k", v))
                    .collect::<Result<_>>()?;
            }
            "kappa" => {
                cfg.kappa_values = value
                    .split_whitespace()
                    .map(|v| parse_usize("kappa", v))
                    .collect::<Result<_>>()?;
            }
            "coverage_side" => cfg.coverage_side = parse_f64("coverage_side", &value)?,
            "region_side" => cfg.region_side = parse_f64("region_side", &value)?,
            "antennas_per_ap" => cfg.antennas_per_ap = parse_usize("antennas_per_ap", &value)?,
            "gamma0" => cfg.gamma0 = parse_f64("gamma0", &value)?,
            "gamma1" => cfg.gamma1 = parse_f64("gamma1", &value)?,
            "snr_min_db" => snr_min = parse_f64("snr_min_db", &value)?,
            "snr_max_db" => snr_max = parse_f64("snr_max_db", &value)?,
            "snr_step_db" => snr_step = parse_f64("snr_step_db", &value)?,
            "n_deployments" => cfg.n_deployments = parse_usize("n_deployments", &value)?,
            "seed" => {
                cfg.master_seed = value
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("`seed`: `{value}` is not an integer")))?;
            }
            "target_pe" => cfg.target_pe = parse_f64("target_pe", &value)?,
            "boundary_step" => cfg.boundary_step = Some(parse_f64("boundary_step", &value)?),
            "workers" => cfg.workers = parse_usize("workers", &value)?,
            other => return Err(Error::Parse(format!("unknown campaign key `{other}`"))),
        }
    }
    if snr_step.is_nan() || snr_step <= 0.0 || snr_max <= snr_min {
        return Err(Error::InvalidConfig("SNR grid bounds are inconsistent".into()));
    }
    cfg.snr_db = snr_grid(snr_min, snr_max, snr_step);
    cfg.validate()?;
    Ok(cfg)
}

/// An error-probability curve over a transmit-SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PeCurve {
    pub snr_db: Vec<f64>,
    pub pe: Vec<f64>,
    pub label: String,
}

/// Either kind of selection outcome, for curve plotting.
#[derive(Debug, Clone)]
pub enum SelectionOutcome {
    Ce(CeSelection),
    Pair(PairSelection),
}

impl SelectionOutcome {
    pub fn worst_value(&self) -> f64 {
        match self {
            SelectionOutcome::Ce(c) => c.worst_value,
            SelectionOutcome::Pair(p) => p.worst_value,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SelectionOutcome::Ce(c) => format!("ce_{}", c.ce_index),
            SelectionOutcome::Pair(p) => format!("pair_{}_{}", p.ce_index, p.reader_index),
        }
    }
}

/// Worst-case error probability of a selection across a transmit-SNR grid,
/// evaluated in closed form at the selection's worst-case point.
pub fn pe_curve(
    outcome: &SelectionOutcome,
    gamma0: f64,
    gamma1: f64,
    antennas: usize,
    snr_db: &[f64],
) -> Result<PeCurve> {
    if snr_db.is_empty() || snr_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "the SNR grid must be non-empty and strictly increasing".into(),
        ));
    }
    let metric = outcome.worst_value();
    let pe = snr_db
        .iter()
        .map(|&s| {
            pe_from_metric(gamma0, gamma1, 10f64.powf(s / 10.0), antennas, metric).map(|r| r.pe)
        })
        .collect::<Result<_>>()?;
    Ok(PeCurve {
        snr_db: snr_db.to_vec(),
        pe,
        label: outcome.label(),
    })
}

/// Transmit SNR (dB) at which a non-increasing curve crosses `target_pe`,
/// by linear interpolation in `(snr_db, log10 Pe)`.
pub fn snr_at_target(curve: &PeCurve, target_pe: f64) -> Result<f64> {
    if target_pe.is_nan() || target_pe <= 0.0 {
        return Err(Error::InvalidArgument("target_pe must be positive".into()));
    }
    let log_target = target_pe.log10();
    for w in curve.snr_db.windows(2).zip(curve.pe.windows(2)) {
        let ((s0, s1), (p0, p1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
        if p0 >= target_pe && target_pe >= p1 {
            if p0 == p1 {
                return Ok(s0);
            }
            let (l0, l1) = (p0.log10(), p1.log10());
            return Ok(s0 + (s1 - s0) * (log_target - l0) / (l1 - l0));
        }
    }
    Err(Error::InvalidArgument(format!(
        "curve `{}` does not cross Pe = {target_pe} on the SNR grid",
        curve.label
    )))
}

/// Render curves sharing one SNR grid as CSV (`snr_db` plus one column per
/// curve).
pub fn curves_to_csv(snr_db: &[f64], columns: &[(&str, &[f64])]) -> String {
    let mut out = String::from("snr_db");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, s) in snr_db.iter().enumerate() {
        out.push_str(&format!("{s}"));
        for (_, values) in columns {
            out.push_str(&format!(",{}", values[i]));
        }
        out.push('\n');
    }
    out
}

/// Per-cell objective values over the region, for heatmap rendering.
#[derive(Debug, Clone)]
pub struct HeatmapGrid {
    pub region: Rectangle,
    pub nx: usize,
    pub ny: usize,
    /// Cell centroids, row-major from the region's lower-left.
    pub points: Vec<Point>,
    pub values: Vec<f64>,
    /// Index of the worst-case (minimum-objective) cell.
    pub argmin: usize,
}

/// Evaluate the per-candidate emitter objective on an `nx × ny` cell grid
/// covering the region (`nx = ceil(width/resolution)`, same for `ny`);
/// the worst-case cell is marked. A centroid landing exactly on an AP gets
/// an infinite value.
pub fn emit_heatmap(
    dep: &Deployment,
    region: &Rectangle,
    ce_index: usize,
    resolution: f64,
) -> Result<HeatmapGrid> {
    if ce_index >= dep.num_aps() {
        return Err(Error::InvalidArgument(format!(
            "emitter index {ce_index} out of range for {} APs",
            dep.num_aps()
        )));
    }
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let nx = (region.width / resolution).ceil().max(1.0) as usize;
    let ny = (region.height / resolution).ceil().max(1.0) as usize;
    let points = partition_centroids(region, nx, ny);
    let values: Vec<f64> = points
        .iter()
        .map(|&p| match opc1_objective(dep, ce_index, p) {
            Ok((v, _)) => Ok(v),
            Err(Error::DegenerateGeometry(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let argmin = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    Ok(HeatmapGrid {
        region: *region,
        nx,
        ny,
        points,
        values,
        argmin,
    })
}

/// Render a heatmap as CSV: `x,y,objective[,pe],is_worst`. The optional
/// error-probability column evaluates the closed form at the given transmit
/// SNR.
pub fn heatmap_to_csv(
    grid: &HeatmapGrid,
    pe_at: Option<(f64, f64, f64, usize)>, // (gamma0, gamma1, transmit_snr, antennas)
) -> Result<String> {
    let mut out = String::from("x,y,objective");
    if pe_at.is_some() {
        out.push_str(",pe");
    }
    out.push_str(",is_worst\n");
    for (i, (p, v)) in grid.points.iter().zip(&grid.values).enumerate() {
        out.push_str(&format!("{},{},{}", p.x, p.y, v));
        if let Some((g0, g1, snr, m)) = pe_at {
            out.push_str(&format!(",{}", pe_from_metric(g0, g1, snr, m, *v)?.pe));
        }
        out.push_str(&format!(",{}\n", u8::from(i == grid.argmin)));
    }
    Ok(out)
}

/// Averaged curves and gap for one `(K, κ)` cell of a campaign.
#[derive(Debug, Clone)]
pub struct CampaignKappaResult {
    pub kappa: usize,
    pub optimal: PeCurve,
    pub snr_at_target_db: f64,
    pub gap_db: f64,
}

/// Campaign results for one AP count.
#[derive(Debug, Clone)]
pub struct CampaignKResult {
    pub k: usize,
    pub benchmark: PeCurve,
    pub benchmark_snr_at_target_db: f64,
    pub by_kappa: Vec<CampaignKappaResult>,
}

/// Full campaign output.
#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub config: CampaignConfig,
    pub per_k: Vec<CampaignKResult>,
}

impl CampaignResult {
    /// Deterministic `(file name, contents)` pairs: one curve CSV per
    /// `(K, κ)` and a text summary.
    pub fn to_files(&self) -> Vec<(String, String)> {
        let mut files = Vec::new();
        let mut summary = String::new();
        summary.push_str(&format!(
            "n_deployments = {}\nseed = {}\ntarget_pe = {}\n",
            self.config.n_deployments, self.config.master_seed, self.config.target_pe
        ));
        for kr in &self.per_k {
            for kp in &kr.by_kappa {
                let name = format!("pe_curve_k{}_kappa{}.csv", kr.k, kp.kappa);
                let csv = curves_to_csv(
                    &self.config.snr_db,
                    &[
                        ("pe_optimal", &kp.optimal.pe),
                        ("pe_benchmark", &kr.benchmark.pe),
                    ],
                );
                files.push((name, csv));
                summary.push_str(&format!(
                    "k = {} kappa = {} snr_optimal_db = {} snr_benchmark_db = {} gap_db = {}\n",
                    kr.k, kp.kappa, kp.snr_at_target_db, kr.benchmark_snr_at_target_db, kp.gap_db
                ));
            }
        }
        files.push(("summary.txt".to_string(), summary));
        files
    }

    /// Write all output files into `dir` (created if missing).
    pub fn write_to_dir(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in self.to_files() {
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

/// Worst-case pair metrics for one sampled deployment.
struct InstanceMetrics {
    optimal: Vec<f64>, // per kappa
    benchmark: f64,
}

fn sample_instance(cfg: &CampaignConfig, k: usize, iteration: u64) -> Result<InstanceMetrics> {
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed2(cfg.master_seed, k as u64, iteration));
    let side = cfg.coverage_side;
    let coverage = Rectangle::new(Point::new(side / 2.0, side / 2.0), side, side)?;

    // Duplicate AP positions have probability zero but would be rejected by
    // the deployment constructor; resample if that ever happens.
    let mut dep = None;
    for _ in 0..16 {
        let aps: Vec<Point> = (0..k)
            .map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
            .collect();
        if let Ok(d) = Deployment::new(aps, cfg.antennas_per_ap, coverage) {
            dep = Some(d);
            break;
        }
    }
    let dep = dep.ok_or_else(|| {
        Error::InfeasibleGeometry("could not sample a valid deployment".into())
    })?;

    let half = cfg.region_side / 2.0;
    let center = if side - 2.0 * half > 0.0 {
        Point::new(
            rng.random_range(half..side - half),
            rng.random_range(half..side - half),
        )
    } else {
        Point::new(side / 2.0, side / 2.0)
    };
    let region = Rectangle::square(center, cfg.region_side)?;
    let step = cfg.boundary_step.unwrap_or_else(|| default_boundary_step(&region));

    let optimal = cfg
        .kappa_values
        .iter()
        .map(|&kappa| select_pair(&dep, &region, kappa, step).map(|s| s.worst_value))
        .collect::<Result<_>>()?;
    let benchmark = benchmark_pair(&dep, &region)?.worst_value;
    Ok(InstanceMetrics { optimal, benchmark })
}

fn average_curve(
    metrics: impl Iterator<Item = f64> + Clone,
    n: usize,
    cfg: &CampaignConfig,
    label: &str,
) -> Result<PeCurve> {
    let mut pe = Vec::with_capacity(cfg.snr_db.len());
    for &s in &cfg.snr_db {
        let snr = 10f64.powf(s / 10.0);
        let mut sum = 0.0;
        for m in metrics.clone() {
            sum += pe_from_metric(cfg.gamma0, cfg.gamma1, snr, cfg.antennas_per_ap, m)?.pe;
        }
        pe.push(sum / n as f64);
    }
    Ok(PeCurve {
        snr_db: cfg.snr_db.clone(),
        pe,
        label: label.to_string(),
    })
}

fn run_campaign_inner(cfg: &CampaignConfig) -> Result<CampaignResult> {
    let mut per_k = Vec::with_capacity(cfg.k_values.len());
    for &k in &cfg.k_values {
        let instances: Vec<InstanceMetrics> = (0..cfg.n_deployments as u64)
            .into_par_iter()
            .map(|i| sample_instance(cfg, k, i))
            .collect::<Result<_>>()?;

        let benchmark = average_curve(
            instances.iter().map(|m| m.benchmark),
            instances.len(),
            cfg,
            "benchmark",
        )?;
        let benchmark_snr = snr_at_target(&benchmark, cfg.target_pe)?;

        let mut by_kappa = Vec::with_capacity(cfg.kappa_values.len());
        for (ki, &kappa) in cfg.kappa_values.iter().enumerate() {
            let optimal = average_curve(
                instances.iter().map(|m| m.optimal[ki]),
                instances.len(),
                cfg,
                &format!("optimal_kappa{kappa}"),
            )?;
            let snr = snr_at_target(&optimal, cfg.target_pe)?;
            by_kappa.push(CampaignKappaResult {
                kappa,
                optimal,
                snr_at_target_db: snr,
                gap_db: benchmark_snr - snr,
            });
        }
        per_k.push(CampaignKResult {
            k,
            benchmark,
            benchmark_snr_at_target_db: benchmark_snr,
            by_kappa,
        });
    }
    Ok(CampaignResult {
        config: cfg.clone(),
        per_k,
    })
}

/// Run a campaign: sample deployments, select pairs, average the worst-case
/// error curves, and extract the SNR gaps at the target error probability.
///
/// With `workers > 0` the work runs on a dedicated pool of that size;
/// either way the output is bitwise identical for a given configuration.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    if cfg.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| run_campaign_inner(cfg))
    } else {
        run_campaign_inner(cfg)
    }
}
