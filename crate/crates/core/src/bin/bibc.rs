//! Command-line front end: detector simulation, emitter and pair selection,
//! and campaign/heatmap/curve outputs.
//!
//! Exit codes: 0 on success, 2 for invalid configuration or arguments, 3 for
//! infeasible or degenerate geometry, 1 for I/O failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bibc_core::channel::make_probing_signal;
use bibc_core::detector::{closed_form_pe, monte_carlo_ber, DetectorConfig, ReaderPolicy};
use bibc_core::experiments::{
    curves_to_csv, emit_heatmap, heatmap_to_csv, parse_campaign_config, pe_curve, run_campaign,
    snr_grid, SelectionOutcome,
};
use bibc_core::geometry::{
    nearest_ap, parse_deployment, Deployment, Point, Rectangle,
};
use bibc_core::seeding::derive_seed;
use bibc_core::selection::{
    benchmark_pair, ce_candidates, default_boundary_step, grid_min_boundary, select_ce,
    select_pair, PgdSettings, SelectionObjective,
};
use bibc_core::{Error, Result};

#[derive(Parser)]
#[command(name = "bibc", version, about = "Bistatic backscatter simulation and AP selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep transmit SNR and compare Monte-Carlo BER with the closed form
    /// (CSV on stdout: snr_db,mc_ber,ci_halfwidth,closed_form_pe).
    DetectSim(DetectSimArgs),
    /// Choose the best carrier emitter for a region (text report).
    SelectCe(SelectCeArgs),
    /// Choose the best emitter-reader pair for a region (text report).
    SelectPair(SelectPairArgs),
    /// Run a Monte-Carlo campaign from a config file into an output directory.
    Campaign(CampaignArgs),
    /// Emit the per-cell selection objective over a region as CSV.
    Heatmap(HeatmapArgs),
    /// Emit worst-case Pe curves for the optimal and benchmark pairs as CSV.
    PeCurve(PeCurveArgs),
}

/// Where the deployment comes from: a file, an explicit AP list, or a
/// uniform random draw.
#[derive(Args)]
struct DeploymentArgs {
    /// Deployment file (see README for the format).
    #[arg(long, conflicts_with_all = ["aps", "num_aps"])]
    deployment: Option<PathBuf>,
    /// Explicit AP coordinates: "x,y;x,y;...".
    #[arg(long, conflicts_with = "num_aps")]
    aps: Option<String>,
    /// Draw this many APs uniformly over the coverage square.
    #[arg(long)]
    num_aps: Option<usize>,
    /// Coverage square side in meters (explicit/random AP modes).
    #[arg(long, default_value_t = 30.0)]
    coverage_side: f64,
    /// Seed for the random AP draw.
    #[arg(long, default_value_t = 1)]
    deploy_seed: u64,
    /// Antennas per AP (explicit/random AP modes).
    #[arg(long, default_value_t = 8)]
    antennas: usize,
}

impl DeploymentArgs {
    fn resolve(&self) -> Result<Deployment> {
        if let Some(path) = &self.deployment {
            return parse_deployment(&std::fs::read_to_string(path)?);
        }
        let side = self.coverage_side;
        let coverage = Rectangle::new(Point::new(side / 2.0, side / 2.0), side, side)?;
        if let Some(spec) = &self.aps {
            let aps = spec
                .split(';')
                .map(parse_point)
                .collect::<Result<Vec<_>>>()?;
            return Deployment::new(aps, self.antennas, coverage);
        }
        if let Some(k) = self.num_aps {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(self.deploy_seed);
            let aps = (0..k)
                .map(|_| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
                .collect();
            return Deployment::new(aps, self.antennas, coverage);
        }
        Err(Error::InvalidConfig(
            "provide one of --deployment, --aps, or --num-aps".into(),
        ))
    }
}

#[derive(Args)]
struct RegionArgs {
    /// Region center "x,y" in meters.
    #[arg(long)]
    region_center: String,
    /// Region side in meters (the region is square).
    #[arg(long, default_value_t = 5.0)]
    region_side: f64,
}

impl RegionArgs {
    fn resolve(&self) -> Result<Rectangle> {
        Rectangle::square(parse_point(&self.region_center)?, self.region_side)
    }
}

#[derive(Args)]
struct DetectSimArgs {
    #[command(flatten)]
    deployment: DeploymentArgs,
    /// Backscatter device position "x,y".
    #[arg(long)]
    bd: String,
    #[arg(long, default_value_t = 0.0)]
    gamma0: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma1: f64,
    /// Probing slot length in symbols (at least the antenna count).
    #[arg(long, default_value_t = 8)]
    tau_d: usize,
    /// Transmit SNR sweep in dB: "0,5,10,...".
    #[arg(long, default_value = "0,5,10,15,20")]
    snr_db: String,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Emitter indices "0,3" (default: the AP nearest the device).
    #[arg(long)]
    ce: Option<String>,
    /// Reader policy: all-others or complement.
    #[arg(long, default_value = "all-others")]
    policy: String,
}

#[derive(Args)]
struct PgdArgs {
    #[arg(long, default_value_t = 2000.0)]
    learning_rate: f64,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-6)]
    convergence_tol: f64,
    /// Start-point grid "nx,ny".
    #[arg(long, default_value = "4,4")]
    starts: String,
}

impl PgdArgs {
    fn resolve(&self) -> Result<PgdSettings> {
        let (nx, ny) = match self.starts.split_once(',') {
            Some((a, b)) => (
                a.trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad starts `{}`", self.starts)))?,
                b.trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad starts `{}`", self.starts)))?,
            ),
            None => return Err(Error::InvalidArgument("starts must be `nx,ny`".into())),
        };
        Ok(PgdSettings {
            learning_rate: self.learning_rate,
            max_iterations: self.max_iterations,
            convergence_tol: self.convergence_tol,
            starts_x: nx,
            starts_y: ny,
        })
    }
}

#[derive(Args)]
struct SelectCeArgs {
    #[command(flatten)]
    deployment: DeploymentArgs,
    #[command(flatten)]
    region: RegionArgs,
    #[command(flatten)]
    pgd: PgdArgs,
}

#[derive(Args)]
struct SelectPairArgs {
    #[command(flatten)]
    deployment: DeploymentArgs,
    #[command(flatten)]
    region: RegionArgs,
    /// Pruning width: how many top-scoring partners survive.
    #[arg(long, default_value_t = 2)]
    kappa: usize,
    /// Boundary sampling step in meters (default: perimeter/400).
    #[arg(long)]
    boundary_step: Option<f64>,
}

#[derive(Args)]
struct CampaignArgs {
    /// Campaign config file (see README for the format).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for curve CSVs and the summary.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (overrides the config; 0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct HeatmapArgs {
    #[command(flatten)]
    deployment: DeploymentArgs,
    #[command(flatten)]
    region: RegionArgs,
    /// Emitter index the objective is evaluated for.
    #[arg(long)]
    ce: usize,
    /// Cell size in meters.
    #[arg(long, default_value_t = 0.05)]
    resolution: f64,
    /// Also emit a Pe column at this transmit SNR (dB).
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    gamma0: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma1: f64,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PeCurveArgs {
    #[command(flatten)]
    deployment: DeploymentArgs,
    #[command(flatten)]
    region: RegionArgs,
    #[arg(long, default_value_t = 2)]
    kappa: usize,
    #[arg(long)]
    boundary_step: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    gamma0: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma1: f64,
    #[arg(long, default_value_t = 20.0)]
    snr_min_db: f64,
    #[arg(long, default_value_t = 80.0)]
    snr_max_db: f64,
    #[arg(long, default_value_t = 0.25)]
    snr_step_db: f64,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<Point> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidArgument(format!("expected `x,y`, got `{s}`")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("`{v}` is not a number")))
    };
    Ok(Point::new(parse(x)?, parse(y)?))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("`{v}` is not a number")))
        })
        .collect()
}

fn write_out(out: &Option<PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, contents)?,
        None => print!("{contents}"),
    }
    Ok(())
}

fn run_detect_sim(args: &DetectSimArgs) -> Result<()> {
    let dep = args.deployment.resolve()?;
    let bd = parse_point(&args.bd)?;
    let policy = match args.policy.as_str() {
        "all-others" => ReaderPolicy::AllOthers,
        "complement" => ReaderPolicy::Complement,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown policy `{other}` (use all-others or complement)"
            )))
        }
    };
    let ce_set = match &args.ce {
        Some(spec) => spec
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("`{v}` is not an AP index")))
            })
            .collect::<Result<Vec<_>>>()?,
        None => vec![nearest_ap(&dep, bd)],
    };
    let cfg = DetectorConfig::equal_priors(args.gamma0, args.gamma1, ce_set, policy)?;
    let m = dep.antennas_per_ap();
    if args.tau_d < m {
        return Err(Error::InvalidArgument(format!(
            "tau_d {} is below the antenna count {m}",
            args.tau_d
        )));
    }
    println!("snr_db,mc_ber,ci_halfwidth,closed_form_pe");
    for (i, &snr_db) in parse_list(&args.snr_db)?.iter().enumerate() {
        let power = 10f64.powf(snr_db / 10.0) / args.tau_d as f64;
        let phi = make_probing_signal(m, args.tau_d, power)?;
        let exact = closed_form_pe(&dep, bd, &cfg, &phi)?;
        let mc = monte_carlo_ber(&dep, bd, &cfg, &phi, args.trials, derive_seed(args.seed, i as u64))?;
        println!("{snr_db},{},{},{}", mc.ber, mc.ci_halfwidth, exact.pe);
    }
    Ok(())
}

fn run_select_ce(args: &SelectCeArgs) -> Result<()> {
    let dep = args.deployment.resolve()?;
    let region = args.region.resolve()?;
    let settings = args.pgd.resolve()?;
    let candidates = ce_candidates(&dep, &region, &settings)?;
    let best = select_ce(&dep, &region, &settings)?;
    println!("selected_ce = {}", best.ce_index);
    println!("worst_point = {} {}", best.worst_point.x, best.worst_point.y);
    println!("worst_value = {:e}", best.worst_value);
    println!("candidates:");
    for c in &candidates {
        println!(
            "  t = {:<3} m_t = {:<12.6e} worst_point = {} {}",
            c.ce_index, c.worst_value, c.worst_point.x, c.worst_point.y
        );
    }
    Ok(())
}

fn run_select_pair(args: &SelectPairArgs) -> Result<()> {
    let dep = args.deployment.resolve()?;
    let region = args.region.resolve()?;
    let step = args.boundary_step.unwrap_or_else(|| default_boundary_step(&region));
    let sel = select_pair(&dep, &region, args.kappa, step)?;
    println!("selected_ce = {}", sel.ce_index);
    println!("selected_reader = {}", sel.reader_index);
    println!("worst_point = {} {}", sel.worst_point.x, sel.worst_point.y);
    println!("worst_value = {:e}", sel.worst_value);
    println!("kappa = {}", args.kappa);
    println!(
        "candidate_set = {}",
        sel.candidate_set
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!("candidate_pairs:");
    for (i, &a) in sel.candidate_set.iter().enumerate() {
        for &b in &sel.candidate_set[i + 1..] {
            let (p, v) = grid_min_boundary(&dep, SelectionObjective::Pair(a, b), &region, step)?;
            println!(
                "  pair = {a} {b} m = {v:<12.6e} worst_point = {} {}",
                p.x, p.y
            );
        }
    }
    let bench = benchmark_pair(&dep, &region)?;
    println!(
        "benchmark_pair = {} {} (m = {:e})",
        bench.ce_index, bench.reader_index, bench.worst_value
    );
    Ok(())
}

fn run_campaign_cmd(args: &CampaignArgs) -> Result<()> {
    let mut cfg = parse_campaign_config(&std::fs::read_to_string(&args.config)?)?;
    if let Some(workers) = args.workers {
        cfg.workers = workers;
    }
    let result = run_campaign(&cfg)?;
    result.write_to_dir(&args.out)?;
    for kr in &result.per_k {
        for kp in &kr.by_kappa {
            println!(
                "k = {} kappa = {} gap_db = {:.3}",
                kr.k, kp.kappa, kp.gap_db
            );
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run_heatmap(args: &HeatmapArgs) -> Result<()> {
    let dep = args.deployment.resolve()?;
    let region = args.region.resolve()?;
    let grid = emit_heatmap(&dep, &region, args.ce, args.resolution)?;
    let pe_at = args.snr_db.map(|snr| {
        (
            args.gamma0,
            args.gamma1,
            10f64.powf(snr / 10.0),
            dep.antennas_per_ap(),
        )
    });
    write_out(&args.out, &heatmap_to_csv(&grid, pe_at)?)
}

fn run_pe_curve(args: &PeCurveArgs) -> Result<()> {
    let dep = args.deployment.resolve()?;
    let region = args.region.resolve()?;
    let step = args.boundary_step.unwrap_or_else(|| default_boundary_step(&region));
    let optimal = select_pair(&dep, &region, args.kappa, step)?;
    let bench = benchmark_pair(&dep, &region)?;
    let grid = snr_grid(args.snr_min_db, args.snr_max_db, args.snr_step_db);
    let m = dep.antennas_per_ap();
    let opt_curve = pe_curve(
        &SelectionOutcome::Pair(optimal),
        args.gamma0,
        args.gamma1,
        m,
        &grid,
    )?;
    let bench_curve = pe_curve(
        &SelectionOutcome::Pair(bench),
        args.gamma0,
        args.gamma1,
        m,
        &grid,
    )?;
    let csv = curves_to_csv(
        &grid,
        &[
            ("pe_optimal", &opt_curve.pe),
            ("pe_benchmark", &bench_curve.pe),
        ],
    );
    write_out(&args.out, &csv)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::DetectSim(args) => run_detect_sim(args),
        Command::SelectCe(args) => run_select_ce(args),
        Command::SelectPair(args) => run_select_pair(args),
        Command::Campaign(args) => run_campaign_cmd(args),
        Command::Heatmap(args) => run_heatmap(args),
        Command::PeCurve(args) => run_pe_curve(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::InvalidConfig(_) | Error::InvalidArgument(_) => {
                    ExitCode::from(2)
                }
                Error::DegenerateGeometry(_) | Error::InfeasibleGeometry(_) => ExitCode::from(3),
                Error::Io(_) => ExitCode::FAILURE,
            }
        }
    }
}
