//! Command-line pipeline: scan the parameter grid, measure selected points
//! with shot tomography (optionally under the calibration noise model),
//! check the occupation triples against the polytopes, and emit geometry
//! and noise-study data for plotting.
//!
//! Angles at this boundary are degrees. Exit codes: 0 success, 1 usage
//! error, 2 data error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gpcsim::circuits::Algorithm;
use gpcsim::noise::{
    noise_model_from_calibration, occupations_measured_noisy, shift_study, CalibrationTable,
    NoiseModel, NoiseOptions,
};
use gpcsim::polytope::{
    check_triple, monte_carlo_volume_ratio, violation_confidence, PolytopeSpec, MEASURED_TOL,
};
use gpcsim::qstate::{run_circuit, StateVector};
use gpcsim::records::{CountsDigest, ExperimentRecord, RecordsFile};
use gpcsim::sampler::{
    coverage_summary, grid_scan, read_points_csv_path, read_points_json_path,
    write_points_csv_path, write_points_json_path, ScanConfig, SelectedPoint,
};
use gpcsim::seed;
use gpcsim::tomography::{occupations_exact, occupations_measured};

#[derive(Parser)]
#[command(
    name = "gpcsim",
    version,
    about = "Occupation-polytope experiment pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the rotation-angle grid and select well-separated points.
    Scan(ScanArgs),
    /// Measure points with shot tomography and record constraint reports.
    Run(RunArgs),
    /// Summarize a records file against the polytope constraints.
    Check(CheckArgs),
    /// Emit polytope geometry or estimate the volume ratio.
    Polytope(PolytopeArgs),
    /// Study how the noise model displaces occupation triples.
    NoiseStudy(NoiseStudyArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    algorithm: AlgorithmArg,
    /// Grid step in degrees (mixing angle).
    #[arg(long)]
    step: Option<f64>,
    /// Minimum Euclidean occupation distance for inclusion.
    #[arg(long = "min-dist")]
    min_dist: Option<f64>,
    /// Grid range start in degrees.
    #[arg(long = "angle-min")]
    angle_min: Option<f64>,
    /// Grid range end in degrees.
    #[arg(long = "angle-max")]
    angle_max: Option<f64>,
    /// Subsample budget (six-parameter scan only).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// TOML file with the full scan configuration; excludes the per-field
    /// flags above.
    #[arg(long, conflicts_with_all = ["step", "min_dist", "angle_min", "angle_max", "budget", "seed"])]
    config: Option<PathBuf>,
    /// Output prefix; writes `<out>.csv` and `<out>.json`.
    #[arg(long, default_value = "points")]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum AlgorithmArg {
    Alg1,
    Alg2,
    Main,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Algorithm {
        match a {
            AlgorithmArg::Alg1 => Algorithm::Alg1,
            AlgorithmArg::Alg2 => Algorithm::Alg2,
            AlgorithmArg::Main => Algorithm::Main,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Points file from `scan` (.csv or .json).
    #[arg(long)]
    points: PathBuf,
    /// Shots per measurement setting.
    #[arg(long, default_value_t = 2048)]
    shots: u64,
    /// Calibration JSON path, or "builtin" for the shipped table. Omit for
    /// a noiseless run.
    #[arg(long)]
    noise: Option<String>,
    /// Keep only readout errors from the calibration.
    #[arg(long, default_value_t = false)]
    readout_only: bool,
    /// Enable T1/T2 damping per gate interval.
    #[arg(long, default_value_t = false)]
    with_damping: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Inside-polytope tolerance applied to measured triples.
    #[arg(long, default_value_t = MEASURED_TOL)]
    tol: f64,
    #[arg(long, default_value = "records.json")]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    records: PathBuf,
}

#[derive(Args)]
struct PolytopeArgs {
    #[arg(long, value_enum)]
    emit: EmitKind,
    /// Monte-Carlo sample count (volume mode).
    #[arg(long, default_value_t = 10_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Optional points file for a scatter overlay (mesh mode).
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum EmitKind {
    Mesh,
    Volume,
}

#[derive(Args)]
struct NoiseStudyArgs {
    #[arg(long)]
    points: PathBuf,
    /// Calibration JSON path or "builtin".
    #[arg(long, default_value = "builtin")]
    calibration: String,
    #[arg(long, default_value_t = 100)]
    trials: u32,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = false)]
    readout_only: bool,
    #[arg(long, default_value_t = false)]
    with_damping: bool,
    #[arg(long, default_value = "study.csv")]
    out: PathBuf,
}

/// Errors carrying the process exit code.
enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

fn data_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match cli.command {
        Command::Scan(args) => cmd_scan(args),
        Command::Run(args) => cmd_run(args),
        Command::Check(args) => cmd_check(args),
        Command::Polytope(args) => cmd_polytope(args),
        Command::NoiseStudy(args) => cmd_noise_study(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn cmd_scan(args: ScanArgs) -> Result<(), CliError> {
    let algorithm: Algorithm = args.algorithm.into();
    let config = if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(data_err)?;
        let config: ScanConfig = toml::from_str(&text).map_err(data_err)?;
        if config.algorithm != algorithm {
            return Err(CliError::Usage(format!(
                "--algorithm {} disagrees with the config file's {}",
                algorithm, config.algorithm
            )));
        }
        config
    } else {
        let defaults = ScanConfig::defaults(algorithm);
        ScanConfig {
            algorithm,
            angle_min_deg: args.angle_min.unwrap_or(defaults.angle_min_deg),
            angle_max_deg: args.angle_max.unwrap_or(defaults.angle_max_deg),
            step_deg: args.step.unwrap_or(defaults.step_deg),
            min_distance: args.min_dist.unwrap_or(defaults.min_distance),
            max_budget: args.budget.unwrap_or(defaults.max_budget),
            seed: args.seed.unwrap_or(defaults.seed),
        }
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let result = grid_scan(&config).map_err(data_err)?;
    let csv_path = args.out.with_extension("csv");
    let json_path = args.out.with_extension("json");
    write_points_csv_path(&result, &csv_path).map_err(data_err)?;
    write_points_json_path(&result, &json_path).map_err(data_err)?;

    let summary = coverage_summary(&result.selected);
    println!(
        "evaluated {} grid points, selected {}",
        result.evaluated, summary.n_selected
    );
    println!(
        "min pairwise distance {:.6} (threshold {}), min bd_slack {:.3e}, max n4 {:.6}",
        summary.min_pairwise_distance, config.min_distance, summary.min_bd_slack, summary.max_n4
    );
    for facet in &summary.facets {
        println!(
            "facet {:>16}: nearest point {:.3e}, within 1e-3: {:>2}, within 1e-6: {:>2}",
            facet.facet, facet.min_distance, facet.points_within_1e3, facet.points_within_1e6
        );
    }
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn read_points(path: &Path) -> Result<(Algorithm, Vec<SelectedPoint>), CliError> {
    let (algorithm, points) = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let scan = read_points_json_path(path).map_err(data_err)?;
            (scan.config.algorithm, scan.selected)
        }
        _ => read_points_csv_path(path).map_err(data_err)?,
    };
    for (index, point) in points.iter().enumerate() {
        if point.params_deg.len() != algorithm.n_params() {
            return Err(CliError::Data(format!(
                "point {index} has {} parameters, {algorithm} needs {}",
                point.params_deg.len(),
                algorithm.n_params()
            )));
        }
    }
    Ok((algorithm, points))
}

fn load_noise_model(
    source: &str,
    readout_only: bool,
    with_damping: bool,
) -> Result<NoiseModel, CliError> {
    let table = if source == "builtin" {
        CalibrationTable::builtin_ibmqx2()
    } else {
        CalibrationTable::from_json_path(Path::new(source)).map_err(data_err)?
    };
    let options = NoiseOptions {
        include_gate_noise: !readout_only,
        include_damping: with_damping,
        ..NoiseOptions::default()
    };
    noise_model_from_calibration(&table, &options).map_err(data_err)
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    if args.shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    let (algorithm, points) = read_points(&args.points)?;
    let model = args
        .noise
        .as_deref()
        .map(|source| load_noise_model(source, args.readout_only, args.with_damping))
        .transpose()?;
    let model_id = model.as_ref().map_or("none".to_string(), |m| m.id.clone());

    let mut records = Vec::with_capacity(points.len());
    for (index, point) in points.iter().enumerate() {
        let radians: Vec<f64> = point.params_deg.iter().map(|d| d.to_radians()).collect();
        let circuit = algorithm.build(&radians);
        let state = run_circuit(&circuit, &StateVector::zero(3)).map_err(data_err)?;
        let ideal = occupations_exact(&state).map_err(data_err)?;
        let point_seed = seed::derive(args.seed, "point", index as u64);
        let measured = match &model {
            None => occupations_measured(&state, args.shots, point_seed).map_err(data_err)?,
            Some(model) => occupations_measured_noisy(&circuit, model, args.shots, point_seed)
                .map_err(data_err)?,
        };
        let report = check_triple(&measured.occupations, args.tol);
        records.push(ExperimentRecord {
            point_id: index as u64,
            algorithm,
            params_deg: point.params_deg.clone(),
            shots: args.shots,
            seed: point_seed,
            noise_model: model_id.clone(),
            ideal,
            measured: measured.occupations,
            clamp_events: measured.clamp_events,
            report,
            counts_digests: [
                CountsDigest::of(&measured.counts[0]),
                CountsDigest::of(&measured.counts[1]),
                CountsDigest::of(&measured.counts[2]),
            ],
        });
    }
    let file = RecordsFile::new(args.shots, args.seed, model_id, args.tol, records);
    file.write_json_path(&args.out).map_err(data_err)?;
    let inside = file.records.iter().filter(|r| r.report.inside_gpc).count();
    println!(
        "measured {} points at {} shots/setting (noise: {}); {} inside the generalized polytope",
        file.records.len(),
        args.shots,
        file.noise_model,
        inside
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    let file = RecordsFile::read_json_path(&args.records).map_err(data_err)?;
    let total = file.records.len();
    let inside_gpc = file.records.iter().filter(|r| r.report.inside_gpc).count();
    let blue = file
        .records
        .iter()
        .filter(|r| r.report.inside_pauli && !r.report.inside_gpc)
        .count();
    let outside_pauli = total - inside_gpc - blue;
    let min_slack = file
        .records
        .iter()
        .map(|r| r.report.bd_slack)
        .fold(f64::INFINITY, f64::min);
    println!("records: {total} (tolerance {})", file.inside_tolerance);
    println!("inside generalized Pauli polytope: {inside_gpc}");
    println!("blue region (Pauli only): {blue}");
    println!("outside Pauli polytope: {outside_pauli}");
    if total > 0 {
        println!("min bd_slack: {min_slack:.6}");
    }
    let n = u32::try_from(inside_gpc).unwrap_or(u32::MAX);
    println!(
        "probability of {inside_gpc} unconstrained points all landing inside: 2^-{inside_gpc} = {:.3e}",
        violation_confidence(n)
    );
    for record in &file.records {
        if !record.report.inside_gpc {
            println!(
                "  flagged point {} {:?}: bd_slack {:.4}, inside_pauli {}",
                record.point_id,
                record.params_deg,
                record.report.bd_slack,
                record.report.inside_pauli
            );
        }
    }
    Ok(())
}

fn cmd_polytope(args: PolytopeArgs) -> Result<(), CliError> {
    match args.emit {
        EmitKind::Volume => {
            if args.samples < 10_000 {
                return Err(CliError::Usage(
                    "--samples must be at least 10000 for a meaningful estimate".into(),
                ));
            }
            let estimate = monte_carlo_volume_ratio(args.samples, args.seed);
            println!(
                "samples {}: Pauli/GPC volume ratio {:.4}",
                estimate.samples, estimate.ratio
            );
            println!(
                "Pauli volume {:.6} (exact 1/48 = {:.6}); GPC volume {:.6} (exact 1/96 = {:.6})",
                estimate.pauli_volume,
                1.0 / 48.0,
                estimate.gpc_volume,
                1.0 / 96.0
            );
        }
        EmitKind::Mesh => {
            std::fs::create_dir_all(&args.out_dir).map_err(data_err)?;
            for spec in [PolytopeSpec::pauli(), PolytopeSpec::gpc()] {
                let vertices = spec.vertices();
                let path = args.out_dir.join(format!("polytope_{}.json", spec.name));
                let payload = serde_json::json!({
                    "name": spec.name,
                    "halfspaces": spec.halfspaces,
                    "vertices": vertices,
                });
                std::fs::write(
                    &path,
                    serde_json::to_string_pretty(&payload).map_err(data_err)?,
                )
                .map_err(data_err)?;
                println!("wrote {} ({} vertices)", path.display(), vertices.len());
            }
            if let Some(points_path) = &args.points {
                let (_, points) = read_points(points_path)?;
                let path = args.out_dir.join("scatter_overlay.csv");
                let mut w = csv::Writer::from_path(&path).map_err(data_err)?;
                w.write_record(["n4", "n5", "n6", "bd_slack"])
                    .map_err(data_err)?;
                for p in &points {
                    w.write_record([
                        format!("{}", p.occupations.n4),
                        format!("{}", p.occupations.n5),
                        format!("{}", p.occupations.n6),
                        format!("{}", p.bd_slack),
                    ])
                    .map_err(data_err)?;
                }
                w.flush().map_err(data_err)?;
                println!("wrote {} ({} points)", path.display(), points.len());
            }
        }
    }
    Ok(())
}

fn cmd_noise_study(args: NoiseStudyArgs) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if args.shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    let (algorithm, points) = read_points(&args.points)?;
    let model = load_noise_model(&args.calibration, args.readout_only, args.with_damping)?;
    let params: Vec<Vec<f64>> = points.iter().map(|p| p.params_deg.clone()).collect();
    let reports = shift_study(
        algorithm,
        &params,
        &model,
        args.shots,
        args.trials,
        args.seed,
    )
    .map_err(data_err)?;

    let mut w = csv::Writer::from_path(&args.out).map_err(data_err)?;
    let n_params = algorithm.n_params();
    let mut header = vec!["point_id".to_string()];
    for k in 1..=n_params {
        header.push(format!("theta{k}"));
    }
    header.extend(
        [
            "ideal_n4",
            "ideal_n5",
            "ideal_n6",
            "mean_n4",
            "mean_n5",
            "mean_n6",
            "mean_distance",
            "ideal_bd_slack",
            "mean_bd_slack_change",
            "inward_fraction",
        ]
        .map(String::from),
    );
    w.write_record(&header).map_err(data_err)?;
    for (index, report) in reports.iter().enumerate() {
        let mut row = vec![index.to_string()];
        row.extend(report.params_deg.iter().map(|v| format!("{v}")));
        for v in [
            report.ideal.n4,
            report.ideal.n5,
            report.ideal.n6,
            report.mean_measured[0],
            report.mean_measured[1],
            report.mean_measured[2],
            report.mean_distance,
            report.ideal_bd_slack,
            report.mean_bd_slack_change,
            report.inward_fraction,
        ] {
            row.push(format!("{v}"));
        }
        w.write_record(&row).map_err(data_err)?;
    }
    w.flush().map_err(data_err)?;

    let inward_points = reports
        .iter()
        .filter(|r| r.mean_bd_slack_change > 0.0)
        .count();
    println!(
        "noise model: {} | {} points x {} trials x {} shots",
        model.id,
        reports.len(),
        args.trials,
        args.shots
    );
    println!(
        "points shifting inward on average: {}/{} ({:.2})",
        inward_points,
        reports.len(),
        inward_points as f64 / reports.len().max(1) as f64
    );
    println!("wrote {}", args.out.display());
    Ok(())
}
