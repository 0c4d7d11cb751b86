//! Command-line front end: solve problem specs, verify stationary points,
//! run per-ordering uniqueness experiments, simulate trajectories, and list
//! mass orderings.
//!
//! Exit codes:
//! - 0: success (per-command semantics below)
//! - 1: malformed or inadmissible problem spec
//! - 2: solve did not converge to a local maximum / verify failed /
//!      a uniqueness ordering reported multiple classes
//! - 3: central-mass feasibility margin not positive
//! - 4: collision truncated a simulation
//! - 5: simulated orbit deviates from rigid rotation beyond tolerance

mod files;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use cocircular::{
    central_mass_equilibrium_state, curved_equilibrium_state, enumerate_orderings,
    initial_config_for_start, integrate_curved, integrate_planar, lift, origin_deviation,
    planar_rotation_deviation, curved_rotation_deviation, relative_equilibrium_state, residuals,
    solve_stationary, uniqueness_experiment, verify_local_max, write_curved_csv, write_planar_csv,
    CircularConfig, ProblemSpec, SolveOptions, UniquenessVerdict, Variant,
};

use files::{
    tool_version, write_report, ProblemSpecFile, SolveReportFile, UniquenessReportFile,
};

#[derive(Parser)]
#[command(name = "cocircular", version, about = "Co-circular relative equilibria: solve, certify, simulate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem spec to a stationary configuration and write a report.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        /// Report path; defaults to the problem path with extension `report.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gradient-norm convergence tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Check that the spec's configuration is a certified local maximum.
    Verify {
        #[arg(long)]
        problem: PathBuf,
        /// Stationarity tolerance on the gauge-fixed gradient norm.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Multi-start uniqueness experiment per mass ordering.
    Uniqueness {
        #[arg(long)]
        problem: PathBuf,
        /// `all`, or the index of a single ordering.
        #[arg(long, default_value = "all")]
        orderings: String,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Integrate the equations of motion and compare with rigid rotation.
    Simulate {
        #[arg(long)]
        problem: PathBuf,
        /// Integration horizon; defaults to `periods` full rotations.
        #[arg(long)]
        tmax: Option<f64>,
        /// Step size; defaults to 1e-4 of a rotation period.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        periods: f64,
        /// Trajectory CSV path; defaults to extension `trajectory.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Maximum accepted deviation from the analytic orbit.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the distinct cyclic mass orderings of the spec.
    Orderings {
        #[arg(long)]
        problem: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve {
            problem,
            out,
            seed,
            tol,
            max_iter,
        } => cmd_solve(&problem, out, seed, tol, max_iter),
        Command::Verify { problem, tol, seed } => cmd_verify(&problem, tol, seed),
        Command::Uniqueness {
            problem,
            orderings,
            starts,
            seed,
            out,
            tol,
        } => cmd_uniqueness(&problem, &orderings, starts, seed, out, tol),
        Command::Simulate {
            problem,
            tmax,
            dt,
            periods,
            out,
            tol,
            seed,
        } => cmd_simulate(&problem, tmax, dt, periods, out, tol, seed),
        Command::Orderings { problem } => cmd_orderings(&problem),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn default_out(problem: &Path, extension: &str) -> PathBuf {
    problem.with_extension(extension)
}

fn load(problem: &Path) -> Result<(ProblemSpecFile, ProblemSpec)> {
    let file = ProblemSpecFile::load(problem)?;
    let spec = file.to_problem()?;
    Ok((file, spec))
}

fn starting_config(
    file: &ProblemSpecFile,
    spec: &ProblemSpec,
    opts: &SolveOptions,
) -> Result<CircularConfig> {
    match file.initial_config()? {
        Some(config) => Ok(config),
        None => Ok(initial_config_for_start(spec, opts, 0)?),
    }
}

fn cmd_solve(
    problem: &Path,
    out: Option<PathBuf>,
    seed: u64,
    tol: f64,
    max_iter: usize,
) -> Result<u8> {
    let (file, spec) = load(problem)?;
    let opts = SolveOptions {
        tol_grad: tol,
        max_iter,
        seed,
        ..SolveOptions::default()
    };
    let init = starting_config(&file, &spec, &opts)?;
    let initial_margin = match (spec.variant(), file.initial.is_some()) {
        (Variant::CentralMass, true) => Some(cocircular::feasibility_margin(&spec, &init)?),
        _ => None,
    };
    let report = solve_stationary(&spec, &init, &opts)?;
    let curved_config = match spec.variant() {
        Variant::Curved => Some(lift(&report.config, spec.spin())?),
        _ => None,
    };

    let out_path = out.unwrap_or_else(|| default_out(problem, "report.json"));
    let doc = SolveReportFile {
        tool_version: tool_version(),
        seed,
        spec: file,
        stationary: report.clone(),
        initial_feasibility_margin: initial_margin,
        curved_config,
    };
    write_report(&out_path, &doc)?;

    println!(
        "solve: converged={} local_max={} r={:.12e} grad_norm={:.3e} iterations={}",
        report.converged,
        report.is_local_max,
        report.config.radius(),
        report.grad_norm,
        report.iterations
    );
    println!(
        "residuals: radial={:.3e} tangential={:.3e}",
        report.residual_radial_norm, report.residual_tangential_norm
    );
    if let Some(margin) = report.feasibility_margin {
        println!("feasibility margin: {margin:.12e}");
    }
    if let Some(margin) = initial_margin {
        println!("feasibility margin at provided configuration: {margin:.12e}");
    }
    println!("report: {}", out_path.display());

    let infeasible = initial_margin.is_some_and(|m| m <= 0.0)
        || report.feasibility_margin.is_some_and(|m| m <= 0.0);
    if infeasible {
        return Ok(3);
    }
    if !report.converged {
        return Ok(2);
    }
    Ok(if report.is_local_max { 0 } else { 2 })
}

fn cmd_verify(problem: &Path, tol: f64, seed: u64) -> Result<u8> {
    let (file, spec) = load(problem)?;
    let opts = SolveOptions {
        seed,
        ..SolveOptions::default()
    };
    let config = match file.initial_config()? {
        Some(config) => config,
        None => {
            let report = solve_stationary(&spec, &starting_config(&file, &spec, &opts)?, &opts)?;
            report.config
        }
    };
    let res = residuals(&spec, &config)?;
    match verify_local_max(&spec, &config, tol) {
        Ok(cert) => {
            println!(
                "verify: local_max={} spectrum=[{:.6e}, {:.6e}] null_count={} null_alignment={:.3e}",
                cert.is_local_max,
                cert.gauge_spectrum.first().unwrap_or(&f64::NAN),
                cert.gauge_spectrum.last().unwrap_or(&f64::NAN),
                cert.null_count,
                cert.null_alignment
            );
            println!(
                "residuals: radial={:.3e} tangential={:.3e}",
                res.radial.iter().fold(0.0f64, |a, v| a.max(v.abs())),
                res.tangential.iter().fold(0.0f64, |a, v| a.max(v.abs()))
            );
            Ok(if cert.is_local_max && cert.null_count == 1 {
                0
            } else {
                2
            })
        }
        Err(cocircular::Error::NotStationary { grad_norm, tol }) => {
            println!("verify: not stationary (grad_norm={grad_norm:.3e} > {tol:.1e})");
            Ok(2)
        }
        Err(err) => Err(err.into()),
    }
}

fn cmd_uniqueness(
    problem: &Path,
    orderings: &str,
    starts: usize,
    seed: u64,
    out: Option<PathBuf>,
    tol: f64,
) -> Result<u8> {
    let (file, spec) = load(problem)?;
    let all = enumerate_orderings(spec.masses());
    let selected: Vec<_> = if orderings == "all" {
        all
    } else {
        let index: usize = orderings
            .parse()
            .map_err(|_| anyhow!("--orderings expects `all` or an index, got `{orderings}`"))?;
        let count = all.len();
        vec![all
            .into_iter()
            .nth(index)
            .ok_or_else(|| anyhow!("ordering index {index} out of range ({count} orderings)"))?]
    };

    let opts = SolveOptions {
        starts,
        seed,
        tol_grad: tol,
        ..SolveOptions::default()
    };
    let mut reports = Vec::with_capacity(selected.len());
    for ordering in &selected {
        reports.push(uniqueness_experiment(&spec, ordering, &opts)?);
    }

    let out_path = out.unwrap_or_else(|| default_out(problem, "uniqueness.json"));
    let doc = UniquenessReportFile {
        tool_version: tool_version(),
        seed,
        starts,
        spec: file,
        orderings: reports.clone(),
    };
    write_report(&out_path, &doc)?;

    let mut any_multiple = false;
    for report in &reports {
        let converged = report.per_start.iter().filter(|s| s.converged).count();
        println!(
            "ordering {:?} -> verdict={:?} classes={} converged={}/{}{}",
            report.ordering_values,
            report.verdict,
            report.classes.len(),
            converged,
            report.per_start.len(),
            if report.single_start_caveat {
                " (single-start caveat)"
            } else {
                ""
            }
        );
        any_multiple |= report.verdict == UniquenessVerdict::Multiple;
    }
    println!("report: {}", out_path.display());
    Ok(if any_multiple { 2 } else { 0 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    problem: &Path,
    tmax: Option<f64>,
    dt: Option<f64>,
    periods: f64,
    out: Option<PathBuf>,
    tol: f64,
    seed: u64,
) -> Result<u8> {
    let (file, spec) = load(problem)?;
    let opts = SolveOptions {
        seed,
        ..SolveOptions::default()
    };
    let config = match file.initial_config()? {
        Some(config) => config,
        None => solve_stationary(&spec, &starting_config(&file, &spec, &opts)?, &opts)?.config,
    };
    let period = std::f64::consts::TAU / spec.spin();
    let t_max = tmax.unwrap_or(periods * period);
    let step = dt.unwrap_or(1e-4 * period);
    let out_path = out.unwrap_or_else(|| default_out(problem, "trajectory.csv"));

    let (deviation, truncated) = match spec.variant() {
        Variant::Curved => {
            let curved = lift(&config, spec.spin())?;
            let initial = curved_equilibrium_state(&curved)?;
            let traj = integrate_curved(&initial, t_max, step)?;
            let mut writer = std::io::BufWriter::new(
                std::fs::File::create(&out_path)
                    .with_context(|| format!("cannot write {}", out_path.display()))?,
            );
            write_curved_csv(&traj, &mut writer)?;
            let (deviation, z_drift) = curved_rotation_deviation(&traj, &curved)?;
            let constraint = traj.constraint_drift.iter().cloned().fold(0.0, f64::max);
            let tangency = traj.tangency_drift.iter().cloned().fold(0.0, f64::max);
            println!(
                "drift: constraint={constraint:.3e} tangency={tangency:.3e} height={z_drift:.3e}"
            );
            (deviation, traj.truncated_at)
        }
        Variant::CentralMass => {
            let initial = central_mass_equilibrium_state(&config, spec.spin())?;
            let traj = integrate_planar(&initial, spec.kernel(), t_max, step)?;
            let mut writer = std::io::BufWriter::new(
                std::fs::File::create(&out_path)
                    .with_context(|| format!("cannot write {}", out_path.display()))?,
            );
            write_planar_csv(&traj, &mut writer)?;
            let ring = planar_rotation_deviation(&traj, &config, spec.spin())?;
            let center = origin_deviation(&traj, config.n());
            let com = traj.com_drift.iter().cloned().fold(0.0, f64::max);
            println!("drift: center_of_mass={com:.3e} central_body={center:.3e}");
            (ring.max(center), traj.truncated_at)
        }
        Variant::Plain => {
            let initial = relative_equilibrium_state(&config, spec.spin())?;
            let traj = integrate_planar(&initial, spec.kernel(), t_max, step)?;
            let mut writer = std::io::BufWriter::new(
                std::fs::File::create(&out_path)
                    .with_context(|| format!("cannot write {}", out_path.display()))?,
            );
            write_planar_csv(&traj, &mut writer)?;
            let deviation = planar_rotation_deviation(&traj, &config, spec.spin())?;
            let com = traj.com_drift.iter().cloned().fold(0.0, f64::max);
            println!("drift: center_of_mass={com:.3e}");
            (deviation, traj.truncated_at)
        }
    };

    println!("trajectory: {}", out_path.display());
    if let Some(t) = truncated {
        println!("collision: truncated at t={t:.6e}");
        return Ok(4);
    }
    println!("orbit residual: {deviation:.6e} (tolerance {tol:.1e})");
    Ok(if deviation <= tol { 0 } else { 5 })
}

fn cmd_orderings(problem: &Path) -> Result<u8> {
    let (_, spec) = load(problem)?;
    let orderings = enumerate_orderings(spec.masses());
    println!("{} distinct cyclic orderings", orderings.len());
    for (k, ordering) in orderings.iter().enumerate() {
        println!(
            "{k}: perm={:?} values={:?}",
            ordering.perm(),
            ordering.values(spec.masses())
        );
    }
    Ok(0)
}
