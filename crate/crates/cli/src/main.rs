mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use ngopt_core::control::invariant_control_params;
use ngopt_core::fock::{FockOptions, DEFAULT_TAIL_TOL};
use ngopt_core::metrics::{xi_gkp, GKP_CONVENTION};
use ngopt_core::optimizer::{optimize, OptimizeOptions};
use ngopt_core::scenario::gkp_breeding_generator;
use ngopt_core::NgError;

use config::{RandomShape, RunParams, Scenario, Target};
use output::SweepPoint;

#[derive(Parser)]
#[command(
    name = "ngopt",
    version,
    about = "Optimize heralded non-Gaussian state generators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one scenario and write report.json, tables.csv, Wigner grids and params.json.
    Run(RunArgs),
    /// Run the acceptance checks and print one line per criterion.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    #[arg(value_enum)]
    scenario: Scenario,
    /// Reduced photon pattern: `N[,N..]`, `auto` (halve all) or `regime` (halve subtracted modes).
    #[arg(long)]
    target: Option<Target>,
    /// Initial signal cutoff of Fock computations.
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "ngopt-out")]
    out: PathBuf,
    /// Worker threads for restarts and sweep points.
    #[arg(long)]
    jobs: Option<usize>,
    /// GKP only: tabulate the lattice metric against the invariant s0 instead of optimizing.
    #[arg(long)]
    sweep_s0: bool,
    /// JSON generator description for the custom scenario.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Random scenario: signal modes.
    #[arg(long, default_value_t = 1)]
    signal_modes: usize,
    /// Random scenario: control modes.
    #[arg(long, default_value_t = 2)]
    control_modes: usize,
    /// Random scenario: photons detected per control mode.
    #[arg(long, default_value_t = 6)]
    photons: usize,
    /// Skip the squeezing metrics and Wigner grids.
    #[arg(long)]
    no_metrics: bool,
}

fn tail_tol() -> anyhow::Result<f64> {
    match std::env::var("NGOPT_TAIL_TOL") {
        Ok(s) => s
            .parse()
            .with_context(|| format!("NGOPT_TAIL_TOL={s:?} is not a number")),
        Err(_) => Ok(DEFAULT_TAIL_TOL),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<NgError>() {
            if matches!(e, NgError::Infeasible(_)) {
                return 2;
            }
        }
        if cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<csv::Error>().is_some()
        {
            return 3;
        }
    }
    1
}

fn sweep(fock: &FockOptions) -> anyhow::Result<Vec<SweepPoint>> {
    let reflectances: Vec<f64> = (0..12).map(|i| 0.03 + 0.04 * i as f64).collect();
    let cases: Vec<(usize, f64)> = [2usize, 4, 6]
        .iter()
        .flat_map(|&n| reflectances.iter().map(move |&r| (n, r)))
        .collect();
    cases
        .par_iter()
        .map(|&(n, reflectance)| {
            let spec = gkp_breeding_generator(8.0, reflectance, 3, n)?;
            let s0 = invariant_control_params(&spec.moments(), 0)?.0;
            let h = spec.herald(fock)?;
            let v = h.signal.to_vector()?;
            Ok(SweepPoint {
                n,
                reflectance,
                s0_invariant: s0,
                probability: h.probability,
                xi_gkp: xi_gkp(&v, GKP_CONVENTION).value,
            })
        })
        .collect()
}

fn run(args: &RunArgs) -> anyhow::Result<()> {
    if let Some(j) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()?;
    }
    let fock = FockOptions {
        cutoff: args.cutoff,
        tail_tol: tail_tol()?,
        ..FockOptions::default()
    };
    let shape = RandomShape {
        signal_modes: args.signal_modes,
        control_modes: args.control_modes,
        photons: args.photons,
        ..RandomShape::default()
    };
    let (spec, default_target, circuit, notes) =
        config::build(args.scenario, args.seed, &shape, args.input.as_deref())?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let out = |name: &str| args.out.join(name);
    let mut params = RunParams {
        scenario: args.scenario,
        target: args.target.clone(),
        resolved_target: vec![],
        photons: spec.photons.clone(),
        cutoff: args.cutoff,
        tail_tol: fock.tail_tol,
        seed: args.seed,
        jobs: args.jobs,
        gkp_convention: GKP_CONVENTION,
        circuit,
        input: args.input.clone(),
        notes,
    };

    if args.sweep_s0 {
        if args.scenario != Scenario::Gkp {
            anyhow::bail!("--sweep-s0 applies to the gkp scenario only");
        }
        output::write_json(&out("params.json"), &params)?;
        let points = sweep(&fock)?;
        output::write_sweep(&out("sweep_s0.csv"), &points)?;
        println!(
            "wrote {} sweep points to {}",
            points.len(),
            out("sweep_s0.csv").display()
        );
        return Ok(());
    }

    let target = args
        .target
        .clone()
        .unwrap_or(default_target)
        .resolve(&spec)?;
    params.resolved_target = target.clone();
    output::write_json(&out("params.json"), &params)?;
    let opts = OptimizeOptions {
        fock,
        seed: args.seed,
        metrics: !args.no_metrics,
        ..OptimizeOptions::default()
    };
    let report = optimize(&spec, &target, &opts)?;
    output::write_json(&out("report.json"), &report)?;
    output::write_tables(&out("tables.csv"), &report, &fock, !args.no_metrics)?;
    if !args.no_metrics {
        if let Some(v) = output::signal_vector(&report.before, &fock) {
            output::write_wigner(&out("wigner_before.csv"), &v)?;
        }
        if let Some(v) = output::signal_vector(&report.after, &fock) {
            output::write_wigner(&out("wigner_after.csv"), &v)?;
        }
    }
    println!(
        "{:?} {:?} -> {:?}: p {:.4e} -> {:.4e} -> {:.4e}, fidelity {:.5}",
        args.scenario,
        report.before.photons,
        report.after.photons,
        report.probability_before,
        report.probability_intermediate,
        report.probability_after,
        report.fidelity
    );
    println!("outputs in {}", display(&args.out));
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn verify() -> bool {
    let mut ok = true;
    for r in ngopt_core::acceptance::run_all() {
        println!("{r}");
        ok &= r.passed;
    }
    ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(exit_code(&e))
            }
        },
        Command::Verify => {
            if verify() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let e = anyhow::Error::new(NgError::Infeasible("mode 0".into())).context("optimizing");
        assert_eq!(exit_code(&e), 2);
        let e = anyhow::Error::new(std::io::Error::other("disk")).context("writing");
        assert_eq!(exit_code(&e), 3);
        assert_eq!(exit_code(&anyhow::anyhow!("bad input")), 1);
    }
}
