//! Command-line front end: `run`, `compare`, `oracle`, and `tune-pd`.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wecsim::config;
use wecsim::export;
use wecsim::oracle;
use wecsim::tune;
use wecsim::CliError;
use wecsim_core::sim::{run_scenario, ControllerKind, RunRecord, Scenario};

#[derive(Parser)]
#[command(
    name = "wecsim",
    version,
    about = "Simulator for an isolated wind-energy conversion system: \
             induction generator, dump-load frequency regulation, and two \
             controller structures (PD and adaptive neuro-fuzzy)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its summary (optionally export CSV)
    Run(RunArgs),
    /// Run the PD and adaptive controllers on identical wind and compare
    Compare(CompareArgs),
    /// Run the self-check oracle suites (exit 3 if any fails)
    Oracle,
    /// Grid-search PD gains minimizing max |Δf| on the SC1 scenario
    TunePd(TuneArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in preset: sc1 (PD controller) or sc2 (adaptive controller)
    #[arg(long, default_value = "sc1")]
    preset: String,
    /// Config file with `key = value` overrides applied on the preset
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wind seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Integration step override (s)
    #[arg(long)]
    dt: Option<f64>,
    /// CSV output path; the resolved config is echoed to `<out>.config`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record one sample every N integration steps
    #[arg(long)]
    sample_every: Option<usize>,
    /// Print the fully resolved configuration and exit without running
    #[arg(long)]
    print_preset: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Config file applied to both runs (controller selection is forced
    /// per run: PD vs adaptive)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wind seed shared by both runs
    #[arg(long)]
    seed: Option<u64>,
    /// Integration step override (s)
    #[arg(long)]
    dt: Option<f64>,
    /// Record one sample every N integration steps
    #[arg(long)]
    sample_every: Option<usize>,
}

#[derive(Args)]
struct TuneArgs {
    /// Number of wind seeds averaged per gain pair (seeds 1..=N)
    #[arg(long, default_value_t = 3)]
    seeds: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Oracle => cmd_oracle(),
        Command::TunePd(args) => cmd_tune(args),
    }
}

fn read_config_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn build_scenario(
    preset: &str,
    config_path: Option<&Path>,
    seed: Option<u64>,
    dt: Option<f64>,
    sample_every: Option<usize>,
) -> Result<Scenario, CliError> {
    let mut sc = config::preset(preset).ok_or_else(|| CliError::Validation {
        line: None,
        message: format!("unknown preset {preset:?} (expected sc1 or sc2)"),
    })?;
    if let Some(path) = config_path {
        let text = read_config_file(path)?;
        config::apply_config(&mut sc, &text)?;
    }
    if let Some(seed) = seed {
        sc.wind.seed = seed;
    }
    if let Some(dt) = dt {
        sc.dt = dt;
    }
    if let Some(n) = sample_every {
        sc.sample_every = n;
    }
    sc.prepared().map_err(CliError::from_core)
}

fn print_summary(sc: &Scenario, rec: &RunRecord) {
    let controller = match sc.controller {
        ControllerKind::Pd => "pd",
        ControllerKind::Anfis => "anfis",
    };
    println!(
        "scenario {} (controller {controller}, seed {}, dt {} s, {} samples)",
        sc.name,
        sc.wind.seed,
        sc.dt,
        rec.len()
    );
    println!("  f_max_dev_hz        {:.6}", rec.summary.f_max_dev_hz);
    println!("  f_rms_dev_hz        {:.6}", rec.summary.f_rms_dev_hz);
    println!("  speed_mean_pu       {:.6}", rec.summary.speed_mean_pu);
    println!(
        "  energy_residual_pct {:.6}",
        rec.summary.energy_residual_pct
    );
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let sc = build_scenario(
        &args.preset,
        args.config.as_deref(),
        args.seed,
        args.dt,
        args.sample_every,
    )?;
    if args.print_preset {
        print!("{}", config::resolved_text(&sc));
        return Ok(());
    }
    let rec = run_scenario(&sc).map_err(CliError::from_core)?;
    print_summary(&sc, &rec);
    if let Some(out) = &args.out {
        export::export_csv(&rec, out)?;
        export::write_text(&export::sidecar_path(out), &config::resolved_text(&sc))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let build = |preset: &str, kind: ControllerKind| -> Result<Scenario, CliError> {
        let mut sc = build_scenario(
            preset,
            args.config.as_deref(),
            args.seed,
            args.dt,
            args.sample_every,
        )?;
        sc.controller = kind;
        sc.prepared().map_err(CliError::from_core)
    };
    let sc_pd = build("sc1", ControllerKind::Pd)?;
    let mut sc_anfis = build("sc2", ControllerKind::Anfis)?;
    // Identical wind for a like-for-like comparison.
    sc_anfis.wind = sc_pd.wind;

    let parallel = wecsim::thread_cap()?.is_none_or(|cap| cap >= 2);
    let (rec_pd, rec_anfis) = if parallel {
        std::thread::scope(|scope| {
            let handle = scope.spawn(|| run_scenario(&sc_anfis));
            let pd = run_scenario(&sc_pd);
            let anfis = handle.join().expect("scenario thread panicked");
            (pd, anfis)
        })
    } else {
        (run_scenario(&sc_pd), run_scenario(&sc_anfis))
    };
    let rec_pd = rec_pd.map_err(CliError::from_core)?;
    let rec_anfis = rec_anfis.map_err(CliError::from_core)?;

    println!(
        "comparison on seed {} ({} samples each)",
        sc_pd.wind.seed,
        rec_pd.len()
    );
    println!("{:<22}{:>14}{:>14}", "metric", "pd", "anfis");
    let rows = [
        (
            "f_max_dev_hz",
            rec_pd.summary.f_max_dev_hz,
            rec_anfis.summary.f_max_dev_hz,
        ),
        (
            "f_rms_dev_hz",
            rec_pd.summary.f_rms_dev_hz,
            rec_anfis.summary.f_rms_dev_hz,
        ),
        (
            "speed_mean_pu",
            rec_pd.summary.speed_mean_pu,
            rec_anfis.summary.speed_mean_pu,
        ),
        (
            "energy_residual_pct",
            rec_pd.summary.energy_residual_pct,
            rec_anfis.summary.energy_residual_pct,
        ),
    ];
    for (name, a, b) in rows {
        println!("{name:<22}{a:>14.6}{b:>14.6}");
    }
    Ok(())
}

fn cmd_oracle() -> Result<(), CliError> {
    let reports = oracle::run_all();
    let mut failed = Vec::new();
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("suite {}: {status} — {}", r.name, r.detail);
        if !r.passed {
            failed.push(r.name.to_string());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::OracleFailure { failed })
    }
}

fn cmd_tune(args: TuneArgs) -> Result<(), CliError> {
    if args.seeds == 0 {
        return Err(CliError::Validation {
            line: None,
            message: "tune-pd: --seeds must be >= 1".to_string(),
        });
    }
    let seeds: Vec<u64> = (1..=args.seeds).collect();
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let threads = wecsim::thread_cap()?.map_or(available, |cap| cap.min(available));
    let result = tune::tune_pd(&seeds, threads)?;
    println!(
        "PD gain grid on sc1, mean max |Δf| over seeds 1..={} (Hz):",
        args.seeds
    );
    println!("{:>12}{:>12}{:>16}", "kp", "kd", "mean_max_dev");
    for p in &result.grid {
        println!("{:>12}{:>12}{:>16.6}", p.k_p, p.k_d, p.mean_max_dev_hz);
    }
    println!(
        "best: pd.kp = {}, pd.kd = {} (mean max |Δf| {:.6} Hz)",
        result.best.k_p, result.best.k_d, result.best.mean_max_dev_hz
    );
    Ok(())
}
