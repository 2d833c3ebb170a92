//! `enaqt`: excitation transport in dissipative spin chains.
//!
//! Subcommands: `efficiency` (cross-checked transfer efficiency), `sweep`
//! (1-D parameter sweep to CSV), `phase` (extrema-count phase diagram to
//! CSV), `oracle` (full-Hilbert-space validation), and `preset <name>`
//! (figure reproductions). Exit code 2 flags configuration errors, 3
//! numerical failures.

mod config;
mod output;
mod presets;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use enaqt::analytic::{eta_two_site, TwoSiteParams};
use enaqt::dynamics::{efficiency_linear_solve, efficiency_time_integrated};
use enaqt::oracle::compare_restriction;
use enaqt::sweep::{phase_diagram, sweep_1d};
use enaqt::Error;

use config::Resolved;
use output::{curve_csv, overlay_csv, phase_csv, sig12, sweep_csv, write_with_manifest};
use presets::PresetJob;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec { .. }
            | Error::Precondition(_)
            | Error::SizeLimit { .. }
            | Error::RepresentationMismatch { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "enaqt",
    version,
    about = "Excitation transport in dissipative spin chains"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults describe the two-site preset
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (sweep/phase) or directory (preset)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for sweeps and phase diagrams (0 = automatic)
    #[arg(long)]
    workers: Option<usize>,
    /// Integration tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Transfer efficiency by linear solve, time integration, and (two-site)
    /// the closed form, with pairwise deviations
    Efficiency(Common),
    /// One-dimensional efficiency sweep written to CSV
    Sweep(Common),
    /// Extrema-count phase diagram over (2Γ+Λ, δ) written to CSV
    Phase(Common),
    /// Compare the restricted solver against the full-space master equation
    Oracle(Common),
    /// Run a named figure preset (fig1a..fig5d)
    Preset {
        /// Preset name, e.g. fig2
        name: String,
        #[command(flatten)]
        common: Common,
        /// Chain length override (fig2)
        #[arg(long)]
        n: Option<usize>,
        /// Linked hopping-to-dephasing ratio override (fig4, fig5c)
        #[arg(long)]
        xi: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_config(common: &Common) -> Result<Resolved, CliError> {
    let mut resolved = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
            Resolved::from_toml(&text)?
        }
        None => Resolved::default_config(),
    };
    if let Some(tol) = common.tol {
        resolved.run.tol = tol;
    }
    if let Some(workers) = common.workers {
        resolved.run.workers = workers;
    }
    if let Some(output) = &common.output {
        resolved.run.output = Some(output.display().to_string());
    }
    Ok(resolved)
}

/// Run `f` inside a rayon pool of the configured size (0 = default pool).
fn with_workers<T: Send>(
    workers: usize,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?
            .install(f)
    }
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Efficiency(common) => cmd_efficiency(&load_config(&common)?),
        Cmd::Sweep(common) => cmd_sweep(&load_config(&common)?),
        Cmd::Phase(common) => cmd_phase(&load_config(&common)?),
        Cmd::Oracle(common) => cmd_oracle(&load_config(&common)?),
        Cmd::Preset { name, common, n, xi } => {
            let config = load_config(&common)?;
            cmd_preset(&name, &config, n, xi)
        }
    }
}

fn cmd_efficiency(config: &Resolved) -> Result<(), CliError> {
    let spec = config.chain_spec();
    let eta_lin = efficiency_linear_solve(&spec)?;
    let ti = efficiency_time_integrated(&spec, config.run.tol)?;

    println!("eta_linear_solve    = {}", sig12(eta_lin));
    println!(
        "eta_time_integrated = {}   (chain emptied at t = {:.3e}/v; sink population {})",
        sig12(ti.eta),
        ti.t_end,
        sig12(ti.sink_population)
    );
    println!("|linear - time|     = {:.3e}", (eta_lin - ti.eta).abs());

    if spec.n_sites == 2 {
        let p = TwoSiteParams {
            v: spec.v,
            delta: spec.detuning(),
            gamma_diss: spec.gamma_diss,
            gamma_deph: spec.gamma_deph,
            gamma_hop: spec.gamma_hop,
            lambda_sink: spec.lambda_sink,
        };
        let eta_closed = eta_two_site(&p)?;
        println!("eta_closed_form     = {}", sig12(eta_closed));
        println!("|linear - closed|   = {:.3e}", (eta_lin - eta_closed).abs());
    }
    Ok(())
}

fn output_path(config: &Resolved, default_name: &str) -> PathBuf {
    PathBuf::from(
        config
            .run
            .output
            .clone()
            .unwrap_or_else(|| default_name.to_string()),
    )
}

fn cmd_sweep(config: &Resolved) -> Result<(), CliError> {
    let (param, grid, scale) = config.sweep_request()?;
    let spec = config.chain_spec();
    let table =
        with_workers(config.run.workers, || sweep_1d(&spec, param, &grid, scale).map_err(Into::into))?;
    let path = output_path(config, "sweep.csv");
    write_with_manifest(&path, &sweep_csv(&table), "sweep", config)?;
    println!(
        "wrote {} ({} points, {} extrema, {} failures)",
        path.display(),
        table.grid.len(),
        table.extrema.len(),
        table.failures.len()
    );
    Ok(())
}

fn cmd_phase(config: &Resolved) -> Result<(), CliError> {
    let (c_grid, delta_grid) = config.phase_grids()?;
    let pd = with_workers(config.run.workers, || {
        phase_diagram(&c_grid, &delta_grid).map_err(Into::into)
    })?;
    let path = output_path(config, "phase.csv");
    write_with_manifest(&path, &phase_csv(&pd), "phase", config)?;

    let mut overlay_path = path.as_os_str().to_owned();
    overlay_path.push(".overlay.csv");
    std::fs::write(Path::new(&overlay_path), overlay_csv(&pd))
        .map_err(|e| CliError::Io(e.to_string()))?;

    println!(
        "wrote {} ({}x{} cells) and overlay",
        path.display(),
        pd.c_grid.len(),
        pd.delta_grid.len()
    );
    Ok(())
}

/// Deviation threshold for the oracle verdict.
const ORACLE_THRESHOLD: f64 = 1e-8;

fn cmd_oracle(config: &Resolved) -> Result<(), CliError> {
    let spec = config.chain_spec();
    let t_grid: Vec<f64> = (1..=25).map(|i| i as f64).collect();
    let tol = config.run.tol.min(1e-9);
    let deviation = compare_restriction(&spec, &t_grid, tol)?;
    let verdict = deviation <= ORACLE_THRESHOLD;
    println!(
        "max population deviation (full space vs restricted) = {deviation:.3e}; threshold {ORACLE_THRESHOLD:.0e}: {}",
        if verdict { "pass" } else { "FAIL" }
    );
    if verdict {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "oracle deviation {deviation:.3e} exceeds {ORACLE_THRESHOLD:.0e}"
        )))
    }
}

fn cmd_preset(
    name: &str,
    config: &Resolved,
    n: Option<usize>,
    xi: Option<f64>,
) -> Result<(), CliError> {
    let jobs = presets::expand(name, n, xi)?;
    let out_dir = output_path(config, ".");
    with_workers(config.run.workers, || {
        for job in &jobs {
            match job {
                PresetJob::Sweep { stem, spec, param, grid, scale } => {
                    let table = sweep_1d(spec, *param, grid, *scale)?;
                    let mut echo = config.clone();
                    echo.chain.n_sites = spec.n_sites;
                    echo.chain.edges = spec.edges.iter().map(|&(a, b)| [a, b]).collect();
                    echo.chain.site_energies = spec.site_energies.clone();
                    echo.rates.gamma_diss = spec.gamma_diss;
                    echo.rates.gamma_deph = spec.gamma_deph;
                    echo.rates.gamma_hop = spec.gamma_hop;
                    echo.rates.lambda_sink = spec.lambda_sink;
                    let path = out_dir.join(format!("{stem}.csv"));
                    write_with_manifest(&path, &sweep_csv(&table), &format!("preset {name}"), &echo)?;
                    println!("wrote {}", path.display());
                }
                PresetJob::Curve { stem, value_name, rows } => {
                    let path = out_dir.join(format!("{stem}.csv"));
                    write_with_manifest(&path, &curve_csv(rows, value_name), &format!("preset {name}"), config)?;
                    println!("wrote {}", path.display());
                }
                PresetJob::Phase { stem, c_grid, delta_grid } => {
                    let pd = phase_diagram(c_grid, delta_grid)?;
                    let path = out_dir.join(format!("{stem}.csv"));
                    write_with_manifest(&path, &phase_csv(&pd), &format!("preset {name}"), config)?;
                    let mut overlay_path = path.as_os_str().to_owned();
                    overlay_path.push(".overlay.csv");
                    std::fs::write(Path::new(&overlay_path), overlay_csv(&pd))
                        .map_err(|e| CliError::Io(e.to_string()))?;
                    println!("wrote {} and overlay", path.display());
                }
            }
        }
        Ok(())
    })
}
