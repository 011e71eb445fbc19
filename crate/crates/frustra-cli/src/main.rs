use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use frustra::io::{
    exponent_lines, write_configurations_csv, write_exponents_csv, write_json, write_rows_csv, Format,
};
use frustra::model::{critical_point, origin_hessian_eigenvalues};
use frustra::scaling::{extract_exponents, run_sweep, Observable, Row, SweepSpec};
use frustra::solver::{enumerate_degenerate_ground_states, solve_ground_state};
use frustra::spectra::{build_quadratic_hamiltonian, mode_weights, williamson_diagonalize, ModeWeights};
use frustra::{Error, MeanFieldConfiguration, Phase, Result, SolverOptions};
use serde::Serialize;

mod config;

use config::{RunConfig, Settings};

/// Mean-field ground states, excitation spectra and critical exponents of a
/// ring of coupled Dicke cavities.
#[derive(Debug, Parser)]
#[command(name = "frustra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical coupling and the origin-Hessian eigenvalues per momentum
    CriticalPoint(Invocation),
    /// Mean-field ground state at one coupling
    GroundState(Invocation),
    /// Normal-mode energies and weights at one coupling
    Spectrum(Invocation),
    /// Observables on a log grid on both sides of the critical coupling
    Sweep(Invocation),
    /// Fitted critical exponents
    Exponents(Invocation),
}

#[derive(Debug, clap::Args)]
struct Invocation {
    /// TOML file with the same keys as the flags; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    CriticalPoint,
    GroundState,
    Spectrum,
    Sweep,
    Exponents,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::CriticalPoint => "critical-point",
            Kind::GroundState => "ground-state",
            Kind::Spectrum => "spectrum",
            Kind::Sweep => "sweep",
            Kind::Exponents => "exponents",
        }
    }
}

impl Command {
    fn split(self) -> (Kind, Invocation) {
        match self {
            Command::CriticalPoint(i) => (Kind::CriticalPoint, i),
            Command::GroundState(i) => (Kind::GroundState, i),
            Command::Spectrum(i) => (Kind::Spectrum, i),
            Command::Sweep(i) => (Kind::Sweep, i),
            Command::Exponents(i) => (Kind::Exponents, i),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Domain(_) | Error::Phase(_) | Error::OutOfRange { .. } => 2,
        Error::Convergence { .. } | Error::Instability(_) | Error::Contract(_) => 3,
        Error::FitQuality { .. } => 4,
        Error::Io(_) => 1,
    }
}

/// Caps the rayon pool from FRUSTRA_THREADS.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("FRUSTRA_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Validation(format!("FRUSTRA_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Validation(e.to_string()))
}

fn open_output(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Long-format rows in either format.
fn emit_rows(cfg: &RunConfig, rows: &[Row], warnings: &[String]) -> Result<()> {
    let mut out = open_output(cfg)?;
    match Format::from(cfg.format) {
        Format::Csv => {
            warnings.iter().for_each(|w| eprintln!("warning: {w}"));
            write_rows_csv(rows, &mut out)?;
        }
        Format::Json => write_json(cfg, rows, warnings, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn row(g: f64, reduced_coupling: f64, observable: impl Into<String>, index: usize, value: f64) -> Row {
    Row { g, reduced_coupling, observable: observable.into(), index, value }
}

fn critical_point_cmd(cfg: &RunConfig) -> Result<()> {
    let gc = critical_point(cfg.jbar, cfg.sites, cfg.sign.into())?;
    let g = cfg.g.unwrap_or(gc);
    let reduced = (g - gc).abs() / gc;
    let mut rows = vec![row(g, reduced, "critical_coupling", 0, gc)];
    for (t, v) in origin_hessian_eigenvalues(g, cfg.jbar, cfg.sites).into_iter().enumerate() {
        // index is the momentum label t + 1, k = 2πt/N
        rows.push(row(g, reduced, "origin_hessian_eigenvalue", t + 1, v));
    }
    emit_rows(cfg, &rows, &[])
}

#[derive(Serialize)]
struct GroundStateRecord<'a> {
    solution: usize,
    phase: Phase,
    degeneracy: usize,
    energy: f64,
    alphas: &'a [f64],
    thetas: &'a [f64],
    phis: &'a [f64],
    jx: Vec<f64>,
}

fn ground_state_cmd(cfg: &RunConfig) -> Result<()> {
    let params = cfg.params_at(cfg.required_g()?)?;
    let opts = SolverOptions { seed_mode: cfg.seed_mode.into(), ..Default::default() };
    let sol = solve_ground_state(&params, &opts)?;
    let configs: Vec<MeanFieldConfiguration> = if cfg.manifold {
        enumerate_degenerate_ground_states(&params, &opts)?
    } else {
        vec![sol.config.clone()]
    };
    let mut out = open_output(cfg)?;
    match Format::from(cfg.format) {
        Format::Csv => {
            sol.warnings.iter().for_each(|w| eprintln!("warning: {w}"));
            write_configurations_csv(&configs, &mut out)?;
        }
        Format::Json => {
            let records: Vec<GroundStateRecord> = configs
                .iter()
                .enumerate()
                .map(|(i, c)| GroundStateRecord {
                    solution: i + 1,
                    phase: sol.phase,
                    degeneracy: sol.degeneracy,
                    energy: c.energy,
                    alphas: &c.alphas,
                    thetas: &c.thetas,
                    phis: &c.phis,
                    jx: c.transverse_spin(),
                })
                .collect();
            write_json(cfg, &records, &sol.warnings, &mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SpectrumRecord {
    g: f64,
    phase: Phase,
    energies: Vec<f64>,
    modes: Vec<ModeWeights>,
    critical_regime: bool,
}

fn spectrum_cmd(cfg: &RunConfig) -> Result<()> {
    let g = cfg.required_g()?;
    let params = cfg.params_at(g)?;
    let opts = SolverOptions { seed_mode: cfg.seed_mode.into(), ..Default::default() };
    let sol = solve_ground_state(&params, &opts)?;
    let decomp = williamson_diagonalize(&build_quadratic_hamiltonian(&sol, &params)?)?;
    let modes = (0..decomp.symplectic_eigenvalues.len())
        .map(|k| mode_weights(&decomp, k))
        .collect::<Result<Vec<_>>>()?;
    let mut warnings = sol.warnings.clone();
    if decomp.critical_regime {
        warnings.push(format!("critical regime, smallest gap {:e}", decomp.symplectic_eigenvalues[0]));
    }

    if cfg.format == config::FormatArg::Json {
        let record = SpectrumRecord {
            g,
            phase: sol.phase,
            energies: decomp.symplectic_eigenvalues,
            modes,
            critical_regime: decomp.critical_regime,
        };
        let mut out = open_output(cfg)?;
        write_json(cfg, &[record], &warnings, &mut out)?;
        out.flush()?;
        return Ok(());
    }

    let reduced = params.reduced_coupling()?;
    let mut rows = Vec::new();
    for (k, (e, w)) in decomp.symplectic_eigenvalues.iter().zip(&modes).enumerate() {
        rows.push(row(g, reduced, "energy", k + 1, *e));
        for (site, v) in w.cavity.iter().enumerate() {
            rows.push(row(g, reduced, format!("mode{}_cavity", k + 1), site + 1, *v));
        }
        for (site, v) in w.atom.iter().enumerate() {
            rows.push(row(g, reduced, format!("mode{}_atom", k + 1), site + 1, *v));
        }
    }
    emit_rows(cfg, &rows, &warnings)
}

fn sweep_cmd(cfg: &RunConfig) -> Result<()> {
    let params = cfg.params_at(cfg.g.unwrap_or(1.0))?;
    let spec = SweepSpec::around_critical(params, cfg.window, cfg.per_decade, Observable::ALL.to_vec())?;
    let result = run_sweep(&spec)?;
    let mut warnings = result.warnings.clone();
    warnings.extend(result.missing.iter().map(|m| format!("g = {}: skipped, {}", m.g, m.reason)));
    emit_rows(cfg, &result.rows(), &warnings)
}

fn exponents_cmd(cfg: &RunConfig) -> Result<()> {
    let params = cfg.params_at(cfg.g.unwrap_or(1.0))?;
    let report = extract_exponents(&params, cfg.window, cfg.per_decade)?;
    let mut warnings = report.warnings.clone();
    warnings.extend(report.checks.iter().filter(|c| !c.pass).map(|c| {
        format!("{}: {:.4} outside {} ± {}", c.name, c.measured, c.expected, c.tolerance)
    }));
    if report.unvalidated {
        warnings.push(format!("N = {} lies beyond the validated ring sizes", report.n_sites));
    }

    let mut out = open_output(cfg)?;
    match Format::from(cfg.format) {
        Format::Csv => {
            warnings.iter().for_each(|w| eprintln!("warning: {w}"));
            write_exponents_csv(&exponent_lines(&report), &mut out)?;
        }
        Format::Json => write_json(cfg, std::slice::from_ref(&report), &warnings, &mut out)?,
    }
    out.flush()?;

    // results are written either way; a rejected fit still flags the run
    let worst = report.rejected_fits().into_iter().map(|f| f.fit.r_squared).fold(f64::INFINITY, f64::min);
    if worst.is_finite() {
        return Err(Error::FitQuality { r_squared: worst });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (kind, inv) = cli.command.split();
    let file = match &inv.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let cfg = RunConfig::resolve(kind.name(), inv.settings.over(file))?;
    configure_threads()?;
    match kind {
        Kind::CriticalPoint => critical_point_cmd(&cfg),
        Kind::GroundState => ground_state_cmd(&cfg),
        Kind::Spectrum => spectrum_cmd(&cfg),
        Kind::Sweep => sweep_cmd(&cfg),
        Kind::Exponents => exponents_cmd(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
