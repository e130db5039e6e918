use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use starkskin::error::Error;
use starkskin::scaling::CollapseParams;
use starkskin::sweep::{
    self, export_figure_data, verify, ExportRequest, FigureKind, Preset, SweepConfig, SweepOutcome, SweepResultRow,
};

const EXIT_PARTIAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "starkskin", version, about = "Entanglement dynamics of non-Hermitian free fermions on a Wannier-Stark ladder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON sweep configuration; absent fields come from the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (overrides the configuration).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Base configuration.
    #[arg(long, global = true, default_value = "desk", value_parser = ["paper", "desk"])]
    preset: String,
    /// Seed for the collapse multi-start and bootstrap.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the configured (gamma, delta, L) sweep.
    Simulate,
    /// Sweep plus the (gamma, delta) heatmap, boundaries and fitted delta_c.
    PhaseDiagram,
    /// Finite-size-scaling collapse per gamma.
    Collapse {
        /// Fit existing sweep.csv files instead of running the sweep.
        #[arg(long)]
        input: Vec<PathBuf>,
    },
    /// Mean fractal dimension and analytic phase boundaries.
    Spectral,
    /// Write a plot-ready table for one figure kind.
    Export {
        /// s_vs_delta, s_vs_L, entropy_profile, mutual_info, density_heatmap, collapse or fractal_map.
        #[arg(long)]
        kind: String,
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, requires_all = ["nu", "zeta"])]
        delta_c: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<f64>,
    },
    /// Check a saved trajectory JSON, or the manifest of an output directory.
    Verify { path: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::MissingInputs(_) | Error::Malformed { .. } | Error::Json(_) => EXIT_IO,
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::InvalidLength { .. }
        | Error::OddLength(_)
        | Error::GammaOutOfRange(_)
        | Error::UnsupportedBoundary { .. } => EXIT_CONFIG,
        _ => EXIT_PARTIAL,
    }
}

fn load_config(c: &Common) -> Result<SweepConfig, Error> {
    let preset: Preset = c.preset.parse()?;
    let base = SweepConfig::preset(preset);
    let mut cfg = match &c.config {
        Some(path) => SweepConfig::load(path, &base)?,
        None => base,
    };
    if let Some(o) = &c.output {
        cfg.output_dir = o.clone();
    }
    if let Some(w) = c.workers {
        cfg.workers = w;
    }
    if let Some(s) = c.seed {
        cfg.collapse_options.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report_sweep(out: &SweepOutcome) -> u8 {
    let failed = out.failed_rows();
    println!(
        "{} rows ({} failed); manifest {}",
        out.rows.len(),
        failed,
        out.manifest_path.display()
    );
    for r in out.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "failed: gamma={} delta={} L={}: {}",
            r.gamma,
            r.delta,
            r.length,
            r.error.as_deref().unwrap_or("")
        );
    }
    report_collapses(&out.collapses);
    if failed > 0 {
        EXIT_PARTIAL
    } else {
        0
    }
}

fn report_collapses(collapses: &[sweep::GammaCollapse]) -> bool {
    let mut ok = true;
    for c in collapses {
        match &c.fit {
            Some(f) => println!(
                "gamma={}: delta_c={:.4}±{:.4} nu={:.3}±{:.3} zeta={:.3}±{:.3} quality={:.3e}{}{}",
                c.gamma,
                f.delta_c,
                f.errors.delta_c,
                f.nu,
                f.errors.nu,
                f.zeta,
                f.errors.zeta,
                f.quality,
                if f.clipped { " [clipped]" } else { "" },
                if f.converged { "" } else { " [not converged]" }
            ),
            None => {
                ok = false;
                eprintln!("gamma={}: collapse failed: {}", c.gamma, c.error.as_deref().unwrap_or(""));
            }
        }
    }
    ok
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Simulate => {
            let cfg = load_config(&cli.common)?;
            Ok(report_sweep(&sweep::run_sweep(&cfg)?))
        }
        Command::PhaseDiagram => {
            let cfg = load_config(&cli.common)?;
            Ok(report_sweep(&sweep::run_phase_diagram(&cfg)?))
        }
        Command::Collapse { input } => {
            let mut cfg = load_config(&cli.common)?;
            cfg.analyses.collapse = true;
            if input.is_empty() {
                let out = sweep::run_sweep(&cfg)?;
                let code = report_sweep(&out);
                let fits_ok = out.collapses.iter().all(|c| c.fit.is_some());
                return Ok(if fits_ok { code } else { EXIT_PARTIAL });
            }
            let missing: Vec<PathBuf> = input.iter().filter(|p| !p.is_file()).cloned().collect();
            if !missing.is_empty() {
                return Err(Error::MissingInputs(missing));
            }
            let mut rows = Vec::new();
            for p in &input {
                rows.extend(SweepResultRow::read_csv(p)?);
            }
            let fits = sweep::run_collapse_on_rows(&cfg, &rows)?;
            Ok(if report_collapses(&fits) { 0 } else { EXIT_PARTIAL })
        }
        Command::Spectral => {
            let cfg = load_config(&cli.common)?;
            let (path, values) = sweep::run_spectral(&cfg)?;
            for (p, gb) in &values {
                println!("gamma={} delta={} L={} gamma_bar={:.6}", p.gamma, p.delta, p.length, gb);
            }
            println!("wrote {}", path.display());
            Ok(if values.iter().all(|(_, v)| v.is_finite()) { 0 } else { EXIT_PARTIAL })
        }
        Command::Export {
            kind,
            input,
            gamma,
            length,
            delta_c,
            nu,
            zeta,
        } => {
            let kind: FigureKind = kind.parse()?;
            let output = match &cli.common.output {
                Some(o) => o.clone(),
                None => load_config(&cli.common)?.output_dir,
            };
            let mut req = ExportRequest::new(kind, input, output);
            req.gamma = gamma;
            req.length = length;
            if let (Some(d), Some(n), Some(z)) = (delta_c, nu, zeta) {
                req.collapse = Some(CollapseParams::new(d, n, z));
            }
            let path = export_figure_data(&req)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Verify { path } => {
            if !path.exists() {
                return Err(Error::MissingInputs(vec![path]));
            }
            let report = if path.is_dir() {
                verify::verify_manifest(&path)?
            } else {
                verify::verify_trajectory(&path)?
            };
            print!("{report}");
            Ok(if report.passed() { 0 } else { EXIT_PARTIAL })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
