//! Config-driven parameter sweeps with deterministic, hashed outputs.
//!
//! Grid points `(gamma, delta, L)` are simulated on a pool of `workers`
//! threads and handed to a single writer in sorted order, so the bytes on disk
//! never depend on scheduling. Files produced by [`run_sweep`]:
//!
//! | file | written when |
//! |------|--------------|
//! | `sweep.csv` | always |
//! | `sweep_errors.csv` | some grid point failed |
//! | `mutual_info.csv` | `analyses.mutual_info` |
//! | `fractal.csv` | `analyses.fractal` |
//! | `cft_fits.csv`, `profiles/*.csv` | `analyses.cft_fit` |
//! | `density/*.csv` | `analyses.density_movie` |
//! | `power_law.csv` | `analyses.power_law` |
//! | `collapse_fits.json`, `collapse/*.csv` | `analyses.collapse` |
//! | `trajectories/*.json` | `save_trajectories` |
//! | `manifest.json` | always, last |

pub mod config;
pub mod export;
pub mod table;
pub mod verify;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Analyses, CollapseConfig, GammaWindow, Preset, ScheduleConfig, SmoothingConfig, SweepConfig};
pub use export::{export_figure_data, ExportRequest, FigureKind};
pub use table::{Manifest, ManifestEntry};
pub use verify::{verify_trajectory, VerifyReport};

use crate::entanglement::{entropy_profile, steady_state_entropy, steady_state_mutual_info};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{build_hamiltonian, Boundary, ModelParams};
use crate::propagation::{run_trajectory, DensitySample, TrajectoryRecord};
use crate::scaling::{cft_log_fit, fit_collapse, power_law_fit, CollapseFit, CollapseOptions, ScalingDataset, ScalingPoint};
use crate::spectral::{average_fractal_dimension, phase_boundaries};
use table::{fmt_f64, Columns, CsvTable};

pub const SWEEP_HEADER: [&str; 8] = [
    "gamma",
    "delta",
    "L",
    "boundary",
    "s_half_steady",
    "s_half_raw_final",
    "converged",
    "wall_time_s",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResultRow {
    pub gamma: f64,
    pub delta: f64,
    pub length: usize,
    pub boundary: Boundary,
    pub s_half_steady: f64,
    pub s_half_raw_final: f64,
    pub converged: bool,
    pub wall_time_s: f64,
    /// Failure message; the numeric fields are NaN when set.
    pub error: Option<String>,
}

impl SweepResultRow {
    fn fields(&self) -> [String; 8] {
        [
            fmt_f64(self.gamma),
            fmt_f64(self.delta),
            self.length.to_string(),
            self.boundary.to_string(),
            fmt_f64(self.s_half_steady),
            fmt_f64(self.s_half_raw_final),
            self.converged.to_string(),
            fmt_f64(self.wall_time_s),
        ]
    }

    /// Reads `sweep.csv`; error messages are not part of that file.
    pub fn read_csv(path: &Path) -> Result<Vec<SweepResultRow>> {
        let (header, rows) = table::read_csv(path)?;
        let c = Columns::new(path, header);
        rows.iter()
            .map(|r| {
                Ok(SweepResultRow {
                    gamma: c.f64(r, "gamma")?,
                    delta: c.f64(r, "delta")?,
                    length: c.usize(r, "L")?,
                    boundary: c.str(r, "boundary")?.parse()?,
                    s_half_steady: c.f64(r, "s_half_steady")?,
                    s_half_raw_final: c.f64(r, "s_half_raw_final")?,
                    converged: c.str(r, "converged")? == "true",
                    wall_time_s: c.f64(r, "wall_time_s")?,
                    error: None,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub gamma: f64,
    pub delta: f64,
    pub length: usize,
}

impl GridPoint {
    /// File-name fragment, e.g. `g-5e-1_d1.5e-1_L64`.
    pub fn tag(&self) -> String {
        format!("g{}_d{}_L{}", fmt_f64(self.gamma), fmt_f64(self.delta), self.length)
    }
}

/// Every `(gamma, delta, L)` combination sorted by gamma, delta, then L.
pub fn grid_points(config: &SweepConfig) -> Vec<GridPoint> {
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let mut sizes = config.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let mut out = Vec::new();
    for &gamma in &sorted(&config.gamma_values) {
        for &delta in &sorted(&config.delta_values) {
            for &length in &sizes {
                out.push(GridPoint { gamma, delta, length });
            }
        }
    }
    out
}

/// Everything computed for one grid point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub point: GridPoint,
    pub row: SweepResultRow,
    pub mutual_info: Option<f64>,
    pub profile: Option<Vec<(usize, f64)>>,
    pub cft: Option<std::result::Result<crate::scaling::CftFit, String>>,
    pub density: Option<Vec<DensitySample>>,
    pub gamma_bar: Option<f64>,
    pub trajectory: Option<TrajectoryRecord>,
}

/// Runs the trajectory (and requested per-point analyses) of one grid point.
/// Failures are captured in the row instead of being returned.
pub fn simulate_point(config: &SweepConfig, point: GridPoint) -> PointResult {
    let start = Instant::now();
    let a = &config.analyses;
    let sm = &config.smoothing;
    let mut out = PointResult {
        point,
        row: SweepResultRow {
            gamma: point.gamma,
            delta: point.delta,
            length: point.length,
            boundary: config.boundary,
            s_half_steady: f64::NAN,
            s_half_raw_final: f64::NAN,
            converged: false,
            wall_time_s: 0.0,
            error: None,
        },
        mutual_info: None,
        profile: None,
        cft: None,
        density: None,
        gamma_bar: None,
        trajectory: None,
    };
    let params = || ModelParams::new(point.gamma, point.delta, point.length, config.boundary);
    let traj = params().and_then(|p| run_trajectory(&p, &config.trajectory_schedule()));
    match traj.and_then(|rec| Ok((steady_state_entropy(&rec, sm.sigma, sm.tail_fraction)?, rec))) {
        Ok((steady, rec)) => {
            out.row.s_half_steady = steady;
            out.row.s_half_raw_final = *rec.ee_series.last().expect("nonempty series");
            out.row.converged = rec.converged;
            if a.mutual_info {
                out.mutual_info = steady_state_mutual_info(&rec, sm.sigma, sm.tail_fraction).ok();
            }
            if a.cft_fit {
                match entropy_profile(&rec.final_correlation) {
                    Ok(p) => {
                        out.cft = Some(cft_log_fit(&p, point.length).map_err(|e| e.to_string()));
                        out.profile = Some(p);
                    }
                    Err(e) => out.cft = Some(Err(e.to_string())),
                }
            }
            if a.density_movie {
                out.density = Some(rec.density_series.clone());
            }
            if config.save_trajectories {
                out.trajectory = Some(rec);
            }
        }
        Err(e) => out.row.error = Some(e.to_string()),
    }
    if a.fractal {
        out.gamma_bar = Some(
            params()
                .and_then(|p| build_hamiltonian(&p))
                .and_then(|h| average_fractal_dimension(&h))
                .unwrap_or(f64::NAN),
        );
    }
    if config.record_timing {
        out.row.wall_time_s = start.elapsed().as_secs_f64();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawRecord {
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
    pub stderr: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCollapse {
    pub gamma: f64,
    pub min_delta: f64,
    pub points: usize,
    pub fit: Option<CollapseFit>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepResultRow>,
    pub power_laws: Vec<PowerLawRecord>,
    pub collapses: Vec<GammaCollapse>,
    pub fractal: Vec<(GridPoint, f64)>,
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
}

impl SweepOutcome {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Serializes point results to disk in grid order.
struct PointWriter<'a> {
    config: &'a SweepConfig,
    root: PathBuf,
    sweep: CsvTable,
    errors: Option<CsvTable>,
    mutual_info: Option<CsvTable>,
    fractal: Option<CsvTable>,
    cft: Option<CsvTable>,
    written: Vec<PathBuf>,
    rows: Vec<SweepResultRow>,
    fractal_values: Vec<(GridPoint, f64)>,
}

impl<'a> PointWriter<'a> {
    fn new(config: &'a SweepConfig) -> Result<Self> {
        let root = config.output_dir.clone();
        let a = &config.analyses;
        let opt = |on: bool, name: &str, header: &[&str]| -> Result<Option<CsvTable>> {
            on.then(|| CsvTable::create(&root.join(name), header)).transpose()
        };
        Ok(PointWriter {
            sweep: CsvTable::create(&root.join("sweep.csv"), &SWEEP_HEADER)?,
            errors: None,
            mutual_info: opt(a.mutual_info, "mutual_info.csv", &["gamma", "delta", "L", "boundary", "mi_steady"])?,
            fractal: opt(
                a.fractal,
                "fractal.csv",
                &["gamma", "delta", "L", "boundary", "gamma_bar", "delta_i", "delta_ii"],
            )?,
            cft: opt(a.cft_fit, "cft_fits.csv", &["gamma", "delta", "L", "c", "const", "rms_residual"])?,
            config,
            root,
            written: Vec::new(),
            rows: Vec::new(),
            fractal_values: Vec::new(),
        })
    }

    fn push(&mut self, r: PointResult) -> Result<()> {
        let p = r.point;
        let key = [fmt_f64(p.gamma), fmt_f64(p.delta), p.length.to_string()];
        let bc = self.config.boundary.to_string();
        self.sweep.row(r.row.fields())?;
        if let Some(msg) = &r.row.error {
            if self.errors.is_none() {
                self.errors = Some(CsvTable::create(
                    &self.root.join("sweep_errors.csv"),
                    &["gamma", "delta", "L", "boundary", "error"],
                )?);
            }
            let t = self.errors.as_mut().unwrap();
            t.row(key.iter().cloned().chain([bc.clone(), msg.clone()]))?;
        }
        if let Some(t) = self.mutual_info.as_mut() {
            let mi = r.mutual_info.unwrap_or(f64::NAN);
            t.row(key.iter().cloned().chain([bc.clone(), fmt_f64(mi)]))?;
        }
        if let (Some(t), Some(gb)) = (self.fractal.as_mut(), r.gamma_bar) {
            let (di, dii) = phase_boundaries(p.gamma, p.length).map_or((f64::NAN, f64::NAN), |b| (b.delta_i, b.delta_ii));
            t.row(key.iter().cloned().chain([bc.clone(), fmt_f64(gb), fmt_f64(di), fmt_f64(dii)]))?;
            self.fractal_values.push((p, gb));
        }
        if let (Some(t), Some(fit)) = (self.cft.as_mut(), &r.cft) {
            let (c, k, res) = match fit {
                Ok(f) => (f.c, f.constant, f.rms_residual),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            };
            t.row(key.iter().cloned().chain([fmt_f64(c), fmt_f64(k), fmt_f64(res)]))?;
        }
        if let Some(profile) = &r.profile {
            let path = self.root.join("profiles").join(format!("profile_{}.csv", p.tag()));
            let mut t = CsvTable::create(&path, &export::PROFILE_HEADER)?;
            for (l, s) in profile {
                t.row([l.to_string(), fmt_f64(*s), p.length.to_string()])?;
            }
            self.written.push(path);
        }
        if let Some(density) = &r.density {
            let path = self.root.join("density").join(format!("density_{}.csv", p.tag()));
            export::write_density(&path, density)?;
            self.written.push(path);
        }
        if let Some(rec) = &r.trajectory {
            let path = self.root.join("trajectories").join(format!("{}.json", p.tag()));
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            std::fs::write(&path, serde_json::to_string(rec)?).map_err(|e| Error::io(&path, e))?;
            self.written.push(path);
        }
        self.rows.push(r.row);
        Ok(())
    }

    fn finish(self, manifest: &mut Manifest) -> Result<(Vec<SweepResultRow>, Vec<(GridPoint, f64)>)> {
        let mut files: Vec<PathBuf> = [
            Some(self.sweep),
            self.errors,
            self.mutual_info,
            self.fractal,
            self.cft,
        ]
        .into_iter()
        .flatten()
        .map(|t| t.path().to_path_buf())
        .collect();
        files.extend(self.written);
        for f in &files {
            manifest.record(&self.root, f)?;
        }
        Ok((self.rows, self.fractal_values))
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

/// Scaling dataset of one gamma from finite, positive steady-state values.
pub fn scaling_dataset(rows: &[SweepResultRow], gamma: f64) -> ScalingDataset {
    ScalingDataset::new(
        rows.iter()
            .filter(|r| r.gamma == gamma && r.s_half_steady.is_finite())
            .map(|r| ScalingPoint::new(r.length, r.delta, r.s_half_steady))
            .collect(),
    )
}

/// Collapse fit of one gamma using the configured window and options.
pub fn collapse_for_gamma(rows: &[SweepResultRow], gamma: f64, options: &CollapseConfig) -> GammaCollapse {
    let min_delta = options.min_delta_for(gamma);
    let data = scaling_dataset(rows, gamma).window(min_delta);
    let fit = fit_collapse(
        &data,
        options.init,
        &options.bounds,
        &CollapseOptions {
            bootstrap_n: options.bootstrap_n,
            seed: options.seed,
            ..CollapseOptions::default()
        },
    );
    GammaCollapse {
        gamma,
        min_delta,
        points: data.points.len(),
        error: fit.as_ref().err().map(|e| e.to_string()),
        fit: fit.ok(),
    }
}

fn power_laws(rows: &[SweepResultRow]) -> Vec<PowerLawRecord> {
    let mut groups: BTreeMap<(u64, u64), Vec<&SweepResultRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((order_key(r.gamma), order_key(r.delta))).or_default().push(r);
    }
    groups
        .values()
        .map(|g| {
            let sizes: Vec<usize> = g.iter().map(|r| r.length).collect();
            let values: Vec<f64> = g.iter().map(|r| r.s_half_steady).collect();
            let fit = power_law_fit(&sizes, &values);
            PowerLawRecord {
                gamma: g[0].gamma,
                delta: g[0].delta,
                beta: fit.as_ref().map_or(f64::NAN, |f| f.beta),
                stderr: fit.as_ref().map_or(f64::NAN, |f| f.stderr),
                error: fit.err().map(|e| e.to_string()),
            }
        })
        .collect()
}

/// Total-order key for finite floats (sorts like the value).
fn order_key(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

fn distinct_gammas(rows: &[SweepResultRow]) -> Vec<f64> {
    let mut g: Vec<f64> = rows.iter().map(|r| r.gamma).collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Runs every grid point and the enabled analyses, writing outputs under
/// `config.output_dir`. Row-level failures are recorded, not returned; an
/// I/O failure aborts the run after writing a manifest marked partial.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    linalg::pin_blas_threads();
    let root = config.output_dir.clone();
    std::fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
    let mut manifest = Manifest::default();
    match sweep_inner(config, &mut manifest) {
        Ok(outcome) => Ok(outcome),
        Err(e) => {
            if matches!(e, Error::Io { .. }) {
                manifest.partial = true;
                manifest.note = Some(format!("run aborted: {e}"));
                let _ = manifest.write(&root);
            }
            Err(e)
        }
    }
}

fn sweep_inner(config: &SweepConfig, manifest: &mut Manifest) -> Result<SweepOutcome> {
    let root = config.output_dir.clone();
    let points = grid_points(config);
    let pool = thread_pool(config.workers)?;
    let mut writer = PointWriter::new(config)?;

    let (tx, rx) = mpsc::channel::<(usize, PointResult)>();
    std::thread::scope(|s| -> Result<()> {
        let pool = &pool;
        let points = &points;
        s.spawn(move || {
            pool.install(|| {
                points.par_iter().enumerate().for_each_with(tx, |tx, (i, p)| {
                    let _ = tx.send((i, simulate_point(config, *p)));
                })
            })
        });
        let mut pending = BTreeMap::new();
        let mut next = 0;
        for (i, r) in rx {
            pending.insert(i, r);
            while let Some(r) = pending.remove(&next) {
                writer.push(r)?;
                next += 1;
            }
        }
        Ok(())
    })?;
    let (rows, fractal) = writer.finish(manifest)?;

    let mut power = Vec::new();
    if config.analyses.power_law {
        power = power_laws(&rows);
        let path = root.join("power_law.csv");
        let mut t = CsvTable::create(&path, &["gamma", "delta", "beta", "stderr"])?;
        for p in &power {
            t.row([fmt_f64(p.gamma), fmt_f64(p.delta), fmt_f64(p.beta), fmt_f64(p.stderr)])?;
        }
        drop(t);
        manifest.record(&root, &path)?;
    }

    let mut collapses = Vec::new();
    if config.analyses.collapse {
        collapses = pool.install(|| fit_all_gammas(&rows, &config.collapse_options));
        write_collapses(&root, &rows, &collapses, manifest)?;
    }

    manifest.rows = rows.len();
    manifest.failed_rows = rows.iter().filter(|r| r.error.is_some()).count();
    let manifest_path = manifest.write(&root)?;
    Ok(SweepOutcome {
        rows,
        power_laws: power,
        collapses,
        fractal,
        manifest: manifest.clone(),
        manifest_path,
    })
}

fn fit_all_gammas(rows: &[SweepResultRow], options: &CollapseConfig) -> Vec<GammaCollapse> {
    distinct_gammas(rows)
        .into_iter()
        .map(|g| collapse_for_gamma(rows, g, options))
        .collect()
}

fn write_collapses(root: &Path, rows: &[SweepResultRow], collapses: &[GammaCollapse], manifest: &mut Manifest) -> Result<()> {
    let path = root.join("collapse_fits.json");
    let mut text = serde_json::to_string_pretty(collapses)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    manifest.record(root, &path)?;
    for c in collapses {
        if let Some(fit) = &c.fit {
            let data = scaling_dataset(rows, c.gamma).window(c.min_delta);
            let path = root.join("collapse").join(format!("collapse_g{}.csv", fmt_f64(c.gamma)));
            export::write_collapse(&path, &data, fit.params(), Some(c.gamma))?;
            manifest.record(root, &path)?;
        }
    }
    Ok(())
}

/// Collapse fits of every gamma in previously computed sweep rows, written
/// to `config.output_dir` (`collapse_fits.json`, `collapse/*.csv`).
pub fn run_collapse_on_rows(config: &SweepConfig, rows: &[SweepResultRow]) -> Result<Vec<GammaCollapse>> {
    config.validate()?;
    let root = &config.output_dir;
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let pool = thread_pool(config.workers)?;
    let collapses = pool.install(|| fit_all_gammas(rows, &config.collapse_options));
    let mut manifest = Manifest::default();
    write_collapses(root, rows, &collapses, &mut manifest)?;
    manifest.rows = rows.len();
    manifest.write(root)?;
    Ok(collapses)
}

/// Sweep plus the `(gamma, delta)` heatmap at the largest size, the analytic
/// phase boundaries and, with `analyses.collapse`, the fitted `delta_c` of
/// every gamma (`phase_grid.csv`, `phase_grid.svg`, `phase_boundaries.csv`).
pub fn run_phase_diagram(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let distinct = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if distinct(&config.gamma_values) < 2 || distinct(&config.delta_values) < 2 {
        return Err(Error::Config(
            "a phase diagram needs at least 2 gamma and 2 delta values".into(),
        ));
    }
    let mut outcome = run_sweep(config)?;
    let root = &config.output_dir;
    let largest = *config.sizes.iter().max().expect("validated nonempty");
    let cells: Vec<&SweepResultRow> = outcome.rows.iter().filter(|r| r.length == largest).collect();

    let mut manifest = outcome.manifest.clone();
    let grid_path = root.join("phase_grid.csv");
    let mut t = CsvTable::create(&grid_path, &["gamma", "delta", "L", "s_half_steady"])?;
    for r in &cells {
        t.row([fmt_f64(r.gamma), fmt_f64(r.delta), r.length.to_string(), fmt_f64(r.s_half_steady)])?;
    }
    drop(t);
    manifest.record(root, &grid_path)?;

    let svg_path = root.join("phase_grid.svg");
    let heat: Vec<(f64, f64, f64)> = cells.iter().map(|r| (r.delta, r.gamma, r.s_half_steady)).collect();
    export::write_heatmap_svg(&svg_path, &heat, "delta", "gamma", &format!("S_L/2 at L = {largest}"))?;
    manifest.record(root, &svg_path)?;

    let bounds_path = root.join("phase_boundaries.csv");
    let mut t = CsvTable::create(
        &bounds_path,
        &["gamma", "L", "delta_i", "delta_ii", "delta_c", "delta_c_err"],
    )?;
    for g in distinct_gammas(&outcome.rows) {
        let b = phase_boundaries(g, largest)?;
        let fit = outcome.collapses.iter().find(|c| c.gamma == g).and_then(|c| c.fit.as_ref());
        t.row([
            fmt_f64(g),
            largest.to_string(),
            fmt_f64(b.delta_i),
            fmt_f64(b.delta_ii),
            fmt_f64(fit.map_or(f64::NAN, |f| f.delta_c)),
            fmt_f64(fit.map_or(f64::NAN, |f| f.errors.delta_c)),
        ])?;
    }
    drop(t);
    manifest.record(root, &bounds_path)?;
    outcome.manifest_path = manifest.write(root)?;
    outcome.manifest = manifest;
    Ok(outcome)
}

/// Average fractal dimension and phase boundaries for every grid point,
/// written to `spectral.csv`; no trajectories are run.
pub fn run_spectral(config: &SweepConfig) -> Result<(PathBuf, Vec<(GridPoint, f64)>)> {
    config.validate()?;
    linalg::pin_blas_threads();
    let root = &config.output_dir;
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let points = grid_points(config);
    let pool = thread_pool(config.workers)?;
    let values: Vec<f64> = pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                ModelParams::new(p.gamma, p.delta, p.length, config.boundary)
                    .and_then(|m| build_hamiltonian(&m))
                    .and_then(|h| average_fractal_dimension(&h))
                    .unwrap_or(f64::NAN)
            })
            .collect()
    });
    let path = root.join("spectral.csv");
    let mut t = CsvTable::create(
        &path,
        &["gamma", "delta", "L", "boundary", "gamma_bar", "delta_i", "delta_ii"],
    )?;
    for (p, gb) in points.iter().zip(&values) {
        let b = phase_boundaries(p.gamma, p.length)?;
        t.row([
            fmt_f64(p.gamma),
            fmt_f64(p.delta),
            p.length.to_string(),
            config.boundary.to_string(),
            fmt_f64(*gb),
            fmt_f64(b.delta_i),
            fmt_f64(b.delta_ii),
        ])?;
    }
    drop(t);
    let mut manifest = Manifest::default();
    manifest.record(root, &path)?;
    manifest.rows = points.len();
    manifest.write(root)?;
    Ok((path, points.into_iter().zip(values).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(dir: &Path) -> SweepConfig {
        let mut c = SweepConfig::preset(Preset::Desk);
        c.gamma_values = vec![0.0];
        c.delta_values = vec![0.0];
        c.sizes = vec![16];
        c.schedule.steps = 100;
        c.output_dir = dir.to_path_buf();
        c
    }

    #[test]
    fn grid_is_sorted_and_deduplicated() {
        let mut c = SweepConfig::preset(Preset::Desk);
        c.gamma_values = vec![-0.3, -0.5, -0.3];
        c.delta_values = vec![0.2, 0.1];
        c.sizes = vec![64, 32];
        let g = grid_points(&c);
        assert_eq!(g.len(), 8);
        assert_eq!((g[0].gamma, g[0].delta, g[0].length), (-0.5, 0.1, 32));
        assert_eq!((g[7].gamma, g[7].delta, g[7].length), (-0.3, 0.2, 64));
    }

    #[test]
    fn single_point_sweep() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_sweep(&tiny(dir.path())).unwrap();
        assert_eq!(out.rows.len(), 1);
        let row = &out.rows[0];
        assert!(row.error.is_none());
        assert!(row.s_half_steady > 0.0);
        assert_eq!(row.wall_time_s, 0.0);
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert!(text.starts_with("gamma,delta,L,boundary,s_half_steady,s_half_raw_final,converged,wall_time_s\n"));
        assert_eq!(SweepResultRow::read_csv(&dir.path().join("sweep.csv")).unwrap()[0].s_half_steady, row.s_half_steady);
        assert!(Manifest::read(dir.path()).unwrap().verify(dir.path()).is_empty());
    }

    #[test]
    fn order_key_sorts_like_values() {
        let mut v = vec![0.3, -0.5, 0.0, -0.001, 20.0];
        v.sort_by_key(|x| order_key(*x));
        assert_eq!(v, vec![-0.5, -0.001, 0.0, 0.3, 20.0]);
    }
}
