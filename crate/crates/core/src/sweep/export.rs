//! Plot-ready tables (one kind per figure panel) and minimal SVG heatmaps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::table::{self, fmt_f64, Columns, CsvTable};
use super::{GammaCollapse, SweepResultRow};
use crate::error::{Error, Result};
use crate::propagation::DensitySample;
use crate::scaling::{rescale, CollapseParams, ScalingDataset, ScalingPoint};

pub const PROFILE_HEADER: [&str; 3] = ["l", "s_l", "L"];
pub const DENSITY_HEADER: [&str; 3] = ["step", "site", "n"];
pub const COLLAPSE_HEADER: [&str; 4] = ["x", "y", "L", "delta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureKind {
    SVsDelta,
    SVsL,
    EntropyProfile,
    MutualInfo,
    DensityHeatmap,
    Collapse,
    FractalMap,
}

impl FigureKind {
    pub const ALL: [FigureKind; 7] = [
        FigureKind::SVsDelta,
        FigureKind::SVsL,
        FigureKind::EntropyProfile,
        FigureKind::MutualInfo,
        FigureKind::DensityHeatmap,
        FigureKind::Collapse,
        FigureKind::FractalMap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureKind::SVsDelta => "s_vs_delta",
            FigureKind::SVsL => "s_vs_L",
            FigureKind::EntropyProfile => "entropy_profile",
            FigureKind::MutualInfo => "mutual_info",
            FigureKind::DensityHeatmap => "density_heatmap",
            FigureKind::Collapse => "collapse",
            FigureKind::FractalMap => "fractal_map",
        }
    }
}

impl FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown figure kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExportRequest {
    pub kind: FigureKind,
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    /// Restricts sweep-derived tables to one gamma.
    pub gamma: Option<f64>,
    /// Restricts fractal maps to one size (default: the largest present).
    pub length: Option<usize>,
    /// Collapse parameters; otherwise read from a `collapse_fits.json` input.
    pub collapse: Option<CollapseParams>,
}

impl ExportRequest {
    pub fn new(kind: FigureKind, inputs: Vec<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        ExportRequest {
            kind,
            inputs,
            output_dir: output_dir.into(),
            gamma: None,
            length: None,
            collapse: None,
        }
    }
}

pub fn write_density(path: &Path, samples: &[DensitySample]) -> Result<()> {
    let mut t = CsvTable::create(path, &DENSITY_HEADER)?;
    for s in samples {
        for (j, n) in s.profile.iter().enumerate() {
            t.row([s.step.to_string(), (j + 1).to_string(), fmt_f64(*n)])?;
        }
    }
    Ok(())
}

/// Collapse table with the parameters as `#` preamble lines.
pub fn write_collapse(path: &Path, data: &ScalingDataset, params: CollapseParams, gamma: Option<f64>) -> Result<()> {
    let mut preamble = Vec::new();
    if let Some(g) = gamma {
        preamble.push(format!("gamma={}", fmt_f64(g)));
    }
    preamble.push(format!("delta_c={}", fmt_f64(params.delta_c)));
    preamble.push(format!("nu={}", fmt_f64(params.nu)));
    preamble.push(format!("zeta={}", fmt_f64(params.zeta)));
    let mut t = CsvTable::create_with_preamble(path, &preamble, &COLLAPSE_HEADER)?;
    let mut pts = rescale(data, params);
    pts.sort_by(|a, b| a.length.cmp(&b.length).then(a.delta.total_cmp(&b.delta)));
    for p in pts {
        t.row([fmt_f64(p.x), fmt_f64(p.y), p.length.to_string(), fmt_f64(p.delta)])?;
    }
    Ok(())
}

fn color(t: f64) -> String {
    // dark blue -> teal -> yellow
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let stops = [(0.0, [48.0, 18.0, 89.0]), (0.5, [33.0, 145.0, 140.0]), (1.0, [253.0, 231.0, 37.0])];
    let (a, b) = if t <= 0.5 { (stops[0], stops[1]) } else { (stops[1], stops[2]) };
    let u = (t - a.0) / (b.0 - a.0);
    let c: Vec<u8> = (0..3).map(|i| (a.1[i] + u * (b.1[i] - a.1[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Heatmap of `(x, y, value)` cells on the grid of distinct x and y values.
/// Non-finite values are drawn grey.
pub fn write_heatmap_svg(path: &Path, cells: &[(f64, f64, f64)], x_label: &str, y_label: &str, title: &str) -> Result<()> {
    let axis = |f: fn(&(f64, f64, f64)) -> f64| {
        let mut v: Vec<f64> = cells.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let xs = axis(|c| c.0);
    let ys = axis(|c| c.1);
    let finite = cells.iter().map(|c| c.2).filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let (cw, ch, left, top) = (24.0, 24.0, 70.0, 30.0);
    let width = left + cw * xs.len() as f64 + 20.0;
    let height = top + ch * ys.len() as f64 + 50.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<text x="{left}" y="18">{} (min {}, max {})</text>"#, escape(title), fmt_f64(lo), fmt_f64(hi));
    for c in cells {
        let i = xs.iter().position(|x| *x == c.0).unwrap_or(0);
        // largest y on top
        let j = ys.len() - 1 - ys.iter().position(|y| *y == c.1).unwrap_or(0);
        let fill = if c.2.is_finite() { color((c.2 - lo) / span) } else { "#999999".into() };
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{cw}" height="{ch}" fill="{fill}"><title>{}={} {}={} value={}</title></rect>"#,
            left + cw * i as f64,
            top + ch * j as f64,
            escape(x_label),
            fmt_f64(c.0),
            escape(y_label),
            fmt_f64(c.1),
            fmt_f64(c.2)
        );
    }
    let bottom = top + ch * ys.len() as f64;
    for (i, x) in xs.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" transform="rotate(60 {} {})">{}</text>"#,
            left + cw * i as f64 + 4.0,
            bottom + 10.0,
            left + cw * i as f64 + 4.0,
            bottom + 10.0,
            x
        );
    }
    for (j, y) in ys.iter().rev().enumerate() {
        let _ = writeln!(s, r#"<text x="4" y="{}">{}</text>"#, top + ch * j as f64 + 15.0, y);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, width - 60.0, height - 4.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="4" y="{}">{}</text>"#, top - 2.0, escape(y_label));
    s.push_str("</svg>\n");
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn sweep_rows(req: &ExportRequest) -> Result<Vec<SweepResultRow>> {
    let mut rows = Vec::new();
    for p in req.inputs.iter().filter(|p| p.extension().is_some_and(|e| e == "csv")) {
        rows.extend(SweepResultRow::read_csv(p)?);
    }
    let mut gammas: Vec<f64> = rows.iter().map(|r| r.gamma).collect();
    gammas.sort_by(f64::total_cmp);
    gammas.dedup();
    match req.gamma {
        Some(g) => rows.retain(|r| (r.gamma - g).abs() < 1e-12),
        None if gammas.len() > 1 => {
            return Err(Error::InvalidArgument(format!(
                "inputs hold {} gamma values; choose one",
                gammas.len()
            )))
        }
        None => {}
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData("no sweep rows match the request".into()));
    }
    Ok(rows)
}

/// Writes the table for `req.kind` into `req.output_dir` and returns its path.
///
/// | kind | inputs | columns |
/// |------|--------|---------|
/// | `s_vs_delta` | `sweep.csv` | `delta,L,s_half` |
/// | `s_vs_L` | `sweep.csv` | `L,delta,s_half` |
/// | `entropy_profile` | profile CSVs | `l,s_l,L` |
/// | `mutual_info` | `mutual_info.csv` | `delta,L,mi` |
/// | `density_heatmap` | one density CSV | `step,site,n` (+ SVG) |
/// | `collapse` | `sweep.csv` (+ `collapse_fits.json`) | `x,y,L,delta` |
/// | `fractal_map` | `fractal.csv` or `spectral.csv` | `gamma,delta,L,gamma_bar` (+ SVG) |
pub fn export_figure_data(req: &ExportRequest) -> Result<PathBuf> {
    if req.inputs.is_empty() {
        return Err(Error::InvalidArgument("no input files given".into()));
    }
    let missing: Vec<PathBuf> = req.inputs.iter().filter(|p| !p.is_file()).cloned().collect();
    if !missing.is_empty() {
        return Err(Error::MissingInputs(missing));
    }
    let out = &req.output_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let path = out.join(format!("{}.csv", req.kind.as_str()));
    match req.kind {
        FigureKind::SVsDelta | FigureKind::SVsL => {
            let mut rows = sweep_rows(req)?;
            let by_delta = req.kind == FigureKind::SVsDelta;
            if by_delta {
                rows.sort_by(|a, b| a.length.cmp(&b.length).then(a.delta.total_cmp(&b.delta)));
            } else {
                rows.sort_by(|a, b| a.delta.total_cmp(&b.delta).then(a.length.cmp(&b.length)));
            }
            let header: &[&str] = if by_delta { &["delta", "L", "s_half"] } else { &["L", "delta", "s_half"] };
            let mut t = CsvTable::create(&path, header)?;
            for r in rows {
                let (d, l, s) = (fmt_f64(r.delta), r.length.to_string(), fmt_f64(r.s_half_steady));
                if by_delta {
                    t.row([d, l, s])?;
                } else {
                    t.row([l, d, s])?;
                }
            }
        }
        FigureKind::EntropyProfile => {
            let mut t = CsvTable::create(&path, &PROFILE_HEADER)?;
            for input in &req.inputs {
                let (h, rows) = table::read_csv(input)?;
                let c = Columns::new(input, h);
                for r in &rows {
                    t.row([
                        c.usize(r, "l")?.to_string(),
                        fmt_f64(c.f64(r, "s_l")?),
                        c.usize(r, "L")?.to_string(),
                    ])?;
                }
            }
        }
        FigureKind::MutualInfo => {
            let mut t = CsvTable::create(&path, &["delta", "L", "mi"])?;
            for input in &req.inputs {
                let (h, rows) = table::read_csv(input)?;
                let c = Columns::new(input, h);
                for r in &rows {
                    if req.gamma.is_some_and(|g| (c.f64(r, "gamma").unwrap_or(f64::NAN) - g).abs() >= 1e-12) {
                        continue;
                    }
                    t.row([
                        fmt_f64(c.f64(r, "delta")?),
                        c.usize(r, "L")?.to_string(),
                        fmt_f64(c.f64(r, "mi_steady")?),
                    ])?;
                }
            }
        }
        FigureKind::DensityHeatmap => {
            let input = &req.inputs[0];
            let (h, rows) = table::read_csv(input)?;
            let c = Columns::new(input, h);
            let mut samples: Vec<DensitySample> = Vec::new();
            let mut cells = Vec::new();
            for r in &rows {
                let (step, site, n) = (c.usize(r, "step")?, c.usize(r, "site")?, c.f64(r, "n")?);
                if samples.last().map(|s| s.step) != Some(step) {
                    samples.push(DensitySample { step, profile: Vec::new() });
                }
                samples.last_mut().unwrap().profile.push(n);
                cells.push((site as f64, step as f64, n));
            }
            write_density(&path, &samples)?;
            write_heatmap_svg(&path.with_extension("svg"), &cells, "site", "step", "<n_j>")?;
        }
        FigureKind::Collapse => {
            let rows = sweep_rows(req)?;
            let gamma = rows[0].gamma;
            let (params, min_delta) = match req.collapse {
                Some(p) => (p, f64::NEG_INFINITY),
                None => {
                    let json = req
                        .inputs
                        .iter()
                        .find(|p| p.extension().is_some_and(|e| e == "json"))
                        .ok_or_else(|| {
                            Error::InvalidArgument("collapse export needs parameters or a collapse_fits.json input".into())
                        })?;
                    let text = std::fs::read_to_string(json).map_err(|e| Error::io(json, e))?;
                    let fits: Vec<GammaCollapse> = serde_json::from_str(&text).map_err(|e| Error::Malformed {
                        path: json.clone(),
                        message: e.to_string(),
                    })?;
                    let c = fits
                        .iter()
                        .find(|c| (c.gamma - gamma).abs() < 1e-12 && c.fit.is_some())
                        .ok_or_else(|| Error::InsufficientData(format!("no collapse fit for gamma {gamma}")))?;
                    (c.fit.as_ref().unwrap().params(), c.min_delta)
                }
            };
            let data = ScalingDataset::new(
                rows.iter()
                    .filter(|r| r.s_half_steady.is_finite() && r.delta >= min_delta)
                    .map(|r| ScalingPoint::new(r.length, r.delta, r.s_half_steady))
                    .collect(),
            );
            write_collapse(&path, &data, params, Some(gamma))?;
        }
        FigureKind::FractalMap => {
            let mut cells = Vec::new();
            for input in &req.inputs {
                let (h, rows) = table::read_csv(input)?;
                let c = Columns::new(input, h);
                for r in &rows {
                    cells.push((c.f64(r, "gamma")?, c.f64(r, "delta")?, c.usize(r, "L")?, c.f64(r, "gamma_bar")?));
                }
            }
            let length = req
                .length
                .or_else(|| cells.iter().map(|c| c.2).max())
                .ok_or_else(|| Error::InsufficientData("no fractal rows".into()))?;
            cells.retain(|c| c.2 == length);
            cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let mut t = CsvTable::create(&path, &["gamma", "delta", "L", "gamma_bar"])?;
            for c in &cells {
                t.row([fmt_f64(c.0), fmt_f64(c.1), c.2.to_string(), fmt_f64(c.3)])?;
            }
            let heat: Vec<(f64, f64, f64)> = cells.iter().map(|c| (c.1, c.0, c.3)).collect();
            write_heatmap_svg(
                &path.with_extension("svg"),
                &heat,
                "delta",
                "gamma",
                &format!("mean fractal dimension, L = {length}"),
            )?;
        }
    }
    Ok(path)
}
