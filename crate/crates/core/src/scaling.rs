//! Power-law fits, finite-size-scaling collapse and the logarithmic
//! (conformal) entropy-profile fit.
//!
//! The collapse ansatz is `S(L, D) = L^{z/v} f(L^{1/v} (D - D_c))`. Its
//! quality is a local master-curve residual: every point is compared with a
//! straight line through the three nearest rescaled points of each other
//! size, and the mismatch is expressed back in entropy units.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};

/// Neighbours taken from each other size when building the local master curve.
pub const NEIGHBOURS_PER_SIZE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub length: usize,
    pub delta: f64,
    pub s_half: f64,
    pub weight: f64,
}

impl ScalingPoint {
    pub fn new(length: usize, delta: f64, s_half: f64) -> Self {
        ScalingPoint {
            length,
            delta,
            s_half,
            weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalingDataset {
    pub points: Vec<ScalingPoint>,
}

impl ScalingDataset {
    pub fn new(points: Vec<ScalingPoint>) -> Self {
        ScalingDataset { points }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.points.iter().map(|p| p.length).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn deltas(&self) -> Vec<f64> {
        let mut d: Vec<f64> = self.points.iter().map(|p| p.delta).collect();
        d.sort_by(f64::total_cmp);
        d.dedup();
        d
    }

    /// Keeps points with `delta >= min_delta`.
    pub fn window(&self, min_delta: f64) -> Self {
        ScalingDataset {
            points: self.points.iter().filter(|p| p.delta >= min_delta).copied().collect(),
        }
    }

    /// At least 3 sizes, 5 deltas, finite values and positive weights.
    pub fn validate_for_collapse(&self) -> Result<()> {
        if self.sizes().len() < 3 {
            return Err(Error::InsufficientData(format!(
                "collapse needs at least 3 sizes, got {}",
                self.sizes().len()
            )));
        }
        if self.deltas().len() < 5 {
            return Err(Error::InsufficientData(format!(
                "collapse needs at least 5 delta values, got {}",
                self.deltas().len()
            )));
        }
        for p in &self.points {
            if !(p.delta.is_finite() && p.s_half.is_finite() && p.weight.is_finite() && p.weight > 0.0) {
                return Err(Error::InvalidArgument(format!("bad scaling point {p:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub beta: f64,
    pub stderr: f64,
    /// `ln S` at `ln L = 0`.
    pub intercept: f64,
}

struct LineFit {
    slope: f64,
    intercept: f64,
    residuals: Vec<f64>,
    sxx: f64,
}

fn line_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    Some(LineFit {
        slope,
        intercept,
        residuals,
        sxx,
    })
}

/// Least-squares slope of `ln S` against `ln L`.
pub fn power_law_fit(sizes: &[usize], values: &[f64]) -> Result<PowerLawFit> {
    if sizes.len() != values.len() {
        return Err(Error::Dimension(format!(
            "{} sizes but {} values",
            sizes.len(),
            values.len()
        )));
    }
    if sizes.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "a power-law fit needs at least 3 points, got {}",
            sizes.len()
        )));
    }
    for (index, &value) in values.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositive { index, value });
        }
    }
    let x: Vec<f64> = sizes.iter().map(|&l| (l as f64).ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let fit = line_fit(&x, &y).ok_or_else(|| Error::InsufficientData("all sizes are equal".into()))?;
    let ssr: f64 = fit.residuals.iter().map(|r| r * r).sum();
    let stderr = (ssr / (x.len() as f64 - 2.0) / fit.sxx).sqrt();
    Ok(PowerLawFit {
        beta: fit.slope,
        stderr,
        intercept: fit.intercept,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseParams {
    pub delta_c: f64,
    pub nu: f64,
    pub zeta: f64,
}

impl CollapseParams {
    pub fn new(delta_c: f64, nu: f64, zeta: f64) -> Self {
        CollapseParams { delta_c, nu, zeta }
    }

    fn to_vec(self) -> Vec<f64> {
        vec![self.delta_c, self.nu, self.zeta]
    }
}

/// Rescaled point `(x, y) = (L^{1/v} (D - D_c), S L^{-z/v})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsedPoint {
    pub x: f64,
    pub y: f64,
    pub length: usize,
    pub delta: f64,
}

pub fn rescale(data: &ScalingDataset, params: CollapseParams) -> Vec<CollapsedPoint> {
    data.points
        .iter()
        .map(|p| {
            let l = p.length as f64;
            CollapsedPoint {
                x: l.powf(1.0 / params.nu) * (p.delta - params.delta_c),
                y: p.s_half * l.powf(-params.zeta / params.nu),
                length: p.length,
                delta: p.delta,
            }
        })
        .collect()
}

/// Weighted mean squared deviation (entropy units) of each point from the
/// local master curve of the other sizes.
///
/// Only points that fall inside the x-range of at least one other size
/// contribute; if none do the collapse is undefined and an error is
/// returned. Exact data give 0 wherever the scaling function is locally
/// linear and `O(h^4)` otherwise, `h` the rescaled spacing.
pub fn collapse_quality(data: &ScalingDataset, delta_c: f64, nu: f64, zeta: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() || !zeta.is_finite() || !delta_c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "invalid collapse parameters (delta_c={delta_c}, nu={nu}, zeta={zeta})"
        )));
    }
    let params = CollapseParams::new(delta_c, nu, zeta);
    let pts = rescale(data, params);
    let sizes = data.sizes();
    if sizes.len() < 2 {
        return Err(Error::InsufficientData("collapse needs at least 2 sizes".into()));
    }
    // Per-size point lists sorted by x.
    let groups: Vec<Vec<CollapsedPoint>> = sizes
        .iter()
        .map(|&l| {
            let mut g: Vec<CollapsedPoint> = pts.iter().filter(|p| p.length == l).copied().collect();
            g.sort_by(|a, b| a.x.total_cmp(&b.x));
            g
        })
        .collect();

    let mut total = 0.0;
    let mut norm = 0.0;
    let mut neighbours: Vec<(f64, f64)> = Vec::new();
    for (p, raw) in pts.iter().zip(&data.points) {
        neighbours.clear();
        for g in groups.iter().filter(|g| g[0].length != p.length) {
            let (lo, hi) = (g[0].x, g[g.len() - 1].x);
            if p.x < lo || p.x > hi {
                continue;
            }
            let mut by_distance: Vec<&CollapsedPoint> = g.iter().collect();
            by_distance.sort_by(|a, b| (a.x - p.x).abs().total_cmp(&(b.x - p.x).abs()));
            neighbours.extend(
                by_distance
                    .iter()
                    .take(NEIGHBOURS_PER_SIZE)
                    .map(|q| (q.x, q.y)),
            );
        }
        if neighbours.is_empty() {
            continue;
        }
        let xs: Vec<f64> = neighbours.iter().map(|n| n.0).collect();
        let ys: Vec<f64> = neighbours.iter().map(|n| n.1).collect();
        let predicted = match line_fit(&xs, &ys) {
            Some(fit) => fit.intercept + fit.slope * p.x,
            None => ys.iter().sum::<f64>() / ys.len() as f64,
        };
        let scale = (p.length as f64).powf(zeta / nu);
        let dev = (p.y - predicted) * scale;
        total += raw.weight * dev * dev;
        norm += raw.weight;
    }
    if norm == 0.0 {
        return Err(Error::InsufficientData(
            "no two sizes overlap in rescaled x".into(),
        ));
    }
    Ok(total / norm)
}

/// Box constraints for `(delta_c, nu, zeta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseBounds {
    pub lower: CollapseParams,
    pub upper: CollapseParams,
}

impl Default for CollapseBounds {
    fn default() -> Self {
        CollapseBounds {
            lower: CollapseParams::new(0.0, 0.2, -2.0),
            upper: CollapseParams::new(2.0, 10.0, 10.0),
        }
    }
}

impl CollapseBounds {
    pub fn contains(&self, p: CollapseParams) -> bool {
        let (lo, hi) = (self.lower.to_vec(), self.upper.to_vec());
        p.to_vec().iter().enumerate().all(|(i, v)| *v >= lo[i] && *v <= hi[i])
    }

    fn clip(&self, x: &[f64]) -> (Vec<f64>, bool) {
        let (lo, hi) = (self.lower.to_vec(), self.upper.to_vec());
        let mut clipped = false;
        let v = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let c = v.clamp(lo[i], hi[i]);
                clipped |= c != v;
                c
            })
            .collect();
        (v, clipped)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseErrors {
    pub delta_c: f64,
    pub nu: f64,
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    pub delta_c: f64,
    pub nu: f64,
    pub zeta: f64,
    pub quality: f64,
    /// Bootstrap standard deviations.
    pub errors: CollapseErrors,
    /// The optimum sat outside the box and was clipped onto it.
    pub clipped: bool,
    /// The best start converged within its evaluation budget.
    pub converged: bool,
    /// Bootstrap refits that produced a finite result.
    pub bootstrap_samples: usize,
}

impl CollapseFit {
    pub fn params(&self) -> CollapseParams {
        CollapseParams::new(self.delta_c, self.nu, self.zeta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseOptions {
    pub bootstrap_n: usize,
    pub seed: u64,
    /// Perturbed copies of the initial point used as extra starts.
    pub extra_starts: usize,
    /// Relative size of the start perturbations.
    pub start_spread: f64,
    pub max_evaluations: usize,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        CollapseOptions {
            bootstrap_n: 100,
            seed: 0,
            extra_starts: 8,
            start_spread: 0.3,
            max_evaluations: 3000,
        }
    }
}

struct LocalFit {
    x: Vec<f64>,
    value: f64,
    clipped: bool,
    converged: bool,
}

fn minimize_from(data: &ScalingDataset, start: &[f64], bounds: &CollapseBounds, max_evaluations: usize) -> LocalFit {
    let objective = |x: &[f64]| {
        let (c, _) = bounds.clip(x);
        collapse_quality(data, c[0], c[1], c[2]).unwrap_or(f64::INFINITY)
    };
    let m = nelder_mead(
        objective,
        start,
        &NelderMeadOptions {
            max_evaluations,
            ..Default::default()
        },
    );
    let (x, clipped) = bounds.clip(&m.x);
    LocalFit {
        x,
        value: m.value,
        clipped,
        converged: m.converged,
    }
}

fn best_of(data: &ScalingDataset, starts: &[Vec<f64>], bounds: &CollapseBounds, max_evaluations: usize) -> LocalFit {
    starts
        .iter()
        .map(|s| minimize_from(data, s, bounds, max_evaluations))
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one start")
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Multi-start simplex fit of the collapse parameters with bootstrap errors.
///
/// Starts are `init` and `extra_starts` copies with each coordinate scaled by
/// `1 + start_spread * u`, `u` uniform in `[-1, 1]`. Bootstrap replicate `b`
/// resamples the points with a generator seeded from `(seed, b)` and refits
/// from the best parameters, so results do not depend on the thread count.
pub fn fit_collapse(
    data: &ScalingDataset,
    init: CollapseParams,
    bounds: &CollapseBounds,
    options: &CollapseOptions,
) -> Result<CollapseFit> {
    data.validate_for_collapse()?;
    if !bounds.contains(init) {
        return Err(Error::InvalidArgument(format!(
            "initial collapse parameters {init:?} outside bounds"
        )));
    }
    collapse_quality(data, init.delta_c, init.nu, init.zeta)?;

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts = vec![init.to_vec()];
    for _ in 0..options.extra_starts {
        let s: Vec<f64> = init
            .to_vec()
            .iter()
            .map(|v| {
                let u: f64 = rng.random_range(-1.0..=1.0);
                let base = if *v == 0.0 { 0.1 } else { *v };
                v + base * options.start_spread * u
            })
            .collect();
        starts.push(bounds.clip(&s).0);
    }
    let best = best_of(data, &starts, bounds, options.max_evaluations);
    if !best.value.is_finite() {
        return Err(Error::InsufficientData("collapse objective undefined at every start".into()));
    }

    let replicates: Vec<Option<Vec<f64>>> = (0..options.bootstrap_n)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(b as u64 + 1);
            let n = data.points.len();
            let resampled = ScalingDataset::new(
                (0..n).map(|_| data.points[rng.random_range(0..n)]).collect(),
            );
            if resampled.sizes().len() < 2 {
                return None;
            }
            let fit = minimize_from(&resampled, &best.x, bounds, options.max_evaluations);
            fit.value.is_finite().then_some(fit.x)
        })
        .collect();
    let ok: Vec<Vec<f64>> = replicates.into_iter().flatten().collect();
    let column = |i: usize| std_dev(&ok.iter().map(|x| x[i]).collect::<Vec<_>>());

    Ok(CollapseFit {
        delta_c: best.x[0],
        nu: best.x[1],
        zeta: best.x[2],
        quality: best.value,
        errors: CollapseErrors {
            delta_c: column(0),
            nu: column(1),
            zeta: column(2),
        },
        clipped: best.clipped,
        converged: best.converged,
        bootstrap_samples: ok.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CftFit {
    /// Central charge (six times the slope).
    pub c: f64,
    pub constant: f64,
    pub rms_residual: f64,
}

/// Least squares of `S_l` against `ln sin(pi l / L)` with slope `c / 6`.
pub fn cft_log_fit(profile: &[(usize, f64)], length: usize) -> Result<CftFit> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &(l, s) in profile {
        if l == 0 || l >= length {
            return Err(Error::InvalidArgument(format!(
                "subsystem length {l} outside [1, {}]",
                length.saturating_sub(1)
            )));
        }
        let sine = (std::f64::consts::PI * l as f64 / length as f64).sin();
        if sine < 1e-6 {
            continue;
        }
        x.push(sine.ln());
        y.push(s);
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "a logarithmic fit needs at least 3 usable points, got {}",
            x.len()
        )));
    }
    let fit = line_fit(&x, &y)
        .ok_or_else(|| Error::InsufficientData("all usable points share one abscissa".into()))?;
    let rms = (fit.residuals.iter().map(|r| r * r).sum::<f64>() / x.len() as f64).sqrt();
    Ok(CftFit {
        c: 6.0 * fit.slope,
        constant: fit.intercept,
        rms_residual: rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_trivial_cases() {
        let sizes = [16, 32, 64, 128];
        let vals: Vec<f64> = sizes.iter().map(|&l| 2.0 * (l as f64).sqrt()).collect();
        let fit = power_law_fit(&sizes, &vals).unwrap();
        assert!((fit.beta - 0.5).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        let flat = power_law_fit(&sizes, &[0.7; 4]).unwrap();
        assert!(flat.beta.abs() < 1e-12);
        assert!(matches!(
            power_law_fit(&sizes, &[1.0, 0.0, 1.0, 1.0]),
            Err(Error::NonPositive { index: 1, .. })
        ));
        assert!(power_law_fit(&sizes[..2], &vals[..2]).is_err());
    }

    #[test]
    fn cft_fit_recovers_exact_form() {
        let length = 64;
        let profile: Vec<(usize, f64)> = (1..length)
            .map(|l| {
                let s = (std::f64::consts::PI * l as f64 / length as f64).sin();
                (l, s.ln() / 6.0 + 1.0)
            })
            .collect();
        let fit = cft_log_fit(&profile, length).unwrap();
        assert!((fit.c - 1.0).abs() < 1e-10);
        assert!((fit.constant - 1.0).abs() < 1e-10);
        assert!(fit.rms_residual < 1e-10);
        let flat: Vec<(usize, f64)> = (1..length).map(|l| (l, 0.3)).collect();
        assert!(cft_log_fit(&flat, length).unwrap().c.abs() < 1e-12);
        assert!(cft_log_fit(&profile[..2], length).is_err());
        assert!(cft_log_fit(&[(0, 1.0)], length).is_err());
    }

    #[test]
    fn single_size_collapse_is_undefined() {
        let data = ScalingDataset::new((0..6).map(|i| ScalingPoint::new(32, 0.05 * i as f64, 1.0)).collect());
        assert!(collapse_quality(&data, 0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn linear_master_curve_collapses_exactly() {
        let (dc, nu, zeta) = (0.15, 1.9, 2.0);
        let mut pts = Vec::new();
        for &l in &[32usize, 64, 96] {
            for i in 0..12 {
                let d = 0.1 + 0.01 * i as f64;
                let x = (l as f64).powf(1.0 / nu) * (d - dc);
                pts.push(ScalingPoint::new(l, d, (l as f64).powf(zeta / nu) * (0.8 - 0.1 * x)));
            }
        }
        let data = ScalingDataset::new(pts);
        assert!(collapse_quality(&data, dc, nu, zeta).unwrap() < 1e-20);
        assert!(collapse_quality(&data, dc * 1.3, nu, zeta).unwrap() > 1e-6);
    }
}
