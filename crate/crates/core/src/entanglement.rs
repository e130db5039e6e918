//! Entanglement entropy, mutual information and smoothed steady-state values
//! from single-particle correlation matrices.
//!
//! All entropies are in nats.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::propagation::{CorrelationMatrix, TrajectoryRecord};

/// Correlation-matrix eigenvalues are clamped to `[EPS, 1 - EPS]` before
/// taking logarithms.
pub const SPECTRUM_CLAMP: f64 = 1e-12;

/// Ordered set of 1-based site indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemSpec {
    sites: Vec<usize>,
}

impl SubsystemSpec {
    /// Sites must be nonempty, strictly increasing and within `1..=length`.
    pub fn new(sites: Vec<usize>, length: usize) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidSubsystem("empty subsystem".into()));
        }
        if let Some(w) = sites.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubsystem(format!(
                "sites not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        if sites[0] == 0 || *sites.last().unwrap() > length {
            return Err(Error::InvalidSubsystem(format!(
                "sites must lie in [1, {length}]"
            )));
        }
        Ok(SubsystemSpec { sites })
    }

    /// Sites `first..=last`.
    pub fn range(first: usize, last: usize, length: usize) -> Result<Self> {
        if first > last {
            return Err(Error::InvalidSubsystem(format!("empty range {first}..={last}")));
        }
        Self::new((first..=last).collect(), length)
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn zero_based(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s - 1).collect()
    }

    /// Merged, sorted union of two disjoint subsystems.
    pub fn union(&self, other: &SubsystemSpec) -> Result<SubsystemSpec> {
        let mut merged = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.sites.len() || j < other.sites.len() {
            let a = self.sites.get(i).copied().unwrap_or(usize::MAX);
            let b = other.sites.get(j).copied().unwrap_or(usize::MAX);
            if a == b {
                return Err(Error::OverlappingSubsystems(a));
            }
            if a < b {
                merged.push(a);
                i += 1;
            } else {
                merged.push(b);
                j += 1;
            }
        }
        Ok(SubsystemSpec { sites: merged })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EntropyValue {
    pub nats: f64,
}

/// `-sum_k [l ln l + (1-l) ln(1-l)]` over a correlation spectrum.
pub fn entropy_from_spectrum(spectrum: impl IntoIterator<Item = f64>) -> f64 {
    let s: f64 = spectrum
        .into_iter()
        .map(|l| {
            let l = l.clamp(SPECTRUM_CLAMP, 1.0 - SPECTRUM_CLAMP);
            -(l * l.ln() + (1.0 - l) * (1.0 - l).ln())
        })
        .sum();
    s.max(0.0)
}

fn check_fits(c: &CorrelationMatrix, a: &SubsystemSpec) -> Result<()> {
    let last = *a.sites.last().unwrap();
    if last > c.sites() {
        return Err(Error::InvalidSubsystem(format!(
            "site {last} outside a {}-site correlation matrix",
            c.sites()
        )));
    }
    Ok(())
}

pub fn subsystem_entropy(c: &CorrelationMatrix, a: &SubsystemSpec) -> Result<EntropyValue> {
    check_fits(c, a)?;
    let sub = linalg::principal_submatrix(c.entries.view(), &a.zero_based());
    let spectrum = linalg::hermitian_eigenvalues(&sub)?;
    Ok(EntropyValue {
        nats: entropy_from_spectrum(spectrum.iter().copied()),
    })
}

/// `I = S_A + S_B - S_{A u B}` for disjoint `A`, `B`.
pub fn mutual_information(c: &CorrelationMatrix, a: &SubsystemSpec, b: &SubsystemSpec) -> Result<f64> {
    let ab = a.union(b)?;
    check_fits(c, &ab)?;
    Ok(subsystem_entropy(c, a)?.nats + subsystem_entropy(c, b)?.nats - subsystem_entropy(c, &ab)?.nats)
}

/// `(l, S_l)` for the left blocks `1..=l`, `l = 1..L-1`.
pub fn entropy_profile(c: &CorrelationMatrix) -> Result<Vec<(usize, f64)>> {
    let n = c.sites();
    (1..n)
        .map(|l| {
            let sub = c.entries.slice(ndarray::s![..l, ..l]).to_owned();
            let spectrum = linalg::hermitian_eigenvalues(&sub)?;
            Ok((l, entropy_from_spectrum(spectrum.iter().copied())))
        })
        .collect()
}

/// Default mutual-information pair: `A = [L/8+1, L/4]`, `B = [3L/4+1, 7L/8]`.
pub fn default_mutual_info_pair(length: usize) -> Result<(SubsystemSpec, SubsystemSpec)> {
    if length < 8 || length % 8 != 0 {
        return Err(Error::InvalidArgument(format!(
            "the default mutual-information placement needs L divisible by 8, got {length}"
        )));
    }
    let e = length / 8;
    Ok((
        SubsystemSpec::range(e + 1, 2 * e, length)?,
        SubsystemSpec::range(6 * e + 1, 7 * e, length)?,
    ))
}

/// Convolution with `exp(-(n/sigma)^2 / 2)` truncated at `|n| <= ceil(4 sigma)`.
///
/// Near the ends the kernel is renormalized over the in-range support, so the
/// output has the input's length and a constant series is a fixed point. A
/// non-positive or non-finite `sigma` returns the series unchanged.
pub fn gaussian_smooth(series: &[f64], sigma: f64) -> Vec<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return series.to_vec();
    }
    let half = (4.0 * sigma).ceil() as usize;
    let kernel: Vec<f64> = (0..=half)
        .map(|n| (-0.5 * (n as f64 / sigma).powi(2)).exp())
        .collect();
    let len = series.len();
    (0..len)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(len - 1);
            let (mut acc, mut norm) = (0.0, 0.0);
            for (j, &v) in series.iter().enumerate().take(hi + 1).skip(lo) {
                let w = kernel[i.abs_diff(j)];
                acc += w * v;
                norm += w;
            }
            acc / norm
        })
        .collect()
}

/// Mean of the smoothed series over its final `tail_fraction`.
pub fn smoothed_tail_mean(series: &[f64], sigma: f64, tail_fraction: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::InsufficientData("empty series".into()));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tail_fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let smoothed = gaussian_smooth(series, sigma);
    let n = ((tail_fraction * series.len() as f64).ceil() as usize).clamp(1, series.len());
    let tail = &smoothed[series.len() - n..];
    Ok(tail.iter().sum::<f64>() / n as f64)
}

/// Steady-state half-chain entropy of a trajectory.
pub fn steady_state_entropy(record: &TrajectoryRecord, sigma: f64, tail_fraction: f64) -> Result<f64> {
    smoothed_tail_mean(&record.ee_series, sigma, tail_fraction)
}

/// Steady-state mutual information of a trajectory that tracked it.
pub fn steady_state_mutual_info(record: &TrajectoryRecord, sigma: f64, tail_fraction: f64) -> Result<f64> {
    let series = record
        .mi_series
        .as_ref()
        .ok_or_else(|| Error::InsufficientData("trajectory did not track mutual information".into()))?;
    smoothed_tail_mean(series, sigma, tail_fraction)
}
