//! Invariant checks on saved trajectories and output directories.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::table::Manifest;
use crate::entanglement::entropy_profile;
use crate::error::{Error, Result};
use crate::propagation::TrajectoryRecord;

/// Tolerance for projector properties of the correlation matrix.
pub const PROJECTOR_TOLERANCE: f64 = 1e-8;
/// Tolerance for `S(1..l) = S(l+1..L)` on pure states.
pub const PURITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn push(&mut self, name: &str, value: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<28} {:.3e} (tolerance {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

/// Checks a trajectory record against the invariants of pure Slater states.
pub fn check_record(rec: &TrajectoryRecord) -> Result<VerifyReport> {
    let mut r = VerifyReport::default();
    let n = rec.particles();
    let d = rec.final_correlation.diagnostics(n)?;
    r.push("hermiticity", d.hermiticity, PROJECTOR_TOLERANCE);
    r.push("idempotency", d.idempotency, PROJECTOR_TOLERANCE);
    r.push("trace", d.trace_error, PROJECTOR_TOLERANCE);
    r.push("spectrum_in_unit_interval", d.spectrum_excess, PROJECTOR_TOLERANCE);

    let profile = entropy_profile(&rec.final_correlation)?;
    let len = rec.params.length;
    let asym = profile
        .iter()
        .map(|&(l, s)| (s - profile[len - l - 1].1).abs())
        .fold(0.0_f64, f64::max);
    r.push("purity_symmetry", asym, PURITY_TOLERANCE);

    let cap = (len / 2) as f64 * 2f64.ln();
    let over = rec
        .ee_series
        .iter()
        .map(|&s| if s.is_finite() { (s - cap).max(-s).max(0.0) } else { f64::INFINITY })
        .fold(0.0_f64, f64::max);
    r.push("entropy_bounds", over, 1e-8);

    let occupation = rec
        .density_series
        .iter()
        .map(|s| (s.profile.iter().sum::<f64>() - n as f64).abs())
        .fold(0.0_f64, f64::max);
    r.push("particle_number", occupation, PROJECTOR_TOLERANCE);

    if let Some(mi) = &rec.mi_series {
        let neg = mi.iter().map(|&v| (-v).max(0.0)).fold(0.0_f64, f64::max);
        r.push("mutual_info_nonnegative", neg, 1e-8);
    }
    Ok(r)
}

/// Loads a trajectory JSON written by a sweep and checks it.
pub fn verify_trajectory(path: &Path) -> Result<VerifyReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let rec: TrajectoryRecord = serde_json::from_str(&text).map_err(|e| Error::Malformed {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    check_record(&rec)
}

/// Recomputes the hashes listed in `dir/manifest.json`.
pub fn verify_manifest(dir: &Path) -> Result<VerifyReport> {
    let m = Manifest::read(dir)?;
    let bad = m.verify(dir);
    let mut r = VerifyReport::default();
    r.push("manifest_hash_mismatches", bad.len() as f64, 0.0);
    r.push("manifest_partial", if m.partial { 1.0 } else { 0.0 }, 0.0);
    Ok(r)
}
