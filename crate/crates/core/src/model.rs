//! The non-reciprocal tight-binding chain with a linear (Wannier-Stark)
//! potential.
//!
//! The single-particle matrix is
//!
//! ```text
//! H[j, j+1] = J_L = -(1 - gamma)      (hop from j+1 to j)
//! H[j+1, j] = J_R = -(1 + gamma)      (hop from j to j+1)
//! H[j, j]   = delta * j               (1-based site index j)
//! ```
//!
//! with the wrap-around pair `H[L, 1] = J_L`, `H[1, L] = J_R` under periodic
//! boundaries. Storage is 0-based, so the tilt on row `i` is `delta * (i + 1)`.

use std::fmt;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    pub fn min_length(self) -> usize {
        match self {
            Boundary::Open => 2,
            Boundary::Periodic => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "open" | "obc" => Ok(Boundary::Open),
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            other => Err(Error::Config(format!("unknown boundary condition `{other}`"))),
        }
    }
}

/// Full parameter set of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Asymmetric non-Hermitian strength.
    pub gamma: f64,
    /// Gradient of the linear potential.
    pub delta: f64,
    pub length: usize,
    pub boundary: Boundary,
}

impl ModelParams {
    pub fn new(gamma: f64, delta: f64, length: usize, boundary: Boundary) -> Result<Self> {
        let p = ModelParams {
            gamma,
            delta,
            length,
            boundary,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn open(gamma: f64, delta: f64, length: usize) -> Result<Self> {
        Self::new(gamma, delta, length, Boundary::Open)
    }

    pub fn periodic(gamma: f64, delta: f64, length: usize) -> Result<Self> {
        Self::new(gamma, delta, length, Boundary::Periodic)
    }

    pub fn validate(&self) -> Result<()> {
        let minimum = self.boundary.min_length();
        if self.length < minimum {
            return Err(Error::InvalidLength {
                length: self.length,
                minimum,
                boundary: self.boundary,
            });
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma = {}", self.gamma)));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must be finite and non-negative, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// Leftward hopping amplitude `J_L = -(1 - gamma)`.
    pub fn hop_left(&self) -> f64 {
        -(1.0 - self.gamma)
    }

    /// Rightward hopping amplitude `J_R = -(1 + gamma)`.
    pub fn hop_right(&self) -> f64 {
        -(1.0 + self.gamma)
    }

    /// On-site potential at the 1-based site `j`.
    pub fn tilt(&self, j: usize) -> f64 {
        self.delta * j as f64
    }
}

/// Single-particle matrix of the effective Hamiltonian together with the
/// parameters it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    pub entries: Array2<C64>,
    pub params: ModelParams,
}

impl HamiltonianMatrix {
    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        crate::linalg::hermiticity_defect(self.entries.view()) <= tol
    }
}

fn chain_matrix(length: usize, hop_left: f64, hop_right: f64, delta: f64) -> Array2<C64> {
    let mut h = Array2::<C64>::zeros((length, length));
    for i in 0..length {
        h[[i, i]] = C64::new(delta * (i + 1) as f64, 0.0);
    }
    for i in 0..length - 1 {
        h[[i, i + 1]] = C64::new(hop_left, 0.0);
        h[[i + 1, i]] = C64::new(hop_right, 0.0);
    }
    h
}

pub fn build_hamiltonian(params: &ModelParams) -> Result<HamiltonianMatrix> {
    params.validate()?;
    let l = params.length;
    let mut h = chain_matrix(l, params.hop_left(), params.hop_right(), params.delta);
    if params.boundary == Boundary::Periodic {
        h[[l - 1, 0]] = C64::new(params.hop_left(), 0.0);
        h[[0, l - 1]] = C64::new(params.hop_right(), 0.0);
    }
    Ok(HamiltonianMatrix {
        entries: h,
        params: *params,
    })
}

/// Builds `H - (i/2) sum_j L_j^dag L_j` from the Hermitian chain (hopping -1,
/// tilt `delta * j`) and the collective loss operators
/// `L_j = sqrt(|gamma|) (c_j + i sgn(gamma) c_{j+1})`, `j = 1..L-1`.
///
/// Expanding the quadratic form gives hoppings `-(1 -+ gamma/2)` and an
/// imaginary on-site loss of `|gamma|/2` per jump operator touching the site.
pub fn effective_from_jumps(params: &ModelParams) -> Result<HamiltonianMatrix> {
    params.validate()?;
    if params.boundary != Boundary::Open {
        return Err(Error::UnsupportedBoundary {
            operation: "effective_from_jumps",
        });
    }
    let l = params.length;
    let mut h = chain_matrix(l, -1.0, -1.0, params.delta);
    if params.gamma != 0.0 {
        let rate = params.gamma.abs();
        let sign = params.gamma.signum();
        let half_i = C64::new(0.0, -0.5);
        for j in 0..l - 1 {
            // L_j^dag L_j = |g| (n_j + n_{j+1} + i s c_j^dag c_{j+1} - i s c_{j+1}^dag c_j)
            h[[j, j]] += half_i * rate;
            h[[j + 1, j + 1]] += half_i * rate * sign * sign;
            h[[j, j + 1]] += half_i * C64::new(0.0, rate * sign);
            h[[j + 1, j]] += half_i * C64::new(0.0, -rate * sign);
        }
    }
    Ok(HamiltonianMatrix {
        entries: h,
        params: *params,
    })
}

/// Comparison between the jump-operator construction and the chain matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub gamma: f64,
    /// Non-reciprocity read off the jump construction in the
    /// `J_L = -(1 - g)`, `J_R = -(1 + g)` form.
    pub gamma_effective: f64,
    /// `gamma_effective / gamma` (0 when gamma = 0).
    pub asymmetry_ratio: f64,
    /// Best-fit uniform imaginary diagonal shift (mean of `Im H_jj`).
    pub uniform_shift: f64,
    /// `max_j |Im H_jj - uniform_shift|`.
    pub shift_residual: f64,
    /// Mean imaginary diagonal over bulk sites `2..L-1`.
    pub bulk_imag_mean: f64,
    /// `max - min` of the imaginary diagonal over bulk sites.
    pub bulk_imag_spread: f64,
    /// Edge imaginary diagonal minus the bulk mean, `[site 1, site L]`.
    pub boundary_deviation: [f64; 2],
    /// `max |H_jump - H_chain(gamma_effective) - i diag|` once the imaginary
    /// diagonal has been removed.
    pub hopping_residual: f64,
    /// `max |H_jump - H_chain(gamma)|` including the imaginary diagonal.
    pub residual_vs_chain: f64,
}

pub fn jump_consistency_report(params: &ModelParams) -> Result<ConsistencyReport> {
    let jumps = effective_from_jumps(params)?;
    let chain = build_hamiltonian(params)?;
    let l = params.length;
    let h = &jumps.entries;

    let j_left = h[[0, 1]].re;
    let j_right = h[[1, 0]].re;
    let gamma_effective = (j_left - j_right) / -(j_left + j_right);
    let asymmetry_ratio = if params.gamma == 0.0 {
        0.0
    } else {
        gamma_effective / params.gamma
    };

    let imag: Vec<f64> = (0..l).map(|j| h[[j, j]].im).collect();
    let uniform_shift = imag.iter().sum::<f64>() / l as f64;
    let shift_residual = imag
        .iter()
        .map(|v| (v - uniform_shift).abs())
        .fold(0.0, f64::max);
    let bulk = if l > 2 { &imag[1..l - 1] } else { &imag[..] };
    let bulk_imag_mean = bulk.iter().sum::<f64>() / bulk.len() as f64;
    let (lo, hi) = bulk
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let bulk_imag_spread = hi - lo;
    let boundary_deviation = [imag[0] - bulk_imag_mean, imag[l - 1] - bulk_imag_mean];

    let mut reference = chain_matrix(
        l,
        -(1.0 - gamma_effective),
        -(1.0 + gamma_effective),
        params.delta,
    );
    for j in 0..l {
        reference[[j, j]] += C64::new(0.0, imag[j]);
    }
    let hopping_residual = crate::linalg::max_abs((h - &reference).view());
    let residual_vs_chain = crate::linalg::max_abs((h - &chain.entries).view());

    Ok(ConsistencyReport {
        gamma: params.gamma,
        gamma_effective,
        asymmetry_ratio,
        uniform_shift,
        shift_residual,
        bulk_imag_mean,
        bulk_imag_spread,
        boundary_deviation,
        hopping_residual,
        residual_vs_chain,
    })
}
