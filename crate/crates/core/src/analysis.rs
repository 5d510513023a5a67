//! Localization-length estimation, saturation plateaus and scaling fits.

use std::f64::consts::PI;

use crate::dynamics::MapParams;
use crate::entanglement::block_entropy;
use crate::error::{Error, Result};
use crate::statevec::{Basis, StateVector};

/// Slots with probability below this fraction of the peak are left out of profile fits.
pub const PROFILE_FLOOR: f64 = 1e-12;
/// Width of the saturation window at the tail of a series.
pub const SATURATION_WINDOW: usize = 200;
/// Steps averaged when building a time-averaged profile.
pub const PROFILE_AVERAGE_STEPS: usize = 100;

/// `π²k²/3`.
pub fn theoretical_ell(k: f64) -> f64 {
    PI * PI * k * k / 3.0
}

/// `max(⌈2ℓ⌉, 50)`.
pub fn localization_time(ell: f64) -> usize {
    ((2.0 * ell).ceil() as usize).max(50)
}

/// Smallest momentum translation `p` under which the Floquet operator is invariant.
///
/// The kinetic phase `πMn²/N` is unchanged by `n → n + p` when `Mp/N` is an
/// integer and `Mp²/N` is even; the kick is diagonal in angle and commutes
/// with every translation. A profile localized at the origin therefore
/// reappears around `±p`, and only distances up to `p/2` describe the decay.
pub fn momentum_period(params: &MapParams) -> usize {
    let n = params.dim() as u128;
    let m = params.m() as u128;
    let mut p = 1u128;
    while p < n {
        if (m * p).is_multiple_of(n) && ((m * p / n) * p).is_multiple_of(2) {
            return p as usize;
        }
        p *= 2;
    }
    n as usize
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LocalizationEstimate {
    pub ell: f64,
    pub peak_slot: usize,
    /// Largest cyclic distance from the peak admitted to the fit.
    pub max_distance: usize,
    /// RMS residual of the log-profile fit.
    pub residual: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Fit of `ln|ψ(n)|²` against distance from the peak over the whole register.
pub fn estimate_ell(psi: &StateVector) -> Result<LocalizationEstimate> {
    psi.require_basis(Basis::Momentum)?;
    estimate_ell_from_profile(&psi.probabilities(), psi.dim() / 2)
}

/// Fit restricted to cyclic distances `≤ max_distance` from the peak.
///
/// The fitted model is `ln P = a - 2d/ℓ`, so `ℓ = -2/slope`.
pub fn estimate_ell_from_profile(probs: &[f64], max_distance: usize) -> Result<LocalizationEstimate> {
    let n = probs.len();
    let (peak_slot, &peak) = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .ok_or_else(|| Error::InsufficientSupport("empty profile".into()))?;
    if !(peak > 0.0) {
        return Err(Error::InsufficientSupport("profile has no weight".into()));
    }
    let floor = PROFILE_FLOOR * peak;
    let pts: Vec<(f64, f64)> = probs
        .iter()
        .enumerate()
        .filter_map(|(s, &p)| {
            let raw = s.abs_diff(peak_slot);
            let d = raw.min(n - raw);
            (p > floor && d <= max_distance).then(|| (d as f64, p.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientSupport(format!(
            "{} usable profile points, need 3",
            pts.len()
        )));
    }
    let line = LineFit::new(&pts);
    if !(line.slope < 0.0) {
        return Err(Error::Domain(format!("profile does not decay (slope {})", line.slope)));
    }
    Ok(LocalizationEstimate {
        ell: -2.0 / line.slope,
        peak_slot,
        max_distance,
        residual: line.rms,
        r_squared: line.r_squared,
        points_used: pts.len(),
    })
}

/// Running sum of `|ψ|²` for time-averaged profiles.
#[derive(Debug, Clone)]
pub struct ProfileAverage {
    sum: Vec<f64>,
    count: usize,
}

impl ProfileAverage {
    pub fn new(dim: usize) -> Self {
        Self {
            sum: vec![0.0; dim],
            count: 0,
        }
    }

    pub fn add(&mut self, psi: &StateVector) {
        for (s, a) in self.sum.iter_mut().zip(psi.amplitudes()) {
            *s += a.norm_sqr();
        }
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> Vec<f64> {
        let c = self.count.max(1) as f64;
        self.sum.iter().map(|s| s / c).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Saturation {
    pub mean: f64,
    /// `1.96·sd/√n` over the window, treating samples as independent.
    pub ci_halfwidth: f64,
    pub samples: usize,
}

/// Mean of the last [`SATURATION_WINDOW`] values.
pub fn saturation_value(values: &[f64], ell: f64) -> Result<f64> {
    Ok(saturation_stats(values, ell)?.mean)
}

pub fn saturation_stats(values: &[f64], ell: f64) -> Result<Saturation> {
    let needed = localization_time(ell) + SATURATION_WINDOW;
    if values.len() < needed {
        return Err(Error::Window {
            needed,
            got: values.len(),
        });
    }
    Ok(mean_with_ci(&values[values.len() - SATURATION_WINDOW..]))
}

/// Mean and normal-approximation 95% half-width of a sample.
pub fn mean_with_ci(values: &[f64]) -> Saturation {
    let n = values.len() as f64;
    // shifted sum: exact for constant data, less cancellation otherwise
    let shift = values.first().copied().unwrap_or(0.0);
    let mean = shift + values.iter().map(|v| v - shift).sum::<f64>() / n;
    let ci_halfwidth = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        1.96 * var.sqrt() / n.sqrt()
    } else {
        0.0
    };
    Saturation {
        mean,
        ci_halfwidth,
        samples: values.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    PowerLaw,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FitReport {
    pub model: FitModel,
    pub coefficient: f64,
    /// Exponent for power laws, decay rate `A` for `C ~ exp(-Aℓ)`.
    pub exponent_or_rate: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

struct LineFit {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    rms: f64,
}

impl LineFit {
    fn new(pts: &[(f64, f64)]) -> Self {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let intercept = my - slope * mx;
        let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let r_squared = if syy > 0.0 {
            (1.0 - ss_res / syy).clamp(0.0, 1.0)
        } else {
            1.0
        };
        Self {
            slope,
            intercept,
            r_squared,
            rms: (ss_res / n).sqrt(),
        }
    }
}

fn sorted_points(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if points.len() < 3 {
        return Err(Error::InsufficientSupport(format!("{} points, need 3", points.len())));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(pts)
}

/// `C = a ℓ^b` by least squares in log-log space.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitReport> {
    let pts = sorted_points(points)?;
    if let Some(p) = pts.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Domain(format!("power-law fit needs positive data, got {p:?}")));
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|p| (p.0.ln(), p.1.ln())).collect();
    let line = LineFit::new(&logs);
    Ok(FitReport {
        model: FitModel::PowerLaw,
        coefficient: line.intercept.exp(),
        exponent_or_rate: line.slope,
        r_squared: line.r_squared,
        points_used: pts.len(),
    })
}

/// `C = a e^{-Aℓ}` by least squares on `ln C`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitReport> {
    let pts = sorted_points(points)?;
    if let Some(p) = pts.iter().find(|p| !(p.1 > 0.0) || !p.0.is_finite()) {
        return Err(Error::Domain(format!("exponential fit needs C > 0, got {p:?}")));
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, p.1.ln())).collect();
    let line = LineFit::new(&logs);
    Ok(FitReport {
        model: FitModel::Exponential,
        coefficient: line.intercept.exp(),
        exponent_or_rate: 0.0 - line.slope,
        r_squared: line.r_squared,
        points_used: pts.len(),
    })
}

/// Small-ℓ concurrence law `√ℓ · 4^{-j}` up to an overall constant.
///
/// Only the dependence on `ℓ` and on the outer label `j` is modelled; `i`
/// is validated but does not enter.
pub fn small_ell_concurrence_model(ell: f64, i: usize, j: usize) -> Result<f64> {
    if i == 0 || j <= i {
        return Err(Error::Argument(format!("need 1 <= i < j, got ({i}, {j})")));
    }
    if !(ell > 0.0) {
        return Err(Error::Domain(format!("ell must be positive, got {ell}")));
    }
    Ok(ell.sqrt() * 0.25f64.powi(j as i32))
}

/// Predicted concurrence-peak location `2^i` for the pair `(i, i+1)`.
pub fn critical_ell(i: usize) -> f64 {
    2f64.powi(i as i32)
}

/// Point with the largest value; ties go to the smallest abscissa.
pub fn peak_location(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.into_iter().reduce(|best, p| if p.1 > best.1 { p } else { best })
}

/// Largest `m` with `S(block 1..m) > s_c`, or 0.
pub fn count_entangled_qubits(psi: &StateVector, s_c: f64) -> Result<usize> {
    let mut count = 0;
    for m in 1..psi.n_q() {
        let block: Vec<usize> = (1..=m).collect();
        if block_entropy(psi, &block)? > s_c {
            count = m;
        }
    }
    Ok(count)
}
