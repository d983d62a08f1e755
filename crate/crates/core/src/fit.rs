//! Least-squares recovery of the path difference from a trace-distance trajectory.
//!
//! Only `Δx` is free; μ, σ and Δn stay at the template values. The objective
//! `SSR(Δx) = Σ (d_k − |κ_j(τ_k; Δx)|)²` is almost periodic in Δx with the
//! fringe period `c/μ`, and for fixed echo shift `|κ_j|` is even in the phase
//! about every fringe extremum. Each half-fringe segment between extrema
//! therefore holds one copy of the solution. The search samples a coarse grid
//! over about ±1 fringe around the template, refines the best coarse point of every
//! segment by golden section, and keeps the overall best.

use crate::config::{Path, PhysicalConfig};
use crate::dephasing::PathChannel;
use crate::error::{Error, Result};
use crate::grid::DistanceTrajectory;
use crate::optimize::golden_section;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Points in the coarse grid over the nominal bracket, centered on the template.
    pub coarse_points: usize,
    /// Nominal half-width of the search bracket in fringe periods; the edges
    /// are widened to the next point halfway between fringe extrema.
    pub half_width_periods: f64,
    /// Absolute tolerance on the fitted Δx, m.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { coarse_points: 41, half_width_periods: 1.0, tolerance: 1e-11 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Fitted path difference, m.
    pub delta_x: f64,
    /// Residual sum of squares at `delta_x`.
    pub ssr: f64,
    /// `|κ_j|` at the fitted Δx on the data grid.
    pub model: DistanceTrajectory,
    pub evaluations: usize,
}

/// Sum of squared residuals between `data` and the model at `delta_x`.
///
/// Infinite where the path probability is degenerate.
pub fn residual(data: &DistanceTrajectory, template: &PhysicalConfig, path: Path, delta_x: f64) -> f64 {
    let Ok(channel) = PathChannel::new(&template.with_delta_x(delta_x), path) else {
        return f64::INFINITY;
    };
    data.iter()
        .map(|(tau, d)| {
            let e = d - channel.kappa(tau).norm();
            e * e
        })
        .sum()
}

pub fn fit_decoherence(noisy: &DistanceTrajectory, template: &PhysicalConfig, path: Path) -> Result<FitResult> {
    fit_decoherence_with(noisy, template, path, &FitOptions::default())
}

pub fn fit_decoherence_with(
    noisy: &DistanceTrajectory,
    template: &PhysicalConfig,
    path: Path,
    options: &FitOptions,
) -> Result<FitResult> {
    if options.coarse_points < 3 {
        return Err(Error::invalid("coarse_points", "need at least 3 coarse points"));
    }
    if !(options.tolerance > 0.0 && options.half_width_periods > 0.0) {
        return Err(Error::invalid("tolerance", "tolerance and bracket width must be > 0"));
    }
    let mut evaluations = 0usize;
    let mut ssr = |x: f64| {
        evaluations += 1;
        residual(noisy, template, path, x)
    };

    let period = template.fringe_period();
    let half = 0.5 * period;
    let center = template.delta_x;
    let width = options.half_width_periods * period;
    let step = width / (options.coarse_points / 2) as f64;
    // bracket edges sit halfway between extrema so that no extremum is an edge
    let lo = ((((center - width) / half) - 0.5).floor() + 0.5) * half;
    let hi = ((((center + width) / half) - 0.5).ceil() + 0.5) * half;
    let first = ((lo - center) / step).ceil() as i64;
    let last = ((hi - center) / step).floor() as i64;
    let coarse: Vec<(f64, f64)> = (first..=last)
        .map(|i| {
            let x = center + i as f64 * step;
            (x, ssr(x))
        })
        .collect();

    // segment edges at fringe extrema, Δx = m c / (2μ)
    let mut edges = vec![lo];
    let mut m = (lo / half).floor() + 1.0;
    while m * half < hi {
        edges.push(m * half);
        m += 1.0;
    }
    edges.push(hi);

    let mut best = (f64::NAN, f64::INFINITY);
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let mut start = (a, ssr(a));
        let vb = ssr(b);
        if vb < start.1 {
            start = (b, vb);
        }
        for &(x, v) in coarse.iter().filter(|(x, _)| *x > a && *x < b) {
            if v < start.1 {
                start = (x, v);
            }
        }
        if !start.1.is_finite() {
            continue;
        }
        let lo_b = (start.0 - step).max(a);
        let hi_b = (start.0 + step).min(b);
        let refined = golden_section(&mut ssr, lo_b, hi_b, options.tolerance, Some(start));
        if refined.value < best.1 {
            best = (refined.x, refined.value);
        }
    }

    let (delta_x, best_ssr) = best;
    if !best_ssr.is_finite() {
        return Err(Error::FitDiverged { delta_x: center });
    }
    if (delta_x - lo).abs() <= options.tolerance || (hi - delta_x).abs() <= options.tolerance {
        return Err(Error::FitDiverged { delta_x });
    }
    let model = PathChannel::new(&template.with_delta_x(delta_x), path)?.distances(&noisy.grid);
    Ok(FitResult { delta_x, ssr: best_ssr, model, evaluations })
}
