//! Objective rotation sweeps and the regular-polygon benchmark problem.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::model::{objective_angle, Algorithm, PdhgMode, Point2, ProblemSpec, SolverSettings, SolverTrace};

fn range(quarter: bool) -> f64 {
    if quarter { FRAC_PI_2 } else { TAU }
}

/// Offsets of a sweep in `steps` equal increments: `steps` angles over the half-open full
/// turn, or `steps + 1` angles over the closed quarter turn.
pub fn step_offsets(steps: usize, quarter: bool) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidSettings("rotation needs at least 1 step".into()));
    }
    let inc = range(quarter) / steps as f64;
    let count = if quarter { steps + 1 } else { steps };
    Ok((0..count).map(|k| k as f64 * inc).collect())
}

/// Offsets `k·step` covering the sweep range: the closed quarter turn, or the half-open
/// full turn.
pub fn angle_step_offsets(step: f64, quarter: bool) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidSettings(format!("angle step must be positive, got {step}")));
    }
    let r = range(quarter);
    let ratio = r / step;
    let last = if quarter {
        (ratio + 1e-9).floor() as usize
    } else {
        ((ratio - 1e-9).ceil() as usize).saturating_sub(1)
    };
    Ok((0..=last).map(|k| k as f64 * step).collect())
}

/// Solves `spec` once per offset, rotating its objective (norm preserved) by each offset.
/// Each trace records its absolute objective angle in `settings.angle`.
pub fn rotate_sweep(
    spec: &ProblemSpec,
    algorithm: Algorithm,
    settings: &SolverSettings,
    offsets: &[f64],
) -> Result<Vec<SolverTrace>> {
    let base = objective_angle(spec)?;
    let norm = spec.objective_point().norm();
    offsets
        .iter()
        .map(|&off| {
            let theta = base + off;
            let rotated = spec.with_objective([norm * theta.cos(), norm * theta.sin()]);
            let mut s = settings.clone();
            s.angle = Some(theta);
            crate::solve(&rotated, algorithm, &s)
        })
        .collect()
}

/// Regular `m`-gon on the radius-10 circle around (5, 5), rotated by 0.1 rad, with a
/// unit objective at 45°.
pub fn regular_polygon(m: usize) -> Result<ProblemSpec> {
    if m < 3 {
        return Err(Error::DegenerateRegion(format!("a polygon needs at least 3 vertices, got {m}")));
    }
    let vertices: Vec<Point2> = (0..m)
        .map(|k| {
            let t = 0.1 + TAU * k as f64 / m as f64;
            Point2::new(5.0 + 10.0 * t.cos(), 5.0 + 10.0 * t.sin())
        })
        .collect();
    let c = std::f64::consts::FRAC_1_SQRT_2;
    Ok(ProblemSpec::from_region([c, c], Region::closed(&vertices)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: &'static str,
    pub median_ms: f64,
    pub iterations: usize,
    pub objective_value: Option<f64>,
}

/// Benchmark configurations: the four solvers, PDHG once per mode.
pub fn bench_configs(base: &SolverSettings) -> Vec<(&'static str, Algorithm, SolverSettings)> {
    let with_mode = |mode| SolverSettings { pdhg_mode: mode, ..base.clone() };
    vec![
        ("simplex", Algorithm::Simplex, base.clone()),
        ("ipm", Algorithm::Ipm, base.clone()),
        ("central_path", Algorithm::CentralPath, base.clone()),
        ("pdhg-eq", Algorithm::Pdhg, with_mode(PdhgMode::Equality)),
        ("pdhg-ineq", Algorithm::Pdhg, with_mode(PdhgMode::Inequality)),
    ]
}

/// Median wall-clock milliseconds of `repeats` runs of `f`, with the last result.
pub fn time_median<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    let repeats = repeats.max(1);
    let mut times = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats {
        let t0 = Instant::now();
        last = Some(f()?);
        times.push(t0.elapsed().as_secs_f64() * 1e3);
    }
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 { times[mid] } else { 0.5 * (times[mid - 1] + times[mid]) };
    Ok((median, last.expect("at least one run")))
}

/// Solver iterations behind a trace; decimated traces carry the index in their meta.
pub fn iteration_count(trace: &SolverTrace) -> usize {
    match trace.iterates.last() {
        Some(it) => it.meta.get("iteration").map_or(trace.iterates.len() - 1, |&k| k as usize),
        None => 0,
    }
}

/// Times every configuration of [`bench_configs`] on the regular `m`-gon.
pub fn bench(m: usize, repeats: usize, base: &SolverSettings) -> Result<Vec<BenchRow>> {
    let spec = regular_polygon(m)?;
    bench_configs(base)
        .into_iter()
        .map(|(name, alg, settings)| {
            let (median_ms, trace) = time_median(repeats, || crate::solve(&spec, alg, &settings))?;
            Ok(BenchRow {
                name,
                median_ms,
                iterations: iteration_count(&trace),
                objective_value: trace.objective_value,
            })
        })
        .collect()
}
