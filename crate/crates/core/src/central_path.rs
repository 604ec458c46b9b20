//! Primal central path: maximizers of `f_μ(x) = c·x + μ·Σ log(b_i − a_i·x)` over a
//! decreasing μ schedule, each found by damped Newton ascent warm-started from the previous.

use crate::error::{Error, Result};
use crate::geometry;
use crate::linalg::{lu_factor, DenseMatrix};
use crate::model::{Algorithm, Iterate, Point2, ProblemSpec, SolverSettings, SolverTrace, Status};
use crate::run::RunControl;

pub const MU_FIRST: f64 = 1e3;
pub const MU_LAST: f64 = 1e-5;
pub const ARMIJO: f64 = 1e-4;
pub const RIDGE: f64 = 1e-12;
/// Minimum slack of the starting point.
pub const START_SLACK: f64 = 1e-6;
/// `‖x‖∞` beyond which the barrier problem is declared unbounded.
pub const DIVERGENCE_LIMIT: f64 = 1e6;
const MAX_DOUBLINGS: usize = 60;
const MAX_HALVINGS: usize = 60;

/// `count` geometrically spaced values from 1e3 down to 1e-5, endpoints exact.
pub fn mu_schedule(count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidSettings(format!("mu schedule needs at least 2 values, got {count}")));
    }
    let (hi, lo) = (MU_FIRST.log10(), MU_LAST.log10());
    let last = (count - 1) as f64;
    let mut mus: Vec<f64> =
        (0..count).map(|k| 10f64.powf(hi + (lo - hi) * k as f64 / last)).collect();
    mus[0] = MU_FIRST;
    mus[count - 1] = MU_LAST;
    Ok(mus)
}

/// A point with every slack at least [`START_SLACK`].
///
/// Starts from the vertex centroid (or the centroid of the constraint-line intersections
/// for problems without vertices) and, if that is not interior enough, walks along the
/// average inward normal with doubling step.
pub fn strictly_feasible_start(spec: &ProblemSpec) -> Result<Point2> {
    let base = if !spec.vertices.is_empty() {
        centroid(&spec.vertices)
    } else {
        let corners = geometry::feasible_intersections(&spec.halfspaces);
        if corners.is_empty() { Point2::ORIGIN } else { centroid(&corners) }
    };
    if spec.min_slack(base) >= START_SLACK {
        return Ok(base);
    }
    let m = spec.m() as f64;
    let inward = spec.halfspaces.iter().fold(Point2::ORIGIN, |acc, h| acc - h.normal()).scale(1.0 / m);
    if inward.norm() == 0.0 {
        return Err(Error::EmptyInterior);
    }
    let mut t = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        let p = base + inward.scale(t);
        if spec.min_slack(p) >= START_SLACK {
            return Ok(p);
        }
        t *= 2.0;
    }
    Err(Error::EmptyInterior)
}

fn centroid(points: &[Point2]) -> Point2 {
    let sum = points.iter().fold(Point2::ORIGIN, |acc, &p| acc + p);
    sum.scale(1.0 / points.len() as f64)
}

/// One barrier subproblem `max f_μ(x)`.
#[derive(Debug, Clone, Copy)]
pub struct BarrierSubproblem<'a> {
    pub mu: f64,
    pub spec: &'a ProblemSpec,
    pub x_start: Point2,
}

impl<'a> BarrierSubproblem<'a> {
    pub fn new(spec: &'a ProblemSpec, mu: f64, x_start: Point2) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidSettings(format!("barrier parameter must be positive, got {mu}")));
        }
        if !(spec.min_slack(x_start) > 0.0) {
            return Err(Error::InvalidSettings("barrier start is not strictly feasible".into()));
        }
        Ok(Self { mu, spec, x_start })
    }

    /// `f_μ(x)`, or `None` outside the open region.
    pub fn value(&self, x: Point2) -> Option<f64> {
        let mut logs = 0.0;
        for h in &self.spec.halfspaces {
            let s = h.slack(x);
            if s <= 0.0 {
                return None;
            }
            logs += s.ln();
        }
        Some(self.spec.objective_value(x) + self.mu * logs)
    }

    /// `c − μ·Σ a_i / s_i`.
    pub fn gradient(&self, x: Point2) -> Point2 {
        let mut g = self.spec.objective_point();
        for h in &self.spec.halfspaces {
            g = g - h.normal().scale(self.mu / h.slack(x));
        }
        g
    }

    /// `−μ·Σ a_i a_iᵀ / s_i²`.
    pub fn hessian(&self, x: Point2) -> [[f64; 2]; 2] {
        let mut hess = [[0.0; 2]; 2];
        for h in &self.spec.halfspaces {
            let w = self.mu / h.slack(x).powi(2);
            let a = [h.a1, h.a2];
            for i in 0..2 {
                for j in 0..2 {
                    hess[i][j] -= w * a[i] * a[j];
                }
            }
        }
        hess
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonResult {
    pub x: Point2,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Damped Newton ascent on `sub` until `‖∇f_μ‖∞ <= tol` or `max_steps` steps.
pub fn newton_solve(sub: &BarrierSubproblem<'_>, tol: f64, max_steps: usize) -> Result<NewtonResult> {
    let mut x = sub.x_start;
    let mut fx = sub.value(x).ok_or(Error::EmptyInterior)?;
    let mut iterations = 0;
    loop {
        let g = sub.gradient(x);
        let grad_norm = g.x1.abs().max(g.x2.abs());
        if grad_norm <= tol || iterations >= max_steps {
            return Ok(NewtonResult { x, iterations, grad_norm });
        }
        let d = newton_direction(sub.hessian(x), g)?;
        let slope = g.dot(d);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand = x + d.scale(alpha);
            if let Some(fc) = sub.value(cand) {
                if fc >= fx + ARMIJO * alpha * slope {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            alpha *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((cand, fc)) => {
                x = cand;
                fx = fc;
            }
            // no representable ascent left: x is as good as floating point allows
            None => return Ok(NewtonResult { x, iterations, grad_norm }),
        }
        if x.x1.abs().max(x.x2.abs()) > DIVERGENCE_LIMIT {
            return Err(Error::BarrierUnbounded { limit: DIVERGENCE_LIMIT });
        }
    }
}

/// Solves `H·d = −g`, retrying with `H − ridge·I` when `H` is singular.
fn newton_direction(h: [[f64; 2]; 2], g: Point2) -> Result<Point2> {
    let rhs = [-g.x1, -g.x2];
    for ridge in [0.0, RIDGE] {
        let m = DenseMatrix::from_rows(&[[h[0][0] - ridge, h[0][1]], [h[1][0], h[1][1] - ridge]])?;
        match lu_factor(&m) {
            Ok(lu) => {
                let d = lu.solve(&rhs)?;
                return Ok(Point2::new(d[0], d[1]));
            }
            Err(Error::Singular { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::IllConditioned)
}

pub fn solve_central_path(spec: &ProblemSpec, settings: &SolverSettings) -> Result<SolverTrace> {
    solve_central_path_with(spec, settings, &mut RunControl::new())
}

pub fn solve_central_path_with(
    spec: &ProblemSpec,
    settings: &SolverSettings,
    ctl: &mut RunControl<'_>,
) -> Result<SolverTrace> {
    settings.validate()?;
    if spec.m() == 0 {
        return Err(Error::DegenerateRegion("central path needs at least one constraint".into()));
    }
    let schedule = mu_schedule(settings.mu_count)?;
    let cap = settings.max_iterations_for(Algorithm::CentralPath);
    let mut x = strictly_feasible_start(spec)?;
    let mut iterates = Vec::with_capacity(schedule.len());
    let mut status = Status::Optimal;
    for &mu in &schedule {
        ctl.checkpoint()?;
        let sub = BarrierSubproblem::new(spec, mu, x)?;
        let res = match newton_solve(&sub, settings.tolerance, cap) {
            Ok(res) => res,
            Err(Error::BarrierUnbounded { .. } | Error::IllConditioned) => {
                status = Status::MaxIterations;
                break;
            }
            Err(e) => return Err(e),
        };
        x = res.x;
        let it = Iterate::new(x, mu, format!("mu={mu:.3e}"))
            .with_meta("mu", mu)
            .with_meta("newton_iters", res.iterations as f64)
            .with_meta("grad_norm", res.grad_norm);
        ctl.emit(&it);
        iterates.push(it);
    }
    Ok(SolverTrace {
        algorithm: Algorithm::CentralPath,
        settings: settings.resolved(Algorithm::CentralPath),
        status,
        iterates,
        objective_value: (status == Status::Optimal).then(|| spec.objective_value(x)),
        ray: None,
    })
}
