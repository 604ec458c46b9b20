//! Solver core for a two-variable linear programming workbench.
//!
//! A feasible region is drawn vertex by vertex ([`geometry::RegionBuilder`]), converted to
//! halfspaces, and handed with an objective direction to one of four solver families:
//!
//! * [`simplex`]: two-phase revised simplex on the `x = x⁺ − x⁻` reformulation,
//! * [`ipm`]: infeasible primal-dual predictor-corrector interior point,
//! * [`pdhg`]: primal-dual hybrid gradient, optionally with restarted Halpern steps,
//! * [`central_path`]: log-barrier path following with damped Newton.
//!
//! Every solver returns a [`SolverTrace`] of iterates in the original `(x₁, x₂)` space,
//! each tagged with a solver-specific height (μ, ε_k or 0) for 3D display.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod central_path;
pub mod error;
pub mod geometry;
pub mod io;
pub mod ipm;
pub mod linalg;
pub mod model;
pub mod pdhg;
pub mod run;
pub mod simplex;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{
    objective_angle, validate_problem, Algorithm, Halfspace, Issue, Iterate, PdhgMode, Point2,
    ProblemSpec, SolverSettings, SolverTrace, Status, ValidationReport,
};
pub use run::{CancelToken, IterateSink, RunControl};

/// Runs `algorithm` on `spec`.
pub fn solve(spec: &ProblemSpec, algorithm: Algorithm, settings: &SolverSettings) -> Result<SolverTrace> {
    solve_with(spec, algorithm, settings, &mut RunControl::new())
}

pub fn solve_with(
    spec: &ProblemSpec,
    algorithm: Algorithm,
    settings: &SolverSettings,
    ctl: &mut RunControl<'_>,
) -> Result<SolverTrace> {
    match algorithm {
        Algorithm::Simplex => simplex::solve_simplex_with(spec, settings, ctl),
        Algorithm::Ipm => ipm::solve_ipm_with(spec, settings, ctl),
        Algorithm::Pdhg => pdhg::solve_pdhg_with(spec, settings, ctl),
        Algorithm::CentralPath => central_path::solve_central_path_with(spec, settings, ctl),
    }
}
