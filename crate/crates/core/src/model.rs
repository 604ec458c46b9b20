//! Problem and trace data model shared by geometry, the solvers and the file formats.
//!
//! Problems are always maximizations of `c·x` over `{x : a_j·x <= b_j}`. Minimization is
//! expressed by negating the objective before it reaches this crate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;
use crate::linalg::DenseMatrix;

/// Feasibility and tightness tolerance for vertices against their halfspaces.
pub const VERTEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    pub fn dot(&self, other: Point2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    pub fn norm(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn dist(&self, other: Point2) -> f64 {
        (*self - other).norm()
    }

    pub fn scale(&self, k: f64) -> Point2 {
        Point2::new(self.x1 * k, self.x2 * k)
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x1, self.x2]
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x1, p.x2]
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

/// One constraint `a1*x1 + a2*x2 <= b`.
///
/// [`Halfspace::new`] stores the constraint with a unit normal. The fields stay public so
/// that unnormalized or malformed input can still be represented and reported by
/// [`validate_problem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfspace {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

impl Halfspace {
    /// Builds a halfspace scaled so that `‖(a1, a2)‖₂ = 1`.
    pub fn new(a1: f64, a2: f64, b: f64) -> Result<Self> {
        Self::raw(a1, a2, b).normalized()
    }

    /// Stores the coefficients exactly as given.
    pub const fn raw(a1: f64, a2: f64, b: f64) -> Self {
        Self { a1, a2, b }
    }

    pub fn normalized(&self) -> Result<Self> {
        if !(self.a1.is_finite() && self.a2.is_finite() && self.b.is_finite()) {
            return Err(Error::NonFinite("halfspace"));
        }
        let n = self.a1.hypot(self.a2);
        if n == 0.0 {
            return Err(Error::ZeroNormal);
        }
        Ok(Self { a1: self.a1 / n, a2: self.a2 / n, b: self.b / n })
    }

    pub fn normal(&self) -> Point2 {
        Point2::new(self.a1, self.a2)
    }

    /// `a·p − b`; positive values are violations.
    pub fn residual(&self, p: Point2) -> f64 {
        self.a1 * p.x1 + self.a2 * p.x2 - self.b
    }

    /// `b − a·p`; positive values are strictly inside.
    pub fn slack(&self, p: Point2) -> f64 {
        -self.residual(p)
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.residual(p) <= tol
    }
}

/// A two-variable LP: objective plus feasible region.
///
/// `vertices` is the V-representation (counter-clockwise, possibly empty for problems given
/// only by constraints); `halfspaces` is the H-representation handed to the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub objective: [f64; 2],
    pub vertices: Vec<Point2>,
    pub closed: bool,
    pub halfspaces: Vec<Halfspace>,
}

impl ProblemSpec {
    pub fn from_region(objective: [f64; 2], region: geometry::Region) -> Self {
        Self {
            objective,
            vertices: region.vertices,
            closed: region.closed,
            halfspaces: region.halfspaces,
        }
    }

    /// A problem given only by constraints; each constraint is normalized.
    pub fn from_constraints(objective: [f64; 2], constraints: &[Halfspace]) -> Result<Self> {
        let halfspaces = constraints.iter().map(Halfspace::normalized).collect::<Result<_>>()?;
        Ok(Self { objective, vertices: Vec::new(), closed: false, halfspaces })
    }

    pub fn m(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn objective_point(&self) -> Point2 {
        Point2::from(self.objective)
    }

    pub fn objective_value(&self, x: Point2) -> f64 {
        self.objective_point().dot(x)
    }

    pub fn with_objective(&self, objective: [f64; 2]) -> Self {
        Self { objective, ..self.clone() }
    }

    /// Constraint matrix `A` (m × 2, row-major).
    pub fn constraint_matrix(&self) -> DenseMatrix {
        let data = self.halfspaces.iter().flat_map(|h| [h.a1, h.a2]).collect();
        DenseMatrix::from_row_major(self.m(), 2, data).expect("m x 2 buffer")
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.halfspaces.iter().map(|h| h.b).collect()
    }

    /// Largest violation `max_j (a_j·x − b_j)`, or `-inf` when there are no constraints.
    pub fn max_violation(&self, x: Point2) -> f64 {
        self.halfspaces.iter().map(|h| h.residual(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_slack(&self, x: Point2) -> f64 {
        -self.max_violation(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Simplex,
    Ipm,
    Pdhg,
    CentralPath,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Simplex, Algorithm::Ipm, Algorithm::Pdhg, Algorithm::CentralPath];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Simplex => "simplex",
            Algorithm::Ipm => "ipm",
            Algorithm::Pdhg => "pdhg",
            Algorithm::CentralPath => "central_path",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Unbounded,
    Infeasible,
    MaxIterations,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Unbounded => "unbounded",
            Status::Infeasible => "infeasible",
            Status::MaxIterations => "max_iterations",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdhgMode {
    Equality,
    #[default]
    Inequality,
}

/// Per-algorithm tunables. Fields that do not apply to an algorithm are carried along
/// unchanged so that a trace records the full configuration it was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub tolerance: f64,
    /// `None` selects the per-algorithm default, see [`SolverSettings::max_iterations_for`].
    pub max_iterations: Option<usize>,
    /// IPM step scale in (0, 1].
    pub alpha_max: f64,
    /// IPM: the corrector solve is skipped once both affine step lengths exceed this.
    pub corrector_threshold: f64,
    pub pdhg_mode: PdhgMode,
    /// Overrides the automatic PDHG step `0.9/‖A‖₂` with `tau = sigma = pdhg_step`.
    pub pdhg_step: Option<f64>,
    pub halpern: bool,
    pub restart_factor: f64,
    pub mu_count: usize,
    /// Objective angle of a rotation sweep, recorded for the trace it produced.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: None,
            alpha_max: 0.1,
            corrector_threshold: 0.8,
            pdhg_mode: PdhgMode::Inequality,
            pdhg_step: None,
            halpern: false,
            restart_factor: 0.5,
            mu_count: 30,
            angle: None,
        }
    }
}

impl SolverSettings {
    pub fn max_iterations_for(&self, algorithm: Algorithm) -> usize {
        self.max_iterations.unwrap_or(match algorithm {
            Algorithm::Simplex => 1000,
            Algorithm::Ipm => 200,
            Algorithm::Pdhg => 10_000,
            Algorithm::CentralPath => 50,
        })
    }

    /// Copy with `max_iterations` pinned to the value actually used by `algorithm`.
    pub fn resolved(&self, algorithm: Algorithm) -> Self {
        Self { max_iterations: Some(self.max_iterations_for(algorithm)), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSettings(msg));
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.max_iterations == Some(0) {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.alpha_max > 0.0 && self.alpha_max <= 1.0) {
            return bad(format!("alpha_max must lie in (0, 1], got {}", self.alpha_max));
        }
        if !(0.0..=1.0).contains(&self.corrector_threshold) {
            return bad(format!(
                "corrector_threshold must lie in [0, 1], got {}",
                self.corrector_threshold
            ));
        }
        if let Some(step) = self.pdhg_step {
            if !(step.is_finite() && step > 0.0) {
                return bad(format!("pdhg step must be positive, got {step}"));
            }
        }
        if !(self.restart_factor > 0.0 && self.restart_factor < 1.0) {
            return bad(format!("restart_factor must lie in (0, 1), got {}", self.restart_factor));
        }
        if self.mu_count < 2 {
            return bad(format!("mu_count must be at least 2, got {}", self.mu_count));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    #[serde(rename = "x")]
    pub point: Point2,
    /// Solver-specific height: μ for IPM and central path, ε_k for PDHG, 0 for simplex.
    pub z: f64,
    pub phase: String,
    pub basis: Option<Vec<usize>>,
    #[serde(default)]
    pub meta: BTreeMap<String, f64>,
}

impl Iterate {
    pub fn new(point: Point2, z: f64, phase: impl Into<String>) -> Self {
        Self { point, z, phase: phase.into(), basis: None, meta: BTreeMap::new() }
    }

    pub fn with_meta(mut self, key: &str, value: f64) -> Self {
        self.meta.insert(key.to_owned(), value);
        self
    }

    pub fn with_basis(mut self, basis: Vec<usize>) -> Self {
        self.basis = Some(basis);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub algorithm: Algorithm,
    pub settings: SolverSettings,
    pub status: Status,
    pub iterates: Vec<Iterate>,
    pub objective_value: Option<f64>,
    /// Unit direction of unboundedness when `status` is [`Status::Unbounded`].
    pub ray: Option<[f64; 2]>,
}

impl SolverTrace {
    pub fn last_point(&self) -> Option<Point2> {
        self.iterates.last().map(|it| it.point)
    }
}

/// One violated invariant found by [`validate_problem`].
#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    NonFinite { what: String },
    ZeroNormal { constraint: usize },
    NotNormalized { constraint: usize, norm: f64 },
    TooFewVertices { found: usize, needed: usize },
    DuplicateVertex { index: usize },
    CollinearVertex { index: usize },
    Nonconvex { index: usize },
    Clockwise,
    ConstraintCount { expected: usize, found: usize },
    VertexInfeasible { vertex: usize, constraint: usize, excess: f64 },
    VertexNotTight { vertex: usize, constraint: usize, gap: f64 },
    ExtraTight { vertex: usize, constraint: usize },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Issue::ZeroNormal { constraint } => write!(f, "zero normal on constraint {constraint}"),
            Issue::NotNormalized { constraint, norm } => {
                write!(f, "constraint {constraint} not normalized (|a| = {norm})")
            }
            Issue::TooFewVertices { found, needed } => {
                write!(f, "too few vertices: {found} < {needed}")
            }
            Issue::DuplicateVertex { index } => write!(f, "duplicate vertex at index {index}"),
            Issue::CollinearVertex { index } => write!(f, "collinear vertex at index {index}"),
            Issue::Nonconvex { index } => write!(f, "nonconvex turn at vertex {index}"),
            Issue::Clockwise => write!(f, "vertices are not counter-clockwise"),
            Issue::ConstraintCount { expected, found } => {
                write!(f, "constraint count {found} does not match vertex count (expected {expected})")
            }
            Issue::VertexInfeasible { vertex, constraint, excess } => write!(
                f,
                "vertex infeasible: vertex {vertex} violates constraint {constraint} by {excess:e}"
            ),
            Issue::VertexNotTight { vertex, constraint, gap } => write!(
                f,
                "vertex {vertex} not tight on incident constraint {constraint} (gap {gap:e})"
            ),
            Issue::ExtraTight { vertex, constraint } => {
                write!(f, "vertex {vertex} tight on non-incident constraint {constraint}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    /// Human-readable messages, one per issue.
    pub fn messages(&self) -> Vec<String> {
        self.issues.iter().map(ToString::to_string).collect()
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.issues.iter().any(|i| i.to_string().contains(needle))
    }
}

/// Lists every invariant of `spec` that does not hold. An empty report means the problem
/// is valid.
pub fn validate_problem(spec: &ProblemSpec) -> ValidationReport {
    let mut issues = Vec::new();

    if !(spec.objective[0].is_finite() && spec.objective[1].is_finite()) {
        issues.push(Issue::NonFinite { what: "objective".into() });
    }
    for (j, h) in spec.halfspaces.iter().enumerate() {
        if !(h.a1.is_finite() && h.a2.is_finite() && h.b.is_finite()) {
            issues.push(Issue::NonFinite { what: format!("constraint {j}") });
            continue;
        }
        let norm = h.a1.hypot(h.a2);
        if norm == 0.0 {
            issues.push(Issue::ZeroNormal { constraint: j });
        } else if (norm - 1.0).abs() > 1e-12 {
            issues.push(Issue::NotNormalized { constraint: j, norm });
        }
    }
    for (i, v) in spec.vertices.iter().enumerate() {
        if !v.is_finite() {
            issues.push(Issue::NonFinite { what: format!("vertex {i}") });
        }
    }
    if !issues.is_empty() || spec.vertices.is_empty() {
        return ValidationReport { issues };
    }

    let n = spec.vertices.len();
    let needed = if spec.closed { 3 } else { 2 };
    if n < needed {
        issues.push(Issue::TooFewVertices { found: n, needed });
        return ValidationReport { issues };
    }
    issues.extend(shape_issues(&spec.vertices, spec.closed));

    let expected = if spec.closed { n } else { n - 1 };
    if spec.m() != expected {
        issues.push(Issue::ConstraintCount { expected, found: spec.m() });
        return ValidationReport { issues };
    }

    for (i, &v) in spec.vertices.iter().enumerate() {
        let incident: Vec<usize> = if spec.closed {
            vec![(i + n - 1) % n, i]
        } else {
            [i.checked_sub(1), (i + 1 < n).then_some(i)].into_iter().flatten().collect()
        };
        for (j, h) in spec.halfspaces.iter().enumerate() {
            let r = h.residual(v);
            if r > VERTEX_TOL {
                issues.push(Issue::VertexInfeasible { vertex: i, constraint: j, excess: r });
            } else if incident.contains(&j) {
                if r < -VERTEX_TOL {
                    issues.push(Issue::VertexNotTight { vertex: i, constraint: j, gap: -r });
                }
            } else if r >= -VERTEX_TOL {
                issues.push(Issue::ExtraTight { vertex: i, constraint: j });
            }
        }
    }
    ValidationReport { issues }
}

fn shape_issues(vertices: &[Point2], closed: bool) -> Vec<Issue> {
    let mut issues = Vec::new();
    let n = vertices.len();
    for i in 0..n {
        for k in i + 1..n {
            if vertices[i].dist(vertices[k]) <= VERTEX_TOL {
                issues.push(Issue::DuplicateVertex { index: k });
            }
        }
    }
    if !issues.is_empty() {
        return issues;
    }
    if geometry::orientation(vertices, closed) == Some(geometry::Turn::Right) {
        return vec![Issue::Clockwise];
    }
    let corners: Vec<usize> = if closed { (0..n).collect() } else { (1..n - 1).collect() };
    for i in corners {
        let prev = vertices[(i + n - 1) % n];
        let next = vertices[(i + 1) % n];
        match geometry::turn(prev, vertices[i], next) {
            geometry::Turn::Collinear => issues.push(Issue::CollinearVertex { index: i }),
            geometry::Turn::Right => issues.push(Issue::Nonconvex { index: i }),
            geometry::Turn::Left => {}
        }
    }
    // all-left corners can still wind around more than once
    if closed && issues.is_empty() && geometry::total_turning(vertices, true) > 3.0 * std::f64::consts::PI {
        issues.push(Issue::Nonconvex { index: 0 });
    }
    issues
}

/// Direction of the objective vector, in (−π, π].
pub fn objective_angle(spec: &ProblemSpec) -> Result<f64> {
    let [c1, c2] = spec.objective;
    if c1 == 0.0 && c2 == 0.0 {
        return Err(Error::DegenerateObjective);
    }
    let theta = c2.atan2(c1);
    Ok(if theta <= -std::f64::consts::PI { std::f64::consts::PI } else { theta })
}
