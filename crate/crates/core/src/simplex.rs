//! Two-phase revised simplex on the difference-of-positives reformulation.
//!
//! The free variables are split as `x = x⁺ − x⁻` and every constraint receives a slack, so
//! the standard-form problem is `max c_std·z  s.t.  A_std·z = b, z >= 0` with columns
//! `x₁⁺, x₁⁻, x₂⁺, x₂⁻, s₁ … s_m`. Entering columns are chosen by first positive reduced
//! cost in that column order and ratio-test ties go to the smallest column index (Bland),
//! so runs are deterministic and cannot cycle.
//!
//! Because of the split, basic solutions include points where an edge of the region crosses
//! a coordinate axis; phase two visits those as well as the true vertices.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix, LuFactors};
use crate::model::{Algorithm, Iterate, Point2, ProblemSpec, SolverSettings, SolverTrace, Status};
use crate::run::RunControl;

pub const REDUCED_COST_TOL: f64 = 1e-9;
pub const RATIO_TOL: f64 = 1e-9;

const PHASE_ONE_CAP: usize = 100_000;

/// Equality-form problem over nonnegative variables.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    /// `m × (4 + m)`: `[a | −a | I]` with the `±a` columns interleaved per variable.
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl StandardLp {
    pub const SPLIT_COLUMNS: usize = 4;

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn slack_column(&self, row: usize) -> usize {
        Self::SPLIT_COLUMNS + row
    }

    /// Original point `x = (z₁ − z₂, z₃ − z₄)`.
    pub fn to_original(&self, z: &[f64]) -> Point2 {
        Point2::new(z[0] - z[1], z[2] - z[3])
    }

    /// Standard-form point of an original point: positive/negative parts plus slacks.
    pub fn from_original(&self, spec: &ProblemSpec, x: Point2) -> Vec<f64> {
        let mut z = vec![x.x1.max(0.0), (-x.x1).max(0.0), x.x2.max(0.0), (-x.x2).max(0.0)];
        z.extend(spec.halfspaces.iter().map(|h| h.slack(x)));
        z
    }
}

pub fn to_standard_form(spec: &ProblemSpec) -> StandardLp {
    let m = spec.m();
    let n = StandardLp::SPLIT_COLUMNS + m;
    let mut a = DenseMatrix::zeros(m, n);
    for (i, h) in spec.halfspaces.iter().enumerate() {
        a[(i, 0)] = h.a1;
        a[(i, 1)] = -h.a1;
        a[(i, 2)] = h.a2;
        a[(i, 3)] = -h.a2;
        a[(i, StandardLp::SPLIT_COLUMNS + i)] = 1.0;
    }
    let [c1, c2] = spec.objective;
    let mut c = vec![c1, -c1, c2, -c2];
    c.resize(n, 0.0);
    StandardLp { a, b: spec.rhs(), c }
}

/// Basic column indices, listed in the row order of the basis matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub columns: Vec<usize>,
}

impl Basis {
    pub fn sorted(&self) -> Vec<usize> {
        let mut s = self.columns.clone();
        s.sort_unstable();
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhaseOne {
    Feasible(Basis),
    Infeasible,
}

enum Step {
    Optimal,
    Pivoted { entering: usize, leaving: usize },
    Unbounded { direction: Vec<f64> },
}

/// Shared pivoting core: revised simplex that refactors the basis matrix every pivot.
struct Pivoter<'a> {
    a: &'a DenseMatrix,
    b: &'a [f64],
    cost: &'a [f64],
    basis: Vec<usize>,
    basis_matrix: DenseMatrix,
    lu: LuFactors,
    xb: Vec<f64>,
    duals: Vec<f64>,
    column: Vec<f64>,
    direction: Vec<f64>,
}

impl<'a> Pivoter<'a> {
    fn new(a: &'a DenseMatrix, b: &'a [f64], cost: &'a [f64], basis: Vec<usize>) -> Result<Self> {
        let m = a.rows();
        let mut p = Self {
            a,
            b,
            cost,
            basis,
            basis_matrix: DenseMatrix::zeros(m, m),
            lu: LuFactors::workspace(),
            xb: vec![0.0; m],
            duals: vec![0.0; m],
            column: vec![0.0; m],
            direction: vec![0.0; m],
        };
        p.refresh()?;
        Ok(p)
    }

    fn refresh(&mut self) -> Result<()> {
        let m = self.a.rows();
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                self.basis_matrix[(i, k)] = self.a[(i, j)];
            }
        }
        self.lu.refactor(&self.basis_matrix)?;
        self.lu.solve_into(self.b, &mut self.xb)?;
        let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        self.lu.solve_transposed_into(&cb, &mut self.duals)?;
        Ok(())
    }

    fn load_column(&mut self, j: usize) {
        for i in 0..self.a.rows() {
            self.column[i] = self.a[(i, j)];
        }
    }

    fn reduced_cost(&mut self, j: usize) -> f64 {
        self.load_column(j);
        self.cost[j] - dot(&self.duals, &self.column)
    }

    fn objective(&self) -> f64 {
        self.basis.iter().zip(&self.xb).map(|(&j, &v)| self.cost[j] * v).sum()
    }

    fn values(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.a.cols()];
        for (&j, &v) in self.basis.iter().zip(&self.xb) {
            z[j] = v;
        }
        z
    }

    fn step(&mut self) -> Result<Step> {
        let n = self.a.cols();
        let mut entering = None;
        for j in 0..n {
            if !self.basis.contains(&j) && self.reduced_cost(j) > REDUCED_COST_TOL {
                entering = Some(j);
                break;
            }
        }
        let Some(entering) = entering else {
            return Ok(Step::Optimal);
        };
        self.load_column(entering);
        self.lu.solve_into(&self.column, &mut self.direction)?;

        let mut leaving: Option<(usize, f64)> = None;
        for (i, &u) in self.direction.iter().enumerate() {
            if u <= RATIO_TOL {
                continue;
            }
            let ratio = self.xb[i].max(0.0) / u;
            leaving = match leaving {
                None => Some((i, ratio)),
                Some((_, best)) if ratio < best - RATIO_TOL => Some((i, ratio)),
                Some((r, best))
                    if ratio <= best + RATIO_TOL && self.basis[i] < self.basis[r] =>
                {
                    Some((i, ratio.min(best)))
                }
                keep => keep,
            };
        }
        let Some((row, _)) = leaving else {
            let mut direction = vec![0.0; n];
            for (&j, &u) in self.basis.iter().zip(&self.direction) {
                direction[j] = -u;
            }
            direction[entering] = 1.0;
            return Ok(Step::Unbounded { direction });
        };
        let leaving = self.basis[row];
        self.basis[row] = entering;
        self.refresh()?;
        Ok(Step::Pivoted { entering, leaving })
    }
}

/// Finds a feasible starting basis.
///
/// Rows with `b_i >= 0` start from their own slack; the remaining rows are sign-flipped and
/// given an artificial column with cost −1. Artificials still basic (at zero) after the
/// phase-one optimum are pivoted out on the largest eligible entry of their row.
pub fn phase1(std: &StandardLp) -> Result<PhaseOne> {
    let m = std.m();
    let n = std.n();
    let needs: Vec<usize> = (0..m).filter(|&i| std.b[i] < 0.0).collect();
    if needs.is_empty() {
        return Ok(PhaseOne::Feasible(Basis { columns: (0..m).map(|i| std.slack_column(i)).collect() }));
    }

    let total = n + needs.len();
    let mut a = DenseMatrix::zeros(m, total);
    let mut b = std.b.clone();
    let mut basis: Vec<usize> = (0..m).map(|i| std.slack_column(i)).collect();
    for i in 0..m {
        let sign = if std.b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            a[(i, j)] = sign * std.a[(i, j)];
        }
        b[i] *= sign;
    }
    for (k, &i) in needs.iter().enumerate() {
        a[(i, n + k)] = 1.0;
        basis[i] = n + k;
    }
    let mut cost = vec![0.0; total];
    cost[n..].fill(-1.0);

    let mut piv = Pivoter::new(&a, &b, &cost, basis)?;
    let mut steps = 0;
    loop {
        match piv.step()? {
            Step::Optimal => break,
            Step::Pivoted { .. } => {}
            // bounded above by zero, so this cannot happen
            Step::Unbounded { .. } => unreachable!("phase one objective is bounded"),
        }
        steps += 1;
        if steps > PHASE_ONE_CAP {
            return Err(Error::InvalidSettings("phase one did not terminate".into()));
        }
    }
    let scale = 1.0 + b.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if piv.objective() < -1e-9 * scale {
        return Ok(PhaseOne::Infeasible);
    }

    // drive the remaining (zero-level) artificials out of the basis
    for row in 0..m {
        if piv.basis[row] < n {
            continue;
        }
        let mut unit = vec![0.0; m];
        unit[row] = 1.0;
        let w = piv.lu.solve_transposed(&unit)?;
        let candidate = (0..n)
            .filter(|j| !piv.basis.contains(j))
            .map(|j| {
                let entry: f64 = (0..m).map(|i| w[i] * a[(i, j)]).sum();
                (j, entry.abs())
            })
            .filter(|&(_, v)| v > 1e-9)
            .max_by(|x, y| x.1.total_cmp(&y.1));
        match candidate {
            Some((j, _)) => {
                piv.basis[row] = j;
                piv.refresh()?;
            }
            None => return Err(Error::RedundantRow(row)),
        }
    }
    Ok(PhaseOne::Feasible(Basis { columns: piv.basis }))
}

/// Phase-two result together with every basis visited, in order.
#[derive(Debug, Clone)]
pub struct SimplexRun {
    pub trace: SolverTrace,
    pub bases: Vec<Vec<usize>>,
}

fn simplex_iterate(std: &StandardLp, piv: &Pivoter<'_>, pivots: usize) -> Iterate {
    let z = piv.values();
    let x = std.to_original(&z);
    let m = std.m();
    let active: Vec<usize> = (0..m).filter(|&i| !piv.basis.contains(&std.slack_column(i))).collect();
    Iterate::new(x, 0.0, "phase2")
        .with_basis(active)
        .with_meta("objective", piv.objective())
        .with_meta("pivots", pivots as f64)
}

/// Runs phase two from a feasible basis, recording the starting basic solution and the
/// one after every pivot, mapped back to the original variables.
pub fn phase2(
    std: &StandardLp,
    start: &Basis,
    settings: &SolverSettings,
    ctl: &mut RunControl<'_>,
) -> Result<SimplexRun> {
    let cap = settings.max_iterations_for(Algorithm::Simplex);
    let mut piv = Pivoter::new(&std.a, &std.b, &std.c, start.columns.clone())?;
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut bases = vec![start.sorted()];
    seen.insert(start.sorted());

    let first = simplex_iterate(std, &piv, 0);
    ctl.emit(&first);
    let mut iterates = vec![first];
    let mut pivots = 0;
    let (status, ray) = loop {
        ctl.checkpoint()?;
        if pivots >= cap {
            break (Status::MaxIterations, None);
        }
        match piv.step()? {
            Step::Optimal => break (Status::Optimal, None),
            Step::Unbounded { direction } => {
                let d = std.to_original(&direction);
                let d = d.scale(1.0 / d.norm());
                break (Status::Unbounded, Some(d.to_array()));
            }
            Step::Pivoted { entering, leaving } => {
                pivots += 1;
                let key = {
                    let mut k = piv.basis.clone();
                    k.sort_unstable();
                    k
                };
                assert!(seen.insert(key.clone()), "simplex revisited basis {key:?}");
                bases.push(key);
                let it = simplex_iterate(std, &piv, pivots)
                    .with_meta("entering", entering as f64)
                    .with_meta("leaving", leaving as f64);
                ctl.emit(&it);
                iterates.push(it);
            }
        }
    };
    let objective_value = (status == Status::Optimal).then(|| piv.objective());
    let trace = SolverTrace {
        algorithm: Algorithm::Simplex,
        settings: settings.resolved(Algorithm::Simplex),
        status,
        iterates,
        objective_value,
        ray,
    };
    Ok(SimplexRun { trace, bases })
}

pub fn solve_simplex(spec: &ProblemSpec, settings: &SolverSettings) -> Result<SolverTrace> {
    solve_simplex_with(spec, settings, &mut RunControl::new())
}

pub fn solve_simplex_with(
    spec: &ProblemSpec,
    settings: &SolverSettings,
    ctl: &mut RunControl<'_>,
) -> Result<SolverTrace> {
    settings.validate()?;
    let std = to_standard_form(spec);
    match phase1(&std)? {
        PhaseOne::Infeasible => Ok(SolverTrace {
            algorithm: Algorithm::Simplex,
            settings: settings.resolved(Algorithm::Simplex),
            status: Status::Infeasible,
            iterates: Vec::new(),
            objective_value: None,
            ray: None,
        }),
        PhaseOne::Feasible(basis) => Ok(phase2(&std, &basis, settings, ctl)?.trace),
    }
}
