//! Primal-dual hybrid gradient (Chambolle-Pock) with fixed steps.
//!
//! Inequality mode iterates on `max c·x  s.t.  A·x <= b` directly, projecting the duals onto
//! `y >= 0`. Equality mode first introduces slacks, `A·x + s = b` with `s >= 0`, and
//! projects only the slack block; its duals are free. The extra variables make the
//! equality-mode path wander more, but both modes converge to the same optimum.
//!
//! With `halpern` set, each plain sweep `T` is averaged with an anchor point,
//! `z ← (k+1)/(k+2)·T(z) + 1/(k+2)·z₀`, and the anchor is reset to the current point once
//! the fixed-point residual `‖T(z) − z‖` has dropped below `restart_factor` times its value
//! at the previous restart.

use crate::error::{Error, Result};
use crate::linalg::{norm2, spectral_norm, DenseMatrix};
use crate::model::{
    Algorithm, Halfspace, Iterate, PdhgMode, Point2, ProblemSpec, SolverSettings, SolverTrace, Status,
};
use crate::run::RunControl;

/// Automatic step: `tau = sigma = AUTO_STEP_SCALE / ‖K‖₂`.
pub const AUTO_STEP_SCALE: f64 = 0.9;
/// Recorded iterates beyond this count are decimated by striding.
pub const MAX_RECORDED: usize = 10_000;

/// Snapshot of the iteration state.
#[derive(Debug, Clone, PartialEq)]
pub struct PdhgState {
    /// Primal variables: `x` in inequality mode, `(x, s)` in equality mode.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub tau: f64,
    pub sigma: f64,
    pub eps: f64,
    pub anchor: Option<Vec<f64>>,
    pub k_since_restart: usize,
    /// Fixed-point residual at the last restart.
    pub eps_at_restart: f64,
}

/// Operator matrix of the mode: `A` (inequality) or `[A | I]` (equality).
pub fn operator_matrix(spec: &ProblemSpec, mode: PdhgMode) -> DenseMatrix {
    let a = spec.constraint_matrix();
    match mode {
        PdhgMode::Inequality => a,
        PdhgMode::Equality => {
            let m = spec.m();
            let mut k = DenseMatrix::zeros(m, 2 + m);
            for i in 0..m {
                k[(i, 0)] = a[(i, 0)];
                k[(i, 1)] = a[(i, 1)];
                k[(i, 2 + i)] = 1.0;
            }
            k
        }
    }
}

/// `(tau, sigma)` for `spec` under `settings`.
///
/// A user step must satisfy `tau·sigma·‖K‖₂² <= 1` (equality allowed).
pub fn step_sizes(spec: &ProblemSpec, settings: &SolverSettings) -> Result<(f64, f64)> {
    let k = operator_matrix(spec, settings.pdhg_mode);
    let norm = spectral_norm(&k, 50, 1e-6);
    match settings.pdhg_step {
        Some(step) => {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::InvalidSettings(format!("pdhg step must be positive, got {step}")));
            }
            if step * step * norm * norm > 1.0 + 1e-9 {
                return Err(Error::InvalidSettings(format!(
                    "pdhg step {step} violates tau*sigma*|K|^2 <= 1 (|K| = {norm})"
                )));
            }
            Ok((step, step))
        }
        None if norm == 0.0 => Ok((1.0, 1.0)),
        None => Ok((AUTO_STEP_SCALE / norm, AUTO_STEP_SCALE / norm)),
    }
}

/// Constraints whose dual exceeds their slack: `y_j > max(b_j − a_j·x, 0)`.
pub fn infer_basis(x: Point2, y: &[f64], halfspaces: &[Halfspace]) -> Vec<usize> {
    halfspaces
        .iter()
        .zip(y)
        .enumerate()
        .filter(|(_, (h, &yj))| yj > h.slack(x).max(0.0))
        .map(|(j, _)| j)
        .collect()
}

struct Record {
    iteration: usize,
    x: [f64; 2],
    eps: f64,
    fpr: f64,
    restarted: bool,
}

/// Iteration buffers for one mode. `u` is the primal block, `ku = K·u`, `kty = Kᵀ·y`.
struct Workspace<'a> {
    mode: PdhgMode,
    a: DenseMatrix,
    b: &'a [f64],
    c: [f64; 2],
    b_norm: f64,
    c_norm: f64,
    tau: f64,
    sigma: f64,
}

#[derive(Clone)]
struct Point {
    u: Vec<f64>,
    y: Vec<f64>,
    ku: Vec<f64>,
    kty: Vec<f64>,
}

impl Point {
    fn zeros(nu: usize, m: usize) -> Self {
        Self { u: vec![0.0; nu], y: vec![0.0; m], ku: vec![0.0; m], kty: vec![0.0; nu] }
    }

    fn dist(&self, other: &Point) -> f64 {
        let du: f64 = self.u.iter().zip(&other.u).map(|(a, b)| (a - b) * (a - b)).sum();
        let dy: f64 = self.y.iter().zip(&other.y).map(|(a, b)| (a - b) * (a - b)).sum();
        (du + dy).sqrt()
    }

    /// `self ← w·self + (1 − w)·anchor`, linear in every cached product.
    fn blend(&mut self, w: f64, anchor: &Point) {
        let mix = |v: &mut [f64], a: &[f64]| {
            for (x, &y) in v.iter_mut().zip(a) {
                *x = w * *x + (1.0 - w) * y;
            }
        };
        mix(&mut self.u, &anchor.u);
        mix(&mut self.y, &anchor.y);
        mix(&mut self.ku, &anchor.ku);
        mix(&mut self.kty, &anchor.kty);
    }
}

impl Workspace<'_> {
    fn m(&self) -> usize {
        self.b.len()
    }

    fn k_mul(&self, u: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = self.a.row(i);
            *o = row[0] * u[0] + row[1] * u[1];
            if self.mode == PdhgMode::Equality {
                *o += u[2 + i];
            }
        }
    }

    fn kt_mul(&self, y: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            let row = self.a.row(i);
            out[0] += row[0] * yi;
            out[1] += row[1] * yi;
        }
        if self.mode == PdhgMode::Equality {
            out[2..].copy_from_slice(y);
        }
    }

    /// One plain PDHG sweep from `z` into `out`.
    fn sweep(&self, z: &Point, out: &mut Point) {
        for j in 0..z.u.len() {
            let cost = if j < 2 { self.c[j] } else { 0.0 };
            let mut v = z.u[j] + self.tau * (cost - z.kty[j]);
            if j >= 2 {
                v = v.max(0.0);
            }
            out.u[j] = v;
        }
        self.k_mul(&out.u, &mut out.ku);
        for i in 0..self.m() {
            let mut v = z.y[i] + self.sigma * (2.0 * out.ku[i] - z.ku[i] - self.b[i]);
            if self.mode == PdhgMode::Inequality {
                v = v.max(0.0);
            }
            out.y[i] = v;
        }
        self.kt_mul(&out.y, &mut out.kty);
    }

    /// Normalized KKT error: max of primal residual, dual residual and relative gap.
    fn kkt_error(&self, z: &Point) -> f64 {
        let mut primal = 0.0;
        for i in 0..self.m() {
            let r = z.ku[i] - self.b[i];
            let r = match self.mode {
                PdhgMode::Inequality => r.max(0.0),
                PdhgMode::Equality => r,
            };
            primal += r * r;
        }
        let mut dual = (self.c[0] - z.kty[0]).powi(2) + (self.c[1] - z.kty[1]).powi(2);
        if self.mode == PdhgMode::Equality {
            dual += z.y.iter().map(|&v| v.min(0.0).powi(2)).sum::<f64>();
        }
        let pobj = self.c[0] * z.u[0] + self.c[1] * z.u[1];
        let dobj: f64 = self.b.iter().zip(&z.y).map(|(b, y)| b * y).sum();
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        (primal.sqrt() / (1.0 + self.b_norm)).max(dual.sqrt() / (1.0 + self.c_norm)).max(gap)
    }
}

pub fn solve_pdhg(spec: &ProblemSpec, settings: &SolverSettings) -> Result<SolverTrace> {
    solve_pdhg_with(spec, settings, &mut RunControl::new())
}

pub fn solve_pdhg_with(
    spec: &ProblemSpec,
    settings: &SolverSettings,
    ctl: &mut RunControl<'_>,
) -> Result<SolverTrace> {
    run(spec, settings, ctl).map(|(trace, _)| trace)
}

/// Same as [`solve_pdhg`], also returning the final iteration state.
pub fn solve_pdhg_detailed(spec: &ProblemSpec, settings: &SolverSettings) -> Result<(SolverTrace, PdhgState)> {
    run(spec, settings, &mut RunControl::new())
}

fn run(
    spec: &ProblemSpec,
    settings: &SolverSettings,
    ctl: &mut RunControl<'_>,
) -> Result<(SolverTrace, PdhgState)> {
    settings.validate()?;
    let (tau, sigma) = step_sizes(spec, settings)?;
    let cap = settings.max_iterations_for(Algorithm::Pdhg);
    let mode = settings.pdhg_mode;
    let m = spec.m();
    let b = spec.rhs();
    let ws = Workspace {
        mode,
        a: spec.constraint_matrix(),
        b: &b,
        c: spec.objective,
        b_norm: norm2(&b),
        c_norm: norm2(&spec.objective),
        tau,
        sigma,
    };
    let nu = match mode {
        PdhgMode::Inequality => 2,
        PdhgMode::Equality => 2 + m,
    };
    let words = m.div_ceil(64).max(1);

    let mut z = Point::zeros(nu, m);
    let mut next = Point::zeros(nu, m);
    let mut anchor = settings.halpern.then(|| z.clone());
    let mut k_since_restart = 0usize;
    let mut fpr_at_restart = f64::NAN;

    let mut records: Vec<Record> = Vec::new();
    let mut basis_bits: Vec<u64> = Vec::new();
    let mut record = |z: &Point, eps: f64, fpr: f64, restarted: bool, ctl: &mut RunControl<'_>| {
        let x = Point2::new(z.u[0], z.u[1]);
        let start = basis_bits.len();
        basis_bits.resize(start + words, 0);
        for (j, h) in spec.halfspaces.iter().enumerate() {
            if z.y[j] > h.slack(x).max(0.0) {
                basis_bits[start + j / 64] |= 1 << (j % 64);
            }
        }
        let rec = Record { iteration: records.len(), x: [x.x1, x.x2], eps, fpr, restarted };
        if ctl.has_sink() {
            ctl.emit(&make_iterate(&rec, &basis_bits[start..], mode, 1));
        }
        records.push(rec);
    };

    let mut eps = ws.kkt_error(&z);
    record(&z, eps, 0.0, false, ctl);
    let mut iterations = 0;
    let status = loop {
        if eps <= settings.tolerance {
            break Status::Optimal;
        }
        if iterations >= cap {
            break Status::MaxIterations;
        }
        ctl.checkpoint()?;
        iterations += 1;

        ws.sweep(&z, &mut next);
        let fpr = next.dist(&z);
        let mut restarted = false;
        match anchor.as_mut() {
            None => std::mem::swap(&mut z, &mut next),
            Some(anchor) => {
                if fpr_at_restart.is_nan() {
                    fpr_at_restart = fpr;
                }
                if k_since_restart > 0 && fpr <= settings.restart_factor * fpr_at_restart {
                    std::mem::swap(&mut z, &mut next);
                    anchor.clone_from(&z);
                    k_since_restart = 0;
                    fpr_at_restart = fpr;
                    restarted = true;
                } else {
                    let k = k_since_restart as f64;
                    next.blend((k + 1.0) / (k + 2.0), anchor);
                    std::mem::swap(&mut z, &mut next);
                    k_since_restart += 1;
                }
            }
        }
        eps = ws.kkt_error(&z);
        record(&z, eps, fpr, restarted, ctl);
    };

    let total = records.len();
    let stride = total.div_ceil(MAX_RECORDED).max(1);
    let iterates: Vec<Iterate> = records
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i == total - 1)
        .map(|(i, rec)| make_iterate(rec, &basis_bits[i * words..(i + 1) * words], mode, stride))
        .collect();

    let x = Point2::new(z.u[0], z.u[1]);
    let trace = SolverTrace {
        algorithm: Algorithm::Pdhg,
        settings: settings.resolved(Algorithm::Pdhg),
        status,
        iterates,
        objective_value: (status == Status::Optimal).then(|| spec.objective_value(x)),
        ray: None,
    };
    let state = PdhgState {
        x: z.u,
        y: z.y,
        tau,
        sigma,
        eps,
        anchor: anchor.map(|a| a.u.into_iter().chain(a.y).collect()),
        k_since_restart,
        eps_at_restart: fpr_at_restart,
    };
    Ok((trace, state))
}

fn make_iterate(rec: &Record, bits: &[u64], mode: PdhgMode, stride: usize) -> Iterate {
    let basis = (0..bits.len() * 64).filter(|&j| bits[j / 64] >> (j % 64) & 1 == 1).collect();
    let phase = match mode {
        PdhgMode::Inequality => "inequality",
        PdhgMode::Equality => "equality",
    };
    Iterate::new(Point2::from(rec.x), rec.eps, phase)
        .with_basis(basis)
        .with_meta("eps", rec.eps)
        .with_meta("fixed_point_residual", rec.fpr)
        .with_meta("restarted", if rec.restarted { 1.0 } else { 0.0 })
        .with_meta("decimation", stride as f64)
        .with_meta("iteration", rec.iteration as f64)
}
