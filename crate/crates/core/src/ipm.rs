//! Infeasible primal-dual predictor-corrector interior-point method.
//!
//! Works on `max c·x  s.t.  A·x + s = b, s >= 0` and its dual `min b·y  s.t.  Aᵀy = c,
//! y >= 0`, starting from `(x, s, y) = (0, 1, 1)`. Each iteration factors the full Newton
//! (KKT) system once and solves it for the affine predictor and, unless the affine steps are
//! already long enough, for the centering corrector.

use crate::error::{Error, Result};
use crate::linalg::{matvec_into, norm_inf, transposed_matvec_into, DenseMatrix, LuFactors};
use crate::model::{Algorithm, Iterate, Point2, ProblemSpec, SolverSettings, SolverTrace, Status};
use crate::run::RunControl;

/// Fraction of the distance to the boundary a single step may cover.
pub const FRACTION_TO_BOUNDARY: f64 = 0.995;
/// Diagonal regularization of the primal block of the KKT matrix.
pub const REGULARIZATION: f64 = 1e-10;
/// Iterates with `‖x‖∞ > DIVERGENCE_FACTOR·(1 + ‖b‖∞)` are treated as running off along a
/// ray: a singular KKT system there ends the run instead of raising an error.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct IpmState {
    pub x: [f64; 2],
    pub s: Vec<f64>,
    pub y: Vec<f64>,
    pub mu: f64,
}

impl IpmState {
    pub fn initial(m: usize) -> Self {
        Self { x: [0.0; 2], s: vec![1.0; m], y: vec![1.0; m], mu: 1.0 }
    }

    pub fn complementarity(s: &[f64], y: &[f64]) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        s.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / s.len() as f64
    }
}

/// Largest `α` with `v + α·dv >= 0`, or infinity if no component decreases.
fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&x, &d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

struct Kkt {
    m: usize,
    matrix: DenseMatrix,
    lu: LuFactors,
    rhs: Vec<f64>,
    sol: Vec<f64>,
}

impl Kkt {
    fn new(a: &DenseMatrix) -> Self {
        let m = a.rows();
        let n = 2 + 2 * m;
        let mut matrix = DenseMatrix::zeros(n, n);
        // rows 0..2:     Aᵀ dy − δ dx          = r_d
        // rows 2..2+m:   A dx + ds             = r_p
        // rows 2+m..:    Y ds + S dy           = r_c
        for i in 0..m {
            for j in 0..2 {
                matrix[(j, 2 + m + i)] = a[(i, j)];
                matrix[(2 + i, j)] = a[(i, j)];
            }
            matrix[(2 + i, 2 + i)] = 1.0;
        }
        for j in 0..2 {
            matrix[(j, j)] = -REGULARIZATION;
        }
        Self { m, matrix, lu: LuFactors::workspace(), rhs: vec![0.0; n], sol: vec![0.0; n] }
    }

    fn factor(&mut self, s: &[f64], y: &[f64]) -> Result<()> {
        let m = self.m;
        for i in 0..m {
            self.matrix[(2 + m + i, 2 + i)] = y[i];
            self.matrix[(2 + m + i, 2 + m + i)] = s[i];
        }
        self.lu.refactor(&self.matrix).map_err(|e| match e {
            Error::Singular { .. } => Error::IllConditioned,
            other => other,
        })
    }

    fn solve(&mut self, rd: &[f64], rp: &[f64], rc: &[f64]) -> Result<()> {
        let m = self.m;
        self.rhs[..2].copy_from_slice(rd);
        self.rhs[2..2 + m].copy_from_slice(rp);
        self.rhs[2 + m..].copy_from_slice(rc);
        self.lu.solve_into(&self.rhs, &mut self.sol)?;
        if self.sol.iter().any(|v| !v.is_finite()) {
            return Err(Error::IllConditioned);
        }
        Ok(())
    }

    fn dx(&self) -> &[f64] {
        &self.sol[..2]
    }

    fn ds(&self) -> &[f64] {
        &self.sol[2..2 + self.m]
    }

    fn dy(&self) -> &[f64] {
        &self.sol[2 + self.m..]
    }
}

pub fn solve_ipm(spec: &ProblemSpec, settings: &SolverSettings) -> Result<SolverTrace> {
    solve_ipm_with(spec, settings, &mut RunControl::new())
}

pub fn solve_ipm_with(
    spec: &ProblemSpec,
    settings: &SolverSettings,
    ctl: &mut RunControl<'_>,
) -> Result<SolverTrace> {
    run(spec, settings, ctl).map(|(trace, _)| trace)
}

fn run(
    spec: &ProblemSpec,
    settings: &SolverSettings,
    ctl: &mut RunControl<'_>,
) -> Result<(SolverTrace, IpmState)> {
    settings.validate()?;
    let m = spec.m();
    if m == 0 {
        return Err(Error::DegenerateRegion("interior point needs at least one constraint".into()));
    }
    let cap = settings.max_iterations_for(Algorithm::Ipm);
    let a = spec.constraint_matrix();
    let b = spec.rhs();
    let c = spec.objective;
    let b_scale = 1.0 + norm_inf(&b);
    let c_scale = 1.0 + norm_inf(&c);

    let mut st = IpmState::initial(m);
    let mut kkt = Kkt::new(&a);
    let (mut ax, mut aty) = (vec![0.0; m], [0.0; 2]);
    let (mut rp, mut rd) = (vec![0.0; m], [0.0; 2]);
    let mut rc = vec![0.0; m];
    let (mut dx_aff, mut ds_aff, mut dy_aff) = ([0.0; 2], vec![0.0; m], vec![0.0; m]);
    let (mut s_trial, mut y_trial) = (vec![0.0; m], vec![0.0; m]);

    let first = Iterate::new(Point2::from(st.x), st.mu, "initial")
        .with_meta("mu", st.mu)
        .with_meta("fraction_to_boundary", FRACTION_TO_BOUNDARY);
    ctl.emit(&first);
    let mut iterates = vec![first];

    let mut iterations = 0;
    let status = loop {
        matvec_into(&a, &st.x, &mut ax)?;
        transposed_matvec_into(&a, &st.y, &mut aty)?;
        for i in 0..m {
            rp[i] = b[i] - ax[i] - st.s[i];
        }
        for j in 0..2 {
            rd[j] = c[j] - aty[j];
        }
        let residual = (norm_inf(&rp) / b_scale).max(norm_inf(&rd) / c_scale).max(st.mu);
        if residual <= settings.tolerance {
            break Status::Optimal;
        }
        if iterations >= cap {
            break Status::MaxIterations;
        }
        ctl.checkpoint()?;
        iterations += 1;

        let diverging = norm_inf(&st.x) > DIVERGENCE_FACTOR * b_scale;
        let truncate = |e: Error| match e {
            Error::IllConditioned if diverging => Ok(()),
            e => Err(e),
        };
        if let Err(e) = kkt.factor(&st.s, &st.y) {
            truncate(e)?;
            break Status::MaxIterations;
        }

        // predictor: pure Newton step toward complementarity zero
        for i in 0..m {
            rc[i] = -st.s[i] * st.y[i];
        }
        if let Err(e) = kkt.solve(&rd, &rp, &rc) {
            truncate(e)?;
            break Status::MaxIterations;
        }
        dx_aff.copy_from_slice(kkt.dx());
        ds_aff.copy_from_slice(kkt.ds());
        dy_aff.copy_from_slice(kkt.dy());
        let alpha_p_aff = max_step(&st.s, &ds_aff).min(1.0);
        let alpha_d_aff = max_step(&st.y, &dy_aff).min(1.0);

        let corrector_used = alpha_p_aff.min(alpha_d_aff) <= settings.corrector_threshold;
        let (dx, ds, dy): (&[f64], &[f64], &[f64]) = if corrector_used {
            for i in 0..m {
                s_trial[i] = st.s[i] + alpha_p_aff * ds_aff[i];
                y_trial[i] = st.y[i] + alpha_d_aff * dy_aff[i];
            }
            let mu_aff = IpmState::complementarity(&s_trial, &y_trial);
            let sigma = (mu_aff / st.mu).powi(3);
            for i in 0..m {
                rc[i] = sigma * st.mu - st.s[i] * st.y[i] - ds_aff[i] * dy_aff[i];
            }
            if let Err(e) = kkt.solve(&rd, &rp, &rc) {
                truncate(e)?;
                break Status::MaxIterations;
            }
            (kkt.dx(), kkt.ds(), kkt.dy())
        } else {
            (&dx_aff, &ds_aff, &dy_aff)
        };

        let alpha_p = settings.alpha_max * (FRACTION_TO_BOUNDARY * max_step(&st.s, ds)).min(1.0);
        let alpha_d = settings.alpha_max * (FRACTION_TO_BOUNDARY * max_step(&st.y, dy)).min(1.0);
        for j in 0..2 {
            st.x[j] += alpha_p * dx[j];
        }
        for i in 0..m {
            st.s[i] += alpha_p * ds[i];
            st.y[i] += alpha_d * dy[i];
        }
        st.mu = IpmState::complementarity(&st.s, &st.y);
        if !(st.mu.is_finite() && st.x.iter().all(|v| v.is_finite())) {
            return Err(Error::IllConditioned);
        }

        let phase = if corrector_used { "corrector" } else { "predictor" };
        let it = Iterate::new(Point2::from(st.x), st.mu, phase)
            .with_meta("mu", st.mu)
            .with_meta("alpha_p", alpha_p)
            .with_meta("alpha_d", alpha_d)
            .with_meta("corrector_used", if corrector_used { 1.0 } else { 0.0 })
            .with_meta("min_s", st.s.iter().copied().fold(f64::INFINITY, f64::min))
            .with_meta("min_y", st.y.iter().copied().fold(f64::INFINITY, f64::min));
        ctl.emit(&it);
        iterates.push(it);
    };

    let objective_value = (status == Status::Optimal).then(|| spec.objective_value(Point2::from(st.x)));
    let trace = SolverTrace {
        algorithm: Algorithm::Ipm,
        settings: settings.resolved(Algorithm::Ipm),
        status,
        iterates,
        objective_value,
        ray: None,
    };
    Ok((trace, st))
}

/// Same as [`solve_ipm`], also returning the final primal-dual state.
pub fn solve_ipm_detailed(spec: &ProblemSpec, settings: &SolverSettings) -> Result<(SolverTrace, IpmState)> {
    run(spec, settings, &mut RunControl::new())
}
