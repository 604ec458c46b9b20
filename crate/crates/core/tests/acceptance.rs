//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use lpwork_core::central_path::{mu_schedule, BarrierSubproblem};
use lpwork_core::geometry::{self, halfspaces_of, objective_status, Region};
use lpwork_core::ipm::{solve_ipm_detailed, IpmState};
use lpwork_core::linalg::{lu_factor, DenseMatrix, LuFactors};
use lpwork_core::sweep::{angle_step_offsets, bench, regular_polygon, rotate_sweep};
use lpwork_core::{solve, Algorithm, Error, PdhgMode, Point2, ProblemSpec, SolverSettings, Status};
use rand::Rng;

const SUITE_SIZE: usize = 200;
const SUITE_SEED: u64 = 20240601;

type Check = fn() -> Result<String, String>;

fn suite() -> Vec<ProblemSpec> {
    let mut rng = common::rng(SUITE_SEED);
    (0..SUITE_SIZE).map(|_| common::random_problem(&mut rng)).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn fail(e: Error) -> String {
    e.to_string()
}

fn pdhg_settings(mode: PdhgMode, tolerance: f64) -> SolverSettings {
    SolverSettings { pdhg_mode: mode, tolerance, max_iterations: Some(200_000), ..SolverSettings::default() }
}

fn ipm_settings(alpha_max: f64, max_iterations: usize) -> SolverSettings {
    SolverSettings { alpha_max, max_iterations: Some(max_iterations), ..SolverSettings::default() }
}

fn c1_oracle_equivalence() -> Result<String, String> {
    let mut worst = [0.0f64; 5];
    for (k, spec) in suite().iter().enumerate() {
        let best = common::vertex_oracle(&spec.vertices, spec.objective);
        let runs = [
            (Algorithm::Simplex, SolverSettings::default(), 1e-7),
            (Algorithm::Ipm, ipm_settings(0.99, 200), 1e-4),
            (Algorithm::CentralPath, SolverSettings::default(), 1e-3),
            (Algorithm::Pdhg, pdhg_settings(PdhgMode::Equality, 1e-6), 1e-2),
            (Algorithm::Pdhg, pdhg_settings(PdhgMode::Inequality, 1e-6), 1e-2),
        ];
        for (slot, (alg, settings, tol)) in runs.into_iter().enumerate() {
            let trace = solve(spec, alg, &settings).map_err(fail)?;
            let end = trace.last_point().ok_or("empty trace")?;
            let err = (spec.objective_value(end) - best).abs();
            worst[slot] = worst[slot].max(err);
            ensure(err <= tol, || format!("problem {k}: {alg} slot {slot} off by {err:e} (> {tol:e})"))?;
        }
    }
    Ok(format!(
        "{SUITE_SIZE} polygons; worst |error|: simplex {:.1e}, ipm {:.1e}, central path {:.1e}, pdhg-eq {:.1e}, pdhg-ineq {:.1e}",
        worst[0], worst[1], worst[2], worst[3], worst[4]
    ))
}

fn c2_phantom_pivots() -> Result<String, String> {
    let vertices = [(-1.0, -4.0), (9.0, 1.0), (5.0, 5.0)].map(|(a, b)| Point2::new(a, b));
    let region = Region::closed(&vertices).map_err(fail)?;
    let spec = ProblemSpec::from_region([0.758, -0.652], region);
    let trace = solve(&spec, Algorithm::Simplex, &SolverSettings::default()).map_err(fail)?;
    let pivots = trace.iterates.len() - 1;
    let phantoms: Vec<Point2> = trace
        .iterates
        .iter()
        .map(|it| it.point)
        .filter(|p| {
            (p.x1.abs() < 1e-9 || p.x2.abs() < 1e-9) && spec.vertices.iter().all(|v| v.dist(*p) > 1e-3)
        })
        .collect();
    ensure(trace.status == Status::Optimal, || format!("status {}", trace.status))?;
    ensure(pivots > 3, || format!("only {pivots} phase II pivots"))?;
    ensure(!phantoms.is_empty(), || "no iterate on an axis away from the vertices".into())?;
    Ok(format!("triangle with 3 vertices: {pivots} phase II pivots, {} axis iterates off the vertices", phantoms.len()))
}

fn c3_ipm_contract() -> Result<String, String> {
    let problems = suite();
    let mut slower = 0;
    let mut most = 0;
    for (k, spec) in problems.iter().enumerate() {
        let (fast, state) = solve_ipm_detailed(spec, &ipm_settings(0.99, 200)).map_err(fail)?;
        let first = &fast.iterates[0];
        ensure(first.point == Point2::ORIGIN && first.z == 1.0, || format!("problem {k}: start {:?}", first))?;
        ensure(IpmState::initial(spec.m()) == IpmState { x: [0.0; 2], s: vec![1.0; spec.m()], y: vec![1.0; spec.m()], mu: 1.0 }, || {
            "initial state is not (0, 1, 1)".into()
        })?;
        let iterations = fast.iterates.len() - 1;
        most = most.max(iterations);
        ensure(fast.status == Status::Optimal && state.mu <= 1e-8 && iterations <= 200, || {
            format!("problem {k}: status {} mu {:e} after {iterations} iterations", fast.status, state.mu)
        })?;
        let slow = solve(spec, Algorithm::Ipm, &ipm_settings(0.1, 2000)).map_err(fail)?;
        if slow.iterates.len() > fast.iterates.len() {
            slower += 1;
        }
    }
    let share = slower as f64 / problems.len() as f64;
    ensure(share >= 0.95, || format!("alpha_max 0.1 slower on only {:.1}%", 100.0 * share))?;
    Ok(format!(
        "start (0,1,1); mu <= 1e-8 within {most} iterations (alpha_max 0.99); alpha_max 0.1 slower on {:.1}%",
        100.0 * share
    ))
}

fn c4_pdhg_modes() -> Result<String, String> {
    // tol 1e-8: the relative KKT error tolerates objective gaps of order tol·|c·x|
    let problems = suite();
    let mut differ = 0;
    let mut worst: f64 = 0.0;
    for (k, spec) in problems.iter().enumerate() {
        let eq = solve(spec, Algorithm::Pdhg, &pdhg_settings(PdhgMode::Equality, 1e-8)).map_err(fail)?;
        let ineq = solve(spec, Algorithm::Pdhg, &pdhg_settings(PdhgMode::Inequality, 1e-8)).map_err(fail)?;
        let gap = (spec.objective_value(eq.last_point().unwrap()) - spec.objective_value(ineq.last_point().unwrap())).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-5, || format!("problem {k}: modes disagree by {gap:e}"))?;
        let spread = (0..10)
            .map(|i| eq.iterates[i].point.dist(ineq.iterates[i].point))
            .fold(0.0, f64::max);
        if spread > 1e-6 {
            differ += 1;
        }
    }
    let share = differ as f64 / problems.len() as f64;
    ensure(share >= 0.9, || format!("first-10 paths differ on only {:.1}%", 100.0 * share))?;
    Ok(format!("objective gap <= {worst:.1e}; first-10 paths differ on {:.1}%", 100.0 * share))
}

fn c5_central_path() -> Result<String, String> {
    let mus = mu_schedule(30).map_err(fail)?;
    ensure(mus[0] == 1e3 && mus[29] == 1e-5, || format!("endpoints {} {}", mus[0], mus[29]))?;
    let two = mu_schedule(2).map_err(fail)?;
    ensure(two == [1e3, 1e-5], || format!("count 2 gives {two:?}"))?;

    let mut rng = common::rng(5);
    let mut worst: f64 = 0.0;
    let h = 1e-6;
    for _ in 0..100 {
        let spec = common::random_problem(&mut rng);
        let x = loop {
            let p = Point2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            if common::point_in_polygon(&spec.vertices, p) && common::boundary_distance(&spec.vertices, p) > 1e-2 {
                break p;
            }
        };
        let mu = 10f64.powf(rng.gen_range(-3.0..3.0));
        let sub = BarrierSubproblem::new(&spec, mu, x).map_err(fail)?;
        let g = sub.gradient(x);
        let f = |p: Point2| sub.value(p).expect("interior");
        let fd = Point2::new(
            (f(x + Point2::new(h, 0.0)) - f(x - Point2::new(h, 0.0))) / (2.0 * h),
            (f(x + Point2::new(0.0, h)) - f(x - Point2::new(0.0, h))) / (2.0 * h),
        );
        let rel = (fd - g).x1.abs().max((fd - g).x2.abs()) / g.x1.abs().max(g.x2.abs());
        worst = worst.max(rel);
        ensure(rel <= 1e-5, || format!("gradient at {x} (mu {mu:e}) off by {rel:e} relative"))?;
    }

    let mut checked = 0;
    for (k, spec) in suite().iter().enumerate() {
        let trace = solve(spec, Algorithm::CentralPath, &SolverSettings::default()).map_err(fail)?;
        for it in &trace.iterates {
            ensure(spec.min_slack(it.point) > 0.0, || format!("problem {k}: iterate {} not interior", it.point))?;
            checked += 1;
        }
    }
    Ok(format!("endpoints exact; gradient worst relative error {worst:.1e}; {checked} iterates strictly interior"))
}

fn c6_geometry() -> Result<String, String> {
    let mut rng = common::rng(6);
    let mut points = 0;
    for k in 0..1000 {
        let poly = common::random_polygon(&mut rng);
        let hs = halfspaces_of(&poly, true).map_err(fail)?;
        for v in &poly {
            let tight = hs.iter().filter(|h| h.residual(*v).abs() <= 1e-9).count();
            ensure(tight == 2, || format!("polygon {k}: vertex {v} tight on {tight} constraints"))?;
        }
        let mut tested = 0;
        while tested < 100 {
            let p = Point2::new(rng.gen_range(-11.0..11.0), rng.gen_range(-11.0..11.0));
            if common::boundary_distance(&poly, p) <= 1e-9 {
                continue;
            }
            let ours = geometry::contains(&hs, p, 0.0);
            let oracle = common::point_in_polygon(&poly, p);
            ensure(ours == oracle, || format!("polygon {k}: membership of {p} is {ours}, oracle {oracle}"))?;
            tested += 1;
        }
        points += tested;
    }

    let margin = 0.2f64.to_radians().sin();
    let mut unbounded = 0;
    for k in 0..500 {
        let poly = common::random_open_polyline(&mut rng, 5f64.to_radians());
        let region = Region::open(&poly, None).map_err(fail)?;
        let n = region.vertices.len();
        let v = &region.vertices;
        let unit = |p: Point2| p.scale(1.0 / p.norm());
        let rays = [unit(v[n - 1] - v[n - 2]), unit(v[0] - v[1])];
        let c = loop {
            let c = common::unit_vector(&mut rng);
            let reach = rays.iter().map(|r| c[0] * r.x1 + c[1] * r.x2).fold(f64::NEG_INFINITY, f64::max);
            if reach.abs() > margin {
                break c;
            }
        };
        let ours = objective_status(&region.halfspaces, c).map_err(fail)?.is_unbounded();
        let oracle = common::ray_sampling_unbounded(&region.halfspaces, c);
        ensure(ours == oracle, || format!("open region {k}: unbounded {ours}, oracle {oracle}"))?;
        unbounded += usize::from(ours);
    }
    Ok(format!("1000 polygons, {points} membership points; 500 open regions ({unbounded} unbounded) agree"))
}

fn c7_linalg() -> Result<String, String> {
    let mut counts = [0usize; 2];
    let mut lu = LuFactors::workspace();
    for n in [2usize, 3] {
        let total = 5usize.pow((n * n) as u32);
        let mut m = DenseMatrix::zeros(n, n);
        for code in 0..total {
            let mut c = code;
            let ints: Vec<i64> = (0..n * n)
                .map(|_| {
                    let v = (c % 5) as i64 - 2;
                    c /= 5;
                    v
                })
                .collect();
            for (d, &v) in m.data_mut().iter_mut().zip(&ints) {
                *d = v as f64;
            }
            let rows: Vec<Vec<i64>> = ints.chunks(n).map(<[i64]>::to_vec).collect();
            let det = common::int_det(&rows);
            match lu.refactor(&m) {
                Err(Error::Singular { .. }) => {
                    ensure(det == 0, || format!("{rows:?}: flagged singular, det {det}"))?;
                    counts[0] += 1;
                }
                Err(e) => return Err(e.to_string()),
                Ok(()) => {
                    ensure(det != 0, || format!("{rows:?}: factored a singular matrix"))?;
                    let got = lu.determinant();
                    ensure((got - det as f64).abs() <= 1e-9, || format!("{rows:?}: det {got} vs {det}"))?;
                    let b: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
                    let x = lu.solve(&b).map_err(fail)?;
                    let af: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
                    let oracle = common::gauss_solve(&af, &b).ok_or("oracle found no pivot")?;
                    let diff = x.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    ensure(diff <= 1e-9, || format!("{rows:?}: solution differs by {diff:e}"))?;
                    let xt = lu.solve_transposed(&b).map_err(fail)?;
                    let at: Vec<Vec<f64>> = (0..n).map(|j| af.iter().map(|r| r[j]).collect()).collect();
                    let oracle_t = common::gauss_solve(&at, &b).ok_or("oracle found no pivot")?;
                    let diff = xt.iter().zip(&oracle_t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    ensure(diff <= 1e-9, || format!("{rows:?}: transposed solution differs by {diff:e}"))?;
                    counts[1] += 1;
                }
            }
        }
    }

    let mut rng = common::rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let data: Vec<f64> = (0..2500).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = DenseMatrix::from_row_major(50, 50, data).map_err(fail)?;
        let f = lu_factor(&a).map_err(fail)?;
        let prod = f.lower().matmul(&f.upper()).map_err(fail)?;
        let mut resid: f64 = 0.0;
        for (i, &src) in f.perm().iter().enumerate() {
            let row_sum: f64 = (0..50).map(|j| (a[(src, j)] - prod[(i, j)]).abs()).sum();
            resid = resid.max(row_sum);
        }
        let rel = resid / a.norm_inf();
        worst = worst.max(rel);
        ensure(rel <= 1e-10, || format!("50x50 reconstruction {rel:e} relative"))?;
    }
    Ok(format!(
        "{} singular / {} regular integer matrices match; 50x50 |PA-LU| <= {worst:.1e}·|A|",
        counts[0], counts[1]
    ))
}

fn c8_performance() -> Result<String, String> {
    let rows = bench(20, 21, &SolverSettings::default()).map_err(fail)?;
    let mut parts = Vec::new();
    for row in &rows {
        ensure(row.median_ms <= 50.0, || format!("{} median {:.2} ms", row.name, row.median_ms))?;
        parts.push(format!("{} {:.2} ms", row.name, row.median_ms));
    }
    Ok(format!("20-gon medians: {}", parts.join(", ")))
}

fn c9_rotation_count() -> Result<String, String> {
    let spec = regular_polygon(8).map_err(fail)?;
    let offsets = angle_step_offsets(0.001, true).map_err(fail)?;
    let t0 = Instant::now();
    let traces = rotate_sweep(&spec, Algorithm::Simplex, &SolverSettings::default(), &offsets).map_err(fail)?;
    ensure(traces.len() == 1571, || format!("{} traces", traces.len()))?;
    ensure(traces.iter().all(|t| t.settings.angle.is_some()), || "trace without angle".into())?;
    Ok(format!("quarter sweep at 0.001 rad: {} traces in {:.0} ms", traces.len(), t0.elapsed().as_secs_f64() * 1e3))
}

fn main() -> ExitCode {
    let checks: [(u32, &str, Check); 9] = [
        (1, "oracle equivalence", c1_oracle_equivalence),
        (2, "phantom pivots", c2_phantom_pivots),
        (3, "ipm contract", c3_ipm_contract),
        (4, "pdhg mode agreement", c4_pdhg_modes),
        (5, "central path", c5_central_path),
        (6, "geometry", c6_geometry),
        (7, "linalg", c7_linalg),
        (8, "performance budget", c8_performance),
        (9, "rotation sweep count", c9_rotation_count),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL {name} ({secs:.2}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
