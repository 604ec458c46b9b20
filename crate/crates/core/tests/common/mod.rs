//! Seeded problem generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use lpwork_core::geometry::{AddOutcome, RegionBuilder};
use lpwork_core::{Halfspace, Point2, ProblemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector(rng: &mut impl Rng) -> [f64; 2] {
    let t = rng.gen_range(0.0..TAU);
    [t.cos(), t.sin()]
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x1 - o.x1) * (b.x2 - o.x2) - (a.x2 - o.x2) * (b.x1 - o.x1)
}

/// Counter-clockwise convex hull (monotone chain), dropping collinear points.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x1.total_cmp(&b.x1).then(a.x2.total_cmp(&b.x2)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// True when every corner of the counter-clockwise `poly` turns clearly left.
fn well_shaped(poly: &[Point2]) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let (a, b, c) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
        let (u, v) = (b - a, c - b);
        u.norm() > 0.05 && (u.x1 * v.x2 - u.x2 * v.x1) > 1e-3 * u.norm() * v.norm()
    })
}

/// Random closed convex polygon with 5–12 vertices in `[-10, 10]²`, accepted vertex by
/// vertex through [`RegionBuilder`].
pub fn random_polygon(rng: &mut impl Rng) -> Vec<Point2> {
    loop {
        let k = rng.gen_range(5..=12);
        let center = Point2::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let room = 10.0 - center.x1.abs().max(center.x2.abs());
        let radius = rng.gen_range(2.0..room);
        let pts: Vec<Point2> = (0..k)
            .map(|_| {
                let t = rng.gen_range(0.0..TAU);
                let r = radius * rng.gen_range(0.6..1.0);
                center + Point2::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let hull = convex_hull(&pts);
        if !(5..=12).contains(&hull.len()) || !well_shaped(&hull) {
            continue;
        }
        let mut b = RegionBuilder::new();
        if hull.iter().all(|&p| b.try_add_vertex(p).unwrap() == AddOutcome::Accepted) {
            return hull;
        }
    }
}

/// Random convex polygon problem with a unit objective.
pub fn random_problem(rng: &mut impl Rng) -> ProblemSpec {
    let poly = random_polygon(rng);
    let region = lpwork_core::geometry::Region::closed(&poly).unwrap();
    ProblemSpec::from_region(unit_vector(rng), region)
}

/// `max_v c·v` over the polygon vertices.
pub fn vertex_oracle(vertices: &[Point2], c: [f64; 2]) -> f64 {
    vertices.iter().map(|v| c[0] * v.x1 + c[1] * v.x2).fold(f64::NEG_INFINITY, f64::max)
}

/// Crossing-number point-in-polygon test.
pub fn point_in_polygon(poly: &[Point2], p: Point2) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.x2 > p.x2) != (b.x2 > p.x2) {
            let x = a.x1 + (p.x2 - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2);
            if p.x1 < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Distance from `p` to the boundary of `poly`.
pub fn boundary_distance(poly: &[Point2], p: Point2) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let ab = b - a;
            let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
            p.dist(a + ab.scale(t))
        })
        .fold(f64::INFINITY, f64::min)
}

/// A random open region: 2–5 vertices whose recession cone spans at least `min_cone`
/// radians. Returns counter-clockwise vertices.
pub fn random_open_polyline(rng: &mut impl Rng, min_cone: f64) -> Vec<Point2> {
    let n: usize = rng.gen_range(2..=5);
    let edges = n - 1;
    let budget = PI - min_cone;
    // positive turns between consecutive edges, summing to at most `budget`
    let mut turns: Vec<f64> = (0..edges.saturating_sub(1)).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = turns.iter().sum();
    let scale = rng.gen_range(0.2..1.0) * budget / total.max(budget);
    turns.iter_mut().for_each(|t| *t *= scale);
    let mut heading = rng.gen_range(0.0..TAU);
    let mut p = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let mut out = vec![p];
    for e in 0..edges {
        let len = rng.gen_range(1.0..5.0);
        p = p + Point2::new(len * heading.cos(), len * heading.sin());
        out.push(p);
        if e < turns.len() {
            heading += turns[e];
        }
    }
    out
}

/// Brute-force unboundedness: some of 3600 equally spaced unit directions `d` satisfies
/// `A·d <= 1e-9` and `c·d > 1e-9`.
pub fn ray_sampling_unbounded(halfspaces: &[Halfspace], c: [f64; 2]) -> bool {
    (0..3600).any(|k| {
        let t = TAU * k as f64 / 3600.0;
        let d = (t.cos(), t.sin());
        halfspaces.iter().all(|h| h.a1 * d.0 + h.a2 * d.1 <= 1e-9) && c[0] * d.0 + c[1] * d.1 > 1e-9
    })
}

/// Exact determinant of a small integer matrix by cofactor expansion.
pub fn int_det(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                a[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &v)| v).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * a[0][j] * int_det(&minor)
        })
        .sum()
}

/// Gaussian elimination with full re-search of a nonzero pivot, in plain `f64`.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot_row = m[col].clone();
                for (v, p) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *v -= f * p;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}
