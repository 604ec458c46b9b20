//! Planar region construction: incremental convex vertex input, V-rep → H-rep
//! conversion, containment and recession-cone / unboundedness tests.
//!
//! Vertex lists are stored counter-clockwise, so the interior of a region is on the left
//! of every directed edge and every halfspace normal points outward.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{Halfspace, Point2, VERTEX_TOL};

/// Relative tolerance for collinearity: `|u × v| <= COLLINEAR_TOL · |u|·|v|`.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// Tolerance on `A·d <= 0` when testing recession directions.
pub const RAY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Turn {
    Left,
    Right,
    Collinear,
}

pub fn cross(u: Point2, v: Point2) -> f64 {
    u.x1 * v.x2 - u.x2 * v.x1
}

fn unit(p: Point2) -> Point2 {
    p.scale(1.0 / p.norm())
}

/// Orientation of the corner `a → b → c`.
pub fn turn(a: Point2, b: Point2, c: Point2) -> Turn {
    let (u, v) = (b - a, c - b);
    let k = cross(u, v);
    if k.abs() <= COLLINEAR_TOL * u.norm() * v.norm() {
        Turn::Collinear
    } else if k > 0.0 {
        Turn::Left
    } else {
        Turn::Right
    }
}

/// Twice the signed area (positive for counter-clockwise polygons).
pub fn signed_area2(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    (0..n).map(|i| cross(vertices[i], vertices[(i + 1) % n])).sum()
}

/// Overall orientation of a vertex sequence, or `None` when it has no turn.
pub fn orientation(vertices: &[Point2], closed: bool) -> Option<Turn> {
    let s = if closed {
        signed_area2(vertices)
    } else {
        vertices.windows(3).map(|w| cross(w[1] - w[0], w[2] - w[1])).sum()
    };
    if s > 0.0 {
        Some(Turn::Left)
    } else if s < 0.0 {
        Some(Turn::Right)
    } else {
        None
    }
}

/// Sum of the signed exterior angles along the sequence (wrapping when closed).
pub fn total_turning(vertices: &[Point2], closed: bool) -> f64 {
    let n = vertices.len();
    let corners: Vec<usize> = if closed { (0..n).collect() } else { (1..n.saturating_sub(1)).collect() };
    corners
        .into_iter()
        .map(|i| {
            let u = vertices[i] - vertices[(i + n - 1) % n];
            let v = vertices[(i + 1) % n] - vertices[i];
            cross(u, v).atan2(u.dot(v))
        })
        .sum()
}

/// A finished region: counter-clockwise vertices and the matching halfspaces.
///
/// For a closed region halfspace `i` is the edge `v_i → v_{i+1}` (wrapping); for an open
/// region there are `n − 1` halfspaces and the first and last edges extend to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub vertices: Vec<Point2>,
    pub closed: bool,
    pub halfspaces: Vec<Halfspace>,
}

impl Region {
    /// Bounded region with the given vertices (either orientation).
    pub fn closed(vertices: &[Point2]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateRegion(format!(
                "a closed region needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let vertices = counter_clockwise(vertices, true, None)?;
        check_shape(&vertices, true)?;
        let halfspaces = halfspaces_of(&vertices, true)?;
        Ok(Self { vertices, closed: true, halfspaces })
    }

    /// Unbounded region whose first and last edges extend to infinity.
    ///
    /// `hint` picks the interior side of a two-vertex region; without it the interior is
    /// on the left of the directed edge `v_0 → v_1`.
    pub fn open(vertices: &[Point2], hint: Option<Point2>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::DegenerateRegion(format!(
                "an open region needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        let vertices = counter_clockwise(vertices, false, hint)?;
        check_shape(&vertices, false)?;
        if total_turning(&vertices, false) > PI + 1e-12 {
            return Err(Error::DegenerateRegion(
                "open region turns by more than a half revolution; its end rays would cross".into(),
            ));
        }
        let halfspaces = halfspaces_of(&vertices, false)?;
        Ok(Self { vertices, closed: false, halfspaces })
    }

    /// Same region with vertex `index` moved to `p`, if the result is still valid.
    pub fn with_vertex_moved(&self, index: usize, p: Point2) -> Result<Self> {
        let mut vertices = self.vertices.clone();
        let slot = vertices
            .get_mut(index)
            .ok_or(Error::DimensionMismatch { expected: self.vertices.len(), found: index })?;
        *slot = p;
        self.rebuilt(&vertices)
    }

    /// Same region without vertex `index`; fails below 3 (closed) or 2 (open) vertices.
    pub fn without_vertex(&self, index: usize) -> Result<Self> {
        if index >= self.vertices.len() {
            return Err(Error::DimensionMismatch { expected: self.vertices.len(), found: index });
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(index);
        self.rebuilt(&vertices)
    }

    fn rebuilt(&self, vertices: &[Point2]) -> Result<Self> {
        if self.closed {
            Self::closed(vertices)
        } else {
            // keep the current interior side when only two vertices remain
            let hint = (vertices.len() == 2).then(|| left_hint(vertices[0], vertices[1]));
            let r = Self::open(vertices, hint)?;
            if r.vertices.len() > 2 && r.vertices.first() != vertices.first() {
                return Err(Error::DegenerateRegion("edit flips the open region".into()));
            }
            Ok(r)
        }
    }

    pub fn recession_cone(&self) -> RecessionCone {
        if self.closed {
            RecessionCone { rays: Vec::new() }
        } else {
            RecessionCone::of_open_polyline(&self.vertices)
        }
    }
}

/// The point one unit to the left of the midpoint of `p → q`.
fn left_hint(p: Point2, q: Point2) -> Point2 {
    let e = unit(q - p);
    let mid = (p + q).scale(0.5);
    mid + Point2::new(-e.x2, e.x1)
}

fn counter_clockwise(vertices: &[Point2], closed: bool, hint: Option<Point2>) -> Result<Vec<Point2>> {
    let mut v = vertices.to_vec();
    let flip = if !closed && v.len() == 2 {
        match hint {
            None => false,
            Some(h) => match turn(v[0], v[1], h) {
                Turn::Left => false,
                Turn::Right => true,
                Turn::Collinear => {
                    return Err(Error::DegenerateRegion(
                        "interior hint lies on the boundary line".into(),
                    ))
                }
            },
        }
    } else {
        orientation(&v, closed) == Some(Turn::Right)
    };
    if flip {
        v.reverse();
    }
    Ok(v)
}

/// Rejects duplicate, collinear, reflex or multiply-wound vertex sequences. Expects a
/// counter-clockwise sequence.
fn check_shape(vertices: &[Point2], closed: bool) -> Result<()> {
    let n = vertices.len();
    for i in 0..n {
        if !vertices[i].is_finite() {
            return Err(Error::NonFinite("vertex"));
        }
        for k in i + 1..n {
            if vertices[i].dist(vertices[k]) <= VERTEX_TOL {
                return Err(Error::DegenerateRegion(format!("duplicate vertex {k}")));
            }
        }
    }
    let corners: Vec<usize> = if closed { (0..n).collect() } else { (1..n - 1).collect() };
    for i in corners {
        match turn(vertices[(i + n - 1) % n], vertices[i], vertices[(i + 1) % n]) {
            Turn::Left => {}
            Turn::Collinear => {
                return Err(Error::DegenerateRegion(format!("collinear vertex {i}")));
            }
            Turn::Right => return Err(Error::DegenerateRegion(format!("nonconvex vertex {i}"))),
        }
    }
    if closed && total_turning(vertices, true) > 3.0 * PI {
        return Err(Error::DegenerateRegion("vertices wind around more than once".into()));
    }
    Ok(())
}

/// Halfspaces of the edges of a convex vertex sequence, one per consecutive pair (wrapping
/// when `closed`).
///
/// Each boundary passes through both endpoints of its edge and the interior lies on the
/// `<=` side. Clockwise input is reversed first, so the output order follows the
/// counter-clockwise vertex order. A two-vertex open sequence takes its interior on the
/// left of `v_0 → v_1`.
pub fn halfspaces_of(vertices: &[Point2], closed: bool) -> Result<Vec<Halfspace>> {
    let n = vertices.len();
    let needed = if closed { 3 } else { 2 };
    if n < needed {
        return Err(Error::DegenerateRegion(format!("need at least {needed} vertices, got {n}")));
    }
    if closed {
        let scale = vertices.iter().map(|v| v.norm()).fold(1.0, f64::max);
        if signed_area2(vertices).abs() <= COLLINEAR_TOL * scale * scale {
            return Err(Error::DegenerateRegion("vertices are collinear (zero area)".into()));
        }
    }
    let v = counter_clockwise(vertices, closed, None)?;
    let edges = if closed { n } else { n - 1 };
    (0..edges).map(|i| edge_halfspace(v[i], v[(i + 1) % n])).collect()
}

/// Halfspace bounded by the line through `p` and `q` with the interior on the left of
/// `p → q`.
pub fn edge_halfspace(p: Point2, q: Point2) -> Result<Halfspace> {
    let e = q - p;
    // outward normal is the right-hand perpendicular of the edge
    let h = Halfspace::new(e.x2, -e.x1, 0.0).map_err(|_| {
        Error::DegenerateRegion("edge endpoints coincide".into())
    })?;
    Ok(Halfspace { b: h.a1 * p.x1 + h.a2 * p.x2, ..h })
}

/// `true` iff `a·p − b <= tol` for every halfspace.
pub fn contains(halfspaces: &[Halfspace], p: Point2, tol: f64) -> bool {
    halfspaces.iter().all(|h| h.contains(p, tol))
}

/// Feasible pairwise intersections of the constraint lines: the vertices of the region
/// when it has any.
pub fn feasible_intersections(halfspaces: &[Halfspace]) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::new();
    for (i, h) in halfspaces.iter().enumerate() {
        for g in &halfspaces[i + 1..] {
            let det = h.a1 * g.a2 - h.a2 * g.a1;
            if det.abs() <= COLLINEAR_TOL {
                continue;
            }
            let p = Point2::new((h.b * g.a2 - h.a2 * g.b) / det, (h.a1 * g.b - h.b * g.a1) / det);
            let tol = 1e-9 * (1.0 + p.norm());
            if contains(halfspaces, p, tol) && out.iter().all(|q| q.dist(p) > tol) {
                out.push(p);
            }
        }
    }
    out
}

/// Directions `d` with `A·d <= 0`, described by at most two extreme unit rays.
///
/// Two opposite rays describe a half-plane (or a line); the cone is otherwise the set of
/// nonnegative combinations of the rays.
#[derive(Debug, Clone, PartialEq)]
pub struct RecessionCone {
    pub rays: Vec<Point2>,
}

impl RecessionCone {
    /// Cone of an open counter-clockwise polyline: the reversed first edge and the last
    /// edge, ordered clockwise-most first.
    pub fn of_open_polyline(vertices: &[Point2]) -> Self {
        let n = vertices.len();
        if n < 2 {
            return Self { rays: Vec::new() };
        }
        let back = unit(vertices[0] - vertices[1]);
        let forward = unit(vertices[n - 1] - vertices[n - 2]);
        let rays = if back.dist(forward) <= RAY_TOL { vec![forward] } else { vec![forward, back] };
        Self { rays }
    }

    pub fn is_trivial(&self) -> bool {
        self.rays.is_empty()
    }
}

fn boundary_directions(halfspaces: &[Halfspace]) -> impl Iterator<Item = Point2> + '_ {
    halfspaces.iter().flat_map(|h| {
        let e = Point2::new(-h.a2, h.a1);
        [e, e.scale(-1.0)]
    })
}

fn is_recession_direction(halfspaces: &[Halfspace], d: Point2) -> bool {
    halfspaces.iter().all(|h| h.normal().dot(d) <= RAY_TOL)
}

/// Recession cone of an arbitrary nonempty halfspace intersection.
pub fn recession_cone(halfspaces: &[Halfspace]) -> RecessionCone {
    let mut feasible: Vec<Point2> = Vec::new();
    for d in boundary_directions(halfspaces) {
        if is_recession_direction(halfspaces, d) && feasible.iter().all(|f| f.dist(d) > RAY_TOL) {
            feasible.push(d);
        }
    }
    if feasible.len() <= 1 {
        return RecessionCone { rays: feasible };
    }
    let sum = feasible.iter().fold(Point2::ORIGIN, |acc, &d| acc + d);
    if sum.norm() <= 1e-6 {
        // only opposite pairs: a half-plane or a line
        return RecessionCone { rays: feasible[..2].to_vec() };
    }
    let g = unit(sum);
    let angle = |d: &Point2| cross(g, *d).atan2(g.dot(*d));
    let first = *feasible.iter().min_by(|a, b| angle(a).total_cmp(&angle(b))).unwrap();
    let last = *feasible.iter().max_by(|a, b| angle(a).total_cmp(&angle(b))).unwrap();
    let rays = if first.dist(last) <= RAY_TOL { vec![first] } else { vec![first, last] };
    RecessionCone { rays }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveStatus {
    Bounded,
    /// `ray` is a unit recession direction with `c·ray > 0`.
    Unbounded { ray: Point2 },
}

impl ObjectiveStatus {
    pub fn is_unbounded(&self) -> bool {
        matches!(self, ObjectiveStatus::Unbounded { .. })
    }
}

/// Whether maximizing `c·x` over the (nonempty) region is unbounded.
///
/// On the unit circle the best recession direction for `c` is either `c/|c|` itself or an
/// endpoint of the feasible arc, and every arc endpoint lies along some constraint line.
pub fn objective_status(halfspaces: &[Halfspace], c: [f64; 2]) -> Result<ObjectiveStatus> {
    let c = Point2::from(c);
    if c.norm() == 0.0 {
        return Err(Error::DegenerateObjective);
    }
    let best = std::iter::once(unit(c))
        .chain(boundary_directions(halfspaces))
        .filter(|&d| is_recession_direction(halfspaces, d))
        .max_by(|a, b| c.dot(*a).total_cmp(&c.dot(*b)));
    Ok(match best {
        Some(d) if c.dot(d) > RAY_TOL * c.norm() => ObjectiveStatus::Unbounded { ray: d },
        _ => ObjectiveStatus::Bounded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    Nonconvex,
    Duplicate,
    Collinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    Accepted,
    Rejected(RejectReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuilderState {
    Drawing,
    Closed,
    Open,
}

/// Click-by-click region construction. Every accepted prefix is in convex position, so
/// the drawing can always be finished as a convex polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionBuilder {
    vertices: Vec<Point2>,
    state: BuilderState,
}

impl Default for RegionBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl RegionBuilder {
    pub fn new() -> Self {
        Self { vertices: Vec::new(), state: BuilderState::Drawing }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn state(&self) -> BuilderState {
        self.state
    }

    pub fn try_add_vertex(&mut self, candidate: Point2) -> Result<AddOutcome> {
        if self.state != BuilderState::Drawing {
            return Err(Error::NotDrawing);
        }
        if !candidate.is_finite() {
            return Err(Error::NonFinite("vertex"));
        }
        let outcome = match self.classify(candidate) {
            None => {
                self.vertices.push(candidate);
                AddOutcome::Accepted
            }
            Some(reason) => AddOutcome::Rejected(reason),
        };
        Ok(outcome)
    }

    fn classify(&self, p: Point2) -> Option<RejectReason> {
        if self.vertices.iter().any(|v| v.dist(p) <= VERTEX_TOL) {
            return Some(RejectReason::Duplicate);
        }
        let n = self.vertices.len();
        if n < 2 {
            return None;
        }
        let mut seq = self.vertices.clone();
        seq.push(p);
        let sense = match turn(seq[0], seq[1], seq[2]) {
            Turn::Collinear => return Some(RejectReason::Collinear),
            t => t,
        };
        // the newly created corner first, then the two closing corners
        let k = seq.len();
        for i in [k - 2, k - 1, 0] {
            match turn(seq[(i + k - 1) % k], seq[i], seq[(i + 1) % k]) {
                Turn::Collinear => return Some(RejectReason::Collinear),
                t if t != sense => return Some(RejectReason::Nonconvex),
                _ => {}
            }
        }
        if total_turning(&seq, true).abs() > 3.0 * PI {
            return Some(RejectReason::Nonconvex);
        }
        None
    }

    /// Finishes a bounded region.
    pub fn close_region(&mut self) -> Result<Region> {
        if self.state != BuilderState::Drawing {
            return Err(Error::NotDrawing);
        }
        let region = Region::closed(&self.vertices)?;
        self.state = BuilderState::Closed;
        Ok(region)
    }

    /// Finishes an unbounded region (interior on the left of a two-vertex edge).
    pub fn open_region(&mut self) -> Result<Region> {
        self.open_region_with_hint(None)
    }

    pub fn open_region_with_hint(&mut self, hint: Option<Point2>) -> Result<Region> {
        if self.state != BuilderState::Drawing {
            return Err(Error::NotDrawing);
        }
        let region = Region::open(&self.vertices, hint)?;
        self.state = BuilderState::Open;
        Ok(region)
    }
}
