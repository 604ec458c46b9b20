//! Problem and trace JSON (format version 1).
//!
//! Problem:
//! `{"version":1,"objective":[c1,c2],"vertices":[[x,y],...],"closed":true,
//!   "constraints":[{"a":[a1,a2],"b":b},...],"interior_hint":[x,y]}`
//!
//! Trace:
//! `{"version":1,"algorithm":"ipm","settings":{...},"status":"optimal","objective_value":v,
//!   "iterates":[{"x":[x1,x2],"z":h,"phase":"...","basis":[0,2],"meta":{}}],"ray":null}`
//!
//! Floats are written in the shortest form that parses back to the identical double.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{turn, Region, Turn};
use crate::model::{Algorithm, Halfspace, Iterate, Point2, ProblemSpec, SolverSettings, SolverTrace, Status};

pub const FORMAT_VERSION: u32 = 1;
/// Agreement required between given constraints and those converted from vertices.
pub const CONSTRAINT_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub a: [f64; 2],
    pub b: f64,
}

/// On-disk problem document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub objective: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<ConstraintJson>>,
    /// Interior side of a two-vertex open region.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_hint: Option<[f64; 2]>,
}

impl ProblemFile {
    /// Document carrying both representations of `spec`.
    pub fn from_spec(spec: &ProblemSpec) -> Self {
        let vertices = (!spec.vertices.is_empty()).then(|| spec.vertices.iter().map(|p| p.to_array()).collect());
        let interior_hint = match spec.vertices.as_slice() {
            [p, q] if !spec.closed => {
                let n = spec.halfspaces[0].normal();
                Some(((*p + *q).scale(0.5) - n).to_array())
            }
            _ => None,
        };
        Self {
            version: FORMAT_VERSION,
            objective: spec.objective,
            closed: vertices.as_ref().map(|_| spec.closed),
            vertices,
            constraints: Some(
                spec.halfspaces.iter().map(|h| ConstraintJson { a: [h.a1, h.a2], b: h.b }).collect(),
            ),
            interior_hint,
        }
    }

    pub fn to_spec(&self) -> Result<ProblemSpec> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported problem version {}", self.version)));
        }
        if !self.objective.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("objective"));
        }
        let given = match &self.constraints {
            None => None,
            Some(cs) => Some(
                cs.iter()
                    .map(|c| Halfspace::new(c.a[0], c.a[1], c.b))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let Some(vertices) = &self.vertices else {
            return match given {
                Some(hs) => ProblemSpec::from_constraints(self.objective, &hs),
                None => Err(Error::Format("problem needs vertices or constraints".into())),
            };
        };
        let points: Vec<Point2> = vertices.iter().map(|&v| Point2::from(v)).collect();
        let closed = self.closed.unwrap_or(true);
        let region = if closed {
            Region::closed(&points)?
        } else {
            let hint = self.interior_hint.map(Point2::from);
            if points.len() == 2 && hint.is_none() {
                return Err(Error::InteriorHintRequired);
            }
            if let (Some(h), [p, q]) = (hint, points.as_slice()) {
                if turn(*p, *q, h) == Turn::Collinear {
                    return Err(Error::DegenerateRegion("interior hint lies on the boundary line".into()));
                }
            }
            Region::open(&points, hint)?
        };
        let spec = ProblemSpec::from_region(self.objective, region);
        if let Some(hs) = given {
            check_agreement(&spec.halfspaces, &hs)?;
        }
        Ok(spec)
    }
}

fn check_agreement(converted: &[Halfspace], given: &[Halfspace]) -> Result<()> {
    if converted.len() != given.len() {
        return Err(Error::Format(format!(
            "constraints disagree with vertices: {} given, {} converted",
            given.len(),
            converted.len()
        )));
    }
    for (j, (c, g)) in converted.iter().zip(given).enumerate() {
        let diff = (c.a1 - g.a1).abs().max((c.a2 - g.a2).abs()).max((c.b - g.b).abs());
        if diff > CONSTRAINT_MATCH_TOL {
            return Err(Error::Format(format!("constraint {j} disagrees with vertices by {diff:e}")));
        }
    }
    Ok(())
}

pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    serde_json::from_str::<ProblemFile>(text)?.to_spec()
}

pub fn problem_to_json(spec: &ProblemSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ProblemFile::from_spec(spec))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TraceFile {
    version: u32,
    algorithm: Algorithm,
    settings: SolverSettings,
    status: Status,
    objective_value: Option<f64>,
    iterates: Vec<Iterate>,
    ray: Option<[f64; 2]>,
}

impl From<&SolverTrace> for TraceFile {
    fn from(t: &SolverTrace) -> Self {
        Self {
            version: FORMAT_VERSION,
            algorithm: t.algorithm,
            settings: t.settings.clone(),
            status: t.status,
            objective_value: t.objective_value,
            iterates: t.iterates.clone(),
            ray: t.ray,
        }
    }
}

impl TraceFile {
    fn into_trace(self) -> Result<SolverTrace> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported trace version {}", self.version)));
        }
        Ok(SolverTrace {
            algorithm: self.algorithm,
            settings: self.settings,
            status: self.status,
            iterates: self.iterates,
            objective_value: self.objective_value,
            ray: self.ray,
        })
    }
}

pub fn trace_to_json(trace: &SolverTrace) -> Result<String> {
    Ok(serde_json::to_string(&TraceFile::from(trace))?)
}

pub fn parse_trace(text: &str) -> Result<SolverTrace> {
    serde_json::from_str::<TraceFile>(text)?.into_trace()
}

/// A JSON array of traces, as written by a rotation sweep.
pub fn traces_to_json(traces: &[SolverTrace]) -> Result<String> {
    let files: Vec<TraceFile> = traces.iter().map(TraceFile::from).collect();
    Ok(serde_json::to_string(&files)?)
}

pub fn parse_traces(text: &str) -> Result<Vec<SolverTrace>> {
    serde_json::from_str::<Vec<TraceFile>>(text)?.into_iter().map(TraceFile::into_trace).collect()
}
