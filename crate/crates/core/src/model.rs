//! Problem instances, paths, schedules and the elementary makespan bounds.
//!
//! An [`Instance`] is a directed multigraph in which every arc is a flow shop
//! job. Choosing an s-t path selects the jobs that have to be processed on the
//! `m` machines.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Processing times and time points, in abstract integer units.
pub type Time = u64;

/// Identifier of an arc, which doubles as the identifier of its job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub u32);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Anything that carries a job id and one processing time per machine.
pub trait Job {
    fn id(&self) -> JobId;
    fn times(&self) -> &[Time];

    fn total_time(&self) -> Time {
        self.times().iter().sum()
    }
}

impl<T: Job + ?Sized> Job for &T {
    fn id(&self) -> JobId {
        (**self).id()
    }
    fn times(&self) -> &[Time] {
        (**self).times()
    }
}

/// A bare job: id plus processing times, detached from any graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: JobId,
    pub times: Vec<Time>,
}

impl Task {
    pub fn new(id: u32, times: impl Into<Vec<Time>>) -> Self {
        Task { id: JobId(id), times: times.into() }
    }
}

impl Job for Task {
    fn id(&self) -> JobId {
        self.id
    }
    fn times(&self) -> &[Time] {
        &self.times
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub id: JobId,
    pub tail: String,
    pub head: String,
    pub p: Vec<Time>,
}

impl Arc {
    pub fn new(id: u32, tail: impl Into<String>, head: impl Into<String>, p: impl Into<Vec<Time>>) -> Self {
        Arc { id: JobId(id), tail: tail.into(), head: head.into(), p: p.into() }
    }
}

impl Job for Arc {
    fn id(&self) -> JobId {
        self.id
    }
    fn times(&self) -> &[Time] {
        &self.p
    }
}

/// Wire form of an instance; processing times are signed so that negative
/// values get a dedicated diagnostic instead of a generic type error.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    m: usize,
    vertices: Vec<String>,
    s: String,
    t: String,
    arcs: Vec<RawArc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArc {
    id: JobId,
    tail: String,
    head: String,
    p: Vec<i64>,
}

/// A validated problem instance. Immutable once built.
#[derive(Debug, Clone)]
pub struct Instance {
    m: usize,
    vertices: Vec<String>,
    s: String,
    t: String,
    arcs: Vec<Arc>,
    vertex_index: HashMap<String, usize>,
    arc_index: HashMap<JobId, usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.vertices == other.vertices
            && self.s == other.s
            && self.t == other.t
            && self.arcs == other.arcs
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new(
        m: usize,
        vertices: Vec<String>,
        s: impl Into<String>,
        t: impl Into<String>,
        arcs: Vec<Arc>,
    ) -> Result<Self> {
        let (s, t) = (s.into(), t.into());
        if m < 1 {
            return Err(Error::MachineCount(m));
        }
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.clone()));
            }
        }
        for v in [&s, &t] {
            if !vertex_index.contains_key(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        if s == t {
            return Err(Error::SameEndpoints(s));
        }
        let mut arc_index = HashMap::with_capacity(arcs.len());
        for (i, arc) in arcs.iter().enumerate() {
            if arc_index.insert(arc.id, i).is_some() {
                return Err(Error::DuplicateArc(arc.id));
            }
            for v in [&arc.tail, &arc.head] {
                if !vertex_index.contains_key(v) {
                    return Err(Error::UnknownVertex(v.clone()));
                }
            }
            if arc.p.len() != m {
                return Err(Error::Arity { id: arc.id, got: arc.p.len(), expected: m });
            }
        }
        Ok(Instance { m, vertices, s, t, arcs, vertex_index, arc_index })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawInstance = serde_json::from_str(text)?;
        let mut arcs = Vec::with_capacity(raw.arcs.len());
        for a in raw.arcs {
            let mut p = Vec::with_capacity(a.p.len());
            for (machine, &value) in a.p.iter().enumerate() {
                if value < 0 {
                    return Err(Error::NegativeTime { id: a.id, machine: machine + 1, value });
                }
                p.push(value as Time);
            }
            arcs.push(Arc { id: a.id, tail: a.tail, head: a.head, p });
        }
        Instance::new(raw.m, raw.vertices, raw.s, raw.t, arcs)
    }

    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            m: self.m,
            vertices: self.vertices.clone(),
            s: self.s.clone(),
            t: self.t.clone(),
            arcs: self
                .arcs
                .iter()
                .map(|a| RawArc {
                    id: a.id,
                    tail: a.tail.clone(),
                    head: a.head.clone(),
                    p: a.p.iter().map(|&x| x as i64).collect(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail");
        out.push('\n');
        out
    }

    pub fn machines(&self) -> usize {
        self.m
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn source(&self) -> &str {
        &self.s
    }

    pub fn sink(&self) -> &str {
        &self.t
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: JobId) -> Option<&Arc> {
        self.arc_index.get(&id).map(|&i| &self.arcs[i])
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_index.get(name).copied()
    }

    /// Jobs selected by `path`, in path order.
    pub fn jobs_of(&self, path: &Path) -> Result<Vec<&Arc>> {
        path.arc_ids
            .iter()
            .map(|id| self.arc(*id).ok_or_else(|| Error::InvalidPath(format!("unknown arc {id}"))))
            .collect()
    }

    /// Sum of all processing times over every arc of the graph.
    pub fn total_work(&self) -> Time {
        total_work(&self.arcs)
    }
}

/// A vertex-simple directed s-t path, as a sequence of arc ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    pub arc_ids: Vec<JobId>,
}

impl Path {
    pub fn new(arc_ids: Vec<JobId>) -> Self {
        Path { arc_ids }
    }

    pub fn len(&self) -> usize {
        self.arc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arc_ids.is_empty()
    }

    /// Checks that the arcs chain head to tail from s to t without revisiting a vertex.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let mut at = inst.source();
        let mut seen: HashSet<&str> = HashSet::from([at]);
        if self.arc_ids.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        for id in &self.arc_ids {
            let arc = inst.arc(*id).ok_or_else(|| Error::InvalidPath(format!("unknown arc {id}")))?;
            if arc.tail != at {
                return Err(Error::InvalidPath(format!("arc {id} starts at {:?}, expected {at:?}", arc.tail)));
            }
            if !seen.insert(&arc.head) {
                return Err(Error::InvalidPath(format!("vertex {:?} visited twice", arc.head)));
            }
            at = &arc.head;
        }
        if at != inst.sink() {
            return Err(Error::InvalidPath(format!("path ends at {at:?}, not at the sink")));
        }
        Ok(())
    }
}

/// One job processed on one machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub job: JobId,
    pub start: Time,
    pub finish: Time,
}

/// Per-machine job sequences with start and finish times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub machines: Vec<Vec<Operation>>,
    pub makespan: Time,
}

impl Schedule {
    pub fn machine_count(&self) -> usize {
        self.machines.len()
    }

    pub fn machine_orders(&self) -> Vec<Vec<JobId>> {
        self.machines.iter().map(|ops| ops.iter().map(|op| op.job).collect()).collect()
    }

    /// Operation of `job` on machine `machine` (0-based), if scheduled there.
    pub fn operation(&self, machine: usize, job: JobId) -> Option<&Operation> {
        self.machines.get(machine)?.iter().find(|op| op.job == job)
    }

    pub fn job_count(&self) -> usize {
        self.machines.first().map_or(0, Vec::len)
    }
}

/// `max(max_i sum_j p_ij, max_j sum_i p_ij)`: no schedule of `jobs` can finish earlier.
pub fn makespan_lower_bound<J: Job>(jobs: &[J], m: usize) -> Result<Time> {
    if jobs.is_empty() {
        return Err(Error::EmptyJobs);
    }
    let machine_load = (0..m).map(|i| jobs.iter().map(|j| j.times()[i]).sum::<Time>()).max().unwrap_or(0);
    let job_length = jobs.iter().map(|j| j.total_time()).max().unwrap_or(0);
    Ok(machine_load.max(job_length))
}

/// Sum of every processing time; a dense schedule never exceeds it.
pub fn total_work<J: Job>(jobs: &[J]) -> Time {
    jobs.iter().map(|j| j.total_time()).sum()
}
