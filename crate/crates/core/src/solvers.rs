//! The FD and PAR approximation algorithms and the exact oracle.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::eps::Eps;
use crate::error::{Error, Result};
use crate::flowshop::{
    brute_force_flowshop, evaluate_machine_orders, evaluate_permutation, machine_partition, partition_schedule,
    Exactness, DEFAULT_MAX_JOBS,
};
use crate::model::{makespan_lower_bound, total_work, Instance, Job, JobId, Path, Schedule, Time};
use crate::shortest_path::{abv_minmax, enumerate_simple_paths, shortest_path_by, WeightedGraph, DEFAULT_MAX_PATHS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fd,
    Par,
    Exact,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Fd => "fd",
            Algorithm::Par => "par",
            Algorithm::Exact => "exact",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fd" => Ok(Algorithm::Fd),
            "par" => Ok(Algorithm::Par),
            "exact" => Ok(Algorithm::Exact),
            other => Err(Error::InvalidParameter(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Enumeration limits for the exact oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCaps {
    pub max_paths: usize,
    pub max_jobs: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps { max_paths: DEFAULT_MAX_PATHS, max_jobs: DEFAULT_MAX_JOBS }
    }
}

/// One schedule construction inside a solver run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iteration {
    pub path: Path,
    pub makespan: Time,
    /// Jobs whose weights were raised to the sentinel after this step.
    pub marked: Vec<JobId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub eps: Option<Eps>,
    pub path: Path,
    pub schedule: Schedule,
    pub makespan: Time,
    pub iterations: Vec<Iteration>,
    pub exactness: Exactness,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Shortest path under `w_j = sum_i p_ij`, then the partition schedule of its jobs.
/// At most `m` times the optimal makespan.
pub fn fd_algorithm(inst: &Instance) -> Result<SolveReport> {
    let g = WeightedGraph::from_instance(inst, 1, |a| vec![a.total_time()])?;
    let (path, _) = shortest_path_by(&g, |a| a.w[0])?;
    let jobs = inst.jobs_of(&path)?;
    let schedule = partition_schedule(&jobs, inst.machines())?;
    let makespan = schedule.makespan;
    Ok(SolveReport {
        algorithm: Algorithm::Fd,
        eps: None,
        iterations: vec![Iteration { path: path.clone(), makespan, marked: Vec::new() }],
        path,
        schedule,
        makespan,
        exactness: Exactness::Heuristic,
    })
}

/// Weight of a marked job on every machine: `floor((1 + eps) * total) + 1`,
/// strictly above `(1 + eps)` times any unmarked path's weight.
pub fn sentinel_weight(inst: &Instance, eps: Eps) -> u64 {
    let total = inst.total_work() as u128;
    let extra = total * eps.numer() as u128 / eps.denom() as u128;
    u64::try_from(total + extra + 1).expect("sentinel weight fits in u64")
}

/// Iterated min-max path selection with big-M marking of long jobs.
///
/// Each round takes a `(1 + eps)`-approximate min-max path under the current
/// weights and schedules it with the machine partition. While the path holds
/// no marked job and some job on it has `sum_i p_ij > C' / rho`, every
/// unmarked job of the whole graph above that threshold is marked and the
/// round repeats. The shortest schedule seen is returned; its makespan is at
/// most `(1 + eps) * rho` times the optimum.
pub fn par_algorithm(inst: &Instance, eps: Eps) -> Result<SolveReport> {
    let m = inst.machines();
    let rho = machine_partition(m)?.rho;
    let (rho_num, rho_den) = (*rho.numer() as u128, *rho.denom() as u128);
    // sum_i p_ij > C' / rho, cleared of the denominator
    let is_long = |job_total: Time, c: Time| rho_num * job_total as u128 > rho_den * c as u128;
    let sentinel = sentinel_weight(inst, eps);
    let mut marked: HashSet<JobId> = HashSet::new();
    let mut iterations: Vec<Iteration> = Vec::new();
    let mut best: Option<(Path, Schedule)> = None;

    loop {
        let g = WeightedGraph::from_instance(inst, m, |a| {
            if marked.contains(&a.id) {
                vec![sentinel; m]
            } else {
                a.p.clone()
            }
        })?;
        let path = abv_minmax(&g, eps)?.path;
        let jobs = inst.jobs_of(&path)?;
        let schedule = partition_schedule(&jobs, m)?;
        let c = schedule.makespan;
        iterations.push(Iteration { path: path.clone(), makespan: c, marked: Vec::new() });
        if best.as_ref().is_none_or(|(_, s)| c < s.makespan) {
            best = Some((path.clone(), schedule));
        }

        let hits_marked = jobs.iter().any(|j| marked.contains(&j.id));
        let has_long = jobs.iter().any(|j| is_long(j.total_time(), c));
        if hits_marked || !has_long {
            break;
        }
        let newly: Vec<JobId> = inst
            .arcs()
            .iter()
            .filter(|a| !marked.contains(&a.id) && is_long(a.total_time(), c))
            .map(|a| a.id)
            .collect();
        marked.extend(newly.iter().copied());
        iterations.last_mut().expect("just pushed").marked = newly;
    }

    let (path, schedule) = best.expect("at least one iteration ran");
    Ok(SolveReport {
        algorithm: Algorithm::Par,
        eps: Some(eps),
        makespan: schedule.makespan,
        path,
        schedule,
        iterations,
        exactness: Exactness::Heuristic,
    })
}

/// Best brute-force flow shop schedule over every simple s-t path.
pub fn exact_solver(inst: &Instance, caps: OracleCaps) -> Result<SolveReport> {
    let m = inst.machines();
    let g = WeightedGraph::from_instance(inst, 1, |_| vec![0])?;
    let paths = enumerate_simple_paths(&g, caps.max_paths)?;
    let mut best: Option<(Path, crate::flowshop::BruteForce)> = None;
    for path in paths {
        let jobs = inst.jobs_of(&path)?;
        let bf = brute_force_flowshop(&jobs, m, caps.max_jobs)?;
        if best.as_ref().is_none_or(|(_, b)| bf.makespan < b.makespan) {
            best = Some((path, bf));
        }
    }
    let (path, bf) = best.ok_or(Error::Unreachable)?;
    let jobs = inst.jobs_of(&path)?;
    let schedule = evaluate_permutation(&jobs, &bf.permutation, m)?;
    Ok(SolveReport {
        algorithm: Algorithm::Exact,
        eps: None,
        makespan: schedule.makespan,
        path,
        schedule,
        iterations: Vec::new(),
        exactness: bf.exactness,
    })
}

pub fn solve(inst: &Instance, algorithm: Algorithm, eps: Eps, caps: OracleCaps) -> Result<SolveReport> {
    match algorithm {
        Algorithm::Fd => fd_algorithm(inst),
        Algorithm::Par => par_algorithm(inst, eps),
        Algorithm::Exact => exact_solver(inst, caps),
    }
}

/// A failed independent check of a reported solution.
#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
pub enum VerifyError {
    #[error("path invalid: {0}")]
    PathInvalid(String),
    #[error("schedule invalid: {0}")]
    ScheduleInvalid(String),
    #[error("schedule mismatch: job {job} on machine {machine} claims [{claimed_start}, {claimed_finish}], simulation gives [{start}, {finish}]")]
    TimesMismatch {
        machine: usize,
        job: JobId,
        claimed_start: Time,
        claimed_finish: Time,
        start: Time,
        finish: Time,
    },
    #[error("makespan mismatch: claimed {claimed}, simulation gives {actual}")]
    MakespanMismatch { claimed: Time, actual: Time },
    #[error("bound violated: makespan {makespan} outside [{lower}, {upper}]")]
    BoundViolated { makespan: Time, lower: Time, upper: Time },
}

/// Re-derives the schedule from the reported machine sequences and checks it
/// against the claims, the path and the elementary makespan bounds.
pub fn verify_solution(inst: &Instance, report: &SolveReport) -> std::result::Result<(), VerifyError> {
    report.path.validate(inst).map_err(|e| VerifyError::PathInvalid(e.to_string()))?;
    let jobs = inst.jobs_of(&report.path).map_err(|e| VerifyError::PathInvalid(e.to_string()))?;
    let m = inst.machines();
    if report.schedule.machine_count() != m {
        return Err(VerifyError::ScheduleInvalid(format!(
            "{} machine sequences for {m} machines",
            report.schedule.machine_count()
        )));
    }
    let orders = report.schedule.machine_orders();
    let sim = evaluate_machine_orders(&jobs, &orders, m).map_err(|e| VerifyError::ScheduleInvalid(e.to_string()))?;
    for (i, (claimed, actual)) in report.schedule.machines.iter().zip(&sim.machines).enumerate() {
        for (c, a) in claimed.iter().zip(actual) {
            if c != a {
                return Err(VerifyError::TimesMismatch {
                    machine: i + 1,
                    job: c.job,
                    claimed_start: c.start,
                    claimed_finish: c.finish,
                    start: a.start,
                    finish: a.finish,
                });
            }
        }
    }
    for claimed in [report.makespan, report.schedule.makespan] {
        if claimed != sim.makespan {
            return Err(VerifyError::MakespanMismatch { claimed, actual: sim.makespan });
        }
    }
    let lower = makespan_lower_bound(&jobs, m).map_err(|e| VerifyError::PathInvalid(e.to_string()))?;
    let upper = total_work(&jobs);
    if sim.makespan < lower || sim.makespan > upper {
        return Err(VerifyError::BoundViolated { makespan: sim.makespan, lower, upper });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Arc;

    fn single_arc() -> Instance {
        Instance::new(3, vec!["s".into(), "t".into()], "s", "t", vec![Arc::new(1, "s", "t", [1, 2, 3])]).unwrap()
    }

    #[test]
    fn single_path_instances() {
        let inst = single_arc();
        assert_eq!(fd_algorithm(&inst).unwrap().makespan, 6);
        let par = par_algorithm(&inst, Eps::default()).unwrap();
        assert_eq!(par.makespan, 6);
        // 6 / rho = 3 and the job total 6 exceeds it: the job is marked once, then
        // the same path comes back holding a marked job.
        assert_eq!(par.iterations.len(), 2);
        let exact = exact_solver(&inst, OracleCaps::default()).unwrap();
        assert_eq!(exact.makespan, 6);
        assert_eq!(exact.exactness, Exactness::Optimal);
    }

    #[test]
    fn par_stops_after_one_round_when_no_job_is_long() {
        // two jobs (1,1): Johnson makespan 3, threshold 3 / (3/2) = 2, totals 2
        let inst = Instance::new(
            2,
            vec!["s".into(), "a".into(), "t".into()],
            "s",
            "t",
            vec![Arc::new(1, "s", "a", [1, 1]), Arc::new(2, "a", "t", [1, 1])],
        )
        .unwrap();
        let r = par_algorithm(&inst, Eps::default()).unwrap();
        assert_eq!(r.iterations.len(), 1);
        assert_eq!(r.makespan, 3);
        assert!(r.iterations[0].marked.is_empty());
    }

    #[test]
    fn unreachable_sink_is_reported() {
        let inst = Instance::new(2, vec!["s".into(), "a".into(), "t".into()], "s", "t", vec![Arc::new(1, "s", "a", [1, 1])])
            .unwrap();
        assert!(matches!(fd_algorithm(&inst), Err(Error::Unreachable)));
        assert!(matches!(par_algorithm(&inst, Eps::default()), Err(Error::Unreachable)));
        assert!(matches!(exact_solver(&inst, OracleCaps::default()), Err(Error::Unreachable)));
    }

    #[test]
    fn sentinel_exceeds_scaled_total() {
        let inst = single_arc();
        assert_eq!(sentinel_weight(&inst, Eps::new(1, 4).unwrap()), 6 + 1 + 1);
        assert_eq!(sentinel_weight(&inst, Eps::new(1, 2).unwrap()), 6 + 3 + 1);
    }

    #[test]
    fn verify_accepts_solver_output_and_flags_tampering() {
        let inst = single_arc();
        let report = fd_algorithm(&inst).unwrap();
        assert_eq!(verify_solution(&inst, &report), Ok(()));
        let back = SolveReport::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);

        let mut bad = report.clone();
        bad.makespan += 1;
        assert!(matches!(verify_solution(&inst, &bad), Err(VerifyError::MakespanMismatch { .. })));

        let mut bad = report.clone();
        bad.schedule.machines[1][0].start += 1;
        assert!(matches!(verify_solution(&inst, &bad), Err(VerifyError::TimesMismatch { .. })));

        let mut bad = report;
        bad.path = Path::new(vec![]);
        assert!(matches!(verify_solution(&inst, &bad), Err(VerifyError::PathInvalid(_))));
    }
}
