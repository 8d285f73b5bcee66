//! Python bindings for the `pathshop` crate.

use pathshop::flowshop::{self, Permutation};
use pathshop::generators::{self, RandomSpec};
use pathshop::solvers::{self, verify_solution};
use pathshop::{Algorithm, Eps, Error, JobId, OracleCaps, SolveReport, Task, Time};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pathshop, PathshopError, PyException);
create_exception!(pathshop, InfeasibleError, PathshopError);
create_exception!(pathshop, OracleCapError, PathshopError);
create_exception!(pathshop, VerificationError, PathshopError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Unreachable => InfeasibleError::new_err(e.to_string()),
        Error::PathCapExceeded { .. } | Error::JobCapExceeded { .. } => OracleCapError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_eps(eps: &str) -> PyResult<Eps> {
    eps.parse().map_err(to_py)
}

/// Jobs given as rows of processing times get ids `1..=n`.
fn tasks(jobs: Vec<Vec<Time>>) -> Vec<Task> {
    jobs.into_iter().enumerate().map(|(i, p)| Task::new(i as u32 + 1, p)).collect()
}

fn ids(perm: &Permutation) -> Vec<u32> {
    perm.jobs().iter().map(|j| j.0).collect()
}

fn machines_of(jobs: &[Task]) -> PyResult<usize> {
    jobs.first().map(|j| j.times.len()).ok_or_else(|| PyValueError::new_err("job list is empty"))
}

/// A directed multigraph whose arcs are flow shop jobs.
#[pyclass(module = "pathshop", name = "Instance", frozen)]
struct PyInstance(pathshop::Instance);

#[pymethods]
impl PyInstance {
    /// `arcs` is a list of `(id, tail, head, times)`.
    #[new]
    fn new(m: usize, vertices: Vec<String>, s: &str, t: &str, arcs: Vec<(u32, String, String, Vec<Time>)>) -> PyResult<Self> {
        let arcs = arcs.into_iter().map(|(id, tail, head, p)| pathshop::Arc::new(id, tail, head, p)).collect();
        pathshop::Instance::new(m, vertices, s, t, arcs).map(PyInstance).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        pathshop::Instance::parse(text).map(PyInstance).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn machines(&self) -> usize {
        self.0.machines()
    }

    #[getter]
    fn vertices(&self) -> Vec<String> {
        self.0.vertices().to_vec()
    }

    #[getter]
    fn source(&self) -> String {
        self.0.source().to_string()
    }

    #[getter]
    fn sink(&self) -> String {
        self.0.sink().to_string()
    }

    #[getter]
    fn arcs(&self) -> Vec<(u32, String, String, Vec<Time>)> {
        self.0.arcs().iter().map(|a| (a.id.0, a.tail.clone(), a.head.clone(), a.p.clone())).collect()
    }

    fn total_work(&self) -> Time {
        self.0.total_work()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(m={}, vertices={}, arcs={})",
            self.0.machines(),
            self.0.vertices().len(),
            self.0.arcs().len()
        )
    }
}

/// A solver result: chosen path, per-machine schedule and iteration log.
#[pyclass(module = "pathshop", name = "Solution", frozen)]
struct PySolution(SolveReport);

#[pymethods]
impl PySolution {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        SolveReport::from_json(text).map(PySolution).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn algorithm(&self) -> &'static str {
        self.0.algorithm.as_str()
    }

    #[getter]
    fn eps(&self) -> Option<String> {
        self.0.eps.map(|e| e.to_string())
    }

    #[getter]
    fn path(&self) -> Vec<u32> {
        self.0.path.arc_ids.iter().map(|a| a.0).collect()
    }

    #[getter]
    fn makespan(&self) -> Time {
        self.0.makespan
    }

    #[getter]
    fn exactness(&self) -> &'static str {
        self.0.exactness.as_str()
    }

    /// Per machine, `(job, start, finish)` in processing order.
    #[getter]
    fn schedule(&self) -> Vec<Vec<(u32, Time, Time)>> {
        self.0.schedule.machines.iter().map(|ops| ops.iter().map(|o| (o.job.0, o.start, o.finish)).collect()).collect()
    }

    /// `(path, makespan, newly marked jobs)` per round.
    #[getter]
    fn iterations(&self) -> Vec<(Vec<u32>, Time, Vec<u32>)> {
        self.0
            .iterations
            .iter()
            .map(|it| (it.path.arc_ids.iter().map(|a| a.0).collect(), it.makespan, it.marked.iter().map(|j| j.0).collect()))
            .collect()
    }

    /// Raises `VerificationError` when the solution does not check out.
    fn verify(&self, instance: &PyInstance) -> PyResult<()> {
        verify_solution(&instance.0, &self.0).map_err(|e| VerificationError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Solution(algorithm={}, makespan={}, jobs={})", self.0.algorithm, self.0.makespan, self.0.path.len())
    }
}

#[pyfunction]
#[pyo3(signature = (instance, algorithm = "par", eps = "1/4", max_paths = pathshop::shortest_path::DEFAULT_MAX_PATHS, max_jobs = flowshop::DEFAULT_MAX_JOBS))]
fn solve(instance: &PyInstance, algorithm: &str, eps: &str, max_paths: usize, max_jobs: usize) -> PyResult<PySolution> {
    let algorithm: Algorithm = algorithm.parse().map_err(to_py)?;
    let caps = OracleCaps { max_paths, max_jobs };
    solvers::solve(&instance.0, algorithm, parse_eps(eps)?, caps).map(PySolution).map_err(to_py)
}

#[pyfunction]
fn fd(instance: &PyInstance) -> PyResult<PySolution> {
    solvers::fd_algorithm(&instance.0).map(PySolution).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (instance, eps = "1/4"))]
fn par(instance: &PyInstance, eps: &str) -> PyResult<PySolution> {
    solvers::par_algorithm(&instance.0, parse_eps(eps)?).map(PySolution).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (instance, max_paths = pathshop::shortest_path::DEFAULT_MAX_PATHS, max_jobs = flowshop::DEFAULT_MAX_JOBS))]
fn exact(instance: &PyInstance, max_paths: usize, max_jobs: usize) -> PyResult<PySolution> {
    solvers::exact_solver(&instance.0, OracleCaps { max_paths, max_jobs }).map(PySolution).map_err(to_py)
}

/// Optimal two-machine order; returns `(order, makespan)` with 1-based job ids.
#[pyfunction]
fn johnson(jobs: Vec<Vec<Time>>) -> PyResult<(Vec<u32>, Time)> {
    let (perm, s) = flowshop::johnson_rule(&tasks(jobs)).map_err(to_py)?;
    Ok((ids(&perm), s.makespan))
}

/// Three-machine aggregation heuristic; returns `(order, makespan)`.
#[pyfunction]
fn rs(jobs: Vec<Vec<Time>>) -> PyResult<(Vec<u32>, Time)> {
    let (perm, s) = flowshop::rs_algorithm(&tasks(jobs)).map_err(to_py)?;
    Ok((ids(&perm), s.makespan))
}

#[pyfunction]
fn evaluate_permutation(jobs: Vec<Vec<Time>>, order: Vec<u32>) -> PyResult<Time> {
    let jobs = tasks(jobs);
    let m = machines_of(&jobs)?;
    let perm = Permutation(order.into_iter().map(JobId).collect());
    flowshop::evaluate_permutation(&jobs, &perm, m).map(|s| s.makespan).map_err(to_py)
}

/// Best permutation schedule by enumeration; returns `(order, makespan)`.
#[pyfunction]
#[pyo3(signature = (jobs, max_jobs = flowshop::DEFAULT_MAX_JOBS))]
fn brute_force(jobs: Vec<Vec<Time>>, max_jobs: usize) -> PyResult<(Vec<u32>, Time)> {
    let jobs = tasks(jobs);
    let m = machines_of(&jobs)?;
    let bf = flowshop::brute_force_flowshop(&jobs, m, max_jobs).map_err(to_py)?;
    Ok((ids(&bf.permutation), bf.makespan))
}

#[pyfunction]
fn partition_makespan(jobs: Vec<Vec<Time>>) -> PyResult<Time> {
    let jobs = tasks(jobs);
    let m = machines_of(&jobs)?;
    flowshop::partition_schedule(&jobs, m).map(|s| s.makespan).map_err(to_py)
}

/// Dict with `m1`, `m2`, `m3`, `rho` as `(numer, denom)` and 0-based `groups`.
#[pyfunction]
fn machine_partition<'py>(py: Python<'py>, m: usize) -> PyResult<Bound<'py, PyDict>> {
    let mp = flowshop::machine_partition(m).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("m1", mp.m1)?;
    d.set_item("m2", mp.m2)?;
    d.set_item("m3", mp.m3)?;
    d.set_item("rho", (*mp.rho.numer(), *mp.rho.denom()))?;
    d.set_item("groups", mp.groups)?;
    Ok(d)
}

#[pyfunction]
fn gen_partition(set: Vec<u64>) -> PyResult<PyInstance> {
    generators::gen_partition_reduction(&set).map(PyInstance).map_err(to_py)
}

#[pyfunction]
fn gen_fd_tight(m: usize, q: u64, r: u64) -> PyResult<PyInstance> {
    generators::gen_fd_tight(m, q, r).map(PyInstance).map_err(to_py)
}

#[pyfunction]
fn gen_par_tight_m2(scale: u64) -> PyResult<PyInstance> {
    generators::gen_par_tight_m2(scale).map(PyInstance).map_err(to_py)
}

#[pyfunction]
fn gen_par_tight_m3(scale: u64) -> PyResult<PyInstance> {
    generators::gen_par_tight_m3(scale).map(PyInstance).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (vertices, density = 0.5, m = 2, max_p = 10, seed = 0))]
fn gen_random(vertices: usize, density: f64, m: usize, max_p: u64, seed: u64) -> PyResult<PyInstance> {
    generators::gen_random(&RandomSpec { vertices, density, m, max_p, seed }).map(PyInstance).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "pathshop")]
fn pathshop_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyInstance>()?;
    m.add_class::<PySolution>()?;
    m.add("PathshopError", py.get_type::<PathshopError>())?;
    m.add("InfeasibleError", py.get_type::<InfeasibleError>())?;
    m.add("OracleCapError", py.get_type::<OracleCapError>())?;
    m.add("VerificationError", py.get_type::<VerificationError>())?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(fd, m)?)?;
    m.add_function(wrap_pyfunction!(par, m)?)?;
    m.add_function(wrap_pyfunction!(exact, m)?)?;
    m.add_function(wrap_pyfunction!(johnson, m)?)?;
    m.add_function(wrap_pyfunction!(rs, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(partition_makespan, m)?)?;
    m.add_function(wrap_pyfunction!(machine_partition, m)?)?;
    m.add_function(wrap_pyfunction!(gen_partition, m)?)?;
    m.add_function(wrap_pyfunction!(gen_fd_tight, m)?)?;
    m.add_function(wrap_pyfunction!(gen_par_tight_m2, m)?)?;
    m.add_function(wrap_pyfunction!(gen_par_tight_m3, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random, m)?)?;
    Ok(())
}
