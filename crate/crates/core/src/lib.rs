//! Flow shop scheduling with path selection (`Fm | shortest path | Cmax`).
//!
//! Arcs of a directed multigraph are flow shop jobs. A solver picks an s-t
//! path and schedules the jobs on that path on `m` machines so as to minimise
//! the makespan. The crate provides:
//!
//! - [`model`]: instances, paths, schedules and the elementary bounds;
//! - [`flowshop`]: Johnson's rule, the RS aggregation heuristic, critical jobs
//!   and the machine partition schedule;
//! - [`shortest_path`]: Dijkstra, a min-max FPTAS and an enumeration oracle;
//! - [`solvers`]: the FD and PAR approximations and the exact oracle;
//! - [`generators`] and [`bench`]: instance families and the ratio harness.

pub mod bench;
pub mod eps;
pub mod error;
pub mod flowshop;
pub mod generators;
pub mod model;
pub mod shortest_path;
pub mod solvers;

pub use eps::Eps;
pub use error::{Error, Result};
pub use model::{Arc, Instance, Job, JobId, Operation, Path, Schedule, Task, Time};
pub use solvers::{exact_solver, fd_algorithm, par_algorithm, Algorithm, OracleCaps, SolveReport};
