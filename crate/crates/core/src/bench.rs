//! Benchmark harness: expand a sweep over generator families, run the
//! solvers, compare against the exact oracle and write one CSV row per
//! (instance, algorithm, eps).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eps::Eps;
use crate::error::{Error, Result};
use crate::flowshop::machine_partition;
use crate::generators::{GenSpec, RandomSpec};
use crate::model::Time;
use crate::solvers::{exact_solver, solve, Algorithm, OracleCaps};

pub const CSV_HEADER: &str = "instance_id,family,vertices,arcs,m,algorithm,eps,makespan,oracle_makespan,ratio,bound,bound_satisfied,wall_time_ms,note";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Partition,
    FdTight,
    ParTightM2,
    ParTightM3,
    Random,
}

/// One family swept over sizes (and seeds where the family is random).
///
/// `sizes` means vertex count for `random`, multiset length for `partition`,
/// `q` for `fd-tight` and the scale for the PAR tight families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub family: Family,
    pub sizes: Vec<u64>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub density: Option<f64>,
    #[serde(default)]
    pub max_p: Option<u64>,
    #[serde(default)]
    pub r: Option<u64>,
}

impl Sweep {
    pub fn expand(&self) -> Vec<GenSpec> {
        let mut out = Vec::new();
        for &size in &self.sizes {
            match self.family {
                Family::Random => {
                    for &seed in &self.seeds {
                        out.push(GenSpec::Random(RandomSpec {
                            vertices: size as usize,
                            density: self.density.unwrap_or(0.5),
                            m: self.m.unwrap_or(2),
                            max_p: self.max_p.unwrap_or(10),
                            seed,
                        }));
                    }
                }
                Family::Partition => {
                    let max = self.max_p.unwrap_or(6).max(1);
                    for &seed in &self.seeds {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let set = (0..size.max(1)).map(|_| rng.random_range(1..=max)).collect();
                        out.push(GenSpec::Partition { set });
                    }
                }
                Family::FdTight => {
                    out.push(GenSpec::FdTight { m: self.m.unwrap_or(2), q: size, r: self.r.unwrap_or(1) })
                }
                Family::ParTightM2 => out.push(GenSpec::ParTightM2 { scale: size }),
                Family::ParTightM3 => out.push(GenSpec::ParTightM3 { scale: size }),
            }
        }
        out
    }
}

fn default_eps() -> Vec<Eps> {
    vec![Eps::default()]
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    #[serde(default)]
    pub sweeps: Vec<Sweep>,
    #[serde(default)]
    pub instances: Vec<GenSpec>,
    #[serde(default)]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_eps")]
    pub eps: Vec<Eps>,
    #[serde(default = "default_true")]
    pub oracle: bool,
    #[serde(default)]
    pub caps: OracleCaps,
    /// Fill the wall-time column; off by default so output is byte-reproducible.
    #[serde(default)]
    pub timings: bool,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            sweeps: Vec::new(),
            instances: Vec::new(),
            algorithms: Vec::new(),
            eps: default_eps(),
            oracle: true,
            caps: OracleCaps::default(),
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub family: String,
    pub vertices: usize,
    pub arcs: usize,
    pub m: usize,
    pub algorithm: Algorithm,
    pub eps: Option<Eps>,
    pub makespan: Option<Time>,
    pub oracle_makespan: Option<Time>,
    pub ratio: Option<f64>,
    /// Proven worst-case ratio: `m` for FD, `(1 + eps) rho` for PAR, 1 for the oracle.
    pub bound: Option<f64>,
    pub bound_satisfied: Option<bool>,
    pub wall_time_ms: Option<f64>,
    pub note: String,
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

impl BenchRow {
    pub fn to_csv_line(&self) -> String {
        [
            self.instance_id.clone(),
            self.family.clone(),
            self.vertices.to_string(),
            self.arcs.to_string(),
            self.m.to_string(),
            self.algorithm.to_string(),
            opt(&self.eps),
            opt(&self.makespan),
            opt(&self.oracle_makespan),
            self.ratio.map(|r| format!("{r:.6}")).unwrap_or_default(),
            self.bound.map(|b| format!("{b:.6}")).unwrap_or_default(),
            opt(&self.bound_satisfied),
            self.wall_time_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
            self.note.clone(),
        ]
        .join(",")
    }
}

/// Guarantee of `algorithm` on `m` machines, as an exact fraction.
pub fn ratio_bound(algorithm: Algorithm, m: usize, eps: Option<Eps>) -> Result<Ratio<u64>> {
    Ok(match algorithm {
        Algorithm::Fd => Ratio::from_integer(m as u64),
        Algorithm::Par => {
            let eps = eps.ok_or_else(|| Error::InvalidParameter("PAR bound needs eps".into()))?;
            machine_partition(m)?.rho * (Ratio::from_integer(1) + eps.ratio())
        }
        Algorithm::Exact => Ratio::from_integer(1),
    })
}

fn judge(makespan: Time, oracle: Time, bound: Ratio<u64>) -> (f64, bool) {
    if oracle == 0 {
        return if makespan == 0 { (1.0, true) } else { (f64::INFINITY, false) };
    }
    let ratio = makespan as f64 / oracle as f64;
    let ok = makespan as u128 * *bound.denom() as u128 <= *bound.numer() as u128 * oracle as u128;
    (ratio, ok)
}

fn bench_instance(spec: &GenSpec, bench: &BenchSpec) -> Vec<BenchRow> {
    let id = spec.instance_id();
    let base = BenchRow {
        instance_id: id,
        family: spec.family().to_string(),
        vertices: 0,
        arcs: 0,
        m: 0,
        algorithm: Algorithm::Exact,
        eps: None,
        makespan: None,
        oracle_makespan: None,
        ratio: None,
        bound: None,
        bound_satisfied: None,
        wall_time_ms: None,
        note: String::new(),
    };
    let inst = match spec.generate() {
        Ok(inst) => inst,
        Err(e) => {
            return bench
                .algorithms
                .iter()
                .map(|&algorithm| BenchRow { algorithm, note: note_for(&e), ..base.clone() })
                .collect();
        }
    };
    let base = BenchRow { vertices: inst.vertices().len(), arcs: inst.arcs().len(), m: inst.machines(), ..base };
    let (oracle, oracle_note) = if bench.oracle {
        match exact_solver(&inst, bench.caps) {
            Ok(r) => (Some(r.makespan), String::new()),
            Err(e) => (None, note_for(&e)),
        }
    } else {
        (None, String::new())
    };

    let mut runs: Vec<(Algorithm, Option<Eps>)> = Vec::new();
    for &algorithm in &bench.algorithms {
        if algorithm == Algorithm::Par {
            runs.extend(bench.eps.iter().map(|&e| (algorithm, Some(e))));
        } else {
            runs.push((algorithm, None));
        }
    }
    runs.into_iter()
        .map(|(algorithm, eps)| {
            let mut row = BenchRow { algorithm, eps, note: oracle_note.clone(), ..base.clone() };
            let started = Instant::now();
            let result = solve(&inst, algorithm, eps.unwrap_or_default(), bench.caps);
            if bench.timings {
                row.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            }
            let bound = ratio_bound(algorithm, inst.machines(), eps).ok();
            row.bound = bound.map(|b| *b.numer() as f64 / *b.denom() as f64);
            match result {
                Ok(report) => {
                    row.makespan = Some(report.makespan);
                    row.oracle_makespan = oracle;
                    if let (Some(o), Some(b)) = (oracle, bound) {
                        let (ratio, ok) = judge(report.makespan, o, b);
                        row.ratio = Some(ratio);
                        row.bound_satisfied = Some(ok);
                    }
                }
                Err(e) => row.note = note_for(&e),
            }
            row
        })
        .collect()
}

fn note_for(e: &Error) -> String {
    match e {
        Error::PathCapExceeded { .. } | Error::JobCapExceeded { .. } => "oracle-cap-exceeded".into(),
        Error::Unreachable => "infeasible".into(),
        Error::SearchFailed(_) => "generation-failed".into(),
        _ => "error".into(),
    }
}

/// Runs every instance of the spec (in parallel) and returns rows sorted by
/// instance id, algorithm and eps.
pub fn run_bench(spec: &BenchSpec) -> Vec<BenchRow> {
    let mut instances: Vec<GenSpec> = spec.sweeps.iter().flat_map(Sweep::expand).collect();
    instances.extend(spec.instances.iter().cloned());
    let mut by_id: BTreeMap<String, GenSpec> = BTreeMap::new();
    for g in instances {
        by_id.entry(g.instance_id()).or_insert(g);
    }
    let specs: Vec<GenSpec> = by_id.into_values().collect();
    let mut rows: Vec<BenchRow> = specs.par_iter().flat_map_iter(|g| bench_instance(g, spec)).collect();
    rows.sort_by(|a, b| {
        (&a.instance_id, a.algorithm, a.eps).cmp(&(&b.instance_id, b.algorithm, b.eps))
    });
    rows
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

/// Largest observed ratio per (algorithm, family).
pub fn summarize(rows: &[BenchRow]) -> String {
    let mut worst: BTreeMap<(Algorithm, String), (f64, usize, usize)> = BTreeMap::new();
    for row in rows {
        let entry = worst.entry((row.algorithm, row.family.clone())).or_insert((0.0, 0, 0));
        entry.1 += 1;
        if let Some(r) = row.ratio {
            entry.0 = entry.0.max(r);
        }
        if row.bound_satisfied == Some(false) {
            entry.2 += 1;
        }
    }
    let mut out = String::new();
    for ((algorithm, family), (max_ratio, n, violations)) in worst {
        let _ = writeln!(out, "{:<6}{family:<14}rows={n:<5}max_ratio={max_ratio:.6} violations={violations}", algorithm.as_str());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_gives_header_only() {
        let rows = run_bench(&BenchSpec::default());
        assert!(rows.is_empty());
        assert_eq!(to_csv(&rows), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn bounds_are_exact_fractions() {
        let eps = Eps::default();
        assert_eq!(ratio_bound(Algorithm::Par, 2, Some(eps)).unwrap(), Ratio::new(15, 8));
        assert_eq!(ratio_bound(Algorithm::Par, 3, Some(eps)).unwrap(), Ratio::new(5, 2));
        assert_eq!(ratio_bound(Algorithm::Fd, 3, None).unwrap(), Ratio::from_integer(3));
        assert_eq!(judge(15, 8, Ratio::new(15, 8)), (1.875, true));
        assert!(!judge(16, 8, Ratio::new(15, 8)).1);
        assert_eq!(judge(0, 0, Ratio::from_integer(1)), (1.0, true));
    }

    #[test]
    fn sweep_expansion() {
        let sweep = Sweep {
            family: Family::Random,
            sizes: vec![4, 5],
            seeds: vec![1, 2, 3],
            m: Some(3),
            density: None,
            max_p: None,
            r: None,
        };
        assert_eq!(sweep.expand().len(), 6);
        let fd = Sweep { family: Family::FdTight, sizes: vec![10, 100], seeds: vec![], m: Some(3), density: None, max_p: None, r: None };
        assert_eq!(fd.expand(), vec![GenSpec::FdTight { m: 3, q: 10, r: 1 }, GenSpec::FdTight { m: 3, q: 100, r: 1 }]);
    }

    #[test]
    fn rows_cover_every_algorithm_and_eps() {
        let spec = BenchSpec {
            instances: vec![GenSpec::FdTight { m: 2, q: 10, r: 1 }],
            algorithms: vec![Algorithm::Par, Algorithm::Fd, Algorithm::Exact],
            eps: vec![Eps::new(1, 2).unwrap(), Eps::new(1, 10).unwrap()],
            ..BenchSpec::default()
        };
        let rows = run_bench(&spec);
        let keys: Vec<_> = rows.iter().map(|r| (r.algorithm, r.eps.map(|e| e.to_string()))).collect();
        assert_eq!(
            keys,
            vec![
                (Algorithm::Fd, None),
                (Algorithm::Par, Some("1/10".into())),
                (Algorithm::Par, Some("1/2".into())),
                (Algorithm::Exact, None),
            ]
        );
        let fd = &rows[0];
        assert_eq!((fd.makespan, fd.oracle_makespan, fd.bound_satisfied), (Some(20), Some(11), Some(true)));
    }
}
