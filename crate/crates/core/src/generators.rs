//! Instance generators: the PARTITION reduction, tight examples for FD and
//! PAR, and seeded random layered DAGs.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eps::Eps;
use crate::error::{Error, Result};
use crate::flowshop::brute_force_flowshop;
use crate::model::{Arc, Instance, Task, Time};
use crate::solvers::par_algorithm;

/// A generator family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GenSpec {
    Partition { set: Vec<u64> },
    FdTight { m: usize, q: u64, r: u64 },
    ParTightM2 { scale: u64 },
    ParTightM3 { scale: u64 },
    Random(RandomSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub vertices: usize,
    /// Probability of each extra forward arc, in `[0, 1]`.
    pub density: f64,
    pub m: usize,
    pub max_p: u64,
    pub seed: u64,
}

impl GenSpec {
    pub fn generate(&self) -> Result<Instance> {
        match self {
            GenSpec::Partition { set } => gen_partition_reduction(set),
            GenSpec::FdTight { m, q, r } => gen_fd_tight(*m, *q, *r),
            GenSpec::ParTightM2 { scale } => gen_par_tight_m2(*scale),
            GenSpec::ParTightM3 { scale } => gen_par_tight_m3(*scale),
            GenSpec::Random(spec) => gen_random(spec),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            GenSpec::Partition { .. } => "partition",
            GenSpec::FdTight { .. } => "fd-tight",
            GenSpec::ParTightM2 { .. } => "par-tight-m2",
            GenSpec::ParTightM3 { .. } => "par-tight-m3",
            GenSpec::Random(_) => "random",
        }
    }

    /// Stable identifier naming the family and every parameter.
    pub fn instance_id(&self) -> String {
        match self {
            GenSpec::Partition { set } => {
                let items: Vec<String> = set.iter().map(u64::to_string).collect();
                format!("partition-{}", items.join("_"))
            }
            GenSpec::FdTight { m, q, r } => format!("fd-tight-m{m}-q{q}-r{r}"),
            GenSpec::ParTightM2 { scale } => format!("par-tight-m2-s{scale}"),
            GenSpec::ParTightM3 { scale } => format!("par-tight-m3-s{scale}"),
            GenSpec::Random(r) => {
                format!("random-v{}-m{}-d{}-p{}-seed{}", r.vertices, r.m, r.density, r.max_p, r.seed)
            }
        }
    }
}

fn names(prefix: &str, range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

/// Two machines, a chain `v0 .. vn`, and between consecutive vertices two
/// parallel jobs `(s_k, 0)` and `(0, s_k)`. The optimal makespan is `sum / 2`
/// exactly when the multiset splits into two halves of equal sum.
pub fn gen_partition_reduction(set: &[u64]) -> Result<Instance> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("partition set is empty".into()));
    }
    if set.contains(&0) {
        return Err(Error::InvalidParameter("partition sizes must be positive".into()));
    }
    let n = set.len();
    let v = names("v", 0..=n);
    let mut arcs = Vec::with_capacity(2 * n);
    for (k, &size) in set.iter().enumerate() {
        let id = 2 * k as u32;
        arcs.push(Arc::new(id + 1, v[k].clone(), v[k + 1].clone(), [size, 0]));
        arcs.push(Arc::new(id + 2, v[k].clone(), v[k + 1].clone(), [0, size]));
    }
    Instance::new(2, v.clone(), v[0].clone(), v[n].clone(), arcs)
}

/// A direct arc `v0 -> vm` of `m` jobs-worth `(q, .., q)` against a chain of
/// `m` jobs where job `k` needs `q + r` on machine `k` only. FD takes the
/// direct arc (makespan `m q`); the chain finishes at `q + r`.
pub fn gen_fd_tight(m: usize, q: u64, r: u64) -> Result<Instance> {
    if m < 2 || q < 1 || r < 1 {
        return Err(Error::InvalidParameter(format!("fd-tight needs m >= 2, q >= 1, r >= 1 (got m={m}, q={q}, r={r})")));
    }
    let v = names("v", 0..=m);
    let mut arcs = vec![Arc::new(1, v[0].clone(), v[m].clone(), vec![q; m])];
    for k in 1..=m {
        let mut p = vec![0; m];
        p[k - 1] = q + r;
        arcs.push(Arc::new(k as u32 + 1, v[k - 1].clone(), v[k].clone(), p));
    }
    Instance::new(m, v.clone(), v[0].clone(), v[m].clone(), arcs)
}

/// Coordinates tried for free job vectors of the tight PAR examples: a few
/// small values and a few values just above the scale. Searched jobs must
/// have positive total work.
fn candidate_times(scale: u64) -> Vec<Time> {
    let mut xs: Vec<Time> = (0..=5).chain((0..=5).map(|d| scale + d)).collect();
    xs.sort_unstable();
    xs.dedup();
    xs
}

fn tight_cache() -> &'static Mutex<HashMap<(u8, u64), Instance>> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, u64), Instance>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: (u8, u64), build: impl FnOnce() -> Result<Instance>) -> Result<Instance> {
    if let Some(inst) = tight_cache().lock().expect("cache lock").get(&key) {
        return Ok(inst.clone());
    }
    let inst = build()?;
    tight_cache().lock().expect("cache lock").insert(key, inst.clone());
    Ok(inst)
}

/// Tight example for PAR on two machines (`eps` realised as `1 / scale`).
///
/// Path `v1 -> v2 -> v4` holds two `(scale, scale)` jobs: min-max weight
/// `2 scale`, Johnson makespan `3 scale`, and no job above `C' / rho`, so PAR
/// stops there. The detour `v1 -> v3 -> v2 -> v4` reuses the `(v2, v4)` job;
/// its two other job vectors are searched so that its optimal makespan is
/// exactly `2 scale + 4` while PAR (default eps) still returns `3 scale`.
pub fn gen_par_tight_m2(scale: u64) -> Result<Instance> {
    if scale < 1 {
        return Err(Error::InvalidParameter("scale must be at least 1".into()));
    }
    cached((2, scale), || {
        let s = scale;
        let target = 2 * s + 4;
        let shared = Task::new(2, [s, s]);
        let values = candidate_times(s);
        let vertices = names("v", 1..=4);
        for &x1 in &values {
            for &x2 in &values {
                for &y1 in &values {
                    for &y2 in &values {
                        if x1 + x2 == 0 || y1 + y2 == 0 || x1 + y1 + s > target || x2 + y2 + s > target {
                            continue;
                        }
                        let detour = [Task::new(3, [x1, x2]), Task::new(4, [y1, y2]), shared.clone()];
                        if brute_force_flowshop(&detour, 2, 3)?.makespan != target {
                            continue;
                        }
                        let inst = Instance::new(
                            2,
                            vertices.clone(),
                            "v1",
                            "v4",
                            vec![
                                Arc::new(1, "v1", "v2", [s, s]),
                                Arc::new(2, "v2", "v4", [s, s]),
                                Arc::new(3, "v1", "v3", [x1, x2]),
                                Arc::new(4, "v3", "v2", [y1, y2]),
                            ],
                        )?;
                        let par = par_algorithm(&inst, Eps::default())?;
                        if par.makespan == 3 * s && par.path.arc_ids.len() == 2 {
                            return Ok(inst);
                        }
                    }
                }
            }
        }
        Err(Error::SearchFailed(format!(
            "no two-machine detour with optimum {target} keeps PAR at {} for scale {s}",
            3 * s
        )))
    })
}

/// Tight example for PAR on three machines.
///
/// Path `v1 -> v4 -> v5 -> v6` carries `(s,0,s)`, `(s,0,s)`, `(0,2s,0)`: every
/// machine load is `2s`, every job totals `2s = C' / rho`, and RS yields
/// `C' = 4s`. The disjoint path `v1 -> v2 -> v3 -> v6` gets three searched
/// job vectors with optimal makespan `ceil(2 (1 + 1/s)^2 s)` such that PAR
/// (default eps) still returns `4s`.
pub fn gen_par_tight_m3(scale: u64) -> Result<Instance> {
    if scale < 1 {
        return Err(Error::InvalidParameter("scale must be at least 1".into()));
    }
    cached((3, scale), || {
        let s = scale;
        // ceil(2 (s + 1)^2 / s)
        let target = (2 * (s + 1) * (s + 1)).div_ceil(s);
        let values = candidate_times(s);
        let mut triples: Vec<[Time; 3]> = Vec::new();
        for &a in &values {
            for &b in &values {
                for &c in &values {
                    if a + b + c > 0 && a + b + c <= target {
                        triples.push([a, b, c]);
                    }
                }
            }
        }
        let vertices = names("v", 1..=6);
        let fixed = [
            Arc::new(1, "v1", "v4", [s, 0, s]),
            Arc::new(2, "v4", "v5", [s, 0, s]),
            Arc::new(3, "v5", "v6", [0, 2 * s, 0]),
        ];
        for b1 in &triples {
            for b2 in &triples {
                if (0..3).any(|i| b1[i] + b2[i] > target) {
                    continue;
                }
                for b3 in &triples {
                    if (0..3).any(|i| b1[i] + b2[i] + b3[i] > target) {
                        continue;
                    }
                    let detour = [Task::new(4, *b1), Task::new(5, *b2), Task::new(6, *b3)];
                    if brute_force_flowshop(&detour, 3, 3)?.makespan != target {
                        continue;
                    }
                    let mut arcs = fixed.to_vec();
                    arcs.push(Arc::new(4, "v1", "v2", *b1));
                    arcs.push(Arc::new(5, "v2", "v3", *b2));
                    arcs.push(Arc::new(6, "v3", "v6", *b3));
                    let inst = Instance::new(3, vertices.clone(), "v1", "v6", arcs)?;
                    let par = par_algorithm(&inst, Eps::default())?;
                    if par.makespan == 4 * s && par.path.arc_ids.iter().all(|id| id.0 <= 3) {
                        return Ok(inst);
                    }
                }
            }
        }
        Err(Error::SearchFailed(format!(
            "no three-machine detour with optimum {target} keeps PAR at {} for scale {s}",
            4 * s
        )))
    })
}

/// Seeded layered DAG on `v0 .. v(n-1)`: the backbone `v_i -> v_(i+1)`
/// guarantees an s-t path, and every forward pair `i < j` gets an extra arc
/// with probability `density` (consecutive pairs thus become parallel arcs).
pub fn gen_random(spec: &RandomSpec) -> Result<Instance> {
    if spec.vertices < 2 {
        return Err(Error::InvalidParameter("random instances need at least 2 vertices".into()));
    }
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(Error::InvalidParameter(format!("density {} outside [0, 1]", spec.density)));
    }
    if spec.m < 1 {
        return Err(Error::MachineCount(spec.m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.vertices;
    let v = names("v", 0..=n - 1);
    let mut arcs = Vec::new();
    let times = |rng: &mut ChaCha8Rng| -> Vec<Time> { (0..spec.m).map(|_| rng.random_range(0..=spec.max_p)).collect() };
    for i in 0..n - 1 {
        let p = times(&mut rng);
        arcs.push((i, i + 1, p));
    }
    for i in 0..n - 1 {
        for j in i + 1..n {
            if rng.random_bool(spec.density) {
                let p = times(&mut rng);
                arcs.push((i, j, p));
            }
        }
    }
    let arcs = arcs
        .into_iter()
        .enumerate()
        .map(|(k, (i, j, p))| Arc::new(k as u32 + 1, v[i].clone(), v[j].clone(), p))
        .collect();
    Instance::new(spec.m, v.clone(), v[0].clone(), v[n - 1].clone(), arcs)
}
