//! Flow shop machinery: dense schedule evaluation, Johnson's rule, the
//! Röck–Schmidt machine aggregation heuristic, critical jobs, the machine
//! partition used by PAR, and a brute-force permutation optimum.

use std::cmp::Reverse;
use std::collections::{HashMap, HashSet};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Job, JobId, Operation, Schedule, Time};

/// Default limit on the number of jobs handed to [`brute_force_flowshop`].
pub const DEFAULT_MAX_JOBS: usize = 8;

/// A single job sequence used on every machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(pub Vec<JobId>);

impl Permutation {
    pub fn jobs(&self) -> &[JobId] {
        &self.0
    }
}

/// Whether a reported makespan is a proven optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Optimal,
    /// Best permutation schedule; non-permutation schedules may be shorter (m >= 4).
    PermutationOptimal,
    Heuristic,
}

impl Exactness {
    /// Permutation schedules are dominant only for two and three machines.
    pub fn of_permutation_search(m: usize) -> Self {
        if m <= 3 {
            Exactness::Optimal
        } else {
            Exactness::PermutationOptimal
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Exactness::Optimal => "optimal",
            Exactness::PermutationOptimal => "permutation-optimal",
            Exactness::Heuristic => "heuristic",
        }
    }
}

fn check_arity<J: Job>(jobs: &[J], m: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::MachineCount(m));
    }
    for j in jobs {
        if j.times().len() != m {
            return Err(Error::Arity { id: j.id(), got: j.times().len(), expected: m });
        }
    }
    Ok(())
}

fn index_jobs<J: Job>(jobs: &[J]) -> Result<HashMap<JobId, usize>> {
    let mut index = HashMap::with_capacity(jobs.len());
    for (i, j) in jobs.iter().enumerate() {
        if index.insert(j.id(), i).is_some() {
            return Err(Error::NotAPermutation(format!("job {} appears twice in the job set", j.id())));
        }
    }
    Ok(index)
}

/// Maps a sequence of ids to job indices, checking it is a permutation of `jobs`.
fn positions(index: &HashMap<JobId, usize>, order: &[JobId]) -> Result<Vec<usize>> {
    if order.len() != index.len() {
        return Err(Error::NotAPermutation(format!(
            "sequence has {} entries for {} jobs",
            order.len(),
            index.len()
        )));
    }
    let mut seen = HashSet::with_capacity(order.len());
    order
        .iter()
        .map(|id| {
            let &k = index.get(id).ok_or_else(|| Error::NotAPermutation(format!("unknown job {id}")))?;
            if !seen.insert(k) {
                return Err(Error::NotAPermutation(format!("job {id} repeated")));
            }
            Ok(k)
        })
        .collect()
}

/// Permutation schedule with every operation as early as possible:
/// `C(i,k) = max(C(i-1,k), C(i,k-1)) + p(i, perm[k])`.
pub fn evaluate_permutation<J: Job>(jobs: &[J], perm: &Permutation, m: usize) -> Result<Schedule> {
    check_arity(jobs, m)?;
    let index = index_jobs(jobs)?;
    let order = positions(&index, perm.jobs())?;
    let mut machines = vec![Vec::with_capacity(order.len()); m];
    // completion[i] holds C(i, k-1) while position k is processed
    let mut completion = vec![0 as Time; m];
    for &k in &order {
        let job = &jobs[k];
        let mut ready = 0;
        for (i, slot) in completion.iter_mut().enumerate() {
            let start = ready.max(*slot);
            let finish = start + job.times()[i];
            machines[i].push(Operation { job: job.id(), start, finish });
            *slot = finish;
            ready = finish;
        }
    }
    let makespan = completion.last().copied().unwrap_or(0);
    Ok(Schedule { machines, makespan })
}

/// Dense simulation of fixed per-machine sequences: each operation starts once
/// its job has left the previous machine and its machine predecessor is done.
pub fn evaluate_machine_orders<J: Job>(jobs: &[J], orders: &[Vec<JobId>], m: usize) -> Result<Schedule> {
    check_arity(jobs, m)?;
    if orders.len() != m {
        return Err(Error::InconsistentOrders(format!("{} machine sequences for {m} machines", orders.len())));
    }
    let index = index_jobs(jobs)?;
    let sequences = orders
        .iter()
        .enumerate()
        .map(|(i, order)| {
            positions(&index, order)
                .map_err(|e| Error::InconsistentOrders(format!("machine {}: {e}", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;

    // Every precedence points to the previous machine or to an earlier slot on
    // the same machine, so a machine-by-machine sweep visits operations in a
    // topological order and no wait cycle can arise.
    let mut left_previous = vec![0 as Time; jobs.len()];
    let mut machines = Vec::with_capacity(m);
    for (i, seq) in sequences.iter().enumerate() {
        let mut free = 0;
        let mut ops = Vec::with_capacity(seq.len());
        for &k in seq {
            let start = free.max(left_previous[k]);
            let finish = start + jobs[k].times()[i];
            ops.push(Operation { job: jobs[k].id(), start, finish });
            left_previous[k] = finish;
            free = finish;
        }
        machines.push(ops);
    }
    let makespan = machines.iter().flat_map(|ops| ops.last()).map(|op| op.finish).max().unwrap_or(0);
    Ok(Schedule { machines, makespan })
}

/// Johnson's sequence for two-machine data `(id, p1, p2)`.
///
/// Jobs with `p1 <= p2` come first by nondecreasing `p1`, the rest follow by
/// nonincreasing `p2`; ties go to the smaller id.
pub fn johnson_sequence(items: &[(JobId, Time, Time)]) -> Permutation {
    let (mut first, mut second): (Vec<_>, Vec<_>) = items.iter().copied().partition(|&(_, a, b)| a <= b);
    first.sort_by_key(|&(id, a, _)| (a, id));
    second.sort_by_key(|&(id, _, b)| (Reverse(b), id));
    Permutation(first.into_iter().chain(second).map(|(id, _, _)| id).collect())
}

/// Röck–Schmidt sequence for three-machine data: Johnson's rule on the
/// artificial pair `(p1 + p2, p2 + p3)`.
pub fn rs_sequence(items: &[(JobId, Time, Time, Time)]) -> Permutation {
    let artificial: Vec<_> = items.iter().map(|&(id, a, b, c)| (id, a + b, b + c)).collect();
    johnson_sequence(&artificial)
}

/// Optimal F2||Cmax sequence and its permutation schedule.
pub fn johnson_rule<J: Job>(jobs: &[J]) -> Result<(Permutation, Schedule)> {
    check_arity(jobs, 2)?;
    let items: Vec<_> = jobs.iter().map(|j| (j.id(), j.times()[0], j.times()[1])).collect();
    let perm = johnson_sequence(&items);
    let schedule = evaluate_permutation(jobs, &perm, 2)?;
    Ok((perm, schedule))
}

pub fn rs_algorithm<J: Job>(jobs: &[J]) -> Result<(Permutation, Schedule)> {
    check_arity(jobs, 3)?;
    let items: Vec<_> = jobs.iter().map(|j| (j.id(), j.times()[0], j.times()[1], j.times()[2])).collect();
    let perm = rs_sequence(&items);
    let schedule = evaluate_permutation(jobs, &perm, 3)?;
    Ok((perm, schedule))
}

/// Critical job of a two-machine permutation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriticalJob {
    /// 1-based position in the permutation.
    pub position: usize,
    pub value: Time,
}

/// Critical pair of a three-machine permutation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriticalPair {
    /// 1-based positions, `u <= v`.
    pub u: usize,
    pub v: usize,
    pub value: Time,
}

fn ordered_times<J: Job>(jobs: &[J], perm: &Permutation, m: usize) -> Result<Vec<Vec<Time>>> {
    check_arity(jobs, m)?;
    if jobs.is_empty() {
        return Err(Error::EmptyJobs);
    }
    let index = index_jobs(jobs)?;
    Ok(positions(&index, perm.jobs())?.into_iter().map(|k| jobs[k].times().to_vec()).collect())
}

/// Position `nu` maximizing `sum_{j<=nu} p1 + sum_{j>=nu} p2`; the smallest one on ties.
pub fn critical_job_2m<J: Job>(jobs: &[J], perm: &Permutation) -> Result<CriticalJob> {
    let p = ordered_times(jobs, perm, 2)?;
    let mut head = 0;
    let mut tail: Time = p.iter().map(|t| t[1]).sum();
    let mut best = CriticalJob { position: 0, value: 0 };
    for (k, t) in p.iter().enumerate() {
        head += t[0];
        let value = head + tail;
        if best.position == 0 || value > best.value {
            best = CriticalJob { position: k + 1, value };
        }
        tail -= t[1];
    }
    Ok(best)
}

/// Pair `u <= v` maximizing `sum_{j<=u} p1 + sum_{u<=j<=v} p2 + sum_{j>=v} p3`;
/// lexicographically smallest on ties.
pub fn critical_jobs_3m<J: Job>(jobs: &[J], perm: &Permutation) -> Result<CriticalPair> {
    let p = ordered_times(jobs, perm, 3)?;
    let n = p.len();
    let prefix = |i: usize| {
        let mut acc = vec![0 as Time; n + 1];
        for k in 0..n {
            acc[k + 1] = acc[k] + p[k][i];
        }
        acc
    };
    let (p1, p2, p3) = (prefix(0), prefix(1), prefix(2));
    let mut best: Option<CriticalPair> = None;
    for u in 1..=n {
        for v in u..=n {
            let value = p1[u] + (p2[v] - p2[u - 1]) + (p3[n] - p3[v - 1]);
            if best.is_none_or(|b| value > b.value) {
                best = Some(CriticalPair { u, v, value });
            }
        }
    }
    Ok(best.expect("nonempty job set"))
}

/// Split of the machines into consecutive triples, at most one pair and at
/// most one singleton, together with the resulting performance parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachinePartition {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub rho: Ratio<u64>,
    /// 0-based machine indices; triples first, then the pair, then the singleton.
    pub groups: Vec<Vec<usize>>,
}

pub fn machine_partition(m: usize) -> Result<MachinePartition> {
    if m < 1 {
        return Err(Error::MachineCount(m));
    }
    let (m1, m2, m3) = match m % 3 {
        0 => (0, 0, m / 3),
        1 => (1, 0, (m - 1) / 3),
        _ => (0, 1, (m - 2) / 3),
    };
    // rho = m1 + 3/2 m2 + 2 m3
    let rho = Ratio::new((2 * m1 + 3 * m2 + 4 * m3) as u64, 2);
    let mut groups: Vec<Vec<usize>> = (0..m3).map(|g| vec![3 * g, 3 * g + 1, 3 * g + 2]).collect();
    if m2 == 1 {
        groups.push(vec![m - 2, m - 1]);
    }
    if m1 == 1 {
        groups.push(vec![m - 1]);
    }
    Ok(MachinePartition { m1, m2, m3, rho, groups })
}

/// Solves each machine group independently (RS for triples, Johnson for the
/// pair, id order for a singleton) and runs the combined per-machine
/// sequences as early as possible.
pub fn partition_schedule<J: Job>(jobs: &[J], m: usize) -> Result<Schedule> {
    check_arity(jobs, m)?;
    let partition = machine_partition(m)?;
    let mut orders = vec![Vec::new(); m];
    for group in &partition.groups {
        let perm = match group[..] {
            [a, b, c] => rs_sequence(
                &jobs.iter().map(|j| (j.id(), j.times()[a], j.times()[b], j.times()[c])).collect::<Vec<_>>(),
            ),
            [a, b] => johnson_sequence(&jobs.iter().map(|j| (j.id(), j.times()[a], j.times()[b])).collect::<Vec<_>>()),
            _ => {
                let mut ids: Vec<_> = jobs.iter().map(|j| j.id()).collect();
                ids.sort();
                Permutation(ids)
            }
        };
        for &machine in group {
            orders[machine] = perm.0.clone();
        }
    }
    evaluate_machine_orders(jobs, &orders, m)
}

/// Minimum permutation-schedule makespan found by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub permutation: Permutation,
    pub makespan: Time,
    pub exactness: Exactness,
}

/// Enumerates all `n!` sequences in lexicographic id order and keeps the first
/// one reaching the minimum makespan.
pub fn brute_force_flowshop<J: Job>(jobs: &[J], m: usize, max_jobs: usize) -> Result<BruteForce> {
    check_arity(jobs, m)?;
    index_jobs(jobs)?;
    if jobs.len() > max_jobs {
        return Err(Error::JobCapExceeded { jobs: jobs.len(), cap: max_jobs });
    }
    let mut sorted: Vec<&J> = jobs.iter().collect();
    sorted.sort_by_key(|j| j.id());
    let times: Vec<&[Time]> = sorted.iter().map(|j| j.times()).collect();

    let mut order: Vec<usize> = (0..sorted.len()).collect();
    let mut best_order = order.clone();
    let mut best = Time::MAX;
    let mut completion = vec![0 as Time; m];
    loop {
        completion.iter_mut().for_each(|c| *c = 0);
        for &k in &order {
            let mut ready = 0;
            for (c, &p) in completion.iter_mut().zip(times[k]) {
                *c = ready.max(*c) + p;
                ready = *c;
            }
        }
        let makespan = completion[m - 1];
        if makespan < best {
            best = makespan;
            best_order.copy_from_slice(&order);
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    if sorted.is_empty() {
        best = 0;
    }
    Ok(BruteForce {
        permutation: Permutation(best_order.into_iter().map(|k| sorted[k].id()).collect()),
        makespan: best,
        exactness: Exactness::of_permutation_search(m),
    })
}

/// Advances to the next lexicographic permutation; false after the last one.
fn next_permutation(xs: &mut [usize]) -> bool {
    let Some(i) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = xs.iter().rposition(|&x| x > xs[i]).expect("a larger element exists right of i");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Task;

    fn ids(xs: &[u32]) -> Permutation {
        Permutation(xs.iter().map(|&x| JobId(x)).collect())
    }

    #[test]
    fn permutation_examples() {
        let jobs = [Task::new(1, [3, 2]), Task::new(2, [1, 4])];
        assert_eq!(evaluate_permutation(&jobs, &ids(&[2, 1]), 2).unwrap().makespan, 7);
        assert_eq!(evaluate_permutation(&jobs, &ids(&[1, 2]), 2).unwrap().makespan, 9);
        let single = [Task::new(1, [1, 2, 3])];
        assert_eq!(evaluate_permutation(&single, &ids(&[1]), 3).unwrap().makespan, 6);
        let twins = [Task::new(1, [1, 1]), Task::new(2, [1, 1])];
        assert_eq!(evaluate_permutation(&twins, &ids(&[1, 2]), 2).unwrap().makespan, 3);
        assert_eq!(evaluate_permutation(&twins, &ids(&[2, 1]), 2).unwrap().makespan, 3);
    }

    #[test]
    fn permutation_errors() {
        let jobs = [Task::new(1, [3, 2]), Task::new(2, [1, 4])];
        assert!(matches!(evaluate_permutation(&jobs, &ids(&[1]), 2), Err(Error::NotAPermutation(_))));
        assert!(matches!(evaluate_permutation(&jobs, &ids(&[1, 1]), 2), Err(Error::NotAPermutation(_))));
        assert!(matches!(evaluate_permutation(&jobs, &ids(&[1, 3]), 2), Err(Error::NotAPermutation(_))));
        assert!(matches!(evaluate_permutation(&jobs, &ids(&[1, 2]), 3), Err(Error::Arity { .. })));
    }

    #[test]
    fn machine_orders_examples() {
        let jobs = [Task::new(1, [2, 1]), Task::new(2, [1, 2])];
        let s = evaluate_machine_orders(&jobs, &[vec![JobId(1), JobId(2)], vec![JobId(2), JobId(1)]], 2).unwrap();
        let m1: Vec<_> = s.machines[0].iter().map(|o| (o.job.0, o.start, o.finish)).collect();
        let m2: Vec<_> = s.machines[1].iter().map(|o| (o.job.0, o.start, o.finish)).collect();
        assert_eq!(m1, [(1, 0, 2), (2, 2, 3)]);
        assert_eq!(m2, [(2, 3, 5), (1, 5, 6)]);
        assert_eq!(s.makespan, 6);

        let empty: [Task; 0] = [];
        assert_eq!(evaluate_machine_orders(&empty, &[vec![], vec![]], 2).unwrap().makespan, 0);
        let err = evaluate_machine_orders(&jobs, &[vec![JobId(1), JobId(2)], vec![JobId(1)]], 2).unwrap_err();
        assert!(matches!(err, Error::InconsistentOrders(_)));
    }

    #[test]
    fn johnson_examples() {
        let (perm, s) = johnson_rule(&[Task::new(1, [3, 2]), Task::new(2, [1, 4])]).unwrap();
        assert_eq!(perm, ids(&[2, 1]));
        assert_eq!(s.makespan, 7);
        let (_, s) = johnson_rule(&[Task::new(1, [1, 1]), Task::new(2, [1, 1])]).unwrap();
        assert_eq!(s.makespan, 3);
        let (_, s) = johnson_rule(&[Task::new(9, [5, 8])]).unwrap();
        assert_eq!(s.makespan, 13);
    }

    #[test]
    fn johnson_tie_breaking_by_id() {
        // p1 = p2 goes to the first set; equal keys keep ascending ids
        let items = [
            (JobId(4), 2, 2),
            (JobId(3), 2, 5),
            (JobId(2), 6, 1),
            (JobId(1), 7, 1),
            (JobId(5), 1, 9),
        ];
        assert_eq!(johnson_sequence(&items), ids(&[5, 3, 4, 1, 2]));
    }

    #[test]
    fn rs_examples() {
        let (perm, s) = rs_algorithm(&[Task::new(1, [2, 1, 1]), Task::new(2, [1, 1, 2])]).unwrap();
        assert_eq!(perm, ids(&[2, 1]));
        assert_eq!(s.makespan, 5);
        assert_eq!(rs_algorithm(&[Task::new(1, [1, 2, 3])]).unwrap().1.makespan, 6);
        for k in 1..6u32 {
            let jobs: Vec<_> = (1..=k).map(|i| Task::new(i, [1, 1, 1])).collect();
            assert_eq!(rs_algorithm(&jobs).unwrap().1.makespan, k as Time + 2);
        }
    }

    #[test]
    fn critical_job_examples() {
        let jobs = [Task::new(1, [3, 2]), Task::new(2, [1, 4])];
        assert_eq!(critical_job_2m(&jobs, &ids(&[2, 1])).unwrap(), CriticalJob { position: 1, value: 7 });
        assert_eq!(critical_job_2m(&[Task::new(1, [4, 4])], &ids(&[1])).unwrap().position, 1);
        let twins = [Task::new(1, [1, 1]), Task::new(2, [1, 1])];
        assert_eq!(critical_job_2m(&twins, &ids(&[1, 2])).unwrap(), CriticalJob { position: 1, value: 3 });
        let empty: [Task; 0] = [];
        assert!(matches!(critical_job_2m(&empty, &ids(&[])), Err(Error::EmptyJobs)));
    }

    #[test]
    fn critical_pair_examples() {
        let jobs = [Task::new(1, [2, 1, 1]), Task::new(2, [1, 1, 2])];
        assert_eq!(critical_jobs_3m(&jobs, &ids(&[2, 1])).unwrap().value, 5);
        let one = critical_jobs_3m(&[Task::new(1, [1, 2, 3])], &ids(&[1])).unwrap();
        assert_eq!((one.u, one.v, one.value), (1, 1, 6));
        let zeros = [Task::new(1, [0, 0, 0]), Task::new(2, [0, 0, 0])];
        assert_eq!(critical_jobs_3m(&zeros, &ids(&[1, 2])).unwrap(), CriticalPair { u: 1, v: 1, value: 0 });
    }

    #[test]
    fn partition_table_examples() {
        let p = machine_partition(3).unwrap();
        assert_eq!((p.m1, p.m2, p.m3, p.rho), (0, 0, 1, Ratio::from_integer(2)));
        let p = machine_partition(4).unwrap();
        assert_eq!((p.m1, p.m2, p.m3, p.rho), (1, 0, 1, Ratio::from_integer(3)));
        assert_eq!(p.groups, vec![vec![0, 1, 2], vec![3]]);
        let p = machine_partition(5).unwrap();
        assert_eq!((p.m1, p.m2, p.m3, p.rho), (0, 1, 1, Ratio::new(7, 2)));
        assert_eq!(p.groups, vec![vec![0, 1, 2], vec![3, 4]]);
        assert!(machine_partition(0).is_err());
    }

    #[test]
    fn partition_schedule_reduces_to_single_group_rules() {
        let two = [Task::new(1, [3, 2]), Task::new(2, [1, 4]), Task::new(3, [2, 2])];
        assert_eq!(partition_schedule(&two, 2).unwrap(), johnson_rule(&two).unwrap().1);
        let three = [Task::new(1, [2, 1, 1]), Task::new(2, [1, 1, 2]), Task::new(3, [4, 0, 3])];
        assert_eq!(partition_schedule(&three, 3).unwrap(), rs_algorithm(&three).unwrap().1);
        let four = [Task::new(1, [1, 1, 1, 1]), Task::new(2, [1, 1, 1, 1])];
        let s = partition_schedule(&four, 4).unwrap();
        // both jobs in sequence 1, 2 everywhere: 4 + 1
        assert_eq!(s.makespan, 5);
        let orders = vec![vec![JobId(1), JobId(2)]; 4];
        assert_eq!(s, evaluate_machine_orders(&four, &orders, 4).unwrap());
    }

    #[test]
    fn brute_force_examples() {
        let bf = brute_force_flowshop(&[Task::new(1, [3, 2]), Task::new(2, [1, 4])], 2, 8).unwrap();
        assert_eq!(bf.makespan, 7);
        assert_eq!(bf.exactness, Exactness::Optimal);
        let bf = brute_force_flowshop(&[Task::new(1, [2, 1, 1]), Task::new(2, [1, 1, 2])], 3, 8).unwrap();
        assert_eq!(bf.makespan, 5);
        let bf = brute_force_flowshop(&[Task::new(1, [1, 2, 3, 4])], 4, 8).unwrap();
        assert_eq!(bf.makespan, 10);
        assert_eq!(bf.exactness, Exactness::PermutationOptimal);
        let many: Vec<_> = (0..9).map(|i| Task::new(i, [1, 1])).collect();
        assert!(matches!(brute_force_flowshop(&many, 2, 8), Err(Error::JobCapExceeded { jobs: 9, cap: 8 })));
    }

    #[test]
    fn next_permutation_enumerates_all() {
        let mut xs = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut xs) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(xs, vec![3, 2, 1, 0]);
    }
}
