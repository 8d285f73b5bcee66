//! Oracles shared by the integration tests. None of them calls into the
//! scheduling or path code they are used to check.

#![allow(dead_code)]

use pathshop::{Job, JobId, Time};

/// Start times by repeated relaxation of every precedence until nothing
/// moves; returns (start, finish) per machine in sequence order.
pub fn relaxed_schedule<J: Job>(jobs: &[J], orders: &[Vec<JobId>]) -> Vec<Vec<(JobId, Time, Time)>> {
    let m = orders.len();
    let time = |id: JobId, i: usize| jobs.iter().find(|j| j.id() == id).unwrap().times()[i];
    let mut start: Vec<Vec<Time>> = orders.iter().map(|o| vec![0; o.len()]).collect();
    loop {
        let mut changed = false;
        for i in 0..m {
            for (k, &id) in orders[i].iter().enumerate() {
                let mut earliest = 0;
                if k > 0 {
                    let prev = orders[i][k - 1];
                    earliest = earliest.max(start[i][k - 1] + time(prev, i));
                }
                if i > 0 {
                    let pos = orders[i - 1].iter().position(|&x| x == id).unwrap();
                    earliest = earliest.max(start[i - 1][pos] + time(id, i - 1));
                }
                if earliest > start[i][k] {
                    start[i][k] = earliest;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (0..m)
        .map(|i| orders[i].iter().enumerate().map(|(k, &id)| (id, start[i][k], start[i][k] + time(id, i))).collect())
        .collect()
}

pub fn relaxed_makespan<J: Job>(jobs: &[J], order: &[JobId], m: usize) -> Time {
    let orders = vec![order.to_vec(); m];
    relaxed_schedule(jobs, &orders).iter().flat_map(|ops| ops.iter().map(|op| op.2)).max().unwrap_or(0)
}

/// Every ordering of `ids`, by recursive insertion.
pub fn all_orders(ids: &[JobId]) -> Vec<Vec<JobId>> {
    if ids.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &first) in ids.iter().enumerate() {
        let mut rest = ids.to_vec();
        rest.remove(i);
        for mut tail in all_orders(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Minimum permutation makespan via the relaxation simulator.
pub fn naive_flowshop_optimum<J: Job>(jobs: &[J], m: usize) -> Time {
    let ids: Vec<JobId> = jobs.iter().map(|j| j.id()).collect();
    all_orders(&ids).iter().map(|o| relaxed_makespan(jobs, o, m)).min().unwrap_or(0)
}

/// Subset-sum check for an equal-sum split.
pub fn partition_exists(set: &[u64]) -> bool {
    let total: u64 = set.iter().sum();
    if total % 2 == 1 {
        return false;
    }
    (0u32..1 << set.len()).any(|mask| {
        set.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).sum::<u64>() * 2 == total
    })
}
