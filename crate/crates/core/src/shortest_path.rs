//! Path selection over arcs carrying `K` nonnegative weights: Dijkstra for a
//! single additive weight, a scaling label-setting FPTAS for the min-max
//! objective, and exhaustive simple-path enumeration as an exact oracle.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::eps::Eps;
use crate::error::{Error, Result};
use crate::model::{Arc, Instance, JobId, Path};

/// Default limit on the number of simple paths an oracle may enumerate.
pub const DEFAULT_MAX_PATHS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedArc {
    pub id: JobId,
    pub tail: usize,
    pub head: usize,
    pub w: Vec<u64>,
}

/// Graph topology with a weight vector of length `K` on every arc.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    vertex_count: usize,
    source: usize,
    sink: usize,
    k: usize,
    arcs: Vec<WeightedArc>,
    // arc indices leaving each vertex, by ascending arc id
    out: Vec<Vec<usize>>,
}

impl WeightedGraph {
    pub fn new(vertex_count: usize, source: usize, sink: usize, k: usize, arcs: Vec<WeightedArc>) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidParameter("weight vectors need at least one component".into()));
        }
        if source >= vertex_count || sink >= vertex_count {
            return Err(Error::InvalidParameter("source or sink out of range".into()));
        }
        let mut out = vec![Vec::new(); vertex_count];
        for (i, a) in arcs.iter().enumerate() {
            if a.tail >= vertex_count || a.head >= vertex_count {
                return Err(Error::InvalidParameter(format!("arc {} has an endpoint out of range", a.id)));
            }
            if a.w.len() != k {
                return Err(Error::Arity { id: a.id, got: a.w.len(), expected: k });
            }
            out[a.tail].push(i);
        }
        for list in &mut out {
            list.sort_by_key(|&i| arcs[i].id);
        }
        Ok(WeightedGraph { vertex_count, source, sink, k, arcs, out })
    }

    /// Instance topology with weights `weights(arc)`, each of length `k`.
    pub fn from_instance(inst: &Instance, k: usize, mut weights: impl FnMut(&Arc) -> Vec<u64>) -> Result<Self> {
        let index = |v: &str| inst.vertex_index(v).expect("validated instance");
        let arcs = inst
            .arcs()
            .iter()
            .map(|a| WeightedArc { id: a.id, tail: index(&a.tail), head: index(&a.head), w: weights(a) })
            .collect();
        WeightedGraph::new(inst.vertices().len(), index(inst.source()), index(inst.sink()), k, arcs)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arcs(&self) -> &[WeightedArc] {
        &self.arcs
    }

    fn arc_position(&self, id: JobId) -> Option<usize> {
        self.arcs.iter().position(|a| a.id == id)
    }

    /// Componentwise weight totals of `path`.
    pub fn path_weights(&self, path: &Path) -> Vec<u64> {
        let mut total = vec![0u64; self.k];
        for id in &path.arc_ids {
            let a = &self.arcs[self.arc_position(*id).expect("arc belongs to this graph")];
            for (t, w) in total.iter_mut().zip(&a.w) {
                *t += w;
            }
        }
        total
    }

    /// `max_k w^k(path)`.
    pub fn path_max(&self, path: &Path) -> u64 {
        self.path_weights(path).into_iter().max().unwrap_or(0)
    }

    fn to_path(&self, arc_indices: &[usize]) -> Path {
        Path::new(arc_indices.iter().map(|&i| self.arcs[i].id).collect())
    }
}

/// Dijkstra over the scalar weight `cost(arc)`; parallel arcs compete like any
/// other relaxation, and only strict improvements replace a predecessor.
pub fn shortest_path_by(g: &WeightedGraph, cost: impl Fn(&WeightedArc) -> u64) -> Result<(Path, u64)> {
    let n = g.vertex_count;
    let mut dist = vec![u64::MAX; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[g.source] = 0;
    heap.push(Reverse((0u64, g.source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        if v == g.sink {
            break;
        }
        for &i in &g.out[v] {
            let a = &g.arcs[i];
            let nd = d.saturating_add(cost(a));
            if nd < dist[a.head] {
                dist[a.head] = nd;
                pred[a.head] = Some(i);
                heap.push(Reverse((nd, a.head)));
            }
        }
    }
    if dist[g.sink] == u64::MAX {
        return Err(Error::Unreachable);
    }
    let mut arcs = Vec::new();
    let mut at = g.sink;
    while let Some(i) = pred[at] {
        arcs.push(i);
        at = g.arcs[i].tail;
    }
    arcs.reverse();
    Ok((g.to_path(&arcs), dist[g.sink]))
}

/// Classic shortest path for a single weight (`K = 1`).
pub fn dijkstra(g: &WeightedGraph) -> Result<(Path, u64)> {
    if g.k != 1 {
        return Err(Error::InvalidParameter(format!("dijkstra needs K = 1, graph has K = {}", g.k)));
    }
    shortest_path_by(g, |a| a.w[0])
}

/// All vertex-simple s-t paths in depth-first order, arcs tried by ascending id.
pub fn enumerate_simple_paths(g: &WeightedGraph, cap: usize) -> Result<Vec<Path>> {
    let mut paths = Vec::new();
    let mut on_path = vec![false; g.vertex_count];
    let mut stack = Vec::new();
    on_path[g.source] = true;
    dfs(g, g.source, &mut on_path, &mut stack, &mut paths, cap)?;
    Ok(paths)
}

fn dfs(
    g: &WeightedGraph,
    v: usize,
    on_path: &mut [bool],
    stack: &mut Vec<usize>,
    paths: &mut Vec<Path>,
    cap: usize,
) -> Result<()> {
    if v == g.sink {
        if paths.len() == cap {
            return Err(Error::PathCapExceeded { cap });
        }
        paths.push(g.to_path(stack));
        return Ok(());
    }
    for &i in &g.out[v] {
        let head = g.arcs[i].head;
        if on_path[head] {
            continue;
        }
        on_path[head] = true;
        stack.push(i);
        dfs(g, head, on_path, stack, paths, cap)?;
        stack.pop();
        on_path[head] = false;
    }
    Ok(())
}

/// A path together with its min-max objective value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinMaxPath {
    pub path: Path,
    pub value: u64,
}

/// Exact min-max path by enumeration; first enumerated path wins ties.
pub fn minmax_exact(g: &WeightedGraph, cap: usize) -> Result<MinMaxPath> {
    enumerate_simple_paths(g, cap)?
        .into_iter()
        .map(|path| {
            let value = g.path_max(&path);
            MinMaxPath { path, value }
        })
        .min_by_key(|c| c.value)
        .ok_or(Error::Unreachable)
}

/// Output of [`abv_minmax`], with the bracketing bounds it scaled against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxMinMax {
    pub path: Path,
    pub value: u64,
    /// `max_k` of single-weight shortest path lengths.
    pub lower_bound: u64,
    /// Min-max value of the shortest path under summed weights.
    pub upper_bound: u64,
    pub labels_created: usize,
}

#[derive(Debug, Clone)]
struct Label {
    vertex: usize,
    scaled: Vec<u128>,
    hops: usize,
    parent: Option<(usize, usize)>, // (label, arc)
}

impl Label {
    fn dominates(&self, other: &Label) -> bool {
        self.hops <= other.hops && self.scaled.iter().zip(&other.scaled).all(|(a, b)| a <= b)
    }
}

/// `(1 + eps)`-approximate min-max s-t path.
///
/// Weights are rounded down to multiples of `delta = eps * UB / (K |V|)`,
/// where `UB` is the min-max value of the shortest path under summed weights
/// (so `OPT <= UB <= K * OPT`). Labels are walks of at most `|V| - 1` arcs,
/// propagated one hop layer at a time; at every vertex except the sink a label
/// is dropped when another label has no more hops and no larger scaled
/// weight in any component. Rounding loses less than `delta` per arc, so the
/// best surviving walk is within `eps * OPT` of the optimum. The walk is then
/// stripped of cycles, which cannot increase any weight.
pub fn abv_minmax(g: &WeightedGraph, eps: Eps) -> Result<ApproxMinMax> {
    let k = g.k;
    let (sum_path, _) = shortest_path_by(g, |a| a.w.iter().sum())?;
    let upper_bound = g.path_max(&sum_path);
    let lower_bound = (0..k)
        .map(|c| shortest_path_by(g, |a| a.w[c]).map(|(_, d)| d))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    if upper_bound == 0 {
        return Ok(ApproxMinMax { path: sum_path, value: 0, lower_bound, upper_bound, labels_created: 0 });
    }

    // w_hat = floor(w / delta) = floor(w * denom * K * |V| / (numer * UB))
    let n = g.vertex_count;
    let scale_num = eps.denom() as u128 * k as u128 * n as u128;
    let scale_den = eps.numer() as u128 * upper_bound as u128;
    let scaled_arcs: Vec<Vec<u128>> =
        g.arcs.iter().map(|a| a.w.iter().map(|&w| w as u128 * scale_num / scale_den).collect()).collect();

    let mut arena = vec![Label { vertex: g.source, scaled: vec![0; k], hops: 0, parent: None }];
    let mut alive = vec![true];
    let mut live: Vec<Vec<usize>> = vec![Vec::new(); n];
    live[g.source].push(0);
    let mut at_sink = Vec::new();
    let mut frontier = vec![0usize];

    for _layer in 0..n.saturating_sub(1) {
        let mut next = Vec::new();
        for &li in &frontier {
            if !alive[li] {
                continue;
            }
            let from = arena[li].vertex;
            for &ai in &g.out[from] {
                let arc = &g.arcs[ai];
                let scaled: Vec<u128> = arena[li].scaled.iter().zip(&scaled_arcs[ai]).map(|(a, b)| a + b).collect();
                let label = Label { vertex: arc.head, scaled, hops: arena[li].hops + 1, parent: Some((li, ai)) };
                let id = arena.len();
                if arc.head == g.sink {
                    arena.push(label);
                    alive.push(true);
                    at_sink.push(id);
                    continue;
                }
                let bucket = &mut live[arc.head];
                if bucket.iter().any(|&o| arena[o].dominates(&label)) {
                    continue;
                }
                bucket.retain(|&o| {
                    let keep = !label.dominates(&arena[o]);
                    if !keep {
                        alive[o] = false;
                    }
                    keep
                });
                bucket.push(id);
                arena.push(label);
                alive.push(true);
                next.push(id);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    let walk_of = |mut li: usize| {
        let mut arcs = Vec::with_capacity(arena[li].hops);
        while let Some((parent, ai)) = arena[li].parent {
            arcs.push(ai);
            li = parent;
        }
        arcs.reverse();
        arcs
    };

    let best = at_sink
        .iter()
        .map(|&li| {
            let walk = walk_of(li);
            let simple = remove_cycles(g, &walk);
            let path = g.to_path(&simple);
            let value = g.path_max(&path);
            (value, li, walk, path)
        })
        .min_by(|x, y| {
            let (lx, ly) = (&arena[x.1], &arena[y.1]);
            x.0.cmp(&y.0)
                .then_with(|| lx.scaled.cmp(&ly.scaled))
                .then_with(|| lx.hops.cmp(&ly.hops))
                .then_with(|| compare_ids(g, &x.2, &y.2))
        })
        .ok_or(Error::Unreachable)?;

    Ok(ApproxMinMax { path: best.3, value: best.0, lower_bound, upper_bound, labels_created: arena.len() })
}

fn compare_ids(g: &WeightedGraph, a: &[usize], b: &[usize]) -> Ordering {
    let ids = |w: &[usize]| w.iter().map(|&i| g.arcs[i].id).collect::<Vec<_>>();
    ids(a).cmp(&ids(b))
}

/// Drops every closed sub-walk so that no vertex repeats.
fn remove_cycles(g: &WeightedGraph, walk: &[usize]) -> Vec<usize> {
    let mut position: Vec<Option<usize>> = vec![None; g.vertex_count];
    let mut vertices = vec![g.source];
    let mut arcs: Vec<usize> = Vec::with_capacity(walk.len());
    position[g.source] = Some(0);
    for &ai in walk {
        let head = g.arcs[ai].head;
        if let Some(p) = position[head] {
            for v in vertices.drain(p + 1..) {
                position[v] = None;
            }
            arcs.truncate(p);
        } else {
            arcs.push(ai);
            vertices.push(head);
            position[head] = Some(vertices.len() - 1);
        }
    }
    arcs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, k: usize, arcs: &[(u32, usize, usize, &[u64])]) -> WeightedGraph {
        let arcs = arcs.iter().map(|&(id, tail, head, w)| WeightedArc { id: JobId(id), tail, head, w: w.to_vec() }).collect();
        WeightedGraph::new(n, 0, n - 1, k, arcs).unwrap()
    }

    fn ids(p: &Path) -> Vec<u32> {
        p.arc_ids.iter().map(|a| a.0).collect()
    }

    #[test]
    fn dijkstra_examples() {
        let g = graph(2, 1, &[(1, 0, 1, &[5]), (2, 0, 1, &[3])]);
        let (p, d) = dijkstra(&g).unwrap();
        assert_eq!((ids(&p), d), (vec![2], 3));
        let g = graph(3, 1, &[(1, 0, 1, &[1]), (2, 1, 2, &[1]), (3, 0, 2, &[3])]);
        let (p, d) = dijkstra(&g).unwrap();
        assert_eq!((ids(&p), d), (vec![1, 2], 2));
        let g = graph(3, 1, &[(1, 0, 1, &[1])]);
        assert!(matches!(dijkstra(&g), Err(Error::Unreachable)));
    }

    #[test]
    fn enumeration_examples() {
        // three stages of two parallel arcs
        let mut arcs = Vec::new();
        for k in 0..3usize {
            arcs.push((2 * k as u32 + 1, k, k + 1, &[1u64][..]));
            arcs.push((2 * k as u32 + 2, k, k + 1, &[1u64][..]));
        }
        let g = graph(4, 1, &arcs);
        let paths = enumerate_simple_paths(&g, 100).unwrap();
        assert_eq!(paths.len(), 8);
        assert_eq!(ids(&paths[0]), vec![1, 3, 5]);
        assert_eq!(ids(&paths[7]), vec![2, 4, 6]);
        assert!(matches!(enumerate_simple_paths(&g, 7), Err(Error::PathCapExceeded { cap: 7 })));

        assert_eq!(enumerate_simple_paths(&graph(2, 1, &[(1, 0, 1, &[0])]), 10).unwrap().len(), 1);
        assert!(enumerate_simple_paths(&graph(3, 1, &[(1, 0, 1, &[0])]), 10).unwrap().is_empty());
    }

    #[test]
    fn minmax_exact_examples() {
        let g = graph(2, 2, &[(1, 0, 1, &[3, 1]), (2, 0, 1, &[2, 2])]);
        let best = minmax_exact(&g, 10).unwrap();
        assert_eq!((ids(&best.path), best.value), (vec![2], 2));
        let g = graph(3, 2, &[(1, 0, 1, &[3, 1]), (2, 1, 2, &[0, 4])]);
        assert_eq!(minmax_exact(&g, 10).unwrap().value, 5);
        assert!(matches!(minmax_exact(&graph(3, 2, &[]), 10), Err(Error::Unreachable)));
    }

    #[test]
    fn abv_small_cases() {
        let eps = Eps::new(1, 10).unwrap();
        let g = graph(2, 2, &[(1, 0, 1, &[3, 1]), (2, 0, 1, &[2, 2])]);
        let r = abv_minmax(&g, eps).unwrap();
        assert_eq!(r.value, 2);
        assert!(r.lower_bound <= r.value && r.value <= r.upper_bound);

        let zeros = graph(3, 2, &[(1, 0, 1, &[0, 0]), (2, 1, 2, &[0, 0]), (3, 0, 2, &[0, 0])]);
        assert_eq!(abv_minmax(&zeros, eps).unwrap().value, 0);

        let k1 = graph(3, 1, &[(1, 0, 1, &[1]), (2, 1, 2, &[1]), (3, 0, 2, &[3])]);
        assert_eq!(abv_minmax(&k1, eps).unwrap().value, 2);
        assert!(matches!(abv_minmax(&graph(3, 2, &[(1, 0, 1, &[1, 1])]), eps), Err(Error::Unreachable)));
    }

    #[test]
    fn abv_with_huge_eps_still_returns_a_path() {
        let g = graph(4, 2, &[(1, 0, 1, &[4, 0]), (2, 1, 3, &[4, 0]), (3, 0, 2, &[0, 3]), (4, 2, 3, &[3, 0]), (5, 2, 1, &[0, 0])]);
        let r = abv_minmax(&g, Eps::new(1000, 1).unwrap()).unwrap();
        assert!(!r.path.is_empty());
        assert!(enumerate_simple_paths(&g, 100).unwrap().contains(&r.path));
    }

    #[test]
    fn cycles_are_removed() {
        // 0 -> 1 -> 2 -> 1 -> 3
        let g = graph(4, 1, &[(1, 0, 1, &[1]), (2, 1, 2, &[1]), (3, 2, 1, &[1]), (4, 1, 3, &[1])]);
        assert_eq!(remove_cycles(&g, &[0, 1, 2, 3]), vec![0, 3]);
        assert_eq!(remove_cycles(&g, &[0, 3]), vec![0, 3]);
    }
}
