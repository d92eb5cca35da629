//! Bottleneck distance between persistence diagrams.
//!
//! Intervals that never die can only be matched to each other, so they are
//! handled by sorting births. The finite part is an exact search over the
//! finite set of realisable costs, testing each threshold for a perfect
//! matching in the bipartite graph where every point also owns a copy of
//! the diagonal.

use std::collections::VecDeque;

use crate::ph::PersistenceDiagram;

/// `l^inf` distance between two intervals, with `inf - inf = 0`.
pub fn matched_cost(p: (f64, f64), q: (f64, f64)) -> f64 {
    let birth = (p.0 - q.0).abs();
    let death = match (p.1.is_infinite(), q.1.is_infinite()) {
        (true, true) => 0.0,
        (false, false) => (p.1 - q.1).abs(),
        _ => f64::INFINITY,
    };
    birth.max(death)
}

/// Cost of leaving an interval unmatched: half its length.
pub fn diagonal_cost(p: (f64, f64)) -> f64 {
    if p.1.is_infinite() {
        f64::INFINITY
    } else {
        (p.1 - p.0).abs() / 2.0
    }
}

/// Finite points of two diagrams and a candidate cost.
#[derive(Debug, Clone)]
pub struct MatchingInstance<'a> {
    pub left: &'a [(f64, f64)],
    pub right: &'a [(f64, f64)],
    pub threshold: f64,
}

impl MatchingInstance<'_> {
    /// Whether a partial matching of cost at most `threshold` exists.
    ///
    /// Left vertices are `left[i]` followed by one diagonal copy per
    /// `right[j]`; right vertices are `right[j]` followed by one diagonal copy
    /// per `left[i]`. A perfect matching in this graph is exactly a partial
    /// matching with every unmatched point sent to the diagonal.
    pub fn feasible(&self) -> bool {
        let (a, b) = (self.left.len(), self.right.len());
        let t = self.threshold;
        let mut adj: Vec<Vec<usize>> = Vec::with_capacity(a + b);
        for &p in self.left {
            let mut row: Vec<usize> = (0..b)
                .filter(|&j| matched_cost(p, self.right[j]) <= t)
                .collect();
            if diagonal_cost(p) <= t {
                row.push(b + adj.len());
            }
            adj.push(row);
        }
        for (j, &q) in self.right.iter().enumerate() {
            let mut row = Vec::with_capacity(a + 1);
            if diagonal_cost(q) <= t {
                row.push(j);
            }
            row.extend(b..b + a);
            adj.push(row);
        }
        hopcroft_karp(&adj, a + b) == a + b
    }
}

/// Size of a maximum matching; `adj[u]` lists right neighbours of left `u`.
fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> usize {
    const NONE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![NONE; n_left];
    let mut match_r = vec![NONE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;
    loop {
        // layer free left vertices by BFS
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = NONE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NONE {
                    found = true;
                } else if dist[w] == NONE {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return size;
        }
        // vertex-disjoint shortest augmenting paths, iterative DFS
        let mut next = vec![0usize; n_left];
        for root in 0..n_left {
            if match_l[root] != NONE {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&u) = stack.last() {
                if next[u] == adj[u].len() {
                    dist[u] = NONE;
                    stack.pop();
                    continue;
                }
                let v = adj[u][next[u]];
                next[u] += 1;
                let w = match_r[v];
                if w == NONE {
                    // augment along the stack
                    let mut v = v;
                    while let Some(u) = stack.pop() {
                        let prev = match_l[u];
                        match_l[u] = v;
                        match_r[v] = u;
                        v = prev;
                    }
                    size += 1;
                    break;
                } else if dist[w] != NONE && dist[w] == dist[u] + 1 {
                    stack.push(w);
                }
            }
        }
    }
}

/// Minimal max-gap pairing of two multisets of births (sorted order is
/// optimal on the line). `None` when the counts differ.
fn essential_cost(p: &[f64], q: &[f64]) -> Option<f64> {
    if p.len() != q.len() {
        return None;
    }
    let mut p = p.to_vec();
    let mut q = q.to_vec();
    p.sort_by(f64::total_cmp);
    q.sort_by(f64::total_cmp);
    Some(
        p.iter()
            .zip(&q)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max),
    )
}

/// Exact bottleneck distance between two diagrams of the same degree.
/// Returns `f64::INFINITY` when the numbers of infinite intervals differ.
pub fn bottleneck_distance(p: &PersistenceDiagram, q: &PersistenceDiagram) -> f64 {
    let Some(inf_cost) = essential_cost(&p.infinite_births(), &q.infinite_births()) else {
        return f64::INFINITY;
    };
    let left: Vec<(f64, f64)> = p.finite().collect();
    let right: Vec<(f64, f64)> = q.finite().collect();
    inf_cost.max(finite_bottleneck(&left, &right))
}

fn finite_bottleneck(left: &[(f64, f64)], right: &[(f64, f64)]) -> f64 {
    if left.is_empty() && right.is_empty() {
        return 0.0;
    }
    let mut candidates: Vec<f64> =
        Vec::with_capacity(left.len() * right.len() + left.len() + right.len());
    for &p in left {
        candidates.push(diagonal_cost(p));
        for &q in right {
            candidates.push(matched_cost(p, q));
        }
    }
    candidates.extend(right.iter().map(|&q| diagonal_cost(q)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    // matching everything to the diagonal is always possible at the largest
    // diagonal cost, so the last candidate is feasible
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if (MatchingInstance {
            left,
            right,
            threshold: candidates[mid],
        })
        .feasible()
        {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Per-degree bottleneck distances and their maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramSetDistance {
    pub per_degree: Vec<f64>,
    pub max: f64,
}

/// Bottleneck distance degree by degree; a degree missing on one side is
/// compared against an empty diagram.
pub fn diagram_set_distance(
    ps: &[PersistenceDiagram],
    qs: &[PersistenceDiagram],
) -> DiagramSetDistance {
    let top = ps.iter().chain(qs).map(|d| d.degree + 1).max().unwrap_or(0);
    let find = |set: &[PersistenceDiagram], k: usize| {
        set.iter()
            .find(|d| d.degree == k)
            .cloned()
            .unwrap_or_else(|| PersistenceDiagram::empty(k))
    };
    let per_degree: Vec<f64> = (0..top)
        .map(|k| bottleneck_distance(&find(ps, k), &find(qs, k)))
        .collect();
    let max = per_degree.iter().copied().fold(0.0, f64::max);
    DiagramSetDistance { per_degree, max }
}
