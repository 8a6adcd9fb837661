//! Strong-diameter padded partition for graphs of bounded treewidth.
//!
//! Vertices are visited by the height of their highest bag in a rooted
//! tree decomposition. A vertex still present is the center of a ball of
//! radius `R·Δ`, `R ~ Texp[0, 1/2](8r)` with `r = width + 1`, carved in the
//! residual graph.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::carve::Carving;
use crate::error::{Error, Result, TdError};
use crate::graph::{ball_by, Graph};
use crate::partition::{ClusterKind, Partition, Scheme};
use crate::sampling::{RandomStream, TexpParams};
use crate::trace::{DecompositionTrace, Process, SkeletonEvent};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub tree_edges: Vec<(usize, usize)>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, tree_edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition {
            bags,
            tree_edges,
            root: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    fn tree_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        adj
    }
}

/// Checks the four tree-decomposition conditions and returns the width.
pub fn validate_tree_decomposition(g: &Graph, td: &TreeDecomposition) -> Result<usize> {
    let n = g.vertex_count();
    let k = td.bags.len();
    if k == 0 {
        return Err(TdError::NotATree("no bags".into()).into());
    }
    for (b, bag) in td.bags.iter().enumerate() {
        if let Some(&v) = bag.iter().find(|&&v| v >= n) {
            return Err(TdError::UnknownVertex { bag: b, vertex: v }.into());
        }
    }
    if td.root >= k {
        return Err(TdError::NotATree(format!("root bag {} out of range", td.root)).into());
    }
    if td.tree_edges.len() != k - 1 {
        return Err(TdError::NotATree(format!(
            "{} bags need {} tree edges, found {}",
            k,
            k - 1,
            td.tree_edges.len()
        ))
        .into());
    }
    if let Some(&(a, b)) = td.tree_edges.iter().find(|&&(a, b)| a >= k || b >= k || a == b) {
        return Err(TdError::NotATree(format!("bad tree edge ({a}, {b})")).into());
    }
    let adj = td.tree_adjacency();
    let mut seen = vec![false; k];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(b) = stack.pop() {
        for &c in &adj[b] {
            if !seen[c] {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    if let Some(b) = seen.iter().position(|s| !s) {
        return Err(TdError::NotATree(format!("bag {b} is not connected to bag 0")).into());
    }

    let mut bags_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            bags_of[v].push(b);
        }
    }
    if let Some(v) = bags_of.iter().position(Vec::is_empty) {
        return Err(TdError::UncoveredVertex(v).into());
    }
    for e in g.edges() {
        if !sorted_intersect(&bags_of[e.u], &bags_of[e.v]) {
            return Err(TdError::UncoveredEdge(e.u, e.v).into());
        }
    }
    let mut shared_edges = vec![0usize; n];
    for &(a, b) in &td.tree_edges {
        for v in sorted_common(&td.bags[a], &td.bags[b]) {
            shared_edges[v] += 1;
        }
    }
    for v in 0..n {
        if shared_edges[v] + 1 != bags_of[v].len() {
            return Err(TdError::DisconnectedSubtree(v).into());
        }
    }
    Ok(td.width())
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    sorted_common(a, b).next().is_some()
}

fn sorted_common<'a>(a: &'a [usize], b: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || {
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    return Some(a[i - 1]);
                }
            }
        }
        None
    })
}

/// Per-vertex minimum bag height and the visiting order it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightOrder {
    pub height: Vec<usize>,
    pub bag: Vec<usize>,
    pub order: Vec<usize>,
}

impl HeightOrder {
    /// Heights are BFS depths from the root bag; ties between bags of
    /// equal height go to the smaller bag id, ties in the order to the
    /// smaller vertex id.
    pub fn compute(td: &TreeDecomposition, n: usize) -> Self {
        let adj = td.tree_adjacency();
        let mut depth = vec![usize::MAX; td.bags.len()];
        let mut queue = VecDeque::from([td.root]);
        depth[td.root] = 0;
        while let Some(b) = queue.pop_front() {
            for &c in &adj[b] {
                if depth[c] == usize::MAX {
                    depth[c] = depth[b] + 1;
                    queue.push_back(c);
                }
            }
        }
        let mut height = vec![usize::MAX; n];
        let mut bag = vec![usize::MAX; n];
        for (b, members) in td.bags.iter().enumerate() {
            for &v in members {
                if depth[b] < height[v] {
                    height[v] = depth[b];
                    bag[v] = b;
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (height[v], v));
        HeightOrder { height, bag, order }
    }
}

pub fn treewidth_partition(
    g: &Graph,
    td: &TreeDecomposition,
    delta: f64,
    rng: &RandomStream,
) -> Result<(Partition, DecompositionTrace)> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg(format!("delta must be positive, got {delta}")));
    }
    let width = validate_tree_decomposition(g, td)?;
    let r = width + 1;
    let law = TexpParams::new(0.0, 0.5, 8.0 * r as f64)?;
    let order = HeightOrder::compute(td, g.vertex_count());
    let mut cv = Carving::new(g, Scheme::Treewidth, delta, r);
    let mut draws = rng.rng();
    for &v in &order.order {
        if !cv.alive[v] {
            continue;
        }
        let radius = law.sample(&mut draws);
        let ball = {
            let alive = &cv.alive;
            ball_by(g, [v], radius * delta, |u| alive[u])
        };
        let event = cv.trace.skeletons.len();
        cv.trace.skeletons.push(SkeletonEvent {
            process: Process::Both,
            snapshot: cv.snapshot(),
            skeleton: vec![v],
            radius,
            law,
            buffer: ball.clone(),
        });
        let id = cv
            .add_cluster(ball.clone(), ClusterKind::Ball, v, Some(event), Some(radius))?
            .expect("ball contains its center");
        cv.remove(id, ball);
    }
    cv.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{diameter_of, DiameterMode};

    #[test]
    fn widths() {
        let k4 = Graph::unweighted(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1, 2, 3]], vec![]);
        assert_eq!(validate_tree_decomposition(&k4, &td).unwrap(), 3);

        let p3 = Graph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        assert_eq!(validate_tree_decomposition(&p3, &td).unwrap(), 1);
    }

    #[test]
    fn validation_errors_name_the_offender() {
        let p3 = Graph::unweighted(3, [(0, 1), (1, 2)]).unwrap();
        let check = |bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>| {
            match validate_tree_decomposition(&p3, &TreeDecomposition::new(bags, edges)) {
                Err(Error::TreeDecomposition(e)) => e,
                other => panic!("expected a td error, got {other:?}"),
            }
        };
        assert_eq!(check(vec![vec![0, 1], vec![2]], vec![(0, 1)]), TdError::UncoveredEdge(1, 2));
        assert_eq!(check(vec![vec![0, 1]], vec![]), TdError::UncoveredVertex(2));
        assert_eq!(
            check(vec![vec![0, 1], vec![2], vec![1, 2]], vec![(0, 1), (1, 2)]),
            TdError::DisconnectedSubtree(1)
        );
        assert!(matches!(check(vec![vec![0, 1], vec![1, 2]], vec![]), TdError::NotATree(_)));
        assert!(matches!(
            check(vec![vec![0, 1], vec![1, 2], vec![2]], vec![(0, 1), (0, 1)]),
            TdError::NotATree(_)
        ));
        assert_eq!(
            check(vec![vec![0, 7]], vec![]),
            TdError::UnknownVertex { bag: 0, vertex: 7 }
        );
    }

    #[test]
    fn height_order_ties() {
        // bags: 0 = {2, 3}, 1 = {1, 2}, 2 = {0, 1}; chain 0 - 1 - 2
        let td = TreeDecomposition::new(vec![vec![2, 3], vec![1, 2], vec![0, 1]], vec![(0, 1), (1, 2)]);
        let h = HeightOrder::compute(&td, 4);
        assert_eq!(h.height, vec![2, 1, 0, 0]);
        assert_eq!(h.bag, vec![2, 1, 0, 0]);
        assert_eq!(h.order, vec![2, 3, 1, 0]);
    }

    #[test]
    fn star_with_large_delta_is_one_cluster() {
        let g = Graph::unweighted(6, (1..6).map(|i| (0, i))).unwrap();
        let td = TreeDecomposition::new(
            (1..6).map(|i| vec![0, i]).collect(),
            (1..5).map(|i| (0, i)).collect(),
        );
        for seed in 0..20 {
            let (part, trace) = treewidth_partition(&g, &td, 1e6, &RandomStream::new(seed)).unwrap();
            if trace.skeletons[0].radius * 1e6 >= 1.0 {
                assert_eq!(part.cluster_count(), 1);
            }
            assert_eq!(trace.skeletons[0].skeleton, vec![0]);
        }
    }

    #[test]
    fn single_vertex() {
        let g = Graph::unweighted(1, []).unwrap();
        let td = TreeDecomposition::new(vec![vec![0]], vec![]);
        let (part, _) = treewidth_partition(&g, &td, 2.0, &RandomStream::new(0)).unwrap();
        assert_eq!(part.cluster_count(), 1);
    }

    #[test]
    fn skipped_vertices_consume_no_draws() {
        let g = Graph::unweighted(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let td = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            vec![(0, 1), (1, 2)],
        );
        let stream = RandomStream::new(11);
        let (_, trace) = treewidth_partition(&g, &td, 40.0, &stream).unwrap();
        let law = TexpParams::new(0.0, 0.5, 16.0).unwrap();
        let mut rng = stream.rng();
        for ev in &trace.skeletons {
            assert_eq!(ev.radius, law.sample(&mut rng));
        }
    }

    #[test]
    fn path_partition_respects_diameter() {
        let n = 40;
        let g = Graph::unweighted(n, (1..n).map(|i| (i - 1, i))).unwrap();
        let td = TreeDecomposition::new(
            (1..n).map(|i| vec![i - 1, i]).collect(),
            (1..n - 1).map(|i| (i - 1, i)).collect(),
        );
        for seed in 0..10 {
            let (part, _) = treewidth_partition(&g, &td, 6.0, &RandomStream::new(seed)).unwrap();
            part.validate().unwrap();
            for c in part.clusters() {
                assert!(diameter_of(&g, c, DiameterMode::Strong) <= 6.0);
            }
        }
    }
}
