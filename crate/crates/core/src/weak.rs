//! Weak-diameter padded partition for `K_{r+1}`-minor-free graphs.
//!
//! Phase one repeatedly takes the residual component with the smallest
//! vertex, grows a shortest-path tree from that vertex to the nearest
//! boundary vertex of every adjacent supernode, and removes a random
//! `Texp[0, 1/8](16r)` neighborhood of the tree as a new supernode.
//!
//! Phase two walks the supernodes in creation order, places a `Δ/8` net
//! on each tree path and carves balls of radius `α·Δ`,
//! `α ~ Texp[1/4, 1/2](20r)`, inside the residual graph the supernode was
//! created in. Covered vertices are never reassigned.

use log::warn;

use crate::error::{Error, Result};
use crate::graph::{ball_by, component_of, dijkstra_by, net_on_paths, Graph, Path, VertexSet};
use crate::partition::{ClusterKind, ClusterMeta, Partition, PartitionBuilder, Scheme};
use crate::sampling::{RandomStream, TexpParams};
use crate::trace::{
    ComponentEvent, DecompositionTrace, NetPointEvent, Process, Record, Removal, SkeletonEvent,
    SupernodeRecord,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakParams {
    pub delta: f64,
    pub r: usize,
    pub buffer_dist: TexpParams,
    pub ball_dist: TexpParams,
}

impl WeakParams {
    pub fn new(delta: f64, r: usize) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::arg(format!("delta must be positive, got {delta}")));
        }
        if r < 1 {
            return Err(Error::arg("r must be at least 1"));
        }
        let r_f = r as f64;
        Ok(WeakParams {
            delta,
            r,
            buffer_dist: TexpParams::new(0.0, 0.125, 16.0 * r_f)?,
            ball_dist: TexpParams::new(0.25, 0.5, 20.0 * r_f)?,
        })
    }
}

/// Shortest paths in `G[component]` from `root` to the nearest vertex of
/// `N(S) ∩ component` for each listed supernode `S`, nearest ties going to
/// the smallest id. With no supernodes the tree is the root alone.
pub fn build_skeleton_tree(
    g: &Graph,
    component: &VertexSet,
    supernodes_adjacent: &[VertexSet],
    root: usize,
) -> Result<Vec<Path>> {
    if !component.contains(root) {
        return Err(Error::arg(format!("root {root} is not in the component")));
    }
    let targets: Vec<Vec<usize>> = supernodes_adjacent
        .iter()
        .map(|s| {
            component
                .iter()
                .filter(|&v| !s.contains(v) && g.neighbors(v).any(|(u, _)| s.contains(u)))
                .collect()
        })
        .collect();
    skeleton_tree(g, |v| component.contains(v), &targets, root)
}

fn skeleton_tree<F>(g: &Graph, inside: F, targets: &[Vec<usize>], root: usize) -> Result<Vec<Path>>
where
    F: Fn(usize) -> bool,
{
    if targets.is_empty() {
        return Ok(vec![vec![root]]);
    }
    let dm = dijkstra_by(g, [root], inside, f64::INFINITY);
    targets
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let best = t
                .iter()
                .copied()
                .filter(|&v| dm.is_reachable(v))
                .min_by(|&a, &b| dm.raw(a).total_cmp(&dm.raw(b)).then(a.cmp(&b)))
                .ok_or_else(|| {
                    Error::Invariant(format!("adjacent supernode #{k} has no boundary vertex in the component"))
                })?;
            Ok(dm.path_to(best).expect("reachable"))
        })
        .collect()
}

struct Supernode {
    tree: Vec<Path>,
    component: Vec<usize>,
    snapshot: usize,
}

pub fn weak_random_partition(
    g: &Graph,
    p: &WeakParams,
    rng: &RandomStream,
) -> Result<(Partition, DecompositionTrace)> {
    if !(p.delta > 0.0) || p.r < 1 {
        return Err(Error::arg("weak partition needs delta > 0 and r >= 1"));
    }
    let n = g.vertex_count();
    let delta = p.delta;
    let mut trace = DecompositionTrace::new(Scheme::Weak, n, delta, p.r);
    let mut alive = vec![true; n];
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut supernodes: Vec<Supernode> = Vec::new();
    let mut buffer_rng = rng.split(0).rng();
    let mut ball_rng = rng.split(1).rng();
    let mut cursor = 0;
    let mut warned = false;

    loop {
        while cursor < n && !alive[cursor] {
            cursor += 1;
        }
        if cursor == n {
            break;
        }
        let root = cursor;
        let comp = component_of(g, root, |v| alive[v]);
        let mut in_comp = vec![false; n];
        for &v in &comp {
            in_comp[v] = true;
        }

        // adjacent supernodes and their boundary vertices inside the component
        let mut adjacent: Vec<usize> = Vec::new();
        let mut targets: Vec<Vec<usize>> = Vec::new();
        for &v in &comp {
            for (u, _) in g.neighbors(v) {
                if let Some(s) = owner[u] {
                    let slot = match adjacent.binary_search(&s) {
                        Ok(i) => i,
                        Err(i) => {
                            adjacent.insert(i, s);
                            targets.insert(i, Vec::new());
                            i
                        }
                    };
                    if targets[slot].last() != Some(&v) {
                        targets[slot].push(v);
                    }
                }
            }
        }
        let snapshot = trace.removals.len();
        if adjacent.len() > p.r && !warned {
            warn!(
                "component at vertex {root} sees {} supernodes > r = {}; the input is not K_{}-free and padding guarantees do not hold",
                adjacent.len(),
                p.r,
                p.r + 1
            );
            warned = true;
        }
        trace.components.push(ComponentEvent {
            snapshot,
            vertices: comp.clone(),
            adjacent: adjacent.clone(),
        });

        let tree = skeleton_tree(g, |v| in_comp[v], &targets, root)?;
        let mut tree_vertices: Vec<usize> = tree.iter().flatten().copied().collect();
        tree_vertices.sort_unstable();
        tree_vertices.dedup();

        let radius = p.buffer_dist.sample(&mut buffer_rng);
        let buffer = ball_by(g, tree_vertices.iter().copied(), radius * delta, |v| in_comp[v]);
        let id = supernodes.len();
        let event = trace.skeletons.len();
        trace.skeletons.push(SkeletonEvent {
            process: Process::Threatening,
            snapshot,
            skeleton: tree_vertices,
            radius,
            law: p.buffer_dist,
            buffer: buffer.clone(),
        });
        trace.records.push(Record::Supernode(SupernodeRecord {
            id,
            root,
            tree: tree.clone(),
            radius,
            buffer: buffer.clone(),
            component: comp.clone(),
            skeleton_event: event,
        }));
        for &v in &buffer {
            alive[v] = false;
            owner[v] = Some(id);
        }
        trace.removals.push(Removal {
            supernode: id,
            vertices: buffer,
        });
        supernodes.push(Supernode {
            tree,
            component: comp,
            snapshot,
        });
    }

    let part = create_balls(g, p, &supernodes, &mut ball_rng, &mut trace)?;
    Ok((part, trace))
}

fn create_balls(
    g: &Graph,
    p: &WeakParams,
    supernodes: &[Supernode],
    rng: &mut crate::sampling::StreamRng,
    trace: &mut DecompositionTrace,
) -> Result<Partition> {
    let n = g.vertex_count();
    let mut builder = PartitionBuilder::new(n);
    for (i, s) in supernodes.iter().enumerate() {
        let comp = VertexSet::from_vertices(n, s.component.iter().copied());
        let net = net_on_paths(g, &s.tree, p.delta / 8.0, &comp)?;
        for v in net {
            let alpha = p.ball_dist.sample(rng);
            let ball = ball_by(g, [v], alpha * p.delta, |u| comp.contains(u));
            let fresh: Vec<usize> = ball.iter().copied().filter(|&u| !builder.is_covered(u)).collect();
            let event = trace.skeletons.len();
            let cluster = builder.add(
                fresh,
                ClusterMeta {
                    scheme: Scheme::Weak,
                    kind: ClusterKind::Ball,
                    center: v,
                    skeleton: Some(event),
                    radius: Some(alpha),
                },
            )?;
            trace.skeletons.push(SkeletonEvent {
                process: Process::Cutting,
                snapshot: s.snapshot,
                skeleton: vec![v],
                radius: alpha,
                law: p.ball_dist,
                buffer: ball,
            });
            trace.records.push(Record::NetPoint(NetPointEvent {
                supernode: i,
                vertex: v,
                alpha,
                cluster,
                skeleton_event: event,
            }));
        }
    }
    builder.finish()
}

/// The supernodes adjacent to a recorded residual component, as vertex
/// sets. By the adjacency invariant they are disjoint, connected and
/// pairwise adjacent: a `K_q` minor model.
pub fn extract_minor_witness(
    trace: &DecompositionTrace,
    component_event: usize,
) -> Result<Vec<VertexSet>> {
    let event = trace.components.get(component_event).ok_or_else(|| {
        Error::arg(format!(
            "component event {component_event} out of range ({} events)",
            trace.components.len()
        ))
    })?;
    Ok(event
        .adjacent
        .iter()
        .map(|&s| {
            VertexSet::from_vertices(
                trace.vertex_count,
                trace
                    .removals
                    .iter()
                    .filter(|r| r.supernode == s)
                    .flat_map(|r| r.vertices.iter().copied()),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cluster_diameter, DiameterMode};

    fn path_graph(n: usize) -> Graph {
        Graph::unweighted(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn grid(w: usize, h: usize) -> Graph {
        let mut e = Vec::new();
        for r in 0..h {
            for c in 0..w {
                let v = r * w + c;
                if c + 1 < w {
                    e.push((v, v + 1));
                }
                if r + 1 < h {
                    e.push((v, v + w));
                }
            }
        }
        Graph::unweighted(w * h, e).unwrap()
    }

    fn all_pairs(g: &Graph) -> Vec<Vec<f64>> {
        let n = g.vertex_count();
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for (v, row) in d.iter_mut().enumerate() {
            row[v] = 0.0;
        }
        for e in g.edges() {
            d[e.u][e.v] = e.w;
            d[e.v][e.u] = e.w;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }

    #[test]
    fn params_match_the_two_laws() {
        let p = WeakParams::new(8.0, 4).unwrap();
        assert_eq!(p.buffer_dist, TexpParams::new(0.0, 0.125, 64.0).unwrap());
        assert_eq!(p.ball_dist, TexpParams::new(0.25, 0.5, 80.0).unwrap());
        assert!(WeakParams::new(0.0, 4).is_err());
        assert!(WeakParams::new(8.0, 0).is_err());
    }

    #[test]
    fn skeleton_tree_examples() {
        let g = path_graph(4);
        let comp = VertexSet::from_vertices(4, [1, 2, 3]);
        assert_eq!(build_skeleton_tree(&g, &comp, &[], 3).unwrap(), vec![vec![3]]);
        let s = VertexSet::from_vertices(4, [0]);
        assert_eq!(build_skeleton_tree(&g, &comp, &[s], 3).unwrap(), vec![vec![3, 2, 1]]);

        // supernodes at both ends of a 7-vertex path; root in the middle
        let g = path_graph(7);
        let comp = VertexSet::from_vertices(7, 1..6);
        let left = VertexSet::from_vertices(7, [0]);
        let right = VertexSet::from_vertices(7, [6]);
        let tree = build_skeleton_tree(&g, &comp, &[left, right], 3).unwrap();
        assert_eq!(tree, vec![vec![3, 2, 1], vec![3, 4, 5]]);

        let far = VertexSet::from_vertices(7, [6]);
        let comp = VertexSet::from_vertices(7, [0, 1, 2]);
        assert!(matches!(
            build_skeleton_tree(&g, &comp, &[far], 0),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn single_vertex() {
        let g = Graph::unweighted(1, []).unwrap();
        let (p, _) = weak_random_partition(&g, &WeakParams::new(1.0, 1).unwrap(), &RandomStream::new(0)).unwrap();
        assert_eq!(p.cluster_count(), 1);
    }

    #[test]
    fn small_diameter_graph_is_one_cluster() {
        // diameter 2 <= delta/4
        let g = grid(2, 2);
        for seed in 0..20 {
            let (p, _) = weak_random_partition(&g, &WeakParams::new(8.0, 4).unwrap(), &RandomStream::new(seed)).unwrap();
            assert_eq!(p.cluster_count(), 1);
        }
    }

    #[test]
    fn grid_clusters_have_weak_diameter_at_most_delta() {
        let g = grid(10, 10);
        let apsp = all_pairs(&g);
        let params = WeakParams::new(8.0, 4).unwrap();
        for seed in 0..5 {
            let (p, trace) = weak_random_partition(&g, &params, &RandomStream::new(seed)).unwrap();
            p.validate().unwrap();
            for c in p.clusters() {
                let diam = c
                    .iter()
                    .flat_map(|&a| c.iter().map(move |&b| (a, b)))
                    .map(|(a, b)| apsp[a][b])
                    .fold(0.0, f64::max);
                assert!(diam <= 8.0, "seed {seed}: diameter {diam}");
                let set = VertexSet::from_vertices(100, c.iter().copied());
                assert_eq!(cluster_diameter(&g, &set, DiameterMode::Weak).unwrap(), diam);
            }
            // planar: every component sees at most 4 supernodes
            assert!(trace.components.iter().all(|c| c.adjacent.len() <= 4));
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let g = grid(8, 8);
        let params = WeakParams::new(6.0, 4).unwrap();
        let a = weak_random_partition(&g, &params, &RandomStream::new(9)).unwrap();
        let b = weak_random_partition(&g, &params, &RandomStream::new(9)).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    fn is_minor_model(g: &Graph, sets: &[VertexSet]) -> bool {
        for (i, a) in sets.iter().enumerate() {
            if a.is_empty() || cluster_diameter(g, a, DiameterMode::Strong).unwrap().is_infinite() {
                return false;
            }
            for b in &sets[i + 1..] {
                if a.intersects(b) {
                    return false;
                }
                let touch = g.edges().iter().any(|e| {
                    (a.contains(e.u) && b.contains(e.v)) || (a.contains(e.v) && b.contains(e.u))
                });
                if !touch {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn minor_witness_on_k5() {
        let k5 = Graph::unweighted(5, (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v)))).unwrap();
        let (p, trace) = weak_random_partition(&k5, &WeakParams::new(8.0, 3).unwrap(), &RandomStream::new(1)).unwrap();
        p.validate().unwrap();
        let (idx, ev) = trace
            .components
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| c.adjacent.len())
            .unwrap();
        assert!(ev.adjacent.len() >= 4);
        let model = extract_minor_witness(&trace, idx).unwrap();
        assert_eq!(model.len(), ev.adjacent.len());
        assert!(is_minor_model(&k5, &model));

        // q = 1 and q = 2 events
        for (i, c) in trace.components.iter().enumerate() {
            if let 1..=2 = c.adjacent.len() {
                assert!(is_minor_model(&k5, &extract_minor_witness(&trace, i).unwrap()));
            }
        }
        assert!(extract_minor_witness(&trace, trace.components.len()).is_err());
    }

    #[test]
    fn buffers_lie_within_an_eighth_of_the_tree() {
        let g = grid(12, 12);
        let params = WeakParams::new(16.0, 4).unwrap();
        let (_, trace) = weak_random_partition(&g, &params, &RandomStream::new(4)).unwrap();
        for s in trace.supernodes() {
            let comp = VertexSet::from_vertices(144, s.component.iter().copied());
            let tree: Vec<usize> = s.tree.iter().flatten().copied().collect();
            let dm = dijkstra_by(&g, tree, |v| comp.contains(v), f64::INFINITY);
            for &v in &s.buffer {
                assert!(crate::graph::within(dm.raw(v), 2.0));
            }
        }
    }
}
