//! Weighted undirected graphs and the shortest-path machinery every scheme
//! is built on: restricted Dijkstra, components, balls, boundaries, path
//! nets and cluster diameters.
//!
//! All "restricted" operations act on the induced subgraph `G[restrict]`.
//! Distance-versus-radius comparisons go through [`within`], which applies
//! a relative tolerance so boundary vertices at exactly the radius are
//! included deterministically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Relative tolerance used for every distance-versus-radius comparison.
pub const REL_EPS: f64 = 1e-9;

/// `d <= radius` up to the relative tolerance `REL_EPS * max(1, radius)`.
#[inline]
pub fn within(d: f64, radius: f64) -> bool {
    d <= radius + REL_EPS * radius.abs().max(1.0)
}

/// A path given as the vertex sequence from its start to its end.
pub type Path = Vec<usize>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Arc {
    to: usize,
    w: f64,
}

/// Immutable weighted undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<Arc>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, parallel edges, out-of-range
    /// endpoints and negative or non-finite weights. Edge order is kept;
    /// adjacency lists are sorted by neighbor id.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut adj: Vec<Vec<Arc>> = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge {{{u}, {v}}} has an endpoint >= {n}")));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop at vertex {u}")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Graph(format!("edge {{{u}, {v}}} has invalid weight {w}")));
            }
            adj[u].push(Arc { to: v, w });
            adj[v].push(Arc { to: u, w });
            list.push(Edge { u, v, w });
        }
        for (u, arcs) in adj.iter_mut().enumerate() {
            arcs.sort_by_key(|a| a.to);
            if let Some(pair) = arcs.windows(2).find(|p| p[0].to == p[1].to) {
                return Err(Error::Graph(format!("duplicate edge {{{u}, {}}}", pair[0].to)));
            }
        }
        Ok(Graph { n, edges: list, adj })
    }

    /// Unit-weight convenience constructor.
    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Neighbors of `v` with edge weights, in increasing neighbor id.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[v].iter().map(|a| (a.to, a.w))
    }

    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let arcs = self.adj.get(u)?;
        arcs.binary_search_by_key(&v, |a| a.to).ok().map(|i| arcs[i].w)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_weight(u, v).is_some()
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }
}

/// A subset of a graph's vertex universe.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSet {
    mask: Vec<bool>,
    len: usize,
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet {
            mask: vec![false; universe],
            len: 0,
        }
    }

    pub fn full(universe: usize) -> Self {
        VertexSet {
            mask: vec![true; universe],
            len: universe,
        }
    }

    /// Panics if a vertex is outside the universe.
    pub fn from_vertices(universe: usize, vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    /// Returns true if `v` was not already present.
    pub fn insert(&mut self, v: usize) -> bool {
        let fresh = !self.mask[v];
        if fresh {
            self.mask[v] = true;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, v: usize) -> bool {
        let present = self.contains(v);
        if present {
            self.mask[v] = false;
            self.len -= 1;
        }
        present
    }

    /// Members in increasing id.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(v, _)| v)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.iter().any(|v| other.contains(v))
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for v in other.iter() {
            self.insert(v);
        }
    }

    pub fn subtract(&mut self, other: &VertexSet) {
        for v in other.iter() {
            self.remove(v);
        }
    }
}

/// Shortest-path distances from a source set, with a parent forest.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    dist: Vec<f64>,
    parent: Vec<Option<usize>>,
}

impl DistanceMap {
    /// `None` if unreachable.
    pub fn distance(&self, v: usize) -> Option<f64> {
        let d = self.dist[v];
        d.is_finite().then_some(d)
    }

    /// Raw distance, `f64::INFINITY` when unreachable.
    pub fn raw(&self, v: usize) -> f64 {
        self.dist[v]
    }

    pub fn is_reachable(&self, v: usize) -> bool {
        self.dist[v].is_finite()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// The tree path from the source that reaches `v`, source first.
    pub fn path_to(&self, v: usize) -> Option<Path> {
        if !self.is_reachable(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    d: f64,
    v: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (d, v)
        other
            .d
            .total_cmp(&self.d)
            .then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-source Dijkstra on the subgraph induced by `alive`. Vertices
/// farther than `limit` (up to tolerance) are left unreachable. Parent ties
/// go to the smallest vertex id.
pub(crate) fn dijkstra_by<F>(
    g: &Graph,
    sources: impl IntoIterator<Item = usize>,
    alive: F,
    limit: f64,
) -> DistanceMap
where
    F: Fn(usize) -> bool,
{
    let n = g.n;
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for s in sources {
        if dist[s] != 0.0 {
            dist[s] = 0.0;
            heap.push(HeapEntry { d: 0.0, v: s });
        }
    }
    while let Some(HeapEntry { d, v }) = heap.pop() {
        if done[v] || d > dist[v] {
            continue;
        }
        done[v] = true;
        for a in &g.adj[v] {
            let u = a.to;
            if done[u] || !alive(u) {
                continue;
            }
            let nd = d + a.w;
            if !within(nd, limit) {
                continue;
            }
            if nd < dist[u] {
                dist[u] = nd;
                parent[u] = Some(v);
                heap.push(HeapEntry { d: nd, v: u });
            } else if nd == dist[u] && parent[u].is_some_and(|p| v < p) {
                parent[u] = Some(v);
            }
        }
    }
    DistanceMap { dist, parent }
}

fn check_universe(g: &Graph, s: &VertexSet, what: &str) -> Result<()> {
    if s.universe() != g.n {
        return Err(Error::arg(format!(
            "{what} has universe {} but the graph has {} vertices",
            s.universe(),
            g.n
        )));
    }
    Ok(())
}

/// Exact multi-source shortest paths inside `G[restrict]`.
pub fn shortest_paths(g: &Graph, sources: &VertexSet, restrict: &VertexSet) -> Result<DistanceMap> {
    check_universe(g, sources, "source set")?;
    check_universe(g, restrict, "restrict set")?;
    if let Some(s) = sources.iter().find(|&s| !restrict.contains(s)) {
        return Err(Error::arg(format!("source {s} lies outside the restrict set")));
    }
    Ok(dijkstra_by(g, sources.iter(), |v| restrict.contains(v), f64::INFINITY))
}

/// Maximal connected sets of `G[restrict]`, ordered by smallest member.
pub fn connected_components(g: &Graph, restrict: &VertexSet) -> Vec<VertexSet> {
    components_by(g, restrict.iter(), |v| restrict.contains(v))
        .into_iter()
        .map(|c| VertexSet::from_vertices(g.n, c))
        .collect()
}

/// Components as sorted member lists; `order` must be increasing.
pub(crate) fn components_by<F>(
    g: &Graph,
    order: impl IntoIterator<Item = usize>,
    alive: F,
) -> Vec<Vec<usize>>
where
    F: Fn(usize) -> bool,
{
    let mut seen = vec![false; g.n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in order {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for a in &g.adj[v] {
                if !seen[a.to] && alive(a.to) {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// The component of `G[alive]` containing `start`, sorted.
pub(crate) fn component_of<F>(g: &Graph, start: usize, alive: F) -> Vec<usize>
where
    F: Fn(usize) -> bool,
{
    components_by(g, [start], alive).pop().unwrap_or_default()
}

/// `B(center_set, radius)` measured in `G[restrict]`.
pub fn ball(
    g: &Graph,
    center_set: &VertexSet,
    radius: f64,
    restrict: &VertexSet,
) -> Result<VertexSet> {
    if !(radius >= 0.0) {
        return Err(Error::arg(format!("ball radius must be >= 0, got {radius}")));
    }
    check_universe(g, center_set, "center set")?;
    check_universe(g, restrict, "restrict set")?;
    if let Some(s) = center_set.iter().find(|&s| !restrict.contains(s)) {
        return Err(Error::arg(format!("center {s} lies outside the restrict set")));
    }
    let dm = dijkstra_by(g, center_set.iter(), |v| restrict.contains(v), radius);
    Ok(VertexSet::from_vertices(
        g.n,
        restrict.iter().filter(|&v| dm.is_reachable(v)),
    ))
}

/// Ball members as a sorted list, for the algorithms' inner loops.
pub(crate) fn ball_by<F>(
    g: &Graph,
    centers: impl IntoIterator<Item = usize>,
    radius: f64,
    alive: F,
) -> Vec<usize>
where
    F: Fn(usize) -> bool,
{
    let dm = dijkstra_by(g, centers, alive, radius);
    (0..g.n).filter(|&v| dm.is_reachable(v)).collect()
}

/// Vertices of `restrict ∖ s` adjacent to some vertex of `s`.
pub fn boundary_neighbors(g: &Graph, s: &VertexSet, restrict: &VertexSet) -> VertexSet {
    let mut out = VertexSet::empty(g.n);
    for v in s.iter() {
        for a in &g.adj[v] {
            if restrict.contains(a.to) && !s.contains(a.to) {
                out.insert(a.to);
            }
        }
    }
    out
}

/// Greedy per-path net: walking each path from its start, a vertex is
/// selected whenever the path distance accumulated since the last selected
/// vertex reaches `spacing`. Repeated vertices (shared prefixes) are kept
/// once, at their first occurrence.
pub fn net_on_paths(
    g: &Graph,
    paths: &[Path],
    spacing: f64,
    restrict: &VertexSet,
) -> Result<Vec<usize>> {
    if !(spacing > 0.0) {
        return Err(Error::arg(format!("net spacing must be > 0, got {spacing}")));
    }
    let mut picked = VertexSet::empty(g.n);
    let mut out = Vec::new();
    for path in paths {
        let Some(&start) = path.first() else { continue };
        for &v in path {
            if !restrict.contains(v) {
                return Err(Error::arg(format!("path vertex {v} outside restrict set")));
            }
        }
        if picked.insert(start) {
            out.push(start);
        }
        let mut acc = 0.0;
        for pair in path.windows(2) {
            let w = g.edge_weight(pair[0], pair[1]).ok_or_else(|| {
                Error::arg(format!("path step {} -> {} is not an edge", pair[0], pair[1]))
            })?;
            acc += w;
            if within(spacing, acc) {
                acc = 0.0;
                if picked.insert(pair[1]) {
                    out.push(pair[1]);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterMode {
    /// Pairwise distances measured in the whole graph.
    Weak,
    /// Pairwise distances measured inside the cluster's induced subgraph.
    Strong,
}

/// Maximum pairwise distance over `c`; infinite if some pair is
/// disconnected in the metric being used.
pub fn cluster_diameter(g: &Graph, c: &VertexSet, mode: DiameterMode) -> Result<f64> {
    check_universe(g, c, "cluster")?;
    if c.is_empty() {
        return Err(Error::arg("diameter of an empty set"));
    }
    let members = c.to_vec();
    Ok(diameter_of(g, &members, mode))
}

pub(crate) fn diameter_of(g: &Graph, members: &[usize], mode: DiameterMode) -> f64 {
    let mut inside = vec![false; g.n];
    for &v in members {
        inside[v] = true;
    }
    let mut best: f64 = 0.0;
    for &x in members {
        let dm = match mode {
            DiameterMode::Weak => dijkstra_by(g, [x], |_| true, f64::INFINITY),
            DiameterMode::Strong => dijkstra_by(g, [x], |v| inside[v], f64::INFINITY),
        };
        for &y in members {
            best = best.max(dm.raw(y));
        }
        if best.is_infinite() {
            break;
        }
    }
    best
}
