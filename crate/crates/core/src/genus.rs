//! Strong-diameter padded partition for graphs with a genus-`g` embedding.
//!
//! While the residual component with the smallest vertex is non-planar (in
//! the embedding inherited from the rotation system), a cycle made of two
//! shortest paths from a common root whose removal lowers the genus is
//! found; its `Texp[0, 1/4](8·ln max(g, 2))` neighborhood is carved into
//! cones and removed. Planar components are handed to the strong scheme
//! with `r = 5`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::carve::Carving;
use crate::error::{Error, Result};
use crate::graph::{ball_by, components_by, dijkstra_by, Graph, Path, VertexSet};
use crate::partition::{Partition, Scheme};
use crate::sampling::{RandomStream, TexpParams};
use crate::strong::{carve_cones, emit_cones, strong_within, StrongParams};
use crate::trace::{DecompositionTrace, GenusCycleRecord, Process, Record, SkeletonEvent};

/// Stream index under which planar components get their substreams.
pub const PLANAR_STREAM: u64 = 2;

/// `r` used for planar components (planar graphs exclude `K_6`).
pub const PLANAR_R: usize = 5;

/// Cyclic order of neighbors around every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSystem {
    order: Vec<Vec<usize>>,
}

impl RotationSystem {
    /// Checks ids, duplicates and symmetry (`u` around `v` iff `v` around `u`).
    pub fn new(order: Vec<Vec<usize>>) -> Result<Self> {
        let n = order.len();
        for (v, around) in order.iter().enumerate() {
            let mut sorted = around.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Rotation(format!("vertex {v} lists neighbor {} twice", w[0])));
            }
            for &u in around {
                if u >= n {
                    return Err(Error::Rotation(format!("vertex {v} lists unknown vertex {u}")));
                }
                if u == v {
                    return Err(Error::Rotation(format!("vertex {v} lists itself")));
                }
                if !order[u].contains(&v) {
                    return Err(Error::Rotation(format!(
                        "{u} appears around {v} but {v} does not appear around {u}"
                    )));
                }
            }
        }
        Ok(RotationSystem { order })
    }

    pub fn vertex_count(&self) -> usize {
        self.order.len()
    }

    pub fn around(&self, v: usize) -> &[usize] {
        &self.order[v]
    }

    /// Checks that the rotations list exactly the graph's edges.
    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.order.len() != g.vertex_count() {
            return Err(Error::Rotation(format!(
                "rotation has {} vertices, graph has {}",
                self.order.len(),
                g.vertex_count()
            )));
        }
        for (v, around) in self.order.iter().enumerate() {
            let mut listed = around.clone();
            listed.sort_unstable();
            let actual: Vec<usize> = g.neighbors(v).map(|(u, _)| u).collect();
            if listed != actual {
                return Err(Error::Rotation(format!(
                    "rotation at {v} lists {listed:?}, graph neighbors are {actual:?}"
                )));
            }
        }
        Ok(())
    }

    /// Vertex-keyed map, the JSON layout.
    pub fn to_map(&self) -> BTreeMap<String, Vec<usize>> {
        self.order
            .iter()
            .enumerate()
            .map(|(v, a)| (v.to_string(), a.clone()))
            .collect()
    }
}

/// Genus of every component of `G[alive]` under the inherited rotation,
/// as `(smallest vertex, genus)` pairs.
fn component_genera<F>(g: &Graph, rot: &RotationSystem, members: &[usize], alive: F) -> Vec<(usize, usize)>
where
    F: Fn(usize) -> bool + Copy,
{
    let n = g.vertex_count();
    let mut comp_of = vec![usize::MAX; n];
    let comps = components_by(g, members.iter().copied().filter(|&v| alive(v)), alive);
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut edges = vec![0usize; comps.len()];
    for e in g.edges() {
        if alive(e.u) && alive(e.v) {
            edges[comp_of[e.u]] += 1;
        }
    }
    // dart (v, k): leaving v towards the k-th alive neighbor in rotation
    let alive_rot: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            if comp_of[v] == usize::MAX {
                Vec::new()
            } else {
                rot.order[v].iter().copied().filter(|&u| alive(u)).collect()
            }
        })
        .collect();
    let mut offset = vec![0usize; n + 1];
    for v in 0..n {
        offset[v + 1] = offset[v] + alive_rot[v].len();
    }
    let mut used = vec![false; offset[n]];
    let mut faces = vec![0usize; comps.len()];
    for &v in members {
        if comp_of[v] == usize::MAX {
            continue;
        }
        for k in 0..alive_rot[v].len() {
            if used[offset[v] + k] {
                continue;
            }
            faces[comp_of[v]] += 1;
            let (mut a, mut i) = (v, k);
            while !used[offset[a] + i] {
                used[offset[a] + i] = true;
                let b = alive_rot[a][i];
                let back = alive_rot[b].iter().position(|&x| x == a).expect("symmetric rotation");
                i = (back + 1) % alive_rot[b].len();
                a = b;
            }
        }
    }
    comps
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let f = faces[i].max(1) as i64;
            let chi = c.len() as i64 - edges[i] as i64 + f;
            ((c[0]), ((2 - chi) / 2).max(0) as usize)
        })
        .collect()
}

fn max_genus<F>(g: &Graph, rot: &RotationSystem, members: &[usize], alive: F) -> usize
where
    F: Fn(usize) -> bool + Copy,
{
    component_genera(g, rot, members, alive)
        .into_iter()
        .map(|(_, k)| k)
        .max()
        .unwrap_or(0)
}

/// Maximum embedded genus over the components of `G[restrict]`.
pub fn genus_from_embedding(g: &Graph, rot: &RotationSystem, restrict: &VertexSet) -> Result<usize> {
    rot.check_graph(g)?;
    if restrict.universe() != g.vertex_count() {
        return Err(Error::arg("restrict set universe does not match the graph"));
    }
    let members = restrict.to_vec();
    Ok(max_genus(g, rot, &members, |v| restrict.contains(v)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenusCycle {
    pub root: usize,
    pub path_a: Path,
    pub path_b: Path,
    pub cycle_vertices: VertexSet,
}

impl GenusCycle {
    /// Cycle vertices in walk order: `path_a`, then `path_b` reversed,
    /// down to (excluding) the last vertex the two paths share.
    pub fn walk(&self) -> Vec<usize> {
        let shared = self
            .path_a
            .iter()
            .zip(&self.path_b)
            .take_while(|(a, b)| a == b)
            .count();
        let mut out = self.path_a.clone();
        out.extend(self.path_b[shared..].iter().rev());
        out
    }
}

fn reducing_cycle_by(
    g: &Graph,
    rot: &RotationSystem,
    component: &[usize],
    inside: &[bool],
    genus_before: usize,
) -> Result<GenusCycle> {
    let n = g.vertex_count();
    let root = *component.first().ok_or_else(|| Error::arg("empty component"))?;
    let dm = dijkstra_by(g, [root], |v| inside[v], f64::INFINITY);
    let mut mask = inside.to_vec();
    for e in g.edges() {
        if !(inside[e.u] && inside[e.v]) {
            continue;
        }
        if dm.parent(e.u) == Some(e.v) || dm.parent(e.v) == Some(e.u) {
            continue;
        }
        let path_a = dm.path_to(e.u).expect("component is connected");
        let path_b = dm.path_to(e.v).expect("component is connected");
        for &v in path_a.iter().chain(&path_b) {
            mask[v] = false;
        }
        let after = max_genus(g, rot, component, |v| mask[v]);
        for &v in path_a.iter().chain(&path_b) {
            mask[v] = true;
        }
        if after < genus_before {
            return Ok(GenusCycle {
                root,
                cycle_vertices: VertexSet::from_vertices(n, path_a.iter().chain(&path_b).copied()),
                path_a,
                path_b,
            });
        }
    }
    Err(Error::NoReducingCycle {
        root,
        genus: genus_before,
    })
}

/// First fundamental cycle of the shortest-path tree from the smallest
/// vertex whose removal lowers the component's genus.
pub fn find_reducing_cycle(g: &Graph, rot: &RotationSystem, component: &VertexSet) -> Result<GenusCycle> {
    rot.check_graph(g)?;
    let members = component.to_vec();
    let inside: Vec<bool> = (0..g.vertex_count()).map(|v| component.contains(v)).collect();
    if components_by(g, members.iter().copied(), |v| inside[v]).len() > 1 {
        return Err(Error::arg("component is not connected"));
    }
    let genus = max_genus(g, rot, &members, |v| inside[v]);
    if genus == 0 {
        return Err(Error::arg("component is planar; no reducing cycle exists"));
    }
    reducing_cycle_by(g, rot, &members, &inside, genus)
}

/// `Texp[0, 1/4](8·ln max(g, 2))`.
pub fn genus_buffer_law(genus_bound: usize) -> Result<TexpParams> {
    TexpParams::new(0.0, 0.25, 8.0 * (genus_bound.max(2) as f64).ln())
}

pub fn genus_partition(
    g: &Graph,
    rot: &RotationSystem,
    delta: f64,
    genus_bound: usize,
    rng: &RandomStream,
) -> Result<(Partition, DecompositionTrace)> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg(format!("delta must be positive, got {delta}")));
    }
    rot.check_graph(g)?;
    let n = g.vertex_count();
    let all: Vec<usize> = (0..n).collect();
    let initial = max_genus(g, rot, &all, |_| true);
    if initial > genus_bound {
        return Err(Error::arg(format!(
            "embedding has genus {initial}, above the bound {genus_bound}"
        )));
    }
    let law = genus_buffer_law(genus_bound)?;
    let planar = StrongParams::new(delta, PLANAR_R)?;
    let planar_base = rng.split(PLANAR_STREAM);
    let mut planar_calls = 0u64;
    let mut buffer_rng = rng.split(0).rng();
    let mut cone_rng = rng.split(1).rng();
    let mut cv = Carving::new(g, Scheme::Genus, delta, genus_bound);
    let mut cursor = 0;

    loop {
        while cursor < n && !cv.alive[cursor] {
            cursor += 1;
        }
        if cursor == n {
            break;
        }
        let comp = {
            let alive = &cv.alive;
            components_by(g, [cursor], |v| alive[v]).pop().unwrap_or_default()
        };
        let mut inside = vec![false; n];
        for &v in &comp {
            inside[v] = true;
        }
        let genus = max_genus(g, rot, &comp, |v| inside[v]);
        if genus == 0 {
            strong_within(&mut cv, &comp, &planar, &planar_base.split(planar_calls))?;
            planar_calls += 1;
            continue;
        }
        let cycle = reducing_cycle_by(g, rot, &comp, &inside, genus)?;
        let walk = cycle.walk();
        let radius = law.sample(&mut buffer_rng);
        let buffer = ball_by(g, walk.iter().copied(), radius * delta, |v| inside[v]);
        let event = cv.trace.skeletons.len();
        cv.trace.skeletons.push(SkeletonEvent {
            process: Process::Both,
            snapshot: cv.snapshot(),
            skeleton: walk.clone(),
            radius,
            law,
            buffer: buffer.clone(),
        });
        cv.trace.records.push(Record::GenusCycle(GenusCycleRecord {
            root: cycle.root,
            path_a: cycle.path_a,
            path_b: cycle.path_b,
            genus_before: genus,
            radius,
            buffer: buffer.clone(),
            skeleton_event: event,
        }));
        let cones = carve_cones(g, &buffer, &walk, delta, &mut cone_rng)?;
        emit_cones(&mut cv, cones, event)?;
        let sid = cv.fresh_supernode();
        cv.remove(sid, buffer);
    }
    cv.finish()
}
