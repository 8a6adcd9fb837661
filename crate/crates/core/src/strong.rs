//! Strong-diameter padded partition for `K_{r+1}`-minor-free graphs.
//!
//! Each supernode starts from the smallest residual vertex `u` as `W = {u}`.
//! While some residual component `C` next to `W` also sees a supernode `S`
//! that `W` does not touch, a shortest path from `N(W) ∩ C` to `N(S)` is
//! grown, its `Texp[0, 1/4](8(r²+r))` neighborhood is added to `W`, and
//! that buffer is partitioned into cones. The seed vertex itself becomes a
//! singleton cluster.

use crate::carve::Carving;
use crate::error::{Error, Result};
use crate::graph::{ball_by, components_by, dijkstra_by, within, Graph, VertexSet};
use crate::partition::{ClusterKind, Partition, Scheme};
use crate::sampling::{RandomStream, StreamRng, TexpParams};
use crate::trace::{
    ComponentEvent, ConeRecord, DecompositionTrace, PathBufferRecord, Process, Record,
    SkeletonEvent,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongParams {
    pub delta: f64,
    pub r: usize,
    pub buffer_dist: TexpParams,
    /// `α` is uniform on this interval.
    pub cone_width_range: (f64, f64),
}

impl StrongParams {
    pub fn new(delta: f64, r: usize) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::arg(format!("delta must be positive, got {delta}")));
        }
        if r < 1 {
            return Err(Error::arg("r must be at least 1"));
        }
        let r_f = r as f64;
        Ok(StrongParams {
            delta,
            r,
            buffer_dist: TexpParams::new(0.0, 0.25, 8.0 * (r_f * r_f + r_f))?,
            cone_width_range: (0.125, 0.25),
        })
    }
}

pub(crate) struct Cone {
    pub center: usize,
    pub alpha: f64,
    pub members: Vec<usize>,
}

/// Carves `s` into cones around the residual path, in path order.
pub(crate) fn carve_cones(
    g: &Graph,
    s: &[usize],
    path: &[usize],
    delta: f64,
    rng: &mut StreamRng,
) -> Result<Vec<Cone>> {
    let n = g.vertex_count();
    let mut in_s = vec![false; n];
    for &v in s {
        in_s[v] = true;
    }
    if let Some(&v) = path.iter().find(|&&v| !in_s[v]) {
        return Err(Error::Invariant(format!("path vertex {v} is not in the buffer")));
    }
    let reach = dijkstra_by(g, path.iter().copied(), |v| in_s[v], f64::INFINITY);
    if let Some(&v) = s.iter().find(|&&v| !within(reach.raw(v), delta / 4.0)) {
        return Err(Error::Invariant(format!(
            "buffer vertex {v} is farther than delta/4 from the path ({})",
            reach.raw(v)
        )));
    }

    let mut cones = Vec::new();
    let mut left = s.len();
    let mut cursor = 0;
    loop {
        while cursor < path.len() && !in_s[path[cursor]] {
            cursor += 1;
        }
        let Some(&c) = path.get(cursor) else { break };
        let alpha = rng.uniform_in(0.125, 0.25);
        let from_c = dijkstra_by(g, [c], |v| in_s[v], f64::INFINITY);
        let from_p = dijkstra_by(
            g,
            path[cursor..].iter().copied().filter(|&v| in_s[v]),
            |v| in_s[v],
            f64::INFINITY,
        );
        let members: Vec<usize> = s
            .iter()
            .copied()
            .filter(|&u| in_s[u] && from_c.is_reachable(u))
            .filter(|&u| within(from_c.raw(u) - from_p.raw(u), alpha * delta))
            .collect();
        for &u in &members {
            in_s[u] = false;
        }
        left -= members.len();
        cones.push(Cone {
            center: c,
            alpha,
            members,
        });
    }
    if left > 0 {
        let v = s.iter().find(|&&v| in_s[v]).copied().unwrap_or_default();
        return Err(Error::Invariant(format!(
            "{left} buffer vertices (e.g. {v}) left after the path was exhausted"
        )));
    }
    Ok(cones)
}

/// Partitions `s` into cones carved around the path `p`. Cones are
/// returned in carving order; `cluster` is the index in that order and
/// `parent_buffer` is 0.
pub fn create_cones(
    g: &Graph,
    s: &VertexSet,
    p: &[usize],
    delta: f64,
    rng: &RandomStream,
) -> Result<Vec<ConeRecord>> {
    if !(delta > 0.0) {
        return Err(Error::arg(format!("delta must be positive, got {delta}")));
    }
    if p.is_empty() {
        return Err(Error::arg("cone path is empty"));
    }
    let members = s.to_vec();
    let cones = carve_cones(g, &members, p, delta, &mut rng.rng())?;
    Ok(cones
        .into_iter()
        .enumerate()
        .map(|(i, c)| ConeRecord {
            center: c.center,
            alpha: c.alpha,
            members: c.members,
            parent_buffer: 0,
            cluster: i,
        })
        .collect())
}

/// Adds the cones of a buffer to the carving as clusters and records them.
pub(crate) fn emit_cones(cv: &mut Carving<'_>, cones: Vec<Cone>, event: usize) -> Result<()> {
    for cone in cones {
        let id = cv
            .add_cluster(
                cone.members.clone(),
                ClusterKind::Cone,
                cone.center,
                Some(event),
                Some(cone.alpha),
            )?
            .ok_or_else(|| Error::Invariant(format!("empty cone at {}", cone.center)))?;
        cv.trace.records.push(Record::Cone(ConeRecord {
            center: cone.center,
            alpha: cone.alpha,
            members: cone.members,
            parent_buffer: event,
            cluster: id,
        }));
    }
    Ok(())
}

/// Runs the strong scheme on `G[region]`, where `region` is a union of
/// residual components of the carving. Supernodes of this run are local:
/// earlier removals outside the region are not seen.
pub(crate) fn strong_within(
    cv: &mut Carving<'_>,
    region: &[usize],
    p: &StrongParams,
    stream: &RandomStream,
) -> Result<()> {
    let g = cv.g;
    let n = g.vertex_count();
    let delta = p.delta;
    let mut in_region = vec![false; n];
    for &v in region {
        in_region[v] = true;
    }
    let mut sorted = region.to_vec();
    sorted.sort_unstable();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut buffer_rng = stream.split(0).rng();
    let mut cone_rng = stream.split(1).rng();
    let mut cursor = 0;

    loop {
        while cursor < sorted.len() && !cv.alive[sorted[cursor]] {
            cursor += 1;
        }
        let Some(&seed) = sorted.get(cursor) else { break };
        let sid = cv.fresh_supernode();
        let live = |v: usize, alive: &[bool]| in_region[v] && alive[v];

        let comp = {
            let alive = &cv.alive;
            components_by(g, [seed], |v| live(v, alive)).pop().unwrap_or_default()
        };
        cv.trace.components.push(ComponentEvent {
            snapshot: cv.snapshot(),
            vertices: comp.clone(),
            adjacent: adjacent_supernodes(g, &comp, &owner),
        });

        let mut in_w = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut members = vec![seed];
        grow_w(g, &[seed], &mut in_w, &mut touched, &owner);
        cv.remove(sid, vec![seed]);
        cv.add_cluster(vec![seed], ClusterKind::Seed, seed, None, None)?;

        let mut path_index = 0;
        loop {
            let pieces = {
                let alive = &cv.alive;
                components_by(g, comp.iter().copied().filter(|&v| alive[v]), |v| live(v, alive))
            };
            let mut chosen = None;
            for piece in pieces {
                let sees_w = piece.iter().any(|&v| g.neighbors(v).any(|(u, _)| in_w[u]));
                if !sees_w {
                    continue;
                }
                let adjacent = adjacent_supernodes(g, &piece, &owner);
                if let Some(&target) = adjacent.iter().find(|s| !touched.contains(s)) {
                    chosen = Some((piece, adjacent, target));
                    break;
                }
            }
            let Some((piece, adjacent, target)) = chosen else { break };
            let snapshot = cv.snapshot();
            cv.trace.components.push(ComponentEvent {
                snapshot,
                vertices: piece.clone(),
                adjacent,
            });

            let mut in_piece = vec![false; n];
            for &v in &piece {
                in_piece[v] = true;
            }
            let start = piece
                .iter()
                .copied()
                .find(|&v| g.neighbors(v).any(|(u, _)| in_w[u]))
                .expect("piece sees W");
            let dm = dijkstra_by(g, [start], |v| in_piece[v], f64::INFINITY);
            let end = piece
                .iter()
                .copied()
                .filter(|&v| g.neighbors(v).any(|(u, _)| owner[u] == Some(target)))
                .min_by(|&a, &b| dm.raw(a).total_cmp(&dm.raw(b)).then(a.cmp(&b)))
                .expect("piece sees the target supernode");
            let path = dm.path_to(end).expect("piece is connected");

            let radius = p.buffer_dist.sample(&mut buffer_rng);
            let buffer = ball_by(g, path.iter().copied(), radius * delta, |v| in_piece[v]);
            let event = cv.trace.skeletons.len();
            cv.trace.skeletons.push(SkeletonEvent {
                process: Process::Both,
                snapshot,
                skeleton: path.clone(),
                radius,
                law: p.buffer_dist,
                buffer: buffer.clone(),
            });
            cv.trace.records.push(Record::PathBuffer(PathBufferRecord {
                supernode: sid,
                path_index,
                path: path.clone(),
                target_supernode: target,
                radius,
                buffer: buffer.clone(),
                skeleton_event: event,
            }));
            let cones = carve_cones(g, &buffer, &path, delta, &mut cone_rng)?;
            emit_cones(cv, cones, event)?;
            grow_w(g, &buffer, &mut in_w, &mut touched, &owner);
            members.extend_from_slice(&buffer);
            cv.remove(sid, buffer);
            path_index += 1;
        }
        for v in members {
            owner[v] = Some(sid);
        }
    }
    Ok(())
}

fn grow_w(
    g: &Graph,
    added: &[usize],
    in_w: &mut [bool],
    touched: &mut Vec<usize>,
    owner: &[Option<usize>],
) {
    for &v in added {
        in_w[v] = true;
        for (u, _) in g.neighbors(v) {
            if let Some(s) = owner[u] {
                if !touched.contains(&s) {
                    touched.push(s);
                }
            }
        }
    }
}

fn adjacent_supernodes(g: &Graph, piece: &[usize], owner: &[Option<usize>]) -> Vec<usize> {
    let mut out: Vec<usize> = piece
        .iter()
        .flat_map(|&v| g.neighbors(v).filter_map(|(u, _)| owner[u]))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn strong_random_partition(
    g: &Graph,
    p: &StrongParams,
    rng: &RandomStream,
) -> Result<(Partition, DecompositionTrace)> {
    if !(p.delta > 0.0) || p.r < 1 {
        return Err(Error::arg("strong partition needs delta > 0 and r >= 1"));
    }
    let mut cv = Carving::new(g, Scheme::Strong, p.delta, p.r);
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    strong_within(&mut cv, &all, p, rng)?;
    cv.finish()
}
