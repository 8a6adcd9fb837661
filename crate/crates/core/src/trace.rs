//! Decomposition traces: the replayable history of a run.
//!
//! A trace stores the ordered list of vertex removals. The residual graph
//! seen by any event is identified by its `snapshot`, the number of
//! removals applied before it, so `G_k = V ∖ (removals[0] ∪ … ∪
//! removals[k-1])`. Skeleton events record the skeleton, its radius draw
//! (as a fraction of Δ), the law it was drawn from and the full buffer
//! `B_{G_k}(A, R·Δ)`. Scheme-specific details live in tagged `records`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Path;
use crate::partition::Scheme;
use crate::sampling::TexpParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Removal {
    pub supernode: usize,
    pub vertices: Vec<usize>,
}

/// Which skeleton process an event belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    Threatening,
    Cutting,
    /// Strong-diameter schemes: one process satisfies both definitions.
    Both,
}

impl Process {
    pub fn is_threatening(self) -> bool {
        matches!(self, Process::Threatening | Process::Both)
    }

    pub fn is_cutting(self) -> bool {
        matches!(self, Process::Cutting | Process::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonEvent {
    pub process: Process,
    pub snapshot: usize,
    pub skeleton: Vec<usize>,
    pub radius: f64,
    pub law: TexpParams,
    pub buffer: Vec<usize>,
}

/// A residual component as it was when the algorithm picked it (or, for
/// the strong scheme, when it was about to grow a path into it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentEvent {
    pub snapshot: usize,
    pub vertices: Vec<usize>,
    /// Closed supernodes adjacent to the component, by id.
    pub adjacent: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupernodeRecord {
    pub id: usize,
    pub root: usize,
    pub tree: Vec<Path>,
    pub radius: f64,
    pub buffer: Vec<usize>,
    pub component: Vec<usize>,
    pub skeleton_event: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetPointEvent {
    pub supernode: usize,
    pub vertex: usize,
    pub alpha: f64,
    /// `None` when the ball was already fully covered.
    pub cluster: Option<usize>,
    pub skeleton_event: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathBufferRecord {
    pub supernode: usize,
    pub path_index: usize,
    pub path: Path,
    pub target_supernode: usize,
    pub radius: f64,
    pub buffer: Vec<usize>,
    pub skeleton_event: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeRecord {
    pub center: usize,
    pub alpha: f64,
    pub members: Vec<usize>,
    /// Skeleton event whose buffer the cone was carved from.
    pub parent_buffer: usize,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenusCycleRecord {
    pub root: usize,
    pub path_a: Path,
    pub path_b: Path,
    pub genus_before: usize,
    pub radius: f64,
    pub buffer: Vec<usize>,
    pub skeleton_event: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Supernode(SupernodeRecord),
    NetPoint(NetPointEvent),
    PathBuffer(PathBufferRecord),
    Cone(ConeRecord),
    GenusCycle(GenusCycleRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTrace {
    pub scheme: Scheme,
    pub vertex_count: usize,
    pub delta: f64,
    /// `r` for the minor-free schemes, `width + 1` for treewidth, `g` for genus.
    pub param: usize,
    pub removals: Vec<Removal>,
    pub skeletons: Vec<SkeletonEvent>,
    pub components: Vec<ComponentEvent>,
    pub records: Vec<Record>,
}

impl DecompositionTrace {
    pub fn new(scheme: Scheme, vertex_count: usize, delta: f64, param: usize) -> Self {
        DecompositionTrace {
            scheme,
            vertex_count,
            delta,
            param,
            removals: Vec::new(),
            skeletons: Vec::new(),
            components: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.removals.is_empty() && self.skeletons.is_empty()
    }

    pub fn supernodes(&self) -> impl Iterator<Item = &SupernodeRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::Supernode(s) => Some(s),
            _ => None,
        })
    }

    pub fn net_points(&self) -> impl Iterator<Item = &NetPointEvent> {
        self.records.iter().filter_map(|r| match r {
            Record::NetPoint(s) => Some(s),
            _ => None,
        })
    }

    pub fn path_buffers(&self) -> impl Iterator<Item = &PathBufferRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::PathBuffer(s) => Some(s),
            _ => None,
        })
    }

    pub fn cones(&self) -> impl Iterator<Item = &ConeRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::Cone(s) => Some(s),
            _ => None,
        })
    }

    pub fn genus_cycles(&self) -> impl Iterator<Item = &GenusCycleRecord> {
        self.records.iter().filter_map(|r| match r {
            Record::GenusCycle(s) => Some(s),
            _ => None,
        })
    }

    /// Residual vertex mask at `snapshot`.
    pub fn residual_at(&self, snapshot: usize) -> Result<Vec<bool>> {
        if snapshot > self.removals.len() {
            return Err(Error::Integrity(format!(
                "snapshot {snapshot} beyond {} removals",
                self.removals.len()
            )));
        }
        let mut alive = vec![true; self.vertex_count];
        for r in &self.removals[..snapshot] {
            for &v in &r.vertices {
                alive[v] = false;
            }
        }
        Ok(alive)
    }

    /// Structural sanity: ids in range, snapshots ordered and in range,
    /// removals disjoint and covering, skeletons alive in their snapshot.
    pub fn check_integrity(&self) -> Result<()> {
        let n = self.vertex_count;
        let bad = |what: String| Err(Error::Integrity(what));
        let mut removed_at = vec![usize::MAX; n];
        for (k, r) in self.removals.iter().enumerate() {
            for &v in &r.vertices {
                if v >= n {
                    return bad(format!("removal {k} has vertex {v} >= {n}"));
                }
                if removed_at[v] != usize::MAX {
                    return bad(format!("vertex {v} removed twice"));
                }
                removed_at[v] = k;
            }
        }
        if let Some(v) = removed_at.iter().position(|&k| k == usize::MAX) {
            return bad(format!("vertex {v} is never removed"));
        }
        for (i, e) in self.skeletons.iter().enumerate() {
            if e.snapshot > self.removals.len() {
                return bad(format!("skeleton {i} snapshot {} out of range", e.snapshot));
            }
            for &v in e.skeleton.iter().chain(&e.buffer) {
                if v >= n {
                    return bad(format!("skeleton {i} has vertex {v} >= {n}"));
                }
                if removed_at[v] < e.snapshot {
                    return bad(format!(
                        "skeleton {i} uses vertex {v}, removed before snapshot {}",
                        e.snapshot
                    ));
                }
            }
            if e.skeleton.is_empty() {
                return bad(format!("skeleton {i} is empty"));
            }
        }
        for w in self.skeletons.windows(2) {
            if w[1].snapshot < w[0].snapshot && w[0].process == w[1].process {
                return bad("skeleton snapshots are not ordered".into());
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Walks removals in order, keeping the residual mask current.
pub(crate) struct Replayer<'t> {
    trace: &'t DecompositionTrace,
    applied: usize,
    pub alive: Vec<bool>,
}

impl<'t> Replayer<'t> {
    pub fn new(trace: &'t DecompositionTrace) -> Self {
        Replayer {
            trace,
            applied: 0,
            alive: vec![true; trace.vertex_count],
        }
    }

    /// Advances to `snapshot`; rewinds by restarting when needed.
    pub fn seek(&mut self, snapshot: usize) {
        if snapshot < self.applied {
            self.alive.iter_mut().for_each(|a| *a = true);
            self.applied = 0;
        }
        while self.applied < snapshot {
            for &v in &self.trace.removals[self.applied].vertices {
                self.alive[v] = false;
            }
            self.applied += 1;
        }
    }
}
