use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{diameter_of, DiameterMode, Graph, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Weak,
    Strong,
    Treewidth,
    Genus,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Weak => "weak",
            Scheme::Strong => "strong",
            Scheme::Treewidth => "treewidth",
            Scheme::Genus => "genus",
        }
    }

    /// The diameter notion the scheme guarantees.
    pub fn diameter_mode(&self) -> DiameterMode {
        match self {
            Scheme::Weak => DiameterMode::Weak,
            _ => DiameterMode::Strong,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Scheme::Weak),
            "strong" => Ok(Scheme::Strong),
            "treewidth" => Ok(Scheme::Treewidth),
            "genus" => Ok(Scheme::Genus),
            other => Err(Error::arg(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterKind {
    /// A ball around a single center.
    Ball,
    /// A cone carved from a path or cycle buffer.
    Cone,
    /// The seed vertex of a strong-scheme supernode.
    Seed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterMeta {
    pub scheme: Scheme,
    pub kind: ClusterKind,
    pub center: usize,
    /// Index of the skeleton event the cluster came from, if any.
    pub skeleton: Option<usize>,
    /// Radius draw (ball schemes) or cone width draw, as a fraction of Δ.
    pub radius: Option<f64>,
}

/// A disjoint cover of the vertex set by nonempty clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    members: Vec<Vec<usize>>,
    meta: Vec<ClusterMeta>,
    assignment: Vec<usize>,
}

impl Partition {
    pub fn cluster_count(&self) -> usize {
        self.members.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.len()
    }

    /// Sorted members of cluster `i`.
    pub fn cluster(&self, i: usize) -> &[usize] {
        &self.members[i]
    }

    pub fn cluster_set(&self, i: usize) -> VertexSet {
        VertexSet::from_vertices(self.assignment.len(), self.members[i].iter().copied())
    }

    pub fn clusters(&self) -> impl Iterator<Item = &[usize]> {
        self.members.iter().map(|m| m.as_slice())
    }

    pub fn meta(&self, i: usize) -> &ClusterMeta {
        &self.meta[i]
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Number of edges whose endpoints lie in different clusters.
    pub fn cut_edges(&self, g: &Graph) -> usize {
        g.edges()
            .iter()
            .filter(|e| self.assignment[e.u] != self.assignment[e.v])
            .count()
    }

    pub fn max_diameter(&self, g: &Graph, mode: DiameterMode) -> f64 {
        self.members
            .iter()
            .map(|m| diameter_of(g, m, mode))
            .fold(0.0, f64::max)
    }

    /// Re-checks disjointness, coverage and assignment consistency.
    pub fn validate(&self) -> Result<()> {
        let n = self.assignment.len();
        let mut seen = vec![false; n];
        for (i, m) in self.members.iter().enumerate() {
            if m.is_empty() {
                return Err(Error::Invariant(format!("cluster {i} is empty")));
            }
            for &v in m {
                if v >= n || seen[v] {
                    return Err(Error::Invariant(format!("vertex {v} is covered twice")));
                }
                seen[v] = true;
                if self.assignment[v] != i {
                    return Err(Error::Invariant(format!(
                        "vertex {v} assigned to {} but listed in {i}",
                        self.assignment[v]
                    )));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Invariant(format!("vertex {v} is in no cluster")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PartitionBuilder {
    assignment: Vec<Option<usize>>,
    members: Vec<Vec<usize>>,
    meta: Vec<ClusterMeta>,
}

impl PartitionBuilder {
    pub fn new(n: usize) -> Self {
        PartitionBuilder {
            assignment: vec![None; n],
            members: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn is_covered(&self, v: usize) -> bool {
        self.assignment[v].is_some()
    }

    /// Adds a cluster; empty clusters are dropped and `None` is returned.
    pub fn add(&mut self, mut members: Vec<usize>, meta: ClusterMeta) -> Result<Option<usize>> {
        if members.is_empty() {
            return Ok(None);
        }
        members.sort_unstable();
        let id = self.members.len();
        for &v in &members {
            if let Some(prev) = self.assignment[v] {
                return Err(Error::Invariant(format!(
                    "vertex {v} already belongs to cluster {prev}"
                )));
            }
            self.assignment[v] = Some(id);
        }
        self.members.push(members);
        self.meta.push(meta);
        Ok(Some(id))
    }

    pub fn finish(self) -> Result<Partition> {
        let assignment = self
            .assignment
            .iter()
            .enumerate()
            .map(|(v, a)| a.ok_or_else(|| Error::Invariant(format!("vertex {v} is in no cluster"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Partition {
            members: self.members,
            meta: self.meta,
            assignment,
        })
    }
}
