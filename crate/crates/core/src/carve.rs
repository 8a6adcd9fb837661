//! Shared residual-graph state for the schemes that interleave removals
//! and cluster creation.

use crate::error::Result;
use crate::graph::Graph;
use crate::partition::{ClusterKind, ClusterMeta, Partition, PartitionBuilder, Scheme};
use crate::trace::{DecompositionTrace, Removal};

pub(crate) struct Carving<'g> {
    pub g: &'g Graph,
    pub alive: Vec<bool>,
    pub trace: DecompositionTrace,
    pub builder: PartitionBuilder,
    pub next_supernode: usize,
}

impl<'g> Carving<'g> {
    pub fn new(g: &'g Graph, scheme: Scheme, delta: f64, param: usize) -> Self {
        let n = g.vertex_count();
        Carving {
            g,
            alive: vec![true; n],
            trace: DecompositionTrace::new(scheme, n, delta, param),
            builder: PartitionBuilder::new(n),
            next_supernode: 0,
        }
    }

    pub fn snapshot(&self) -> usize {
        self.trace.removals.len()
    }

    pub fn fresh_supernode(&mut self) -> usize {
        self.next_supernode += 1;
        self.next_supernode - 1
    }

    pub fn remove(&mut self, supernode: usize, vertices: Vec<usize>) {
        for &v in &vertices {
            debug_assert!(self.alive[v], "vertex {v} removed twice");
            self.alive[v] = false;
        }
        self.trace.removals.push(Removal {
            supernode,
            vertices,
        });
    }

    pub fn add_cluster(
        &mut self,
        members: Vec<usize>,
        kind: ClusterKind,
        center: usize,
        skeleton: Option<usize>,
        radius: Option<f64>,
    ) -> Result<Option<usize>> {
        let scheme = self.trace.scheme;
        self.builder.add(
            members,
            ClusterMeta {
                scheme,
                kind,
                center,
                skeleton,
                radius,
            },
        )
    }

    pub fn finish(self) -> Result<(Partition, DecompositionTrace)> {
        Ok((self.builder.finish()?, self.trace))
    }
}
