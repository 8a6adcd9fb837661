//! Generators for graph families with known structure. Every instance
//! ships a tree decomposition and a rotation system; the rotation is a
//! planar embedding for the planar families, the standard genus-1
//! embedding for toroidal grids, and the sorted neighbor order otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genus::RotationSystem;
use crate::graph::Graph;
use crate::sampling::RandomStream;
use crate::treewidth::TreeDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Grid { width: usize, height: usize },
    Path { n: usize },
    Cycle { n: usize },
    KTree { k: usize, n: usize },
    ToroidalGrid { width: usize, height: usize },
    Complete { n: usize },
    /// Two toroidal grids joined by a bridge between their first vertices.
    DoubleTorus { width: usize, height: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    #[default]
    Unit,
    /// Independent uniform weights in `[1, 2]`.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub weights: WeightMode,
}

impl GeneratorSpec {
    pub fn unit(family: Family) -> Self {
        GeneratorSpec {
            family,
            weights: WeightMode::Unit,
        }
    }

    /// Short label such as `grid_10x10` or `k_tree_k3_n50`.
    pub fn label(&self) -> String {
        match self.family {
            Family::Grid { width, height } => format!("grid_{width}x{height}"),
            Family::Path { n } => format!("path_{n}"),
            Family::Cycle { n } => format!("cycle_{n}"),
            Family::KTree { k, n } => format!("k_tree_k{k}_n{n}"),
            Family::ToroidalGrid { width, height } => format!("toroidal_grid_{width}x{height}"),
            Family::Complete { n } => format!("complete_{n}"),
            Family::DoubleTorus { width, height } => format!("double_torus_{width}x{height}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    pub td: Option<TreeDecomposition>,
    pub rotation: Option<RotationSystem>,
}

pub fn generate(spec: &GeneratorSpec, rng: &RandomStream) -> Result<Instance> {
    let (n, edges, td, rotation) = match spec.family {
        Family::Grid { width, height } => {
            if width == 0 || height == 0 {
                return Err(Error::arg("grid sides must be positive"));
            }
            let (edges, rot) = grid_parts(width, height, false);
            let td = window_td(width * height, width + 1, &[]);
            (width * height, edges, td, rot)
        }
        Family::ToroidalGrid { width, height } => {
            if width < 3 || height < 3 {
                return Err(Error::arg("toroidal grid sides must be at least 3"));
            }
            let (edges, rot) = grid_parts(width, height, true);
            let first_row: Vec<usize> = (0..width).collect();
            let td = window_td(width * height, width + 1, &first_row);
            (width * height, edges, td, rot)
        }
        Family::DoubleTorus { width, height } => {
            if width < 3 || height < 3 {
                return Err(Error::arg("toroidal grid sides must be at least 3"));
            }
            let half = width * height;
            let (mut edges, rot) = grid_parts(width, height, true);
            let mut order = rot.clone();
            edges.extend(
                edges
                    .clone()
                    .into_iter()
                    .map(|(a, b)| (a + half, b + half)),
            );
            order.extend(rot.into_iter().map(|a| a.into_iter().map(|u| u + half).collect()));
            edges.push((0, half));
            order[0].push(half);
            order[half].push(0);
            let first_rows: Vec<usize> = (0..width).chain(half..half + width).collect();
            let td = window_td(2 * half, width + 1, &first_rows);
            (2 * half, edges, td, order)
        }
        Family::Path { n } => {
            if n == 0 {
                return Err(Error::arg("path needs at least one vertex"));
            }
            let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            let rot = sorted_rotation(n, &edges);
            (n, edges, window_td(n, 2, &[]), rot)
        }
        Family::Cycle { n } => {
            if n < 3 {
                return Err(Error::arg("cycle needs at least three vertices"));
            }
            let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
            edges.push((0, n - 1));
            let rot = sorted_rotation(n, &edges);
            let bags: Vec<Vec<usize>> = (1..n - 1).map(|i| vec![0, i, i + 1]).collect();
            let tree = (1..bags.len()).map(|i| (i - 1, i)).collect();
            (n, edges, TreeDecomposition::new(bags, tree), rot)
        }
        Family::Complete { n } => {
            if n == 0 {
                return Err(Error::arg("complete graph needs at least one vertex"));
            }
            let edges: Vec<(usize, usize)> =
                (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let rot = sorted_rotation(n, &edges);
            (n, edges, TreeDecomposition::new(vec![(0..n).collect()], vec![]), rot)
        }
        Family::KTree { k, n } => k_tree(k, n, rng)?,
    };
    let mut weights = rng.split(1).rng();
    let weighted: Vec<(usize, usize, f64)> = edges
        .into_iter()
        .map(|(a, b)| {
            let w = match spec.weights {
                WeightMode::Unit => 1.0,
                WeightMode::Uniform => weights.uniform_in(1.0, 2.0),
            };
            (a, b, w)
        })
        .collect();
    Ok(Instance {
        graph: Graph::new(n, weighted)?,
        td: Some(td),
        rotation: Some(RotationSystem::new(rotation)?),
    })
}

/// Row-major grid edges and the (right, down, left, up) rotation.
fn grid_parts(w: usize, h: usize, wrap: bool) -> (Vec<(usize, usize)>, Vec<Vec<usize>>) {
    let id = |r: usize, c: usize| r * w + c;
    let mut edges = Vec::new();
    let mut order = vec![Vec::new(); w * h];
    for r in 0..h {
        for c in 0..w {
            let right = (c + 1 < w || wrap).then(|| id(r, (c + 1) % w));
            let down = (r + 1 < h || wrap).then(|| id((r + 1) % h, c));
            let left = (c > 0 || wrap).then(|| id(r, (c + w - 1) % w));
            let up = (r > 0 || wrap).then(|| id((r + h - 1) % h, c));
            edges.extend(right.map(|u| (id(r, c), u)));
            edges.extend(down.map(|u| (id(r, c), u)));
            order[id(r, c)] = [right, down, left, up].into_iter().flatten().collect();
        }
    }
    (edges, order)
}

fn sorted_rotation(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut order = vec![Vec::new(); n];
    for &(a, b) in edges {
        order[a].push(b);
        order[b].push(a);
    }
    for o in &mut order {
        o.sort_unstable();
    }
    order
}

/// Bags of `span` consecutive ids, each extended by `extra`, on a path.
fn window_td(n: usize, span: usize, extra: &[usize]) -> TreeDecomposition {
    let windows: Vec<Vec<usize>> = if n <= span {
        vec![(0..n).collect()]
    } else {
        (0..=n - span).map(|i| (i..i + span).collect()).collect()
    };
    let bags: Vec<Vec<usize>> = windows
        .into_iter()
        .map(|mut b| {
            b.extend_from_slice(extra);
            b
        })
        .collect();
    let tree = (1..bags.len()).map(|i| (i - 1, i)).collect();
    TreeDecomposition::new(bags, tree)
}

type Parts = (usize, Vec<(usize, usize)>, TreeDecomposition, Vec<Vec<usize>>);

/// Random `k`-tree: start from `K_{k+1}` and attach each new vertex to a
/// uniformly chosen recorded `k`-clique. For `k <= 2` the rotation keeps
/// the embedding planar by placing the new vertex in a face next to the
/// clique edge.
fn k_tree(k: usize, n: usize, rng: &RandomStream) -> Result<Parts> {
    if k == 0 {
        return Err(Error::arg("k-tree needs k >= 1"));
    }
    if n < k + 1 {
        return Err(Error::arg(format!("a {k}-tree needs at least {} vertices", k + 1)));
    }
    let mut draws = rng.split(0).rng();
    let base: Vec<usize> = (0..=k).collect();
    let mut edges: Vec<(usize, usize)> =
        (0..=k).flat_map(|a| (a + 1..=k).map(move |b| (a, b))).collect();
    let mut order: Vec<Vec<usize>> = sorted_rotation(k + 1, &edges);
    order.resize(n, Vec::new());
    let mut bags = vec![base.clone()];
    let mut tree = Vec::new();
    let mut cliques: Vec<(Vec<usize>, usize)> = (0..=k)
        .map(|skip| (base.iter().copied().filter(|&v| v != skip).collect(), 0))
        .collect();
    for v in k + 1..n {
        let (clique, parent) = cliques[draws.below(cliques.len())].clone();
        for &u in &clique {
            edges.push((u, v));
        }
        match k {
            1 => {
                order[clique[0]].push(v);
                order[v].push(clique[0]);
            }
            2 => {
                let (a, b) = (clique[0], clique[1]);
                let after_b = order[a].iter().position(|&x| x == b).expect("clique edge") + 1;
                order[a].insert(after_b, v);
                let at_a = order[b].iter().position(|&x| x == a).expect("clique edge");
                order[b].insert(at_a, v);
                order[v] = vec![a, b];
            }
            _ => {
                for &u in &clique {
                    let at = order[u].partition_point(|&x| x < v);
                    order[u].insert(at, v);
                }
                order[v] = clique.clone();
            }
        }
        let id = bags.len();
        let mut bag = clique.clone();
        bag.push(v);
        bags.push(bag);
        tree.push((parent, id));
        for skip in &clique {
            let mut c: Vec<usize> = clique.iter().copied().filter(|u| u != skip).collect();
            c.push(v);
            cliques.push((c, id));
        }
    }
    Ok((n, edges, TreeDecomposition::new(bags, tree), order))
}
