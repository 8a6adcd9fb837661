//! Text formats: edge lists, PACE tree decompositions, rotation JSON,
//! partition CSV and trace JSON.
//!
//! Edge list: `p <n> <m>` followed by `m` lines `<u> <v> <w>` (0-based).
//! PACE `.td`: `s td <bags> <max-bag-size> <n>`, then `b <id> <v…>` lines
//! and bag-tree edges, all 1-based; `c` lines are comments.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path as FsPath;

use crate::error::{Error, Result};
use crate::genus::RotationSystem;
use crate::graph::Graph;
use crate::partition::Partition;
use crate::trace::DecompositionTrace;
use crate::treewidth::TreeDecomposition;

fn content_lines(r: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(Error::from))
        .filter(|l| {
            l.as_ref()
                .map(|(_, s)| !s.trim().is_empty() && !s.trim_start().starts_with('c'))
                .unwrap_or(true)
        })
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("bad {what} `{tok}`")))
}

fn no_more<'a>(mut toks: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match toks.next() {
        Some(t) => Err(Error::parse(line, format!("unexpected token `{t}`"))),
        None => Ok(()),
    }
}

pub fn read_graph(r: impl BufRead) -> Result<Graph> {
    let mut lines = content_lines(r);
    let (ln, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(1, "empty input, expected `p <n> <m>`"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("p") {
        return Err(Error::parse(ln, "expected `p <n> <m>` header"));
    }
    let n: usize = field(toks.next(), ln, "vertex count")?;
    let m: usize = field(toks.next(), ln, "edge count")?;
    no_more(toks, ln)?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for item in lines {
        let (ln, line) = item?;
        let mut toks = line.split_whitespace();
        let u: usize = field(toks.next(), ln, "endpoint")?;
        let v: usize = field(toks.next(), ln, "endpoint")?;
        let w: f64 = field(toks.next(), ln, "weight")?;
        no_more(toks, ln)?;
        if u >= n || v >= n {
            return Err(Error::parse(ln, format!("endpoint out of range 0..{n}")));
        }
        if u == v {
            return Err(Error::parse(ln, format!("self-loop at {u}")));
        }
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::parse(ln, format!("weight {w} must be finite and >= 0")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::parse(ln, format!("duplicate edge {{{u}, {v}}}")));
        }
        edges.push((u, v, w));
    }
    if edges.len() != m {
        return Err(Error::parse(
            ln,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Graph::new(n, edges)
}

pub fn write_graph(g: &Graph, mut w: impl Write) -> Result<()> {
    writeln!(w, "p {} {}", g.vertex_count(), g.edge_count())?;
    for e in g.edges() {
        writeln!(w, "{} {} {}", e.u, e.v, e.w)?;
    }
    Ok(())
}

/// Reads a PACE `.td` file, converting to 0-based ids. Returns the
/// decomposition and the declared vertex count.
pub fn read_td(r: impl BufRead) -> Result<(TreeDecomposition, usize)> {
    let mut lines = content_lines(r);
    let (ln, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(1, "empty input, expected `s td` header"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("s") || toks.next() != Some("td") {
        return Err(Error::parse(ln, "expected `s td <bags> <max-bag-size> <n>`"));
    }
    let k: usize = field(toks.next(), ln, "bag count")?;
    let max_size: usize = field(toks.next(), ln, "max bag size")?;
    let n: usize = field(toks.next(), ln, "vertex count")?;
    no_more(toks, ln)?;
    let mut bags: Vec<Option<Vec<usize>>> = vec![None; k];
    let mut tree = Vec::new();
    let mut last = ln;
    for item in lines {
        let (ln, line) = item?;
        last = ln;
        let mut toks = line.split_whitespace();
        let first = toks.next().expect("non-empty line");
        if first == "b" {
            let id: usize = field(toks.next(), ln, "bag id")?;
            if id == 0 || id > k {
                return Err(Error::parse(ln, format!("bag id {id} outside 1..={k}")));
            }
            if bags[id - 1].is_some() {
                return Err(Error::parse(ln, format!("bag {id} declared twice")));
            }
            let mut bag = Vec::new();
            for t in toks {
                let v: usize = field(Some(t), ln, "vertex")?;
                if v == 0 || v > n {
                    return Err(Error::parse(ln, format!("vertex {v} outside 1..={n}")));
                }
                bag.push(v - 1);
            }
            if bag.len() > max_size {
                return Err(Error::parse(
                    ln,
                    format!("bag {id} has {} vertices, declared maximum is {max_size}", bag.len()),
                ));
            }
            bags[id - 1] = Some(bag);
        } else {
            if bags.iter().any(Option::is_none) {
                return Err(Error::parse(ln, "tree edge before all bags were declared"));
            }
            let a: usize = field(Some(first), ln, "bag id")?;
            let b: usize = field(toks.next(), ln, "bag id")?;
            no_more(toks, ln)?;
            if a == 0 || a > k || b == 0 || b > k {
                return Err(Error::parse(ln, format!("tree edge ({a}, {b}) outside 1..={k}")));
            }
            tree.push((a - 1, b - 1));
        }
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::parse(last, format!("bag {} never declared", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok((TreeDecomposition::new(bags, tree), n))
}

pub fn write_td(td: &TreeDecomposition, n: usize, mut w: impl Write) -> Result<()> {
    let max = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    writeln!(w, "s td {} {} {}", td.bags.len(), max, n)?;
    for (i, bag) in td.bags.iter().enumerate() {
        write!(w, "b {}", i + 1)?;
        for v in bag {
            write!(w, " {}", v + 1)?;
        }
        writeln!(w)?;
    }
    for &(a, b) in &td.tree_edges {
        writeln!(w, "{} {}", a + 1, b + 1)?;
    }
    Ok(())
}

/// Reads `{"<v>": [neighbors in cyclic order], …}` for a graph on `n`
/// vertices; absent vertices have empty rotations.
pub fn read_rotation(r: impl std::io::Read, n: usize) -> Result<RotationSystem> {
    let map: BTreeMap<String, Vec<usize>> = serde_json::from_reader(r)?;
    let mut order = vec![Vec::new(); n];
    for (key, around) in map {
        let v: usize = key
            .parse()
            .map_err(|_| Error::Rotation(format!("vertex key `{key}` is not an id")))?;
        if v >= n {
            return Err(Error::Rotation(format!("vertex {v} outside 0..{n}")));
        }
        order[v] = around;
    }
    RotationSystem::new(order)
}

pub fn write_rotation(rot: &RotationSystem, w: impl Write) -> Result<()> {
    serde_json::to_writer(w, &rot.to_map())?;
    Ok(())
}

/// `vertex,cluster` rows in vertex order.
pub fn write_partition_csv(p: &Partition, mut w: impl Write) -> Result<()> {
    writeln!(w, "vertex,cluster")?;
    for (v, c) in p.assignment().iter().enumerate() {
        writeln!(w, "{v},{c}")?;
    }
    Ok(())
}

pub fn read_partition_csv(r: impl BufRead) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let ln = i + 1;
        if ln == 1 {
            if line.trim() != "vertex,cluster" {
                return Err(Error::parse(ln, "expected `vertex,cluster` header"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split(',');
        let v: usize = field(toks.next(), ln, "vertex")?;
        let c: usize = field(toks.next(), ln, "cluster")?;
        no_more(toks, ln)?;
        if v != out.len() {
            return Err(Error::parse(ln, format!("expected vertex {}, found {v}", out.len())));
        }
        out.push(c);
    }
    Ok(out)
}

pub fn write_trace(t: &DecompositionTrace, w: impl Write) -> Result<()> {
    serde_json::to_writer(w, t)?;
    Ok(())
}

pub fn read_trace(r: impl std::io::Read) -> Result<DecompositionTrace> {
    Ok(serde_json::from_reader(r)?)
}

pub fn load_graph(path: impl AsRef<FsPath>) -> Result<Graph> {
    read_graph(std::io::BufReader::new(fs::File::open(path)?))
}

pub fn load_td(path: impl AsRef<FsPath>) -> Result<(TreeDecomposition, usize)> {
    read_td(std::io::BufReader::new(fs::File::open(path)?))
}

pub fn load_rotation(path: impl AsRef<FsPath>, n: usize) -> Result<RotationSystem> {
    read_rotation(std::io::BufReader::new(fs::File::open(path)?), n)
}

pub fn load_trace(path: impl AsRef<FsPath>) -> Result<DecompositionTrace> {
    read_trace(std::io::BufReader::new(fs::File::open(path)?))
}
