//! Monte Carlo estimation and trace verification.
//!
//! Trials are independent: trial `t` draws from `rng.split(t)`, so every
//! estimate is a function of the inputs and the master stream alone,
//! whatever the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genus::{genus_partition, RotationSystem};
use crate::graph::{ball_by, component_of, components_by, dijkstra_by, within, Graph, REL_EPS};
use crate::partition::{Partition, Scheme};
use crate::sampling::{RandomStream, StreamRng, TexpParams};
use crate::stats::{bernoulli_stderr, mean_stderr, wilson_interval, Z95};
use crate::strong::{strong_random_partition, StrongParams};
use crate::trace::{DecompositionTrace, Process, Replayer};
use crate::treewidth::{treewidth_partition, TreeDecomposition};
use crate::weak::{weak_random_partition, WeakParams};

// ---------------------------------------------------------------------------
// potential drift

/// Normalized distances `x` (nondecreasing, at most `s` of them).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialState {
    x: Vec<f64>,
    s: usize,
}

impl PotentialState {
    pub fn new(x: Vec<f64>, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::arg("visibility bound s must be at least 1"));
        }
        if x.len() > s {
            return Err(Error::arg(format!("{} coordinates exceed s = {s}", x.len())));
        }
        if x.iter().any(|v| v.is_nan()) || x.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::arg("coordinates must be nondecreasing"));
        }
        Ok(PotentialState { x, s })
    }

    /// Random state: length uniform in `0..=s`, sorted uniform entries
    /// in `[0, 2]`.
    pub fn random(s: usize, rng: &mut StreamRng) -> Result<Self> {
        let len = rng.below(s + 1);
        let mut x: Vec<f64> = (0..len).map(|_| rng.uniform_in(0.0, 2.0)).collect();
        x.sort_by(f64::total_cmp);
        Self::new(x, s)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn s(&self) -> usize {
        self.s
    }
}

fn phi(x: &[f64], s: usize) -> f64 {
    let a = (2 * s + 1) as f64;
    x.iter().map(|&v| (-a * v).exp()).sum()
}

/// `Φ(x) = Σ e^{-(2s+1)·x_j}`.
pub fn potential(state: &PotentialState) -> f64 {
    phi(&state.x, state.s)
}

/// `Φ′`: `2s` once some coordinate is `<= 0`, `Φ` otherwise.
pub fn potential_capped(state: &PotentialState) -> f64 {
    if state.x.iter().any(|&v| v <= 0.0) {
        2.0 * state.s as f64
    } else {
        potential(state)
    }
}

/// `x ↓ y`: drop coordinates strictly larger than `y`, then append `y`.
pub fn filter_subsequence(x: &[f64], y: f64) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().copied().filter(|&v| v <= y).collect();
    out.push(y);
    out
}

/// `s(e-2)·e^{-(2s+1)h} / (1 - e^{-2s})`.
pub fn drift_bound(s: usize, h: f64) -> f64 {
    let s_f = s as f64;
    s_f * (std::f64::consts::E - 2.0) * (-(2.0 * s_f + 1.0) * h).exp() / -(-2.0 * s_f).exp_m1()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub s: usize,
    pub h: f64,
    pub x: Vec<f64>,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Monte Carlo mean of `Φ(x ↓ (h - Y)) - Φ(x)` with `Y ~ Texp[0, 1](2s)`.
pub fn drift_check(
    state: &PotentialState,
    h: f64,
    trials: usize,
    rng: &RandomStream,
) -> Result<DriftReport> {
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::arg(format!("h must be >= 0, got {h}")));
    }
    if trials == 0 {
        return Err(Error::arg("drift check needs at least one trial"));
    }
    let s = state.s;
    let law = TexpParams::unit(2.0 * s as f64)?;
    let base = potential(state);
    let mut draws = rng.rng();
    let diffs: Vec<f64> = (0..trials)
        .map(|_| {
            let y = h - law.sample(&mut draws);
            phi(&filter_subsequence(&state.x, y), s) - base
        })
        .collect();
    let (mean, stderr) = mean_stderr(&diffs);
    let bound = drift_bound(s, h);
    Ok(DriftReport {
        s,
        h,
        x: state.x.clone(),
        trials,
        mean,
        stderr,
        bound,
        passed: mean >= bound - 3.0 * stderr,
    })
}

// ---------------------------------------------------------------------------
// running schemes

/// A scheme together with everything it needs besides the graph.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeConfig {
    Weak(WeakParams),
    Strong(StrongParams),
    Treewidth {
        td: TreeDecomposition,
        delta: f64,
    },
    Genus {
        rotation: RotationSystem,
        delta: f64,
        genus_bound: usize,
    },
}

impl SchemeConfig {
    /// `r` is used by weak/strong, `g` by genus; treewidth needs `td` and
    /// genus needs `rotation`.
    pub fn new(
        scheme: Scheme,
        delta: f64,
        r: Option<usize>,
        g: Option<usize>,
        td: Option<TreeDecomposition>,
        rotation: Option<RotationSystem>,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::arg(format!("delta must be positive, got {delta}")));
        }
        let need_r = || r.ok_or_else(|| Error::arg(format!("scheme {scheme} needs r")));
        Ok(match scheme {
            Scheme::Weak => SchemeConfig::Weak(WeakParams::new(delta, need_r()?)?),
            Scheme::Strong => SchemeConfig::Strong(StrongParams::new(delta, need_r()?)?),
            Scheme::Treewidth => SchemeConfig::Treewidth {
                td: td.ok_or_else(|| Error::arg("treewidth scheme needs a tree decomposition"))?,
                delta,
            },
            Scheme::Genus => SchemeConfig::Genus {
                rotation: rotation
                    .ok_or_else(|| Error::arg("genus scheme needs a rotation system"))?,
                delta,
                genus_bound: g.ok_or_else(|| Error::arg("genus scheme needs g"))?,
            },
        })
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            SchemeConfig::Weak(_) => Scheme::Weak,
            SchemeConfig::Strong(_) => Scheme::Strong,
            SchemeConfig::Treewidth { .. } => Scheme::Treewidth,
            SchemeConfig::Genus { .. } => Scheme::Genus,
        }
    }

    pub fn delta(&self) -> f64 {
        match self {
            SchemeConfig::Weak(p) => p.delta,
            SchemeConfig::Strong(p) => p.delta,
            SchemeConfig::Treewidth { delta, .. } | SchemeConfig::Genus { delta, .. } => *delta,
        }
    }

    /// `r` (weak, strong), `width + 1` (treewidth) or the genus bound.
    pub fn param(&self) -> usize {
        match self {
            SchemeConfig::Weak(p) => p.r,
            SchemeConfig::Strong(p) => p.r,
            SchemeConfig::Treewidth { td, .. } => td.width() + 1,
            SchemeConfig::Genus { genus_bound, .. } => *genus_bound,
        }
    }
}

pub fn run_scheme(
    g: &Graph,
    cfg: &SchemeConfig,
    rng: &RandomStream,
) -> Result<(Partition, DecompositionTrace)> {
    match cfg {
        SchemeConfig::Weak(p) => weak_random_partition(g, p, rng),
        SchemeConfig::Strong(p) => strong_random_partition(g, p, rng),
        SchemeConfig::Treewidth { td, delta } => treewidth_partition(g, td, *delta, rng),
        SchemeConfig::Genus {
            rotation,
            delta,
            genus_bound,
        } => genus_partition(g, rotation, *delta, *genus_bound, rng),
    }
}

/// Runs `f` on every trial index in parallel; results keep index order.
pub fn par_trials<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

// ---------------------------------------------------------------------------
// estimators

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaddingEstimate {
    pub z: usize,
    pub gamma: f64,
    pub delta: f64,
    pub trials: usize,
    pub successes: u64,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl PaddingEstimate {
    fn new(z: usize, gamma: f64, delta: f64, trials: usize, successes: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials as u64, Z95);
        PaddingEstimate {
            z,
            gamma,
            delta,
            trials,
            successes,
            point: successes as f64 / trials as f64,
            ci_low,
            ci_high,
        }
    }

    /// Estimated probability that the ball is cut, and its standard error.
    pub fn cut_probability(&self) -> (f64, f64) {
        let cuts = self.trials as u64 - self.successes;
        (1.0 - self.point, bernoulli_stderr(cuts, self.trials as u64))
    }
}

/// `B_G(z, γΔ)` as a sorted list.
pub fn padding_ball(g: &Graph, z: usize, radius: f64) -> Vec<usize> {
    ball_by(g, [z], radius, |_| true)
}

fn is_padded(p: &Partition, ball: &[usize], z: usize) -> bool {
    let c = p.cluster_of(z);
    ball.iter().all(|&v| p.cluster_of(v) == c)
}

/// For every `(z, γ)`, the fraction of trials with `B(z, γΔ) ⊆ P(z)`.
/// Results are ordered by `z`, then `γ`.
pub fn estimate_padding(
    g: &Graph,
    cfg: &SchemeConfig,
    z_set: &[usize],
    gammas: &[f64],
    trials: usize,
    rng: &RandomStream,
) -> Result<Vec<PaddingEstimate>> {
    if trials == 0 {
        return Err(Error::arg("need at least one trial"));
    }
    if let Some(&gm) = gammas.iter().find(|&&gm| !(gm >= 0.0 && gm.is_finite())) {
        return Err(Error::arg(format!("gamma must be >= 0, got {gm}")));
    }
    if let Some(&z) = z_set.iter().find(|&&z| z >= g.vertex_count()) {
        return Err(Error::arg(format!("vertex {z} is not in the graph")));
    }
    let delta = cfg.delta();
    let balls: Vec<Vec<usize>> = z_set
        .iter()
        .flat_map(|&z| gammas.iter().map(move |&gm| (z, gm)))
        .map(|(z, gm)| padding_ball(g, z, gm * delta))
        .collect();
    let keys: Vec<(usize, f64)> = z_set
        .iter()
        .flat_map(|&z| gammas.iter().map(move |&gm| (z, gm)))
        .collect();
    let hits = par_trials(trials, |t| {
        let (p, _) = run_scheme(g, cfg, &rng.split(t as u64))?;
        Ok(keys
            .iter()
            .zip(&balls)
            .map(|(&(z, _), b)| is_padded(&p, b, z))
            .collect::<Vec<bool>>())
    })?;
    Ok(keys
        .iter()
        .enumerate()
        .map(|(k, &(z, gm))| {
            let s = hits.iter().filter(|h| h[k]).count() as u64;
            PaddingEstimate::new(z, gm, delta, trials, s)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutFractionEstimate {
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Mean fraction of edges whose endpoints land in different clusters.
pub fn estimate_cut_fraction(
    g: &Graph,
    cfg: &SchemeConfig,
    trials: usize,
    rng: &RandomStream,
) -> Result<CutFractionEstimate> {
    if trials == 0 {
        return Err(Error::arg("need at least one trial"));
    }
    let m = g.edge_count();
    let fractions = par_trials(trials, |t| {
        if m == 0 {
            return Ok(0.0);
        }
        let (p, _) = run_scheme(g, cfg, &rng.split(t as u64))?;
        Ok(p.cut_edges(g) as f64 / m as f64)
    })?;
    let (mean, stderr) = mean_stderr(&fractions);
    Ok(CutFractionEstimate {
        trials,
        mean,
        stderr,
        ci_low: mean - Z95 * stderr,
        ci_high: mean + Z95 * stderr,
    })
}

// ---------------------------------------------------------------------------
// threateners and the cut bound

fn check_trace_graph(g: &Graph, trace: &DecompositionTrace) -> Result<()> {
    if trace.vertex_count != g.vertex_count() {
        return Err(Error::Integrity(format!(
            "trace has {} vertices, graph has {}",
            trace.vertex_count,
            g.vertex_count()
        )));
    }
    trace.check_integrity()
}

fn count_events(
    g: &Graph,
    trace: &DecompositionTrace,
    z: usize,
    gamma: f64,
    u: f64,
    keep: fn(Process) -> bool,
) -> Result<usize> {
    check_trace_graph(g, trace)?;
    if z >= g.vertex_count() {
        return Err(Error::arg(format!("vertex {z} is not in the graph")));
    }
    let limit = (u + gamma) * trace.delta;
    let mut replay = Replayer::new(trace);
    let mut count = 0;
    for ev in trace.skeletons.iter().filter(|e| keep(e.process)) {
        replay.seek(ev.snapshot);
        if !replay.alive[z] {
            break;
        }
        let alive = &replay.alive;
        let dm = dijkstra_by(g, ev.skeleton.iter().copied(), |v| alive[v], limit);
        if dm.is_reachable(z) {
            count += 1;
        }
        if ev.buffer.binary_search(&z).is_ok() {
            break;
        }
    }
    Ok(count)
}

/// `|threat_z|`: threatening skeletons within `(u + γ)Δ` of `z` in their
/// residual graph, counted until the buffer that removes `z`.
pub fn count_threateners(
    g: &Graph,
    trace: &DecompositionTrace,
    z: usize,
    gamma: f64,
    u: f64,
) -> Result<usize> {
    count_events(g, trace, z, gamma, u, Process::is_threatening)
}

/// The same count over the cutting process (for the weak scheme, the
/// net-point balls), up to the first ball that contains `z`.
pub fn count_cutting_threateners(
    g: &Graph,
    trace: &DecompositionTrace,
    z: usize,
    gamma: f64,
    u: f64,
) -> Result<usize> {
    count_events(g, trace, z, gamma, u, Process::is_cutting)
}

/// Whether the cutting process cuts `ball`: the first cutting buffer that
/// meets the ball does not contain all of it.
pub fn process_cuts(trace: &DecompositionTrace, ball: &[usize]) -> bool {
    for ev in trace.skeletons.iter().filter(|e| e.process.is_cutting()) {
        let hit = ball.iter().filter(|v| ev.buffer.binary_search(v).is_ok()).count();
        if hit > 0 {
            return hit < ball.len();
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutBoundReport {
    pub z: usize,
    pub gamma: f64,
    pub trials: usize,
    pub cut_frequency: f64,
    pub cut_stderr: f64,
    pub tau_hat: f64,
    pub tau_stderr: f64,
    /// `δ = e^{-2bγ/(u-l)}`.
    pub delta_factor: f64,
    pub bound: f64,
    pub passed: bool,
}

fn law_matches(law: &TexpParams, l: f64, u: f64, b: f64) -> bool {
    let close = |a: f64, e: f64| (a - e).abs() <= REL_EPS * e.abs().max(1.0);
    close(law.theta1, l) && close(law.theta2, u) && close(law.rate, b / (u - l))
}

/// One trial's contribution: was `B(z, γΔ)` cut by the cutting process,
/// and how many cutting threateners did `z` see.
pub fn cut_observation(
    g: &Graph,
    trace: &DecompositionTrace,
    z: usize,
    gamma: f64,
    (l, u, b): (f64, f64, f64),
) -> Result<(bool, usize)> {
    if let Some(i) = trace
        .skeletons
        .iter()
        .position(|e| e.process.is_cutting() && !law_matches(&e.law, l, u, b))
    {
        let law = trace.skeletons[i].law;
        return Err(Error::arg(format!(
            "cutting event {i} draws from Texp[{}, {}]({}), not Texp[{l}, {u}]({})",
            law.theta1,
            law.theta2,
            law.rate,
            b / (u - l)
        )));
    }
    let ball = padding_ball(g, z, gamma * trace.delta);
    let tau = count_cutting_threateners(g, trace, z, gamma, u)?;
    Ok((process_cuts(trace, &ball), tau))
}

/// `(1 - δ)(1 + τ/(e^b - 1))`.
pub fn cut_bound(gamma: f64, l: f64, u: f64, b: f64, tau: f64) -> f64 {
    let delta = (-2.0 * b * gamma / (u - l)).exp();
    (1.0 - delta) * (1.0 + tau / b.exp_m1())
}

pub fn summarize_cut_bound(
    z: usize,
    gamma: f64,
    (l, u, b): (f64, f64, f64),
    observations: &[(bool, usize)],
) -> Result<CutBoundReport> {
    if observations.is_empty() {
        return Err(Error::arg("need at least one trace"));
    }
    let n = observations.len();
    let cuts = observations.iter().filter(|o| o.0).count() as u64;
    let taus: Vec<f64> = observations.iter().map(|o| o.1 as f64).collect();
    let (tau_hat, tau_stderr) = mean_stderr(&taus);
    let cut_frequency = cuts as f64 / n as f64;
    let cut_stderr = bernoulli_stderr(cuts, n as u64);
    let bound = cut_bound(gamma, l, u, b, tau_hat);
    Ok(CutBoundReport {
        z,
        gamma,
        trials: n,
        cut_frequency,
        cut_stderr,
        tau_hat,
        tau_stderr,
        delta_factor: (-2.0 * b * gamma / (u - l)).exp(),
        bound,
        passed: cut_frequency <= bound + 3.0 * cut_stderr,
    })
}

/// Empirical check of the cutting-process bound over independent traces.
pub fn check_cut_bound(
    g: &Graph,
    traces: &[DecompositionTrace],
    z: usize,
    gamma: f64,
    l: f64,
    u: f64,
    b: f64,
) -> Result<CutBoundReport> {
    if !(0.0 <= l && l < u && u <= 1.0 && b > 0.0) {
        return Err(Error::arg(format!("need 0 <= l < u <= 1 and b > 0, got ({l}, {u}, {b})")));
    }
    let obs = traces
        .iter()
        .map(|t| cut_observation(g, t, z, gamma, (l, u, b)))
        .collect::<Result<Vec<_>>>()?;
    summarize_cut_bound(z, gamma, (l, u, b), &obs)
}

// ---------------------------------------------------------------------------
// trace invariants

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub event: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub scheme: Scheme,
    pub r: usize,
    /// Largest number of closed supernodes (clusters, for treewidth)
    /// adjacent to one residual component.
    pub max_adjacent: usize,
    pub adjacency_limit: Option<usize>,
    pub components_checked: usize,
    pub buffers_checked: usize,
    pub cones_checked: usize,
    pub cone_path_checks: usize,
    /// Strong traces: most paths of one supernode grown in components
    /// containing a fixed vertex.
    pub max_paths_per_lineage: Option<usize>,
    pub violations: Vec<Violation>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Buffers up to this size get the all-pairs cone path checks.
pub const CONE_PATH_CHECK_LIMIT: usize = 64;

/// Replays `trace` on `g` and checks the adjacency invariant, the bound
/// on adjacent supernodes (`r`, or `2r` for treewidth), buffer replay,
/// cone membership and the cone path properties.
pub fn verify_trace_invariants(
    g: &Graph,
    trace: &DecompositionTrace,
    r: usize,
) -> Result<InvariantReport> {
    check_trace_graph(g, trace)?;
    let mut rep = InvariantReport {
        scheme: trace.scheme,
        r,
        max_adjacent: 0,
        adjacency_limit: match trace.scheme {
            Scheme::Weak | Scheme::Strong => Some(r),
            Scheme::Treewidth => Some(2 * r),
            Scheme::Genus => None,
        },
        components_checked: 0,
        buffers_checked: 0,
        cones_checked: 0,
        cone_path_checks: 0,
        max_paths_per_lineage: None,
        violations: Vec::new(),
    };
    match trace.scheme {
        Scheme::Weak | Scheme::Strong => check_supernode_adjacency(g, trace, &mut rep),
        Scheme::Treewidth => check_cluster_adjacency(g, trace, &mut rep),
        Scheme::Genus => {}
    }
    check_buffers(g, trace, &mut rep);
    check_cones(g, trace, &mut rep);
    match trace.scheme {
        Scheme::Weak => check_weak_coverage(g, trace, &mut rep),
        Scheme::Strong => check_lineage_paths(g, trace, &mut rep),
        _ => {}
    }
    Ok(rep)
}

fn violation(rep: &mut InvariantReport, check: &str, event: usize, detail: String) {
    rep.violations.push(Violation {
        check: check.into(),
        event,
        detail,
    });
}

/// Owner supernode of every vertex removed in `removals[..k]`.
fn owners_at(trace: &DecompositionTrace, k: usize) -> Vec<Option<usize>> {
    let mut owner = vec![None; trace.vertex_count];
    for r in &trace.removals[..k] {
        for &v in &r.vertices {
            owner[v] = Some(r.supernode);
        }
    }
    owner
}

/// Weak and strong traces: at every recorded snapshot, the closed
/// supernodes adjacent to each residual component are pairwise adjacent
/// and at most `r`; recorded adjacency lists match the replay.
fn check_supernode_adjacency(g: &Graph, trace: &DecompositionTrace, rep: &mut InvariantReport) {
    let mut snapshots: Vec<usize> = trace.components.iter().map(|c| c.snapshot).collect();
    snapshots.dedup();
    for &k in &snapshots {
        let owner = owners_at(trace, k);
        let open = trace.removals.get(k).map(|r| r.supernode);
        let closed = |s: usize| open.is_none_or(|o| s < o);
        let mut touching = std::collections::HashSet::new();
        for e in g.edges() {
            if let (Some(a), Some(b)) = (owner[e.u], owner[e.v]) {
                if a != b {
                    touching.insert((a.min(b), a.max(b)));
                }
            }
        }
        let alive: Vec<bool> = owner.iter().map(Option::is_none).collect();
        let comps = components_by(g, (0..g.vertex_count()).filter(|&v| alive[v]), |v| alive[v]);
        for comp in comps {
            let mut adj: Vec<usize> = comp
                .iter()
                .flat_map(|&v| g.neighbors(v).filter_map(|(u, _)| owner[u]))
                .filter(|&s| closed(s))
                .collect();
            adj.sort_unstable();
            adj.dedup();
            rep.components_checked += 1;
            rep.max_adjacent = rep.max_adjacent.max(adj.len());
            if adj.len() > rep.r {
                violation(
                    rep,
                    "adjacent_supernode_bound",
                    k,
                    format!("component at {} sees {} supernodes > r = {}", comp[0], adj.len(), rep.r),
                );
            }
            for (i, &a) in adj.iter().enumerate() {
                for &b in &adj[i + 1..] {
                    if !touching.contains(&(a, b)) {
                        violation(
                            rep,
                            "pairwise_adjacency",
                            k,
                            format!("supernodes {a} and {b} both touch the component at {} but not each other", comp[0]),
                        );
                    }
                }
            }
        }
    }
    for (i, ev) in trace.components.iter().enumerate() {
        let owner = owners_at(trace, ev.snapshot);
        let open = trace.removals.get(ev.snapshot).map(|r| r.supernode);
        let mut adj: Vec<usize> = ev
            .vertices
            .iter()
            .flat_map(|&v| g.neighbors(v).filter_map(|(u, _)| owner[u]))
            .filter(|&s| open.is_none_or(|o| s < o))
            .collect();
        adj.sort_unstable();
        adj.dedup();
        if adj != ev.adjacent {
            violation(
                rep,
                "component_record",
                i,
                format!("recorded adjacent supernodes {:?}, replay gives {adj:?}", ev.adjacent),
            );
        }
        let alive: Vec<bool> = owner.iter().map(Option::is_none).collect();
        let actual = ev.vertices.first().map(|&v| {
            component_of(g, v, |u| alive[u])
        });
        if actual.as_deref() != Some(ev.vertices.as_slice()) {
            violation(rep, "component_record", i, "recorded component is not a residual component".into());
        }
    }
}

/// Treewidth traces: clusters adjacent to any residual component, at every
/// removal prefix, number at most `2r`.
fn check_cluster_adjacency(g: &Graph, trace: &DecompositionTrace, rep: &mut InvariantReport) {
    let n = g.vertex_count();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for k in 0..=trace.removals.len() {
        if k > 0 {
            let r = &trace.removals[k - 1];
            for &v in &r.vertices {
                owner[v] = Some(r.supernode);
            }
        }
        let comps = components_by(g, (0..n).filter(|&v| owner[v].is_none()), |v| owner[v].is_none());
        for comp in comps {
            let mut adj: Vec<usize> = comp
                .iter()
                .flat_map(|&v| g.neighbors(v).filter_map(|(u, _)| owner[u]))
                .collect();
            adj.sort_unstable();
            adj.dedup();
            rep.components_checked += 1;
            rep.max_adjacent = rep.max_adjacent.max(adj.len());
            if adj.len() > 2 * rep.r {
                violation(
                    rep,
                    "adjacent_cluster_bound",
                    k,
                    format!("component at {} sees {} clusters > 2r = {}", comp[0], adj.len(), 2 * rep.r),
                );
            }
        }
    }
}

/// Every stored buffer equals `B_{G_k}(A, R·Δ)` recomputed from the
/// removal prefix, and every radius lies in its law's support.
fn check_buffers(g: &Graph, trace: &DecompositionTrace, rep: &mut InvariantReport) {
    let mut replay = Replayer::new(trace);
    for (i, ev) in trace.skeletons.iter().enumerate() {
        replay.seek(ev.snapshot);
        rep.buffers_checked += 1;
        if ev.radius < ev.law.theta1 || ev.radius > ev.law.theta2 {
            violation(rep, "radius_support", i, format!("radius {} outside its law", ev.radius));
        }
        let alive = &replay.alive;
        let limit = ev.radius * trace.delta;
        let dm = dijkstra_by(g, ev.skeleton.iter().copied(), |v| alive[v], f64::INFINITY);
        if let Some(&v) = ev.buffer.iter().find(|&&v| !within(dm.raw(v), limit)) {
            violation(
                rep,
                "buffer_containment",
                i,
                format!("vertex {v} at distance {} beyond radius {limit}", dm.raw(v)),
            );
            continue;
        }
        let again = ball_by(g, ev.skeleton.iter().copied(), limit, |v| alive[v]);
        if again != ev.buffer {
            violation(
                rep,
                "buffer_replay",
                i,
                format!("stored buffer has {} vertices, replay gives {}", ev.buffer.len(), again.len()),
            );
        }
    }
}

/// Cone membership and the two shortest-path closure properties.
fn check_cones(g: &Graph, trace: &DecompositionTrace, rep: &mut InvariantReport) {
    let n = g.vertex_count();
    let mut by_parent: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, c) in trace.cones().enumerate() {
        by_parent.entry(c.parent_buffer).or_default().push(i);
    }
    let cones: Vec<_> = trace.cones().collect();
    for (&parent, idx) in &by_parent {
        let Some(ev) = trace.skeletons.get(parent) else {
            violation(rep, "cone_parent", idx[0], format!("missing skeleton event {parent}"));
            continue;
        };
        let mut in_s = vec![false; n];
        for &v in &ev.buffer {
            in_s[v] = true;
        }
        let small = ev.buffer.len() <= CONE_PATH_CHECK_LIMIT;
        for &ci in idx {
            let cone = cones[ci];
            rep.cones_checked += 1;
            let residual_path: Vec<usize> = ev.skeleton.iter().copied().filter(|&v| in_s[v]).collect();
            if residual_path.first() != Some(&cone.center) {
                violation(
                    rep,
                    "cone_center",
                    ci,
                    format!("center {} is not the first residual path vertex", cone.center),
                );
            }
            if !(0.125..=0.25).contains(&cone.alpha) {
                violation(rep, "cone_width", ci, format!("alpha {} outside [1/8, 1/4]", cone.alpha));
            }
            let from_c = dijkstra_by(g, [cone.center], |v| in_s[v], f64::INFINITY);
            let from_p = dijkstra_by(g, residual_path.iter().copied(), |v| in_s[v], f64::INFINITY);
            let expected: Vec<usize> = ev
                .buffer
                .iter()
                .copied()
                .filter(|&u| in_s[u] && from_c.is_reachable(u))
                .filter(|&u| within(from_c.raw(u) - from_p.raw(u), cone.alpha * trace.delta))
                .collect();
            if expected != cone.members {
                violation(rep, "cone_membership", ci, "members differ from the cone inequality".into());
            }
            let mut in_b = vec![false; n];
            for &v in &cone.members {
                in_b[v] = true;
            }
            if small {
                let s_now: Vec<usize> = ev.buffer.iter().copied().filter(|&v| in_s[v]).collect();
                let rows: Vec<_> = s_now
                    .iter()
                    .map(|&u| dijkstra_by(g, [u], |v| in_s[v], f64::INFINITY))
                    .collect();
                let on_path = |d_uv: f64, d_vt: f64, d_ut: f64| {
                    d_uv.is_finite() && (d_uv + d_vt - d_ut).abs() <= REL_EPS * d_ut.abs().max(1.0)
                };
                for (a, &u) in s_now.iter().enumerate() {
                    for &v in &s_now {
                        let d_uv = rows[a].raw(v);
                        rep.cone_path_checks += 1;
                        if in_b[v] && !in_b[u] && on_path(d_uv, from_p.raw(v), from_p.raw(u)) {
                            violation(
                                rep,
                                "cone_path_to_skeleton",
                                ci,
                                format!("{v} in cone lies on a shortest path from {u} to the path, {u} is outside"),
                            );
                        }
                        if in_b[u]
                            && !in_b[v]
                            && on_path(d_uv, from_c.raw(v), from_c.raw(u))
                        {
                            violation(
                                rep,
                                "cone_path_to_center",
                                ci,
                                format!("{v} lies on a shortest path from {u} to the center but is outside"),
                            );
                        }
                    }
                }
            }
            for &v in &cone.members {
                in_s[v] = false;
            }
        }
        if let Some(&v) = ev.buffer.iter().find(|&&v| in_s[v]) {
            violation(rep, "cone_cover", parent, format!("buffer vertex {v} in no cone"));
        }
    }
}

/// Weak traces: every buffer vertex is within `Δ/4` of a net point of its
/// supernode, inside the supernode's component.
fn check_weak_coverage(g: &Graph, trace: &DecompositionTrace, rep: &mut InvariantReport) {
    let n = g.vertex_count();
    for s in trace.supernodes() {
        let mut in_comp = vec![false; n];
        for &v in &s.component {
            in_comp[v] = true;
        }
        let net: Vec<usize> = trace
            .net_points()
            .filter(|p| p.supernode == s.id)
            .map(|p| p.vertex)
            .collect();
        let dm = dijkstra_by(g, net.iter().copied(), |v| in_comp[v], f64::INFINITY);
        if let Some(&v) = s.buffer.iter().find(|&&v| !within(dm.raw(v), trace.delta / 4.0)) {
            violation(
                rep,
                "net_coverage",
                s.skeleton_event,
                format!("vertex {v} of supernode {} is {} from its net", s.id, dm.raw(v)),
            );
        }
    }
}

/// Strong traces: for every supernode and vertex `z`, the paths grown in
/// components containing `z` number at most `r`.
fn check_lineage_paths(g: &Graph, trace: &DecompositionTrace, rep: &mut InvariantReport) {
    let n = g.vertex_count();
    let mut by_supernode: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for pb in trace.path_buffers() {
        by_supernode.entry(pb.supernode).or_default().push(pb.skeleton_event);
    }
    let mut worst = 0;
    let mut replay = Replayer::new(trace);
    for (&sid, events) in &by_supernode {
        let mut count = vec![0usize; n];
        for &e in events {
            let ev = &trace.skeletons[e];
            replay.seek(ev.snapshot);
            let alive = &replay.alive;
            for v in component_of(g, ev.skeleton[0], |u| alive[u]) {
                count[v] += 1;
            }
        }
        let (z, m) = count.iter().copied().enumerate().max_by_key(|&(_, c)| c).unwrap_or((0, 0));
        worst = worst.max(m);
        if m > rep.r {
            violation(
                rep,
                "paths_per_lineage",
                events[0],
                format!("supernode {sid} grows {m} paths in components containing {z} > r = {}", rep.r),
            );
        }
    }
    rep.max_paths_per_lineage = Some(worst);
}

// ---------------------------------------------------------------------------
// CSV output

pub const CSV_HEADER: &str = "scheme,n,m,delta,r_or_g,gamma,trials,seed,metric,value,ci_low,ci_high";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub scheme: String,
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub r_or_g: usize,
    pub gamma: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

impl CsvRow {
    pub fn line(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.n,
            self.m,
            self.delta,
            self.r_or_g,
            opt(self.gamma),
            self.trials,
            self.seed,
            self.metric,
            self.value,
            opt(self.ci_low),
            opt(self.ci_high)
        )
    }
}
