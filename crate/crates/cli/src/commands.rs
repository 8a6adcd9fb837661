use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use log::info;
use padded_core::corpus::{generate as generate_instance, Family, GeneratorSpec, WeightMode};
use padded_core::graph::cluster_diameter;
use padded_core::harness::{
    count_cutting_threateners, count_threateners, drift_check, estimate_cut_fraction, estimate_padding,
    par_trials, run_scheme, verify_trace_invariants, CsvRow, DriftReport, PotentialState, SchemeConfig, CSV_HEADER,
};
use padded_core::io::{
    load_graph, load_rotation, load_td, load_trace, write_graph, write_partition_csv, write_rotation, write_td,
    write_trace,
};
use padded_core::stats::{mean_stderr, Z95};
use padded_core::{DiameterMode, Graph, RandomStream, Scheme, VertexSet};
use serde_json::json;

use crate::{
    DriftArgs, EstimateArgs, FamilyArg, GenerateArgs, Metric, PartitionArgs, SchemeArgs, SummaryFormat,
    TableFormat, VerifyArgs, WeightArg,
};

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Writes `text` to `path`, or to stdout.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_config(args: &SchemeArgs, g: &Graph) -> Result<SchemeConfig> {
    let td = match (&args.td, args.scheme) {
        (Some(p), Scheme::Treewidth) => {
            let (td, n) = load_td(p).with_context(|| format!("reading {}", p.display()))?;
            if n != g.vertex_count() {
                bail!(padded_core::Error::Argument(format!(
                    "tree decomposition covers {n} vertices, graph has {}",
                    g.vertex_count()
                )));
            }
            Some(td)
        }
        _ => None,
    };
    let rotation = match (&args.rotation, args.scheme) {
        (Some(p), Scheme::Genus) => {
            Some(load_rotation(p, g.vertex_count()).with_context(|| format!("reading {}", p.display()))?)
        }
        _ => None,
    };
    Ok(SchemeConfig::new(args.scheme, args.delta, args.r, args.g, td, rotation)?)
}

fn row(g: &Graph, cfg: &SchemeConfig, seed: u64, trials: usize) -> CsvRow {
    CsvRow {
        scheme: cfg.scheme().name().into(),
        n: g.vertex_count(),
        m: g.edge_count(),
        delta: cfg.delta(),
        r_or_g: cfg.param(),
        gamma: None,
        trials,
        seed,
        metric: String::new(),
        value: 0.0,
        ci_low: None,
        ci_high: None,
    }
}

fn table(rows: &[CsvRow], format: TableFormat) -> Result<String> {
    Ok(match format {
        TableFormat::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in rows {
                s.push_str(&r.line());
                s.push('\n');
            }
            s
        }
        TableFormat::Json => serde_json::to_string_pretty(rows)? + "\n",
    })
}

pub fn partition(a: &PartitionArgs) -> Result<bool> {
    let g = load_graph(&a.graph).with_context(|| format!("reading {}", a.graph.display()))?;
    let cfg = load_config(&a.scheme, &g)?;
    info!("partitioning {} vertices with the {} scheme", g.vertex_count(), cfg.scheme());
    let (p, trace) = run_scheme(&g, &cfg, &RandomStream::new(a.scheme.seed))?;
    if let Some(path) = &a.output {
        let mut w = create(path)?;
        write_partition_csv(&p, &mut w)?;
        w.flush()?;
    }
    if let Some(path) = &a.trace {
        let mut w = create(path)?;
        write_trace(&trace, &mut w)?;
        w.flush()?;
    }
    let weak = p.max_diameter(&g, DiameterMode::Weak);
    let strong = p.max_diameter(&g, DiameterMode::Strong);
    let cut = p.cut_edges(&g);
    let bound = cfg.delta() * (1.0 + 1e-9);
    let within = match cfg.scheme().diameter_mode() {
        DiameterMode::Weak => weak <= bound,
        DiameterMode::Strong => strong <= bound,
    };
    let text = match a.format {
        SummaryFormat::Text => format!(
            "scheme {}\nvertices {}\nedges {}\nclusters {}\nmax_weak_diameter {weak}\nmax_strong_diameter {strong}\ncut_edges {cut}\n",
            cfg.scheme(),
            g.vertex_count(),
            g.edge_count(),
            p.cluster_count()
        ),
        SummaryFormat::Json => {
            serde_json::to_string_pretty(&json!({
                "scheme": cfg.scheme(),
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "clusters": p.cluster_count(),
                "max_weak_diameter": weak,
                "max_strong_diameter": strong,
                "cut_edges": cut,
            }))? + "\n"
        }
    };
    emit(None, &text)?;
    if !within {
        eprintln!("error: cluster diameter exceeds delta {}", cfg.delta());
    }
    Ok(within)
}

/// Reach of the threatening (or cutting) skeletons of each scheme.
fn default_u(scheme: Scheme, cutting: bool) -> f64 {
    match (scheme, cutting) {
        (Scheme::Weak, false) => 0.125,
        (Scheme::Weak, true) | (Scheme::Treewidth, _) => 0.5,
        (Scheme::Strong | Scheme::Genus, _) => 0.25,
    }
}

pub fn estimate(a: &EstimateArgs) -> Result<bool> {
    let g = load_graph(&a.graph).with_context(|| format!("reading {}", a.graph.display()))?;
    let cfg = load_config(&a.scheme, &g)?;
    let rng = RandomStream::new(a.scheme.seed);
    let n = g.vertex_count();
    let zs: Vec<usize> = if a.z.is_empty() {
        let k = n.min(10);
        (0..k).map(|i| i * n / k).collect()
    } else {
        a.z.clone()
    };
    let base = row(&g, &cfg, a.scheme.seed, a.trials);
    let mut rows = Vec::new();
    match a.metric {
        Metric::Padding => {
            for e in estimate_padding(&g, &cfg, &zs, &a.gammas, a.trials, &rng)? {
                rows.push(CsvRow {
                    gamma: Some(e.gamma),
                    metric: format!("padding:z={}", e.z),
                    value: e.point,
                    ci_low: Some(e.ci_low),
                    ci_high: Some(e.ci_high),
                    ..base.clone()
                });
            }
        }
        Metric::CutFraction => {
            let e = estimate_cut_fraction(&g, &cfg, a.trials, &rng)?;
            rows.push(CsvRow {
                metric: "cut_fraction".into(),
                value: e.mean,
                ci_low: Some(e.ci_low),
                ci_high: Some(e.ci_high),
                ..base
            });
        }
        Metric::Threateners | Metric::CuttingThreateners => {
            let cutting = a.metric == Metric::CuttingThreateners;
            let u = a.u.unwrap_or_else(|| default_u(cfg.scheme(), cutting));
            if let Some(&z) = zs.iter().find(|&&z| z >= n) {
                bail!(padded_core::Error::Argument(format!("vertex {z} is not in the graph")));
            }
            let counts = par_trials(a.trials, |t| {
                let (_, trace) = run_scheme(&g, &cfg, &rng.split(t as u64))?;
                let mut out = Vec::with_capacity(zs.len() * a.gammas.len());
                for &z in &zs {
                    for &gamma in &a.gammas {
                        out.push(if cutting {
                            count_cutting_threateners(&g, &trace, z, gamma, u)?
                        } else {
                            count_threateners(&g, &trace, z, gamma, u)?
                        } as f64);
                    }
                }
                Ok(out)
            })?;
            let label = if cutting { "cutting_threateners" } else { "threateners" };
            let mut k = 0;
            for &z in &zs {
                for &gamma in &a.gammas {
                    let column: Vec<f64> = counts.iter().map(|c| c[k]).collect();
                    let (mean, se) = mean_stderr(&column);
                    rows.push(CsvRow {
                        gamma: Some(gamma),
                        metric: format!("{label}:z={z}"),
                        value: mean,
                        ci_low: Some(mean - Z95 * se),
                        ci_high: Some(mean + Z95 * se),
                        ..base.clone()
                    });
                    k += 1;
                }
            }
        }
    }
    emit(a.output.as_deref(), &table(&rows, a.format)?)?;
    Ok(true)
}

pub fn verify(a: &VerifyArgs) -> Result<bool> {
    let g = load_graph(&a.graph).with_context(|| format!("reading {}", a.graph.display()))?;
    let trace = load_trace(&a.trace).with_context(|| format!("reading {}", a.trace.display()))?;
    let r = a.r.unwrap_or(trace.param);
    let report = verify_trace_invariants(&g, &trace, r)?;
    let mut ok = report.passed();
    let mut partition_issues = Vec::new();
    if let Some(path) = &a.partition {
        let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let assignment = padded_core::io::read_partition_csv(io::BufReader::new(f))?;
        if assignment.len() != g.vertex_count() {
            partition_issues.push(format!("partition has {} vertices, graph has {}", assignment.len(), g.vertex_count()));
        } else {
            let k = assignment.iter().max().map_or(0, |m| m + 1);
            let mode = trace.scheme.diameter_mode();
            for c in 0..k {
                let members = VertexSet::from_vertices(g.vertex_count(), (0..g.vertex_count()).filter(|&v| assignment[v] == c));
                if members.is_empty() {
                    continue;
                }
                let d = cluster_diameter(&g, &members, mode)?;
                if d > trace.delta * (1.0 + 1e-9) {
                    partition_issues.push(format!("cluster {c} has diameter {d} > {}", trace.delta));
                }
            }
        }
        ok &= partition_issues.is_empty();
    }
    let text = match a.format {
        SummaryFormat::Json => {
            serde_json::to_string_pretty(&json!({
                "passed": ok,
                "invariants": report,
                "partition_issues": partition_issues,
            }))? + "\n"
        }
        SummaryFormat::Text => {
            let mut s = format!(
                "scheme {}\nr {}\nmax_adjacent {}\ncomponents_checked {}\nbuffers_checked {}\ncones_checked {}\nviolations {}\n",
                report.scheme,
                report.r,
                report.max_adjacent,
                report.components_checked,
                report.buffers_checked,
                report.cones_checked,
                report.violations.len()
            );
            for v in &report.violations {
                s.push_str(&format!("violation {} event {}: {}\n", v.check, v.event, v.detail));
            }
            for p in &partition_issues {
                s.push_str(&format!("partition {p}\n"));
            }
            s.push_str(if ok { "passed\n" } else { "failed\n" });
            s
        }
    };
    emit(a.output.as_deref(), &text)?;
    Ok(ok)
}

fn family(a: &GenerateArgs) -> Result<Family> {
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| padded_core::Error::Argument(format!("family {:?} needs --{name}", a.family)))
    };
    Ok(match a.family {
        FamilyArg::Grid => Family::Grid {
            width: need(a.width, "width")?,
            height: need(a.height, "height")?,
        },
        FamilyArg::ToroidalGrid => Family::ToroidalGrid {
            width: need(a.width, "width")?,
            height: need(a.height, "height")?,
        },
        FamilyArg::DoubleTorus => Family::DoubleTorus {
            width: need(a.width, "width")?,
            height: need(a.height, "height")?,
        },
        FamilyArg::Path => Family::Path { n: need(a.n, "n")? },
        FamilyArg::Cycle => Family::Cycle { n: need(a.n, "n")? },
        FamilyArg::Complete => Family::Complete { n: need(a.n, "n")? },
        FamilyArg::KTree => Family::KTree {
            k: need(a.k, "k")?,
            n: need(a.n, "n")?,
        },
    })
}

fn with_suffix(prefix: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    s.into()
}

pub fn generate(a: &GenerateArgs) -> Result<bool> {
    let spec = GeneratorSpec {
        family: family(a)?,
        weights: match a.weights {
            WeightArg::Unit => WeightMode::Unit,
            WeightArg::Uniform => WeightMode::Uniform,
        },
    };
    let inst = generate_instance(&spec, &RandomStream::new(a.seed))?;
    let n = inst.graph.vertex_count();
    let gr = with_suffix(&a.output, ".gr");
    let mut w = create(&gr)?;
    write_graph(&inst.graph, &mut w)?;
    w.flush()?;
    let mut written = vec![gr];
    if let Some(td) = &inst.td {
        let p = with_suffix(&a.output, ".td");
        let mut w = create(&p)?;
        write_td(td, n, &mut w)?;
        w.flush()?;
        written.push(p);
    }
    if let Some(rot) = &inst.rotation {
        let p = with_suffix(&a.output, ".rot.json");
        let mut w = create(&p)?;
        write_rotation(rot, &mut w)?;
        w.flush()?;
        written.push(p);
    }
    let mut out = format!("{}\n", spec.label());
    for p in written {
        out.push_str(&format!("{}\n", p.display()));
    }
    emit(None, &out)?;
    Ok(true)
}

const DRIFT_S: [usize; 4] = [1, 2, 3, 5];
const DRIFT_H: [f64; 4] = [0.0, 0.25, 0.5, 1.0];

pub fn drift(a: &DriftArgs) -> Result<bool> {
    let rng = RandomStream::new(a.seed);
    let reports: Vec<DriftReport> = if a.grid {
        let configs: Vec<(usize, f64)> = DRIFT_S.iter().flat_map(|&s| DRIFT_H.map(|h| (s, h))).collect();
        par_trials(configs.len(), |i| {
            let (s, h) = configs[i];
            let stream = rng.split(i as u64);
            let state = PotentialState::random(s, &mut stream.split(0).rng())?;
            drift_check(&state, h, a.trials, &stream.split(1))
        })?
    } else {
        let state = PotentialState::new(a.x.clone(), a.s)?;
        vec![drift_check(&state, a.h, a.trials, &rng)?]
    };
    let ok = reports.iter().all(|r| r.passed);
    let text = match a.format {
        TableFormat::Json => serde_json::to_string_pretty(&reports)? + "\n",
        TableFormat::Csv => {
            let mut rows = Vec::new();
            for r in &reports {
                let base = CsvRow {
                    scheme: "drift".into(),
                    n: r.x.len(),
                    m: 0,
                    delta: r.h,
                    r_or_g: r.s,
                    gamma: None,
                    trials: r.trials,
                    seed: a.seed,
                    metric: "drift_mean".into(),
                    value: r.mean,
                    ci_low: Some(r.mean - Z95 * r.stderr),
                    ci_high: Some(r.mean + Z95 * r.stderr),
                };
                rows.push(CsvRow {
                    metric: "drift_bound".into(),
                    value: r.bound,
                    ci_low: None,
                    ci_high: None,
                    ..base.clone()
                });
                rows.push(base);
            }
            table(&rows, TableFormat::Csv)?
        }
    };
    emit(a.output.as_deref(), &text)?;
    if !ok {
        eprintln!("error: drift below bound");
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn gen_args(family: FamilyArg) -> GenerateArgs {
        GenerateArgs {
            family,
            width: Some(3),
            height: None,
            n: Some(5),
            k: None,
            weights: WeightArg::Unit,
            seed: 0,
            output: PathBuf::from("out/g"),
        }
    }

    #[test]
    fn family_flags() {
        assert_eq!(family(&gen_args(FamilyArg::Path)).unwrap(), Family::Path { n: 5 });
        assert!(family(&gen_args(FamilyArg::Grid)).is_err());
        assert!(family(&gen_args(FamilyArg::KTree)).is_err());
    }

    #[test]
    fn suffixes_keep_the_prefix() {
        assert_eq!(with_suffix(Path::new("out/g"), ".rot.json"), PathBuf::from("out/g.rot.json"));
        assert_eq!(with_suffix(Path::new("a.b"), ".gr"), PathBuf::from("a.b.gr"));
    }

    #[test]
    fn threatener_reach_per_scheme() {
        assert_eq!(default_u(Scheme::Weak, false), 0.125);
        assert_eq!(default_u(Scheme::Weak, true), 0.5);
        assert_eq!(default_u(Scheme::Treewidth, false), 0.5);
        assert_eq!(default_u(Scheme::Genus, true), 0.25);
    }

    #[test]
    fn csv_table_has_header() {
        let t = table(&[], TableFormat::Csv).unwrap();
        assert_eq!(t, format!("{CSV_HEADER}\n"));
        assert_eq!(table(&[], TableFormat::Json).unwrap(), "[]\n");
    }
}
