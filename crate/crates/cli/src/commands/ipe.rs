use std::time::Instant;

use ortho_lens::ipe::{
    boundaries_from_graph, boundaries_from_table, construct_ipe, default_epsilon_candidates, find_perfect_epsilon,
    is_perfect_perturbation, reduce_map, reduction_plan_for_rows, verify_embedding, PerfectnessOptions, PerfectnessReport,
    ReductionOutcome,
};
use ortho_lens::{UndirectedGraph, Vector};
use serde::Serialize;

use super::{labels_of, matrix_rows, read_graph, render, tolerance_from};
use crate::args::{IpeBuildArgs, IpeCheckArgs, IpeReduceArgs};
use crate::error::{CliError, CliResult};
use crate::format::{load_table, save_table};

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
enum EpsilonSource {
    Given,
    Searched,
}

#[derive(Debug, Serialize)]
struct BuildResults {
    vertices: usize,
    edges: usize,
    epsilon: f64,
    epsilon_source: EpsilonSource,
    perfectness: PerfectnessReport,
    gram: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    map_out: Option<String>,
}

fn perfectness_options(samples: usize, seed: u64) -> PerfectnessOptions {
    PerfectnessOptions {
        sampled_subsets: Some(samples),
        seed,
        ..PerfectnessOptions::default()
    }
}

/// The given perturbation factor, or the first perfect default candidate.
fn choose_epsilon(g: &UndirectedGraph, given: Option<f64>, opts: &PerfectnessOptions) -> CliResult<(f64, EpsilonSource)> {
    Ok(match given {
        Some(eps) => (eps, EpsilonSource::Given),
        None => (
            find_perfect_epsilon(g, &default_epsilon_candidates(g), opts)?,
            EpsilonSource::Searched,
        ),
    })
}

pub fn ipe_build(args: &IpeBuildArgs) -> CliResult<String> {
    let started = Instant::now();
    let g = read_graph(&args.graph)?;
    let opts = perfectness_options(args.perfect_samples, args.seed);
    let (epsilon, epsilon_source) = choose_epsilon(&g, args.epsilon, &opts)?;
    let perfectness = is_perfect_perturbation(&g, epsilon, &opts)?;
    let map = construct_ipe(&g, epsilon)?;
    if let Some(path) = &args.map_out {
        save_table(&map.to_table(), path, args.map_format)?;
    }
    let results = BuildResults {
        vertices: g.n(),
        edges: g.edge_count(),
        epsilon,
        epsilon_source,
        perfectness,
        gram: matrix_rows(&map.gram),
        map_out: args.map_out.as_ref().map(|p| p.display().to_string()),
    };
    render("ipe-build", args, results, &args.out, started)
}

#[derive(Debug, Serialize)]
struct Mismatch {
    i: String,
    j: String,
    conditioning: Vec<String>,
    orthogonal: bool,
    separated: bool,
}

#[derive(Debug, Serialize)]
struct CheckResults {
    triples_checked: u64,
    faithful: bool,
    mismatches: Vec<Mismatch>,
}

pub fn ipe_check(args: &IpeCheckArgs) -> CliResult<String> {
    let started = Instant::now();
    let tol = tolerance_from(args.tol, args.zero_tol)?;
    let loaded = load_table(&args.table.input, args.table.format)?;
    let table = if args.no_normalize { loaded } else { loaded.normalized() };
    let g = read_graph(&args.graph)?;
    if g.n() != table.len() {
        return Err(CliError::usage(format!(
            "graph has {} vertices but the table has {} rows",
            g.n(),
            table.len()
        )));
    }
    let v = verify_embedding(&table, &g, &tol, args.max_n)?;
    let results = CheckResults {
        triples_checked: v.triples_checked,
        faithful: v.faithful,
        mismatches: v
            .mismatches
            .iter()
            .map(|m| Mismatch {
                i: table.label(m.i).to_string(),
                j: table.label(m.j).to_string(),
                conditioning: labels_of(&table, &m.conditioning),
                orthogonal: m.orthogonal,
                separated: m.separated,
            })
            .collect(),
    };
    render("ipe-check", args, results, &args.out, started)
}

#[derive(Debug, Serialize)]
struct ReduceResults {
    /// `file` for rows read from `--input`, `graph` for a map built in memory.
    source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    map_epsilon: Option<f64>,
    labels: Vec<String>,
    boundaries: Vec<Vec<String>>,
    #[serde(flatten)]
    outcome: ReductionOutcome,
}

pub fn ipe_reduce(args: &IpeReduceArgs) -> CliResult<String> {
    let started = Instant::now();
    let tol = tolerance_from(args.tol, args.zero_tol)?;
    let graph = args.graph.as_deref().map(read_graph).transpose()?;
    let (source, map_epsilon, labels, rows): (_, _, Vec<String>, Vec<Vector>) = match (&args.input, &graph) {
        (Some(path), _) => {
            let t = load_table(path, args.format)?;
            ("file", None, t.labels().to_vec(), t.vectors().to_vec())
        }
        (None, Some(g)) => {
            let opts = perfectness_options(2000, args.seed);
            let (eps, _) = choose_epsilon(g, args.map_epsilon, &opts)?;
            let map = construct_ipe(g, eps)?;
            ("graph", Some(eps), map.to_table().labels().to_vec(), map.rows)
        }
        (None, None) => return Err(CliError::usage("ipe-reduce needs --input, --graph, or both")),
    };
    let boundaries = match &graph {
        Some(g) if g.n() != rows.len() => {
            return Err(CliError::usage(format!(
                "graph has {} vertices but there are {} rows",
                g.n(),
                rows.len()
            )))
        }
        Some(g) => boundaries_from_graph(g),
        None => {
            let table = ortho_lens::EmbeddingTable::new(labels.clone(), rows.clone())?.normalized();
            boundaries_from_table(&table, &tol)?
        }
    };
    let sizes: Vec<usize> = boundaries.iter().map(Vec::len).collect();
    let plan = reduction_plan_for_rows(&rows, args.epsilon, &sizes, args.seed)?;
    let outcome = reduce_map(&rows, &plan, &boundaries, args.cap_k, args.bypass_identity, &tol)?;
    let results = ReduceResults {
        source,
        map_epsilon,
        boundaries: boundaries
            .iter()
            .map(|b| b.iter().map(|&i| labels[i].clone()).collect())
            .collect(),
        labels,
        outcome,
    };
    render("ipe-reduce", args, results, &args.out, started)
}
