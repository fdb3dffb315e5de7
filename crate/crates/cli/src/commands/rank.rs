use std::time::Instant;

use ortho_lens::geometry::cosine;
use ortho_lens::markov::aggregate_projected_cosines;
use ortho_lens::{EmbeddingTable, Tolerance};
use serde::Serialize;

use super::{apply_exclusions, load, lookup, render, tolerance};
use crate::args::RankArgs;
use crate::error::CliResult;
use crate::filter::filter_near_duplicates;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranked {
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Serialize)]
pub struct RankResults {
    pub target: String,
    pub filtered: Vec<String>,
    /// By cosine with the target.
    pub before: Vec<Ranked>,
    /// By cosine with the target summed over the projected rounds.
    pub after: Vec<Ranked>,
}

fn top(table: &EmbeddingTable, v: usize, scores: &[f64], m: usize) -> Vec<Ranked> {
    let mut order: Vec<usize> = (0..table.len()).filter(|&u| u != v).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
        .into_iter()
        .take(m)
        .map(|u| Ranked {
            label: table.label(u).to_string(),
            score: scores[u],
        })
        .collect()
}

/// Top-`m` rows by plain cosine and by aggregate projected cosine.
pub fn rankings(
    table: &EmbeddingTable,
    v: usize,
    n_r: usize,
    d_r: usize,
    m: usize,
    seed: u64,
    tol: &Tolerance,
) -> CliResult<(Vec<Ranked>, Vec<Ranked>)> {
    let target = table.vector(v);
    let plain: Vec<f64> = table
        .vectors()
        .iter()
        .map(|u| cosine(u, target, tol).map(|c| c.value))
        .collect::<ortho_lens::Result<_>>()?;
    let projected = aggregate_projected_cosines(table, v, n_r, d_r, seed, tol)?;
    Ok((top(table, v, &plain, m), top(table, v, &projected, m)))
}

pub fn rank(args: &RankArgs) -> CliResult<String> {
    let started = Instant::now();
    let tol = tolerance(&args.tol)?;
    let loaded = load(&args.table, true)?;
    lookup(&loaded, &args.target)?;
    let base = apply_exclusions(loaded, args.filter.exclude.as_deref(), &[&args.target])?;
    let (table, filtered) = filter_near_duplicates(&base, &args.target, args.filter.filter_threshold)?;
    let v = lookup(&table, &args.target)?;
    let (before, after) = rankings(&table, v, args.nr, args.dr, args.topk, args.seed, &tol)?;
    let results = RankResults {
        target: args.target.clone(),
        filtered,
        before,
        after,
    };
    render("rank", args, results, &args.out, started)
}
