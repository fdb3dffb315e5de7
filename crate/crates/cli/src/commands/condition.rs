use std::time::Instant;

use indexmap::IndexMap;
use ortho_lens::geometry::{cosine, orthonormal_basis, projected_cosine};
use ortho_lens::rng::stream_rng;
use ortho_lens::{EmbeddingTable, Subspace, Tolerance};
use rand::Rng;
use serde::Serialize;

use super::{load, lookup_all, mean_std, render, tolerance};
use crate::args::ConditionArgs;
use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct ConditionResults {
    /// Row `r` conditions on category `r`'s own embedding; column `c`
    /// averages over the member pairs of category `c`.
    pub categories: Vec<String>,
    pub null_conditioning: &'static str,
    pub null_pairs: usize,
    /// Mean cosine reduction; `null` when every pair was degenerate.
    pub raw: Vec<Vec<Option<f64>>>,
    pub z: Vec<Vec<Option<f64>>>,
    pub null_mean: Vec<f64>,
    pub null_std: Vec<f64>,
}

/// Parses the categories file, preserving key order.
pub fn read_categories(path: &std::path::Path) -> CliResult<IndexMap<String, Vec<String>>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Cosine before conditioning minus cosine after projecting out `span`;
/// `None` when either residual vanishes.
fn reduction(table: &EmbeddingTable, i: usize, j: usize, span: &Subspace, tol: &Tolerance) -> CliResult<Option<f64>> {
    let (a, b) = (table.vector(i), table.vector(j));
    let before = cosine(a, b, tol)?;
    let after = projected_cosine(a, b, span, tol)?;
    Ok((!before.degenerate && !after.degenerate).then_some(before.value - after.value))
}

fn mean_reduction(
    table: &EmbeddingTable,
    pairs: &[(usize, usize)],
    span: &Subspace,
    tol: &Tolerance,
) -> CliResult<Vec<f64>> {
    let mut values = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        if let Some(r) = reduction(table, i, j, span, tol)? {
            values.push(r);
        }
    }
    Ok(values)
}

pub fn condition_matrix_results(args: &ConditionArgs) -> CliResult<ConditionResults> {
    if args.null_samples == 0 {
        return Err(CliError::usage("--null-samples must be >= 1"));
    }
    let tol = tolerance(&args.tol)?;
    let table = load(&args.table, true)?;
    if table.len() < 2 {
        return Err(CliError::usage("the table needs at least two rows"));
    }
    let categories = read_categories(&args.categories)?;
    if categories.is_empty() {
        return Err(CliError::usage("the categories file lists no categories"));
    }
    let mut all: Vec<&String> = categories.keys().collect();
    all.extend(categories.values().flatten());
    all.dedup();
    lookup_all(&table, &all)?;

    let heads: Vec<usize> = lookup_all(&table, &categories.keys().collect::<Vec<_>>())?;
    let member_pairs: Vec<Vec<(usize, usize)>> = categories
        .values()
        .map(|members| {
            let idx = lookup_all(&table, members)?;
            Ok(idx
                .iter()
                .enumerate()
                .flat_map(|(p, &i)| idx[p + 1..].iter().map(move |&j| (i, j)))
                .filter(|(i, j)| i != j)
                .collect())
        })
        .collect::<CliResult<_>>()?;

    let mut rng = stream_rng(args.seed, 0);
    let n = table.len();
    let null_pairs: Vec<(usize, usize)> = (0..args.null_samples)
        .map(|_| {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            (i, j)
        })
        .collect();

    let mut results = ConditionResults {
        categories: categories.keys().cloned().collect(),
        null_conditioning: "per_row",
        null_pairs: args.null_samples,
        raw: Vec::new(),
        z: Vec::new(),
        null_mean: Vec::new(),
        null_std: Vec::new(),
    };
    for &head in &heads {
        let span = orthonormal_basis(table.dim(), [table.vector(head)], &tol)?;
        let null = mean_reduction(&table, &null_pairs, &span, &tol)?;
        let (mu, sigma) = if null.is_empty() { (0.0, 0.0) } else { mean_std(&null) };
        let mut raw_row = Vec::with_capacity(heads.len());
        let mut z_row = Vec::with_capacity(heads.len());
        for pairs in &member_pairs {
            let values = mean_reduction(&table, pairs, &span, &tol)?;
            let raw = (!values.is_empty()).then(|| mean_std(&values).0);
            raw_row.push(raw);
            z_row.push(raw.filter(|_| sigma > 0.0).map(|r| (r - mu) / sigma));
        }
        results.raw.push(raw_row);
        results.z.push(z_row);
        results.null_mean.push(mu);
        results.null_std.push(sigma);
    }
    Ok(results)
}

pub fn condition_matrix(args: &ConditionArgs) -> CliResult<String> {
    let started = Instant::now();
    let results = condition_matrix_results(args)?;
    render("condition-matrix", args, results, &args.out, started)
}
