use std::time::Instant;

use ortho_lens::markov::{find_generalized_mb, sweep_candidate_counts, GmbParams, SelectionTier};
use serde::Serialize;

use super::{apply_exclusions, labels_of, load, lookup, render, tolerance};
use crate::args::GmbArgs;
use crate::error::{CliError, CliResult};
use crate::filter::filter_near_duplicates;
use crate::report::median;

#[derive(Debug, Serialize)]
pub struct ScoredLabel {
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub best_abs_cbar: f64,
    pub members: Vec<String>,
    pub cbar: f64,
}

#[derive(Debug, Serialize)]
pub struct TargetResult {
    pub target: String,
    /// Rows dropped as near-duplicates of the target.
    pub filtered: Vec<String>,
    pub rows_analyzed: usize,
    pub members: Vec<String>,
    pub cbar: f64,
    /// Test vectors left out of the average because their residual vanished.
    pub excluded_tests: usize,
    pub tier: SelectionTier,
    pub candidate_pool: Vec<ScoredLabel>,
    pub subsets_evaluated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
}

#[derive(Debug, Serialize)]
pub struct MedianRow {
    pub k: usize,
    pub median_best_abs_cbar: f64,
}

#[derive(Debug, Serialize)]
pub struct GmbResults {
    pub targets: Vec<TargetResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_median: Option<Vec<MedianRow>>,
}

pub fn gmb(args: &GmbArgs) -> CliResult<String> {
    let started = Instant::now();
    let results = gmb_results(args)?;
    render("gmb", args, results, &args.out, started)
}

pub fn gmb_results(args: &GmbArgs) -> CliResult<GmbResults> {
    if args.nr == 0 || args.dr == 0 || args.topk == 0 {
        return Err(CliError::usage("--nr, --dr and --topk must be >= 1"));
    }
    let tol = tolerance(&args.tol)?;
    let loaded = load(&args.table, true)?;
    let targets: Vec<&str> = args.target.iter().map(String::as_str).collect();
    for t in &targets {
        lookup(&loaded, t)?;
    }
    let base = apply_exclusions(loaded, args.filter.exclude.as_deref(), &targets)?;
    let ks = args.sweep_k.map(|r| r.values());

    let mut out = Vec::with_capacity(targets.len());
    for target in &targets {
        let (table, filtered) = filter_near_duplicates(&base, target, args.filter.filter_threshold)?;
        let v = lookup(&table, target)?;
        let params = GmbParams {
            n_r: args.nr,
            d_r: args.dr,
            k: args.topk,
            seed: args.seed,
            gmb_tol: args.gmb_tol,
        };
        let found = find_generalized_mb(&table, v, params, &tol)?;
        let sweep = match &ks {
            Some(ks) => Some(
                sweep_candidate_counts(&table, v, params, ks, &tol)?
                    .into_iter()
                    .map(|p| SweepRow {
                        k: p.k,
                        best_abs_cbar: p.best_abs_cbar,
                        members: labels_of(&table, &p.members),
                        cbar: p.cbar,
                    })
                    .collect(),
            ),
            None => None,
        };
        out.push(TargetResult {
            target: target.to_string(),
            filtered,
            rows_analyzed: table.len(),
            members: labels_of(&table, &found.members),
            cbar: found.cbar,
            excluded_tests: found.excluded,
            tier: found.tier,
            candidate_pool: found
                .candidate_pool
                .iter()
                .map(|c| ScoredLabel {
                    label: table.label(c.index).to_string(),
                    score: c.score,
                })
                .collect(),
            subsets_evaluated: found.subsets_evaluated,
            sweep,
        });
    }

    let sweep_median = ks.map(|ks| {
        ks.iter()
            .enumerate()
            .map(|(pos, &k)| {
                let column: Vec<f64> = out
                    .iter()
                    .map(|t| t.sweep.as_ref().expect("sweep requested")[pos].best_abs_cbar)
                    .collect();
                MedianRow {
                    k,
                    median_best_abs_cbar: median(&column),
                }
            })
            .collect()
    });
    Ok(GmbResults { targets: out, sweep_median })
}
