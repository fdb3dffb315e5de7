use std::time::Instant;

use ortho_lens::markov::{enumerate_markov_boundaries, gmb_score, EnumerateOptions};
use serde::Serialize;

use super::{labels_of, load, lookup, render, tolerance};
use crate::args::MbExactArgs;
use crate::error::CliResult;

#[derive(Debug, Serialize)]
struct Boundary {
    members: Vec<String>,
    /// Average post-projection cosine; absent when no test vector remains.
    cbar: Option<f64>,
    projection_of_target: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct MbExactResults {
    target: String,
    boundaries: Vec<Boundary>,
    /// Largest distance between the target's projections onto any two
    /// boundaries.
    projection_spread: f64,
}

pub fn mb_exact(args: &MbExactArgs) -> CliResult<String> {
    let started = Instant::now();
    let tol = tolerance(&args.tol)?;
    let table = load(&args.table, true)?;
    let v = lookup(&table, &args.target)?;
    let opts = EnumerateOptions {
        max_size: args.max_size,
        max_n: args.max_n,
    };
    let found = enumerate_markov_boundaries(&table, v, &tol, opts)?;
    let mut spread = 0.0f64;
    for (i, a) in found.iter().enumerate() {
        for b in &found[i + 1..] {
            spread = spread.max((&a.projection_of_target - &b.projection_of_target).norm());
        }
    }
    let boundaries = found
        .iter()
        .map(|b| Boundary {
            members: labels_of(&table, &b.members),
            cbar: gmb_score(&table, v, &b.members, &tol).ok().map(|s| s.cbar),
            projection_of_target: b.projection_of_target.iter().copied().collect(),
        })
        .collect();
    let results = MbExactResults {
        target: args.target.clone(),
        boundaries,
        projection_spread: spread,
    };
    render("mb-exact", args, results, &args.out, started)
}
