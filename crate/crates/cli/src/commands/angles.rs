use std::time::Instant;

use ortho_lens::geometry::{orthonormal_basis, principal_angles};
use ortho_lens::rng::stream_rng;
use ortho_lens::{EmbeddingTable, Subspace, Tolerance};
use serde::Serialize;

use super::{load, lookup_all, mean_std, render, tolerance};
use crate::args::AnglesArgs;
use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct Baseline {
    /// Rows from which the random spans were drawn.
    pub pool_size: usize,
    pub rank: usize,
    pub smallest_angles: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// Nearest-rank 5th percentile of `smallest_angles`.
    pub p5: f64,
}

#[derive(Debug, Serialize)]
pub struct AngleResults {
    pub boundary_rank: usize,
    pub reference_rank: usize,
    pub angles: Vec<f64>,
    pub smallest_angle: f64,
    pub baseline: Baseline,
    pub below_fifth_percentile: bool,
}

fn span(table: &EmbeddingTable, idx: &[usize], tol: &Tolerance) -> CliResult<Subspace> {
    Ok(orthonormal_basis(table.dim(), idx.iter().map(|&i| table.vector(i)), tol)?)
}

pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let pos = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[pos - 1]
}

pub fn angle_results(args: &AnglesArgs) -> CliResult<AngleResults> {
    if args.random_baselines == 0 {
        return Err(CliError::usage("--random-baselines must be >= 1"));
    }
    let tol = tolerance(&args.tol)?;
    let table = load(&args.table, true)?;
    let boundary = lookup_all(&table, &args.boundary)?;
    let reference = lookup_all(&table, &args.reference)?;
    let bspan = span(&table, &boundary, &tol)?;
    let rspan = span(&table, &reference, &tol)?;
    let angles = principal_angles(&bspan, &rspan)?;

    let pool: Vec<usize> = (0..table.len())
        .filter(|i| !boundary.contains(i) && !reference.contains(i))
        .collect();
    let rank = rspan.rank();
    if pool.len() < rank {
        return Err(CliError::usage(format!(
            "{} rows outside the two label sets cannot span rank {rank}",
            pool.len()
        )));
    }
    let smallest: Vec<f64> = (0..args.random_baselines as u64)
        .map(|b| {
            let mut rng = stream_rng(args.seed, b);
            let pick: Vec<usize> = rand::seq::index::sample(&mut rng, pool.len(), rank)
                .into_iter()
                .map(|p| pool[p])
                .collect();
            let s = span(&table, &pick, &tol)?;
            Ok(principal_angles(&bspan, &s)?[0])
        })
        .collect::<CliResult<_>>()?;
    let mut sorted = smallest.clone();
    sorted.sort_by(f64::total_cmp);
    let (mean, std) = mean_std(&smallest);
    let p5 = nearest_rank(&sorted, 0.05);
    Ok(AngleResults {
        boundary_rank: bspan.rank(),
        reference_rank: rank,
        smallest_angle: angles[0],
        below_fifth_percentile: angles[0] < p5,
        angles,
        baseline: Baseline {
            pool_size: pool.len(),
            rank,
            smallest_angles: smallest,
            mean,
            std,
            p5,
        },
    })
}

pub fn angles(args: &AnglesArgs) -> CliResult<String> {
    let started = Instant::now();
    let results = angle_results(args)?;
    render("angles", args, results, &args.out, started)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_percentiles() {
        let v: Vec<f64> = (1..=50).map(f64::from).collect();
        assert_eq!(nearest_rank(&v, 0.05), 3.0);
        assert_eq!(nearest_rank(&v[..10], 0.05), 1.0);
        assert_eq!(nearest_rank(&v, 1.0), 50.0);
    }
}
