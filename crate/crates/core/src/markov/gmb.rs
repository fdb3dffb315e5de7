//! Generalized Markov boundaries: the average post-projection cosine score
//! and the randomized candidate search.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_target;
use crate::error::{Error, Result};
use crate::geometry::{cosine_unchecked, Tolerance};
use crate::independence::{span_of, EmbeddingTable};
use crate::rng::stream_rng;

/// Largest candidate count whose `2^K - 1` subsets are searched exhaustively.
pub const MAX_CANDIDATES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmbScore {
    /// Mean post-projection cosine over the non-degenerate test vectors.
    pub cbar: f64,
    /// Test vectors dropped because a residual vanished.
    pub excluded: usize,
    /// Size of the test set `E \ ({v} + M)`.
    pub tested: usize,
}

/// Average cosine between the residual of `v` and the residuals of every
/// vector outside `{v} + M`, after projecting out `span(M)`.
///
/// Terms with a zero residual carry no direction and are left out of both
/// the sum and the count. When the target's own residual vanishes the score
/// is 0 with every test vector excluded.
pub fn gmb_score(table: &EmbeddingTable, v: usize, m: &[usize], tol: &Tolerance) -> Result<GmbScore> {
    check_target(table, v, m)?;
    let tested = table.len() - 1 - m.len();
    if tested == 0 {
        return Err(Error::invalid("score needs at least one vector outside the target and M"));
    }
    Ok(score_unchecked(table, v, m, tol))
}

fn score_unchecked(table: &EmbeddingTable, v: usize, m: &[usize], tol: &Tolerance) -> GmbScore {
    let tested = table.len() - 1 - m.len();
    let span = span_of(table, m, tol);
    let rv = span.residual_unchecked(table.vector(v));
    if rv.norm() <= tol.zero_tol {
        return GmbScore {
            cbar: 0.0,
            excluded: tested,
            tested,
        };
    }
    let mut sum = 0.0;
    let mut used = 0usize;
    for u in (0..table.len()).filter(|u| *u != v && !m.contains(u)) {
        let c = cosine_unchecked(&rv, &span.residual_unchecked(table.vector(u)), tol);
        if !c.degenerate {
            sum += c.value;
            used += 1;
        }
    }
    GmbScore {
        cbar: if used == 0 { 0.0 } else { sum / used as f64 },
        excluded: tested - used,
        tested,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmbParams {
    /// Number of random subspaces.
    pub n_r: usize,
    /// Vectors per random subspace.
    pub d_r: usize,
    /// Candidates kept for the exhaustive subset search.
    pub k: usize,
    pub seed: u64,
    /// Scores with magnitude at or below this count as zero when choosing
    /// the smallest qualifying subset.
    pub gmb_tol: f64,
}

impl Default for GmbParams {
    fn default() -> Self {
        GmbParams {
            n_r: 10,
            d_r: 50,
            k: 10,
            seed: 0,
            gmb_tol: 0.02,
        }
    }
}

impl GmbParams {
    fn validate(&self, n: usize) -> Result<()> {
        if self.n_r == 0 {
            return Err(Error::invalid("n_r must be >= 1"));
        }
        if self.d_r > n - 1 {
            return Err(Error::invalid(format!("d_r = {} exceeds n - 1 = {}", self.d_r, n - 1)));
        }
        if self.k == 0 || self.k > n - 1 {
            return Err(Error::invalid(format!("K = {} must lie in 1..={}", self.k, n - 1)));
        }
        if self.k > MAX_CANDIDATES {
            return Err(Error::Refused {
                what: "candidate count K (2^K subsets)",
                value: self.k,
                limit: MAX_CANDIDATES,
            });
        }
        if !(self.gmb_tol >= 0.0) {
            return Err(Error::invalid("gmb_tol must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub index: usize,
    /// Sum of post-projection cosines with the target over all rounds.
    pub score: f64,
}

/// Which rule picked the returned subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionTier {
    /// Smallest subset with `|cbar| <= gmb_tol`.
    WithinTolerance,
    /// No subset qualified; smallest `|cbar|` overall.
    MinimumScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmbResult {
    pub target: usize,
    pub members: Vec<usize>,
    pub cbar: f64,
    pub excluded: usize,
    pub tier: SelectionTier,
    /// Top-K candidates in rank order.
    pub candidate_pool: Vec<Candidate>,
    pub subsets_evaluated: usize,
    pub params: GmbParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub k: usize,
    /// Smallest `|cbar|` over all nonempty subsets of the top-k candidates.
    pub best_abs_cbar: f64,
    /// Subset the selection rule picks among those candidates.
    pub members: Vec<usize>,
    pub cbar: f64,
}

struct Scored {
    members: Vec<usize>,
    score: GmbScore,
}

/// Sums, for every `u != v`, the post-projection cosine with `v` over `n_r`
/// random subspaces of `d_r` vectors drawn from everything but `v`. Round `i`
/// draws from stream `i` of `seed`; entry `v` of the result is 0.
pub fn aggregate_projected_cosines(
    table: &EmbeddingTable,
    v: usize,
    n_r: usize,
    d_r: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<Vec<f64>> {
    table.check_index(v)?;
    if n_r == 0 {
        return Err(Error::invalid("n_r must be >= 1"));
    }
    if d_r > table.len() - 1 {
        return Err(Error::invalid(format!("d_r = {d_r} exceeds n - 1 = {}", table.len() - 1)));
    }
    let p = GmbParams {
        n_r,
        d_r,
        seed,
        ..GmbParams::default()
    };
    Ok(aggregate_scores(table, v, &p, tol))
}

fn aggregate_scores(table: &EmbeddingTable, v: usize, p: &GmbParams, tol: &Tolerance) -> Vec<f64> {
    let n = table.len();
    let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
    let rounds: Vec<Vec<f64>> = (0..p.n_r as u64)
        .into_par_iter()
        .map(|round| {
            let mut rng = stream_rng(p.seed, round);
            let mut picked: Vec<usize> = sample(&mut rng, others.len(), p.d_r)
                .into_iter()
                .map(|pos| others[pos])
                .collect();
            picked.sort_unstable();
            let span = span_of(table, &picked, tol);
            let rv = span.residual_unchecked(table.vector(v));
            (0..n)
                .map(|u| {
                    if u == v {
                        0.0
                    } else {
                        cosine_unchecked(&rv, &span.residual_unchecked(table.vector(u)), tol).value
                    }
                })
                .collect()
        })
        .collect();
    let mut total = vec![0.0; n];
    for round in &rounds {
        for (t, x) in total.iter_mut().zip(round) {
            *t += x;
        }
    }
    total
}

fn rank_candidates(aggregate: &[f64], v: usize, k: usize) -> Vec<Candidate> {
    let mut pool: Vec<Candidate> = aggregate
        .iter()
        .enumerate()
        .filter(|(u, _)| *u != v)
        .map(|(index, &score)| Candidate { index, score })
        .collect();
    pool.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
    pool.truncate(k);
    pool
}

/// Scores every nonempty subset of `pool`; entry `mask - 1` belongs to the
/// subset whose bit `j` selects `pool[j]`. Subsets that leave no test vector
/// are `None`.
fn score_subsets(table: &EmbeddingTable, v: usize, pool: &[Candidate], tol: &Tolerance) -> Vec<Option<Scored>> {
    let total = table.len() - 1;
    (1u32..(1u32 << pool.len()))
        .into_par_iter()
        .map(|mask| {
            let mut members: Vec<usize> = pool
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, c)| c.index)
                .collect();
            members.sort_unstable();
            (members.len() < total).then(|| Scored {
                score: score_unchecked(table, v, &members, tol),
                members,
            })
        })
        .collect()
}

/// Applies the two-tier rule to the subsets with mask below `limit`.
fn select(scored: &[Option<Scored>], limit: usize, gmb_tol: f64) -> Option<(&Scored, SelectionTier)> {
    let live = || scored[..limit - 1].iter().flatten();
    let lex = |a: &Scored, b: &Scored| a.members.cmp(&b.members);
    let within = live()
        .filter(|s| s.score.cbar.abs() <= gmb_tol)
        .min_by(|a, b| {
            a.members
                .len()
                .cmp(&b.members.len())
                .then(a.score.cbar.abs().total_cmp(&b.score.cbar.abs()))
                .then_with(|| lex(a, b))
        });
    if let Some(s) = within {
        return Some((s, SelectionTier::WithinTolerance));
    }
    live()
        .min_by(|a, b| {
            a.score
                .cbar
                .abs()
                .total_cmp(&b.score.cbar.abs())
                .then(a.members.len().cmp(&b.members.len()))
                .then_with(|| lex(a, b))
        })
        .map(|s| (s, SelectionTier::MinimumScore))
}

fn prepare(table: &EmbeddingTable, v: usize, p: &GmbParams) -> Result<()> {
    table.check_index(v)?;
    if table.len() < 2 {
        return Err(Error::invalid("table needs at least two vectors"));
    }
    p.validate(table.len())
}

/// Randomized search for a generalized Markov boundary of `v`.
///
/// Candidates are the `K` vectors whose cosine with `v`, summed over `n_r`
/// random subspaces projected out, is largest (ties to the lower index).
/// Every nonempty candidate subset is then scored; the smallest subset with
/// `|cbar| <= gmb_tol` wins, falling back to the smallest `|cbar|` when none
/// qualifies. Remaining ties go to the lexicographically smaller index list.
pub fn find_generalized_mb(table: &EmbeddingTable, v: usize, params: GmbParams, tol: &Tolerance) -> Result<GmbResult> {
    prepare(table, v, &params)?;
    let aggregate = aggregate_scores(table, v, &params, tol);
    let pool = rank_candidates(&aggregate, v, params.k);
    let scored = score_subsets(table, v, &pool, tol);
    let (best, tier) =
        select(&scored, scored.len() + 1, params.gmb_tol).ok_or_else(|| Error::invalid("no candidate subset leaves a test vector"))?;
    Ok(GmbResult {
        target: v,
        members: best.members.clone(),
        cbar: best.score.cbar,
        excluded: best.score.excluded,
        tier,
        subsets_evaluated: scored.iter().flatten().count(),
        candidate_pool: pool,
        params,
    })
}

/// Runs the candidate search once with `K = max(ks)` and reports, for every
/// `k` in `ks`, the best achievable `|cbar|` and the selected subset among
/// the top-`k` candidates. Candidate lists are nested in `k`, so the best
/// score never increases with `k`.
pub fn sweep_candidate_counts(
    table: &EmbeddingTable,
    v: usize,
    params: GmbParams,
    ks: &[usize],
    tol: &Tolerance,
) -> Result<Vec<SweepPoint>> {
    let k_max = ks.iter().copied().max().ok_or_else(|| Error::invalid("empty K sweep"))?;
    if ks.contains(&0) {
        return Err(Error::invalid("K sweep values must be >= 1"));
    }
    let params = GmbParams { k: k_max, ..params };
    prepare(table, v, &params)?;
    let aggregate = aggregate_scores(table, v, &params, tol);
    let pool = rank_candidates(&aggregate, v, k_max);
    let scored = score_subsets(table, v, &pool, tol);
    ks.iter()
        .map(|&k| {
            let limit = 1usize << k;
            let best_abs = scored[..limit - 1]
                .iter()
                .flatten()
                .map(|s| s.score.cbar.abs())
                .min_by(f64::total_cmp)
                .ok_or_else(|| Error::invalid("no candidate subset leaves a test vector"))?;
            let (pick, _) = select(&scored, limit, params.gmb_tol).expect("nonempty when best_abs exists");
            Ok(SweepPoint {
                k,
                best_abs_cbar: best_abs,
                members: pick.members.clone(),
                cbar: pick.score.cbar,
            })
        })
        .collect()
}
