//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use ortho_lens::independence::{check_axioms, Axiom, CheckConfig, PartialOrthogonality};
use ortho_lens::ipe::{
    boundaries_from_graph, construct_ipe, default_epsilon_candidates, find_perfect_epsilon, is_perfect_perturbation,
    jl_dimension, jl_project, max_inner_product_distortion, reduce_map, reduction_plan, verify_ipe, PerfectnessOptions,
    PerfectnessWitness,
};
use ortho_lens::markov::{enumerate_markov_boundaries, find_generalized_mb, gmb_score, sweep_candidate_counts, EnumerateOptions, GmbParams};
use ortho_lens::rng::stream_rng;
use ortho_lens::{synth, EmbeddingTable, Tolerance, UndirectedGraph};
use ortho_lens_cli::format::{load_table, TableFormat};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn axiom_suite() -> Outcome {
    let tol = Tolerance::default().with_ortho_tol(1e-8);
    let mut premises = 0usize;
    for seed in 0..100u64 {
        let mut rng = stream_rng(seed, 1);
        let n = rng.random_range(3..=10);
        let d = rng.random_range(2..=6);
        let t = synth::sparse_ternary_table(n, d, 0.35, seed);
        let model = PartialOrthogonality::new(&t, tol);
        let universe: Vec<usize> = (0..n).collect();
        let r = check_axioms(&model, &universe, &Axiom::COMPOSITIONAL_SEMIGRAPHOID, CheckConfig { trials: 1000, seed })
            .map_err(|e| e.to_string())?;
        ensure(r.is_clean(), || format!("table {seed}: {:?}", r.violations[0]))?;
        premises += r.tallies.iter().map(|t| t.premises_held).sum::<usize>();
    }
    for seed in 0..40u64 {
        let n = 3 + (seed % 4) as usize;
        let t = synth::independent_ternary_table(n, n + 2, 0.3, seed);
        let model = PartialOrthogonality::new(&t, tol);
        let universe: Vec<usize> = (0..n).collect();
        let r = check_axioms(&model, &universe, &[Axiom::Intersection], CheckConfig { trials: 1000, seed })
            .map_err(|e| e.to_string())?;
        ensure(r.is_clean(), || format!("independent table {seed}: {:?}", r.violations[0]))?;
    }
    let violation = (0..50u64).find_map(|seed| {
        let t = synth::sparse_ternary_table(8, 3, 0.4, seed);
        let model = PartialOrthogonality::new(&t, tol);
        let universe: Vec<usize> = (0..8).collect();
        check_axioms(&model, &universe, &[Axiom::Intersection], CheckConfig { trials: 1000, seed })
            .ok()
            .and_then(|r| r.violations.first().cloned())
            .map(|v| (seed, v))
    });
    let (seed, v) = violation.ok_or("no intersection violation on any n = 8, d = 3 table")?;
    Ok(format!(
        "0 violations of A1-A4, A6 over 100 tables ({premises} premises held); A5 clean on 40 independent tables; \
         A5 fails on table {seed}: A={:?} B={:?} C={:?} D={:?}",
        v.a, v.b, v.c, v.d
    ))
}

fn rank(t: &EmbeddingTable, idx: &[usize]) -> usize {
    if idx.is_empty() {
        return 0;
    }
    let cols: Vec<_> = idx.iter().map(|&i| t.vector(i).clone()).collect();
    DMatrix::from_columns(&cols).rank(1e-9)
}

fn boundary_table(seed: u64) -> EmbeddingTable {
    let mut rng = stream_rng(seed, 7);
    let n = rng.random_range(3..=12);
    let d = rng.random_range(2..=8);
    match seed % 3 {
        0 => synth::gaussian_table(n, d, seed),
        1 => synth::sparse_ternary_table(n, d, 0.35, seed),
        _ => synth::independent_ternary_table(n.min(d), d, 0.4, seed),
    }
}

/// Criteria 2 and 3 share one pass; returns the largest boundary score too.
fn boundary_properties() -> Result<(String, f64, usize), String> {
    let tol = Tolerance::default();
    let (mut boundaries, mut unique_checked, mut max_score, mut scored) = (0usize, 0usize, 0.0f64, 0usize);
    for seed in 0..200u64 {
        let t = boundary_table(seed);
        let n = t.len();
        let all: Vec<usize> = (0..n).collect();
        let independent = rank(&t, &all) == n;
        for v in 0..n {
            let bs = enumerate_markov_boundaries(&t, v, &tol, EnumerateOptions::default()).map_err(|e| e.to_string())?;
            boundaries += bs.len();
            let p0 = &bs[0].projection_of_target;
            for b in &bs[1..] {
                let gap = (&b.projection_of_target - p0).norm();
                ensure(gap <= 1e-8, || format!("table {seed} target {v}: projections differ by {gap:e}"))?;
            }
            let rest: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            if rank(&t, &rest) == rank(&t, &all) {
                for b in &bs {
                    let gap = (&b.projection_of_target - t.vector(v)).norm();
                    ensure(gap <= 1e-8, || format!("table {seed} target {v}: in-span projection off by {gap:e}"))?;
                }
            }
            if independent {
                unique_checked += 1;
                ensure(bs.len() == 1, || format!("table {seed} target {v}: {} boundaries", bs.len()))?;
            }
            for b in bs.iter().filter(|b| b.members.len() + 1 < n) {
                let s = gmb_score(&t, v, &b.members, &tol).map_err(|e| e.to_string())?;
                max_score = max_score.max(s.cbar.abs());
                scored += 1;
            }
        }
    }
    Ok((
        format!("{boundaries} boundaries over 200 tables agree; {unique_checked} targets on independent tables have a unique boundary"),
        max_score,
        scored,
    ))
}

fn gmb_recovery() -> Outcome {
    let cfg = synth::PlantedGmbConfig::default();
    let ks: Vec<usize> = (1..=10).collect();
    let mut subset = 0;
    let mut columns = vec![Vec::new(); ks.len()];
    for seed in 0..50u64 {
        let inst = synth::planted_gmb(&cfg, seed);
        let params = GmbParams {
            n_r: 20,
            d_r: 20,
            k: 10,
            seed,
            gmb_tol: 0.02,
        };
        let r = find_generalized_mb(&inst.table, inst.target, params, &Tolerance::default()).map_err(|e| e.to_string())?;
        subset += r.members.iter().all(|m| inst.planted.contains(m)) as usize;
        let sweep = sweep_candidate_counts(&inst.table, inst.target, params, &ks, &Tolerance::default())
            .map_err(|e| e.to_string())?;
        for (col, p) in columns.iter_mut().zip(&sweep) {
            col.push(p.best_abs_cbar);
        }
    }
    let medians: Vec<f64> = columns.iter().map(|c| ortho_lens_cli::report::median(c)).collect();
    ensure(subset >= 40, || format!("members within the planted set in only {subset} of 50 seeds"))?;
    ensure(medians.windows(2).all(|w| w[1] <= w[0]), || format!("medians increase: {medians:?}"))?;
    Ok(format!(
        "subset of planted in {subset}/50 seeds; median best |cbar| K=1: {:.4}, K=10: {:.2e}",
        medians[0], medians[9]
    ))
}

fn faithfulness() -> Outcome {
    for seed in 0..50u64 {
        let n = 2 + (seed % 6) as usize;
        let g = if seed % 2 == 0 {
            synth::random_graph(n, 0.4, seed)
        } else {
            synth::random_connected_graph(n, 0.3, seed)
        };
        let eps = find_perfect_epsilon(&g, &default_epsilon_candidates(&g), &PerfectnessOptions::default())
            .map_err(|e| e.to_string())?;
        let map = construct_ipe(&g, eps).map_err(|e| e.to_string())?;
        let r = verify_ipe(&map, &g, &Tolerance::default(), 10).map_err(|e| e.to_string())?;
        ensure(r.faithful, || format!("graph {seed}: {:?}", r.mismatches[0]))?;
    }
    let map = construct_ipe(&UndirectedGraph::path(3), 0.5).map_err(|e| e.to_string())?;
    let hand = DMatrix::from_row_slice(3, 3, &[1.5, -1.0, 0.5, -1.0, 2.0, -1.0, 0.5, -1.0, 1.5]);
    let err = (&map.gram - &hand).amax();
    ensure(err <= 1e-10, || format!("path gram off by {err:e}"))?;
    Ok(format!("50 graphs faithful; path gram within {err:.1e} of the hand inverse"))
}

fn perfect_perturbation() -> Outcome {
    let opts = PerfectnessOptions::default();
    let path = UndirectedGraph::path(3);
    let check = |g: &UndirectedGraph, eps: f64| is_perfect_perturbation(g, eps, &opts).map_err(|e| e.to_string());
    ensure(check(&path, 0.5)?.perfect, || "path at 0.5 not perfect".into())?;
    let singular = check(&path, std::f64::consts::FRAC_1_SQRT_2)?;
    ensure(
        !singular.perfect && matches!(singular.witness, Some(PerfectnessWitness::Singular { .. })),
        || format!("path at 1/sqrt2: {singular:?}"),
    )?;
    for g in [path.clone(), UndirectedGraph::complete(3), synth::random_connected_graph(6, 0.3, 1)] {
        let r = check(&g, 0.0)?;
        ensure(
            !r.perfect && matches!(r.witness, Some(PerfectnessWitness::Mismatch { .. })),
            || format!("epsilon 0 accepted: {r:?}"),
        )?;
    }
    Ok("path 0.5 perfect; 1/sqrt2 singular; epsilon 0 rejected on 3 graphs".into())
}

fn reduction() -> Outcome {
    let k8 = jl_dimension(8, 0.5);
    ensure(k8 == 222, || format!("k(8, 1/2) = {k8}"))?;
    let k = jl_dimension(64, 0.5) as usize;
    let jl_good = (0..5u64)
        .filter(|&seed| {
            let vs = synth::random_unit_vectors(64, 64, seed);
            let out = jl_project(&vs, k, seed + 100).unwrap();
            max_inner_product_distortion(&vs, &out).unwrap() <= 0.5
        })
        .count();
    ensure(jl_good >= 4, || format!("distortion within 0.5 in only {jl_good} of 5 seeds"))?;
    let g = UndirectedGraph::empty(16);
    let map = construct_ipe(&g, 0.3).map_err(|e| e.to_string())?;
    let b = boundaries_from_graph(&g);
    let mut bound_good = 0;
    for seed in 0..5 {
        let plan = reduction_plan(&map, 0.5, &[0; 16], seed).map_err(|e| e.to_string())?;
        let out = reduce_map(&map.rows, &plan, &b, None, false, &Tolerance::default()).map_err(|e| e.to_string())?;
        bound_good += out.check.holds as usize;
    }
    ensure(bound_good >= 4, || format!("edgeless bound met in only {bound_good} of 5 seeds"))?;
    Ok(format!(
        "k(8, 1/2) = 222; n = 64 at k = {k}: {jl_good}/5 seeds within 0.5; edgeless map: {bound_good}/5 seeds"
    ))
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ortho-lens")).args(args).output().unwrap()
}

fn json(out: &std::process::Output) -> Result<serde_json::Value, String> {
    ensure(out.status.code() == Some(0), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn cli(dir: &Path) -> Outcome {
    let p = |name: &str| dir.join(name).display().to_string();
    let (planted, cats_t, cats_j, ang) = (p("planted.txt"), p("cats.bin"), p("cats.json"), p("ang.txt"));
    json(&bin(&["synth", "planted", "--seed", "7", "--table-out", &planted]))?;
    json(&bin(&["synth", "planted", "--seed", "7", "--table-out", &p("planted.bin"), "--table-format", "binary"]))?;
    json(&bin(&["synth", "categories", "--seed", "1", "--table-out", &cats_t, "--table-format", "binary", "--categories-out", &cats_j]))?;
    json(&bin(&["synth", "angles", "--seed", "1", "--table-out", &ang]))?;

    let gmb = ["gmb", "--input", &planted, "--target", "target", "--nr", "20", "--dr", "20", "--seed", "7", "--sweep-k", "1..10"];
    let cond = ["condition-matrix", "--input", &cats_t, "--categories", &cats_j];
    for argv in [&gmb[..], &cond[..]] {
        let (a, b) = (bin(argv), bin(argv));
        ensure(a.status.success() && a.stdout == b.stdout, || format!("{} output differs between runs", argv[0]))?;
    }

    let text = load_table(Path::new(&planted), Some(TableFormat::Text)).map_err(|e| e.to_string())?;
    let binary = load_table(Path::new(&p("planted.bin")), None).map_err(|e| e.to_string())?;
    ensure(text == binary, || "text and binary loaders disagree".into())?;

    let codes = [
        bin(&["gmb", "--input", &planted, "--target", "absent"]).status.code(),
        bin(&["mb-exact", "--input", &planted, "--target", "target"]).status.code(),
        bin(&gmb).status.code(),
    ];
    ensure(codes == [Some(2), Some(3), Some(0)], || format!("exit codes {codes:?}"))?;

    let c = json(&bin(&cond))?;
    let z = &c["results"]["z"];
    let rows = z.as_array().ok_or("no z matrix")?.len();
    for r in 0..rows {
        for col in (0..rows).filter(|&col| col != r) {
            let (diag, off) = (z[r][r].as_f64().unwrap_or(f64::NAN), z[r][col].as_f64().unwrap_or(f64::NAN));
            ensure(diag > off, || format!("row {r}: diagonal {diag} vs column {col} {off}"))?;
        }
    }

    let a = json(&bin(&["angles", "--input", &ang, "--boundary", "center1,center2", "--reference", "reference"]))?;
    let (smallest, p5) = (
        a["results"]["smallest_angle"].as_f64().unwrap_or(f64::NAN),
        a["results"]["baseline"]["p5"].as_f64().unwrap_or(f64::NAN),
    );
    ensure(smallest < p5, || format!("smallest angle {smallest} not below baseline p5 {p5}"))?;
    Ok(format!(
        "byte-identical reruns; loaders agree; exit codes 2/3/0; {rows}x{rows} z-matrix diagonal dominant; \
         angle {smallest:.3} < p5 {p5:.3}"
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut failed = 0;
    let mut report = |id: u32, name: &str, limit: Duration, run: &mut dyn FnMut() -> Outcome| {
        let started = Instant::now();
        let outcome = run();
        let took = started.elapsed();
        let outcome = outcome.and_then(|detail| {
            if took <= limit {
                Ok(detail)
            } else {
                Err(format!("{detail}; runtime {took:.1?} exceeds {limit:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {id} ({name}, {took:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}, {took:.2?}): {detail}");
            }
        }
    };

    let mut boundary_scores = None;
    report(1, "graphoid axioms", Duration::from_secs(60), &mut axiom_suite);
    report(2, "Markov boundaries", Duration::from_secs(300), &mut || {
        let (detail, max_score, scored) = boundary_properties()?;
        boundary_scores = Some((max_score, scored));
        Ok(detail)
    });
    report(3, "boundary scores vanish", Duration::from_secs(300), &mut || {
        let (max_score, scored) = boundary_scores.ok_or("boundary pass did not complete")?;
        ensure(max_score <= 1e-8, || format!("largest |cbar| {max_score:e}"))?;
        Ok(format!("{scored} boundaries, largest |cbar| {max_score:.1e}"))
    });
    report(4, "generalized boundary recovery", Duration::from_secs(120), &mut gmb_recovery);
    report(5, "embedding faithfulness", Duration::from_secs(120), &mut faithfulness);
    report(6, "perfect perturbation", Duration::from_secs(1), &mut perfect_perturbation);
    report(7, "random projection", Duration::from_secs(120), &mut reduction);
    report(8, "command line", Duration::from_secs(180), &mut || cli(dir.path()));

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
