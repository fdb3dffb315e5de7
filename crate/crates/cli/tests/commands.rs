use std::path::{Path, PathBuf};

use clap::Parser;
use ortho_lens::{synth, EmbeddingTable, Vector};
use ortho_lens_cli::commands::{execute, rankings};
use ortho_lens_cli::format::{save_table, TableFormat};
use ortho_lens_cli::Cli;
use serde_json::Value;

fn run(args: &[&str]) -> Value {
    let cli = Cli::try_parse_from(std::iter::once("ortho-lens").chain(args.iter().copied())).unwrap();
    let (json, _) = execute(&cli.command).unwrap();
    serde_json::from_str(&json).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn write_table(dir: &Path, name: &str, table: &EmbeddingTable) -> String {
    let p = dir.join(name);
    save_table(table, &p, TableFormat::Binary).unwrap();
    p.display().to_string()
}

fn labels(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn table(rows: &[(&str, Vec<f64>)]) -> EmbeddingTable {
    EmbeddingTable::new(
        rows.iter().map(|r| r.0.to_string()).collect(),
        rows.iter().map(|r| Vector::from_vec(r.1.clone())).collect(),
    )
    .unwrap()
}

#[test]
fn gmb_recovers_planted_members_at_seed_seven() {
    let dir = tempfile::tempdir().unwrap();
    let t = path(dir.path(), "planted.txt");
    let synth_report = run(&["synth", "planted", "--seed", "7", "--table-out", &t]);
    let planted = labels(&synth_report["results"]["ground_truth"]["planted"]);
    let r = run(&["gmb", "--input", &t, "--target", "target", "--nr", "20", "--dr", "20", "--seed", "7"]);
    let target = &r["results"]["targets"][0];
    assert_eq!(labels(&target["members"]), planted);
    assert!(f(&target["cbar"]).abs() <= 0.02);
    assert_eq!(target["tier"], "within_tolerance");
}

#[test]
fn sweep_medians_never_increase() {
    let dir = tempfile::tempdir().unwrap();
    let mut argv: Vec<String> = vec!["gmb".into(), "--nr".into(), "20".into(), "--dr".into(), "20".into()];
    // One table per seed would need one invocation each; a single table with
    // several targets exercises the cross-target median.
    let t = path(dir.path(), "planted.txt");
    run(&["synth", "planted", "--seed", "3", "--table-out", &t]);
    argv.extend(["--input".into(), t, "--sweep-k".into(), "1..10".into()]);
    for target in ["target", "p0", "p1", "d0a", "d1b"] {
        argv.extend(["--target".into(), target.into()]);
    }
    let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
    let r = run(&argv);
    let medians: Vec<f64> = r["results"]["sweep_median"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| f(&row["median_best_abs_cbar"]))
        .collect();
    assert_eq!(medians.len(), 10);
    assert!(medians.windows(2).all(|w| w[1] <= w[0]), "{medians:?}");
    for t in r["results"]["targets"].as_array().unwrap() {
        let col: Vec<f64> = t["sweep"].as_array().unwrap().iter().map(|p| f(&p["best_abs_cbar"])).collect();
        assert!(col.windows(2).all(|w| w[1] <= w[0]), "{col:?}");
    }
}

#[test]
fn near_duplicates_of_the_target_are_filtered() {
    let dir = tempfile::tempdir().unwrap();
    let mut inst = synth::planted_gmb(&synth::PlantedGmbConfig::default(), 1);
    let mut labels_v = inst.table.labels().to_vec();
    let mut vectors = inst.table.vectors().to_vec();
    labels_v.push("echo".into());
    vectors.push(inst.table.vector(inst.target) * 1.001);
    inst.table = EmbeddingTable::new(labels_v, vectors).unwrap();
    let t = write_table(dir.path(), "t.bin", &inst.table);
    let r = run(&["gmb", "--input", &t, "--target", "target", "--nr", "4", "--dr", "10"]);
    assert_eq!(labels(&r["results"]["targets"][0]["filtered"]), vec!["echo"]);
    assert_eq!(r["results"]["targets"][0]["rows_analyzed"], 64);
}

fn write_categories(dir: &Path, cats: &[(&str, &[&str])]) -> String {
    let map: serde_json::Map<String, Value> = cats
        .iter()
        .map(|(k, v)| (k.to_string(), Value::from(v.iter().map(|s| s.to_string()).collect::<Vec<_>>())))
        .collect();
    let p = dir.join("cats.json");
    std::fs::write(&p, serde_json::to_string(&map).unwrap()).unwrap();
    p.display().to_string()
}

#[test]
fn conditioning_on_an_orthogonal_category_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let t = table(&[
        ("head", vec![1., 0., 0., 0.]),
        ("x", vec![0., 1., 0.2, 0.]),
        ("y", vec![0., 0.5, 1., 0.3]),
        ("z", vec![0., 0., 0.4, 1.]),
        ("other", vec![0.7, 0.7, 0., 0.]),
    ]);
    let tp = write_table(dir.path(), "t.bin", &t);
    let cats = write_categories(dir.path(), &[("head", &["x", "y", "z"])]);
    let r = run(&["condition-matrix", "--input", &tp, "--categories", &cats, "--null-samples", "200"]);
    assert!(f(&r["results"]["raw"][0][0]).abs() < 1e-12);
}

#[test]
fn synthetic_categories_dominate_their_own_row() {
    let dir = tempfile::tempdir().unwrap();
    let t = path(dir.path(), "cats.txt");
    let c = path(dir.path(), "cats.json");
    run(&["synth", "categories", "--seed", "5", "--table-out", &t, "--categories-out", &c]);
    let r = run(&["condition-matrix", "--input", &t, "--categories", &c]);
    let z = r["results"]["z"].as_array().unwrap();
    assert_eq!(z.len(), 4);
    for (row, values) in z.iter().enumerate() {
        let values: Vec<f64> = values.as_array().unwrap().iter().map(f).collect();
        for (col, v) in values.iter().enumerate() {
            if col != row {
                assert!(values[row] > *v, "row {row}: {values:?}");
            }
        }
    }
}

#[test]
fn repeated_category_gives_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let inst = synth::clustered_categories(&synth::CategoryConfig::default(), 2);
    let mut l = inst.table.labels().to_vec();
    let mut v = inst.table.vectors().to_vec();
    l.push("cat0_twin".into());
    v.push(inst.table.vector(inst.table.index_of("cat0").unwrap()).clone());
    let tp = write_table(dir.path(), "t.bin", &EmbeddingTable::new(l, v).unwrap());
    let members: Vec<Vec<&str>> = inst.categories.iter().map(|(_, m)| m.iter().map(String::as_str).collect()).collect();
    let cats = write_categories(
        dir.path(),
        &[("cat0", &members[0]), ("cat0_twin", &members[0]), ("cat1", &members[1])],
    );
    let r = run(&["condition-matrix", "--input", &tp, "--categories", &cats, "--null-samples", "2000"]);
    for key in ["raw", "z"] {
        let m = &r["results"][key];
        for c in 0..3 {
            assert!((f(&m[0][c]) - f(&m[1][c])).abs() <= 1e-9, "{key} column {c}");
        }
    }
}

#[test]
fn missing_category_labels_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let t = table(&[("a", vec![1., 0.]), ("b", vec![0., 1.])]);
    let tp = write_table(dir.path(), "t.bin", &t);
    let cats = write_categories(dir.path(), &[("a", &["b", "ghost"]), ("phantom", &["a"])]);
    let cli = Cli::try_parse_from(["ortho-lens", "condition-matrix", "--input", &tp, "--categories", &cats]).unwrap();
    let err = execute(&cli.command).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("ghost") && msg.contains("phantom"), "{msg}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn empty_projection_keeps_the_ranking() {
    let inst = synth::noise_neighbor_ranking(&synth::RankingConfig::default(), 0);
    let t = inst.table.normalized();
    let (before, after) = rankings(&t, inst.target, 1, 0, 10, 0, &Default::default()).unwrap();
    let names = |r: &[ortho_lens_cli::commands::Ranked]| r.iter().map(|x| x.label.clone()).collect::<Vec<_>>();
    assert_eq!(names(&before), names(&after));
}

#[test]
fn tied_vector_overtakes_the_noise_neighbor() {
    let cfg = synth::RankingConfig::default();
    let mut overtakes = 0;
    for seed in 0..50u64 {
        let inst = synth::noise_neighbor_ranking(&cfg, seed);
        let t = inst.table.normalized();
        let (before, after) = rankings(&t, inst.target, 10, 50, t.len() - 1, seed, &Default::default()).unwrap();
        let pos = |r: &[ortho_lens_cli::commands::Ranked], l: usize| r.iter().position(|x| x.label == t.label(l)).unwrap();
        assert!(pos(&before, inst.noise_neighbor) < pos(&before, inst.tied), "seed {seed}");
        overtakes += (pos(&after, inst.tied) < pos(&after, inst.noise_neighbor)) as usize;
    }
    assert!(overtakes >= 40, "{overtakes} of 50");
}

#[test]
fn rank_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let t = path(dir.path(), "rk.txt");
    run(&["synth", "ranking", "--table-out", &t]);
    let argv = ["rank", "--input", &t, "--target", "target", "--seed", "9"];
    assert_eq!(run(&argv), run(&argv));
}

#[test]
fn angle_extremes() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows: Vec<(String, Vec<f64>)> = vec![
        ("b1".into(), vec![1., 0., 0., 0., 0., 0.]),
        ("b2".into(), vec![0., 1., 0., 0., 0., 0.]),
        ("inside".into(), vec![0.6, 0.8, 0., 0., 0., 0.]),
        ("outside".into(), vec![0., 0., 1., 0., 0., 0.]),
    ];
    for (i, r) in synth::random_unit_vectors(12, 6, 4).into_iter().enumerate() {
        rows.push((format!("r{i}"), r.iter().copied().collect()));
    }
    let refs: Vec<(&str, Vec<f64>)> = rows.iter().map(|(l, v)| (l.as_str(), v.clone())).collect();
    let tp = write_table(dir.path(), "t.bin", &table(&refs));
    let r = run(&["angles", "--input", &tp, "--boundary", "b1,b2", "--reference", "inside"]);
    assert!(f(&r["results"]["smallest_angle"]) < 1e-6);
    let r = run(&["angles", "--input", &tp, "--boundary", "b1,b2", "--reference", "outside"]);
    assert!((f(&r["results"]["smallest_angle"]) - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    assert_eq!(r["results"]["baseline"]["smallest_angles"].as_array().unwrap().len(), 50);
}

#[test]
fn noisy_reference_beats_random_baseline() {
    for seed in 0..5 {
        let dir = tempfile::tempdir().unwrap();
        let t = path(dir.path(), "ang.txt");
        let seed = seed.to_string();
        run(&["synth", "angles", "--seed", &seed, "--table-out", &t]);
        let r = run(&[
            "angles", "--input", &t, "--boundary", "center1", "--boundary", "center2", "--reference", "reference", "--seed", &seed,
        ]);
        assert_eq!(r["results"]["below_fifth_percentile"], true, "seed {seed}");
    }
}

fn path3(dir: &Path) -> PathBuf {
    let p = dir.join("path3.txt");
    std::fs::write(&p, "3\n0 1\n1 2\n").unwrap();
    p
}

#[test]
fn ipe_build_check_reduce_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let g = path3(dir.path()).display().to_string();
    let map = path(dir.path(), "map.bin");
    let built = run(&["ipe-build", "--graph", &g, "--epsilon", "0.5", "--map-out", &map]);
    let hand = [[1.5, -1.0, 0.5], [-1.0, 2.0, -1.0], [0.5, -1.0, 1.5]];
    for (i, row) in hand.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            assert!((f(&built["results"]["gram"][i][j]) - want).abs() <= 1e-10);
        }
    }
    assert_eq!(built["results"]["perfectness"]["perfect"], true);

    let checked = run(&["ipe-check", "--input", &map, "--graph", &g]);
    assert_eq!(checked["results"]["faithful"], true);
    assert!(checked["results"]["mismatches"].as_array().unwrap().is_empty());

    let reduced = run(&["ipe-reduce", "--graph", &g, "--map-epsilon", "0.5", "--bypass-identity"]);
    assert!(f(&reduced["results"]["check"]["max_abs_inner"]) <= 1e-8);
    assert_eq!(reduced["results"]["identity_bypass"], true);

    // Rows read back from the 32-bit file carry rounding of order 1e-8.
    let from_file = run(&["ipe-reduce", "--input", &map, "--graph", &g, "--bypass-identity"]);
    assert!(f(&from_file["results"]["check"]["max_abs_inner"]) <= 1e-6);

    let capped = run(&["ipe-reduce", "--graph", &g, "--cap-k", "64"]);
    assert_eq!(capped["results"]["k_used"], 64);
    assert_eq!(capped["results"]["best_effort"], true);
}

#[test]
fn edgeless_reduction_is_not_best_effort() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("empty.txt");
    std::fs::write(&g, "16\n").unwrap();
    let r = run(&["ipe-reduce", "--graph", &g.display().to_string(), "--epsilon", "0.5", "--seed", "1"]);
    assert_eq!(r["results"]["plan"]["target_dim"], ortho_lens::ipe::jl_dimension(16, 0.5));
    assert_eq!(r["results"]["best_effort"], false);
}

#[test]
fn axioms_report_an_intersection_violation() {
    let dir = tempfile::tempdir().unwrap();
    let found = (0..50u64).find_map(|seed| {
        let t = synth::sparse_ternary_table(8, 3, 0.4, seed);
        let tp = write_table(dir.path(), "t.bin", &t);
        let s = seed.to_string();
        let r = run(&["axioms", "--input", &tp, "--axioms", "A5", "--seed", &s, "--tol", "1e-6", "--zero-tol", "1e-6"]);
        let v = r["results"]["violations"].as_array().unwrap().first().cloned();
        v
    });
    let v = found.expect("an intersection violation on some n > d table");
    assert_eq!(v["axiom"], "A5");
}
