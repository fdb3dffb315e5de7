use ortho_lens::markov::{find_generalized_mb, sweep_candidate_counts, GmbParams};
use ortho_lens::{synth, Tolerance};

fn params(seed: u64) -> GmbParams {
    GmbParams {
        n_r: 20,
        d_r: 20,
        k: 10,
        seed,
        gmb_tol: 0.02,
    }
}

#[test]
fn planted_boundary_is_recovered() {
    let cfg = synth::PlantedGmbConfig::default();
    let mut subset = 0;
    for seed in 0..50u64 {
        let inst = synth::planted_gmb(&cfg, seed);
        let r = find_generalized_mb(&inst.table, inst.target, params(seed), &Tolerance::default()).unwrap();
        subset += r.members.iter().all(|m| inst.planted.contains(m)) as usize;
    }
    assert!(subset >= 40, "{subset} of 50");

    let inst = synth::planted_gmb(&cfg, 7);
    let r = find_generalized_mb(&inst.table, inst.target, params(7), &Tolerance::default()).unwrap();
    assert_eq!(r.members, inst.planted);
}

#[test]
fn median_best_score_falls_with_candidate_count() {
    let cfg = synth::PlantedGmbConfig::default();
    let ks: Vec<usize> = (1..=10).collect();
    let mut columns = vec![Vec::new(); ks.len()];
    for seed in 0..15u64 {
        let inst = synth::planted_gmb(&cfg, seed);
        let sweep = sweep_candidate_counts(&inst.table, inst.target, params(seed), &ks, &Tolerance::default()).unwrap();
        for (col, p) in columns.iter_mut().zip(&sweep) {
            col.push(p.best_abs_cbar);
        }
    }
    let medians: Vec<f64> = columns
        .into_iter()
        .map(|mut c| {
            c.sort_by(f64::total_cmp);
            c[c.len() / 2]
        })
        .collect();
    for w in medians.windows(2) {
        assert!(w[1] <= w[0], "{medians:?}");
    }
    assert!(medians[9] < 0.02, "{medians:?}");
}
