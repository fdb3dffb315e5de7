use std::time::Instant;

use ortho_lens::independence::{check_axioms, Axiom, CheckConfig, PartialOrthogonality};
use serde::Serialize;

use super::{labels_of, load, lookup_all, render, tolerance_from};
use crate::args::AxiomsArgs;
use crate::error::CliResult;

#[derive(Debug, Serialize)]
struct Tally {
    axiom: &'static str,
    name: String,
    premises_held: usize,
    violations: usize,
}

#[derive(Debug, Serialize)]
struct Violation {
    trial: usize,
    axiom: &'static str,
    a: Vec<String>,
    b: Vec<String>,
    c: Vec<String>,
    d: Vec<String>,
}

#[derive(Debug, Serialize)]
struct AxiomResults {
    universe: Vec<String>,
    tuples_checked: usize,
    exhaustive: bool,
    clean: bool,
    tallies: Vec<Tally>,
    violations: Vec<Violation>,
}

pub fn axioms(args: &AxiomsArgs) -> CliResult<String> {
    let started = Instant::now();
    let tol = tolerance_from(args.tol, args.zero_tol)?;
    let table = load(&args.table, true)?;
    let universe: Vec<usize> = if args.universe.is_empty() {
        (0..table.len()).collect()
    } else {
        lookup_all(&table, &args.universe)?
    };
    let selected: &[Axiom] = if args.axioms.is_empty() { &Axiom::ALL } else { &args.axioms };
    let model = PartialOrthogonality::new(&table, tol);
    let report = check_axioms(
        &model,
        &universe,
        selected,
        CheckConfig {
            trials: args.trials,
            seed: args.seed,
        },
    )?;
    let results = AxiomResults {
        universe: labels_of(&table, &universe),
        tuples_checked: report.tuples_checked,
        exhaustive: report.exhaustive,
        clean: report.is_clean(),
        tallies: report
            .tallies
            .iter()
            .map(|t| Tally {
                axiom: t.axiom.code(),
                name: format!("{:?}", t.axiom),
                premises_held: t.premises_held,
                violations: t.violations,
            })
            .collect(),
        violations: report
            .violations
            .iter()
            .map(|v| Violation {
                trial: v.trial,
                axiom: v.axiom.code(),
                a: labels_of(&table, &v.a),
                b: labels_of(&table, &v.b),
                c: labels_of(&table, &v.c),
                d: labels_of(&table, &v.d),
            })
            .collect(),
    };
    render("axioms", args, results, &args.out, started)
}
