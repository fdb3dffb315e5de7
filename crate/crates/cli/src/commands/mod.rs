//! One module per subcommand. Each command returns its rendered JSON report.

mod angles;
mod axioms;
mod condition;
mod gmb;
mod ipe;
mod mb_exact;
mod rank;
mod synth;

use std::path::Path;
use std::time::Instant;

use ortho_lens::{EmbeddingTable, Tolerance, UndirectedGraph};
use serde::Serialize;

use crate::args::{Command, OutputArgs, TableArgs, TolArgs};
use crate::error::{CliError, CliResult};
use crate::filter::exclude_labels;
use crate::format::load_table;
use crate::report::Report;

pub use angles::{angles, AngleResults};
pub use axioms::axioms;
pub use condition::{condition_matrix, ConditionResults};
pub use gmb::{gmb, GmbResults};
pub use ipe::{ipe_build, ipe_check, ipe_reduce};
pub use mb_exact::mb_exact;
pub use rank::{rank, rankings, RankResults, Ranked};
pub use synth::synth;

/// Runs `command` and returns the JSON report with its destination.
pub fn execute(command: &Command) -> CliResult<(String, &OutputArgs)> {
    Ok(match command {
        Command::Gmb(a) => (gmb(a)?, &a.out),
        Command::MbExact(a) => (mb_exact(a)?, &a.out),
        Command::ConditionMatrix(a) => (condition_matrix(a)?, &a.out),
        Command::Rank(a) => (rank(a)?, &a.out),
        Command::Angles(a) => (angles(a)?, &a.out),
        Command::Axioms(a) => (axioms(a)?, &a.out),
        Command::IpeBuild(a) => (ipe_build(a)?, &a.out),
        Command::IpeCheck(a) => (ipe_check(a)?, &a.out),
        Command::IpeReduce(a) => (ipe_reduce(a)?, &a.out),
        Command::Synth(a) => (synth(a)?, &a.out),
    })
}

pub(crate) fn render<C: Serialize, R: Serialize>(
    command: &'static str,
    config: &C,
    results: R,
    out: &OutputArgs,
    started: Instant,
) -> CliResult<String> {
    let mut report = Report::new(command, config, results);
    if out.timing {
        report.elapsed_seconds = Some(started.elapsed().as_secs_f64());
    }
    report.to_json()
}

/// Loads a table, unit-normalizing every row when `normalize` is set.
pub(crate) fn load(args: &TableArgs, normalize: bool) -> CliResult<EmbeddingTable> {
    let table = load_table(&args.input, args.format)?;
    Ok(if normalize { table.normalized() } else { table })
}

pub(crate) fn tolerance(args: &TolArgs) -> CliResult<Tolerance> {
    tolerance_from(args.tol, args.zero_tol)
}

pub(crate) fn tolerance_from(ortho: f64, zero: f64) -> CliResult<Tolerance> {
    let tol = Tolerance::default().with_ortho_tol(ortho).with_zero_tol(zero);
    tol.validate()?;
    Ok(tol)
}

pub(crate) fn lookup(table: &EmbeddingTable, label: &str) -> CliResult<usize> {
    table
        .index_of(label)
        .ok_or_else(|| CliError::usage(format!("label '{label}' is not in the table")))
}

/// Indices of `labels`, or a usage error naming every missing one.
pub(crate) fn lookup_all<S: AsRef<str>>(table: &EmbeddingTable, labels: &[S]) -> CliResult<Vec<usize>> {
    let missing: Vec<&str> = labels
        .iter()
        .map(AsRef::as_ref)
        .filter(|l| table.index_of(l).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::usage(format!("labels not in the table: {}", missing.join(", "))));
    }
    Ok(labels.iter().map(|l| table.index_of(l.as_ref()).unwrap()).collect())
}

pub(crate) fn labels_of(table: &EmbeddingTable, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| table.label(i).to_string()).collect()
}

/// One label per line; blank lines and `#` comments are skipped.
pub(crate) fn read_label_list(path: &Path) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

/// Applies `--exclude`, keeping the listed targets.
pub(crate) fn apply_exclusions(table: EmbeddingTable, exclude: Option<&Path>, targets: &[&str]) -> CliResult<EmbeddingTable> {
    match exclude {
        Some(path) => exclude_labels(&table, &read_label_list(path)?, targets),
        None => Ok(table),
    }
}

pub(crate) fn read_graph(path: &Path) -> CliResult<UndirectedGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    UndirectedGraph::parse(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub(crate) fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Mean and population standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
