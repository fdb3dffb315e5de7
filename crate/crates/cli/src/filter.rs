use ortho_lens::EmbeddingTable;

use crate::error::{CliError, CliResult};

/// Drops every row other than `target` whose cosine with it is at least
/// `threshold`. Returns the kept table and the removed labels in table order.
/// Exact copies of the target have cosine 1; a threshold above 1 disables
/// the filter.
pub fn filter_near_duplicates(
    table: &EmbeddingTable,
    target: &str,
    threshold: f64,
) -> CliResult<(EmbeddingTable, Vec<String>)> {
    if threshold.is_nan() || threshold < -1.0 {
        return Err(CliError::usage("filter threshold must be >= -1"));
    }
    let t = table
        .index_of(target)
        .ok_or_else(|| CliError::usage(format!("target '{target}' is not in the table")))?;
    let v = table.vector(t);
    let unit_v = v / v.norm();
    let mut keep = Vec::with_capacity(table.len());
    let mut removed = Vec::new();
    for (i, u) in table.vectors().iter().enumerate() {
        let cos = if u == v {
            1.0
        } else if u.norm() > 0.0 {
            unit_v.dot(&(u / u.norm())).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        if i != t && cos >= threshold {
            removed.push(table.label(i).to_string());
        } else {
            keep.push(i);
        }
    }
    Ok((table.select(&keep)?, removed))
}

/// Drops the listed labels (other than `protect`); unknown labels are ignored.
pub fn exclude_labels(table: &EmbeddingTable, labels: &[String], protect: &[&str]) -> CliResult<EmbeddingTable> {
    let keep: Vec<usize> = (0..table.len())
        .filter(|&i| {
            let l = table.label(i);
            protect.contains(&l) || !labels.iter().any(|x| x == l)
        })
        .collect();
    Ok(table.select(&keep)?)
}
