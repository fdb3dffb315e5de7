use serde::Serialize;

use crate::error::CliResult;

/// One JSON document per invocation. Field order is fixed by this struct,
/// and wall-clock time is only included on request so that repeated runs
/// produce identical bytes.
#[derive(Debug, Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub config: C,
    pub results: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(command: &'static str, config: C, results: R) -> Self {
        Report {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            results,
            elapsed_seconds: None,
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Median of a nonempty slice (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}
