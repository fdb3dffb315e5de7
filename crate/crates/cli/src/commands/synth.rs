use std::time::Instant;

use indexmap::IndexMap;
use ortho_lens::synth::{
    angle_instance, clustered_categories, noise_neighbor_ranking, planted_gmb, AngleConfig, CategoryConfig,
    PlantedGmbConfig, RankingConfig,
};
use ortho_lens::EmbeddingTable;
use serde::Serialize;

use super::render;
use crate::args::{SynthArgs, SynthKind};
use crate::error::{CliError, CliResult};
use crate::format::save_table;

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Truth {
    Planted { target: String, planted: Vec<String> },
    Categories { categories: IndexMap<String, Vec<String>> },
    Ranking { target: String, noise_neighbor: String, tied: String },
    Angles { boundary: Vec<String>, reference: Vec<String> },
}

#[derive(Debug, Serialize)]
struct SynthResults {
    rows: usize,
    dim: usize,
    table_out: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    categories_out: Option<String>,
    ground_truth: Truth,
}

/// The table and ground truth of one shipped instance.
fn generate(kind: SynthKind, seed: u64) -> (EmbeddingTable, Truth) {
    match kind {
        SynthKind::Planted => {
            let p = planted_gmb(&PlantedGmbConfig::default(), seed);
            let truth = Truth::Planted {
                target: p.table.label(p.target).to_string(),
                planted: p.planted_labels(),
            };
            (p.table, truth)
        }
        SynthKind::Categories => {
            let c = clustered_categories(&CategoryConfig::default(), seed);
            let truth = Truth::Categories {
                categories: c.categories.into_iter().collect(),
            };
            (c.table, truth)
        }
        SynthKind::Ranking => {
            let r = noise_neighbor_ranking(&RankingConfig::default(), seed);
            let truth = Truth::Ranking {
                target: r.table.label(r.target).to_string(),
                noise_neighbor: r.table.label(r.noise_neighbor).to_string(),
                tied: r.table.label(r.tied).to_string(),
            };
            (r.table, truth)
        }
        SynthKind::Angles => {
            let a = angle_instance(&AngleConfig::default(), seed);
            let truth = Truth::Angles {
                boundary: a.boundary,
                reference: a.reference,
            };
            (a.table, truth)
        }
    }
}

pub fn synth(args: &SynthArgs) -> CliResult<String> {
    let started = Instant::now();
    let (table, truth) = generate(args.kind, args.seed);
    save_table(&table, &args.table_out, args.table_format)?;
    match (&truth, &args.categories_out) {
        (Truth::Categories { categories }, Some(path)) => {
            let json = serde_json::to_string_pretty(categories)? + "\n";
            std::fs::write(path, json).map_err(|e| CliError::io(path, e))?;
        }
        (_, Some(_)) => return Err(CliError::usage("--categories-out only applies to `categories`")),
        _ => {}
    }
    let results = SynthResults {
        rows: table.len(),
        dim: table.dim(),
        table_out: args.table_out.display().to_string(),
        categories_out: args.categories_out.as_ref().map(|p| p.display().to_string()),
        ground_truth: truth,
    };
    render("synth", args, results, &args.out, started)
}
