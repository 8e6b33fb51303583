//! Paraproduct dimension-growth experiment.

use std::path::Path;

use dyadic_grid::seeding;
use matrix_field::GridSpec;
use norm_lab::{envelopes, paraproduct_growth, GrowthBudget};

use crate::config::ExperimentConfig;
use crate::record::{CheckResult, RunRecord};

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<RunRecord> {
    let started = std::time::Instant::now();
    let gc = &cfg.growth;
    let mut record = RunRecord::new("growth", &cfg.canonical_hash(), cfg.seed);
    let grid = GridSpec::standard(1, gc.levels);
    let budget = GrowthBudget {
        random_candidates: gc.random_candidates,
        perturbations: gc.perturbations,
        power_iters: gc.power_iters,
        tol: 1e-9,
    };
    let rows = paraproduct_growth(
        &grid,
        &gc.d_list,
        &budget,
        seeding::named(cfg.seed, "growth"),
    )?;

    // Structural checks: nondecreasing ratios via the embedding candidates,
    // and the scalar case under its envelope.
    let worst_drop = rows
        .windows(2)
        .map(|w| (w[0].ratio - w[1].ratio).max(0.0))
        .fold(0.0f64, f64::max);
    record.push(CheckResult::bounded("ratio-column-nondecreasing", worst_drop, 1e-9));
    record.push(CheckResult::bounded(
        "scalar-ratio-under-envelope",
        rows[0].ratio,
        envelopes::SCALAR_PARAPRODUCT_RATIO,
    ));

    std::fs::create_dir_all(out_dir)?;
    let table_path = out_dir.join("growth_table.csv");
    let mut w = csv::Writer::from_path(&table_path)?;
    w.write_record(["d", "ratio", "seed", "iterations", "residual"])?;
    for row in &rows {
        w.write_record([
            row.d.to_string(),
            format!("{:.17e}", row.ratio),
            row.seed.to_string(),
            row.iterations.to_string(),
            format!("{:.17e}", row.residual),
        ])?;
        println!("growth: d {:>3} best ratio {:.6}", row.d, row.ratio);
    }
    w.flush()?;
    record.outputs.push(table_path.display().to_string());

    record.finalize(out_dir, started)?;
    Ok(record)
}
