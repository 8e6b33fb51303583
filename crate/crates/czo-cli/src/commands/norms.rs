//! Operator-norm method comparison and the norm-inequality ratio suites.

use std::path::Path;

use dyadic_grid::seeding;
use dyadic_operators::{haar_multiplier, mart_transform, random::random_perfect_czo};
use matrix_field::norms::{bmo_mart_norm, hardy_col_norm, lp_norm};
use matrix_field::random::{random_adapted_sequence, random_field};
use matrix_field::{GridSpec, MatrixField};
use norm_lab::{envelopes, op_norm, ratio_suite, LinearOperatorHandle, NormMethod, RatioStats};
use num_complex::Complex64;

use crate::config::ExperimentConfig;
use crate::record::{CheckResult, RunRecord};

fn sup_norm_of(xi: &[MatrixField]) -> anyhow::Result<f64> {
    let mut sup = 0.0f64;
    for x in xi {
        sup = sup.max(lp_norm(x, f64::INFINITY)?);
    }
    Ok(sup)
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<RunRecord> {
    let started = std::time::Instant::now();
    let nc = &cfg.norms;
    let mut record = RunRecord::new("norms", &cfg.canonical_hash(), cfg.seed);
    let seed = seeding::named(cfg.seed, "norms");
    let grid = GridSpec::standard(1, nc.levels);

    // Power iteration against the dense decomposition on random operators.
    let mut worst_rel = 0.0f64;
    for i in 0..nc.opnorm_instances {
        let s = seeding::mix(seed, i);
        let t = random_perfect_czo(&grid, nc.d, s, i % 2 == 0);
        let handle = LinearOperatorHandle::from_operator(t, grid.clone(), nc.d);
        let dense = op_norm(&handle, NormMethod::Dense, 0.0, 0, s)?;
        let power = op_norm(
            &handle,
            NormMethod::PowerIteration,
            nc.power_tolerance,
            nc.power_max_iter,
            s,
        )?;
        worst_rel = worst_rel.max((dense.norm - power.norm).abs() / dense.norm.max(1e-12));
    }
    record.push(CheckResult::bounded(
        "power-vs-dense-relative",
        worst_rel,
        1e-6,
    ));

    let identity = op_norm(
        &LinearOperatorHandle::identity(grid.clone(), nc.d),
        NormMethod::PowerIteration,
        nc.power_tolerance,
        nc.power_max_iter,
        seed,
    )?;
    record.push(CheckResult::bounded(
        "identity-norm-error",
        (identity.norm - 1.0).abs(),
        1e-8,
    ));

    // Ratio suites.
    let mut stats_rows: Vec<(String, f64, RatioStats)> = Vec::new();
    for p in [2.0f64, 4.0] {
        let g2 = grid.clone();
        let d = nc.d;
        let family = move |s: u64| -> norm_lab::Result<(MatrixField, MatrixField)> {
            let mut b = random_field(&g2, d, seeding::named(s, "symbol"));
            let bn = bmo_mart_norm(&b);
            b = b.scale(Complex64::new(1.0 / bn, 0.0));
            let f = random_field(&g2, d, seeding::named(s, "input"));
            Ok((haar_multiplier(&b, &f).map_err(norm_lab::NormLabError::Operator)?, f))
        };
        let stats = ratio_suite(
            &family,
            &move |f| Ok(lp_norm(f, p)?),
            &move |f| Ok(hardy_col_norm(f, p)?),
            nc.suite_trials,
            seeding::named(seed, "lambda-suite"),
        )?;
        let envelope = if p == 2.0 {
            envelopes::LAMBDA_HARDY_RATIO_P2
        } else {
            envelopes::LAMBDA_HARDY_RATIO_P4
        };
        record.push(CheckResult::bounded(
            format!("lambda-hardy-ratio-p{p}"),
            stats.max,
            envelope,
        ));
        stats_rows.push((format!("haar-multiplier-p{p}"), p, stats));
    }

    for p in [2.0f64, 4.0] {
        let g2 = grid.clone();
        let d = nc.d;
        let family = move |s: u64| -> norm_lab::Result<(MatrixField, MatrixField)> {
            let xi = random_adapted_sequence(&g2, d, seeding::named(s, "xi"));
            let sup = sup_norm_of(&xi).map_err(|e| norm_lab::NormLabError::DegenerateInput {
                reason: e.to_string(),
            })?;
            let f = random_field(&g2, d, seeding::named(s, "input"));
            let out = mart_transform(&xi, &f)
                .map_err(norm_lab::NormLabError::Operator)?
                .scale(Complex64::new(1.0 / sup, 0.0));
            Ok((out, f))
        };
        let (norm_in, envelope): (Box<dyn Fn(&MatrixField) -> norm_lab::Result<f64>>, f64) =
            if p == 2.0 {
                // At p = 2 the exact bound is against the centered part.
                (
                    Box::new(|f: &MatrixField| {
                        Ok(f.sub(&f.cond_expect(0)?)?.l2_norm())
                    }),
                    envelopes::TRANSFORM_HARDY_RATIO_P2,
                )
            } else {
                (
                    Box::new(move |f: &MatrixField| Ok(lp_norm(f, p)?)),
                    envelopes::TRANSFORM_HARDY_RATIO_P4,
                )
            };
        let stats = ratio_suite(
            &family,
            &norm_in,
            &move |f| Ok(hardy_col_norm(f, p)?),
            nc.suite_trials,
            seeding::named(seed, "transform-suite"),
        )?;
        record.push(CheckResult::bounded(
            format!("transform-hardy-ratio-p{p}"),
            stats.max,
            envelope,
        ));
        stats_rows.push((format!("martingale-transform-p{p}"), p, stats));
    }

    std::fs::create_dir_all(out_dir)?;
    let suite_path = out_dir.join("norm_suites.csv");
    let mut w = csv::Writer::from_path(&suite_path)?;
    w.write_record(["family", "p", "max", "mean", "median", "q90", "trials", "skipped", "seed"])?;
    for (family, p, s) in &stats_rows {
        w.write_record([
            family.clone(),
            format!("{p}"),
            format!("{:.17e}", s.max),
            format!("{:.17e}", s.mean),
            format!("{:.17e}", s.median),
            format!("{:.17e}", s.q90),
            s.trials.to_string(),
            s.skipped.to_string(),
            s.seed.to_string(),
        ])?;
    }
    w.flush()?;
    record.outputs.push(suite_path.display().to_string());

    record.finalize(out_dir, started)?;
    Ok(record)
}
