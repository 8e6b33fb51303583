//! Figiel coefficient decay of the Hilbert kernel, with the closed-form
//! cross-check of the quadrature.

use std::path::Path;

use kernel_lab::{decay_fit, haar_coeff_kernel, Interval, KernelModel};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::record::{CheckResult, RunRecord};

/// Closed form of the Hilbert-kernel coefficient from the antiderivative
/// `phi(t) = t ln|t| - t` (an independent route used as the oracle).
pub fn hilbert_coeff_closed_form(i: Interval, m: i64) -> f64 {
    fn phi(t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            t * t.abs().ln() - t
        }
    }
    fn rect(a1: f64, a2: f64, b1: f64, b2: f64) -> f64 {
        phi(a2 - b1) + phi(a1 - b2) - phi(a1 - b1) - phi(a2 - b2)
    }
    let im = i.translate(m);
    let (xl, xh) = im.halves();
    let (yl, yh) = i.halves();
    let mut acc = 0.0;
    for (x, sx) in [(xl, 1.0), (xh, -1.0)] {
        for (y, sy) in [(yl, 1.0), (yh, -1.0)] {
            acc += sx * sy * rect(x.left, x.right(), y.left, y.right());
        }
    }
    acc / i.len
}

#[derive(Serialize)]
struct DecaySummary {
    exponent: f64,
    r_squared: f64,
    config_hash: String,
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<RunRecord> {
    let started = std::time::Instant::now();
    let dc = &cfg.decay;
    let mut record = RunRecord::new("decay", &cfg.canonical_hash(), cfg.seed);
    let kernel = KernelModel::hilbert();
    let interval = Interval::new(0.0, 1.0);

    let ms: Vec<i64> = (dc.m_min..=dc.m_max).collect();
    let fit = decay_fit(&kernel, interval, &ms, dc.quadrature_level)?;
    record.push(CheckResult::at_least("decay-exponent-above", fit.exponent, -2.3));
    record.push(CheckResult::bounded("decay-exponent-below", fit.exponent, -1.7));
    record.push(CheckResult::at_least("decay-r-squared", fit.r_squared, 0.98));

    // Quadrature against the closed-form oracle at m = 4.
    let (coeff, _) = haar_coeff_kernel(&kernel, interval, 4, dc.check_level, false)?;
    let closed = hilbert_coeff_closed_form(interval, 4);
    record.push(CheckResult::bounded(
        "quadrature-vs-closed-form-m4",
        (coeff[(0, 0)].re - closed).abs(),
        1e-8,
    ));

    // Data CSV: (m, coeff_norm, error_estimate).
    std::fs::create_dir_all(out_dir)?;
    let points_path = out_dir.join("decay_points.csv");
    let mut w = csv::Writer::from_path(&points_path)?;
    w.write_record(["m", "coeff_norm", "error_estimate"])?;
    for (m, norm, err) in &fit.points {
        w.write_record([
            m.to_string(),
            format!("{norm:.17e}"),
            format!("{err:.17e}"),
        ])?;
    }
    w.flush()?;
    record.outputs.push(points_path.display().to_string());

    let summary_path = out_dir.join("decay_summary.json");
    std::fs::write(
        &summary_path,
        serde_json::to_string_pretty(&DecaySummary {
            exponent: fit.exponent,
            r_squared: fit.r_squared,
            config_hash: cfg.canonical_hash(),
        })?,
    )?;
    record.outputs.push(summary_path.display().to_string());

    println!("decay: exponent {:.4}, r^2 {:.5}", fit.exponent, fit.r_squared);
    record.finalize(out_dir, started)?;
    Ok(record)
}
