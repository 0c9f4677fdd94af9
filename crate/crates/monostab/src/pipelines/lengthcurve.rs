//! Interval-length curve `α ↦ L_α` for a one-dimensional reaction, with an
//! independent quadrature/integration cross-check and the small-slope limit
//! `L → π/√f'(0)`.

use crate::config::LengthCurveCfg;
use crate::csvio;
use crate::error::PipelineError;
use crate::report::Report;
use monostab_core::shoot1d::{length_curve, shoot};
use std::path::Path;

pub fn run(cfg: &LengthCurveCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let curve = length_curve(&cfg.reaction, cfg.points)?;
    csvio::write_length_curve(&out.join("curve.csv"), &curve)?;
    report.artifact(Path::new("curve.csv"));

    // Dynamic shots against the stored quadrature lengths, on a subsample.
    let mut worst_len = 0.0_f64;
    let mut worst_energy = 0.0_f64;
    for (k, &a) in curve.alphas.iter().enumerate().step_by(5) {
        let rec = shoot(&cfg.reaction, a)?;
        worst_len = worst_len.max((rec.length - curve.lengths[k]).abs());
        worst_energy = worst_energy.max(rec.energy_residual);
    }
    report.check_le(
        "length_vs_quadrature",
        worst_len,
        1e-6,
        "worst |shoot - quadrature| over every fifth slope",
    );
    report.check_le(
        "energy_residual",
        worst_energy,
        1e-8,
        "worst first-integral drift over the sampled shots",
    );

    if cfg.small_slope_check {
        let q = cfg.reaction.quartic()?;
        let limit = core::f64::consts::PI / q.c[1].sqrt();
        let rec = shoot(&cfg.reaction, 1e-3)?;
        report.check_le(
            "small_slope_limit",
            (rec.length - limit).abs(),
            2e-3,
            format!("L(1e-3) = {:.9} vs pi/sqrt(f'(0)) = {limit:.9}", rec.length),
        );
    }

    report.metric("alpha_star", curve.alpha_star);
    report.metric("sign_changes", curve.sign_changes.len());
    report.metric(
        "min_dlength",
        curve.dlengths.iter().cloned().fold(f64::INFINITY, f64::min),
    );
    Ok(report)
}
