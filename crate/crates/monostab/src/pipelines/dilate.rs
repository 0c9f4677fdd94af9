//! Extremal-state branches over dilated domains. The gap between the minimal
//! and maximal states collapses once the domain is large enough, and both
//! states approach the distance-profile envelope.

use crate::config::{Dilate1dCfg, Dilate2dCfg};
use crate::csvio;
use crate::error::PipelineError;
use crate::report::Report;
use monostab_core::grid2d::{build_mask, dilation_branch, phi_kappa, BranchPoint, BuilderTag, RelaxOptions};
use monostab_core::spectra::{eigen2d, Eigen2dOptions};
use std::path::Path;

pub fn run_1d(cfg: &Dilate1dCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let base = BuilderTag::Interval { length: 1.0 };
    let branch = dilation_branch(&base, &cfg.kappas, cfg.h, &cfg.reaction, &RelaxOptions::default())?;
    csvio::write_branch_csv(&out.join("branch.csv"), &branch)?;
    report.artifact(Path::new("branch.csv"));

    common_branch_checks(&branch, cfg.kappa_merge, &mut report);

    // Half-line reference: the envelope operator on an interval long enough
    // that the two wall layers decouple, at the same spacing.
    let m = cfg.reaction.slope_at_zero()?;
    let x_ref = 40.0 / m.sqrt();
    let mask = build_mask(&BuilderTag::Interval { length: x_ref }, cfg.h)?;
    let phi = phi_kappa(&mask, &cfg.reaction)?;
    let quartic = cfg.reaction.quartic()?;
    let q: Vec<f64> = phi.iter().map(|&u| quartic.df(u)).collect();
    let lambda_half = eigen2d(&mask, &q, 1, &Eigen2dOptions::default())?.lambda1;
    let last = branch.last().expect("branch is nonempty");
    report.check_le(
        "lambda_phi_vs_halfline",
        (last.lambda_phi - lambda_half).abs(),
        0.05,
        format!(
            "envelope eigenvalue {:.6} at kappa = {} vs half-line {lambda_half:.6}",
            last.lambda_phi, last.kappa
        ),
    );
    report.metric("lambda_halfline", lambda_half);

    if let Some(b) = branch.iter().find(|b| b.sup_u_min >= 0.5) {
        report.metric("kappa_sup_min_crosses_half", b.kappa);
    }
    Ok(report)
}

pub fn run_2d(cfg: &Dilate2dCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let branch = dilation_branch(&cfg.base, &cfg.kappas, cfg.h, &cfg.reaction, &RelaxOptions::default())?;
    csvio::write_branch_csv(&out.join("branch.csv"), &branch)?;
    report.artifact(Path::new("branch.csv"));

    let merge = *cfg.kappas.last().expect("kappas is nonempty");
    common_branch_checks(&branch, merge, &mut report);
    Ok(report)
}

fn common_branch_checks(branch: &[BranchPoint], kappa_merge: f64, report: &mut Report) {
    let first = &branch[0];
    report.check_ge(
        "initial_gap",
        first.gap,
        0.2,
        format!("two ordered states at kappa = {}", first.kappa),
    );

    match branch.iter().find(|b| b.kappa >= kappa_merge) {
        Some(b) => report.check_le(
            "merged_gap",
            b.gap,
            1e-4,
            format!("states coincide at kappa = {}", b.kappa),
        ),
        None => report.check(
            "merged_gap",
            false,
            f64::NAN,
            1e-4,
            "<=",
            format!("no dilation factor reaches kappa_merge = {kappa_merge}"),
        ),
    }

    let dist: Vec<f64> = branch
        .iter()
        .map(|b| b.dist_phi_min.max(b.dist_phi_max))
        .collect();
    let worst_rise = dist
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    report.check_le(
        "envelope_distance_monotone",
        worst_rise,
        1e-9,
        "max |u - Phi| never grows along the dilation",
    );
}
