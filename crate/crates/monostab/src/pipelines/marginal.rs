//! Onset of a dipping length curve along a one-parameter blend of reactions.
//! Bisection on "some slope has a shrinking length" locates the marginal
//! blend, where the dip profile carries a near-zero eigenvalue.

use crate::config::MarginalCfg;
use crate::csvio;
use crate::error::PipelineError;
use crate::report::Report;
use monostab_core::reaction::Reaction;
use monostab_core::shoot1d::{length_curve, shoot, LengthCurve};
use monostab_core::spectra::eigen1d;
use std::path::Path;

const EIGEN_SAMPLES: usize = 401;

fn dip_eigenvalues(r: &Reaction, alpha: f64) -> Result<(f64, f64), PipelineError> {
    let rec = shoot(r, alpha)?;
    let quartic = r.quartic()?;
    let l = rec.length;
    let q: Vec<f64> = (1..=EIGEN_SAMPLES)
        .map(|j| {
            let x = j as f64 * l / (EIGEN_SAMPLES as f64 + 1.0);
            quartic.df(rec.sample_at(x).u)
        })
        .collect();
    let spec = eigen1d(&q, l, 2)?;
    Ok((spec.lambda1, spec.lambda2.expect("two modes requested")))
}

fn dip(curve: &LengthCurve) -> (usize, f64) {
    let mut idx = 0;
    let mut val = f64::INFINITY;
    for (k, &d) in curve.dlengths.iter().enumerate() {
        if d < val {
            val = d;
            idx = k;
        }
    }
    (idx, val)
}

pub fn run(cfg: &MarginalCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let blend = |tau: f64| Reaction::Interpolated {
        tau,
        base0: Box::new(cfg.f0.clone()),
        base1: Box::new(cfg.f1.clone()),
    };
    let mut trace: Vec<Vec<f64>> = Vec::new();
    let probe = |tau: f64, trace: &mut Vec<Vec<f64>>| -> Result<(f64, LengthCurve), PipelineError> {
        let curve = length_curve(&blend(tau), cfg.points)?;
        let (_, min_dl) = dip(&curve);
        trace.push(vec![tau, min_dl]);
        Ok((min_dl, curve))
    };

    let (d_lo, _) = probe(0.0, &mut trace)?;
    if d_lo < 0.0 {
        return Err(PipelineError::Config(
            "the length curve already dips at tau = 0; nothing to bracket".into(),
        ));
    }
    let (d_hi, _) = probe(1.0, &mut trace)?;
    if d_hi >= 0.0 {
        return Err(PipelineError::PredicateNeverTrue);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > cfg.tau_resolution {
        let mid = 0.5 * (lo + hi);
        let (d_mid, _) = probe(mid, &mut trace)?;
        if d_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tau_star = hi;
    report.metric("tau_star", tau_star);
    report.metric("bracket_width", hi - lo);

    let (min_dl_star, curve_star) = probe(tau_star, &mut trace)?;
    csvio::write_length_curve(&out.join("curve_at_onset.csv"), &curve_star)?;
    report.artifact(Path::new("curve_at_onset.csv"));
    let (k_dip, _) = dip(&curve_star);
    let alpha_dip = curve_star.alphas[k_dip];
    let (lam1, lam2) = dip_eigenvalues(&blend(tau_star), alpha_dip)?;
    report.check_le(
        "lambda1_small_at_onset",
        lam1.abs(),
        1e-2,
        format!("dip at alpha = {alpha_dip:.6}, L = {:.6}, min dL/da = {min_dl_star:.3e}", curve_star.lengths[k_dip]),
    );
    report.metric("alpha_dip", alpha_dip);
    report.metric("length_dip", curve_star.lengths[k_dip]);
    report.metric("lambda1_dip", lam1);
    report.metric("lambda2_dip", lam2);

    // Flanks: below the onset no slope shrinks the length; above it the dip
    // is open and its profile is spectrally unstable.
    let tau_m = (tau_star - cfg.side_offset).max(0.0);
    let (d_m, _) = probe(tau_m, &mut trace)?;
    report.check(
        "monotone_below_onset",
        d_m > 0.0,
        d_m,
        0.0,
        ">",
        format!("min dL/da at tau = {tau_m:.6}"),
    );
    let tau_p = (tau_star + cfg.side_offset).min(1.0);
    let (d_p, curve_p) = probe(tau_p, &mut trace)?;
    report.check(
        "dip_above_onset",
        d_p < 0.0,
        d_p,
        0.0,
        "<",
        format!("min dL/da at tau = {tau_p:.6}"),
    );
    let (k_p, _) = dip(&curve_p);
    let (lam1_p, _) = dip_eigenvalues(&blend(tau_p), curve_p.alphas[k_p])?;
    report.check(
        "unstable_above_onset",
        lam1_p < 0.0,
        lam1_p,
        0.0,
        "<",
        format!("dip eigenvalue at tau = {tau_p:.6}"),
    );

    csvio::write_table(&out.join("trace.csv"), "tau,min_dlength", &trace)?;
    report.artifact(Path::new("trace.csv"));
    Ok(report)
}
