//! Experiment drivers. Each takes a validated config, computes, writes its
//! artifacts into the output directory, and returns a [`Report`] whose
//! assertions decide the process exit code. Failed assertions are recorded,
//! not raised; errors are reserved for broken configs and broken math.

mod dilate;
mod exterior;
mod lengthcurve;
mod lieb;
mod marginal;
mod pocket;
mod stargeom;
mod striporbit;
mod wells;

use crate::config::ExperimentConfig;
use crate::error::PipelineError;
use crate::report::Report;
use std::path::Path;

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Report, PipelineError> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let name = cfg.kind().name();
    let raw = cfg.to_value();
    let report = match cfg {
        ExperimentConfig::LengthCurve(c) => lengthcurve::run(c, Report::new(name, raw), out_dir)?,
        ExperimentConfig::Dilate1D(c) => dilate::run_1d(c, Report::new(name, raw), out_dir)?,
        ExperimentConfig::Dilate2D(c) => dilate::run_2d(c, Report::new(name, raw), out_dir)?,
        ExperimentConfig::Pocket(c) => pocket::run(c, Report::new(name, raw), out_dir)?,
        ExperimentConfig::Marginal(c) => marginal::run(c, Report::new(name, raw), out_dir)?,
        ExperimentConfig::StripOrbit(c) => striporbit::run(c, Report::new(name, raw), out_dir)?,
        ExperimentConfig::WellsLambda(c) => wells::run(c, Report::new(name, raw), out_dir)?,
        ExperimentConfig::ExteriorRadial(c) => exterior::run(c, Report::new(name, raw), out_dir)?,
        ExperimentConfig::LiebSuite(c) => lieb::run(c, Report::new(name, raw), out_dir)?,
        ExperimentConfig::StarGeom(c) => stargeom::run(c, Report::new(name, raw), out_dir)?,
    };
    report.write(out_dir)?;
    Ok(report)
}

pub(crate) fn sup(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}
