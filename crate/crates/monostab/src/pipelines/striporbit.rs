//! Periodic structures bifurcating from an unstable interval profile, found
//! as orbits of the spatial dynamical system on a torus grid, with the
//! cross-section Hamiltonian as the conservation witness.

use crate::config::StripOrbitCfg;
use crate::csvio;
use crate::error::PipelineError;
use crate::report::Report;
use monostab_core::spatialdyn::{cross_section, orbit_search, spatial_energy, OrbitOptions};
use std::path::Path;

pub fn run(cfg: &StripOrbitCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let cs = cross_section(&cfg.reaction)?;
    report.metric("l", cs.l);
    report.metric("alpha", cs.alpha);
    report.metric("lambda1", cs.lambda1);
    report.metric("lambda2", cs.lambda2);
    report.check(
        "unstable_profile",
        cs.lambda1 < 0.0 && cs.lambda2 > 0.0,
        cs.lambda1,
        0.0,
        "<",
        format!("one unstable mode: lambda2 = {:.6}", cs.lambda2),
    );
    let t_lin = 2.0 * core::f64::consts::PI / (-cs.lambda1).sqrt();
    report.metric("period_linear", t_lin);

    let opts = OrbitOptions {
        n_sigma: cfg.n_sigma,
        ny: cfg.ny,
        ..OrbitOptions::default()
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut last = None;
    for (k, &eps) in cfg.epsilons.iter().enumerate() {
        let orbit = orbit_search(&cs, eps, &cfg.reaction, &opts)?;
        rows.push(vec![eps, orbit.period, cs.lambda1]);

        report.check_ge(
            &format!("amplitude_{k}"),
            orbit.amplitude,
            5e-4,
            format!("departure from the flat profile at epsilon = {eps}"),
        );
        report.check_le(
            &format!("residual_{k}"),
            orbit.residual,
            1e-8,
            "sup-norm of the torus equations at the converged orbit",
        );
        report.check_le(
            &format!("period_near_linear_{k}"),
            (orbit.period - t_lin).abs() / t_lin,
            0.1,
            format!("T = {:.6} vs 2 pi / sqrt(-lambda1) = {t_lin:.6}", orbit.period),
        );
        let energy = spatial_energy(&orbit, &cfg.reaction)?;
        let drift = energy
            .iter()
            .map(|&e| (e - energy[0]).abs())
            .fold(0.0, f64::max);
        report.check_le(
            &format!("energy_conserved_{k}"),
            drift / (1.0 + energy[0].abs()),
            1e-5,
            format!("max |H - H(0)| relative to 1 + |H(0)|, H(0) = {:.8}", energy[0]),
        );
        last = Some(orbit);
    }

    csvio::write_table(&out.join("orbits.csv"), "epsilon,T,lambda1", &rows)?;
    report.artifact(Path::new("orbits.csv"));
    if let Some(orbit) = last {
        csvio::write_orbit_csv(&out.join("orbit.csv"), &orbit)?;
        csvio::write_orbit_header(&out.join("orbit.json"), &orbit, cs.lambda1)?;
        report.artifact(Path::new("orbit.csv"));
        report.artifact(Path::new("orbit.json"));
    }
    Ok(report)
}
