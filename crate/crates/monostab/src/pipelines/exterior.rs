//! Exterior-of-a-ball profiles: the radial march in dimensions two and three,
//! and a planar annulus relaxation compared against the radial solution along
//! the positive axis.

use crate::config::ExteriorCfg;
use crate::csvio;
use crate::error::PipelineError;
use crate::report::Report;
use monostab_core::grid2d::{build_mask, relax, BuilderTag, Direction, RelaxOptions};
use monostab_core::shoot1d::{profile_value, radial_exterior};
use std::path::Path;

pub fn run(cfg: &ExteriorCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let mut radial2 = None;
    for d in [2u8, 3u8] {
        let prof = radial_exterior(&cfg.reaction, d, cfg.r0, cfg.r_max)?;
        let name = format!("radial_d{d}.csv");
        csvio::write_radial_csv(&out.join(&name), &prof)?;
        report.artifact(Path::new(&name));

        let worst_step = prof
            .profile
            .windows(2)
            .map(|w| w[1].u - w[0].u)
            .fold(f64::INFINITY, f64::min);
        report.check(
            &format!("radial_increasing_d{d}"),
            worst_step > 0.0,
            worst_step,
            0.0,
            ">",
            format!("smallest forward difference of u over {} samples", prof.profile.len()),
        );
        report.metric(&format!("slope_d{d}"), prof.slope);
        if d == 2 {
            radial2 = Some(prof);
        }
    }
    let radial2 = radial2.expect("d = 2 profile was computed");

    // Planar annulus with a mirror at the outer rim, relaxed down from 1.
    let mask = build_mask(
        &BuilderTag::Annulus {
            r0: cfg.r0,
            r1: cfg.r1,
            outer_mirror: true,
        },
        cfg.h,
    )?;
    csvio::write_mask_pbm(&out.join("annulus_mask.pbm"), &mask)?;
    report.artifact(Path::new("annulus_mask.pbm"));
    let ones = vec![1.0; mask.n_cells()];
    let outcome = relax(&mask, &cfg.reaction, &ones, Direction::Down, &RelaxOptions::default())?;
    csvio::write_field_bin(&out.join("annulus_u.bin"), &outcome.values)?;
    report.artifact(Path::new("annulus_u.bin"));
    report.metric("annulus_cells", mask.n_cells());
    report.metric("annulus_steps", outcome.steps);

    // Cells along the positive x-axis: the lattice row whose height is
    // closest to zero.
    let mut best_row = 0u32;
    let mut best_off = f64::INFINITY;
    for i in 0..mask.n_cells() {
        let (_, y) = mask.cell_center(i);
        if y.abs() < best_off {
            best_off = y.abs();
            best_row = mask.cell_index(i).1;
        }
    }
    let mut ray: Vec<(f64, f64)> = Vec::new();
    for i in 0..mask.n_cells() {
        let (x, y) = mask.cell_center(i);
        if mask.cell_index(i).1 == best_row && x > 0.0 {
            ray.push((x.hypot(y), outcome.values[i]));
        }
    }
    ray.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let rows: Vec<Vec<f64>> = ray
        .iter()
        .map(|&(rho, u)| vec![rho, u, profile_value(&radial2.profile, rho)])
        .collect();
    csvio::write_table(&out.join("ray.csv"), "rho,u_grid,u_radial", &rows)?;
    report.artifact(Path::new("ray.csv"));

    // Compare on the inner half of the gap, clear of the mirror rim.
    let cut = 0.5 * (cfg.r0 + cfg.r1);
    let err = rows
        .iter()
        .filter(|r| r[0] <= cut)
        .map(|r| (r[1] - r[2]).abs())
        .fold(0.0_f64, f64::max);
    report.check_le(
        "ray_matches_radial",
        err,
        cfg.ray_tol,
        format!("sup |grid - ode| on the axis up to rho = {cut}"),
    );
    report.metric("ray_offset", best_off);
    Ok(report)
}
