//! Star-shapedness classification and boundary separation under dilation.
//! Kernel sampling decides whether each polygon is strongly star-shaped;
//! for star-shaped ones, `dist(∂Ω, ∂(κΩ))` must grow with `κ`.

use crate::config::StarGeomCfg;
use crate::csvio;
use crate::error::PipelineError;
use crate::report::Report;
use monostab_core::stargeom::{dilation_separation, star_center_set, Polygon, StarError};
use std::path::Path;

pub fn run(cfg: &StarGeomCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let mut sep_rows: Vec<Vec<f64>> = Vec::new();

    for (pi, spec) in cfg.polygons.iter().enumerate() {
        let poly = Polygon::new(spec.vertices.clone())?;
        let name = format!("polygon_{}.json", spec.name);
        csvio::write_polygon_json(&out.join(&name), &poly)?;
        report.artifact(Path::new(&name));

        let kernel = star_center_set(&poly, cfg.grid)?;
        let pts: Vec<Vec<f64>> = kernel.points.iter().map(|&(x, y)| vec![x, y]).collect();
        let kname = format!("kernel_{}.csv", spec.name);
        csvio::write_table(&out.join(&kname), "x,y", &pts)?;
        report.artifact(Path::new(&kname));

        report.check(
            &format!("strongly_star_{}", spec.name),
            kernel.strongly == spec.expect_strongly_star,
            kernel.strongly as u8 as f64,
            spec.expect_strongly_star as u8 as f64,
            "==",
            format!(
                "kernel holds {} grid points, cell = {:.4}",
                kernel.points.len(),
                kernel.cell
            ),
        );
        report.metric(&format!("kernel_area_{}", spec.name), kernel.area_estimate);

        let mut seps = Vec::with_capacity(cfg.kappas.len());
        let mut origin_sees_all = true;
        for &kappa in &cfg.kappas {
            match dilation_separation(&poly, kappa) {
                Ok(s) => {
                    sep_rows.push(vec![pi as f64, kappa, s]);
                    seps.push(s);
                }
                Err(StarError::NotStarShaped) => {
                    origin_sees_all = false;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if !origin_sees_all {
            continue;
        }

        if spec.expect_strongly_star {
            let worst = seps
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            report.check(
                &format!("separation_increasing_{}", spec.name),
                worst > 0.0,
                worst,
                0.0,
                ">",
                "smallest forward difference of the separation over kappa",
            );
        }
        if let Some(apothem) = spec.apothem {
            let worst = cfg
                .kappas
                .iter()
                .zip(&seps)
                .map(|(&k, &s)| (s - (k - 1.0) * apothem).abs())
                .fold(0.0_f64, f64::max);
            report.check_le(
                &format!("separation_formula_{}", spec.name),
                worst,
                1e-3,
                format!("sup |sep - (kappa - 1) * {apothem}|"),
            );
        }
    }

    csvio::write_table(&out.join("separations.csv"), "polygon,kappa,separation", &sep_rows)?;
    report.artifact(Path::new("separations.csv"));
    Ok(report)
}
