//! Ball-localization bound for principal eigenvalues: on every mask, some
//! ball of radius `R` carries an eigenvalue no larger than the domain's plus
//! the ball penalty. Runs a fixed instance list and a seeded batch of random
//! rectangles.

use crate::config::{LiebCfg, LiebInstance, PotentialSpec};
use crate::csvio;
use crate::error::PipelineError;
use crate::report::Report;
use monostab_core::grid2d::{build_mask, phi_kappa, BuilderTag, Mask2D};
use monostab_core::spectra::lieb_check;
use rand_core::{RngCore, SeedableRng};
use std::path::Path;

fn unit(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn shape_label(tag: &BuilderTag) -> &'static str {
    match tag {
        BuilderTag::Rectangle { .. } => "rectangle",
        BuilderTag::Interval { .. } => "interval",
        BuilderTag::Strip { .. } => "strip",
        BuilderTag::Disk { .. } => "disk",
        BuilderTag::Annulus { .. } => "annulus",
        BuilderTag::Pocket { .. } => "pocket",
        BuilderTag::Wedge { .. } => "wedge",
        BuilderTag::Wells { .. } => "wells",
    }
}

fn potential_values(spec: &PotentialSpec, mask: &Mask2D) -> Result<Vec<f64>, PipelineError> {
    let n = mask.n_cells();
    match spec {
        PotentialSpec::Zero => Ok(vec![0.0; n]),
        PotentialSpec::Sines { amplitude } => {
            let mut lo = (f64::INFINITY, f64::INFINITY);
            let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for i in 0..n {
                let (x, y) = mask.cell_center(i);
                lo = (lo.0.min(x), lo.1.min(y));
                hi = (hi.0.max(x), hi.1.max(y));
            }
            let h = mask.h();
            let (x0, y0) = (lo.0 - h, lo.1 - h);
            let (wx, wy) = (hi.0 - lo.0 + 2.0 * h, hi.1 - lo.1 + 2.0 * h);
            let pi = core::f64::consts::PI;
            Ok((0..n)
                .map(|i| {
                    let (x, y) = mask.cell_center(i);
                    amplitude * (pi * (x - x0) / wx).sin() * (pi * (y - y0) / wy).sin()
                })
                .collect())
        }
        PotentialSpec::Linearized { reaction } => {
            let phi = phi_kappa(mask, reaction)?;
            let q = reaction.quartic()?;
            Ok(phi.iter().map(|&u| -q.df(u)).collect())
        }
    }
}

pub fn run(cfg: &LiebCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut violations = 0usize;
    let mut idx = 0usize;

    let run_one = |inst: &LiebInstance,
                   label: &str,
                   idx: usize,
                   seed: u64,
                   report: &mut Report,
                   rows: &mut Vec<Vec<f64>>|
     -> Result<bool, PipelineError> {
        let mask = build_mask(&inst.shape, cfg.h)?;
        let v = potential_values(&inst.potential, &mask)?;
        let rep = lieb_check(&mask, &v, inst.r_ball, cfg.n_centers, seed)?;
        csvio::write_lieb_json(&out.join(format!("lieb_{idx:02}.json")), &rep)?;
        report.artifact(Path::new(&format!("lieb_{idx:02}.json")));
        report.check_ge(
            &format!("slack_{idx:02}_{label}"),
            rep.slack,
            0.0,
            format!(
                "min-ball {:.6} vs domain-plus-penalty {:.6} over {} centers",
                rep.lhs, rep.rhs, rep.centers_evaluated
            ),
        );
        rows.push(vec![
            idx as f64,
            rep.lhs,
            rep.rhs,
            rep.slack,
            rep.centers_evaluated as f64,
        ]);
        Ok(rep.slack < 0.0)
    };

    for inst in &cfg.instances {
        let seed = rng.next_u64();
        let label = shape_label(&inst.shape);
        let mask = build_mask(&inst.shape, cfg.h)?;
        csvio::write_mask_pbm(&out.join(format!("mask_{idx:02}.pbm")), &mask)?;
        report.artifact(Path::new(&format!("mask_{idx:02}.pbm")));
        if run_one(inst, label, idx, seed, &mut report, &mut rows)? {
            violations += 1;
        }
        idx += 1;
    }

    for _ in 0..cfg.random_masks {
        let w = 0.7 + 1.5 * unit(&mut rng);
        let ht = 0.7 + 1.5 * unit(&mut rng);
        let amp = 8.0 * unit(&mut rng) - 4.0;
        let seed = rng.next_u64();
        let inst = LiebInstance {
            shape: BuilderTag::Rectangle { width: w, height: ht },
            potential: PotentialSpec::Sines { amplitude: amp },
            r_ball: 0.25,
        };
        if run_one(&inst, "random", idx, seed, &mut report, &mut rows)? {
            violations += 1;
        }
        idx += 1;
    }

    csvio::write_table(&out.join("table.csv"), "index,lhs,rhs,slack,centers", &rows)?;
    report.artifact(Path::new("table.csv"));
    report.check_le(
        "violations",
        violations as f64,
        0.0,
        format!("negative-slack instances out of {idx}"),
    );
    report.metric("instances", idx);
    report.metric("seed", cfg.seed);
    Ok(report)
}
