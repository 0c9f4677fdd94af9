//! Two rooms joined by a thin bridge. The pocket square alone straddles the
//! half level; attached through a narrow enough bridge it still does, the
//! extremal gap stays open, and the maximal state decays across the bridge
//! at the rate the channel width dictates.

use crate::config::PocketCfg;
use crate::csvio;
use crate::error::PipelineError;
use crate::pipelines::{ls_slope, sup};
use crate::report::Report;
use monostab_core::grid2d::{build_mask, min_max_solutions, BuilderTag, Mask2D, MinMax, RelaxOptions};
use std::path::Path;

struct BridgeScan {
    w_cells: usize,
    bridge_max: f64,
    mid_cross: f64,
    pocket_min: f64,
    pocket_max: f64,
    /// `(distance into the bridge, column max of u_max)` on the bridge rows.
    columns: Vec<(f64, f64)>,
}

fn scan(mask: &Mask2D, mm: &MinMax, cfg: &PocketCfg, delta: f64) -> BridgeScan {
    let h = mask.h();
    let round = |x: f64| x.round() as i64;
    let nb = round(cfg.base / h);
    let nbr = round(2.0 * cfg.bridge_half_length / h);
    let i_mid = nb + nbr / 2;
    let w_cells = round(2.0 * delta / h).max(1);
    let jc = round(0.5 * cfg.base / h);
    let js = jc - w_cells / 2;

    let mut out = BridgeScan {
        w_cells: w_cells as usize,
        bridge_max: 0.0,
        mid_cross: 0.0,
        pocket_min: 0.0,
        pocket_max: 0.0,
        columns: vec![(0.0, 0.0); (i_mid - nb - 1).max(0) as usize],
    };
    for k in 0..mask.n_cells() {
        let (ix, iy) = mask.cell_index(k);
        let (i, j) = (ix as i64 + 1, iy as i64 + 1);
        let v = mm.u_max[k];
        if i > nb && i < nb + nbr {
            out.bridge_max = out.bridge_max.max(v);
        }
        if i == i_mid {
            out.mid_cross = out.mid_cross.max(v);
        }
        if i > nb + nbr {
            out.pocket_min = out.pocket_min.max(mm.u_min[k]);
            out.pocket_max = out.pocket_max.max(v);
        }
        if i >= nb + 2 && i <= i_mid && j >= js && j < js + w_cells {
            let col = &mut out.columns[(i - nb - 2) as usize];
            col.0 = (i - nb) as f64 * h;
            col.1 = col.1.max(v);
        }
    }
    out
}

/// Log-linear decay rate over the entry stretch of the bridge, before the
/// profile feels the far room.
fn decay_rate(columns: &[(f64, f64)]) -> f64 {
    let take = (0.6 * columns.len() as f64) as usize;
    let take = take.max(3).min(columns.len());
    let xs: Vec<f64> = columns[..take].iter().map(|c| c.0).collect();
    let ys: Vec<f64> = columns[..take].iter().map(|c| c.1.ln()).collect();
    -ls_slope(&xs, &ys)
}

pub fn run(cfg: &PocketCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let opts = RelaxOptions::default();

    // The pocket square on its own already carries a straddling pair.
    let iso = build_mask(
        &BuilderTag::Rectangle { width: cfg.pocket, height: cfg.pocket },
        cfg.h,
    )?;
    let mm_iso = min_max_solutions(&iso, &cfg.reaction, &opts)?;
    let (iso_min, iso_max) = (sup(&mm_iso.u_min), sup(&mm_iso.u_max));
    report.check(
        "isolated_sup_min_below_half",
        iso_min < 0.5,
        iso_min,
        0.5,
        "<",
        "minimal state on the detached pocket square",
    );
    report.check_ge(
        "isolated_sup_max_above_half",
        iso_max,
        0.5,
        "maximal state on the detached pocket square",
    );

    // Narrow the bridge until the crossing is starved.
    let mut sweep_rows: Vec<Vec<f64>> = Vec::new();
    let mut accepted: Option<(f64, Mask2D, MinMax, BridgeScan)> = None;
    for &delta in &cfg.deltas {
        let mask = build_mask(
            &BuilderTag::Pocket {
                base: cfg.base,
                bridge_half_length: cfg.bridge_half_length,
                bridge_half_width: delta,
                pocket: cfg.pocket,
            },
            cfg.h,
        )?;
        let mm = min_max_solutions(&mask, &cfg.reaction, &opts)?;
        let sc = scan(&mask, &mm, cfg, delta);
        let pass = sc.mid_cross <= 0.25 * sc.bridge_max;
        sweep_rows.push(vec![
            delta,
            sc.w_cells as f64,
            sc.mid_cross,
            sc.bridge_max,
            if pass { 1.0 } else { 0.0 },
        ]);
        if pass {
            accepted = Some((delta, mask, mm, sc));
            break;
        }
    }
    csvio::write_table(&out.join("sweep.csv"), "delta,w_cells,mid_cross,bridge_max,starved", &sweep_rows)?;
    report.artifact(Path::new("sweep.csv"));

    let (delta, mask, mm, sc) = accepted.ok_or(PipelineError::SweepExhausted {
        tried: cfg.deltas.clone(),
    })?;
    csvio::write_mask_pbm(&out.join("mask.pbm"), &mask)?;
    csvio::write_field_csv(&out.join("u_min.csv"), &mask, &mm.u_min)?;
    csvio::write_field_csv(&out.join("u_max.csv"), &mask, &mm.u_max)?;
    csvio::write_field_bin(&out.join("u_max.bin"), &mm.u_max)?;
    for name in ["mask.pbm", "u_min.csv", "u_max.csv", "u_max.bin"] {
        report.artifact(Path::new(name));
    }

    report.check_ge(
        "gap",
        mm.gap,
        0.2,
        format!("extremal gap at bridge half-width {delta}"),
    );
    report.check(
        "pocket_sup_min_below_half",
        sc.pocket_min < 0.5,
        sc.pocket_min,
        0.5,
        "<",
        "minimal state over the attached pocket",
    );
    report.check_ge(
        "pocket_sup_max_above_half",
        sc.pocket_max,
        0.5,
        "maximal state over the attached pocket",
    );

    let mu = cfg.reaction.classify()?.lipschitz;
    let alpha = core::f64::consts::PI * core::f64::consts::PI / 4.0;
    let rate_theory = (alpha / (delta * delta) - mu).sqrt();
    let rate_emp = decay_rate(&sc.columns);
    report.check_le(
        "bridge_decay_rate",
        (rate_emp / rate_theory - 1.0).abs(),
        0.2,
        format!("fitted {rate_emp:.4} vs sqrt(alpha/delta^2 - mu) = {rate_theory:.4}"),
    );
    report.metric("delta_accepted", delta);
    report.metric("w_cells", sc.w_cells);
    report.metric("mid_cross", sc.mid_cross);
    report.metric("bridge_max", sc.bridge_max);
    report.metric("rate_empirical", rate_emp);
    report.metric("rate_theory", rate_theory);
    report.metric("lipschitz", mu);
    report.metric("gap", mm.gap);

    // Re-widening the bridge is informational only: the gap may or may not
    // survive a crossing four times as wide.
    let wide = 4.0 * delta;
    let mask_w = build_mask(
        &BuilderTag::Pocket {
            base: cfg.base,
            bridge_half_length: cfg.bridge_half_length,
            bridge_half_width: wide,
            pocket: cfg.pocket,
        },
        cfg.h,
    )?;
    let mm_w = min_max_solutions(&mask_w, &cfg.reaction, &opts)?;
    let sc_w = scan(&mask_w, &mm_w, cfg, wide);
    report.metric("delta_wide", wide);
    report.metric("gap_wide", mm_w.gap);
    report.metric("mid_cross_wide", sc_w.mid_cross);
    Ok(report)
}
