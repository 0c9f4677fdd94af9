//! Slab with a single well hanging below, run at the marginal blend of two
//! reactions. A two-parameter Newton retunes the blend and the wall slope to
//! the discrete fold of the cross-channel profile, so the infinite-depth
//! limit of the principal eigenvalue is exactly zero and finite depths must
//! extrapolate back to it.

use crate::config::WellsCfg;
use crate::csvio;
use crate::error::PipelineError;
use crate::report::Report;
use monostab_core::grid2d::{build_mask, relax, BuilderTag, Direction, RelaxOptions};
use monostab_core::reaction::{Quartic, Reaction};
use monostab_core::spectra::{eigen2d, Eigen2dOptions};
use std::path::Path;

struct Fold {
    alpha: f64,
    tau: f64,
    /// Interior profile values, `u_1 .. u_{N-1}`.
    phi: Vec<f64>,
    residual: f64,
    iters: usize,
}

struct March {
    u_n: f64,
    v_n: f64,
    w_n: f64,
    p_n: f64,
    q_n: f64,
    interior: Vec<f64>,
}

/// Lattice shooting for the profile and its variations with respect to the
/// slope (`v`, `p`) and the blend (`w`, `q`).
fn march(q0: &Quartic, q1: &Quartic, n: usize, h: f64, a: f64, t: f64) -> March {
    let f = |s: f64| (1.0 - t) * q0.f(s) + t * q1.f(s);
    let fp = |s: f64| (1.0 - t) * q0.df(s) + t * q1.df(s);
    let fpp = |s: f64| (1.0 - t) * q0.ddf(s) + t * q1.ddf(s);
    let g = |s: f64| q1.f(s) - q0.f(s);
    let gp = |s: f64| q1.df(s) - q0.df(s);

    let h2 = h * h;
    let (mut u0, mut v0, mut w0, mut p0, mut q0v) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let (mut u1, mut v1, mut w1, mut p1, mut q1v) = (a * h, h, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut interior = Vec::with_capacity(n - 1);
    interior.push(u1);
    for _ in 1..n {
        let u2 = 2.0 * u1 - u0 - h2 * f(u1);
        let v2 = 2.0 * v1 - v0 - h2 * fp(u1) * v1;
        let w2 = 2.0 * w1 - w0 - h2 * (fp(u1) * w1 + g(u1));
        let p2 = 2.0 * p1 - p0 - h2 * (fpp(u1) * v1 * v1 + fp(u1) * p1);
        let q2 = 2.0 * q1v - q0v - h2 * (fpp(u1) * w1 * v1 + fp(u1) * q1v + gp(u1) * v1);
        (u0, v0, w0, p0, q0v) = (u1, v1, w1, p1, q1v);
        (u1, v1, w1, p1, q1v) = (u2, v2, w2, p2, q2);
        interior.push(u1);
    }
    interior.pop();
    March { u_n: u1, v_n: v1, w_n: w1, p_n: p1, q_n: q1v, interior }
}

/// Newton on `(u_N, ∂u_N/∂a) = 0` in the unknowns `(a, tau)`, i.e. the
/// profile returns to zero exactly at the far wall and sits at a fold there.
fn fold_newton(cfg: &WellsCfg, n: usize, h: f64) -> Result<Fold, PipelineError> {
    let q0 = cfg.f0.quartic()?;
    let q1 = cfg.f1.quartic()?;
    let (mut a, mut t) = (cfg.alpha0, cfg.tau0);
    for it in 0..80 {
        let m = march(&q0, &q1, n, h, a, t);
        let det = m.v_n * m.q_n - m.w_n * m.p_n;
        let residual = m.u_n.abs().max(m.v_n.abs());
        if !det.is_finite() || det == 0.0 {
            return Err(PipelineError::FoldDivergence { residual });
        }
        let da = (-m.u_n * m.q_n + m.v_n * m.w_n) / det;
        let dt = (-m.v_n * m.v_n + m.p_n * m.u_n) / det;
        let sc = 1.0_f64
            .min(0.05 / dt.abs().max(1e-12))
            .min(0.5 / da.abs().max(1e-12));
        a += sc * da;
        t += sc * dt;
        if da.abs().max(dt.abs()) < 1e-14 {
            let m = march(&q0, &q1, n, h, a, t);
            return Ok(Fold {
                alpha: a,
                tau: t,
                phi: m.interior,
                residual: m.u_n.abs().max(m.v_n.abs()),
                iters: it + 1,
            });
        }
    }
    let m = march(&q0, &q1, n, h, a, t);
    Err(PipelineError::FoldDivergence {
        residual: m.u_n.abs().max(m.v_n.abs()),
    })
}

pub fn run(cfg: &WellsCfg, mut report: Report, out: &Path) -> Result<Report, PipelineError> {
    let n = cfg.nodes_across + 1;
    let h = cfg.well_length / n as f64;
    let fold = fold_newton(cfg, n, h)?;
    let r = Reaction::Interpolated {
        tau: fold.tau,
        base0: Box::new(cfg.f0.clone()),
        base1: Box::new(cfg.f1.clone()),
    };
    report.metric("alpha_fold", fold.alpha);
    report.metric("tau_fold", fold.tau);
    report.metric("fold_residual", fold.residual);
    report.metric("fold_iters", fold.iters);
    report.metric(
        "phi_sup",
        fold.phi.iter().cloned().fold(0.0_f64, f64::max),
    );

    // Half-spacing padding keeps every lattice node strictly clear of the
    // strict well-wall inequalities.
    let base_length = cfg.base_cells[0] as f64 * h;
    let base_height = cfg.base_cells[1] as f64 * h;
    let width = cfg.well_length - 0.5 * h;
    let quartic = r.quartic()?;

    let mut lambda_rows: Vec<Vec<f64>> = Vec::new();
    let mut lambdas: Vec<f64> = Vec::new();
    let mut deepest = None;
    for &dmul in &cfg.depth_factors {
        let depth_nominal = dmul * cfg.well_length;
        let mask = build_mask(
            &BuilderTag::Wells {
                base_length,
                base_height,
                widths: vec![width],
                depths: vec![depth_nominal - 0.5 * h],
            },
            h,
        )?;
        let ones = vec![1.0; mask.n_cells()];
        let state = relax(&mask, &r, &ones, Direction::Down, &RelaxOptions::default())?;
        let q: Vec<f64> = state.values.iter().map(|&u| quartic.df(u)).collect();
        let spec = eigen2d(&mask, &q, 1, &Eigen2dOptions::default())?;
        lambda_rows.push(vec![dmul, depth_nominal, mask.n_cells() as f64, spec.lambda1]);
        lambdas.push(spec.lambda1);
        deepest = Some((depth_nominal, mask, state.values));
    }
    csvio::write_table(&out.join("lambda.csv"), "depth_factor,depth,cells,lambda", &lambda_rows)?;
    report.artifact(Path::new("lambda.csv"));

    let worst_rise = lambdas
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    report.check(
        "lambda_strictly_decreasing",
        worst_rise < 0.0,
        worst_rise,
        0.0,
        "<",
        "largest forward difference of lambda over the depth sweep",
    );

    // The eigenvalue decays like depth^-2 once the well dominates; a
    // two-point second-order extrapolation on the deepest pair reaches the
    // infinite-depth limit, which the fold pins at zero.
    let k = lambdas.len() - 1;
    let rho = cfg.depth_factors[k] / cfg.depth_factors[k - 1];
    let extrapolated = (rho * rho * lambdas[k] - lambdas[k - 1]) / (rho * rho - 1.0);
    report.check_le(
        "extrapolated_lambda_abs",
        extrapolated.abs(),
        0.02,
        format!(
            "({rho:.0}^2 * {:.6} - {:.6}) / ({rho:.0}^2 - 1)",
            lambdas[k], lambdas[k - 1]
        ),
    );
    report.metric("extrapolated_lambda", extrapolated);
    if lambdas.len() >= 3 {
        report.metric(
            "extrapolated_lambda_shifted",
            shifted_fit(&cfg.depth_factors, &lambdas, cfg.well_length),
        );
        report.metric("extrapolated_lambda_order1", 2.0 * lambdas[k] - lambdas[k - 1]);
    }

    // Mid-depth cross-sections of the deepest well must reproduce the fold
    // profile.
    let (depth, mask, values) = deepest.expect("at least one depth ran");
    let c0 = (cfg.base_cells[0] - 1 - cfg.nodes_across) / 2;
    let y_target = -0.5 * depth;
    let mut best = (f64::INFINITY, 0u32);
    for i in 0..mask.n_cells() {
        let (ix, iy) = mask.cell_index(i);
        let (_, y) = mask.cell_center(i);
        if ix as usize == c0 + cfg.nodes_across / 2 && (y - y_target).abs() < best.0 {
            best = ((y - y_target).abs(), iy);
        }
    }
    let mut profile_rows: Vec<Vec<f64>> = Vec::new();
    let mut worst_dev = 0.0_f64;
    for j in 0..cfg.nodes_across {
        let cell = mask
            .cell_at((c0 + j) as i64, best.1 as i64)
            .expect("well interior node");
        let u = values[cell];
        let dev = (u - fold.phi[j]).abs();
        worst_dev = worst_dev.max(dev);
        profile_rows.push(vec![(j as f64 + 1.0) * h, u, fold.phi[j]]);
    }
    csvio::write_table(&out.join("profile.csv"), "x,u,phi", &profile_rows)?;
    report.artifact(Path::new("profile.csv"));
    csvio::write_mask_pbm(&out.join("mask.pbm"), &mask)?;
    report.artifact(Path::new("mask.pbm"));
    report.check_le(
        "mid_depth_profile_dev",
        worst_dev,
        0.05,
        format!("cross-section at depth {:.4} vs the fold profile", -y_target),
    );
    Ok(report)
}

/// Three-point fit `lambda = lambda_inf + b/(D + s)^2` on the deepest
/// triple, secant iteration on the shift `s`.
fn shifted_fit(factors: &[f64], lambdas: &[f64], l: f64) -> f64 {
    let k = lambdas.len();
    let d: Vec<f64> = factors[k - 3..].iter().map(|&f| f * l).collect();
    let (l0, l1, l2) = (lambdas[k - 3], lambdas[k - 2], lambdas[k - 1]);
    let lam_inf = |s: f64| -> (f64, f64) {
        let x0 = 1.0 / ((d[0] + s) * (d[0] + s));
        let x1 = 1.0 / ((d[1] + s) * (d[1] + s));
        let b = (l0 - l1) / (x0 - x1);
        (l1 - b * x1, b)
    };
    let resid = |s: f64| -> f64 {
        let (li, b) = lam_inf(s);
        l2 - (li + b / ((d[2] + s) * (d[2] + s)))
    };
    let (mut s0, mut s1) = (0.0_f64, 1.0_f64);
    let (mut r0, mut r1) = (resid(s0), resid(s1));
    for _ in 0..60 {
        if (r1 - r0).abs() < 1e-300 {
            break;
        }
        let s2 = s1 - r1 * (s1 - s0) / (r1 - r0);
        (s0, r0) = (s1, r1);
        (s1, r1) = (s2, resid(s2));
        if r1.abs() < 1e-14 {
            break;
        }
    }
    lam_inf(s1).0
}
