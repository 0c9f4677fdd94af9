//! Dirichlet spectra of the discrete operators `−d²/dx² − q` on an interval
//! and `−Δ − q` on a masked grid.
//!
//! The interval path works on the symmetric tridiagonal matrix directly:
//! eigenvalues by bisection on Sturm sign counts, the ground state by shifted
//! inverse iteration, and one Richardson pass over a doubled grid. The masked
//! path is a thick-restart Lanczos iteration with full reorthogonalization
//! and an explicit residual check; small problems fall back to a dense
//! Jacobi solve.

use crate::grid2d::{self, BuilderTag, GridError, Mask2D};
use crate::reaction::{Reaction, ReactionError};
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use libm::{ceil, fabs, sqrt};

#[derive(Debug)]
pub enum SpectraError {
    Reaction(ReactionError),
    Grid(Box<GridError>),
    BadInput(&'static str),
    NoConvergence { matvecs: u64, last: f64 },
    /// Every sampled ball missed the mask.
    AllCentersSkipped,
}

impl fmt::Display for SpectraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectraError::Reaction(e) => write!(f, "{e}"),
            SpectraError::Grid(e) => write!(f, "{e}"),
            SpectraError::BadInput(why) => write!(f, "bad spectral input: {why}"),
            SpectraError::NoConvergence { matvecs, last } => write!(
                f,
                "eigensolver did not converge after {matvecs} matvecs (last estimate {last})"
            ),
            SpectraError::AllCentersSkipped => write!(f, "every sampled ball missed the mask"),
        }
    }
}

impl From<ReactionError> for SpectraError {
    fn from(e: ReactionError) -> Self {
        SpectraError::Reaction(e)
    }
}

impl From<GridError> for SpectraError {
    fn from(e: GridError) -> Self {
        SpectraError::Grid(Box::new(e))
    }
}

/// Smallest Dirichlet eigenvalue(s) with the principal eigenfunction.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub lambda1: f64,
    /// Second eigenvalue when two modes were requested.
    pub lambda2: Option<f64>,
    /// Principal eigenfunction, sup-normalized and positive, one entry per
    /// node of the grid the solve ran on.
    pub vec1: Vec<f64>,
    /// Relative 2-norm residual `‖Av − λv‖/‖v‖` of the discrete pair that
    /// produced `vec1` (for the interval solver this is the fine-grid pair,
    /// before extrapolation).
    pub residual: f64,
    /// Spacing of the grid carrying `vec1`.
    pub h: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn norm2(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

/// Number of eigenvalues of `tridiag(off, diag, off)` strictly below `sigma`,
/// by the sign count of the LDL pivots.
fn sturm_count(diag: &[f64], off: f64, sigma: f64) -> usize {
    let e2 = off * off;
    let mut count = 0usize;
    let mut d = diag[0] - sigma;
    if d < 0.0 {
        count += 1;
    }
    for &a in &diag[1..] {
        if d == 0.0 {
            d = 1e-300;
        }
        d = a - sigma - e2 / d;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th (0-based, ascending) eigenvalue by bisection.
fn tridiag_eigenvalue(diag: &[f64], off: f64, k: usize) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &a in diag {
        lo = lo.min(a);
        hi = hi.max(a);
    }
    let r = 2.0 * fabs(off);
    let mut lo = lo - r;
    let mut hi = hi + r;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) >= k + 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve `(T − λ) x = b` in place, Gaussian elimination with partial
/// pivoting on the three bands.
fn solve_tridiag_shifted(diag: &[f64], off: f64, lambda: f64, b: &mut [f64]) {
    let n = diag.len();
    if n == 1 {
        let mut d = diag[0] - lambda;
        if d == 0.0 {
            d = 1e-300;
        }
        b[0] /= d;
        return;
    }
    let mut dl = vec![off; n - 1];
    let mut d: Vec<f64> = diag.iter().map(|&a| a - lambda).collect();
    let mut du = vec![off; n - 1];
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];
    for i in 0..n - 1 {
        if fabs(d[i]) >= fabs(dl[i]) {
            if d[i] == 0.0 {
                d[i] = 1e-300;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = 1e-300;
    }
    for i in 0..n - 1 {
        if swapped[i] {
            b.swap(i, i + 1);
        }
        let fact = dl[i];
        b[i + 1] -= fact * b[i];
    }
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}

fn tridiag_ground_vector(diag: &[f64], off: f64, lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let mut v = vec![1.0; n];
    let inv = 1.0 / norm2(&v);
    for x in v.iter_mut() {
        *x *= inv;
    }
    for _ in 0..3 {
        solve_tridiag_shifted(diag, off, lambda, &mut v);
        let nrm = norm2(&v);
        if !(nrm > 0.0) || !nrm.is_finite() {
            v = vec![1.0; n];
            continue;
        }
        let inv = 1.0 / nrm;
        for x in v.iter_mut() {
            *x *= inv;
        }
    }
    v
}

/// Cubic midpoint refinement: `n` uniform interior samples become `2n + 1`.
fn refine_samples(q: &[f64]) -> Vec<f64> {
    let n = q.len();
    debug_assert!(n >= 4);
    let mut out = Vec::with_capacity(2 * n + 1);
    for j in 0..=2 * n {
        if j % 2 == 1 {
            out.push(q[(j - 1) / 2]);
            continue;
        }
        let k = j / 2;
        let v = if k == 0 {
            2.1875 * q[0] - 2.1875 * q[1] + 1.3125 * q[2] - 0.3125 * q[3]
        } else if k == 1 {
            0.3125 * q[0] + 0.9375 * q[1] - 0.3125 * q[2] + 0.0625 * q[3]
        } else if k == n {
            2.1875 * q[n - 1] - 2.1875 * q[n - 2] + 1.3125 * q[n - 3] - 0.3125 * q[n - 4]
        } else if k == n - 1 {
            0.3125 * q[n - 1] + 0.9375 * q[n - 2] - 0.3125 * q[n - 3] + 0.0625 * q[n - 4]
        } else {
            (-q[k - 2] + 9.0 * q[k - 1] + 9.0 * q[k] - q[k + 1]) / 16.0
        };
        out.push(v);
    }
    out
}

/// Smallest Dirichlet eigenvalues of `−ψ″ − qψ` on `(0, l)`.
///
/// The potential is sampled at the interior nodes `(i+1)·l/(n+1)` of a
/// uniform grid, at least 200 of them. Eigenvalues are Richardson-
/// extrapolated over a cubically refined doubling of the sample grid; the
/// returned eigenfunction lives on the fine grid.
pub fn eigen1d(q: &[f64], l: f64, n_modes: usize) -> Result<SpectralResult, SpectraError> {
    let n = q.len();
    if !(l > 0.0) || !l.is_finite() {
        return Err(SpectraError::BadInput("interval length must be positive"));
    }
    if n < 200 {
        return Err(SpectraError::BadInput("need at least 200 potential samples"));
    }
    if !(1..=2).contains(&n_modes) {
        return Err(SpectraError::BadInput("n_modes must be 1 or 2"));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(SpectraError::BadInput("potential must be finite"));
    }
    let h = l / (n as f64 + 1.0);
    let hf = 0.5 * h;
    let inv_h2 = 1.0 / (h * h);
    let inv_hf2 = 1.0 / (hf * hf);
    let diag_c: Vec<f64> = q.iter().map(|&qi| 2.0 * inv_h2 - qi).collect();
    let qf = refine_samples(q);
    let diag_f: Vec<f64> = qf.iter().map(|&qi| 2.0 * inv_hf2 - qi).collect();

    let mut lam = [0.0f64; 2];
    let mut lam_fine = [0.0f64; 2];
    for k in 0..n_modes {
        let lc = tridiag_eigenvalue(&diag_c, -inv_h2, k);
        let lf = tridiag_eigenvalue(&diag_f, -inv_hf2, k);
        lam_fine[k] = lf;
        lam[k] = (4.0 * lf - lc) / 3.0;
    }

    let mut v = tridiag_ground_vector(&diag_f, -inv_hf2, lam_fine[0]);
    // Rayleigh polish of the fine pair
    let apply = |x: &[f64], y: &mut [f64]| {
        let nn = x.len();
        for i in 0..nn {
            let left = if i > 0 { x[i - 1] } else { 0.0 };
            let right = if i + 1 < nn { x[i + 1] } else { 0.0 };
            y[i] = diag_f[i] * x[i] - inv_hf2 * (left + right);
        }
    };
    let mut av = vec![0.0; v.len()];
    apply(&v, &mut av);
    let lam_pair = dot(&av, &v);
    let mut res2 = 0.0;
    for i in 0..v.len() {
        let r = av[i] - lam_pair * v[i];
        res2 += r * r;
    }
    let residual = sqrt(res2);

    let mut peak = 0.0f64;
    let mut peak_signed = 0.0f64;
    for &x in &v {
        if fabs(x) > peak {
            peak = fabs(x);
            peak_signed = x;
        }
    }
    let scale = if peak_signed < 0.0 { -1.0 / peak } else { 1.0 / peak };
    for x in v.iter_mut() {
        *x *= scale;
    }

    Ok(SpectralResult {
        lambda1: lam[0],
        lambda2: (n_modes == 2).then(|| lam[1]),
        vec1: v,
        residual,
        h: hf,
    })
}

/// Cyclic Jacobi on a dense symmetric matrix (row-major, overwritten).
/// Returns eigenvalues ascending and eigenvectors column-major.
fn jacobi_symmetric(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut scale = 0.0f64;
    for i in 0..n {
        scale = scale.max(fabs(a[i * n + i]));
    }
    for _ in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for qq in p + 1..n {
                off += a[p * n + qq] * a[p * n + qq];
            }
        }
        if sqrt(2.0 * off) <= 1e-14 * (1.0 + scale) {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for qq in p + 1..n {
                let apq = a[p * n + qq];
                if fabs(apq) <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[qq * n + qq];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + sqrt(1.0 + theta * theta))
                } else {
                    1.0 / (theta - sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] = app - t * apq;
                a[qq * n + qq] = aqq + t * apq;
                a[p * n + qq] = 0.0;
                a[qq * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == qq {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + qq];
                    let new_p = arp - s * (arq + tau * arp);
                    let new_q = arq + s * (arp - tau * arq);
                    a[r * n + p] = new_p;
                    a[p * n + r] = new_p;
                    a[r * n + qq] = new_q;
                    a[qq * n + r] = new_q;
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + qq];
                    v[r * n + p] = vrp - s * (vrq + tau * vrp);
                    v[r * n + qq] = vrq + s * (vrp - tau * vrq);
                }
                scale = scale.max(fabs(a[p * n + p])).max(fabs(a[qq * n + qq]));
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i]
            .partial_cmp(&a[j * n + j])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let vals: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vecs[col * n + r] = v[r * n + src];
        }
    }
    (vals, vecs)
}

#[derive(Debug, Clone)]
pub struct Eigen2dOptions {
    /// Lanczos basis size per restart cycle.
    pub basis: usize,
    /// Ritz pairs carried across a restart.
    pub keep: usize,
    /// Relative residual target, `‖Av − λv‖ ≤ tol·(1 + |λ|)`.
    pub tol: f64,
    pub max_matvecs: u64,
    /// Seed for the start vector's tie-breaking noise.
    pub seed: u64,
}

impl Default for Eigen2dOptions {
    fn default() -> Self {
        Eigen2dOptions {
            basis: 32,
            keep: 12,
            tol: 1e-8,
            max_matvecs: 2_000_000,
            seed: 7,
        }
    }
}

/// `y = (−Δ_h − q) x` through the compressed neighbor table; `x` carries one
/// trailing zero pad slot for the absorbing sentinel.
fn apply_masked(nb: &[[u32; 4]], inv_h2: f64, q: &[f64], x: &[f64], y: &mut [f64]) {
    for i in 0..q.len() {
        let [e, w, nn, s] = nb[i];
        let sum = x[e as usize] + x[w as usize] + x[nn as usize] + x[s as usize];
        y[i] = (4.0 * x[i] - sum) * inv_h2 - q[i] * x[i];
    }
}

fn sup_normalize_positive(v: &mut [f64]) {
    let mut peak = 0.0f64;
    let mut peak_signed = 0.0f64;
    for &x in v.iter() {
        if fabs(x) > peak {
            peak = fabs(x);
            peak_signed = x;
        }
    }
    if peak == 0.0 {
        return;
    }
    let scale = if peak_signed < 0.0 { -1.0 / peak } else { 1.0 / peak };
    for x in v.iter_mut() {
        *x *= scale;
    }
}

fn eigen2d_dense(
    mask: &Mask2D,
    q: &[f64],
    n_modes: usize,
) -> Result<SpectralResult, SpectraError> {
    let n = q.len();
    let inv_h2 = 1.0 / (mask.h() * mask.h());
    let nb = mask.neighbors();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = 4.0 * inv_h2 - q[i];
        for f in 0..4 {
            let j = nb[i][f] as usize;
            if j == i {
                a[i * n + i] -= inv_h2;
            } else if j < n {
                a[i * n + j] -= inv_h2;
            }
        }
    }
    let (vals, vecs) = jacobi_symmetric(&mut a, n);
    let mut v1: Vec<f64> = vecs[..n].to_vec();
    let mut padded = vec![0.0; n + 1];
    padded[..n].copy_from_slice(&v1);
    let mut av = vec![0.0; n];
    apply_masked(nb, inv_h2, q, &padded, &mut av);
    let nrm = norm2(&v1);
    let mut res2 = 0.0;
    for i in 0..n {
        let r = av[i] - vals[0] * v1[i];
        res2 += r * r;
    }
    let residual = sqrt(res2) / nrm;
    sup_normalize_positive(&mut v1);
    Ok(SpectralResult {
        lambda1: vals[0],
        lambda2: (n_modes >= 2 && n >= 2).then(|| vals[1]),
        vec1: v1,
        residual,
        h: mask.h(),
    })
}

/// Smallest Dirichlet eigenvalues of `−Δ − q` on the mask, thick-restart
/// Lanczos with full reorthogonalization. Deterministic for a fixed seed.
pub fn eigen2d(
    mask: &Mask2D,
    q: &[f64],
    n_modes: usize,
    opts: &Eigen2dOptions,
) -> Result<SpectralResult, SpectraError> {
    let n = mask.n_cells();
    if q.len() != n {
        return Err(SpectraError::BadInput("potential length does not match the mask"));
    }
    if !(1..=2).contains(&n_modes) {
        return Err(SpectraError::BadInput("n_modes must be 1 or 2"));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(SpectraError::BadInput("potential must be finite"));
    }
    if n <= 64 {
        return eigen2d_dense(mask, q, n_modes);
    }
    let inv_h2 = 1.0 / (mask.h() * mask.h());
    let nb = mask.neighbors();
    let m = opts.basis.max(n_modes + 10).min(n - 1);
    let keep = opts.keep.max(n_modes + 2).min(m - 2);
    let qmax = q.iter().fold(0.0f64, |acc, &x| acc.max(fabs(x)));
    let scale_est = 8.0 * inv_h2 + qmax;
    let brk_tol = 1e-13 * scale_est;

    let mut basis: Vec<Vec<f64>> = (0..=m).map(|_| vec![0.0; n + 1]).collect();
    let mut rng = crate::rng::seeded(opts.seed);
    for x in basis[0][..n].iter_mut() {
        *x = 1.0 + 1e-3 * (crate::rng::next_unit(&mut rng) - 0.5);
    }
    let inv = 1.0 / norm2(&basis[0][..n]);
    for x in basis[0][..n].iter_mut() {
        *x *= inv;
    }

    let mut w = vec![0.0; n];
    let mut tmat = vec![0.0; m * m];
    let mut scratch: Vec<Vec<f64>> = (0..keep).map(|_| vec![0.0; n + 1]).collect();
    let mut j0 = 0usize;
    let mut matvecs = 0u64;
    let mut beta_last = 0.0f64;

    loop {
        let mut m_used = m;
        let mut invariant = false;
        for j in j0..m {
            apply_masked(nb, inv_h2, q, &basis[j], &mut w);
            matvecs += 1;
            for i in 0..=j {
                let c = dot(&w, &basis[i][..n]);
                tmat[i * m + j] = c;
                tmat[j * m + i] = c;
                axpy(&mut w, -c, &basis[i][..n]);
            }
            for i in 0..=j {
                let c = dot(&w, &basis[i][..n]);
                axpy(&mut w, -c, &basis[i][..n]);
            }
            let beta = norm2(&w);
            beta_last = beta;
            if beta <= brk_tol {
                m_used = j + 1;
                invariant = true;
                break;
            }
            let inv = 1.0 / beta;
            for (x, &ww) in basis[j + 1][..n].iter_mut().zip(w.iter()) {
                *x = ww * inv;
            }
        }

        let mut small = vec![0.0; m_used * m_used];
        for r in 0..m_used {
            small[r * m_used..r * m_used + m_used]
                .copy_from_slice(&tmat[r * m..r * m + m_used]);
        }
        let (theta, svec) = jacobi_symmetric(&mut small, m_used);
        let nm = n_modes.min(m_used);
        let bound_ok = (0..nm).all(|i| {
            let b = beta_last * fabs(svec[i * m_used + (m_used - 1)]);
            b <= 0.5 * opts.tol * (1.0 + fabs(theta[i]))
        });

        if invariant || bound_ok || matvecs >= opts.max_matvecs {
            let mut y0 = vec![0.0; n + 1];
            for r in 0..m_used {
                axpy(&mut y0[..n], svec[r], &basis[r][..n]);
            }
            apply_masked(nb, inv_h2, q, &y0, &mut w);
            matvecs += 1;
            let nrm = norm2(&y0[..n]);
            let mut res2 = 0.0;
            for i in 0..n {
                let r = w[i] - theta[0] * y0[i];
                res2 += r * r;
            }
            let residual = sqrt(res2) / nrm;
            if residual <= opts.tol * (1.0 + fabs(theta[0])) || invariant {
                let mut v1 = y0[..n].to_vec();
                sup_normalize_positive(&mut v1);
                return Ok(SpectralResult {
                    lambda1: theta[0],
                    lambda2: (n_modes == 2 && m_used >= 2).then(|| theta[1]),
                    vec1: v1,
                    residual,
                    h: mask.h(),
                });
            }
            if matvecs >= opts.max_matvecs {
                return Err(SpectraError::NoConvergence {
                    matvecs,
                    last: theta[0],
                });
            }
        }

        let k = keep.min(m_used - 1).max(nm);
        for (i, row) in scratch.iter_mut().enumerate().take(k) {
            row[..n].fill(0.0);
            for r in 0..m_used {
                axpy(&mut row[..n], svec[i * m_used + r], &basis[r][..n]);
            }
        }
        for i in 0..k {
            core::mem::swap(&mut basis[i], &mut scratch[i]);
        }
        basis.swap(k, m_used);
        tmat.fill(0.0);
        for i in 0..k {
            tmat[i * m + i] = theta[i];
            let b = beta_last * svec[i * m_used + (m_used - 1)];
            tmat[i * m + k] = b;
            tmat[k * m + i] = b;
        }
        j0 = k;
    }
}

/// One truncation level of the separable strip comparison.
#[derive(Debug, Clone, Copy)]
pub struct ProductRow {
    pub t: f64,
    pub lambda_strip: f64,
    pub lambda_interval: f64,
    /// `lambda_strip − lambda_interval`, nonnegative and shrinking in `t`.
    pub gap: f64,
}

/// Compare `−Δ − q(x)` on the strip `(0, l) × (−t, t)` against the interval
/// operator `−d²/dx² − q` at the same spacing, for each truncation `t`.
///
/// The strip is built at `h = l/(n+1)` so its x-nodes coincide with the
/// sample nodes and separability holds exactly at the discrete level.
pub fn product_lemma_check(
    q1d: &[f64],
    l: f64,
    t_list: &[f64],
) -> Result<Vec<ProductRow>, SpectraError> {
    let n = q1d.len();
    if !(l > 0.0) || !l.is_finite() {
        return Err(SpectraError::BadInput("interval length must be positive"));
    }
    if n < 200 {
        return Err(SpectraError::BadInput("need at least 200 potential samples"));
    }
    if q1d.iter().any(|v| !v.is_finite()) {
        return Err(SpectraError::BadInput("potential must be finite"));
    }
    if t_list.is_empty() {
        return Err(SpectraError::BadInput("need at least one truncation length"));
    }
    let h = l / (n as f64 + 1.0);
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = q1d.iter().map(|&qi| 2.0 * inv_h2 - qi).collect();
    let lambda_interval = tridiag_eigenvalue(&diag, -inv_h2, 0);

    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if !(t >= 2.0 * h) {
            return Err(SpectraError::BadInput("truncation too small for the spacing"));
        }
        let mask = grid2d::build_mask(&BuilderTag::Strip { length: l, half_width: t }, h)?;
        if mask.nx() != n {
            return Err(SpectraError::BadInput("strip nodes drifted off the sample grid"));
        }
        let qs: Vec<f64> = (0..mask.n_cells())
            .map(|i| q1d[mask.cell_index(i).0 as usize])
            .collect();
        let spec = eigen2d(&mask, &qs, 1, &Eigen2dOptions::default())?;
        rows.push(ProductRow {
            t,
            lambda_strip: spec.lambda1,
            lambda_interval,
            gap: spec.lambda1 - lambda_interval,
        });
    }
    Ok(rows)
}

/// Outcome of the sampled ball-localization inequality.
#[derive(Debug, Clone, Copy)]
pub struct LiebReport {
    /// Min over sampled centers of `λ(−Δ + V, Ω ∩ B_R)`.
    pub lhs: f64,
    /// `λ(−Δ + V, Ω) + λ_disk·R⁻² + tol_disc`.
    pub rhs: f64,
    /// `rhs − lhs`; the inequality holds when this is nonnegative.
    pub slack: f64,
    pub centers_evaluated: usize,
    pub seed: u64,
}

/// Sample ball centers on lattice nodes within `r_ball` of the mask and
/// check `min_x λ(−Δ+V, Ω∩B_R(x)) ≤ λ(−Δ+V, Ω) + λ(B_1)·R⁻² + 10h²·sup|V|`.
///
/// The first center is always the peak node of the domain eigenfunction,
/// which approximates the averaging witness behind the inequality; a purely
/// uniform draw would miss the good-center region with high probability.
/// The remaining `n_centers − 1` are a seeded draw without replacement.
pub fn lieb_check(
    mask: &Mask2D,
    v: &[f64],
    r_ball: f64,
    n_centers: usize,
    seed: u64,
) -> Result<LiebReport, SpectraError> {
    let n = mask.n_cells();
    if v.len() != n {
        return Err(SpectraError::BadInput("potential length does not match the mask"));
    }
    if !(r_ball >= 4.0 * mask.h()) {
        return Err(SpectraError::BadInput("ball radius must be at least 4h"));
    }
    if n_centers == 0 {
        return Err(SpectraError::BadInput("need at least one center"));
    }
    for (i, row) in mask.neighbors().iter().enumerate() {
        if row.iter().any(|&f| f == i as u32) {
            return Err(SpectraError::BadInput("masks with mirror faces are not supported here"));
        }
    }
    let h = mask.h();
    let qneg: Vec<f64> = v.iter().map(|x| -x).collect();
    let dom = eigen2d(mask, &qneg, 1, &Eigen2dOptions::default())?;

    // lattice offsets covering one ball, nearest first
    let reach = ceil(r_ball / h) as i64;
    let r2 = r_ball * r_ball / (h * h);
    let mut offsets: Vec<(i64, i64)> = Vec::new();
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            if ((dx * dx + dy * dy) as f64) <= r2 {
                offsets.push((dx, dy));
            }
        }
    }
    offsets.sort_by_key(|&(dx, dy)| dx * dx + dy * dy);

    let (mut min_ix, mut max_ix, mut min_iy, mut max_iy) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for i in 0..n {
        let (ix, iy) = mask.cell_index(i);
        min_ix = min_ix.min(ix as i64);
        max_ix = max_ix.max(ix as i64);
        min_iy = min_iy.min(iy as i64);
        max_iy = max_iy.max(iy as i64);
    }
    let mut candidates: Vec<(i64, i64)> = Vec::new();
    for iy in (min_iy - reach)..=(max_iy + reach) {
        for ix in (min_ix - reach)..=(max_ix + reach) {
            let near = offsets
                .iter()
                .any(|&(dx, dy)| mask.cell_at(ix + dx, iy + dy).is_some());
            if near {
                candidates.push((ix, iy));
            }
        }
    }
    let mut peak = 0usize;
    for (i, &val) in dom.vec1.iter().enumerate() {
        if val > dom.vec1[peak] {
            peak = i;
        }
    }
    let peak_node = {
        let (ix, iy) = mask.cell_index(peak);
        (ix as i64, iy as i64)
    };
    let mut rng = crate::rng::seeded(seed);
    let mut chosen: Vec<(i64, i64)> = if candidates.len() <= n_centers {
        candidates
    } else {
        let mut pool = candidates;
        for i in 0..n_centers {
            let j = i + crate::rng::next_below(&mut rng, pool.len() - i);
            pool.swap(i, j);
        }
        pool.truncate(n_centers);
        pool
    };
    if let Some(pos) = chosen.iter().position(|&c| c == peak_node) {
        chosen.swap(0, pos);
    } else {
        chosen.pop();
        chosen.insert(0, peak_node);
    }

    let (ox, oy) = mask.origin();
    let (nx, ny) = (mask.nx(), mask.ny());
    let mut lhs = f64::INFINITY;
    let mut evaluated = 0usize;
    for &(cix, ciy) in &chosen {
        let cx = ox + (cix as f64 + 1.0) * h;
        let cy = oy + (ciy as f64 + 1.0) * h;
        let mut inside = vec![false; nx * ny];
        let mut count = 0usize;
        for i in 0..n {
            let (x, y) = mask.cell_center(i);
            if (x - cx) * (x - cx) + (y - cy) * (y - cy) < r_ball * r_ball {
                let (ix, iy) = mask.cell_index(i);
                inside[ix as usize + nx * iy as usize] = true;
                count += 1;
            }
        }
        if count == 0 {
            continue;
        }
        let sub = Mask2D::from_inside(nx, ny, h, (ox, oy), inside, mask.builder().clone())?;
        let mut qsub = vec![0.0; sub.n_cells()];
        for (j, qv) in qsub.iter_mut().enumerate() {
            let (ix, iy) = sub.cell_index(j);
            let parent = mask
                .cell_at(ix as i64, iy as i64)
                .ok_or(SpectraError::BadInput("ball cell escaped the mask"))?;
            *qv = -v[parent];
        }
        let spec = eigen2d(&sub, &qsub, 1, &Eigen2dOptions::default())?;
        lhs = lhs.min(spec.lambda1);
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(SpectraError::AllCentersSkipped);
    }
    let vmax = v.iter().fold(0.0f64, |acc, &x| acc.max(fabs(x)));
    let tol_disc = 10.0 * h * h * vmax;
    let rhs = dom.lambda1 + unit_disk_lambda() / (r_ball * r_ball) + tol_disc;
    Ok(LiebReport {
        lhs,
        rhs,
        slack: rhs - lhs,
        centers_evaluated: evaluated,
        seed,
    })
}

/// Principal Dirichlet eigenvalue of `−Δ` on the unit disk via shooting on
/// the radial equation `ψ″ + ψ′/ρ + λψ = 0`; converged to ~1e−10.
pub fn unit_disk_lambda() -> f64 {
    let shoot = |lam: f64| -> f64 {
        let r0 = 1e-4;
        let mut psi = 1.0 - lam * r0 * r0 / 4.0 + lam * lam * r0 * r0 * r0 * r0 / 64.0;
        let mut dpsi = -lam * r0 / 2.0 + lam * lam * r0 * r0 * r0 / 16.0;
        let steps = 4000usize;
        let dr = (1.0 - r0) / steps as f64;
        let mut rho = r0;
        let f = |rho: f64, p: f64, dp: f64| (dp, -dp / rho - lam * p);
        for _ in 0..steps {
            let (k1p, k1d) = f(rho, psi, dpsi);
            let (k2p, k2d) = f(rho + 0.5 * dr, psi + 0.5 * dr * k1p, dpsi + 0.5 * dr * k1d);
            let (k3p, k3d) = f(rho + 0.5 * dr, psi + 0.5 * dr * k2p, dpsi + 0.5 * dr * k2d);
            let (k4p, k4d) = f(rho + dr, psi + dr * k3p, dpsi + dr * k3d);
            psi += dr / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            dpsi += dr / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            rho += dr;
        }
        psi
    };
    let mut lo = 4.0;
    let mut hi = 8.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if shoot(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Radius `R` with `λ(−Δ, B_R) = inf_{t ∈ (0,s]} f(t)/t`, the reach needed
/// for an interior point to sit above the threshold `s`.
pub fn radius_of_positivity(r: &Reaction, s: f64, d: u8) -> Result<f64, SpectraError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(SpectraError::BadInput("threshold must lie in (0, 1)"));
    }
    let q = r.quartic()?;
    // f(t)/t is the cubic c1 + c2 t + c3 t² + c4 t³
    let g = |t: f64| q.c[1] + t * (q.c[2] + t * (q.c[3] + t * q.c[4]));
    let grid = 4096usize;
    let dt = s / grid as f64;
    let mut rho = q.c[1];
    let mut best_j = 0usize;
    for j in 1..=grid {
        let val = g(j as f64 * dt);
        if val < rho {
            rho = val;
            best_j = j;
        }
    }
    if best_j > 0 && best_j < grid {
        let (gm, g0, gp) = (
            g((best_j - 1) as f64 * dt),
            g(best_j as f64 * dt),
            g((best_j + 1) as f64 * dt),
        );
        let denom = gp - 2.0 * g0 + gm;
        if fabs(denom) > 1e-300 {
            let t_star = (best_j as f64 - 0.5 * (gp - gm) / denom) * dt;
            if t_star > 0.0 && t_star <= s {
                rho = rho.min(g(t_star));
            }
        }
    }
    if !(rho > 0.0) {
        return Err(SpectraError::BadInput("slope floor is not positive below the threshold"));
    }
    match d {
        1 => Ok(core::f64::consts::PI / (2.0 * sqrt(rho))),
        2 => Ok(sqrt(unit_disk_lambda() / rho)),
        _ => Err(SpectraError::BadInput("dimension must be 1 or 2")),
    }
}
