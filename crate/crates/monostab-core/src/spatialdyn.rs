//! Periodic, non-constant steady states on the strip `ℝ × (0, L)`: the
//! cross-section linearization and a periodic boundary-value Newton solver
//! for small limit cycles in the unbounded coordinate.
//!
//! Forward integration in `τ` is hopeless (the linearization carries
//! exponentially growing directions), so the orbit is computed as a torus
//! BVP: rescale `τ = T·σ` with `σ ∈ [0, 1)`, treat the period `T` and a
//! symmetry-unfolding drift `ν` as unknowns, and pin amplitude and phase
//! against the principal cross-section mode.

use crate::reaction::{Reaction, ReactionError};
use crate::shoot1d::{self, ShootError};
use crate::spectra::{self, SpectraError};
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use libm::{cos, fabs, sqrt};

#[derive(Debug)]
pub enum SpatialError {
    Reaction(ReactionError),
    Shoot(ShootError),
    Spectra(Box<SpectraError>),
    /// No slope with a shrinking profile length in the scanned window.
    NoUnstableSlope,
    NewtonDivergence { residual: f64 },
    AmplitudeCollapse { amplitude: f64 },
    BadInput(&'static str),
}

impl fmt::Display for SpatialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpatialError::Reaction(e) => write!(f, "{e}"),
            SpatialError::Shoot(e) => write!(f, "{e}"),
            SpatialError::Spectra(e) => write!(f, "{e}"),
            SpatialError::NoUnstableSlope => {
                write!(f, "no slope with a dipping length curve was found")
            }
            SpatialError::NewtonDivergence { residual } => {
                write!(f, "orbit Newton iteration diverged (last residual {residual:.3e})")
            }
            SpatialError::AmplitudeCollapse { amplitude } => {
                write!(f, "orbit collapsed to the flat state (amplitude {amplitude:.3e})")
            }
            SpatialError::BadInput(why) => write!(f, "bad orbit input: {why}"),
        }
    }
}

impl From<ReactionError> for SpatialError {
    fn from(e: ReactionError) -> Self {
        SpatialError::Reaction(e)
    }
}

impl From<ShootError> for SpatialError {
    fn from(e: ShootError) -> Self {
        SpatialError::Shoot(e)
    }
}

impl From<SpectraError> for SpatialError {
    fn from(e: SpectraError) -> Self {
        SpatialError::Spectra(Box::new(e))
    }
}

/// An interval profile whose linearization has exactly one unstable mode,
/// the seed for the strip orbit. All arrays live on a uniform interior grid
/// of `n` nodes spanning `(0, l)`.
#[derive(Debug, Clone)]
pub struct CrossSection {
    pub l: f64,
    pub n: usize,
    /// Slope at the wall that produced the profile.
    pub alpha: f64,
    pub phi: Vec<f64>,
    /// `f'(φ)` at the same nodes.
    pub q: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Principal eigenfunction, sup-normalized and positive.
    pub psi1: Vec<f64>,
}

/// Periodic orbit on the `(σ, y)` torus grid; `field[is * ny + iy]` holds
/// `u(T·is/n_sigma, (iy+1)·l/(ny+1))`.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub period: f64,
    pub epsilon: f64,
    pub l: f64,
    pub n_sigma: usize,
    pub ny: usize,
    pub field: Vec<f64>,
    /// `‖u − φ‖∞` over the torus grid.
    pub amplitude: f64,
    /// Sup-norm of the steady-state equations at the converged point.
    pub residual: f64,
}

/// Locate the slope window with `L̇ < 0`, certify one unstable mode, and
/// package the profile.
///
/// The scan finds the right edge of the dipping window by bisection on the
/// sign of the numerical `L̇` and takes the slope at half that edge, which
/// sits well inside the window whenever one exists.
pub fn cross_section(r: &Reaction) -> Result<CrossSection, SpatialError> {
    let curve = shoot1d::length_curve(r, 120)?;
    let astar = curve.alpha_star;
    let mut edge = None;
    for k in 0..curve.dlengths.len() - 1 {
        if curve.dlengths[k] < 0.0 && curve.dlengths[k + 1] >= 0.0 {
            edge = Some((curve.alphas[k], curve.alphas[k + 1]));
            break;
        }
    }
    let (mut lo, mut hi) = edge.ok_or(SpatialError::NoUnstableSlope)?;
    let fd = |a: f64| -> Result<f64, SpatialError> {
        let da = 1e-4 * astar;
        let up = shoot1d::length_by_quadrature(r, a + da)?;
        let dn = shoot1d::length_by_quadrature(r, a - da)?;
        Ok((up - dn) / (2.0 * da))
    };
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if fd(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.25 * (lo + hi);
    if fd(alpha)? >= 0.0 {
        return Err(SpatialError::NoUnstableSlope);
    }

    let rec = shoot1d::shoot(r, alpha)?;
    let l = rec.length;
    let quartic = r.quartic()?;
    let n_coarse = 201;
    let hq = l / (n_coarse as f64 + 1.0);
    let q_samples: Vec<f64> = (0..n_coarse)
        .map(|i| quartic.df(rec.sample_at((i as f64 + 1.0) * hq).u))
        .collect();
    let spec = spectra::eigen1d(&q_samples, l, 2)?;
    let lambda2 = spec.lambda2.expect("two modes requested");
    if !(spec.lambda1 < 0.0 && lambda2 > 0.0) {
        return Err(SpatialError::NoUnstableSlope);
    }
    // the eigenfunction came back on the refined grid; sample φ there too
    let n = spec.vec1.len();
    let h = l / (n as f64 + 1.0);
    let phi: Vec<f64> = (0..n)
        .map(|i| rec.sample_at((i as f64 + 1.0) * h).u)
        .collect();
    let q: Vec<f64> = phi.iter().map(|&p| quartic.df(p)).collect();
    Ok(CrossSection {
        l,
        n,
        alpha,
        phi,
        q,
        lambda1: spec.lambda1,
        lambda2,
        psi1: spec.vec1,
    })
}

/// Linear interpolation of interior-node samples onto an arbitrary point of
/// `(0, l)`, reading the Dirichlet zeros outside the sampled range.
fn sample_interior(values: &[f64], l: f64, y: f64) -> f64 {
    let n = values.len();
    let h = l / (n as f64 + 1.0);
    let t = y / h - 1.0;
    if t <= -1.0 || t >= n as f64 {
        return 0.0;
    }
    let k = libm::floor(t) as i64;
    let frac = t - k as f64;
    let a = if k < 0 { 0.0 } else { values[k as usize] };
    let b = if k + 1 >= n as i64 { 0.0 } else { values[(k + 1) as usize] };
    a + frac * (b - a)
}

/// Band LU with partial pivoting, bandwidth `bw` on both sides; column-major
/// band storage with room for pivoting fill.
struct BandLu {
    n: usize,
    bw: usize,
    /// `3bw + 1` entries per column; `(i, j)` lives at `col j, 2bw + i − j`.
    data: Vec<f64>,
    piv: Vec<u32>,
}

impl BandLu {
    fn ldab(bw: usize) -> usize {
        3 * bw + 1
    }

    fn new(n: usize, bw: usize) -> BandLu {
        BandLu {
            n,
            bw,
            data: vec![0.0; n * Self::ldab(bw)],
            piv: vec![0; n],
        }
    }

    fn clear(&mut self) {
        self.data.fill(0.0);
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * Self::ldab(self.bw) + (2 * self.bw + i - j)
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    fn factor(&mut self) {
        let n = self.n;
        let bw = self.bw;
        for j in 0..n {
            let last = (j + bw).min(n - 1);
            let mut p = j;
            let mut best = fabs(self.data[self.idx(j, j)]);
            for i in j + 1..=last {
                let v = fabs(self.data[self.idx(i, j)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            self.piv[j] = p as u32;
            let col_last = (j + 2 * bw).min(n - 1);
            if p != j {
                for col in j..=col_last {
                    let a = self.idx(j, col);
                    let b = self.idx(p, col);
                    self.data.swap(a, b);
                }
            }
            let mut pivval = self.data[self.idx(j, j)];
            if pivval == 0.0 {
                pivval = 1e-300;
                let k = self.idx(j, j);
                self.data[k] = pivval;
            }
            for i in j + 1..=last {
                let k = self.idx(i, j);
                let m = self.data[k] / pivval;
                self.data[k] = m;
                if m != 0.0 {
                    for col in j + 1..=col_last {
                        let src = self.idx(j, col);
                        let dst = self.idx(i, col);
                        self.data[dst] -= m * self.data[src];
                    }
                }
            }
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let bw = self.bw;
        for j in 0..n {
            let p = self.piv[j] as usize;
            if p != j {
                b.swap(j, p);
            }
            let last = (j + bw).min(n - 1);
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..=last {
                    b[i] -= self.data[self.idx(i, j)] * bj;
                }
            }
        }
        for i in (0..n).rev() {
            let last = (i + 2 * bw).min(n - 1);
            let mut acc = b[i];
            for col in i + 1..=last {
                acc -= self.data[self.idx(i, col)] * b[col];
            }
            b[i] = acc / self.data[self.idx(i, i)];
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrbitOptions {
    pub n_sigma: usize,
    pub ny: usize,
    /// Sup-norm residual target for the Newton iteration.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            n_sigma: 64,
            ny: 96,
            tol: 1e-9,
            max_iter: 40,
        }
    }
}

/// Newton solve of `u_σσ/T² + u_yy + f(u) + ν·u_σ = 0` on the torus, with
/// the period `T` and unfolding drift `ν` as bordered unknowns matched by
/// amplitude pinning `⟨u(0,·) − φ, ψ₁⟩ = ε‖ψ₁‖²` and phase pinning
/// `⟨u_σ(0,·), ψ₁⟩ = 0`. At a true orbit `ν = 0`.
pub fn orbit_search(
    cs: &CrossSection,
    epsilon: f64,
    r: &Reaction,
    opts: &OrbitOptions,
) -> Result<PeriodicOrbit, SpatialError> {
    if !(1e-3..=5e-2).contains(&epsilon) {
        return Err(SpatialError::BadInput("epsilon must lie in [1e-3, 5e-2]"));
    }
    if !(cs.lambda1 < 0.0) {
        return Err(SpatialError::BadInput("cross-section is not unstable"));
    }
    let ns = opts.n_sigma;
    let ny = opts.ny;
    if ns < 16 || ny < 16 {
        return Err(SpatialError::BadInput("torus grid too coarse"));
    }
    let quartic = r.quartic()?;
    let l = cs.l;
    let dy = l / (ny as f64 + 1.0);
    let ds = 1.0 / ns as f64;
    let phi: Vec<f64> = (0..ny)
        .map(|iy| sample_interior(&cs.phi, l, (iy as f64 + 1.0) * dy))
        .collect();
    let psi: Vec<f64> = (0..ny)
        .map(|iy| sample_interior(&cs.psi1, l, (iy as f64 + 1.0) * dy))
        .collect();
    let psi_norm2: f64 = psi.iter().map(|p| p * p * dy).sum();

    let n = ns * ny;
    let site = |is: usize, iy: usize| -> usize { is + ns * iy };
    let mut u = vec![0.0; n];
    let t0 = 2.0 * core::f64::consts::PI / sqrt(-cs.lambda1);
    let mut period = t0;
    let mut nu = 0.0f64;
    for iy in 0..ny {
        for is in 0..ns {
            u[site(is, iy)] =
                phi[iy] + epsilon * cos(2.0 * core::f64::consts::PI * is as f64 / ns as f64) * psi[iy];
        }
    }

    let bw = ns;
    let mut lu = BandLu::new(n, bw);
    let mut res = vec![0.0; n];
    let mut col_t = vec![0.0; n];
    let mut col_nu = vec![0.0; n];
    let inv_dy2 = 1.0 / (dy * dy);
    let inv_ds2 = 1.0 / (ds * ds);

    let residual_at = |u: &[f64], period: f64, nu: f64, res: &mut [f64]| {
        let inv_t2 = 1.0 / (period * period);
        for iy in 0..ny {
            for is in 0..ns {
                let c = u[site(is, iy)];
                let sp = u[site((is + 1) % ns, iy)];
                let sm = u[site((is + ns - 1) % ns, iy)];
                let yp = if iy + 1 < ny { u[site(is, iy + 1)] } else { 0.0 };
                let ym = if iy > 0 { u[site(is, iy - 1)] } else { 0.0 };
                res[site(is, iy)] = (sp - 2.0 * c + sm) * inv_ds2 * inv_t2
                    + (yp - 2.0 * c + ym) * inv_dy2
                    + quartic.f(c)
                    + nu * (sp - sm) * (0.5 / ds);
            }
        }
    };
    let amp_res = |u: &[f64]| -> f64 {
        let mut acc = 0.0;
        for iy in 0..ny {
            acc += (u[site(0, iy)] - phi[iy]) * psi[iy] * dy;
        }
        acc - epsilon * psi_norm2
    };
    let phase_res = |u: &[f64]| -> f64 {
        let mut acc = 0.0;
        for iy in 0..ny {
            let dsig = (u[site(1, iy)] - u[site(ns - 1, iy)]) * (0.5 / ds);
            acc += dsig * psi[iy] * dy;
        }
        acc
    };

    let mut last_norm = f64::INFINITY;
    for _ in 0..opts.max_iter {
        residual_at(&u, period, nu, &mut res);
        let ra = amp_res(&u);
        let rp = phase_res(&u);
        let mut norm = fabs(ra).max(fabs(rp));
        for &v in res.iter() {
            norm = norm.max(fabs(v));
        }
        if norm <= opts.tol {
            break;
        }
        if !norm.is_finite() || norm > 1e6 {
            return Err(SpatialError::NewtonDivergence { residual: norm });
        }
        last_norm = norm;

        // Jacobian of the field equations
        let inv_t2 = 1.0 / (period * period);
        lu.clear();
        for iy in 0..ny {
            for is in 0..ns {
                let row = site(is, iy);
                let c = u[row];
                lu.set(row, row, -2.0 * inv_ds2 * inv_t2 - 2.0 * inv_dy2 + quartic.df(c));
                let jp = site((is + 1) % ns, iy);
                let jm = site((is + ns - 1) % ns, iy);
                lu.set(row, jp, inv_ds2 * inv_t2 + nu * (0.5 / ds));
                lu.set(row, jm, inv_ds2 * inv_t2 - nu * (0.5 / ds));
                if iy + 1 < ny {
                    lu.set(row, site(is, iy + 1), inv_dy2);
                }
                if iy > 0 {
                    lu.set(row, site(is, iy - 1), inv_dy2);
                }
                let sp = u[jp];
                let sm = u[jm];
                col_t[row] = -2.0 / period * ((sp - 2.0 * c + sm) * inv_ds2 * inv_t2);
                col_nu[row] = (sp - sm) * (0.5 / ds);
            }
        }
        lu.factor();

        let mut x0: Vec<f64> = res.iter().map(|v| -v).collect();
        lu.solve(&mut x0);
        let mut x1 = col_t.clone();
        lu.solve(&mut x1);
        let mut x2 = col_nu.clone();
        lu.solve(&mut x2);

        // constraint rows applied to the three solves
        let row_amp = |v: &[f64]| -> f64 {
            let mut acc = 0.0;
            for iy in 0..ny {
                acc += v[site(0, iy)] * psi[iy] * dy;
            }
            acc
        };
        let row_phase = |v: &[f64]| -> f64 {
            let mut acc = 0.0;
            for iy in 0..ny {
                acc += (v[site(1, iy)] - v[site(ns - 1, iy)]) * (0.5 / ds) * psi[iy] * dy;
            }
            acc
        };
        // [a11 a12; a21 a22]·(dT, dν) = rhs, with du = x0 − dT·x1 − dν·x2
        let a11 = -row_amp(&x1);
        let a12 = -row_amp(&x2);
        let a21 = -row_phase(&x1);
        let a22 = -row_phase(&x2);
        let b1 = -ra - row_amp(&x0);
        let b2 = -rp - row_phase(&x0);
        let det = a11 * a22 - a12 * a21;
        if fabs(det) < 1e-300 {
            return Err(SpatialError::NewtonDivergence { residual: norm });
        }
        let dt = (b1 * a22 - b2 * a12) / det;
        let dnu = (a11 * b2 - a21 * b1) / det;
        for i in 0..n {
            u[i] += x0[i] - dt * x1[i] - dnu * x2[i];
        }
        period += dt;
        nu += dnu;
        if !(period > 0.1 * t0 && period < 10.0 * t0) {
            return Err(SpatialError::NewtonDivergence { residual: norm });
        }
    }

    residual_at(&u, period, nu, &mut res);
    let mut norm = fabs(amp_res(&u)).max(fabs(phase_res(&u)));
    for &v in res.iter() {
        norm = norm.max(fabs(v));
    }
    if norm > opts.tol.max(1e-8) {
        return Err(SpatialError::NewtonDivergence {
            residual: if norm.is_finite() { norm } else { last_norm },
        });
    }
    let mut amplitude = 0.0f64;
    for iy in 0..ny {
        for is in 0..ns {
            amplitude = amplitude.max(fabs(u[site(is, iy)] - phi[iy]));
        }
    }
    if amplitude <= 1e-4 {
        return Err(SpatialError::AmplitudeCollapse { amplitude });
    }
    // repack row-major in σ for export: field[is * ny + iy]
    let mut field = vec![0.0; n];
    for is in 0..ns {
        for iy in 0..ny {
            field[is * ny + iy] = u[site(is, iy)];
        }
    }
    Ok(PeriodicOrbit {
        period,
        epsilon,
        l,
        n_sigma: ns,
        ny,
        field,
        amplitude,
        residual: norm,
    })
}

/// First integral of the τ-dynamics, one value per σ midpoint:
/// `H = Σ_y [½(∂_τ u)² − ½(∂_y u)² + F(u)]·dy`, evaluated on the staggered
/// grid so a σ-constant field gives an exactly constant array.
pub fn spatial_energy(orbit: &PeriodicOrbit, r: &Reaction) -> Result<Vec<f64>, SpatialError> {
    let ns = orbit.n_sigma;
    let ny = orbit.ny;
    if orbit.field.len() != ns * ny {
        return Err(SpatialError::BadInput("field does not match the stated grid"));
    }
    let quartic = r.quartic()?;
    let dy = orbit.l / (ny as f64 + 1.0);
    let dtau = orbit.period / ns as f64;
    let mut mid = vec![0.0; ny];
    let mut out = Vec::with_capacity(ns);
    for k in 0..ns {
        let k2 = (k + 1) % ns;
        let a = &orbit.field[k * ny..(k + 1) * ny];
        let b = &orbit.field[k2 * ny..k2 * ny + ny];
        let mut h = 0.0;
        for iy in 0..ny {
            let ut = (b[iy] - a[iy]) / dtau;
            mid[iy] = 0.5 * (a[iy] + b[iy]);
            h += (0.5 * ut * ut + quartic.anti(mid[iy])) * dy;
        }
        for face in 0..=ny {
            let lo = if face == 0 { 0.0 } else { mid[face - 1] };
            let hi = if face == ny { 0.0 } else { mid[face] };
            let uy = (hi - lo) / dy;
            h -= 0.5 * uy * uy * dy;
        }
        out.push(h);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn cubic() -> Reaction {
        Reaction::Cubic { m: 1.0, c: 2.0 }
    }

    #[test]
    fn band_lu_matches_dense_elimination() {
        let n = 40;
        let bw = 5;
        let mut rng = crate::rng::seeded(11);
        let mut dense = vec![0.0; n * n];
        let mut lu = BandLu::new(n, bw);
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) <= bw {
                    let v = crate::rng::next_unit(&mut rng) - 0.5
                        + if i == j { 3.0 } else { 0.0 };
                    dense[i * n + j] = v;
                    lu.set(i, j, v);
                }
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut x = b.clone();
        lu.factor();
        lu.solve(&mut x);
        // dense Gaussian elimination with partial pivoting as the reference
        let mut a = dense.clone();
        let mut y = b.clone();
        for col in 0..n {
            let mut p = col;
            for i in col + 1..n {
                if a[i * n + col].abs() > a[p * n + col].abs() {
                    p = i;
                }
            }
            for j in 0..n {
                a.swap(col * n + j, p * n + j);
            }
            y.swap(col, p);
            for i in col + 1..n {
                let m = a[i * n + col] / a[col * n + col];
                for j in col..n {
                    a[i * n + j] -= m * a[col * n + j];
                }
                y[i] -= m * y[col];
            }
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= a[i * n + j] * y[j];
            }
            y[i] = acc / a[i * n + i];
        }
        for i in 0..n {
            assert!((x[i] - y[i]).abs() < 1e-10, "row {i}: {} vs {}", x[i], y[i]);
        }
    }

    #[test]
    fn cubic_has_certificate_logistic_does_not() {
        let cs = cross_section(&cubic()).unwrap();
        assert!(cs.lambda1 < 0.0 && cs.lambda2 > 0.0);
        assert!(cs.l < PI, "L = {}", cs.l);
        assert!(cs.lambda1 > -0.1 && cs.lambda1 < -0.03, "{}", cs.lambda1);
        assert!(cs.psi1.iter().all(|&p| p > 0.0));
        assert!(matches!(
            cross_section(&Reaction::Logistic { m: 1.0 }),
            Err(SpatialError::NoUnstableSlope)
        ));
    }

    #[test]
    fn orbit_near_the_linear_period() {
        let r = cubic();
        let cs = cross_section(&r).unwrap();
        let orbit = orbit_search(&cs, 1e-2, &r, &Default::default()).unwrap();
        let t0 = 2.0 * PI / (-cs.lambda1).sqrt();
        assert!((orbit.period - t0).abs() / t0 <= 0.1, "T = {}", orbit.period);
        assert!(orbit.residual <= 1e-8);
        assert!(orbit.amplitude >= 0.5 * orbit.epsilon);
        assert!(orbit.field.iter().all(|&v| v > 0.0));
        // a quarter-period translate is a genuinely different field
        let ns = orbit.n_sigma;
        let ny = orbit.ny;
        let shift = ns / 4;
        let mut dist = 0.0f64;
        for is in 0..ns {
            let js = (is + shift) % ns;
            for iy in 0..ny {
                dist = dist.max((orbit.field[is * ny + iy] - orbit.field[js * ny + iy]).abs());
            }
        }
        assert!(dist > 1e-4, "translate distance {dist}");
    }

    #[test]
    fn small_orbits_follow_the_linearization() {
        let r = cubic();
        let cs = cross_section(&r).unwrap();
        let fine = orbit_search(&cs, 1e-3, &r, &Default::default()).unwrap();
        let coarse = orbit_search(&cs, 2e-3, &r, &Default::default()).unwrap();
        let ratio = coarse.amplitude / fine.amplitude;
        assert!((1.6..=2.4).contains(&ratio), "amplitude ratio {ratio}");
        let mu = 2.0 * PI / fine.period;
        let rel = (mu * mu - (-cs.lambda1)).abs() / (-cs.lambda1);
        assert!(rel <= 0.01, "mu^2 deviation {rel}");
    }

    #[test]
    fn orbit_survives_refinement() {
        let r = cubic();
        let cs = cross_section(&r).unwrap();
        let a = orbit_search(&cs, 5e-3, &r, &Default::default()).unwrap();
        let opts = OrbitOptions {
            n_sigma: 128,
            ny: 192,
            ..Default::default()
        };
        let b = orbit_search(&cs, 5e-3, &r, &opts).unwrap();
        assert!((a.period - b.period).abs() / b.period <= 1e-2);
        assert!((a.amplitude - b.amplitude).abs() / b.amplitude <= 0.1);
    }

    #[test]
    fn energy_flat_field_is_exactly_constant() {
        let r = cubic();
        let cs = cross_section(&r).unwrap();
        let ny = 48;
        let ns = 32;
        let dy = cs.l / (ny as f64 + 1.0);
        let mut field = vec![0.0; ns * ny];
        for is in 0..ns {
            for iy in 0..ny {
                field[is * ny + iy] = sample_interior(&cs.phi, cs.l, (iy as f64 + 1.0) * dy);
            }
        }
        let orbit = PeriodicOrbit {
            period: 10.0,
            epsilon: 0.0,
            l: cs.l,
            n_sigma: ns,
            ny,
            field,
            amplitude: 0.0,
            residual: 0.0,
        };
        let h = spatial_energy(&orbit, &r).unwrap();
        let spread = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - h.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(spread, 0.0);
    }

    #[test]
    fn energy_is_conserved_on_orbits_but_not_on_linear_modes() {
        let r = cubic();
        let cs = cross_section(&r).unwrap();
        let orbit = orbit_search(&cs, 1e-2, &r, &Default::default()).unwrap();
        let h = spatial_energy(&orbit, &r).unwrap();
        let drift = h
            .iter()
            .map(|v| (v - h[0]).abs())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-5 * (1.0 + h[0].abs()), "drift {drift}");

        // the linear ansatz is not a solution: its energy wobbles at O(ε²)
        let drift_of = |eps: f64| -> f64 {
            let ns = 64;
            let ny = 96;
            let t0 = 2.0 * PI / (-cs.lambda1).sqrt();
            let dy = cs.l / (ny as f64 + 1.0);
            let mut field = vec![0.0; ns * ny];
            for is in 0..ns {
                for iy in 0..ny {
                    let y = (iy as f64 + 1.0) * dy;
                    field[is * ny + iy] = sample_interior(&cs.phi, cs.l, y)
                        + eps
                            * (2.0 * PI * is as f64 / ns as f64).cos()
                            * sample_interior(&cs.psi1, cs.l, y);
                }
            }
            let fake = PeriodicOrbit {
                period: t0,
                epsilon: eps,
                l: cs.l,
                n_sigma: ns,
                ny,
                field,
                amplitude: eps,
                residual: f64::NAN,
            };
            let h = spatial_energy(&fake, &r).unwrap();
            h.iter().map(|v| (v - h[0]).abs()).fold(0.0, f64::max)
        };
        let d1 = drift_of(1e-2);
        let d2 = drift_of(5e-3);
        assert!(d1 > 0.0);
        let ratio = d1 / d2;
        assert!((2.5..=6.0).contains(&ratio), "quadratic-order ratio {ratio}");
    }
}
