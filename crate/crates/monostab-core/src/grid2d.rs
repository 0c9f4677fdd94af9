//! Masked uniform grids, the explicit monotone relaxation scheme, and
//! extremal steady states obtained from ordered initial data.
//!
//! A mask is the set of interior lattice nodes of a region; the Dirichlet
//! wall sits on the lattice lines just outside (a unit square at `h = 1/64`
//! has a 63x63 interior). The discrete Laplacian reads through a compressed
//! neighbor table in which a sentinel slot holds the homogeneous boundary
//! value; mirror (zero-flux) faces are encoded as a cell being its own
//! neighbor, which keeps the sweep branch-free.

use crate::reaction::{Reaction, ReactionError};
use crate::shoot1d::{self, ShootError};
use crate::spectra::SpectraError;
use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use libm::sqrt;
use serde::{Deserialize, Serialize};

/// Geometry recipe; all lengths are physical, the grid spacing is supplied
/// separately to [`build_mask`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum BuilderTag {
    Rectangle { width: f64, height: f64 },
    /// One row of nodes: the interval `(0, length)`.
    Interval { length: f64 },
    /// `(0, length) x (-half_width, half_width)`.
    Strip { length: f64, half_width: f64 },
    /// Nodes with `|x| < radius`, centered at the origin.
    Disk { radius: f64 },
    /// Nodes with `r0 < |x| < r1`. With `outer_mirror` the outer rim
    /// reflects instead of absorbing, emulating a far larger outer radius.
    Annulus { r0: f64, r1: f64, outer_mirror: bool },
    /// Base square, thin bridge of half-width `bridge_half_width`, pocket
    /// square on the far side. The bridge overlaps one cell into both rooms
    /// so the opening is never pinched off by rounding.
    Pocket {
        base: f64,
        bridge_half_length: f64,
        bridge_half_width: f64,
        pocket: f64,
    },
    /// `{ |x| < truncation, slope·|x| < y < slope·truncation + 1 }`.
    Wedge { slope: f64, truncation: f64 },
    /// Horizontal base slab with rectangular wells hanging below, one per
    /// entry of `widths`/`depths`, centers evenly spaced.
    Wells {
        base_length: f64,
        base_height: f64,
        widths: Vec<f64>,
        depths: Vec<f64>,
    },
}

impl BuilderTag {
    /// Scale every length by `kappa`.
    pub fn dilate(&self, kappa: f64) -> BuilderTag {
        let k = kappa;
        match self {
            BuilderTag::Rectangle { width, height } => BuilderTag::Rectangle {
                width: k * width,
                height: k * height,
            },
            BuilderTag::Interval { length } => BuilderTag::Interval { length: k * length },
            BuilderTag::Strip { length, half_width } => BuilderTag::Strip {
                length: k * length,
                half_width: k * half_width,
            },
            BuilderTag::Disk { radius } => BuilderTag::Disk { radius: k * radius },
            BuilderTag::Annulus { r0, r1, outer_mirror } => BuilderTag::Annulus {
                r0: k * r0,
                r1: k * r1,
                outer_mirror: *outer_mirror,
            },
            BuilderTag::Pocket {
                base,
                bridge_half_length,
                bridge_half_width,
                pocket,
            } => BuilderTag::Pocket {
                base: k * base,
                bridge_half_length: k * bridge_half_length,
                bridge_half_width: k * bridge_half_width,
                pocket: k * pocket,
            },
            BuilderTag::Wedge { slope, truncation } => BuilderTag::Wedge {
                slope: *slope,
                truncation: k * truncation,
            },
            BuilderTag::Wells {
                base_length,
                base_height,
                widths,
                depths,
            } => BuilderTag::Wells {
                base_length: k * base_length,
                base_height: k * base_height,
                widths: widths.iter().map(|w| k * w).collect(),
                depths: depths.iter().map(|d| k * d).collect(),
            },
        }
    }
}

/// Masked node grid with a compressed neighbor table.
#[derive(Debug, Clone)]
pub struct Mask2D {
    nx: usize,
    ny: usize,
    h: f64,
    origin: (f64, f64),
    inside: Vec<bool>,
    builder: BuilderTag,
    cells: Vec<(u32, u32)>,
    full_to_cell: Vec<u32>,
    nb: Vec<[u32; 4]>,
}

#[derive(Debug)]
pub enum GridError {
    Reaction(ReactionError),
    Shoot(ShootError),
    Eigen(Box<SpectraError>),
    BadBuild(&'static str),
    Disconnected,
    TooSmall { cells: usize },
    SizeMismatch { expect: usize, got: usize },
    /// The sweep moved against its declared direction.
    MonotonicityViolation { step: u64, cell: usize },
    RangeViolation { step: u64, cell: usize },
    /// No admissible subsolution seed after 40 halvings.
    SeedRejected,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::Reaction(e) => write!(f, "{e}"),
            GridError::Shoot(e) => write!(f, "{e}"),
            GridError::Eigen(e) => write!(f, "{e}"),
            GridError::BadBuild(why) => write!(f, "bad mask parameters: {why}"),
            GridError::Disconnected => write!(f, "mask is not connected"),
            GridError::TooSmall { cells } => write!(f, "mask has only {cells} cells"),
            GridError::SizeMismatch { expect, got } => {
                write!(f, "field length {got} does not match {expect} cells")
            }
            GridError::MonotonicityViolation { step, cell } => {
                write!(f, "monotonicity violated at step {step}, cell {cell}")
            }
            GridError::RangeViolation { step, cell } => {
                write!(f, "value left [0,1] at step {step}, cell {cell}")
            }
            GridError::SeedRejected => write!(f, "no subsolution seed found after 40 halvings"),
        }
    }
}

impl core::error::Error for GridError {}

impl From<ReactionError> for GridError {
    fn from(e: ReactionError) -> Self {
        GridError::Reaction(e)
    }
}

impl From<ShootError> for GridError {
    fn from(e: ShootError) -> Self {
        GridError::Shoot(e)
    }
}

impl From<SpectraError> for GridError {
    fn from(e: SpectraError) -> Self {
        GridError::Eigen(Box::new(e))
    }
}

impl Mask2D {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn builder(&self) -> &BuilderTag {
        &self.builder
    }

    /// Neighbor table; index `n_cells()` is the zero (Dirichlet) slot and a
    /// cell listed as its own neighbor marks a mirror face.
    pub fn neighbors(&self) -> &[[u32; 4]] {
        &self.nb
    }

    pub fn cell_index(&self, i: usize) -> (u32, u32) {
        self.cells[i]
    }

    pub fn cell_center(&self, i: usize) -> (f64, f64) {
        let (ix, iy) = self.cells[i];
        (
            self.origin.0 + (ix as f64 + 1.0) * self.h,
            self.origin.1 + (iy as f64 + 1.0) * self.h,
        )
    }

    pub fn is_inside(&self, ix: i64, iy: i64) -> bool {
        if ix < 0 || iy < 0 || ix >= self.nx as i64 || iy >= self.ny as i64 {
            return false;
        }
        self.inside[ix as usize + self.nx * iy as usize]
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    /// Compressed index of the node at stored position `(ix, iy)`, if inside.
    pub fn cell_at(&self, ix: i64, iy: i64) -> Option<usize> {
        if ix < 0 || iy < 0 || ix >= self.nx as i64 || iy >= self.ny as i64 {
            return None;
        }
        let idx = self.full_to_cell[ix as usize + self.nx * iy as usize];
        if idx == u32::MAX {
            None
        } else {
            Some(idx as usize)
        }
    }

    /// Build from an explicit inside array (no connectivity or size check);
    /// the shaped builders below are the validated entry points.
    pub fn from_inside(
        nx: usize,
        ny: usize,
        h: f64,
        origin: (f64, f64),
        inside: Vec<bool>,
        builder: BuilderTag,
    ) -> Result<Mask2D, GridError> {
        if inside.len() != nx * ny {
            return Err(GridError::BadBuild("inside array does not match nx*ny"));
        }
        if !(h > 0.0) {
            return Err(GridError::BadBuild("h must be positive"));
        }
        let mut cells = Vec::new();
        let mut full_to_cell = vec![u32::MAX; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                if inside[ix + nx * iy] {
                    full_to_cell[ix + nx * iy] = cells.len() as u32;
                    cells.push((ix as u32, iy as u32));
                }
            }
        }
        if cells.is_empty() {
            return Err(GridError::TooSmall { cells: 0 });
        }
        let zero = cells.len() as u32;
        let mut nb = vec![[zero; 4]; cells.len()];
        for (i, &(ix, iy)) in cells.iter().enumerate() {
            let (ix, iy) = (ix as i64, iy as i64);
            for (f, (dx, dy)) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)].iter().enumerate() {
                let (jx, jy) = (ix + dx, iy + dy);
                if jx >= 0 && jy >= 0 && (jx as usize) < nx && (jy as usize) < ny {
                    let idx = full_to_cell[jx as usize + nx * jy as usize];
                    if idx != u32::MAX {
                        nb[i][f] = idx;
                    }
                }
            }
        }
        Ok(Mask2D {
            nx,
            ny,
            h,
            origin,
            inside,
            builder,
            cells,
            full_to_cell,
            nb,
        })
    }

    fn apply_outer_mirror(&mut self, mid_radius_sq: f64) {
        let zero = self.cells.len() as u32;
        for i in 0..self.cells.len() {
            let (x, y) = self.cell_center(i);
            if x * x + y * y > mid_radius_sq {
                for f in 0..4 {
                    if self.nb[i][f] == zero {
                        self.nb[i][f] = i as u32;
                    }
                }
            }
        }
    }

    fn check_connected(&self) -> Result<(), GridError> {
        let n = self.cells.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        queue.push_back(0usize);
        seen[0] = true;
        let mut count = 1usize;
        while let Some(i) = queue.pop_front() {
            for f in 0..4 {
                let j = self.nb[i][f] as usize;
                if j < n && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        if count == n {
            Ok(())
        } else {
            Err(GridError::Disconnected)
        }
    }
}

/// Construct, validate connectivity, and require at least 100 cells.
///
/// Interior node counts follow `round(len/h) - 1` per side, so a unit
/// square at `h = 1/64` yields a 63x63 mask.
pub fn build_mask(tag: &BuilderTag, h: f64) -> Result<Mask2D, GridError> {
    if !(h > 0.0) {
        return Err(GridError::BadBuild("h must be positive"));
    }
    let spans = |len: f64| -> usize { libm::round(len / h).max(0.0) as usize };
    let nodes_of = |len: f64| -> Result<usize, GridError> {
        let n = spans(len);
        if n < 2 {
            Err(GridError::BadBuild("side too short for this spacing"))
        } else {
            Ok(n - 1)
        }
    };
    let mut mask = match tag {
        BuilderTag::Rectangle { width, height } => {
            if !(*width > 0.0 && *height > 0.0) {
                return Err(GridError::BadBuild("rectangle sides must be positive"));
            }
            let (nx, ny) = (nodes_of(*width)?, nodes_of(*height)?);
            Mask2D::from_inside(nx, ny, h, (0.0, 0.0), vec![true; nx * ny], tag.clone())?
        }
        BuilderTag::Interval { length } => {
            if !(*length > 0.0) {
                return Err(GridError::BadBuild("interval length must be positive"));
            }
            let nx = nodes_of(*length)?;
            let mut m =
                Mask2D::from_inside(nx, 1, h, (0.0, -h), vec![true; nx], tag.clone())?;
            // one-dimensional problem: no flux through the dummy y faces
            for i in 0..m.nb.len() {
                m.nb[i][2] = i as u32;
                m.nb[i][3] = i as u32;
            }
            m
        }
        BuilderTag::Strip { length, half_width } => {
            if !(*length > 0.0 && *half_width > 0.0) {
                return Err(GridError::BadBuild("strip dimensions must be positive"));
            }
            let (nx, ny) = (nodes_of(*length)?, nodes_of(2.0 * half_width)?);
            Mask2D::from_inside(
                nx,
                ny,
                h,
                (0.0, -half_width),
                vec![true; nx * ny],
                tag.clone(),
            )?
        }
        BuilderTag::Disk { radius } => {
            if !(*radius > 0.0) {
                return Err(GridError::BadBuild("disk radius must be positive"));
            }
            let half = libm::ceil(radius / h) as usize;
            let n = 2 * half + 1;
            let origin = (-(half as f64 + 1.0) * h, -(half as f64 + 1.0) * h);
            let mut inside = vec![false; n * n];
            for iy in 0..n {
                for ix in 0..n {
                    let x = (ix as f64 - half as f64) * h;
                    let y = (iy as f64 - half as f64) * h;
                    inside[ix + n * iy] = x * x + y * y < radius * radius;
                }
            }
            Mask2D::from_inside(n, n, h, origin, inside, tag.clone())?
        }
        BuilderTag::Annulus { r0, r1, outer_mirror } => {
            if !(*r0 > 0.0 && r1 > r0) {
                return Err(GridError::BadBuild("annulus needs 0 < r0 < r1"));
            }
            let half = libm::ceil(r1 / h) as usize;
            let n = 2 * half + 1;
            let origin = (-(half as f64 + 1.0) * h, -(half as f64 + 1.0) * h);
            let mut inside = vec![false; n * n];
            for iy in 0..n {
                for ix in 0..n {
                    let x = (ix as f64 - half as f64) * h;
                    let y = (iy as f64 - half as f64) * h;
                    let r2 = x * x + y * y;
                    inside[ix + n * iy] = r2 > r0 * r0 && r2 < r1 * r1;
                }
            }
            let mut m = Mask2D::from_inside(n, n, h, origin, inside, tag.clone())?;
            if *outer_mirror {
                let mid = 0.5 * (r0 + r1);
                m.apply_outer_mirror(mid * mid);
            }
            m
        }
        BuilderTag::Pocket {
            base,
            bridge_half_length,
            bridge_half_width,
            pocket,
        } => {
            if !(*base > 0.0 && *pocket > 0.0 && *bridge_half_length > 0.0 && *bridge_half_width > 0.0)
            {
                return Err(GridError::BadBuild("pocket dimensions must be positive"));
            }
            if pocket > base {
                return Err(GridError::BadBuild("pocket must not exceed the base side"));
            }
            let nb = spans(*base);
            let nbr = spans(2.0 * bridge_half_length).max(1);
            let npk = spans(*pocket);
            if nb < 2 || npk < 2 {
                return Err(GridError::BadBuild("side too short for this spacing"));
            }
            let wcells = libm::round(2.0 * bridge_half_width / h).max(1.0) as usize;
            let (nx, ny) = (nb + nbr + npk - 1, nb - 1);
            let mid_y = 0.5 * base;
            let j_center = libm::round(mid_y / h) as i64;
            let j_start = j_center - wcells as i64 / 2;
            let mut inside = vec![false; nx * ny];
            for iy in 0..ny {
                let j = iy as i64 + 1;
                let y = j as f64 * h;
                let in_bridge_rows = j >= j_start && j < j_start + wcells as i64;
                for ix in 0..nx {
                    let i = ix + 1;
                    // bridge band carries a one-node collar into both rooms
                    let in_bridge = in_bridge_rows && i >= nb - 1 && i <= nb + nbr + 1;
                    let v = if i < nb {
                        true
                    } else if i > nb + nbr {
                        (y - mid_y).abs() < 0.5 * pocket
                    } else {
                        false
                    };
                    inside[ix + nx * iy] = v || in_bridge;
                }
            }
            Mask2D::from_inside(nx, ny, h, (0.0, 0.0), inside, tag.clone())?
        }
        BuilderTag::Wedge { slope, truncation } => {
            if !(*slope > 0.0 && *truncation > 0.0) {
                return Err(GridError::BadBuild("wedge parameters must be positive"));
            }
            let top = slope * truncation + 1.0;
            let nx = nodes_of(2.0 * truncation)?;
            let ny = nodes_of(top)?;
            let origin = (-truncation, 0.0);
            let mut inside = vec![false; nx * ny];
            for iy in 0..ny {
                let y = (iy as f64 + 1.0) * h;
                for ix in 0..nx {
                    let x = origin.0 + (ix as f64 + 1.0) * h;
                    inside[ix + nx * iy] = x.abs() < *truncation && y > slope * x.abs() && y < top;
                }
            }
            Mask2D::from_inside(nx, ny, h, origin, inside, tag.clone())?
        }
        BuilderTag::Wells {
            base_length,
            base_height,
            widths,
            depths,
        } => {
            if widths.is_empty() || widths.len() != depths.len() {
                return Err(GridError::BadBuild("widths and depths must match and be nonempty"));
            }
            if !(*base_length > 0.0 && *base_height > 0.0)
                || widths.iter().any(|w| !(*w > 0.0))
                || depths.iter().any(|d| !(*d > 0.0))
            {
                return Err(GridError::BadBuild("well dimensions must be positive"));
            }
            let max_depth = depths.iter().cloned().fold(0.0, f64::max);
            let nd = spans(max_depth);
            let nx = nodes_of(*base_length)?;
            let ny = nd + spans(*base_height) - 1;
            let origin = (0.0, -(nd as f64 + 1.0) * h);
            let mut inside = vec![false; nx * ny];
            let k = widths.len();
            for iy in 0..ny {
                let y = (iy as f64 + 1.0 - nd as f64) * h;
                for ix in 0..nx {
                    let x = (ix as f64 + 1.0) * h;
                    let v = if y > 0.0 {
                        true
                    } else {
                        (0..k).any(|i| {
                            let xc = base_length * (i as f64 + 1.0) / (k as f64 + 1.0);
                            (x - xc).abs() < 0.5 * widths[i] && y > -depths[i]
                        })
                    };
                    inside[ix + nx * iy] = v;
                }
            }
            Mask2D::from_inside(nx, ny, h, origin, inside, tag.clone())?
        }
    };
    mask.check_connected()?;
    if mask.n_cells() < 100 {
        return Err(GridError::TooSmall {
            cells: mask.n_cells(),
        });
    }
    mask.inside.shrink_to_fit();
    Ok(mask)
}

/// Distance from each interior node to the nearest wall node, brute force.
/// Wall nodes are the absorbing lattice nodes just outside the mask, so on a
/// rectangle this reproduces the exact wall distance.
pub fn distance_to_boundary(mask: &Mask2D) -> Vec<f64> {
    let n = mask.n_cells();
    let zero = n as u32;
    let h = mask.h;
    let faces = [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)];
    let mut boundary = Vec::new();
    for i in 0..n {
        let (x, y) = mask.cell_center(i);
        for (f, (dx, dy)) in faces.iter().enumerate() {
            if mask.nb[i][f] == zero {
                boundary.push((x + dx, y + dy));
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (x, y) = mask.cell_center(i);
        let mut best = f64::INFINITY;
        for &(bx, by) in &boundary {
            let d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
            if d2 < best {
                best = d2;
            }
        }
        out.push(sqrt(best));
    }
    out
}

/// Half-line profile composed with the boundary distance:
/// `Φ(x) = φ(dist(x, ∂Ω))`, the universal upper envelope for dilations.
pub fn phi_kappa(mask: &Mask2D, r: &Reaction) -> Result<Vec<f64>, GridError> {
    let dist = distance_to_boundary(mask);
    let reach = dist.iter().cloned().fold(0.0, f64::max);
    let m = r.slope_at_zero()?;
    let samples = shoot1d::halfline_profile(r, reach + 1.0 / sqrt(m))?;
    Ok(dist
        .iter()
        .map(|&d| shoot1d::profile_value(&samples, d))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone)]
pub struct RelaxOptions {
    /// Stop when `‖u_{n+1} − u_n‖∞ / dt` falls below this.
    pub tol: f64,
    pub max_steps: u64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        RelaxOptions {
            tol: 1e-9,
            max_steps: 80_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxOutcome {
    pub values: Vec<f64>,
    pub steps: u64,
    /// `‖u_{n+1} − u_n‖∞ / dt` at the final step.
    pub residual_sup: f64,
    pub converged: bool,
}

const DRIFT_TOL: f64 = 1e-12;

/// Explicit parabolic relaxation `u ← u + dt (Δ_h u + f(u))`, `dt = h²/5`,
/// enforcing one-sided movement. Initial data ordered against the steady
/// state relax onto it monotonically; any step against `dir` aborts.
pub fn relax(
    mask: &Mask2D,
    r: &Reaction,
    u0: &[f64],
    dir: Direction,
    opts: &RelaxOptions,
) -> Result<RelaxOutcome, GridError> {
    let n = mask.n_cells();
    if u0.len() != n {
        return Err(GridError::SizeMismatch {
            expect: n,
            got: u0.len(),
        });
    }
    let q = r.quartic()?;
    let h = mask.h;
    let dt = h * h / 5.0;
    let inv_h2 = 1.0 / (h * h);
    let mut u = vec![0.0; n + 1];
    u[..n].copy_from_slice(u0);
    let mut next = vec![0.0; n + 1];
    let nb = &mask.nb;
    let mut steps = 0u64;
    loop {
        let mut maxdiff: f64 = 0.0;
        for i in 0..n {
            let [e, w, nn, s] = nb[i];
            let sum = u[e as usize] + u[w as usize] + u[nn as usize] + u[s as usize];
            let ui = u[i];
            let v = ui + dt * ((sum - 4.0 * ui) * inv_h2 + q.f(ui));
            let d = v - ui;
            match dir {
                Direction::Up => {
                    if d < -DRIFT_TOL {
                        return Err(GridError::MonotonicityViolation { step: steps, cell: i });
                    }
                }
                Direction::Down => {
                    if d > DRIFT_TOL {
                        return Err(GridError::MonotonicityViolation { step: steps, cell: i });
                    }
                }
            }
            if !(-DRIFT_TOL..=1.0 + DRIFT_TOL).contains(&v) {
                return Err(GridError::RangeViolation { step: steps, cell: i });
            }
            maxdiff = maxdiff.max(d.abs());
            next[i] = v;
        }
        core::mem::swap(&mut u, &mut next);
        steps += 1;
        if maxdiff < opts.tol * dt {
            u.truncate(n);
            return Ok(RelaxOutcome {
                values: u,
                steps,
                residual_sup: maxdiff / dt,
                converged: true,
            });
        }
        if steps >= opts.max_steps {
            u.truncate(n);
            return Ok(RelaxOutcome {
                values: u,
                steps,
                residual_sup: maxdiff / dt,
                converged: false,
            });
        }
    }
}

/// Discrete elliptic residual `‖Δ_h u + f(u)‖∞`, for reporting.
pub fn steady_residual(mask: &Mask2D, r: &Reaction, u: &[f64]) -> Result<f64, GridError> {
    let n = mask.n_cells();
    if u.len() != n {
        return Err(GridError::SizeMismatch { expect: n, got: u.len() });
    }
    let q = r.quartic()?;
    let inv_h2 = 1.0 / (mask.h * mask.h);
    let mut padded = vec![0.0; n + 1];
    padded[..n].copy_from_slice(u);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let [e, w, nn, s] = mask.nb[i];
        let sum = padded[e as usize] + padded[w as usize] + padded[nn as usize] + padded[s as usize];
        let res = (sum - 4.0 * padded[i]) * inv_h2 + q.f(padded[i]);
        worst = worst.max(res.abs());
    }
    Ok(worst)
}

/// Minimal and maximal steady states between the trivial state and 1.
#[derive(Debug, Clone)]
pub struct MinMax {
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    /// `sup |u_max − u_min|`
    pub gap: f64,
    /// Principal Dirichlet eigenvalue of `−Δ_h` on the mask.
    pub lambda_laplace: f64,
    /// Seed amplitude that passed the subsolution test.
    pub seed_scale: f64,
    pub steps: u64,
}

/// Relax down from 1 for the maximal state and up from a small multiple of
/// the principal eigenfunction for the minimal one.
///
/// When `λ1(−Δ_h) ≥ f'(0)` the trivial state is the only one and both
/// extremes are zero.
pub fn min_max_solutions(
    mask: &Mask2D,
    r: &Reaction,
    opts: &RelaxOptions,
) -> Result<MinMax, GridError> {
    let n = mask.n_cells();
    let q = r.quartic()?;
    let spec = crate::spectra::eigen2d(mask, &vec![0.0; n], 1, &Default::default())?;
    let lambda_laplace = spec.lambda1;
    if lambda_laplace >= q.c[1] {
        return Ok(MinMax {
            u_min: vec![0.0; n],
            u_max: vec![0.0; n],
            gap: 0.0,
            lambda_laplace,
            seed_scale: 0.0,
            steps: 0,
        });
    }
    let down = relax(mask, r, &vec![1.0; n], Direction::Down, opts)?;
    let inv_h2 = 1.0 / (mask.h * mask.h);
    let mut eps = 0.5;
    let mut seed_ok = false;
    let mut padded = vec![0.0; n + 1];
    for _ in 0..40 {
        for i in 0..n {
            padded[i] = eps * spec.vec1[i];
        }
        let mut ok = true;
        for i in 0..n {
            let [e, w, nn, s] = mask.nb[i];
            let sum =
                padded[e as usize] + padded[w as usize] + padded[nn as usize] + padded[s as usize];
            let lap = (sum - 4.0 * padded[i]) * inv_h2;
            if lap + q.f(padded[i]) < 0.0 {
                ok = false;
                break;
            }
        }
        if ok {
            seed_ok = true;
            break;
        }
        eps *= 0.5;
    }
    if !seed_ok {
        return Err(GridError::SeedRejected);
    }
    let seed: Vec<f64> = spec.vec1.iter().map(|&v| eps * v).collect();
    let up = relax(mask, r, &seed, Direction::Up, opts)?;
    let gap = down
        .values
        .iter()
        .zip(&up.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(MinMax {
        u_min: up.values,
        u_max: down.values,
        gap,
        lambda_laplace,
        seed_scale: eps,
        steps: down.steps + up.steps,
    })
}

/// One row of the dilation study at a fixed spacing `h`.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub kappa: f64,
    pub gap: f64,
    pub sup_u_min: f64,
    pub sup_u_max: f64,
    /// `sup |u_min − Φ_κ|`, `sup |u_max − Φ_κ|`
    pub dist_phi_min: f64,
    pub dist_phi_max: f64,
    /// Principal eigenvalue of `−Δ_h − f'(Φ_κ)`.
    pub lambda_phi: f64,
}

/// Extremal states across a family of dilated masks, compared against the
/// distance-profile envelope `Φ_κ`.
pub fn dilation_branch(
    base: &BuilderTag,
    kappas: &[f64],
    h: f64,
    r: &Reaction,
    opts: &RelaxOptions,
) -> Result<Vec<BranchPoint>, GridError> {
    let mut out = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        if !(kappa > 0.0) {
            return Err(GridError::BadBuild("kappa must be positive"));
        }
        let mask = build_mask(&base.dilate(kappa), h)?;
        let mm = min_max_solutions(&mask, r, opts)?;
        let phi = phi_kappa(&mask, r)?;
        let q = r.quartic()?;
        let qvals: Vec<f64> = phi.iter().map(|&p| q.df(p)).collect();
        let spec = crate::spectra::eigen2d(&mask, &qvals, 1, &Default::default())?;
        let sup = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
        let dist = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        out.push(BranchPoint {
            kappa,
            gap: mm.gap,
            sup_u_min: sup(&mm.u_min),
            sup_u_max: sup(&mm.u_max),
            dist_phi_min: dist(&mm.u_min, &phi),
            dist_phi_max: dist(&mm.u_max, &phi),
            lambda_phi: spec.lambda1,
        });
    }
    Ok(out)
}

/// Sampled comparison-principle probe on the deep region `{dist > depth}`:
/// constants below the rim value of `u` must stay below `u` inside.
#[derive(Debug, Clone)]
pub struct DeepMpReport {
    pub trials: usize,
    pub violations: usize,
    pub depth: f64,
    pub rim_min: f64,
    pub interior_min: f64,
}

pub fn deep_mp_check(
    mask: &Mask2D,
    u: &[f64],
    depth: f64,
    trials: usize,
    seed: u64,
) -> Result<DeepMpReport, GridError> {
    let n = mask.n_cells();
    if u.len() != n {
        return Err(GridError::SizeMismatch { expect: n, got: u.len() });
    }
    let dist = distance_to_boundary(mask);
    let deep: Vec<usize> = (0..n).filter(|&i| dist[i] > depth).collect();
    if deep.is_empty() {
        return Err(GridError::BadBuild("depth leaves no interior cells"));
    }
    // rim = deep cells with a neighbor outside the deep region
    let deep_flag: Vec<bool> = {
        let mut f = vec![false; n + 1];
        for &i in &deep {
            f[i] = true;
        }
        f
    };
    let mut rim_min = f64::INFINITY;
    for &i in &deep {
        let on_rim = mask.nb[i].iter().any(|&j| !deep_flag[j as usize]);
        if on_rim {
            rim_min = rim_min.min(u[i]);
        }
    }
    let interior_min = deep.iter().map(|&i| u[i]).fold(f64::INFINITY, f64::min);
    let mut rng = crate::rng::seeded(seed);
    let mut violations = 0;
    for _ in 0..trials {
        let c = rim_min * (0.5 + 0.5 * crate::rng::next_unit(&mut rng));
        if interior_min < c {
            violations += 1;
        }
    }
    Ok(DeepMpReport {
        trials,
        violations,
        depth,
        rim_min,
        interior_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic(m: f64) -> Reaction {
        Reaction::Logistic { m }
    }

    #[test]
    fn rectangle_mask_counts() {
        let m = build_mask(
            &BuilderTag::Rectangle { width: 1.0, height: 1.0 },
            1.0 / 16.0,
        )
        .unwrap();
        assert_eq!(m.n_cells(), 225);
        assert_eq!((m.nx(), m.ny()), (15, 15));
        let (x, y) = m.cell_center(0);
        assert!((x - 0.0625).abs() < 1e-15 && (y - 0.0625).abs() < 1e-15);
        let fine = build_mask(
            &BuilderTag::Rectangle { width: 1.0, height: 1.0 },
            1.0 / 64.0,
        )
        .unwrap();
        assert_eq!((fine.nx(), fine.ny()), (63, 63));
    }

    #[test]
    fn too_small_and_disconnected_are_rejected() {
        assert!(matches!(
            build_mask(&BuilderTag::Rectangle { width: 1.0, height: 1.0 }, 0.2),
            Err(GridError::TooSmall { .. })
        ));
        let mut inside = vec![true; 20 * 20];
        for iy in 0..20 {
            inside[10 + 20 * iy] = false;
        }
        let m = Mask2D::from_inside(
            20,
            20,
            0.05,
            (0.0, 0.0),
            inside,
            BuilderTag::Rectangle { width: 1.0, height: 1.0 },
        )
        .unwrap();
        assert!(matches!(m.check_connected(), Err(GridError::Disconnected)));
    }

    #[test]
    fn pocket_mask_is_connected_with_thin_bridge() {
        let tag = BuilderTag::Pocket {
            base: 3.0,
            bridge_half_length: 0.25,
            bridge_half_width: 0.05,
            pocket: 1.8,
        };
        let m = build_mask(&tag, 1.0 / 48.0).unwrap();
        assert!(m.n_cells() > 100);
        // bridge is thin: a column midway along it holds exactly round(2δ/h) nodes
        let nb_cols = (3.0f64 * 48.0).round() as i64;
        let col_count = (0..m.ny() as i64)
            .filter(|&iy| m.is_inside(nb_cols + 2, iy))
            .count();
        assert_eq!(col_count, 5, "bridge width in nodes");

        let wide = BuilderTag::Pocket {
            base: 3.0,
            bridge_half_length: 1.0,
            bridge_half_width: 0.05,
            pocket: 1.0,
        };
        let m = build_mask(&wide, 0.0125).unwrap();
        let nb_cols = (3.0f64 / 0.0125).round() as i64;
        let col_count = (0..m.ny() as i64)
            .filter(|&iy| m.is_inside(nb_cols + 10, iy))
            .count();
        assert_eq!(col_count, 8, "bridge width in nodes");
    }

    #[test]
    fn annulus_mirror_marks_outer_faces() {
        let tag = BuilderTag::Annulus { r0: 1.0, r1: 3.0, outer_mirror: true };
        let m = build_mask(&tag, 1.0 / 8.0).unwrap();
        let zero = m.n_cells() as u32;
        let mut mirror_faces = 0;
        let mut dirichlet_faces = 0;
        for i in 0..m.n_cells() {
            let (x, y) = m.cell_center(i);
            let r = (x * x + y * y).sqrt();
            for f in 0..4 {
                if m.neighbors()[i][f] == i as u32 {
                    mirror_faces += 1;
                    assert!(r > 2.0, "mirror face at inner rim, r={r}");
                }
                if m.neighbors()[i][f] == zero {
                    dirichlet_faces += 1;
                    assert!(r < 2.0, "absorbing face at outer rim, r={r}");
                }
            }
        }
        assert!(mirror_faces > 0 && dirichlet_faces > 0);
    }

    #[test]
    fn distance_field_matches_rectangle_formula() {
        let m = build_mask(
            &BuilderTag::Rectangle { width: 2.0, height: 1.0 },
            1.0 / 32.0,
        )
        .unwrap();
        let d = distance_to_boundary(&m);
        for i in 0..m.n_cells() {
            let (x, y) = m.cell_center(i);
            let exact = x.min(2.0 - x).min(y).min(1.0 - y);
            assert!((d[i] - exact).abs() <= 1e-12, "cell {i}: {} vs {exact}", d[i]);
        }
    }

    #[test]
    fn relax_down_reaches_steady_state() {
        let m = build_mask(
            &BuilderTag::Rectangle { width: 1.0, height: 1.0 },
            1.0 / 24.0,
        )
        .unwrap();
        let r = logistic(25.0);
        let out = relax(&m, &r, &vec![1.0; m.n_cells()], Direction::Down, &Default::default())
            .unwrap();
        assert!(out.converged);
        assert!(out.residual_sup <= 1e-7);
        let res = steady_residual(&m, &r, &out.values).unwrap();
        assert!(res <= 1e-6, "elliptic residual {res:.2e}");
        assert!(out.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn relax_rejects_wrong_direction() {
        let m = build_mask(
            &BuilderTag::Rectangle { width: 1.0, height: 1.0 },
            1.0 / 16.0,
        )
        .unwrap();
        let r = logistic(25.0);
        // starting from 1 and asking for upward movement must fail fast
        let got = relax(&m, &r, &vec![1.0; m.n_cells()], Direction::Up, &Default::default());
        assert!(matches!(got, Err(GridError::MonotonicityViolation { .. })));
    }

    #[test]
    fn ordered_initial_data_stay_ordered() {
        let m = build_mask(
            &BuilderTag::Rectangle { width: 1.0, height: 1.0 },
            1.0 / 16.0,
        )
        .unwrap();
        let n = m.n_cells();
        let r = logistic(25.0);
        let q = r.quartic().unwrap();
        let dt = m.h() * m.h() / 5.0;
        let inv_h2 = 1.0 / (m.h() * m.h());
        let mut rng = crate::rng::seeded(42);
        for _ in 0..10 {
            let mut lo = vec![0.0; n + 1];
            let mut hi = vec![0.0; n + 1];
            for i in 0..n {
                let a = 0.5 * crate::rng::next_unit(&mut rng);
                let b = a + 0.4 * crate::rng::next_unit(&mut rng);
                lo[i] = a;
                hi[i] = b.min(1.0);
            }
            for _ in 0..500 {
                let step = |u: &[f64], i: usize| -> f64 {
                    let [e, w, nn, s] = m.neighbors()[i];
                    let sum = u[e as usize] + u[w as usize] + u[nn as usize] + u[s as usize];
                    u[i] + dt * ((sum - 4.0 * u[i]) * inv_h2 + q.f(u[i]))
                };
                let lo2: Vec<f64> = (0..n).map(|i| step(&lo, i)).collect();
                let hi2: Vec<f64> = (0..n).map(|i| step(&hi, i)).collect();
                lo[..n].copy_from_slice(&lo2);
                hi[..n].copy_from_slice(&hi2);
                for i in 0..n {
                    assert!(lo[i] <= hi[i] + 1e-13);
                }
            }
        }
    }

    #[test]
    fn small_domain_has_only_trivial_state() {
        let m = build_mask(
            &BuilderTag::Rectangle { width: 1.0, height: 1.0 },
            1.0 / 24.0,
        )
        .unwrap();
        // lambda1(-Δ) ≈ 2π² ≈ 19.7 > 10
        let mm = min_max_solutions(&m, &logistic(10.0), &Default::default()).unwrap();
        assert_eq!(mm.gap, 0.0);
        assert!(mm.u_max.iter().all(|&v| v == 0.0));
        assert!(mm.lambda_laplace > 10.0);
    }

    #[test]
    fn supercritical_square_has_unique_positive_state() {
        let m = build_mask(
            &BuilderTag::Rectangle { width: 1.0, height: 1.0 },
            1.0 / 24.0,
        )
        .unwrap();
        let mm = min_max_solutions(&m, &logistic(25.0), &Default::default()).unwrap();
        assert!(mm.lambda_laplace < 25.0);
        assert!(mm.gap <= 1e-6, "strong-KPP gap {}", mm.gap);
        assert!(mm.u_max.iter().cloned().fold(0.0, f64::max) > 0.1);
        for (a, b) in mm.u_min.iter().zip(&mm.u_max) {
            assert!(a <= &(b + 1e-12));
        }
    }

    #[test]
    fn dilate_tag_scales_lengths() {
        let t = BuilderTag::Pocket {
            base: 3.0,
            bridge_half_length: 0.25,
            bridge_half_width: 0.05,
            pocket: 1.8,
        };
        match t.dilate(2.0) {
            BuilderTag::Pocket { base, pocket, .. } => {
                assert_eq!(base, 6.0);
                assert_eq!(pocket, 3.6);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn interval_branch_detects_fold() {
        let r = Reaction::DoubleHump {
            m: 4.0 * core::f64::consts::PI * core::f64::consts::PI,
            theta: 0.35,
            eps: 1e-2,
        };
        let base = BuilderTag::Interval { length: 1.0 };
        let pts = dilation_branch(&base, &[1.0, 2.0], 1.0 / 128.0, &r, &Default::default())
            .unwrap();
        assert!(pts[0].gap > 0.2, "gap at kappa=1: {}", pts[0].gap);
        assert!(pts[1].gap <= 1e-4, "gap at kappa=2: {}", pts[1].gap);
        assert!(pts[1].dist_phi_max < pts[0].dist_phi_max);
        assert!(pts[0].sup_u_min < 0.5 && pts[1].sup_u_min > 0.5);
    }

    #[test]
    fn deep_mp_probe_has_no_violation_on_steady_state() {
        let m = build_mask(
            &BuilderTag::Rectangle { width: 2.0, height: 2.0 },
            1.0 / 24.0,
        )
        .unwrap();
        let r = logistic(25.0);
        let out = relax(&m, &r, &vec![1.0; m.n_cells()], Direction::Down, &Default::default())
            .unwrap();
        let rep = deep_mp_check(&m, &out.values, 0.4, 50, 7).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.interior_min >= rep.rim_min);
    }
}
