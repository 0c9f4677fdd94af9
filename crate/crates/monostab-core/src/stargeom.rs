//! Star-shaped planar domains: kernels of simple polygons and the
//! separation between a polygon boundary and its dilation, the two
//! geometric quantities behind the sliding argument on dilated domains.

use alloc::vec::Vec;
use core::fmt;
use libm::sqrt;

#[derive(Debug, PartialEq)]
pub enum StarError {
    BadPolygon(&'static str),
    /// The polygon is not star-shaped about the origin.
    NotStarShaped,
    BadInput(&'static str),
}

impl fmt::Display for StarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarError::BadPolygon(why) => write!(f, "bad polygon: {why}"),
            StarError::NotStarShaped => write!(f, "polygon is not star-shaped about the origin"),
            StarError::BadInput(why) => write!(f, "bad input: {why}"),
        }
    }
}

/// Simple polygon with positively oriented (counter-clockwise) boundary.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Strict interior crossing of segments `ab` and `cd`.
fn proper_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    (d1 > 0.0) != (d2 > 0.0) && d1 != 0.0 && d2 != 0.0 && (d3 > 0.0) != (d4 > 0.0) && d3 != 0.0 && d4 != 0.0
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Squared distance from point `p` to segment `ab`.
fn point_segment_dist2(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let abx = b.0 - a.0;
    let aby = b.1 - a.1;
    let len2 = abx * abx + aby * aby;
    if len2 == 0.0 {
        return dist2(p, a);
    }
    let t = (((p.0 - a.0) * abx + (p.1 - a.1) * aby) / len2).clamp(0.0, 1.0);
    dist2(p, (a.0 + t * abx, a.1 + t * aby))
}

impl Polygon {
    /// Validates: at least three vertices, finite coordinates, positive
    /// signed area (counter-clockwise), and no self-intersections.
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Polygon, StarError> {
        if vertices.len() < 3 {
            return Err(StarError::BadPolygon("need at least three vertices"));
        }
        if vertices.iter().any(|v| !v.0.is_finite() || !v.1.is_finite()) {
            return Err(StarError::BadPolygon("vertices must be finite"));
        }
        let p = Polygon { vertices };
        if p.area() <= 0.0 {
            return Err(StarError::BadPolygon(
                "vertices must wind counter-clockwise around positive area",
            ));
        }
        let n = p.vertices.len();
        for i in 0..n {
            let (a, b) = p.edge(i);
            if dist2(a, b) == 0.0 {
                return Err(StarError::BadPolygon("repeated consecutive vertices"));
            }
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (c, d) = p.edge(j);
                if proper_cross(a, b, c, d) {
                    return Err(StarError::BadPolygon("edges intersect"));
                }
            }
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    fn edge(&self, i: usize) -> ((f64, f64), (f64, f64)) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (a, b) = self.edge(i);
            acc += a.0 * b.1 - b.0 * a.1;
        }
        0.5 * acc
    }

    pub fn bounding_box(&self) -> ((f64, f64), (f64, f64)) {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &self.vertices {
            lo.0 = lo.0.min(x);
            lo.1 = lo.1.min(y);
            hi.0 = hi.0.max(x);
            hi.1 = hi.1.max(y);
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        sqrt(dist2(lo, hi))
    }

    /// Closed-polygon membership: boundary points count as inside.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        let scale = self.diameter();
        let tol2 = (1e-12 * scale) * (1e-12 * scale);
        let n = self.vertices.len();
        for i in 0..n {
            let (a, b) = self.edge(i);
            if point_segment_dist2(p, a, b) <= tol2 {
                return true;
            }
        }
        let mut inside = false;
        for i in 0..n {
            let (a, b) = self.edge(i);
            if (a.1 > p.1) != (b.1 > p.1) {
                let x_int = a.0 + (p.1 - a.1) * (b.0 - a.0) / (b.1 - a.1);
                if p.0 < x_int {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn scaled(&self, c: f64) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&(x, y)| (c * x, c * y)).collect(),
        }
    }
}

const CENTER_SAMPLES_PER_EDGE: usize = 256;
const SEPARATION_SAMPLES_PER_EDGE: usize = 512;

fn boundary_samples(p: &Polygon, per_edge: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(per_edge * p.vertices.len());
    for i in 0..p.vertices.len() {
        let (a, b) = p.edge(i);
        for k in 0..per_edge {
            let t = (k as f64 + 0.5) / per_edge as f64;
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
    }
    out
}

/// Whether every boundary point is visible from `x` within the closed
/// polygon. Sight segments are cast to a fixed number of samples per edge;
/// each one is tested exactly against every edge for a strict crossing.
pub fn is_star_center(p: &Polygon, x: (f64, f64)) -> bool {
    if !p.contains(x) {
        return false;
    }
    let n = p.vertices.len();
    for i in 0..n {
        let (a, b) = p.edge(i);
        for k in 0..CENTER_SAMPLES_PER_EDGE {
            let t = (k as f64 + 0.5) / CENTER_SAMPLES_PER_EDGE as f64;
            let s = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
            for j in 0..n {
                // the segment ends on edge i, so it cannot cross it again;
                // skipping it avoids a rounding-sign straddle at s itself
                if j == i {
                    continue;
                }
                let (c, d) = p.edge(j);
                if proper_cross(x, s, c, d) {
                    return false;
                }
            }
        }
    }
    true
}

/// Sampled kernel of a polygon.
#[derive(Debug, Clone)]
pub struct StarCenterSet {
    /// Grid points of the bounding box that see the whole boundary.
    pub points: Vec<(f64, f64)>,
    /// Kernel area estimate: cell area times the number of hits.
    pub area_estimate: f64,
    /// True when the sampled kernel contains a disk of radius two grid
    /// cells, read as strong star-shapedness at this resolution.
    pub strongly: bool,
    pub grid: usize,
    /// Grid cell side length.
    pub cell: f64,
}

/// Scan a `grid × grid` sampling of the bounding box for star centers.
pub fn star_center_set(p: &Polygon, grid: usize) -> Result<StarCenterSet, StarError> {
    if grid < 32 {
        return Err(StarError::BadInput("grid must be at least 32"));
    }
    let (lo, hi) = p.bounding_box();
    let step_x = (hi.0 - lo.0) / (grid as f64 - 1.0);
    let step_y = (hi.1 - lo.1) / (grid as f64 - 1.0);
    let cell = step_x.max(step_y);
    let mut hits = alloc::vec![false; grid * grid];
    let mut points = Vec::new();
    for iy in 0..grid {
        for ix in 0..grid {
            let pt = (lo.0 + ix as f64 * step_x, lo.1 + iy as f64 * step_y);
            if is_star_center(p, pt) {
                hits[iy * grid + ix] = true;
                points.push(pt);
            }
        }
    }
    // a disk of radius two cells inside the sampled kernel
    let mut strongly = false;
    'outer: for iy in 0..grid {
        for ix in 0..grid {
            if !hits[iy * grid + ix] {
                continue;
            }
            let mut ok = true;
            'disk: for dy in -2i64..=2 {
                for dx in -2i64..=2 {
                    if dx * dx + dy * dy > 4 {
                        continue;
                    }
                    let jx = ix as i64 + dx;
                    let jy = iy as i64 + dy;
                    if jx < 0 || jy < 0 || jx >= grid as i64 || jy >= grid as i64 {
                        ok = false;
                        break 'disk;
                    }
                    if !hits[jy as usize * grid + jx as usize] {
                        ok = false;
                        break 'disk;
                    }
                }
            }
            if ok {
                strongly = true;
                break 'outer;
            }
        }
    }
    Ok(StarCenterSet {
        points,
        area_estimate: hits.iter().filter(|&&h| h).count() as f64 * step_x * step_y,
        strongly,
        grid,
        cell,
    })
}

fn separation_with_density(p: &Polygon, kappa: f64, per_edge: usize) -> f64 {
    let outer = p.scaled(kappa);
    let mut best = f64::INFINITY;
    for &s in &boundary_samples(&outer, per_edge) {
        for j in 0..p.vertices.len() {
            let (c, d) = p.edge(j);
            best = best.min(point_segment_dist2(s, c, d));
        }
    }
    for &s in &boundary_samples(p, per_edge) {
        for j in 0..outer.vertices.len() {
            let (c, d) = outer.edge(j);
            best = best.min(point_segment_dist2(s, c, d));
        }
    }
    sqrt(best)
}

/// Minimal distance between the boundary of `κ·p` and the boundary of `p`,
/// for a polygon star-shaped about the origin and `κ > 1`. Both boundaries
/// are sampled densely; distances to the other boundary are exact
/// point-to-segment distances.
pub fn dilation_separation(p: &Polygon, kappa: f64) -> Result<f64, StarError> {
    if !(kappa > 1.0) || !kappa.is_finite() {
        return Err(StarError::BadInput("dilation factor must exceed 1"));
    }
    // the origin must sit strictly inside and see the whole boundary
    let scale = p.diameter();
    let mut wall2 = f64::INFINITY;
    for i in 0..p.vertices.len() {
        let (a, b) = p.edge(i);
        wall2 = wall2.min(point_segment_dist2((0.0, 0.0), a, b));
    }
    if wall2 <= (1e-9 * scale) * (1e-9 * scale) || !is_star_center(p, (0.0, 0.0)) {
        return Err(StarError::NotStarShaped);
    }
    Ok(separation_with_density(p, kappa, SEPARATION_SAMPLES_PER_EDGE))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polygon {
        Polygon::new(alloc::vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    fn centered_square() -> Polygon {
        Polygon::new(alloc::vec![(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]).unwrap()
    }

    fn hourglass() -> Polygon {
        Polygon::new(alloc::vec![
            (-1.0, 1.0),
            (-0.02, 0.0),
            (-1.0, -1.0),
            (1.0, -1.0),
            (0.02, 0.0),
            (1.0, 1.0),
        ])
        .unwrap()
    }

    fn ell() -> Polygon {
        Polygon::new(alloc::vec![
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (1.0, 1.0),
            (1.0, 2.0),
            (0.0, 2.0),
        ])
        .unwrap()
    }

    fn hexagon() -> Polygon {
        let v = (0..6)
            .map(|k| {
                let a = core::f64::consts::PI / 3.0 * k as f64;
                (a.cos(), a.sin())
            })
            .collect();
        Polygon::new(v).unwrap()
    }

    #[test]
    fn polygon_validation_rejects_garbage() {
        assert!(matches!(
            Polygon::new(alloc::vec![(0.0, 0.0), (1.0, 0.0)]),
            Err(StarError::BadPolygon(_))
        ));
        // clockwise square
        assert!(matches!(
            Polygon::new(alloc::vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]),
            Err(StarError::BadPolygon(_))
        ));
        // bowtie self-intersection
        assert!(matches!(
            Polygon::new(alloc::vec![(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]),
            Err(StarError::BadPolygon(_))
        ));
        assert!((hourglass().area() - 2.04).abs() < 1e-12);
    }

    #[test]
    fn star_centers_of_known_shapes() {
        let sq = square();
        assert!(is_star_center(&sq, (0.5, 0.5)));
        assert!(!is_star_center(&sq, (1.5, 0.5)));
        let hg = hourglass();
        assert!(is_star_center(&hg, (0.0, 0.0)));
        assert!(!is_star_center(&hg, (0.01, 0.3)));
    }

    #[test]
    fn kernel_of_square_is_the_square() {
        let set = star_center_set(&square(), 32).unwrap();
        assert!(set.strongly);
        assert!(set.area_estimate > 0.9 && set.area_estimate < 1.1, "{}", set.area_estimate);
    }

    #[test]
    fn kernel_of_hourglass_collapses() {
        for grid in [32usize, 64] {
            let set = star_center_set(&hourglass(), grid).unwrap();
            assert!(!set.strongly);
            assert!(set.area_estimate <= 2.0 * set.cell * set.cell, "grid {grid}: {}", set.area_estimate);
        }
    }

    #[test]
    fn kernel_of_ell_is_fat_and_convex() {
        let set = star_center_set(&ell(), 48).unwrap();
        assert!(set.strongly);
        assert!(set.area_estimate > 0.7 && set.area_estimate < 1.3, "{}", set.area_estimate);
        // every grid point inside the hull of the sampled kernel must be a
        // star center too, i.e. the sampled kernel is convex
        let hull = convex_hull(&set.points);
        let hull_poly = Polygon::new(hull).unwrap();
        let p = ell();
        let (lo, hi) = p.bounding_box();
        let g = 48usize;
        let mut interior_hits = 0usize;
        for iy in 0..g {
            for ix in 0..g {
                let pt = (
                    lo.0 + ix as f64 * (hi.0 - lo.0) / (g as f64 - 1.0),
                    lo.1 + iy as f64 * (hi.1 - lo.1) / (g as f64 - 1.0),
                );
                let clear_of_hull_boundary = (0..hull_poly.vertices().len()).all(|e| {
                    let (a, b) = hull_poly.edge(e);
                    point_segment_dist2(pt, a, b) > 1e-18
                });
                if hull_poly.contains(pt) && clear_of_hull_boundary {
                    interior_hits += 1;
                    assert!(is_star_center(&p, pt), "hull interior point {pt:?}");
                }
            }
        }
        assert!(interior_hits > 100, "hull interior was barely sampled");
    }

    fn convex_hull(points: &[(f64, f64)]) -> alloc::vec::Vec<(f64, f64)> {
        let mut pts: alloc::vec::Vec<(f64, f64)> = points.to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        if pts.len() < 3 {
            return pts;
        }
        let mut lower: alloc::vec::Vec<(f64, f64)> = alloc::vec::Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: alloc::vec::Vec<(f64, f64)> = alloc::vec::Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }

    #[test]
    fn hexagon_separation_matches_the_apothem() {
        let hex = hexagon();
        let sep = dilation_separation(&hex, 2.0).unwrap();
        let apothem = 3.0f64.sqrt() / 2.0;
        assert!((sep - apothem).abs() < 1e-3, "{sep}");
        let mut prev = 0.0;
        for kappa in [2.0, 4.0, 8.0] {
            let s = dilation_separation(&hex, kappa).unwrap();
            assert!(s > prev);
            prev = s;
        }
        let tiny = dilation_separation(&hex, 1.01).unwrap();
        assert!(tiny > 0.0 && tiny < 0.02, "{tiny}");
    }

    #[test]
    fn separation_rejects_bad_inputs() {
        assert!(matches!(
            dilation_separation(&hexagon(), 1.0),
            Err(StarError::BadInput(_))
        ));
        // square not containing the origin
        assert!(matches!(
            dilation_separation(&square(), 2.0),
            Err(StarError::NotStarShaped)
        ));
        // hourglass is star-shaped about the origin, so dilation works
        assert!(dilation_separation(&hourglass(), 2.0).is_ok());
    }

    #[test]
    fn separation_scales_with_the_polygon() {
        let hg = hourglass();
        let base = dilation_separation(&hg, 2.0).unwrap();
        for c in [0.5, 2.0] {
            let scaled = dilation_separation(&hg.scaled(c), 2.0).unwrap();
            assert!((scaled - c * base).abs() <= 1e-12 * (1.0 + c * base), "c={c}");
        }
    }

    #[test]
    fn separation_is_stable_under_sample_doubling() {
        for poly in [hexagon(), hourglass(), centered_square()] {
            let a = separation_with_density(&poly, 2.0, SEPARATION_SAMPLES_PER_EDGE);
            let b = separation_with_density(&poly, 2.0, 2 * SEPARATION_SAMPLES_PER_EDGE);
            assert!((a - b).abs() < 1e-3 * poly.diameter(), "{a} vs {b}");
        }
    }

    #[test]
    fn sight_rays_from_a_kernel_disk_cross_transversally() {
        // with a disk of radius r inside the kernel, every sight ray meets
        // its boundary edge at angle at least asin(r / dist)
        let p = ell();
        let set = star_center_set(&p, 48).unwrap();
        assert!(set.strongly);
        let c = (0.5, 0.5);
        assert!(is_star_center(&p, c));
        let r_disk = 2.0 * set.cell;
        let mut min_sin = f64::INFINITY;
        let mut min_ratio = f64::INFINITY;
        let n = p.vertices().len();
        for i in 0..n {
            let (a, b) = (p.vertices()[i], p.vertices()[(i + 1) % n]);
            let elen = dist2(a, b).sqrt();
            for k in 0..CENTER_SAMPLES_PER_EDGE {
                let t = (k as f64 + 0.5) / CENTER_SAMPLES_PER_EDGE as f64;
                let s = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
                let ray = (s.0 - c.0, s.1 - c.1);
                let dist = (ray.0 * ray.0 + ray.1 * ray.1).sqrt();
                let edge_dir = ((b.0 - a.0) / elen, (b.1 - a.1) / elen);
                let sin_angle = (ray.0 * edge_dir.1 - ray.1 * edge_dir.0).abs() / dist;
                min_sin = min_sin.min(sin_angle);
                min_ratio = min_ratio.min(sin_angle * dist / r_disk);
            }
        }
        assert!(min_sin >= 1e-3, "flattest crossing sin {min_sin}");
        assert!(min_ratio >= 1.0 - 1e-3, "disk bound margin {min_ratio}");
    }
}
